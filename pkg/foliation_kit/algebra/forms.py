# ============================================================
# foliation_kit/algebra/forms.py — Rational Differential Forms
# ============================================================
# A DifferentialForm of degree k over a ring with n variables is
#
#       ( Σ_I  N_I dx_I ) / D^ℓ
#
# where I runs over increasing index tuples of length k, the
# N_I are polynomials, D is a fixed divisor polynomial and ℓ
# the pole order. The representation is normalized on
# construction: while every N_I is divisible by D the common
# factor is cancelled, so equal forms over the same divisor
# have equal representations.
#
# Two variables give the affine forms (dx, dy, dx∧dy); three
# variables give the homogeneous forms A dX + B dY + C dZ used
# by the Euler condition and the pull-back constructions.
#
# Morphism lives here too because pullback_form needs it and
# the pullback module builds on top of this file.
# ============================================================

from itertools import combinations

from foliation_kit.algebra.parser import format_poly
from foliation_kit.algebra.poly import (ZERO_DEGREE, change_ring, compose,
                                        dehomogenize, gradient, homogenize, total_degree)
from foliation_kit.errors import DegreeError, InputError


def form_basis(nvars, degree):
    """Increasing index tuples labelling dx_I, in lexicographic order."""
    return tuple(combinations(range(nvars), degree))


def _merge_sign(left, right):
    """Sign of the permutation sorting left + right; 0 if they overlap."""
    if set(left) & set(right):
        return 0
    sequence = list(left) + list(right)
    inversions = sum(1 for i in range(len(sequence))
                     for j in range(i + 1, len(sequence)) if sequence[i] > sequence[j])
    return -1 if inversions % 2 else 1


class DifferentialForm:
    """
    Immutable rational k-form with poles along a single divisor.

    Attributes:
        ring:        the polynomial ring (its generators are the coordinates).
        degree:      k.
        coeffs:      numerators, aligned with form_basis(ring.ngens, k).
        divisor:     the divisor polynomial D (ring.one when pole_order is 0).
        pole_order:  ℓ ≥ 0.
    """

    __slots__ = ('ring', 'degree', 'coeffs', 'divisor', 'pole_order')

    def __init__(self, ring, degree, coeffs, divisor=None, pole_order=0):
        basis = form_basis(ring.ngens, degree)
        if degree < 0 or degree > ring.ngens:
            raise DegreeError(f"No {degree}-forms in {ring.ngens} variables")
        coeffs = tuple(change_ring(c, ring) if hasattr(c, 'ring') else ring(c) for c in coeffs)
        if len(coeffs) != len(basis):
            raise DegreeError(
                f"A {degree}-form in {ring.ngens} variables needs {len(basis)} coefficients")
        if pole_order < 0:
            raise DegreeError("Negative pole order")
        divisor = ring.one if divisor is None else change_ring(divisor, ring)
        if not divisor:
            raise InputError("The pole divisor must be nonzero")

        # --- normalize: cancel common factors of the divisor ---
        if not any(coeffs):
            pole_order = 0
        while pole_order > 0:
            quotients = []
            for c in coeffs:
                q, r = c.div(divisor)
                if r:
                    break
                quotients.append(q)
            else:
                coeffs = tuple(quotients)
                pole_order -= 1
                continue
            break
        if pole_order == 0:
            divisor = ring.one

        object.__setattr__(self, 'ring', ring)
        object.__setattr__(self, 'degree', degree)
        object.__setattr__(self, 'coeffs', coeffs)
        object.__setattr__(self, 'divisor', divisor)
        object.__setattr__(self, 'pole_order', pole_order)

    def __setattr__(self, name, value):
        raise AttributeError("DifferentialForm is immutable")

    # ------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------
    @classmethod
    def zero(cls, ring, degree):
        return cls(ring, degree, [ring.zero] * len(form_basis(ring.ngens, degree)))

    @classmethod
    def function(cls, numerator, divisor=None, pole_order=0):
        """The 0-form numerator / divisor^pole_order."""
        return cls(numerator.ring, 0, [numerator], divisor, pole_order)

    @classmethod
    def one_form(cls, coeffs, divisor=None, pole_order=0):
        return cls(coeffs[0].ring, 1, coeffs, divisor, pole_order)

    @classmethod
    def top_form(cls, coeff, divisor=None, pole_order=0):
        ring = coeff.ring
        return cls(ring, ring.ngens, [coeff], divisor, pole_order)

    @classmethod
    def differential_of(cls, index, ring):
        """dx_index."""
        coeffs = [ring.zero] * ring.ngens
        coeffs[index] = ring.one
        return cls(ring, 1, coeffs)

    # ------------------------------------------------------------
    # Basic queries
    # ------------------------------------------------------------
    @property
    def basis(self):
        return form_basis(self.ring.ngens, self.degree)

    def components(self):
        return dict(zip(self.basis, self.coeffs))

    def is_zero(self):
        return not any(self.coeffs)

    def numerator_degree(self):
        return max((total_degree(c) for c in self.coeffs), default=ZERO_DEGREE)

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return (self.ring == other.ring and self.degree == other.degree
                and self.pole_order == other.pole_order
                and self.coeffs == other.coeffs
                and (self.pole_order == 0 or self.divisor == other.divisor))

    def __hash__(self):
        return hash((self.degree, self.pole_order, self.coeffs))

    def same_as(self, other):
        """Equality as rational forms, whatever divisors represent them."""
        if self.ring != other.ring or self.degree != other.degree:
            return False
        left = self.divisor ** self.pole_order if self.pole_order else self.ring.one
        right = other.divisor ** other.pole_order if other.pole_order else self.ring.one
        return all(a * right == b * left for a, b in zip(self.coeffs, other.coeffs))

    # ------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------
    def _common_divisor(self, other):
        if self.pole_order == 0:
            return other.divisor
        if other.pole_order == 0 or self.divisor == other.divisor:
            return self.divisor
        raise InputError("Forms have poles along different divisors",
                         {'left': format_poly(self.divisor), 'right': format_poly(other.divisor)})

    def _raised(self, divisor, order):
        """Numerators over divisor^order (order ≥ own pole order)."""
        if order == self.pole_order:
            return self.coeffs
        factor = divisor ** (order - self.pole_order)
        return tuple(c * factor for c in self.coeffs)

    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if other.degree != self.degree or other.ring != self.ring:
            raise DegreeError("Cannot add forms of different degree or ring")
        divisor = self._common_divisor(other)
        order = max(self.pole_order, other.pole_order)
        coeffs = [a + b for a, b in zip(self._raised(divisor, order),
                                        other._raised(divisor, order))]
        return DifferentialForm(self.ring, self.degree, coeffs, divisor, order)

    def __neg__(self):
        return DifferentialForm(self.ring, self.degree, [-c for c in self.coeffs],
                                self.divisor, self.pole_order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DifferentialForm):
            return self.wedge(other)
        if hasattr(other, 'ring'):
            other = change_ring(other, self.ring)
            coeffs = [c * other for c in self.coeffs]
        else:
            coeffs = [c.mul_ground(self.ring.domain.convert(other)) for c in self.coeffs]
        return DifferentialForm(self.ring, self.degree, coeffs, self.divisor, self.pole_order)

    __rmul__ = __mul__

    def over(self, divisor):
        """Rewrite with poles along `divisor`, a polynomial multiple of the current one."""
        divisor = change_ring(divisor, self.ring)
        if self.pole_order == 0:
            return DifferentialForm(self.ring, self.degree, self.coeffs, divisor, 0)
        cofactor, remainder = divisor.div(self.divisor)
        if remainder:
            raise InputError("New divisor is not a multiple of the old one")
        factor = cofactor ** self.pole_order
        return DifferentialForm(self.ring, self.degree, [c * factor for c in self.coeffs],
                                divisor, self.pole_order)

    # ------------------------------------------------------------
    # Exterior calculus
    # ------------------------------------------------------------
    def wedge(self, other):
        """
        Exterior product; pole orders add.

        Raises:
            DegreeError: if the degrees add up beyond the number of variables.
        """
        if other.ring != self.ring:
            raise DegreeError("Cannot wedge forms over different rings")
        degree = self.degree + other.degree
        if degree > self.ring.ngens:
            raise DegreeError(f"Wedge of total degree {degree} in {self.ring.ngens} variables")
        divisor = self._common_divisor(other)
        target = {I: self.ring.zero for I in form_basis(self.ring.ngens, degree)}
        for I, a in zip(self.basis, self.coeffs):
            if not a:
                continue
            for J, b in zip(other.basis, other.coeffs):
                sign = _merge_sign(I, J)
                if sign and b:
                    key = tuple(sorted(I + J))
                    target[key] = target[key] + (a * b if sign > 0 else -(a * b))
        return DifferentialForm(self.ring, degree, list(target.values()), divisor,
                                self.pole_order + other.pole_order)

    def _polynomial_d(self, coeffs):
        ring = self.ring
        target = {I: ring.zero for I in form_basis(ring.ngens, self.degree + 1)}
        for I, c in zip(self.basis, coeffs):
            if not c:
                continue
            for j, x in enumerate(ring.gens):
                sign = _merge_sign((j,), I)
                if sign:
                    derivative = c.diff(x)
                    if derivative:
                        key = tuple(sorted((j,) + I))
                        target[key] = target[key] + (derivative if sign > 0 else -derivative)
        return list(target.values())

    def d(self):
        """
        Exterior derivative, quotient rule across the pole order:
        d(N / D^ℓ) = (D·dN − ℓ·dD∧N) / D^(ℓ+1).
        """
        if self.degree >= self.ring.ngens:
            raise DegreeError(f"d of a top-degree ({self.degree}) form")
        dN = self._polynomial_d(self.coeffs)
        if self.pole_order == 0:
            return DifferentialForm(self.ring, self.degree + 1, dN)
        D, l = self.divisor, self.pole_order
        dD = DifferentialForm.one_form(list(gradient(D)))
        dD_N = dD.wedge(DifferentialForm(self.ring, self.degree, self.coeffs))
        coeffs = [D * a - b.mul_ground(self.ring.domain(l)) for a, b in zip(dN, dD_N.coeffs)]
        return DifferentialForm(self.ring, self.degree + 1, coeffs, D, l + 1)

    def contract_euler(self):
        """Σ x_i N_i for a 1-form (the numerator's contraction with the radial field)."""
        if self.degree != 1:
            raise DegreeError("Euler contraction is implemented for 1-forms")
        total = self.ring.zero
        for x, c in zip(self.ring.gens, self.coeffs):
            total += x * c
        return total

    def pullback(self, morphism):
        return pullback_form(morphism, self)

    # ------------------------------------------------------------
    # Charts
    # ------------------------------------------------------------
    def dehomogenize(self, target):
        """Restrict to the chart where the last variable is 1 (its differential dropped)."""
        last = self.ring.ngens - 1
        kept = [(I, c) for I, c in zip(self.basis, self.coeffs) if last not in I]
        coeffs = [dehomogenize(c, target) for _, c in kept]
        divisor = dehomogenize(self.divisor, target)
        return DifferentialForm(target, self.degree, coeffs, divisor, self.pole_order)

    def homogenize(self, target, degree=None):
        """
        Euler 1-form on `target` (one extra last variable) restricting to self.

        With e the numerator degree, the result has coefficients of degree
        `degree` (default e + 1): A_i = Z·A_i', C = −Σ x_i A_i' where A_i'
        is the homogenization of the i-th coefficient to degree − 1.
        """
        if self.degree != 1 or self.pole_order:
            raise DegreeError("Only polynomial 1-forms are homogenized")
        if degree is None:
            degree = max(self.numerator_degree(), 0) + 1
        Z = target.gens[-1]
        lifted = [homogenize(c, degree - 1, target) for c in self.coeffs]
        last = target.zero
        for x, a in zip(target.gens, lifted):
            last -= x * a
        return DifferentialForm(target, 1, [Z * a for a in lifted] + [last])

    # ------------------------------------------------------------
    # Display
    # ------------------------------------------------------------
    def labels(self):
        names = [str(s) for s in self.ring.symbols]
        if self.degree == 0:
            return ['1']
        return ['∧'.join(f"d{names[i]}" for i in I) for I in self.basis]

    def to_dict(self):
        return {
            'degree': self.degree,
            'coefficients': {label: format_poly(c) for label, c in zip(self.labels(), self.coeffs)},
            'divisor': format_poly(self.divisor),
            'pole_order': self.pole_order,
        }

    def __repr__(self):
        body = ' + '.join(f"({format_poly(c)}) {label}"
                          for label, c in zip(self.labels(), self.coeffs) if c) or '0'
        if self.pole_order:
            return f"<{self.degree}-form [{body}] / ({format_poly(self.divisor)})^{self.pole_order}>"
        return f"<{self.degree}-form {body}>"


def zero_divisor_degree(form):
    """deg Z(ω): the largest degree among the numerator components."""
    return form.numerator_degree()


class Morphism:
    """
    A polynomial map given by its components.

    `components` live in the domain ring (coordinates x, y, z); the
    i-th component is substituted for the i-th variable of `codomain`
    (coordinates X, Y, Z) when pulling back.
    """

    __slots__ = ('components', 'codomain', 'domain')

    def __init__(self, components, codomain):
        components = tuple(components)
        if not components:
            raise DegreeError("A morphism needs at least one component")
        domain = components[0].ring
        if len(components) != codomain.ngens:
            raise DegreeError(
                f"{len(components)} components for {codomain.ngens} target variables")
        object.__setattr__(self, 'components', tuple(change_ring(c, domain) for c in components))
        object.__setattr__(self, 'codomain', codomain)
        object.__setattr__(self, 'domain', domain)

    def __setattr__(self, name, value):
        raise AttributeError("Morphism is immutable")

    @property
    def degree(self):
        return max(total_degree(c) for c in self.components)

    def pull(self, p):
        """F*(p) = p ∘ F; variables of p are matched by position."""
        return compose(p, self.components, self.domain)

    def jacobian(self):
        """Rows ∂F_i/∂x_j."""
        return tuple(tuple(c.diff(x) for x in self.domain.gens) for c in self.components)

    def differentials(self):
        return tuple(DifferentialForm.one_form(list(gradient(c))) for c in self.components)


def exterior_d(form):
    return form.d()


def wedge(left, right):
    return left.wedge(right)


def pullback_form(morphism, form):
    """
    F*(ω) = Σ_I F*(N_I) dF_I / F*(D)^ℓ.

    Raises:
        DegreeError: if ω does not live on the morphism's codomain or its
                     degree exceeds the domain dimension.
    """
    if form.ring.ngens != morphism.codomain.ngens:
        raise DegreeError(
            f"Form in {form.ring.ngens} variables, morphism target has {morphism.codomain.ngens}")
    domain = morphism.domain
    if form.degree > domain.ngens:
        raise DegreeError(f"Cannot pull a {form.degree}-form back to {domain.ngens} variables")
    differentials = morphism.differentials()
    result = DifferentialForm.zero(domain, form.degree)
    for I, c in zip(form.basis, form.coeffs):
        if not c:
            continue
        piece = DifferentialForm.function(morphism.pull(c))
        for i in I:
            piece = piece.wedge(differentials[i])
        result = result + piece
    divisor = morphism.pull(form.divisor) if form.pole_order else None
    return DifferentialForm(domain, form.degree, result.coeffs, divisor, form.pole_order)
