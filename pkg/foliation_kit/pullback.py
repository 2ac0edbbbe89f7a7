# ============================================================
# foliation_kit/pullback.py — Pull-back Foliations
# ============================================================
# A morphism F = (R, S, T) of degree s pulls the foliation of
# f = P^q/Q^p back to the foliation of F*(f). This module builds
# the objects attached to that picture:
#
#   - check_morphism / jacobian_data   genericity of F
#   - omega_W, omega_pl, omega_e       first-order deformations
#   - verify_identity_3_32             the ε¹ identity, checked by
#                                      truncated series expansion
#   - jacobian_transport               F*(α₀) through J_F
#   - rank_account                     kernel rank arithmetic
#   - hf_injection_check               pulled-back H_f basis forms
#
# Domain coordinates are (x, y, z), target coordinates (X, Y, Z).
# ============================================================

from dataclasses import dataclass, field
from fractions import Fraction

from foliation_kit.algebra.forms import DifferentialForm, Morphism, pullback_form, zero_divisor_degree
from foliation_kit.algebra.groebner import projectively_empty
from foliation_kit.algebra.linear import matrix_rank
from foliation_kit.algebra.parser import format_poly
from foliation_kit.algebra.poly import (compose, gradient, is_homogeneous, polynomial_ring,
                                        total_degree, variable_names)
from foliation_kit.brieskorn import basis_form, decompose, hf_basis
from foliation_kit.errors import DegreeError, InputError, VerificationError
from foliation_kit.extensions import logger
from foliation_kit.foliation import (RationalFirstIntegral, alpha0, affine_ring, correction_form,
                                     milnor_f, milnor_pullback)

DOMAIN_VARIABLES = ('x', 'y', 'z')


def domain_ring():
    return polynomial_ring(DOMAIN_VARIABLES)


# ------------------------------------------------------------
# Morphisms
# ------------------------------------------------------------
def morphism(components, codomain):
    """
    Morphism of P² of degree s ≥ 2.

    Raises:
        DegreeError: wrong number of components, non-homogeneous or
                     unequal degrees, or s < 2.
    """
    F = Morphism(components, codomain)
    if F.domain.ngens != 3:
        raise DegreeError("A morphism of P² needs components in three variables")
    degrees = {total_degree(c) for c in F.components}
    if len(degrees) != 1 or not all(is_homogeneous(c) for c in F.components):
        raise DegreeError("Components must be homogeneous of one common degree")
    if F.degree < 2:
        raise DegreeError(f"Morphism degree must be at least 2, got s={F.degree}")
    return F


def random_morphism(s, codomain, rng, bound=3):
    """Seeded morphism with integer coefficients; pure powers keep det J_F ≢ 0 likely."""
    ring = domain_ring()
    components = []
    for k in range(3):
        terms = {}
        for i in range(s + 1):
            for j in range(s + 1 - i):
                value = int(rng.integers(-bound, bound + 1))
                if value:
                    terms[(i, j, s - i - j)] = ring.domain(value)
        pure = tuple(s if t == k else 0 for t in range(3))
        terms[pure] = ring.domain(int(rng.integers(bound + 1, 2 * bound + 2)))
        components.append(ring.from_dict(terms))
    return morphism(components, codomain)


@dataclass(frozen=True)
class JacobianData:
    """J_F, its determinant and the ideal of 2×2 minors."""

    matrix: tuple
    discriminant: object
    minors: tuple


def jacobian_data(F):
    J = F.jacobian()
    det = (J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1])
           - J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0])
           + J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]))
    minors = []
    for r1 in range(3):
        for r2 in range(r1 + 1, 3):
            for c1 in range(3):
                for c2 in range(c1 + 1, 3):
                    minor = J[r1][c1] * J[r2][c2] - J[r1][c2] * J[r2][c1]
                    if minor:
                        minors.append(minor)
    return JacobianData(J, det, tuple(minors))


@dataclass
class MorphismReport:
    degree: int
    jacobian_nonzero: bool
    coprime: bool
    separated: object = None
    witnesses: dict = field(default_factory=dict)

    @property
    def generic(self):
        return self.jacobian_nonzero and self.coprime and self.separated is not False

    def to_dict(self):
        return {
            'degree': self.degree,
            'jacobian_nonzero': self.jacobian_nonzero,
            'coprime': self.coprime,
            'separated': self.separated,
            'witnesses': dict(self.witnesses),
        }


def check_morphism(F, f=None):
    """
    Genericity of F: det J_F ≢ 0, components without a common factor and,
    given f, V(J) ∩ V(I₁) = ∅ with J the 2×2 minors of J_F and
    I₁ = ⟨F*(λ₁), F*(λ₂), F*(λ₃)⟩ from α₀ = Σ λ_i dX_i.
    """
    data = jacobian_data(F)
    witnesses = {'det_JF_degree': total_degree(data.discriminant)}
    R, S, T = F.components
    common = R.gcd(S).gcd(T)
    coprime = common.is_ground
    witnesses['common_factor'] = format_poly(common.monic()) if not coprime else '1'

    separated = None
    if f is not None:
        ideal = [g for g in data.minors] + [F.pull(c) for c in alpha0(f).coeffs]
        separated, basis = projectively_empty([g for g in ideal if g], variable_names(F.domain))
        witnesses['separated'] = f"{len(basis.elements)} Gröbner elements"

    report = MorphismReport(F.degree, bool(data.discriminant), coprime, separated, witnesses)
    if not report.generic:
        logger.warning("⚠️  Morphism is not generic: %s", report.to_dict())
    return report


def pullback_integral(f, F):
    """F*(f) = F*(P)^q / F*(Q)^p, of degrees ms and ns."""
    return RationalFirstIntegral(F.pull(f.P), F.pull(f.Q), f.p, f.q)


# ------------------------------------------------------------
# Deformation directions
# ------------------------------------------------------------
@dataclass(frozen=True)
class DeformationDirection:
    """F₁ = (R₁, S₁, T₁) of degree s and an optional α₁ ∈ Ω¹_{a+1}."""

    components: tuple
    alpha1: object = None

    def check(self, f, F):
        if len(self.components) != 3:
            raise DegreeError("F₁ needs three components")
        for c in self.components:
            if c and (total_degree(c) != F.degree or not is_homogeneous(c)):
                raise DegreeError(f"F₁ components must be homogeneous of degree {F.degree}")
        if self.alpha1 is not None and not self.alpha1.is_zero():
            degree = f.m + f.n - 1
            coeffs = [c for c in self.alpha1.coeffs if c]
            if self.alpha1.ring != f.ring or any(
                    total_degree(c) != degree or not is_homogeneous(c) for c in coeffs):
                raise DegreeError(f"α₁ must have homogeneous coefficients of degree {degree}")
            if self.alpha1.contract_euler():
                raise DegreeError("α₁ violates the Euler condition")
        return self


def random_direction(f, F, rng, bound=3, with_alpha1=True):
    """Seeded (F₁, α₁); α₁ = (X, Y, Z) × (a₁, a₂, a₃) satisfies the Euler condition."""
    domain = F.domain

    def random_homogeneous(ring, degree):
        terms = {}
        for i in range(degree + 1):
            for j in range(degree + 1 - i):
                value = int(rng.integers(-bound, bound + 1))
                if value:
                    terms[(i, j, degree - i - j)] = ring.domain(value)
        return ring.from_dict(terms)

    components = tuple(random_homogeneous(domain, F.degree) for _ in range(3))
    alpha1 = None
    if with_alpha1:
        ring = f.ring
        X, Y, Z = ring.gens
        a1, a2, a3 = (random_homogeneous(ring, f.m + f.n - 2) for _ in range(3))
        alpha1 = DifferentialForm(ring, 1, [Y * a3 - Z * a2, Z * a1 - X * a3, X * a2 - Y * a1])
    return DeformationDirection(components, alpha1).check(f, F)


def _pairing(F, F1, p):
    """⟨F₁, F*(grad p)⟩."""
    domain = F.domain
    total = domain.zero
    for c, partial in zip(F1, gradient(p)):
        total += c * F.pull(partial)
    return total


def p1_remark(f, F, F1):
    """P₁ = ⟨F₁, F*(grad P)⟩."""
    return _pairing(F, F1, f.P)


def q1_remark(f, F, F1):
    """Q₁ = −⟨F₁, F*(grad Q)⟩, the sign that makes ω_W = ω_pl + F*(α₁)."""
    return -_pairing(F, F1, f.Q)


def p1_lemma(f, F, F1):
    """P₁ = q⟨F₁, F*(grad P)⟩ = q · p1_remark."""
    return p1_remark(f, F, F1) * f.q


def q1_lemma(f, F, F1):
    """Q₁ = p⟨F₁, F*(grad Q)⟩ = −p · q1_remark."""
    return _pairing(F, F1, f.Q) * f.p


# ------------------------------------------------------------
# Tangent vectors
# ------------------------------------------------------------
def omega_W(F, F1, alpha, alpha1=None):
    """
    ω_W = Σ F*(A_i) dF₁ᵢ + Σ (Σ_k F₁ₖ F*(∂_k A_i)) dFᵢ + F*(α₁)
    for α = A dX + B dY + C dZ.

    Raises:
        DegreeError: α is not a 1-form on the target of F.
    """
    if alpha.degree != 1 or alpha.pole_order or alpha.ring.ngens != 3:
        raise DegreeError("ω_W needs a polynomial 1-form A dX + B dY + C dZ")
    domain = F.domain
    F1 = tuple(F1)
    if len(F1) != 3:
        raise DegreeError("F₁ needs three components")

    dF = F.differentials()
    dF1 = [DifferentialForm(domain, 1, list(gradient(c))) for c in F1]
    result = DifferentialForm.zero(domain, 1)
    for i, A in enumerate(alpha.coeffs):
        if not A:
            continue
        result = result + dF1[i] * F.pull(A)
        variation = domain.zero
        for c, partial in zip(F1, gradient(A)):
            if c and partial:
                variation += c * F.pull(partial)
        result = result + dF[i] * variation
    if alpha1 is not None:
        result = result + pullback_form(F, alpha1)
    return result


def omega_pl(f, F, F1):
    """qQ̃dP₁ − pP₁dQ̃ − qQ₁dP̃ + pP̃dQ₁ with the pair (p1_remark, q1_remark)."""
    return correction_form(F.pull(f.P), F.pull(f.Q), p1_remark(f, F, F1),
                           q1_remark(f, F, F1), f.p, f.q)


def omega_e(f, F, F1):
    """The correction form with P₁ = q⟨F₁, F*(grad P)⟩, Q₁ = p⟨F₁, F*(grad Q)⟩."""
    return correction_form(F.pull(f.P), F.pull(f.Q), p1_lemma(f, F, F1),
                           q1_lemma(f, F, F1), f.p, f.q)


# ------------------------------------------------------------
# The ε¹ identity
# ------------------------------------------------------------
def _jet(p, F, F1, sign):
    """
    (c₀, c₁) with p(F + sign·ε·F₁) = c₀ + ε c₁ + O(ε²).

    Composition happens in a ring with a formal ε; terms of ε-degree
    ≥ 2 are discarded.
    """
    domain = F.domain
    names = variable_names(domain)
    series = polynomial_ring(names + ('eps',))
    eps = series.gens[-1]
    lift = [series.from_dict({m + (0,): c for m, c in g.iterterms()}) for g in F.components]
    lift1 = [series.from_dict({m + (0,): c for m, c in g.iterterms()}) for g in F1]
    images = [g + eps * g1 * sign for g, g1 in zip(lift, lift1)]
    composed = compose(p, images, series)
    parts = ({}, {})
    for monom, coeff in composed.iterterms():
        if monom[-1] < 2:
            parts[monom[-1]][monom[:-1]] = coeff
    return domain.from_dict(parts[0]), domain.from_dict(parts[1])


def _d(p):
    return DifferentialForm(p.ring, 1, list(gradient(p)))


def epsilon_numerator(f, F, F1):
    """
    ε¹ coefficient of qV dU − pU dV for U = q·P(F + εF₁), V = p·Q(F − εF₁),
    the numerator of d(U^q / V^p) up to the factor U^(q−1) / V^(p+1).
    """
    U0, U1 = (c * f.q for c in _jet(f.P, F, F1, 1))
    V0, V1 = (c * f.p for c in _jet(f.Q, F, F1, -1))
    dU0, dU1, dV0, dV1 = _d(U0), _d(U1), _d(V0), _d(V1)
    return (dU1 * V0 + dU0 * V1) * f.q - (dV1 * U0 + dV0 * U1) * f.p


def verify_identity_3_32(f, F, F1):
    """
    True iff the series side equals pq·(qQ̃ dP₁' − pP₁' dQ̃ − qQ₁' dP̃ + pP̃ dQ₁')
    with P₁' = ⟨F₁, F*(grad P)⟩, Q₁' = ⟨F₁, F*(grad Q)⟩.
    """
    series_side = epsilon_numerator(f, F, F1)
    closed = correction_form(F.pull(f.P), F.pull(f.Q), _pairing(F, F1, f.P),
                             _pairing(F, F1, f.Q), f.p, f.q) * (f.p * f.q)
    verdict = series_side == closed
    if not verdict:
        logger.error("❌ ε¹ identity failed for s=%d", F.degree)
    return verdict


def jacobian_transport(f, F):
    """
    λ from α₀ = λ₁dX + λ₂dY + λ₃dZ and ρ = (F*λ)·J_F.

    Returns:
        (λ, ρ): two triples of polynomials.

    Raises:
        VerificationError: ρ disagrees with the direct pull-back F*(α₀).
    """
    form = alpha0(f)
    lam = tuple(form.coeffs)
    pulled = [F.pull(c) for c in lam]
    J = F.jacobian()
    rho = tuple(sum((pulled[i] * J[i][j] for i in range(3)), F.domain.zero) for j in range(3))
    if tuple(pullback_form(F, form).coeffs) != rho:
        raise VerificationError("(F*λ)·J_F differs from F*(α₀)")
    return lam, rho


# ------------------------------------------------------------
# Rank arithmetic
# ------------------------------------------------------------
@dataclass(frozen=True)
class RankAccount:
    mu_f: int
    mu: int
    rho_D: int
    ker_rank: int
    h_rank: int

    def to_dict(self):
        return {'mu_f': self.mu_f, 'mu': self.mu, 'rho_D': self.rho_D,
                'ker_rank': self.ker_rank, 'h_rank': self.h_rank}


def rank_account(m, n, s, rho_D=None):
    """
    μ = s²μ_f + ρ_D, ker_rank = μ − μ_f, H-rank = (s² − 1)μ_f + ρ_D.

    Raises:
        DegreeError: m > n ≥ 2 or s ≥ 2 violated.
        InputError:  negative ρ_D, or a supplied ρ_D that breaks μ = s²μ_f + ρ_D.
    """
    mu_f = milnor_f(m, n)
    mu = milnor_pullback(m, n, s)
    derived = mu - s * s * mu_f
    if rho_D is None:
        rho_D = derived
    if rho_D < 0:
        raise InputError(f"ρ_D = {rho_D} is negative", {'m': m, 'n': n, 's': s})
    if rho_D != derived:
        raise InputError(f"ρ_D = {rho_D} is inconsistent with μ − s²μ_f = {derived}",
                         {'m': m, 'n': n, 's': s})
    return RankAccount(mu_f, mu, rho_D, mu - mu_f, (s * s - 1) * mu_f + rho_D)


# ------------------------------------------------------------
# H_f → H_{F*(f)}
# ------------------------------------------------------------
def pulled_basis_form(form, f, F):
    """F*(α) on the domain chart z = 1, through the Euler homogenization of α."""
    homogeneous = form.homogenize(f.ring)
    return pullback_form(F, homogeneous).dehomogenize(affine_ring())


def injection_degree_bound(f, F):
    """
    (deg Z(F*(η)) + ns − deg Z(x dy) − 1) / (msq) for η = x dy lifted to P².

    A value below 1 forces the coordinates of pulled-back forms to be constants.
    """
    eta = basis_form((0, 0), affine_ring()).homogenize(f.ring)
    degree = zero_divisor_degree(pullback_form(F, eta))
    s = F.degree
    return Fraction(degree + f.n * s - 1 - 1, f.m * s * f.q)


@dataclass
class InjectionReport:
    constant: bool
    rank: int
    expected_rank: int
    degree_bound: Fraction
    coordinates: list

    @property
    def passed(self):
        return self.constant and self.rank == self.expected_rank

    def to_dict(self):
        return {
            'passed': self.passed,
            'constant': self.constant,
            'rank': self.rank,
            'expected_rank': self.expected_rank,
            'degree_bound': f"{self.degree_bound.numerator}/{self.degree_bound.denominator}",
        }


def hf_injection_check(f, F, tolerances=None):
    """
    Decompose every pulled-back H_f basis form in H_{F*(f)}.

    Passes when all coordinates are constants and the constant matrix
    has rank equal to the number of H_f basis forms.

    Raises:
        EscalationCapReached: from decompose.
    """
    source = hf_basis(f, strict=False)
    pulled = pullback_integral(f, F)
    target = hf_basis(pulled, strict=False)

    rows, constant = [], True
    for form in source.forms:
        result = decompose(pulled_basis_form(form, f, F), pulled, target, tolerances)
        degrees = result.coordinate_degrees()
        constant = constant and all(d <= 0 for d in degrees)
        rows.append([c.coeff(1) if c else 0 for c in result.coefficients])
    rank = matrix_rank(rows)
    report = InjectionReport(constant, rank, source.count, injection_degree_bound(f, F), rows)
    logger.info("H_f injection: rank %d of %d, constant=%s", rank, source.count, constant)
    return report
