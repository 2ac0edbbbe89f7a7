# ============================================================
# foliation_kit/brieskorn.py — M(*D), H_f and Decompositions
# ============================================================
# Everything here runs on the affine chart (x, y) with
# P = P(x, y, 1) and Q = Q(x, y, 1):
#
#   relative_module   the quotient ℚ[x, y, ζ] / ⟨ζQ − 1, qP_x − pζQ_xP,
#                     qP_y − pζQ_yP⟩ and its standard monomials m_j
#   hf_basis          α_j = (x-antiderivative of m_j) dy
#   decompose         α = Σ C_j(f) α_j + ζ₁ df + dζ₂ by a bounded
#                     linear ansatz, escalated round by round
#   is_relatively_exact
#                     ω = dg + T ω₀, solved directly for g and T
#   extract_P1Q1      recover (P₁, Q₁) from a pulled-back correction form
#
# Exact arithmetic throughout; every returned object is checked
# by an independent re-expansion before it leaves this module.
# ============================================================

from dataclasses import dataclass

from foliation_kit.algebra.forms import DifferentialForm, zero_divisor_degree
from foliation_kit.algebra.groebner import Ideal, buchberger, standard_monomials
from foliation_kit.algebra.linear import polynomial_rows, solve_sparse
from foliation_kit.algebra.poly import (ZERO_DEGREE, MonomialOrder, change_ring, dehomogenize,
                                        gradient, homogenize, is_homogeneous, monomial_divides,
                                        monomials_up_to, polynomial_ring, positional,
                                        total_degree)
from foliation_kit.config import Tolerances
from foliation_kit.errors import (DegreeError, EscalationCapReached, GenericityError,
                                  InputError, VerificationError)
from foliation_kit.extensions import logger
from foliation_kit.foliation import (AFFINE_VARIABLES, affine_ring, correction_form,
                                     critical_point_count)

RELATIVE_VARIABLES = AFFINE_VARIABLES + ('zeta',)

# Extra pole orders tried by is_relatively_exact beyond the pole order of ω.
EXACTNESS_POLE_SLACK = 1


# ------------------------------------------------------------
# M(*D)
# ------------------------------------------------------------
@dataclass(frozen=True)
class RelativeModule:
    """
    The localized quotient M(*D).

    Attributes:
        ideal:      the three generators over (x, y, zeta).
        basis:      reduced Gröbner basis in the ζ-eliminating block order.
        standard:   its standard monomials (ζ-free, increasing).
        dimension:  number of standard monomials.
        expected:   critical_point_count(m, n) for generic data.
    """

    ideal: Ideal
    basis: object
    standard: object
    dimension: int
    expected: int

    @property
    def monomials(self):
        """Standard monomials as (i, l) exponent pairs of x^i y^l."""
        return tuple(monom[:2] for monom in self.standard.monomials)


def relative_module(f, strict=True):
    """
    Build M(*D) for f and read off its standard monomials.

    Args:
        f (RationalFirstIntegral): the datum.
        strict (bool): require dimension == critical_point_count(m, n).

    Returns:
        RelativeModule

    Raises:
        GenericityError: positive-dimensional quotient, a standard monomial
                         that still involves ζ, or (strict) a wrong count.
    """
    order = MonomialOrder.block(RELATIVE_VARIABLES, ('zeta',))
    ring = order.ring()
    x, y, zeta = ring.gens
    P = change_ring(f.P_affine, ring)
    Q = change_ring(f.Q_affine, ring)

    generators = (
        zeta * Q - 1,
        P.diff(x) * f.q - zeta * Q.diff(x) * P * f.p,
        P.diff(y) * f.q - zeta * Q.diff(y) * P * f.p,
    )
    ideal = Ideal(generators, order)
    basis = buchberger(ideal)
    standard = standard_monomials(basis)

    if any(monom[2] for monom in standard.monomials):
        raise GenericityError("Standard monomials of M(*D) still involve ζ",
                              {'monomials': [list(m) for m in standard.monomials]})

    expected = critical_point_count(f.m, f.n)
    module = RelativeModule(ideal, basis, standard, standard.count, expected)
    if module.dimension != expected:
        details = {'dimension': module.dimension, 'expected': expected}
        if strict:
            raise GenericityError(
                f"dim M(*D) = {module.dimension}, expected {expected} for generic data", details)
        logger.warning("⚠️  dim M(*D) = %d differs from the generic count %d",
                       module.dimension, expected)
    logger.info("M(*D) has dimension %d (m=%d, n=%d)", module.dimension, f.m, f.n)
    return module


# ------------------------------------------------------------
# H_f basis
# ------------------------------------------------------------
@dataclass(frozen=True)
class BrieskornBasis:
    monomials: tuple
    forms: tuple
    module: RelativeModule
    f: object

    @property
    def count(self):
        return len(self.forms)

    def __len__(self):
        return len(self.forms)


def basis_form(monom, ring):
    """α = x^(i+1) y^l / (i+1) dy, so that dα = x^i y^l dx∧dy."""
    i, l = monom
    primitive = ring.one.mul_monom((i + 1, l)).mul_ground(ring.domain(1, i + 1))
    return DifferentialForm(ring, 1, [ring.zero, primitive])


def hf_basis(f, module=None, strict=True):
    """
    The forms α_j attached to the standard monomials of M(*D).

    Raises:
        VerificationError: if some dα_j differs from m_j dx∧dy.
    """
    module = module if module is not None else relative_module(f, strict=strict)
    ring = affine_ring()
    forms = []
    for monom in module.monomials:
        form = basis_form(monom, ring)
        expected = DifferentialForm.top_form(ring.one.mul_monom(monom))
        if form.d() != expected:
            raise VerificationError("dα_j ≠ m_j dx∧dy", {'monomial': list(monom)})
        forms.append(form)
    return BrieskornBasis(module.monomials, tuple(forms), module, f)


# ------------------------------------------------------------
# Degree bookkeeping
# ------------------------------------------------------------
def weighted_degree(form, n):
    """Numerator degree minus n times the pole order along Q."""
    return zero_divisor_degree(form) - n * form.pole_order


def degree_bound(alpha, alpha_j, f):
    """
    deg C_j ≤ (deg Z(α) + n − deg Z(α_j) − 1) / (mq), rounded down.

    A negative quotient means C_j vanishes; it is reported as ZERO_DEGREE,
    the degree of the zero polynomial, so `deg C_j ≤ bound` still reads
    correctly for the zero coefficient.
    """
    value = zero_divisor_degree(alpha) + f.n - zero_divisor_degree(alpha_j) - 1
    return max(ZERO_DEGREE, value // (f.m * f.q))


# ------------------------------------------------------------
# Decomposition
# ------------------------------------------------------------
@dataclass(frozen=True)
class Decomposition:
    """
    α = Σ C_j(f) α_j + ζ₁ df + dζ₂.

    Attributes:
        coefficients:  C_j as polynomials in t, aligned with the basis.
        zeta1, zeta2:  rational 0-forms with poles along Q.
        residual:      α minus the re-expansion (zero on success).
        degree_bounds: the bound on deg C_j for each j.
        bound_ok:      every deg C_j is within its bound.
        pole_cap:      pole-order cap of the successful round.
        rounds:        escalation rounds used (0 = first ansatz).
    """

    coefficients: tuple
    zeta1: DifferentialForm
    zeta2: DifferentialForm
    residual: DifferentialForm
    degree_bounds: tuple
    bound_ok: bool
    pole_cap: int
    rounds: int

    @property
    def is_exact(self):
        return self.residual.is_zero()

    def coordinate_degrees(self):
        return tuple(total_degree(c) for c in self.coefficients)


def _power_of_f(f, e):
    """f^e as a 0-form over Q."""
    return DifferentialForm.function(f.P_affine ** (f.q * e), f.Q_affine, f.p * e)


def _evaluate_at_f(C, f):
    """C(f) for C ∈ ℚ[t], as a single 0-form over Q."""
    top = max(total_degree(C), 0)
    P, Q = f.P_affine, f.Q_affine
    numerator = P.ring.zero
    for (e,), coeff in C.iterterms():
        numerator += (P ** (f.q * e) * Q ** (f.p * (top - e))).mul_ground(coeff)
    return DifferentialForm.function(numerator, Q, f.p * top)


def expand(decomposition, basis):
    """Re-expand Σ C_j(f) α_j + ζ₁ df + dζ₂ from scratch."""
    f = basis.f
    ring = affine_ring()
    total = DifferentialForm.zero(ring, 1)
    for C, form in zip(decomposition.coefficients, basis.forms):
        if C:
            total = total + _evaluate_at_f(C, f).wedge(form)
    total = total + decomposition.zeta1.wedge(f.differential())
    total = total + decomposition.zeta2.d()
    return total


def _affine_form(alpha, f):
    """Move α onto the affine ring with divisor Q (or none)."""
    if alpha.ring.ngens != 2:
        raise DegreeError("decompose works on affine 1-forms in (x, y)")
    if alpha.degree != 1:
        raise DegreeError("decompose needs a 1-form")
    ring = affine_ring()
    if alpha.ring != ring:
        alpha = DifferentialForm(ring, 1, [positional(c, ring) for c in alpha.coeffs],
                                 positional(alpha.divisor, ring), alpha.pole_order)
    if alpha.pole_order:
        alpha = alpha.over(f.Q_affine)
    return alpha


def _zeta_space(weight, pole_cap, f):
    """(k, monomial) pairs for u/Q^k: polynomial part plus Q-reduced pole parts."""
    lead = f.Q_affine.LM
    space = [(0, monom) for monom in monomials_up_to(2, weight)]
    for k in range(1, pole_cap + 1):
        for monom in monomials_up_to(2, weight + f.n * k):
            if not monomial_divides(lead, monom):
                space.append((k, monom))
    return space


def _lift(form, Q, level):
    """Numerators of `form` over Q^level."""
    if form.pole_order == level:
        return form.coeffs
    factor = Q ** (level - form.pole_order)
    return tuple(c * factor for c in form.coeffs)


def _zeta_from(values, space, f):
    Q = f.Q_affine
    ring = Q.ring
    top = max((k for k, _ in space), default=0)
    numerator = ring.zero
    for value, (k, monom) in zip(values, space):
        if value:
            numerator += ring.one.mul_monom(monom).mul_ground(value) * Q ** (top - k)
    return DifferentialForm.function(numerator, Q, top)


def decompose(alpha, f, basis=None, tolerances=None):
    """
    Coordinates of a rational 1-form in the H_f basis.

    The ansatz holds, per round r = 0, 1, …:
      - ζ₂ = Σ u/Q^k and ζ₁ = Σ u/Q^k with k ≤ (p + 1)·2^r and
        deg u − n·k ≤ w + 1 + r·n (w = weighted degree of α),
      - C_j of degree ≤ degree_bound(α, α_j) + r.
    Columns are ordered ζ₂, ζ₁, C, each by increasing degree, so the
    particular solution prefers low-degree ζ₂ first.

    Args:
        alpha (DifferentialForm): affine 1-form, poles along Q only.
        f (RationalFirstIntegral): the datum.
        basis (BrieskornBasis): precomputed hf_basis(f), optional.
        tolerances (Tolerances): escalation_rounds and max_unknowns.

    Returns:
        Decomposition with zero residual.

    Raises:
        EscalationCapReached: no exact solution within the caps; details
                              hold the residual of the best partial solution.
        VerificationError:    the solution failed its re-expansion.
    """
    tolerances = tolerances or Tolerances()
    basis = basis if basis is not None else hf_basis(f)
    alpha = _affine_form(alpha, f)
    ring = affine_ring()
    Q = f.Q_affine
    t_ring = polynomial_ring(('t',))

    bounds = tuple(degree_bound(alpha, form, f) for form in basis.forms)
    weight = weighted_degree(alpha, f.n) if not alpha.is_zero() else 0
    df = f.differential()
    last = None

    for r in range(tolerances.escalation_rounds + 1):
        pole_cap = max((f.p + 1) * 2 ** r, alpha.pole_order)
        space = _zeta_space(weight + 1 + r * f.n, pole_cap, f)
        c_space = [(j, e) for j in range(len(basis.forms)) for e in range(bounds[j] + r + 1)]
        unknowns = 2 * len(space) + len(c_space)
        if unknowns > tolerances.max_unknowns:
            logger.warning("⚠️  decompose: %d unknowns exceed the cap of %d in round %d",
                           unknowns, tolerances.max_unknowns, r)
            break

        # --- Step 1: build the column forms ---
        zeta_functions = [DifferentialForm.function(ring.one.mul_monom(monom), Q, k)
                          for k, monom in space]
        forms = [g.d() for g in zeta_functions]
        forms += [g.wedge(df) for g in zeta_functions]
        forms += [_power_of_f(f, e).wedge(basis.forms[j]) for j, e in c_space]

        # --- Step 2: clear to a common power of Q and solve ---
        level = max([alpha.pole_order] + [form.pole_order for form in forms])
        columns = [polynomial_rows(_lift(form, Q, level)) for form in forms]
        rhs = polynomial_rows(_lift(alpha, Q, level))
        logger.debug("decompose round %d: %d unknowns, pole cap %d", r, unknowns, pole_cap)
        solution = solve_sparse(columns, rhs)

        # --- Step 3: assemble ---
        values = solution.values
        size = len(space)
        zeta2 = _zeta_from(values[:size], space, f)
        zeta1 = _zeta_from(values[size:2 * size], space, f)
        coefficients = [t_ring.zero] * len(basis.forms)
        t = t_ring.gens[0]
        for value, (j, e) in zip(values[2 * size:], c_space):
            if value:
                coefficients[j] += (t ** e).mul_ground(value)

        candidate = Decomposition(tuple(coefficients), zeta1, zeta2,
                                  DifferentialForm.zero(ring, 1), bounds, True, pole_cap, r)
        residual = alpha - expand(candidate, basis)
        degrees = candidate.coordinate_degrees()
        bound_ok = all(d <= b for d, b in zip(degrees, bounds))
        last = Decomposition(candidate.coefficients, zeta1, zeta2, residual, bounds,
                             bound_ok, pole_cap, r)

        if solution.consistent:
            if not residual.is_zero():
                raise VerificationError("Decomposition does not re-expand to α",
                                        {'residual': residual.to_dict()})
            logger.info("✅ decompose: exact in round %d (pole cap %d)", r, pole_cap)
            return last
        logger.debug("decompose round %d inconsistent (rank %d)", r, solution.rank)

    details = {'rounds': tolerances.escalation_rounds}
    if last is not None:
        details.update({'residual': last.residual.to_dict(), 'pole_cap': last.pole_cap,
                        'rounds': last.rounds})
    raise EscalationCapReached("decompose found no exact solution within the ansatz caps",
                               details)


# ------------------------------------------------------------
# Relative exactness
# ------------------------------------------------------------
@dataclass(frozen=True)
class ExactnessCertificate:
    """
    ω = dg + T ω₀ with g = G/(PQ)^ℓ and T = U/(PQ)^ℓ when valid.
    """

    valid: bool
    g: object = None
    T: object = None
    divisor: object = None
    pole_order: int = 0

    def to_dict(self):
        from foliation_kit.algebra.parser import format_poly

        if not self.valid:
            return {'valid': False}
        return {
            'valid': True,
            'g': self.g.to_dict(),
            'T': self.T.to_dict(),
            'divisor': format_poly(self.divisor),
            'pole_order': self.pole_order,
        }


def _alpha_coeffs(P, Q, p, q):
    return [Q * a * q - P * b * p for a, b in zip(gradient(P), gradient(Q))]


def _solve_certificate(numerators, level, P, Q, p, q, cap, exact_degree=None):
    """
    Solve PQ·N = PQ·dG − ℓ·G·d(PQ) + U·α₀ for G, U of degree ≤ cap.

    Returns:
        (bool, G, U)
    """
    ring = P.ring
    D = P * Q
    dD = gradient(D)
    alpha = _alpha_coeffs(P, Q, p, q)
    monomials = monomials_up_to(ring.ngens, cap)
    if exact_degree is not None:
        monomials = [m for m in monomials if sum(m) == exact_degree]

    columns = []
    for monom in monomials:
        u = ring.one.mul_monom(monom)
        columns.append(polynomial_rows([u * a for a in alpha]))
    for monom in monomials:
        g = ring.one.mul_monom(monom)
        columns.append(polynomial_rows(
            [D * g.diff(x) - g * dd * level for x, dd in zip(ring.gens, dD)]))
    solution = solve_sparse(columns, polynomial_rows([D * c for c in numerators]))

    size = len(monomials)
    U, G = ring.zero, ring.zero
    for value, monom in zip(solution.values[:size], monomials):
        if value:
            U += ring.one.mul_monom(monom).mul_ground(value)
    for value, monom in zip(solution.values[size:], monomials):
        if value:
            G += ring.one.mul_monom(monom).mul_ground(value)
    return solution.consistent, G, U


def _pair_for(ring, f):
    if ring.ngens == 2:
        return positional(f.P_affine, ring), positional(f.Q_affine, ring)
    if ring.ngens == 3:
        return positional(f.P, ring), positional(f.Q, ring)
    raise DegreeError(f"Forms in {ring.ngens} variables are not supported")


def is_relatively_exact(omega, f, tolerances=None):
    """
    Decide ω = dg + Tω₀ and return the certificate.

    Works on the affine chart or in homogeneous coordinates, whichever ring
    ω lives on; its poles must lie on V(P) ∪ V(Q). The pole order of g and T
    is tried at that of ω and EXACTNESS_POLE_SLACK more.

    Raises:
        EscalationCapReached: the linear system exceeds max_unknowns.
        VerificationError:    a solution failed its re-expansion.
    """
    tolerances = tolerances or Tolerances()
    if omega.degree != 1:
        raise DegreeError("Relative exactness is decided for 1-forms")
    ring = omega.ring
    P, Q = _pair_for(ring, f)
    D = P * Q
    try:
        cleared = omega.over(D)
    except InputError as exc:
        raise InputError("ω has poles outside V(P) ∪ V(Q)", exc.details)

    homogeneous = ring.ngens == 3 and all(is_homogeneous(c) for c in cleared.coeffs)
    omega0 = DifferentialForm(ring, 1, _alpha_coeffs(P, Q, f.p, f.q), D, 1)

    for extra in range(EXACTNESS_POLE_SLACK + 1):
        level = cleared.pole_order + extra
        factor = D ** extra
        numerators = [c * factor for c in cleared.coeffs]
        cap = max(max(total_degree(c) for c in numerators), 0) + 1
        exact_degree = cap if homogeneous and any(numerators) else None
        count = len(monomials_up_to(ring.ngens, cap))
        if 2 * count > tolerances.max_unknowns:
            raise EscalationCapReached(
                "Exactness ansatz exceeds the unknown cap",
                {'unknowns': 2 * count, 'cap': tolerances.max_unknowns})

        consistent, G, U = _solve_certificate(numerators, level, P, Q, f.p, f.q, cap,
                                              exact_degree)
        if not consistent:
            continue
        g = DifferentialForm.function(G, D, level)
        T = DifferentialForm.function(U, D, level)
        if not omega.same_as(g.d() + T.wedge(omega0)):
            raise VerificationError("Exactness certificate does not re-expand to ω")
        logger.info("✅ relatively exact with pole order %d along PQ", level)
        return ExactnessCertificate(True, g, T, D, level)

    logger.info("Form is not relatively exact within pole order %d",
                cleared.pole_order + EXACTNESS_POLE_SLACK)
    return ExactnessCertificate(False)


# ------------------------------------------------------------
# (P₁, Q₁) extraction
# ------------------------------------------------------------
def extract_P1Q1(omega, f, F):
    """
    Recover (P₁, Q₁) with ω = qQ̃dP₁ − pP₁dQ̃ − qQ₁dP̃ + pP̃dQ₁,
    P̃ = F*(P), Q̃ = F*(Q).

    The certificate of ω/(P̃Q̃) at pole order 1 gives g = G/(P̃Q̃) and
    T = U/(P̃Q̃); then with B = G, A = −U:
        Q₁ = (B + qA) / ((p + q)P̃),   P₁ = (B − pA) / ((p + q)Q̃).
    The pair is determined up to adding c·(P̃, Q̃); the returned one has
    Q₁ reduced modulo Q̃.

    Args:
        omega (DifferentialForm): polynomial 1-form on the domain of F.
        f (RationalFirstIntegral): the datum on the target.
        F (Morphism): the pull-back map.

    Returns:
        (P₁, Q₁): homogeneous of degrees ms and ns in the domain ring.

    Raises:
        VerificationError: ω is not of this form (an exact division failed
                           or the rebuilt form differs).
    """
    if omega.pole_order or omega.degree != 1:
        raise DegreeError("extract_P1Q1 expects a polynomial 1-form")
    domain = F.domain
    s = F.degree
    Pt, Qt = F.pull(f.P), F.pull(f.Q)
    omega = DifferentialForm(domain, 1, [change_ring(c, domain) for c in omega.coeffs])
    if omega.is_zero():
        return domain.zero, domain.zero

    affine = affine_ring()
    Pa, Qa = dehomogenize(Pt, affine), dehomogenize(Qt, affine)
    numerators = [dehomogenize(c, affine) for c in omega.coeffs[:2]]
    consistent, G, U = _solve_certificate(numerators, 1, Pa, Qa, f.p, f.q,
                                          (f.m + f.n) * s)
    if not consistent:
        raise VerificationError("ω/F*(PQ) is not relatively exact at pole order 1")

    B, A = G, -U
    total = f.p + f.q
    Q1, r1 = (B + A * f.q).div(Pa * total)
    P1, r2 = (B - A * f.p).div(Qa * total)
    if r1 or r2:
        raise VerificationError("Exact division for (P₁, Q₁) failed",
                                {'remainders': [bool(r1), bool(r2)]})

    P1 = homogenize(P1, f.m * s, domain)
    Q1 = homogenize(Q1, f.n * s, domain)
    shift, _ = Q1.div(Qt)
    if shift and shift.is_ground:
        P1, Q1 = P1 - Pt * shift, Q1 - Qt * shift

    rebuilt = correction_form(Pt, Qt, P1, Q1, f.p, f.q)
    if rebuilt != omega:
        raise VerificationError("Recovered (P₁, Q₁) do not rebuild ω")
    return P1, Q1
