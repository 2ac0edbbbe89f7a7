# ============================================================
# foliation_kit/foliation.py — The First Integral f = P^q / Q^p
# ============================================================
# What lives here:
#   - RationalFirstIntegral: homogeneous P, Q with exponents
#     p, q, plus the affine view P(x, y, 1), Q(x, y, 1)
#   - alpha0 / omega0: α₀ = qQ dP − pP dQ and ω₀ = α₀ / (PQ)
#   - euler_check for homogeneous 1-forms
#   - Milnor and degree bookkeeping
#   - check_conditions: the genericity verdict, one flag per
#     condition, each with its certificate
#
# Affine computations (Brieskorn module, periods) always run on
# the ring (x, y); homogeneous ones on the ring of P and Q.
# ============================================================

from dataclasses import dataclass, field
from math import gcd

from foliation_kit.algebra.forms import DifferentialForm
from foliation_kit.algebra.groebner import projectively_empty
from foliation_kit.algebra.parser import format_poly
from foliation_kit.algebra.poly import (change_ring, dehomogenize, gradient, homogenize, is_homogeneous,
                                        polynomial_ring, positional, total_degree,
                                        variable_names)
from foliation_kit.errors import DegreeError, FoliationKitError
from foliation_kit.extensions import logger

HOMOGENEOUS_VARIABLES = ('X', 'Y', 'Z')
AFFINE_VARIABLES = ('x', 'y')


def affine_ring():
    return polynomial_ring(AFFINE_VARIABLES)


@dataclass(frozen=True)
class RationalFirstIntegral:
    """
    The datum f = P^q / Q^p.

    P and Q are homogeneous in three variables (any names; the last one is
    the coordinate of the line at infinity). Structural invariants are
    enforced on construction:
        gcd(p, q) = 1,  m·q = n·p,  m > n ≥ 2.
    """

    P: object
    Q: object
    p: int
    q: int

    def __post_init__(self):
        if self.P.ring.ngens != 3 or self.Q.ring != self.P.ring:
            raise DegreeError("P and Q must share one ring with three variables")
        if not self.P or not self.Q:
            raise DegreeError("P and Q must be nonzero")
        if not (is_homogeneous(self.P) and is_homogeneous(self.Q)):
            raise DegreeError("P and Q must be homogeneous")
        if self.p < 1 or self.q < 1 or gcd(self.p, self.q) != 1:
            raise DegreeError(f"Exponents must be coprime positive integers, got p={self.p}, q={self.q}")
        m, n = self.m, self.n
        if m * self.q != n * self.p:
            raise DegreeError(f"Degrees violate m·q = n·p (m={m}, n={n}, p={self.p}, q={self.q})")
        if not m > n >= 2:
            raise DegreeError(f"Degrees must satisfy m > n ≥ 2, got m={m}, n={n}")

    # --- constructors ---
    @classmethod
    def from_affine(cls, P, Q, p, q, variables=HOMOGENEOUS_VARIABLES):
        """Homogenize affine P(x, y), Q(x, y) to their own degrees."""
        ring = polynomial_ring(variables)
        return cls(homogenize(P, total_degree(P), ring), homogenize(Q, total_degree(Q), ring), p, q)

    # --- degrees ---
    @property
    def m(self):
        return total_degree(self.P)

    @property
    def n(self):
        return total_degree(self.Q)

    @property
    def ring(self):
        return self.P.ring

    # --- affine view ---
    @property
    def affine_ring(self):
        return affine_ring()

    @property
    def P_affine(self):
        return dehomogenize(self.P, self.affine_ring)

    @property
    def Q_affine(self):
        return dehomogenize(self.Q, self.affine_ring)

    def as_function(self):
        """f as a rational 0-form on the affine chart, poles along Q."""
        return DifferentialForm.function(self.P_affine ** self.q, self.Q_affine, self.p)

    def differential(self):
        """df on the affine chart."""
        return self.as_function().d()

    def describe(self):
        return {
            'P': format_poly(self.P),
            'Q': format_poly(self.Q),
            'p': self.p,
            'q': self.q,
            'm': self.m,
            'n': self.n,
            'variables': list(variable_names(self.ring)),
        }


def alpha0(f):
    """α₀ = qQ dP − pP dQ in homogeneous coordinates, degree m + n − 1."""
    dP = gradient(f.P)
    dQ = gradient(f.Q)
    coeffs = [f.Q * a * f.q - f.P * b * f.p for a, b in zip(dP, dQ)]
    return DifferentialForm(f.ring, 1, coeffs)


def alpha0_affine(f):
    P, Q = f.P_affine, f.Q_affine
    coeffs = [Q * P.diff(x) * f.q - P * Q.diff(x) * f.p for x in P.ring.gens]
    return DifferentialForm(P.ring, 1, coeffs)


def omega0(f):
    """ω₀ = df/f = q dP/P − p dQ/Q, stored as α₀ / (PQ)."""
    form = alpha0(f)
    return DifferentialForm(f.ring, 1, form.coeffs, f.P * f.Q, 1)


def omega0_affine(f):
    form = alpha0_affine(f)
    return DifferentialForm(form.ring, 1, form.coeffs, f.P_affine * f.Q_affine, 1)


def correction_form(P, Q, P1, Q1, p, q):
    """
    qQ dP₁ − pP₁ dQ − qQ₁ dP + pP dQ₁.

    For any polynomials P₁, Q₁ this equals PQ·(dg + Tω₀) with
    g = (pPQ₁ + qQP₁)/(PQ) and T = −(PQ₁ − QP₁)/(PQ), so divided by PQ it
    is relatively exact.
    """
    ring = P.ring
    P1, Q1 = change_ring(P1, ring), change_ring(Q1, ring)
    dP, dQ, dP1, dQ1 = gradient(P), gradient(Q), gradient(P1), gradient(Q1)
    coeffs = [Q * a1 * q - P1 * b * p - Q1 * a * q + P * b1 * p
              for a, b, a1, b1 in zip(dP, dQ, dP1, dQ1)]
    return DifferentialForm(ring, 1, coeffs)


# ------------------------------------------------------------
# Milnor and degree bookkeeping
# ------------------------------------------------------------
def _check_degrees(m, n, s=None):
    if not m > n >= 2:
        raise DegreeError(f"Degrees must satisfy m > n ≥ 2, got m={m}, n={n}")
    if s is not None and s < 2:
        raise DegreeError(f"Morphism degree must be at least 2, got s={s}")


def milnor_f(m, n):
    """μ_f = (m + n − 1)² − mn."""
    _check_degrees(m, n)
    return (m + n - 1) ** 2 - m * n


def milnor_pullback(m, n, s):
    """μ = (s(m + n) − 1)² − s²mn."""
    _check_degrees(m, n, s)
    return (s * (m + n) - 1) ** 2 - s * s * m * n


def critical_point_count(m, n):
    """
    Number of affine critical points of a generic f, with multiplicity.

    The affine components of α₀ meet in m + n − 2 points at infinity, so
    this is milnor_f(m, n) − (m + n − 2): the dimension of M(*D).
    """
    return milnor_f(m, n) - (m + n - 2)


@dataclass(frozen=True)
class DegreeLedger:
    m: int
    n: int
    a: int
    s: int
    d: int

    def __post_init__(self):
        if self.a != self.m + self.n - 2:
            raise DegreeError(f"a must equal m + n − 2 = {self.m + self.n - 2}")
        if self.d != self.s * (self.a + 2) - 2:
            raise DegreeError(f"d must equal s(a + 2) − 2 = {self.s * (self.a + 2) - 2}")


def degree_ledger(f, s):
    _check_degrees(f.m, f.n, s)
    a = f.m + f.n - 2
    return DegreeLedger(f.m, f.n, a, s, s * (a + 2) - 2)


def euler_check(form):
    """
    True iff X·A + Y·B + Z·C ≡ 0 for α = A dX + B dY + C dZ.

    Raises:
        DegreeError: not a 1-form, or coefficients not homogeneous of one degree.
    """
    if form.degree != 1:
        raise DegreeError("Euler condition applies to 1-forms")
    degrees = {total_degree(c) for c in form.coeffs if c}
    if len(degrees) > 1 or not all(is_homogeneous(c) for c in form.coeffs):
        raise DegreeError("Euler check needs homogeneous coefficients of a single degree")
    return not form.contract_euler()


# ------------------------------------------------------------
# Genericity
# ------------------------------------------------------------
@dataclass
class GenericityReport:
    smooth_P: bool
    smooth_Q: bool
    transversal_PQ: bool
    transversal_infinity: bool
    critical_points_affine: bool
    critical_values_distinct: bool
    witnesses: dict = field(default_factory=dict)
    non_composite: str = 'assumed'

    FLAGS = ('smooth_P', 'smooth_Q', 'transversal_PQ', 'transversal_infinity',
             'critical_points_affine', 'critical_values_distinct')

    @property
    def generic(self):
        return all(getattr(self, name) for name in self.FLAGS)

    def failed(self):
        return [name for name in self.FLAGS if not getattr(self, name)]

    def to_dict(self):
        result = {name: getattr(self, name) for name in self.FLAGS}
        result['non_composite'] = self.non_composite
        result['witnesses'] = dict(self.witnesses)
        return result


def _minors(u, v):
    return [u[0] * v[1] - u[1] * v[0], u[0] * v[2] - u[2] * v[0], u[1] * v[2] - u[2] * v[1]]


def _empty(generators, ring, label, witnesses):
    verdict, basis = projectively_empty(generators, variable_names(ring))
    leads = ', '.join(format_poly(g.ring.one.mul_monom(g.LM)) for g in basis.elements)
    state = 'empty' if verdict else 'non-empty'
    witnesses[label] = f"{state}; Gröbner leading terms [{leads}]"
    return verdict


def check_conditions(f, tolerances=None):
    """
    Decide every genericity condition for f.

    Each algebraic flag is backed by a Gröbner computation of a homogeneous
    ideal (the projective zero set is empty iff the quotient is finite);
    distinctness of critical values is numeric.

    Args:
        f (RationalFirstIntegral): the datum.
        tolerances (Tolerances):   numeric thresholds for the critical values.

    Returns:
        GenericityReport: never raises on degenerate input; failures are flags.
    """
    ring = f.ring
    X, Y, Z = ring.gens
    P, Q = f.P, f.Q
    gP, gQ = gradient(P), gradient(Q)
    witnesses = {}

    # --- Step 1: smoothness of V(P), V(Q) ---
    smooth_P = _empty([P, *gP], ring, 'smooth_P', witnesses)
    smooth_Q = _empty([Q, *gQ], ring, 'smooth_Q', witnesses)

    # --- Step 2: transversality of V(P) and V(Q) ---
    transversal_PQ = _empty([P, Q, *_minors(gP, gQ)], ring, 'transversal_PQ', witnesses)

    # --- Step 3: both curves cut the line at infinity transversally ---
    at_infinity_P = _empty([P, Z, gP[0], gP[1]], ring, 'transversal_infinity_P', witnesses)
    at_infinity_Q = _empty([Q, Z, gQ[0], gQ[1]], ring, 'transversal_infinity_Q', witnesses)
    transversal_infinity = at_infinity_P and at_infinity_Q

    # --- Step 4: no singularity of α₀ on the line at infinity ---
    critical_points_affine = _empty([*alpha0(f).coeffs, Z], ring, 'critical_points_affine',
                                    witnesses)

    # --- Step 5: distinct critical values (numeric) ---
    critical_values_distinct = False
    if smooth_P and smooth_Q and transversal_PQ and critical_points_affine:
        from foliation_kit.periods import critical_values
        try:
            data = critical_values(f, tolerances)
            critical_values_distinct = all(mu == 1 for mu in data.multiplicities)
            witnesses['critical_values_distinct'] = (
                f"{len(data.values)} values, multiplicities {list(data.multiplicities)}")
        except FoliationKitError as exc:
            witnesses['critical_values_distinct'] = f"failed: {exc.message}"
    else:
        witnesses['critical_values_distinct'] = 'skipped: algebraic conditions failed'

    report = GenericityReport(smooth_P, smooth_Q, transversal_PQ, transversal_infinity,
                              critical_points_affine, critical_values_distinct, witnesses)
    if report.generic:
        logger.info("✅ Genericity verified for m=%d, n=%d", f.m, f.n)
    else:
        logger.warning("⚠️  Genericity failed: %s", ', '.join(report.failed()))
    return report


def random_first_integral(m, n, p, q, rng, bound=5, variables=HOMOGENEOUS_VARIABLES):
    """
    Seeded random datum with integer coefficients in [−bound, bound].

    Args:
        rng (numpy.random.Generator): the source of randomness.
    """
    ring = polynomial_ring(variables)

    def random_form(degree):
        terms = {}
        for i in range(degree + 1):
            for j in range(degree + 1 - i):
                value = int(rng.integers(-bound, bound + 1))
                if value:
                    terms[(i, j, degree - i - j)] = ring.domain(value)
        # pure powers keep the curve away from coordinate vertices
        for k in range(3):
            monom = tuple(degree if t == k else 0 for t in range(3))
            if monom not in terms:
                terms[monom] = ring.domain(int(rng.integers(1, bound + 1)))
        return ring.from_dict(terms)

    return RationalFirstIntegral(random_form(m), random_form(n), p, q)


def first_integral_from_text(P_text, Q_text, p, q, variables):
    """
    Build f from problem-file text.

    Three variable names mean homogeneous input; two mean affine input,
    homogenized with a fresh last variable.
    """
    from foliation_kit.algebra.parser import parse_poly

    variables = tuple(variables)
    P = parse_poly(P_text, variables)
    Q = parse_poly(Q_text, variables)
    if len(variables) == 3:
        ring = polynomial_ring(HOMOGENEOUS_VARIABLES)
        return RationalFirstIntegral(positional(P, ring), positional(Q, ring), p, q)
    if len(variables) == 2:
        affine = affine_ring()
        return RationalFirstIntegral.from_affine(positional(P, affine), positional(Q, affine), p, q)
    raise DegreeError(f"Expected 2 or 3 variables, got {len(variables)}")
