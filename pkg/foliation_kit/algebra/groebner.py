# ============================================================
# foliation_kit/algebra/groebner.py — Buchberger Engine
# ============================================================
# Reduced Gröbner bases over QQ with
#   - the normal selection strategy (smallest lcm in the
#     active order first),
#   - Gebauer–Möller pair elimination (Buchberger's product
#     and chain criteria),
#   - content removal after every reduction so coefficients
#     stay primitive integers until the final monic pass.
#
# On top of the basis: normal forms, ideal membership, the
# staircase of standard monomials of a zero-dimensional
# quotient, and multiplication matrices on that staircase.
# ============================================================

from dataclasses import dataclass

from foliation_kit.algebra.poly import MonomialOrder, change_ring, monomial_divides
from foliation_kit.errors import DegreeError, GenericityError, InputError
from foliation_kit.extensions import logger


@dataclass(frozen=True)
class Ideal:
    """Generators plus the monomial order the basis will be computed in."""

    generators: tuple
    order: MonomialOrder

    def __post_init__(self):
        ring = self.order.ring()
        generators = tuple(change_ring(g, ring) for g in self.generators)
        if not generators or any(not g for g in generators):
            raise InputError("Ideal generators must be nonzero")
        object.__setattr__(self, 'generators', generators)

    @property
    def ring(self):
        return self.order.ring()


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced, monic Gröbner basis, sorted by increasing leading monomial."""

    elements: tuple
    order: MonomialOrder

    @property
    def ring(self):
        return self.order.ring()

    def leading_monomials(self):
        return [g.LM for g in self.elements]

    def normal_form(self, p):
        return normal_form(p, self)

    def contains(self, p):
        return not normal_form(p, self)

    def is_unit(self):
        return any(g.is_ground for g in self.elements)

    def is_zero_dimensional(self):
        """Every variable has a pure power among the leading monomials."""
        if self.is_unit():
            return True
        leads = self.leading_monomials()
        nvars = self.ring.ngens
        for i in range(nvars):
            if not any(m[i] > 0 and sum(m) == m[i] for m in leads):
                return False
        return True


@dataclass(frozen=True)
class StandardMonomialBasis:
    """Monomials outside the leading-term ideal, increasing in the basis order."""

    monomials: tuple
    order: MonomialOrder

    @property
    def count(self):
        return len(self.monomials)

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def index(self, monom):
        return self.monomials.index(monom)

    def polynomials(self):
        ring = self.order.ring()
        return [ring.one.mul_monom(m) for m in self.monomials]


# ------------------------------------------------------------
# Buchberger's algorithm
# ------------------------------------------------------------
def _primitive(p):
    """Drop the rational content so the coefficients are coprime integers."""
    return p.primitive()[1] if p else p


def _s_polynomial(f, g):
    ring = f.ring
    lcm = ring.monomial_lcm(f.LM, g.LM)
    left = f.mul_monom(ring.monomial_div(lcm, f.LM)).mul_ground(g.LC)
    right = g.mul_monom(ring.monomial_div(lcm, g.LM)).mul_ground(f.LC)
    return left - right


def _select(G, pairs):
    """Normal strategy: the pair whose lcm is smallest in the active order."""
    ring = G[0].ring

    def key(pair):
        i, j = pair
        return ring.order(ring.monomial_lcm(G[i].LM, G[j].LM)), pair

    return min(pairs, key=key)


def _update(G, pairs, f):
    """
    Add f to G and return the surviving pair set.

    Old pairs whose lcm is strictly divisible by LM(f) are dropped (chain
    criterion); new pairs keep one representative per minimal lcm and vanish
    entirely when any pair with that lcm has coprime leading monomials.
    """
    ring = f.ring
    lcm = ring.monomial_lcm
    mul = ring.monomial_mul
    lmf = f.LM
    leads = [g.LM for g in G]

    kept = set()
    for i, j in pairs:
        gamma = lcm(leads[i], leads[j])
        if (not monomial_divides(lmf, gamma)
                or gamma == lcm(leads[i], lmf) or gamma == lcm(leads[j], lmf)):
            kept.add((i, j))

    by_lcm = {}
    for i, m in enumerate(leads):
        by_lcm.setdefault(lcm(m, lmf), []).append(i)
    minimal = []
    for gamma in sorted(by_lcm, key=ring.order):
        if all(not monomial_divides(other, gamma) for other in minimal):
            minimal.append(gamma)

    new = len(G)
    for gamma in minimal:
        group = by_lcm[gamma]
        if not any(lcm(leads[i], lmf) == mul(leads[i], lmf) for i in group):
            kept.add((min(group), new))
    return G + [f], kept


def _minimalize(G):
    ring = G[0].ring
    result = []
    for g in sorted(G, key=lambda h: ring.order(h.LM)):
        if all(not monomial_divides(h.LM, g.LM) for h in result):
            result.append(g)
    return result


def _interreduce(G):
    reduced = []
    for i, g in enumerate(G):
        others = G[:i] + G[i + 1:]
        r = g.rem(others) if others else g
        reduced.append(r.monic())
    ring = G[0].ring
    return sorted(reduced, key=lambda h: ring.order(h.LM))


def buchberger(ideal):
    """
    Reduced Gröbner basis of an ideal.

    Args:
        ideal (Ideal): nonzero generators and the target order.

    Returns:
        GroebnerBasis: reduced, monic, sorted by increasing leading monomial.
    """
    G, pairs = [], set()
    for f in ideal.generators:
        r = _primitive(f.rem(G)) if G else _primitive(f)
        if r:
            G, pairs = _update(G, pairs, r)

    reductions = 0
    while pairs:
        pair = _select(G, pairs)
        pairs.discard(pair)
        remainder = _s_polynomial(G[pair[0]], G[pair[1]]).rem(G)
        reductions += 1
        if remainder:
            G, pairs = _update(G, pairs, _primitive(remainder))
            if G[-1].is_ground:
                logger.debug("Gröbner run reached the unit ideal after %d reductions", reductions)
                return GroebnerBasis((G[-1].ring.one,), ideal.order)

    logger.debug("Gröbner run: %d generators, %d reductions, %d elements before reduction",
                 len(ideal.generators), reductions, len(G))
    return GroebnerBasis(tuple(_interreduce(_minimalize(G))), ideal.order)


def groebner(generators, order):
    """Shorthand: buchberger(Ideal(generators, order))."""
    return buchberger(Ideal(tuple(generators), order))


def normal_form(p, G):
    """
    Fully reduced remainder of p modulo G.

    No term of the result is divisible by a leading monomial of G, and
    p minus the result lies in the ideal.
    """
    p = change_ring(p, G.ring)
    if not p:
        return p
    return p.rem(list(G.elements))


# ------------------------------------------------------------
# Quotient rings
# ------------------------------------------------------------
def standard_monomials(G):
    """
    Staircase of a zero-dimensional quotient.

    Returns:
        StandardMonomialBasis: monomials not divisible by any leading
        monomial of G, increasing in the order of G.

    Raises:
        GenericityError: the quotient is positive-dimensional.
    """
    if not G.is_zero_dimensional():
        raise GenericityError(
            "Quotient is positive-dimensional",
            {'leading_monomials': [list(m) for m in G.leading_monomials()]})
    if G.is_unit():
        return StandardMonomialBasis((), G.order)

    ring = G.ring
    leads = G.leading_monomials()
    start = (0,) * ring.ngens
    seen = {start}
    frontier = [start]
    found = []
    while frontier:
        monom = frontier.pop()
        if any(monomial_divides(lead, monom) for lead in leads):
            continue
        found.append(monom)
        for i in range(ring.ngens):
            step = monom[:i] + (monom[i] + 1,) + monom[i + 1:]
            if step not in seen:
                seen.add(step)
                frontier.append(step)
    found.sort(key=ring.order)
    return StandardMonomialBasis(tuple(found), G.order)


def coordinates(p, G, basis):
    """Coefficients of normal_form(p, G) on the standard monomials."""
    remainder = normal_form(p, G)
    position = {m: i for i, m in enumerate(basis.monomials)}
    vector = [G.ring.domain.zero] * len(position)
    for monom, coeff in remainder.iterterms():
        if monom not in position:
            raise DegreeError("Normal form left the standard-monomial span")
        vector[position[monom]] = coeff
    return vector


def multiplication_matrix(g, G, basis):
    """
    Matrix of multiplication by g on the quotient, as nested lists over QQ.

    Column j holds the coordinates of g·b_j, so evaluation vectors
    (b_1(z), …, b_k(z)) at a point z of the variety are left eigenvectors
    with eigenvalue g(z).
    """
    g = change_ring(g, G.ring)
    columns = [coordinates(g * b, G, basis) for b in basis.polynomials()]
    size = len(columns)
    return [[columns[j][i] for j in range(size)] for i in range(size)]


def projectively_empty(generators, variables):
    """
    Decide whether homogeneous polynomials have no common projective zero.

    That happens exactly when the affine quotient is finite-dimensional
    (the cone of zeros is the origin alone).

    Returns:
        (bool, GroebnerBasis): the verdict and its certificate.
    """
    order = MonomialOrder('grevlex', tuple(variables))
    basis = groebner([g for g in generators if g], order)
    return basis.is_zero_dimensional(), basis
