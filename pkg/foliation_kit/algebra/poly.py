# ============================================================
# foliation_kit/algebra/poly.py — Exact Polynomial Rings
# ============================================================
# Thin layer over sympy's sparse polynomial rings over QQ.
#
# Every polynomial in the package is a sympy PolyElement; this
# module adds what the rest of the code needs on top:
#   - MonomialOrder: graded-lex, graded-reverse-lex and block
#     elimination orders, each turned into a PolyRing
#   - degree helpers with a sentinel for the zero polynomial
#   - composition across rings (pull-backs), homogenize /
#     dehomogenize, gradients
# ============================================================

from dataclasses import dataclass
from functools import lru_cache

from sympy import QQ
from sympy.polys.orderings import MonomialOrder as _SympyOrder
from sympy.polys.orderings import grevlex, grlex
from sympy.polys.rings import PolyRing

from foliation_kit.errors import DegreeError

# Degree of the zero polynomial. Never used in arithmetic.
ZERO_DEGREE = -1

ORDER_KINDS = ('grlex', 'grevlex', 'block')


@dataclass(frozen=True)
class MonomialOrder:
    """
    A monomial order on a named variable list.

    Attributes:
        kind:       'grlex', 'grevlex' or 'block'.
        variables:  variable names in priority order (first is largest).
        eliminate:  for 'block' only, the names forming the greater block;
                    that block is compared by total degree and the rest by
                    graded reverse lex.
    """

    kind: str
    variables: tuple
    eliminate: tuple = ()

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise DegreeError(f"Unknown monomial order '{self.kind}'")
        object.__setattr__(self, 'variables', tuple(self.variables))
        object.__setattr__(self, 'eliminate', tuple(self.eliminate))
        if self.kind == 'block':
            unknown = set(self.eliminate) - set(self.variables)
            if not self.eliminate or unknown:
                raise DegreeError(f"Bad elimination block {self.eliminate!r}")

    @classmethod
    def block(cls, variables, eliminate):
        return cls('block', tuple(variables), tuple(eliminate))

    def ring(self):
        return _ring(self)


class BlockOrder(_SympyOrder):
    """
    Elimination order: the `head` positions compared by graded lex first,
    ties broken by graded reverse lex on the `tail` positions.

    PolyRing hashes its order, so equality and hash follow the two
    position tuples.
    """

    alias = 'block'
    is_global = True

    def __init__(self, head, tail):
        self.head = tuple(head)
        self.tail = tuple(tail)

    def __call__(self, monomial):
        return (grlex(tuple(monomial[i] for i in self.head)),
                grevlex(tuple(monomial[i] for i in self.tail)))

    def __repr__(self):
        return f"BlockOrder({self.head!r}, {self.tail!r})"

    def __eq__(self, other):
        return (isinstance(other, BlockOrder)
                and (self.head, self.tail) == (other.head, other.tail))

    def __hash__(self):
        return hash((BlockOrder, self.head, self.tail))


@lru_cache(maxsize=None)
def _ring(order):
    if order.kind == 'grlex':
        key = grlex
    elif order.kind == 'grevlex':
        key = grevlex
    else:
        head = [order.variables.index(v) for v in order.eliminate]
        tail = [i for i, v in enumerate(order.variables) if v not in order.eliminate]
        key = BlockOrder(head, tail)
    return PolyRing(order.variables, QQ, key)


def polynomial_ring(variables, kind='grevlex'):
    """Ring over QQ on `variables` with a graded order."""
    return MonomialOrder(kind, tuple(variables)).ring()


def variable_names(ring):
    return tuple(str(s) for s in ring.symbols)


def total_degree(p):
    """Total degree, ZERO_DEGREE for the zero polynomial."""
    return max((sum(m) for m in p.itermonoms()), default=ZERO_DEGREE)


def is_homogeneous(p):
    degrees = {sum(m) for m in p.itermonoms()}
    return len(degrees) <= 1


def gradient(p):
    return tuple(p.diff(x) for x in p.ring.gens)


def change_ring(p, ring):
    """Move p into `ring`, matching variables by name."""
    if p.ring == ring:
        return p
    return p.set_ring(ring)


def positional(p, ring):
    """Move p into `ring`, matching variables by position instead of name."""
    if p.ring == ring:
        return p
    if p.ring.ngens != ring.ngens:
        raise DegreeError(f"Cannot map {p.ring.ngens} variables onto {ring.ngens}")
    return ring.from_dict(dict(p.iterterms()))


def compose(p, images, target):
    """
    Substitute the i-th variable of p by images[i].

    Args:
        p:       polynomial over any ring with k variables.
        images:  k polynomials of `target`.
        target:  the ring of the result.

    Returns:
        PolyElement: p(images) in `target`.

    Powers of each image are cached, so every power is formed
    once per call regardless of how many monomials use it.
    """
    if len(images) != p.ring.ngens:
        raise DegreeError(
            f"Composition needs {p.ring.ngens} images, got {len(images)}")
    images = [change_ring(g, target) for g in images]
    powers = [[target.one] for _ in images]

    def power(i, e):
        cache = powers[i]
        while len(cache) <= e:
            cache.append(cache[-1] * images[i])
        return cache[e]

    result = target.zero
    for monom, coeff in p.iterterms():
        term = target.one
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        result += term.mul_ground(coeff)
    return result


def dehomogenize(p, target, index=-1):
    """Set the variable at `index` to 1; `target` lacks that variable."""
    index %= p.ring.ngens
    terms = {}
    for monom, coeff in p.iterterms():
        key = monom[:index] + monom[index + 1:]
        terms[key] = terms.get(key, QQ.zero) + coeff
    return target.from_dict({m: c for m, c in terms.items() if c})


def homogenize(p, degree, target):
    """
    Homogenize p to `degree` with the extra last variable of `target`.

    Raises:
        DegreeError: if p has a term of degree above `degree`.
    """
    if total_degree(p) > degree:
        raise DegreeError(
            f"Cannot homogenize a degree-{total_degree(p)} polynomial to degree {degree}")
    return target.from_dict({
        monom + (degree - sum(monom),): coeff for monom, coeff in p.iterterms()
    })


def monomial_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def monomials_up_to(nvars, degree):
    """All exponent tuples in nvars variables of total degree ≤ degree."""
    if degree < 0:
        return []
    result = []

    def walk(prefix, left, slots):
        if slots == 1:
            for e in range(left + 1):
                result.append(prefix + (e,))
            return
        for e in range(left + 1):
            walk(prefix + (e,), left - e, slots - 1)

    walk((), degree, nvars)
    result.sort(key=lambda m: (sum(m), m))
    return result
