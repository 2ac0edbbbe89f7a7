# ============================================================
# foliation_kit/algebra/linear.py — Exact Sparse Linear Solves
# ============================================================
# Every ansatz in the package (decompositions, exactness
# certificates) ends in a linear system over QQ whose columns
# are sparse: one column per unknown coefficient, one row per
# (form component, monomial) pair. sympy's DomainMatrix does
# the reduced row echelon form in exact arithmetic.
#
# Free variables are set to zero, so the particular solution
# prefers pivots in earlier columns. Callers order their
# unknowns accordingly to make the output deterministic.
# ============================================================

from dataclasses import dataclass

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


@dataclass(frozen=True)
class LinearSolution:
    """
    Attributes:
        consistent:  whether the system has a solution.
        values:      one value per column (free columns are zero); when the
                     system is inconsistent this is the solution of the
                     consistent rows, useful as a best partial answer.
        rank:        rank of the coefficient matrix.
    """

    consistent: bool
    values: tuple
    rank: int


def polynomial_rows(form_coeffs, tag=()):
    """Flatten polynomial components into a sparse {(tag, component, monomial): coeff} column."""
    column = {}
    for index, poly in enumerate(form_coeffs):
        for monom, coeff in poly.iterterms():
            column[tag + (index, monom)] = coeff
    return column


def solve_sparse(columns, rhs):
    """
    Solve Σ_j x_j · columns[j] = rhs exactly.

    Args:
        columns (list[dict]): sparse column vectors {row_key: QQ}.
        rhs (dict):           sparse right-hand side {row_key: QQ}.

    Returns:
        LinearSolution
    """
    keys = set(rhs)
    for column in columns:
        keys.update(column)
    row_of = {key: i for i, key in enumerate(sorted(keys, key=repr))}
    width = len(columns)

    rows = {}
    for j, column in enumerate(columns):
        for key, value in column.items():
            if value:
                rows.setdefault(row_of[key], {})[j] = QQ.convert(value)
    for key, value in rhs.items():
        if value:
            rows.setdefault(row_of[key], {})[width] = QQ.convert(value)

    if not row_of:
        return LinearSolution(True, tuple(QQ.zero for _ in range(width)), 0)

    matrix = DomainMatrix(rows, (len(row_of), width + 1), QQ)
    reduced, pivots = matrix.rref()
    entries = reduced.to_sparse().rep

    values = [QQ.zero] * width
    consistent = True
    rank = 0
    for r, pivot in enumerate(pivots):
        if pivot == width:
            consistent = False
            continue
        rank += 1
        values[pivot] = entries.get(r, {}).get(width, QQ.zero)
    return LinearSolution(consistent, tuple(values), rank)


def matrix_rank(rows):
    """Rank of a dense matrix given as nested lists of rationals."""
    if not rows or not rows[0]:
        return 0
    matrix = DomainMatrix([[QQ.convert(v) for v in row] for row in rows],
                          (len(rows), len(rows[0])), QQ)
    return matrix.rank()
