"""Exact Gaussian elimination over the coefficient rings.

Pivots must be units of the ring; over QQ that is any nonzero entry, over
Z/mZ an entry coprime to m.
"""
from __future__ import annotations


class SingularSystemError(ArithmeticError):
    pass


class InconsistentSystemError(ArithmeticError):
    pass


def _is_unit(ring, x) -> bool:
    try:
        ring.inv(x)
    except ArithmeticError:
        return False
    return True


def row_reduce(rows: list[list], ring, ncols: int):
    """Reduced row echelon form in place; returns the list of pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if not ring.is_zero(rows[i][c]) and _is_unit(ring, rows[i][c]):
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = ring.inv(rows[r][c])
        rows[r] = [ring.normalize(x * inv) for x in rows[r]]
        for i in range(nrows):
            if i != r and not ring.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [ring.normalize(a - f * b) for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def solve(matrix: list[list], rhs: list, ring) -> list:
    """Unique solution of ``matrix @ x = rhs``; rows may outnumber columns."""
    ncols = len(matrix[0]) if matrix else 0
    rows = [[ring.coerce(a) for a in row] + [ring.coerce(b)] for row, b in zip(matrix, rhs)]
    pivots = row_reduce(rows, ring, ncols)
    if len(pivots) < ncols:
        raise SingularSystemError(f"rank {len(pivots)} < {ncols} unknowns")
    for row in rows[ncols:]:
        if not ring.is_zero(row[-1]):
            raise InconsistentSystemError("no solution")
    return [rows[i][-1] for i in range(ncols)]
