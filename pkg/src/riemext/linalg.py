"""Sparse Gauss-Jordan elimination over the field of rational functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .symexpr import RationalExpr, SymExprError

__all__ = ["LinearSolution", "InconsistentSystemError", "SingularMatrixError", "solve_linear", "inverse"]


class InconsistentSystemError(SymExprError):
    def __init__(self, equation: int, residual: RationalExpr):
        self.equation = equation
        self.residual = residual
        super().__init__(f"linear system inconsistent: equation {equation} reduces to 0 = {residual}")


class SingularMatrixError(SymExprError):
    pass


@dataclass
class LinearSolution:
    """General solution ``u = values + sum_f u_f * nullspace[.][f]``."""

    n_unknowns: int
    rank: int
    values: dict[int, RationalExpr]
    free: list[int]
    nullspace: dict[int, dict[int, RationalExpr]] = field(default_factory=dict)

    @property
    def unique(self) -> bool:
        return not self.free

    def vector(self, symbols: Sequence[str]) -> list[RationalExpr]:
        """Particular solution with every free unknown set to zero."""
        zero = RationalExpr.constant(0, symbols)
        return [self.values.get(i, zero) for i in range(self.n_unknowns)]


def solve_linear(rows: Sequence[Mapping[int, RationalExpr]], rhs: Sequence[RationalExpr],
                 n_unknowns: int, symbols: Sequence[str]) -> LinearSolution:
    """Solve ``sum_j rows[i][j] u_j = rhs[i]``.

    Rows are sparse dicts ``unknown -> coefficient``. Pivots are chosen to keep
    expression size small. Raises :class:`InconsistentSystemError` naming the
    original equation that reduced to ``0 = c`` with ``c != 0``.
    """
    zero = RationalExpr.constant(0, symbols)
    work = []
    for idx, (r, b) in enumerate(zip(rows, rhs)):
        row = {j: c for j, c in r.items() if not c.is_zero()}
        work.append([row, b, idx])
    if len(rows) != len(rhs):
        raise ValueError("rows and rhs differ in length")

    pivots: dict[int, int] = {}  # unknown -> position in `done`
    done: list[list] = []
    pending = work
    while pending:
        # pick the row and column with the cheapest pivot
        best = None
        for pos, (row, b, idx) in enumerate(pending):
            if not row:
                if not b.is_zero():
                    raise InconsistentSystemError(idx, b)
                continue
            for j, c in row.items():
                cost = (c.n_terms(), len(row))
                if best is None or cost < best[0]:
                    best = (cost, pos, j)
        if best is None:
            break
        _, pos, j = best
        row, b, idx = pending.pop(pos)
        piv = row[j]
        inv = piv.reciprocal()
        row = {k: (c * inv if k != j else RationalExpr.constant(1, symbols)) for k, c in row.items()}
        b = b * inv
        # eliminate j from the remaining and finished rows
        for other in pending + done:
            c = other[0].get(j)
            if c is None:
                continue
            orow = other[0]
            for k, v in row.items():
                if k == j:
                    continue
                nv = orow.get(k, zero) - c * v
                if nv.is_zero():
                    orow.pop(k, None)
                else:
                    orow[k] = nv
            del orow[j]
            other[1] = other[1] - c * b
        pivots[j] = len(done)
        done.append([row, b, idx])
        pending = [p for p in pending if p[0] or not _check_zero(p)]

    free = sorted(set(range(n_unknowns)) - set(pivots))
    values: dict[int, RationalExpr] = {}
    nullspace: dict[int, dict[int, RationalExpr]] = {}
    for j, pos in pivots.items():
        row, b, _ = done[pos]
        values[j] = b
        deps = {k: -c for k, c in row.items() if k != j}
        if deps:
            nullspace[j] = deps
    return LinearSolution(n_unknowns, len(pivots), values, free, nullspace)


def _check_zero(p) -> bool:
    row, b, idx = p
    if not b.is_zero():
        raise InconsistentSystemError(idx, b)
    return True


def inverse(m: Sequence[Sequence[RationalExpr]], symbols: Sequence[str]) -> list[list[RationalExpr]]:
    """Exact inverse of a square matrix of rational functions."""
    n = len(m)
    zero = RationalExpr.constant(0, symbols)
    one = RationalExpr.constant(1, symbols)
    cols = []
    for col in range(n):
        rows = [{j: m[i][j] for j in range(n)} for i in range(n)]
        rhs = [one if i == col else zero for i in range(n)]
        sol = solve_linear(rows, rhs, n, symbols)
        if sol.free:
            raise SingularMatrixError("matrix is singular")
        cols.append(sol.vector(symbols))
    return [[cols[j][i] for j in range(n)] for i in range(n)]
