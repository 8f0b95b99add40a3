"""Sparse exact Gaussian elimination over the rationals.

Rows are dicts ``{column: coefficient}``.  The echelon form keeps every pivot
row normalized (pivot coefficient 1) with the pivot as its smallest column,
which is all that rank, nullity and back substitution need.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

Row = Dict[int, Fraction]


class InconsistentSystem(ValueError):
    def __init__(self, row_label=None):
        super().__init__(f"linear system is inconsistent (row {row_label!r})")
        self.row_label = row_label


class Echelon:
    """Incrementally built row-echelon form."""

    def __init__(self):
        self.pivots: Dict[int, Row] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping[int, object]) -> Row:
        row = {c: Fraction(v) for c, v in row.items() if v}
        while row:
            c = min(row)
            piv = self.pivots.get(c)
            if piv is None:
                return row
            f = row[c]
            for k, v in piv.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def add(self, row: Mapping[int, object]) -> Optional[int]:
        """Insert a row; returns the new pivot column or None if dependent."""
        row = self.reduce(row)
        if not row:
            return None
        c = min(row)
        inv = 1 / row[c]
        self.pivots[c] = {k: v * inv for k, v in row.items()}
        return c

    def back_substitute(self, ncols: int) -> Dict[int, Fraction]:
        """Solution with free variables set to zero (rows carry the RHS at column ``ncols``)."""
        sol: Dict[int, Fraction] = {}
        for c in sorted(self.pivots, reverse=True):
            if c == ncols:
                raise InconsistentSystem()
            row = self.pivots[c]
            val = row.get(ncols, Fraction(0))
            for k, v in row.items():
                if k != c and k != ncols:
                    val -= v * sol.get(k, 0)
            if val:
                sol[c] = val
        return sol


def rank(rows: Iterable[Mapping[int, object]]) -> int:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def nullity(rows: Iterable[Mapping[int, object]], ncols: int) -> int:
    return ncols - rank(rows)


def solve(rows: Sequence[Mapping[int, object]], rhs: Sequence[object], ncols: int, labels: Sequence[Hashable] | None = None) -> Tuple[Dict[int, Fraction], int]:
    """Solve ``rows * x = rhs`` exactly.

    Returns ``(solution, kernel_dim)``; raises :class:`InconsistentSystem`
    carrying the label of the first row that reduces to ``0 = nonzero``.
    """
    ech = Echelon()
    for idx, (row, b) in enumerate(zip(rows, rhs)):
        aug = dict(row)
        if b:
            aug[ncols] = b
        reduced = ech.reduce(aug)
        if reduced and min(reduced) == ncols:
            raise InconsistentSystem(labels[idx] if labels is not None else idx)
        ech.add(reduced)
    # consistent, so every pivot is a genuine column
    return ech.back_substitute(ncols), ncols - ech.rank
