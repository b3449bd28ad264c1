"""Gaussian elimination over the rationals.

Small dense systems only (a few hundred unknowns at most); rows are lists of
``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

__all__ = ["rref", "rank", "nullspace", "solve", "LinearSolution", "RankDeficientError"]


class RankDeficientError(ValueError):
    """Raised when a system expected to have a unique solution does not."""


def _frac_matrix(a: Sequence[Sequence]) -> List[List[Fraction]]:
    return [[Fraction(x) for x in row] for row in a]


def rref(a: Sequence[Sequence]) -> tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form and pivot columns."""
    m = _frac_matrix(a)
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        if p != 1:
            m[r] = [x / p for x in m[r]]
        row_r = m[r]
        nz = [j for j in range(c, ncols) if row_r[j] != 0]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f != 0:
                    row_i = m[i]
                    for j in nz:
                        row_i[j] -= f * row_r[j]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(a: Sequence[Sequence]) -> int:
    return len(rref(a)[1])


def nullspace(a: Sequence[Sequence], ncols: Optional[int] = None) -> List[List[Fraction]]:
    """Basis of ``{x : a x = 0}``."""
    if not a:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    m, piv = rref(a)
    n = len(m[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, pc in enumerate(piv):
            v[pc] = -m[r][f]
        basis.append(v)
    return basis


@dataclass(frozen=True)
class LinearSolution:
    x: Optional[List[Fraction]]
    rank: int
    n_unknowns: int
    consistent: bool

    @property
    def unique(self) -> bool:
        return self.consistent and self.rank == self.n_unknowns


def solve(a: Sequence[Sequence], b: Sequence, require_unique: bool = False) -> LinearSolution:
    """Solve ``a x = b`` exactly.  Free variables are set to zero."""
    if not a:
        raise ValueError("empty system")
    n = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    m, piv = rref(aug)
    consistent = n not in piv
    rk = len([p for p in piv if p < n])
    x = None
    if consistent:
        x = [Fraction(0)] * n
        for r, pc in enumerate(piv):
            x[pc] = m[r][n]
    sol = LinearSolution(x, rk, n, consistent)
    if require_unique and not sol.unique:
        raise RankDeficientError(
            f"system not uniquely solvable: rank {rk} of {n} unknowns, consistent={consistent}"
        )
    return sol
