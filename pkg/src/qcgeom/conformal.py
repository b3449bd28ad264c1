"""Qc-conformal curvature: the tensors WR and W^qc on the horizontal space.

Both are evaluated exactly from the Biquard curvature and torsion.  A left-invariant
qc structure is locally qc-conformally flat iff ``W^qc = 0``, equivalently ``WR = 0``.
Tensors are ``(4n)^4`` object arrays indexed by horizontal frame indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .biquard import (
    QcStructure,
    TorsionDecomp,
    curvature,
    solve_biquard,
    standard_qc,
    torsion_decompose,
)
from .exterior import kn_product
from .lie import LieFrame

__all__ = [
    "wr_tensor",
    "wqc_tensor",
    "wr_torsion_free",
    "FlatnessVerdict",
    "flatness_verdict",
    "is_zero_tensor",
]


def _eye(h: int) -> np.ndarray:
    g = np.empty((h, h), dtype=object)
    g.fill(Fraction(0))
    for i in range(h):
        g[i, i] = Fraction(1)
    return g


def _omega(q: QcStructure):
    # omega_s(X, Y) = g(I_s X, Y)  ->  W_s[a, b] = I_s[b, a]
    return [Is.T.copy() for Is in q.I]


def _I_act(B: np.ndarray, Is: np.ndarray) -> np.ndarray:
    """``(I_s B)(X, Y) = -B(X, I_s Y)``."""
    return -B.dot(Is)


def _skew_defect(T0: np.ndarray, Is: np.ndarray) -> np.ndarray:
    """``T0(X, I_s Y) - T0(I_s X, Y)`` as a matrix."""
    return T0.dot(Is) - Is.T.dot(T0)


def _outer(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``A(X, Y) B(Z, V)``."""
    return np.multiply.outer(A, B)


def _horizontal(R: np.ndarray, h: int) -> np.ndarray:
    return R[:h, :h, :h, :h]


def _s_block(q: QcStructure, with_product: bool) -> np.ndarray:
    h = 4 * q.n
    g = _eye(h)
    out = kn_product(g, g)
    for W in _omega(q):
        out = out + kn_product(W, W)
        if with_product:
            out = out + 4 * _outer(W, W)
    return out


def wr_tensor(R: np.ndarray, td: TorsionDecomp, q: QcStructure) -> np.ndarray:
    """The tensor WR whose vanishing is equivalent to ``W^qc = 0``."""
    h = 4 * q.n
    g = _eye(h)
    L0 = td.L0
    out = _horizontal(R, h).copy()
    out = out + kn_product(g, L0, strict=False)
    for Is, W in zip(q.I, _omega(q)):
        out = out + kn_product(W, _I_act(L0, Is), strict=False)
        P = _skew_defect(td.T0, Is)
        out = out - Fraction(1, 2) * (_outer(W, P) + _outer(P - 4 * td.U.dot(Is), W))
    out = out + td.S / 4 * _s_block(q, with_product=True)
    return out


def wqc_tensor(R: np.ndarray, td: TorsionDecomp, q: QcStructure) -> np.ndarray:
    """The qc-conformal curvature ``W^qc``."""
    h = 4 * q.n
    g = _eye(h)
    Rh = _horizontal(R, h)
    acc = Rh.copy()
    for Is in q.I:
        # R(I_s X, I_s Y, Z, V)
        acc = acc + np.einsum("ca,db,cdzv->abzv", Is, Is, Rh)
    out = Fraction(1, 4) * acc
    out = out + kn_product(g, td.U, strict=False)
    for Is, W in zip(q.I, _omega(q)):
        out = out + kn_product(W, _I_act(td.U, Is), strict=False)
        out = out - Fraction(1, 2) * _outer(_skew_defect(td.T0, Is), W)
    out = out + td.S / 4 * _s_block(q, with_product=False)
    return out


def wr_torsion_free(R: np.ndarray, S, q: QcStructure) -> np.ndarray:
    """Reduced form of WR valid when ``T0 = U = 0``."""
    return _horizontal(R, 4 * q.n) + S / 4 * _s_block(q, with_product=True)


def is_zero_tensor(a: np.ndarray) -> bool:
    return all(x == 0 for x in a.flat)


def _witness(W: np.ndarray) -> Optional[Tuple[Tuple[int, int, int, int], Fraction]]:
    # the quadruple (e1, -I1e1, -I2e1, -I3e1) = (e1, e2, e3, e4) first
    if W[0, 1, 2, 3] != 0:
        return (1, 2, 3, 4), W[0, 1, 2, 3]
    h = W.shape[0]
    for a in range(h):
        for b in range(a + 1, h):
            for c in range(h):
                for d in range(c + 1, h):
                    if W[a, b, c, d] != 0:
                        return (a + 1, b + 1, c + 1, d + 1), W[a, b, c, d]
    return None


@dataclass
class FlatnessVerdict:
    algebra: str
    flat: bool
    witness: Optional[Tuple[int, int, int, int]]
    witness_value: Optional[Fraction]
    wr_zero: bool
    wqc_zero: bool

    @property
    def consistent(self) -> bool:
        return self.wr_zero == self.wqc_zero

    @property
    def verdict(self) -> str:
        return "flat" if self.flat else "non-flat"

    def as_dict(self):
        return {
            "algebra": self.algebra,
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness else None,
            "witness_value": None if self.witness_value is None else str(self.witness_value),
            "WR_zero": self.wr_zero,
            "Wqc_zero": self.wqc_zero,
            "consistent": self.consistent,
        }


def flatness_verdict(q: QcStructure | LieFrame | str) -> FlatnessVerdict:
    """Run the full pipeline and decide local qc-conformal flatness."""
    if not isinstance(q, QcStructure):
        q = standard_qc(q)
    conn = solve_biquard(q)
    R = curvature(conn)
    td = torsion_decompose(q, conn, R)
    WR = wr_tensor(R, td, q)
    Wqc = wqc_tensor(R, td, q)
    wr0, wq0 = is_zero_tensor(WR), is_zero_tensor(Wqc)
    wit = _witness(WR)
    return FlatnessVerdict(
        q.algebra.name,
        wr0,
        None if wit is None else wit[0],
        None if wit is None else wit[1],
        wr0,
        wq0,
    )
