"""Lie algebras given by structure equations, and their exterior derivative.

A :class:`LieFrame` is determined by the exterior derivatives ``de^k`` of a
left-invariant coframe.  With ``[e_i, e_j] = c^k_ij e_k`` the convention is
``de^k = -1/2 c^k_ij e^i ∧ e^j``, equivalently ``de^k(e_i, e_j) = -e^k([e_i, e_j])``.
The derivative extends to every k-form by the Leibniz rule, so Jacobi is the
statement ``d∘d = 0``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

from .exactlinalg import rank
from .exterior import KForm, parse_form, wedge

__all__ = [
    "LieFrame",
    "JacobiReport",
    "d",
    "jacobi_check",
    "derived_series_dims",
    "heisenberg",
    "REGISTRY",
    "get_algebra",
    "list_algebras",
    "load_algebra_file",
    "parse_algebra_text",
]


class LieFrame:
    """Left-invariant coframe ``e^1..e^n`` with exact structure equations."""

    def __init__(self, name: str, de: Sequence[KForm], anchor: str = ""):
        de = tuple(de)
        n = len(de)
        for k, f in enumerate(de):
            if f.dim != n:
                raise ValueError(f"de^{k + 1} lives in dimension {f.dim}, expected {n}")
            if f.degree != 2 and not (f.degree == 0 and len(f) == 0):
                raise ValueError(f"de^{k + 1} must be a 2-form")
            if not f.exact:
                raise ValueError("structure equations must have exact coefficients")
        self.name = name
        self.anchor = anchor
        self.dim = n
        self.de: Tuple[KForm, ...] = tuple(f if f.degree == 2 else KForm(n, 2) for f in de)
        self._dcache: Dict[Tuple[int, ...], KForm] = {}

    def __repr__(self):
        return f"LieFrame({self.name!r}, dim={self.dim})"

    # -- structure constants ------------------------------------------------
    def c(self, k: int, i: int, j: int):
        """``c^k_ij = e^k([e_i, e_j])`` (zero-based)."""
        return -self.de[k][(i, j)]

    def bracket(self, i: int, j: int) -> List:
        """Components of ``[e_i, e_j]``."""
        return [self.c(k, i, j) for k in range(self.dim)]

    def bracket_vec(self, x: Sequence, y: Sequence) -> List:
        n = self.dim
        out = [Fraction(0)] * n
        for i in range(n):
            if x[i] == 0:
                continue
            for j in range(n):
                if y[j] == 0 or i == j:
                    continue
                for k in range(n):
                    ck = self.c(k, i, j)
                    if ck != 0:
                        out[k] += x[i] * y[j] * ck
        return out

    def structure_constants(self):
        """Nested list ``C[k][i][j] = c^k_ij``."""
        n = self.dim
        return [[[self.c(k, i, j) for j in range(n)] for i in range(n)] for k in range(n)]

    # -- exterior derivative -------------------------------------------------
    def e(self, i: int) -> KForm:
        return KForm.basis(self.dim, i)

    def d_basis(self, idx: Tuple[int, ...]) -> KForm:
        if idx in self._dcache:
            return self._dcache[idx]
        k = len(idx)
        out = KForm(self.dim, k + 1)
        for m, i in enumerate(idx):
            left = KForm.basis(self.dim, *idx[:m]) if m else KForm.scalar(self.dim)
            right = KForm.basis(self.dim, *idx[m + 1:]) if m < k - 1 else KForm.scalar(self.dim)
            term = wedge(wedge(left, self.de[i]), right)
            out = out + ((-1) ** m) * term
        self._dcache[idx] = out
        return out

    def d(self, a: KForm) -> KForm:
        if a.dim != self.dim:
            raise ValueError(f"form of dimension {a.dim} on a frame of dimension {self.dim}")
        out = KForm(self.dim, a.degree + 1)
        if a.degree == 0:
            return out
        for idx, v in a.items():
            out = out + v * self.d_basis(idx)
        return out


def d(a: KForm, L: LieFrame) -> KForm:
    """Exterior derivative of a left-invariant form on ``L``."""
    return L.d(a)


@dataclass
class JacobiReport:
    algebra: str
    passed: bool
    residuals: Dict[int, KForm] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "passed": self.passed,
            "residuals": {f"dde{k + 1}": r.pretty() for k, r in self.residuals.items()},
        }


def jacobi_check(L: LieFrame) -> JacobiReport:
    """Exact check of ``d(de^k) = 0`` for every basis 1-form."""
    res = {}
    for k in range(L.dim):
        r = L.d(L.de[k])
        if len(r):
            res[k] = r
    return JacobiReport(L.name, not res, res)


def _span_rank(vectors: List[List]) -> int:
    vecs = [v for v in vectors if any(x != 0 for x in v)]
    return rank(vecs) if vecs else 0


def _span_basis(vectors: List[List]) -> List[List]:
    from .exactlinalg import rref

    vecs = [v for v in vectors if any(x != 0 for x in v)]
    if not vecs:
        return []
    m, piv = rref(vecs)
    return [row for row in m[: len(piv)]]


def derived_series_dims(L: LieFrame, depth: int = 3) -> List[int]:
    """Dimensions of g, [g,g], [[g,g],[g,g]], ... computed exactly."""
    n = L.dim
    current = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    dims = [n]
    for _ in range(depth - 1):
        brs = []
        for a in range(len(current)):
            for b in range(a + 1, len(current)):
                brs.append(L.bracket_vec(current[a], current[b]))
        current = _span_basis(brs)
        dims.append(len(current))
        if not current:
            break
    return dims


def lower_central_dims(L: LieFrame, depth: int = 4) -> List[int]:
    n = L.dim
    full = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    current = full
    dims = [n]
    for _ in range(depth - 1):
        brs = [L.bracket_vec(x, y) for x in full for y in current]
        current = _span_basis(brs)
        dims.append(len(current))
        if not current:
            break
    return dims


# -- registry -----------------------------------------------------------------


def _frame(name: str, dim: int, eqs: Sequence[str], anchor: str) -> LieFrame:
    return LieFrame(name, [parse_form(dim, s) if s.strip() != "0" else KForm(dim, 2) for s in eqs], anchor)


def heisenberg(n: int = 1) -> LieFrame:
    """Quaternionic Heisenberg algebra of dimension 4n+3."""
    if n < 1:
        raise ValueError("n must be positive")
    dim = 4 * n + 3
    d1, d2, d3 = KForm(dim, 2), KForm(dim, 2), KForm(dim, 2)
    for p in range(n):
        a1, a2, a3, a4 = 4 * p, 4 * p + 1, 4 * p + 2, 4 * p + 3
        d1 = d1 + KForm(dim, 2, {(a1, a2): 2, (a3, a4): 2})
        d2 = d2 + KForm(dim, 2, {(a1, a3): 2, (a4, a2): 2})
        d3 = d3 + KForm(dim, 2, {(a1, a4): 2, (a2, a3): 2})
    de = [KForm(dim, 2)] * (4 * n) + [d1, d2, d3]
    return LieFrame(f"heisenberg{dim}", de, "quaternionic Heisenberg algebra")


_DEFS: Dict[str, Tuple[int, List[str], str]] = {
    "L1": (7, [
        "0",
        "-e12 - 2 e34 - 1/2 e37 + 1/2 e46",
        "-e13 + 2 e24 + 1/2 e27 - 1/2 e45",
        "-e14 - 2 e23 - 1/2 e26 + 1/2 e35",
        "2 e12 + 2 e34 - 1/2 e67",
        "2 e13 + 2 e42 + 1/2 e57",
        "2 e14 + 2 e23 - 1/2 e56",
    ], "zero-torsion qc-flat group G1 (example 1)"),
    "L1_tilde": (7, [
        "0",
        "e34",
        "-e24",
        "e23",
        "-2 e14 - 2 e23 + e15 + e26 - e37",
        "-2 e13 - 2 e42 + e16 - e25 + e47",
        "-2 e12 - 2 e34 + e17 + e35 - e46",
    ], "isomorphic presentation of L1"),
    "L2": (7, [
        "0",
        "-e12 + e34",
        "-1/2 e13",
        "-1/2 e14",
        "2 e12 + 2 e34 + e37 - e46 + 1/4 e67",
        "2 e13 - 2 e24 - 1/2 e27 + e45 - 1/4 e57",
        "2 e14 + 2 e23 + 1/2 e26 - e35 + 1/4 e56",
    ], "zero-torsion qc-non-flat group (example 2)"),
    "L3_tilde": (7, [
        "e13 - e24",
        "e14 + e23",
        "0",
        "0",
        "-2 e12 - 2 e34 - 1/2 e17 + 1/2 e26 - e35 - 1/8 e67",
        "-2 e13 + 2 e24 - 1/2 e36 + 1/2 e47",
        "-2 e14 - 2 e23 - 1/2 e37 - 1/2 e46",
    ], "isomorphic presentation of L3"),
    "L3": (7, [
        "-3/2 e13 + 3/2 e24 - 3/4 e25 + 1/4 e36 - 1/4 e47 + 1/8 e57",
        "-3/2 e14 - 3/2 e23 + 3/4 e15 + 1/4 e37 + 1/4 e46 - 1/8 e56",
        "0",
        "e12 + e34 + 1/2 e17 - 1/2 e26 + 1/4 e67",
        "2 e12 + 2 e34 + e17 - e26 + 1/2 e67",
        "2 e13 + 2 e42 + e25",
        "2 e14 + 2 e23 - e15",
    ], "non-zero torsion qc-non-flat group (example 3)"),
    "G7": (7, [
        "e17 + e27",
        "-e17 - e27",
        "-e15 + e16 - e25 + e26",
        "-e16 - e15 - e25 - e26",
        "e13 + e14 + e23 + e24",
        "-e13 + e14 - e23 + e24",
        "2 e12",
    ], "solvable non-nilpotent group carrying an Sp(2)-hypo structure"),
    "G7_eps": (7, [
        "0", "-e17", "-e15", "e16", "e13", "-e14", "e12",
    ], "G7 in the epsilon basis"),
    "su2": (3, ["-e23", "-e31", "-e12"], "SU(2), Bianchi IX"),
    "su11": (3, ["-e23", "e31", "-e12"], "SU(1,1), Bianchi VIII"),
    "heis3": (3, ["0", "0", "-e12"], "Heisenberg group H^3, Bianchi II"),
    "e2": (3, ["0", "e13", "-e12"], "rigid motions E(2), Bianchi VII_0"),
    "e11": (3, ["0", "e13", "e12"], "rigid motions E(1,1), Bianchi VI_0"),
    "psu11": (3, ["-e23", "-e31", "e12"], "SU(1,1) in the para-hyper-Kaehler presentation"),
}


def _make(name: str) -> Callable[[], LieFrame]:
    dim, eqs, anchor = _DEFS[name]
    return lambda: _frame(name, dim, eqs, anchor)


REGISTRY: Dict[str, Callable[[], LieFrame]] = {
    "heisenberg7": lambda: heisenberg(1),
    "heisenberg11": lambda: heisenberg(2),
}
REGISTRY.update({k: _make(k) for k in _DEFS})


@lru_cache(maxsize=None)
def get_algebra(name: str) -> LieFrame:
    if name not in REGISTRY:
        m = re.fullmatch(r"heisenberg(\d+)", name)
        if m and (int(m.group(1)) - 3) % 4 == 0 and int(m.group(1)) > 3:
            return heisenberg((int(m.group(1)) - 3) // 4)
        raise KeyError(f"unknown algebra {name!r}; known: {sorted(REGISTRY)}")
    return REGISTRY[name]()


def list_algebras() -> List[Tuple[str, int, str]]:
    out = []
    for k in REGISTRY:
        L = get_algebra(k)
        out.append((k, L.dim, L.anchor))
    return out


# -- algebra files ------------------------------------------------------------

_LINE = re.compile(r"^\s*d\s*e\s*\^?\s*\{?(\d+)\}?\s*=\s*(.*)$")


def parse_algebra_text(text: str, name: str = "user") -> LieFrame:
    """Parse lines ``d e^k = q e^i e^j + ...``; ``#`` starts a comment.

    An optional ``dim = n`` line fixes the dimension, otherwise the largest
    index that appears is used.  Missing ``de^k`` are zero.
    """
    eqs: Dict[int, str] = {}
    dim = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        md = re.fullmatch(r"dim\s*=\s*(\d+)", line)
        if md:
            dim = int(md.group(1))
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"cannot parse line: {raw!r}")
        k = int(m.group(1))
        if k in eqs:
            raise ValueError(f"duplicate equation for de^{k}")
        rhs = re.sub(r"e\s*\^\s*\{?(\d+)\}?", r"e^\1", m.group(2))
        eqs[k] = rhs
    if not eqs:
        raise ValueError("no structure equations found")
    if dim is None:
        idx = [int(x) for rhs in eqs.values() for x in re.findall(r"e\^(\d+)", rhs)]
        idx += list(eqs)
        dim = max(idx)
    de = []
    for k in range(1, dim + 1):
        rhs = eqs.get(k, "0").strip()
        if rhs == "0":
            de.append(KForm(dim, 2))
        else:
            de.append(parse_form(dim, _explicit(rhs)))
    return LieFrame(name, de, "user-supplied algebra")


def _explicit(rhs: str) -> str:
    # "e^1 e^2" -> "e^1 ∧ e^2" keeps the index boundaries unambiguous for the parser
    return re.sub(r"(e\^\d+)\s+(?=e\^)", r"\1∧", rhs)


def load_algebra_file(path: str | Path) -> LieFrame:
    p = Path(path)
    return parse_algebra_text(p.read_text(), name=p.stem)
