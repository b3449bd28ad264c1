"""Closed-form coordinate realizations of left-invariant coframes.

Each chart returns the matrix ``E[i, mu]`` with ``e^i = E[i, mu] dv^mu``.
Evaluators are vectorized: a point array of shape ``(..., n)`` gives a
coframe array of shape ``(..., n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .lie import LieFrame, get_algebra

__all__ = [
    "CoordChart",
    "ChartReport",
    "chart_consistency",
    "CHARTS",
    "get_chart",
    "chart_for",
    "random_chart_point",
    "registry_pairs",
    "coframe_jacobian",
]


@dataclass(frozen=True)
class CoordChart:
    name: str
    algebra: str
    coords: Tuple[str, ...]
    coframe: Callable[[np.ndarray], np.ndarray]
    anchor: str = ""
    # sampling box for random nonsingular points
    box: Tuple[Tuple[float, float], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v)
        if not np.iscomplexobj(v):
            v = v.astype(float)
        if v.shape[-1] != self.dim:
            raise ValueError(f"chart {self.name} expects {self.dim} coordinates")
        return self.coframe(v)


def _stack(rows: List[List]) -> np.ndarray:
    """Build a coframe array from rows of per-coordinate components."""
    shape = None
    for row in rows:
        for x in row:
            if np.ndim(x):
                shape = np.shape(x)
                break
        if shape:
            break
    shape = shape or ()
    # complex entries survive so coframes can be differentiated by complex step
    dtype = np.result_type(float, *[np.asarray(x).dtype for row in rows for x in row])
    out = np.zeros(shape + (len(rows), len(rows[0])), dtype=dtype)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            out[..., i, j] = x
    return out


def _loccoord(v):
    t, x, y, z, x5, x6, x7 = np.moveaxis(v, -1, 0)
    cx, sx, cy, sy = np.cos(x), np.sin(x), np.cos(y), np.sin(y)
    z0 = np.zeros_like(t)
    one = np.ones_like(t)
    return _stack([
        [-one, z0, z0, z0, z0, z0, z0],
        [-x7 / 2, x6 / 2, x5 * cx / 2, x6 * cy / 2 + x5 * sy * sx / 2, z0, z0, one / 2],
        [-x6 / 2, -x7 / 2, x5 * sx / 2, -x7 * cy / 2 - x5 * sy * cx / 2, z0, one / 2, z0],
        [-x5 / 2, z0, -x7 * cx / 2 - x6 * sx / 2, -sy * (-x6 * cx + x7 * sx) / 2, one / 2, z0, z0],
        [x7, -x6, -x5 * cx - 2 * sx, -x6 * cy - sy * sx * x5 + 2 * sy * cx, z0, z0, -one],
        [x6, x7, 2 * cx - x5 * sx, x7 * cy + 2 * sy * sx + x5 * sy * cx, z0, -one, z0],
        [x5, -2 * one, cx * x7 + x6 * sx, -2 * cy + x7 * sy * sx - x6 * sy * cx, -one, z0, z0],
    ])


def _heis7(v):
    x1, x2, x3, x4, x5, x6, x7 = np.moveaxis(v, -1, 0)
    z0, one = np.zeros_like(x1), np.ones_like(x1)
    return _stack([
        [one, z0, z0, z0, z0, z0, z0],
        [z0, one, z0, z0, z0, z0, z0],
        [z0, z0, one, z0, z0, z0, z0],
        [z0, z0, z0, one, z0, z0, z0],
        [z0, 2 * x1, z0, 2 * x3, one, z0, z0],
        [z0, 2 * x4, 2 * x1, z0, z0, one, z0],
        [z0, z0, 2 * x2, 2 * x1, z0, z0, one],
    ])


def _heis_general(n: int):
    """Coordinates on the (4n+3)-dimensional quaternionic Heisenberg group."""

    def coframe(v):
        x = np.moveaxis(v, -1, 0)
        dim = 4 * n + 3
        z0, one = np.zeros_like(x[0]), np.ones_like(x[0])
        rows = [[one if j == i else z0 for j in range(dim)] for i in range(4 * n)]
        eta = [[one if j == 4 * n + s else z0 for j in range(dim)] for s in range(3)]
        for p in range(n):
            a, b, c, d = 4 * p, 4 * p + 1, 4 * p + 2, 4 * p + 3
            for s, terms in enumerate(((a, b, c, d), (d, b, a, c), (b, c, a, d))):
                i, j, k, l = terms
                eta[s][j] = eta[s][j] + 2 * x[i]
                eta[s][l] = eta[s][l] + 2 * x[k]
        return _stack(rows + eta)

    return coframe


def _euler_su2(v):
    th, ph, ps = np.moveaxis(v, -1, 0)
    z0, one = np.zeros_like(th), np.ones_like(th)
    return _stack([
        [np.sin(ps), -np.cos(ps) * np.sin(th), z0],
        [np.cos(ps), np.sin(ps) * np.sin(th), z0],
        [z0, np.cos(th), one],
    ])


def _su11(v):
    th, ph, ps = np.moveaxis(v, -1, 0)
    z0, one = np.zeros_like(th), np.ones_like(th)
    return _stack([
        [np.sinh(ps), np.cosh(ps) * np.sin(th), z0],
        [np.cosh(ps), np.sinh(ps) * np.sin(th), z0],
        [z0, -np.cos(th), one],
    ])


def _psu11(v):
    th, ph, ps = np.moveaxis(v, -1, 0)
    z0, one = np.zeros_like(th), np.ones_like(th)
    return _stack([
        [z0, -np.cos(th), one],
        [np.sinh(ps), np.cosh(ps) * np.sin(th), z0],
        [np.cosh(ps), np.sinh(ps) * np.sin(th), z0],
    ])


def _heis3(v):
    x, y, z = np.moveaxis(v, -1, 0)
    z0, one = np.zeros_like(x), np.ones_like(x)
    return _stack([
        [one, z0, z0],
        [z0, one, z0],
        [y / 2, -x / 2, one],
    ])


def _euc(v):
    ph, x, y = np.moveaxis(v, -1, 0)
    z0, one = np.zeros_like(ph), np.ones_like(ph)
    return _stack([
        [one, z0, z0],
        [z0, np.sin(ph), -np.cos(ph)],
        [z0, np.cos(ph), np.sin(ph)],
    ])


def _lor(v):
    ph, x, y = np.moveaxis(v, -1, 0)
    z0, one = np.zeros_like(ph), np.ones_like(ph)
    return _stack([
        [one, z0, z0],
        [z0, np.sinh(ph), np.cosh(ph)],
        [z0, np.cosh(ph), np.sinh(ph)],
    ])


def _invf(v):
    x1 = v[..., 0]
    c, s = np.cos(x1), np.sin(x1)
    z0, one = np.zeros_like(x1), np.ones_like(x1)
    # columns dx1..dx7
    return _stack([
        [one, z0, z0, z0, z0, z0, z0],
        [z0, c, z0, z0, z0, z0, -s],
        [z0, z0, -c, z0, -s, z0, z0],
        [z0, z0, z0, c, z0, s, z0],
        [z0, z0, -s, z0, c, z0, z0],
        [z0, z0, z0, -s, z0, c, z0],
        [z0, s, z0, z0, z0, z0, c],
    ])


SQ2 = np.sqrt(2.0)
# e = EPS_TO_E @ epsilon, inverting the basis change epsilon^1 = sqrt2 (e^1+e^2), ...
EPS_TO_E = np.array([
    [1 / SQ2, -1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0.5, 0.5, 0, 0, 0],
    [0, 0, 0.5, -0.5, 0, 0, 0],
    [0, 0, 0, 0, 1 / SQ2, 0, 0],
    [0, 0, 0, 0, 0, 1 / SQ2, 0],
    [0, 0, 0, 0, 0, 0, SQ2],
])


def _g7(v):
    return np.einsum("ij,...jm->...im", EPS_TO_E, _invf(v))


_PI = np.pi
CHARTS: Dict[str, CoordChart] = {
    "loccoord": CoordChart("loccoord", "L1", ("t", "x", "y", "z", "x5", "x6", "x7"), _loccoord,
                           "local coordinates on G1",
                           ((-1, 1), (-3, 3), (0.2, 2.9), (-3, 3), (-1, 1), (-1, 1), (-1, 1))),
    "heisenberg7": CoordChart("heisenberg7", "heisenberg7", tuple(f"x{i}" for i in range(1, 8)), _heis7,
                              "global coordinates on the quaternionic Heisenberg group",
                              ((-1, 1),) * 7),
    "heisenberg11": CoordChart("heisenberg11", "heisenberg11", tuple(f"x{i}" for i in range(1, 12)),
                               _heis_general(2), "global coordinates on the 11-dimensional quaternionic Heisenberg group",
                               ((-1, 1),) * 11),
    "euler_su2": CoordChart("euler_su2", "su2", ("theta", "phi", "psi"), _euler_su2, "Euler angles",
                            ((0.2, _PI - 0.2), (-3, 3), (-3, 3))),
    "su11": CoordChart("su11", "su11", ("theta", "phi", "psi"), _su11, "SU(1,1) coordinates",
                       ((0.2, _PI - 0.2), (-3, 3), (-1.5, 1.5))),
    "psu11": CoordChart("psu11", "psu11", ("theta", "phi", "psi"), _psu11, "SU(1,1) coordinates (para case)",
                        ((0.2, _PI - 0.2), (-3, 3), (-1.5, 1.5))),
    "heis3": CoordChart("heis3", "heis3", ("x", "y", "z"), _heis3, "Heisenberg coordinates",
                        ((-2, 2),) * 3),
    "e2": CoordChart("e2", "e2", ("phi", "x", "y"), _euc, "E(2) coordinates", ((-3, 3), (-2, 2), (-2, 2))),
    "e11": CoordChart("e11", "e11", ("phi", "x", "y"), _lor, "E(1,1) coordinates", ((-1.5, 1.5), (-2, 2), (-2, 2))),
    "invf": CoordChart("invf", "G7_eps", tuple(f"x{i}" for i in range(1, 8)), _invf, "epsilon-basis coordinates",
                       ((-3, 3),) * 7),
    "g7": CoordChart("g7", "G7", tuple(f"x{i}" for i in range(1, 8)), _g7,
                     "coordinates on G7 through the epsilon basis", ((-3, 3),) * 7),
}

_DEFAULT_CHART = {c.algebra: c.name for c in CHARTS.values()}


def get_chart(name: str) -> CoordChart:
    if name not in CHARTS:
        raise KeyError(f"unknown chart {name!r}; known: {sorted(CHARTS)}")
    return CHARTS[name]


def chart_for(algebra: str) -> CoordChart:
    return CHARTS[_DEFAULT_CHART[algebra]]


def random_chart_point(chart: CoordChart, rng: np.random.Generator) -> np.ndarray:
    lo = np.array([b[0] for b in chart.box])
    hi = np.array([b[1] for b in chart.box])
    return lo + (hi - lo) * rng.random(chart.dim)


@dataclass
class ChartReport:
    algebra: str
    chart: str
    point: List[float]
    max_residual: float
    passed: bool
    singular: bool
    tol: float = 1e-8
    detail: Dict[str, float] = field(default_factory=dict)

    def as_dict(self):
        return {
            "algebra": self.algebra,
            "chart": self.chart,
            "point": self.point,
            "max_residual": self.max_residual,
            "passed": self.passed,
            "singular": self.singular,
        }


def coframe_jacobian(chart: CoordChart, v: np.ndarray, rel_step: float = 1e-5) -> np.ndarray:
    """``J[i, mu, nu] = d E[i, nu] / d v^mu`` by central differences with one Richardson level."""
    v = np.asarray(v, dtype=float)
    n = chart.dim
    J = np.zeros((n, n, n))
    for mu in range(n):
        h = rel_step * max(1.0, abs(v[mu]))
        step = np.zeros(n)
        step[mu] = 1.0

        def central(hh):
            return (chart(v + hh * step) - chart(v - hh * step)) / (2 * hh)

        J[:, mu, :] = (4 * central(h / 2) - central(h)) / 3
    return J


def chart_consistency(L: LieFrame, C: CoordChart, v, tol: float = 1e-8, det_tol: float = 1e-8) -> ChartReport:
    """Compare the FD exterior derivative of the chart coframe with the structure equations."""
    v = np.asarray(v, dtype=float)
    if C.dim != L.dim:
        raise ValueError("chart and algebra dimensions differ")
    E = C(v)
    det = abs(np.linalg.det(E))
    scale = max(1.0, float(np.max(np.abs(E))) ** L.dim)
    singular = det <= det_tol * scale
    J = coframe_jacobian(C, v)
    # (de^i)_{mu nu} = d_mu E^i_nu - d_nu E^i_mu
    d_fd = J - np.transpose(J, (0, 2, 1))
    d_st = np.zeros_like(d_fd)
    for i in range(L.dim):
        for (j, k), c in L.de[i].items():
            c = float(c)
            d_st[i] += c * (np.outer(E[j], E[k]) - np.outer(E[k], E[j]))
    res = float(np.max(np.abs(d_fd - d_st)))
    return ChartReport(L.name, C.name, [float(x) for x in v], res, (res <= tol) and not singular, bool(singular), tol)


def registry_pairs() -> List[Tuple[LieFrame, CoordChart]]:
    return [(get_algebra(c.algebra), c) for c in CHARTS.values()]
