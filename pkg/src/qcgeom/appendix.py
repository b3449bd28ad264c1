"""Transcribed coordinate tables of the G1 metrics and their cross-check.

Both tables use coordinates ``(t, x, y, z, x5, x6, x7, u)``, the local chart of
G1 followed by the transverse variable.  Entries are copied as printed, typos
included; the cross-check reports disagreements entry by entry against the
frame-assembled metric and the numerical curvature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .curvature import CoordMetric, riemann_ricci_fd
from .metrics import build

__all__ = [
    "TABLE1",
    "TABLE2",
    "CURVATURE_FORMS2",
    "EXCLUDED_FORMS2",
    "table_metric",
    "AppendixReport",
    "appendix_crosscheck",
    "gamma_metric",
    "TABLE1_CORRECTED",
]


def _unpack(v):
    t, x, y, z, x5, x6, x7, u = np.moveaxis(np.asarray(v), -1, 0)
    return t, x, y, z, x5, x6, x7, u


sin, cos = np.sin, np.cos

# -- quaternionic Kahler metric ------------------------------------------------------------


def _t1(v, a):
    t, x, y, z, x5, x6, x7, u = _unpack(v)
    au = a * u
    e = {}
    e[1, 1] = u * (au * (x5 ** 2 + x6 ** 2 + x7 ** 2) + 4) / 4
    e[1, 2] = -u * (au - 1) * x5 / 2
    e[1, 3] = u * (au - 1) * (x6 * cos(x) - x7 * sin(x)) / 2
    e[1, 4] = -u * (au - 1) * (x5 * cos(y) - sin(y) * (x6 * sin(x) + x7 * cos(x))) / 2
    e[1, 5] = -a * u ** 2 * x5 / 4
    e[1, 6] = -a * u ** 2 * x6 / 4
    e[1, 7] = -a * u ** 2 * x7 / 4
    e[2, 2] = u * (au * (x6 ** 2 + x7 ** 2 + 4) - 4) / 4
    e[2, 3] = a * u ** 2 * x5 * (x6 * cos(x) - x7 * sin(x)) / 4
    e[2, 4] = u * (au * x5 * sin(y) * (x6 * sin(x) + x7 * cos(x)) + cos(y) * (au * (x6 ** 2 + x7 ** 2 + 4) - 4)) / 4
    e[2, 5] = u * (au - 1) / 2
    e[2, 6] = -a * u ** 2 * x7 / 4
    e[2, 7] = a * u ** 2 * x6 / 4
    e[3, 3] = u * (2 * au * x5 ** 2 + au * x6 ** 2 + au * x7 ** 2 + 8 * au + 2 * au * x6 * x7 * sin(2 * x)
                   - au * cos(2 * x) * (x6 ** 2 - x7 ** 2) - 8) / 8
    e[3, 4] = a * u ** 2 * (x6 * cos(x) - x7 * sin(x)) * (2 * x5 * cos(y) - 2 * (x6 * sin(x) + x7 * cos(x)) * sin(y)) / 8
    e[3, 5] = -a * u ** 2 * (x6 * sin(x) + x7 * cos(x)) / 4
    e[3, 6] = u * ((2 - 2 * au) * cos(x) + au * x5 * sin(x)) / 4
    e[3, 7] = u * (2 * (au - 1) * sin(x) + au * x5 * cos(x)) / 4
    e[4, 4] = u * ((au * (x6 ** 2 + x7 ** 2 + 4) - 4) * cos(y) ** 2 + 4 * au * sin(x) ** 2 * sin(y) ** 2
                   - 4 * sin(x) ** 2 * sin(y) ** 2
                   + au * x5 ** 2 * sin(x) ** 2 * sin(x) ** 2 + au * x7 ** 2 * sin(x) ** 2 * sin(x) ** 2
                   + au * x5 * x6 * sin(x) * sin(2 * y)
                   + cos(x) ** 2 * sin(y) ** 2 * (au * (x5 ** 2 + x6 ** 2 + 4) - 4) + au * x5 * x7 * cos(x) * sin(2 * y)
                   - au * x6 * x7 * sin(2 * x) * sin(y) ** 2) / 4
    e[4, 5] = u * (2 * (au - 1) * cos(y) + au * sin(y) * (x6 * cos(x) - x7 * sin(x))) / 4
    e[4, 6] = -u * (2 * (au - 1) * sin(x) * sin(y) + au * (x5 * cos(x) * sin(y) + x7 * cos(y))) / 4
    e[4, 7] = u * (au * (x5 * sin(x) * sin(y) + x6 * cos(y)) - 2 * (au - 1) * cos(x) * sin(y)) / 4
    e[5, 5] = e[6, 6] = e[7, 7] = a * u ** 2 / 4
    e[8, 8] = 1 / (u * (au - 1))
    return e


# -- Spin(7) metric --------------------------------------------------------------------------


def _t2(v, a):
    t, x, y, z, x5, x6, x7, u = _unpack(v)
    U = u ** (5 / 3)
    P = 9 * U + 4 * a
    Q = U + a
    D = 20 * u ** (2 / 3)
    F = 5 * u ** (2 / 3)
    e = {}
    e[1, 1] = (20 * U + P * (x5 ** 2 + x6 ** 2 + x7 ** 2)) / D
    e[1, 2] = -2 * Q * x5 / F
    e[1, 3] = 2 * Q * (x6 * cos(x) - x7 * sin(x)) / F
    e[1, 4] = -2 * Q * (x5 * cos(y) - sin(y) * (x6 * sin(x) + x7 * cos(x))) / F
    e[1, 5] = -P * x5 / D
    e[1, 6] = -P * x6 / D
    e[1, 7] = -P * x7 / D
    e[2, 2] = (16 * Q + P * (x6 ** 2 + x7 ** 2)) / D
    e[2, 3] = P * x5 * (x6 * cos(x) - x7 * sin(x)) / D
    e[2, 4] = (16 * Q * cos(y) + P * (x5 * sin(y) * (x6 * sin(x) + x7 * cos(x)) + (x6 ** 2 + x7 ** 2) * cos(y))) / D
    e[2, 5] = 2 * Q / F
    e[2, 6] = -P * x7 / D
    e[2, 7] = P * x6 / D
    e[3, 3] = (16 * Q + P * (x5 ** 2 + x6 ** 2 + x7 ** 2 - (x6 * cos(x) - x7 * sin(x)) ** 2)) / D
    e[3, 4] = -P * (x6 * cos(x) - x7 * sin(x)) * (-x5 * cos(y) + x6 * sin(x) * sin(y) + x7 * cos(x) * sin(y)) / D
    e[3, 5] = -P * (x6 * sin(x) + x7 * cos(x)) / D
    e[3, 6] = (P * x5 * sin(x) - 8 * Q * cos(x)) / D
    e[3, 7] = (8 * Q * sin(x) + P * x5 * cos(x)) / D
    e[4, 4] = (4 * Q / F - P * x5 * sin(2 * y) * (x6 * sin(x) + x7 * cos(x)) / D
               - P * ((x6 ** 2 + x7 ** 2) * cos(y) ** 2 + (x5 ** 2 + (x6 * cos(x) - x7 * sin(x)) ** 2) * sin(y) ** 2) / D)
    e[4, 5] = 2 * Q * cos(y) / F + P * sin(y) * (x6 * cos(x) - x7 * sin(x)) / D
    e[4, 6] = -2 * Q * sin(x) * sin(y) / F - P * (x5 * cos(x) * sin(y) + x7 * cos(y)) / D
    e[4, 7] = P * (x5 * sin(x) * sin(y) + x6 * cos(y)) / D - 2 * Q * cos(x) * sin(y) / F
    e[5, 5] = e[6, 6] = e[7, 7] = P / D
    e[8, 8] = 5 * u ** (2 / 3) / (36 * Q)
    return e


def _t1_corrected(v, a):
    """Table 1 with ``sin^2 x sin^2 x`` read as ``sin^2 x sin^2 y`` in the x5^2, x7^2 terms of g44."""
    e = _t1(v, a)
    t, x, y, z, x5, x6, x7, u = _unpack(v)
    fix = a * u * (x5 ** 2 + x7 ** 2) * (sin(x) ** 2 * sin(y) ** 2 - sin(x) ** 4)
    e[4, 4] = e[4, 4] + u * fix / 4
    return e


TABLE1 = _t1
TABLE1_CORRECTED = _t1_corrected
TABLE2 = _t2


def _dense(entries: Dict[Tuple[int, int], object], shape) -> np.ndarray:
    dtype = np.result_type(float, *[np.asarray(v).dtype for v in entries.values()])
    g = np.zeros(shape + (8, 8), dtype=dtype)
    for (i, j), val in entries.items():
        g[..., i - 1, j - 1] = val
        g[..., j - 1, i - 1] = val
    return g


def table_metric(which: int, a: float = 1.0, corrected: bool = False) -> CoordMetric:
    """The transcribed table as a coordinate metric (entries not listed are zero).

    ``corrected=True`` applies the single g44 reading fix to table 1.
    """
    tab = {1: _t1_corrected if corrected else _t1, 2: _t2}[which]
    base = build("qk_new_G1" if which == 1 else "spin7_G1", a=a)

    def metric(v):
        v = np.asarray(v)
        return _dense(tab(v, a), v.shape[:-1])

    return CoordMetric(f"appendix{which}_table", 8, (1,) * 8, metric, base.random_point, None, {"a": a},
                       tuple(base.chart_obj.coords) + ("u",))


# -- Spin(7) curvature forms --------------------------------------------------------------------


def _gfun(u, a):
    G = (a * u ** (-2 / 3) - u) / 20
    G1 = (-(2 / 3) * a * u ** (-5 / 3) - 1) / 20
    G2 = ((10 / 9) * a * u ** (-8 / 3)) / 20
    g = np.sqrt(G)
    g1 = G1 / (2 * g)
    g2 = G2 / (2 * g) - G1 ** 2 / (4 * g ** 3)
    return g, g1, g2


def _A(u, a):
    g, g1, _ = _gfun(u, a)
    return g * (2 * u * g1 - g) / u ** 2


def _B(u, a):
    g, g1, _ = _gfun(u, a)
    return g * (18 * u * g1 - g) / u ** 2


def _C(u, a):
    g, g1, g2 = _gfun(u, a)
    return 36 * (g1 ** 2 + g * g2)


# (i, j, k, l, printed coefficient, value(u, a)): the coefficient of gamma^{kl} in Omega^i_j
_F = {"A": _A, "B": _B, "C": _C}
_RAW = [
    (1, 2, 5, 8, "-6g(2ug'-g)/u^2", -6, "A"), (1, 3, 6, 8, "6g(2ug'-g)/u^2", 6, "A"),
    (1, 4, 7, 8, "6g(2ug'-g)/u^2", 6, "A"),
    (1, 5, 1, 5, "-g(18ug'-g)/u^2", -1, "B"), (1, 5, 2, 8, "3g(2ug'-g)/u^2", 3, "A"),
    (1, 6, 1, 6, "-g(18ug'-g)/u^2", -1, "B"), (1, 6, 3, 8, "3g(2ug'-g)/u^2", 3, "A"),
    (1, 7, 1, 7, "-g(18ug'-g)/u^2", -1, "B"), (1, 7, 4, 8, "3g(2ug'-g)/u^2", 3, "A"),
    (1, 8, 1, 8, "-9g(2ug'-g)/u^2", -9, "A"), (1, 8, 2, 5, "-3g(2ug'-g)/u^2", -3, "A"),
    (1, 8, 3, 6, "-3g(2ug'-g)/u^2", -3, "A"), (1, 8, 4, 7, "-3g(2ug'-g)/u^2", -3, "A"),
    (2, 3, 7, 8, "6g(2ug'-g)/u^2", 6, "A"), (2, 4, 6, 8, "-6g(2ug'-g)/u^2", -6, "A"),
    (2, 5, 1, 8, "-3g(2ug'-g)/u^2", -3, "A"), (2, 5, 2, 5, "-g(18ug'-g)/u^2", -1, "B"),
    (2, 6, 2, 6, "-g(18ug'-g)/u^2", -1, "B"), (2, 6, 4, 8, "-3g(2ug'-g)/u^2", -3, "A"),
    (2, 7, 2, 7, "-g(18ug'-g)/u^2", -1, "B"), (2, 7, 3, 8, "3g(2ug'-g)/u^2", 3, "A"),
    (2, 8, 1, 5, "3g(2ug'-g)/u^2", 3, "A"), (2, 8, 2, 8, "-9g(2ug'-g)/u^2", -9, "A"),
    (2, 8, 3, 7, "-3g(2ug'-g)/u^2", -3, "A"), (2, 8, 4, 6, "3g(2ug'-g)/u^2", 3, "A"),
    (3, 4, 5, 8, "6g(2ug'-g)/u^2", 6, "A"),
    (3, 5, 3, 5, "-g(18ug'-g)/u^2", -1, "B"), (3, 5, 4, 8, "3g(2ug'-g)/u^2", 3, "A"),
    (3, 6, 1, 8, "-3g(2ug'-g)/u^2", -3, "A"), (3, 6, 3, 6, "-g(18ug'-g)/u^2", -1, "B"),
    (3, 7, 2, 8, "-3g(2ug'-g)/u^2", -3, "A"), (3, 7, 3, 7, "-g(18ug'-g)/u^2", -1, "B"),
    (3, 8, 1, 6, "3g(2ug'-g)/u^2", 3, "A"), (3, 8, 2, 7, "3g(2ug'-g)/u^2", 3, "A"),
    (3, 8, 3, 8, "-9g(2ug'-g)/u^2", -9, "A"), (3, 8, 4, 5, "-3g(2ug'-g)/u^2", -3, "A"),
    (4, 5, 3, 8, "-3g(18ug'-g)/u^2", -3, "B"), (4, 5, 4, 5, "-g(18ug'-g)/u^2", -1, "B"),
    (4, 6, 2, 8, "3g(2ug'-g)/u^2", 3, "A"), (4, 6, 4, 6, "-g(18ug'-g)/u^2", -1, "B"),
    (4, 7, 1, 8, "-3g(2ug'-g)/u^2", -3, "A"), (4, 7, 4, 7, "-g(18ug'-g)/u^2", -1, "B"),
    (4, 8, 1, 7, "3g(2ug'-g)/u^2", 3, "A"), (4, 8, 2, 6, "-3g(2ug'-g)/u^2", -3, "A"),
    (4, 8, 3, 5, "3g(2ug'-g)/u^2", 3, "A"), (4, 8, 4, 8, "-9g(2ug'-g)/u^2", -9, "A"),
    (5, 8, 1, 2, "6g(2ug'-g)/u^2", 6, "A"), (5, 8, 3, 4, "6g(2ug'-g)/u^2", 6, "A"),
    (5, 8, 5, 8, "-36(g'^2+gg'')", -1, "C"),
    (6, 8, 1, 3, "6g(2ug'-g)/u^2", 6, "A"), (6, 8, 2, 4, "-6g(2ug'-g)/u^2", -6, "A"),
    (6, 8, 6, 8, "-36(g'^2+gg'')", -1, "C"),
    (7, 8, 1, 4, "6g(2ug'-g)/u^2", 6, "A"), (7, 8, 2, 3, "6g(2ug'-g)/u^2", 6, "A"),
    (7, 8, 7, 8, "-36(g'^2+gg'')", -1, "C"),
]
CURVATURE_FORMS2: List[Tuple[int, int, int, int, str, Callable]] = [
    (i, j, k, l, text, (lambda c, f: lambda u, a: c * _F[f](u, a))(c, f)) for i, j, k, l, text, c, f in _RAW
]
# entries carrying the undefined symbols lambda, mu or a bare "1 u" factor
EXCLUDED_FORMS2 = [
    "Omega^1_2 (12, 67)", "Omega^1_3 (13, 57)", "Omega^1_4 (14, 56)", "Omega^1_5 (37, 46)",
    "Omega^1_6 (27, 45)", "Omega^1_7 (26, 35)", "Omega^2_3 (23, 56)", "Omega^2_4 (24, 57)",
    "Omega^2_5 (36, 47)", "Omega^2_6 (17, 35)", "Omega^2_7 (16, 45)", "Omega^3_4 (34, 67)",
    "Omega^3_5 (17, 26)", "Omega^3_6 (25, 47)", "Omega^3_7 (15, 46)", "Omega^4_5 (16, 27)",
    "Omega^4_6 (15, 37)", "Omega^4_7 (25, 36)", "Omega^5_6 (14, 23, 56)", "Omega^5_7 (13, 24, 57)",
    "Omega^6_7 (12, 34, 67)",
]


def gamma_metric(a: float = 1.0) -> CoordMetric:
    """Frame-assembled Spin(7) metric with the coframe ``gamma`` of the printed curvature list.

    ``gamma^5..gamma^7 = g(u) e^5..e^7`` all with positive sign, unlike the signed
    frame used for the 4-form ``Psi``.
    """
    m = build("spin7_G1", a=a)
    cm = m.to_coord_metric()
    flip = np.ones(8)
    flip[6] = -1.0

    def coframe(v):
        return flip[:, None] * m.coord_coframe(v)

    cm.coframe = coframe
    cm.name = "spin7_G1_gamma"
    return cm


# -- cross-check --------------------------------------------------------------------------------


@dataclass
class AppendixReport:
    which: int
    a: float
    points: List[List[float]]
    metric_entries: Dict[str, float]
    metric_mismatches: List[Dict[str, object]]
    max_metric_error: float
    curvature_entries: Dict[str, float] = field(default_factory=dict)
    curvature_mismatches: List[Dict[str, object]] = field(default_factory=list)
    excluded: List[str] = field(default_factory=list)
    tol_metric: float = 1e-10
    tol_curvature: float = 1e-5

    @property
    def metric_ok(self) -> bool:
        return not self.metric_mismatches

    @property
    def curvature_ok(self) -> bool:
        return not self.curvature_mismatches

    def as_dict(self):
        return {
            "which": self.which,
            "a": self.a,
            "n_points": len(self.points),
            "max_metric_error": self.max_metric_error,
            "metric_entries_matching": sum(1 for v in self.metric_entries.values() if v <= self.tol_metric),
            "metric_entries_total": len(self.metric_entries),
            "metric_mismatches": self.metric_mismatches,
            "curvature_entries_matching": sum(1 for v in self.curvature_entries.values() if v <= self.tol_curvature),
            "curvature_entries_total": len(self.curvature_entries),
            "curvature_mismatches": self.curvature_mismatches,
            "excluded": self.excluded,
        }


def appendix_crosscheck(which: int, a: float = 1.0, points=None, samples: int = 3, seed: int = 0,
                        tol_metric: float = 1e-10, tol_curvature: float = 1e-5,
                        curvature: bool = True, corrected: bool = False) -> AppendixReport:
    """Compare a transcribed table with the frame-assembled metric (and, for the
    Spin(7) table, the printed curvature-form coefficients with the computed ones)."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    m = build("qk_new_G1" if which == 1 else "spin7_G1", a=a)
    tab = table_metric(which, a, corrected)
    rng = np.random.default_rng(seed)
    if points is None:
        points = [m.random_point(rng) for _ in range(samples)]
    points = [np.asarray(p, dtype=float) for p in points]
    err: Dict[str, float] = {}
    mism: List[Dict[str, object]] = []
    for p in points:
        G = m.coord_metric(p)
        T = tab.g(p)
        for i in range(8):
            for j in range(i, 8):
                d = abs(G[i, j] - T[i, j]) / max(1.0, abs(G[i, j]))
                key = f"g{i + 1}{j + 1}"
                err[key] = max(err.get(key, 0.0), float(d))
    for key, d in sorted(err.items()):
        if d > tol_metric:
            i, j = int(key[1]) - 1, int(key[2]) - 1
            p = points[0]
            mism.append({"entry": key, "max_rel_error": d, "table": float(tab.g(p)[i, j]),
                         "frame": float(m.coord_metric(p)[i, j])})
    rep = AppendixReport(which, a, [list(map(float, p)) for p in points], err, mism,
                         max(err.values()), tol_metric=tol_metric, tol_curvature=tol_curvature)
    if which == 2 and curvature:
        cm = gamma_metric(a)
        cerr: Dict[str, float] = {}
        cmis = []
        for p in points:
            cs = riemann_ricci_fd(cm, p)
            u = p[-1]
            for i, j, k, l, text, fn in CURVATURE_FORMS2:
                got = float(cs.signs[i - 1] * cs.riemann[i - 1, j - 1, k - 1, l - 1])
                want = float(fn(u, a))
                d = abs(got - want) / max(1.0, abs(want))
                key = f"Omega^{i}_{j} gamma^{k}{l}"
                if d > cerr.get(key, -1.0):
                    cerr[key] = d
                    if d > tol_curvature:
                        cmis = [c for c in cmis if c["entry"] != key]
                        cmis.append({"entry": key, "printed": text, "printed_value": want, "computed": got,
                                     "u": float(u), "rel_error": d})
        rep.curvature_entries = cerr
        rep.curvature_mismatches = cmis
        rep.excluded = list(EXCLUDED_FORMS2)
    return rep
