"""Hitchin-type evolution ODEs for cohomogeneity-one special holonomy metrics.

Two kinds of systems:

* 4D (hyper-Kahler and hyper-para-Kahler on a 3D group times a line).  State
  ``(f, f1, f2, f3)`` where ``f`` is the lapse in ``g = sum f_i^2 (e^i)^2 +- f^2 dt^2``.
  Every such system has the form ``(f1 f2)' = s3 f f3``, ``(f1 f3)' = s2 f f2``,
  ``(f2 f3)' = s1 f f1`` for constant signs ``s_i`` in {-1, 0, 1}.
* 7D -> 8D (quaternionic Kahler / Spin(7)) with structure constant ``tau`` and
  arclength parameter ``t``.  States ``(f, f1, f2, f3)``, or the reduced ``(f, h)``.

Closed-form families are parametrised by an auxiliary variable ``x`` and carry
``dt/dx``; derivatives are taken by complex step, so families must be written
with complex-safe numpy operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "OdeSystem",
    "SYSTEMS",
    "get_system",
    "ClosedFormFamily",
    "FAMILIES",
    "get_family",
    "FamilyPoint",
    "family_eval",
    "residual",
    "family_residuals",
    "ideal_system",
    "ideal_system_printed",
    "ideal_residual",
    "bgpp_residual",
    "Trajectory",
    "integrate",
    "rk4_fixed",
    "oracle_compare",
    "convergence_order",
    "DomainError",
]


class DomainError(ValueError):
    """Evaluation outside a family's or system's validity domain."""


# -- systems ----------------------------------------------------------------------


@dataclass(frozen=True)
class OdeSystem:
    id: str
    kind: str  # "4d", "qk", "spin7", "qk_iso", "spin7_red"
    signs: Tuple[int, int, int] = (0, 0, 0)  # (s1, s2, s3) for 4d systems
    tau: float = 0.0
    signature: str = "riemannian"
    description: str = ""

    @property
    def state_names(self) -> Tuple[str, ...]:
        if self.kind in ("qk_iso",):
            return ("f", "h")
        if self.kind == "spin7_red":
            return ("f", "f1")
        return ("f", "f1", "f2", "f3")

    def with_tau(self, tau: float) -> "OdeSystem":
        return OdeSystem(self.id, self.kind, self.signs, float(tau), self.signature, self.description)

    def equations(self, y, dy) -> np.ndarray:
        """Residual of each equation of the system at a state and its t-derivative."""
        y = [complex(v) if np.iscomplexobj(v) else v for v in y]
        tau = self.tau
        if self.kind == "4d":
            f, f1, f2, f3 = y
            _, d1, d2, d3 = dy
            s1, s2, s3 = self.signs
            return np.array([
                d1 * f2 + f1 * d2 - s3 * f * f3,
                d1 * f3 + f1 * d3 - s2 * f * f2,
                d2 * f3 + f2 * d3 - s1 * f * f1,
            ])
        if self.kind == "qk_iso":
            f, h = y
            df, dh = dy
            return np.array([df - 2 * h, f * dh - 2 * h * h + tau * f])
        if self.kind == "spin7_red":
            f, h = y
            df, dh = dy
            return np.array([df - 6 * h, f * dh + 2 * h * h - tau * f])
        f, f1, f2, f3 = y
        df, d1, d2, d3 = dy
        q1 = df * f2 * f3 + f * d2 * f3 + f * f2 * d3
        q2 = df * f1 * f3 + f * d1 * f3 + f * f1 * d3
        q3 = df * f1 * f2 + f * d1 * f2 + f * f1 * d2
        p = f1 * f2 * f3
        if self.kind == "qk":
            return np.array([
                3 * df - 2 * (f1 + f2 + f3),
                q1 - 2 * tau * f * (f1 - f2 - f3) - 6 * p,
                q2 - 2 * tau * f * (-f1 + f2 - f3) - 6 * p,
                q3 - 2 * tau * f * (-f1 - f2 + f3) - 6 * p,
            ])
        if self.kind == "spin7":
            return np.array([
                df - 2 * (f1 + f2 - f3),
                q1 - 2 * tau * f * (f1 - f2 + f3) - 2 * p,
                q2 - 2 * tau * f * (-f1 + f2 + f3) - 2 * p,
                q3 - 2 * tau * f * (f1 + f2 + f3) + 2 * p,
            ])
        raise ValueError(self.kind)

    def rhs(self, t: float, y: np.ndarray, lapse: Optional[Callable[[float], float]] = None) -> np.ndarray:
        """Explicit first-order form.  4d systems integrate ``(f1, f2, f3)`` and need a lapse."""
        tau = self.tau
        if self.kind == "4d":
            f1, f2, f3 = y
            f = lapse(t) if lapse is not None else f1 * f2 * f3
            s1, s2, s3 = self.signs
            # logarithmic derivatives of the pair products
            L1 = s1 * f * f1 / (f2 * f3)
            L2 = s2 * f * f2 / (f1 * f3)
            L3 = s3 * f * f3 / (f1 * f2)
            return np.array([
                f1 * (L2 + L3 - L1) / 2,
                f2 * (L1 + L3 - L2) / 2,
                f3 * (L1 + L2 - L3) / 2,
            ])
        if self.kind == "qk_iso":
            f, h = y
            return np.array([2 * h, (2 * h * h - tau * f) / f])
        if self.kind == "spin7_red":
            f, h = y
            return np.array([6 * h, (tau * f - 2 * h * h) / f])
        f, f1, f2, f3 = y
        p = f1 * f2 * f3
        if self.kind == "qk":
            df = 2 * (f1 + f2 + f3) / 3
            dq = (2 * tau * f * (f1 - f2 - f3) + 6 * p,
                  2 * tau * f * (-f1 + f2 - f3) + 6 * p,
                  2 * tau * f * (-f1 - f2 + f3) + 6 * p)
        else:
            df = 2 * (f1 + f2 - f3)
            dq = (2 * tau * f * (f1 - f2 + f3) + 2 * p,
                  2 * tau * f * (-f1 + f2 + f3) + 2 * p,
                  2 * tau * f * (f1 + f2 + f3) - 2 * p)
        lf = df / f
        L1 = dq[0] / (f * f2 * f3) - lf
        L2 = dq[1] / (f * f1 * f3) - lf
        L3 = dq[2] / (f * f1 * f2) - lf
        return np.array([
            df,
            f1 * (L2 + L3 - L1) / 2,
            f2 * (L1 + L3 - L2) / 2,
            f3 * (L1 + L2 - L3) / 2,
        ])


_SYS = [
    OdeSystem("QK_ISO", "qk_iso", description="f'=2h, f h' - 2h^2 + tau f = 0 (equal fibre scalings)"),
    OdeSystem("QK_GEN7", "qk", description="quaternionic Kahler evolution with independent fibre scalings"),
    OdeSystem("SPIN7_GEN", "spin7", description="Spin(7) Hitchin flow with independent fibre scalings"),
    OdeSystem("SPIN7_RED", "spin7_red", description="Spin(7) flow with f1=f2=-f3"),
    OdeSystem("HK4_SU2", "4d", (1, 1, 1), description="Bianchi IX hyper-Kahler"),
    OdeSystem("HK4_SU11", "4d", (1, -1, 1), description="Bianchi VIII hyper-Kahler"),
    OdeSystem("HK4_HEIS", "4d", (0, 0, 1), description="Bianchi II (Gibbons-Hawking class)"),
    OdeSystem("HK4_E2", "4d", (0, 1, 1), description="Bianchi VII0"),
    OdeSystem("HK4_E11", "4d", (0, 1, -1), description="Bianchi VI0"),
    OdeSystem("HPK4_SU2", "4d", (1, 1, -1), "neutral", "SU(2) hyper-para-Kahler"),
    OdeSystem("HPK4_SU11", "4d", (1, 1, 1), "neutral", "SU(1,1) hyper-para-Kahler"),
    OdeSystem("HPK4_HEIS", "4d", (0, 0, -1), "neutral", "Heisenberg hyper-para-Kahler"),
    OdeSystem("HPK4_E2", "4d", (0, 1, -1), "neutral", "E(2) hyper-para-Kahler"),
    OdeSystem("HPK4_E11", "4d", (0, 1, 1), "neutral", "E(1,1) hyper-para-Kahler"),
]
SYSTEMS: Dict[str, OdeSystem] = {s.id: s for s in _SYS}


def get_system(name: str, tau: Optional[float] = None) -> OdeSystem:
    try:
        s = SYSTEMS[name.upper()]
    except KeyError:
        raise KeyError(f"unknown ODE system {name!r}; known: {sorted(SYSTEMS)}") from None
    return s.with_tau(tau) if tau is not None else s


def bgpp_residual(y, dy) -> float:
    """Residual of the cyclic first-order form ``f_i' = f (f_j^2+f_k^2-f_i^2)/(2 f_j f_k)``."""
    f, f1, f2, f3 = y
    _, d1, d2, d3 = dy
    r = [
        d1 - f * (f2 ** 2 + f3 ** 2 - f1 ** 2) / (2 * f2 * f3),
        d2 - f * (f3 ** 2 + f1 ** 2 - f2 ** 2) / (2 * f1 * f3),
        d3 - f * (f1 ** 2 + f2 ** 2 - f3 ** 2) / (2 * f1 * f2),
    ]
    return float(max(abs(v) for v in r))


# -- families ---------------------------------------------------------------------


def _q(z):
    return z ** 0.25


@dataclass(frozen=True)
class ClosedFormFamily:
    """Closed-form solution family in an auxiliary variable ``x``.

    ``state(x, p)`` returns the system state; for 4D systems ``x`` plays the
    role of time, so ``dt/dx = 1`` and the lapse is part of the state.
    ``x_of_state`` recovers ``x`` from a state (used by the RK4 oracle).
    """

    id: str
    system: str
    defaults: Dict[str, float]
    state: Callable
    domain: Callable  # (x, p) -> bool
    span: Callable  # p -> (lo, hi) sampling interval inside the domain
    dtdx: Optional[Callable] = None
    x_of_state: Optional[Callable] = None
    variable: str = "x"
    description: str = ""
    tau_param: Optional[str] = None
    extra_systems: Tuple[str, ...] = ()

    def params(self, **over) -> Dict[str, float]:
        p = dict(self.defaults)
        for k, v in over.items():
            if v is None:
                continue
            if k not in p:
                raise KeyError(f"family {self.id} has no parameter {k!r}")
            p[k] = float(v)
        return p

    def ode(self, p: Dict[str, float]) -> OdeSystem:
        return get_system(self.system, p.get(self.tau_param) if self.tau_param else None)

    def samples(self, p: Dict[str, float], n: int = 100) -> np.ndarray:
        lo, hi = self.span(p)
        base = lo - (hi - lo) * 1e-3 if lo <= 0 else lo * (1 - 1e-3)
        # log-spaced offsets above the lower sampling point
        off = np.geomspace(lo - base, hi - base, n)
        return base + off


def _su2_state(x, p):
    a1, a2, a3 = p["a1"], p["a2"], p["a3"]
    d1, d2, d3 = x - a1, x - a2, x - a3
    g = 0.5 * (d1 * d2 * d3) ** -0.25
    return [g, _q(d2) * _q(d3) / _q(d1), _q(d1) * _q(d3) / _q(d2), _q(d1) * _q(d2) / _q(d3)]


def _su11_state(x, p):
    a1, a2, a3 = p["a1"], p["a2"], p["a3"]
    d1, d2, d3 = x - a1, a2 - x, x - a3
    g = 0.5 * (d1 * d2 * d3) ** -0.25
    return [g, _q(d3) * _q(d2) / _q(d1), _q(d1) * _q(d3) / _q(d2), _q(d1) * _q(d2) / _q(d3)]


def _swap23(fn):
    def st(x, p):
        f, f1, f2, f3 = fn(x, p)
        return [f, f1, f3, f2]
    return st


def _neg3(fn):
    def st(x, p):
        f, f1, f2, f3 = fn(x, p)
        return [f, f1, f2, -f3]
    return st


def _eh_state(t, p):
    a = p["a"]
    w = (1 - a / t ** 4) ** 0.5
    return [1 / w, t / 2, t / 2, t / 2 * w]


def _triax_state(t, p):
    A, B, C = p["a"] ** 4, p["b"] ** 4, p["c"] ** 4
    da, db, dc = t ** 4 - A, t ** 4 - B, t ** 4 - C
    return [2 * t ** 3 / (_q(da) * _q(db) * _q(dc)),
            _q(db) * _q(dc) / _q(da), _q(da) * _q(dc) / _q(db), _q(da) * _q(db) / _q(dc)]


def _su11_part_state(t, p):
    a = p["a"]
    w = _q(a - t ** 4)
    return [t / w, w / 2, t ** 2 / (2 * w), w / 2]


def _heis_state(r, p):
    a, b, c = p["a"], p["b"], p["c"]
    z = (1.5 * (a * b) ** 0.25 * r + c) ** (1 / 3)
    return [1.0 + 0 * r, (b / a) ** 0.25 * z, (a / b) ** 0.25 * z, (a * b) ** 0.25 / z]


def _heis_part_state(t, p):
    s = t ** 0.5
    return [s, s, s, 1 / s]


def _emot_state(x, p):
    a1, a2, a3 = p["a1"], p["a2"], p["a3"]
    d2, d3 = x - a2, x - a3
    g = 0.5 * (a1 * d2 * d3) ** -0.25
    return [g, _q(d2) * _q(d3) / _q(a1), _q(a1) * _q(d3) / _q(d2), _q(a1) * _q(d2) / _q(d3)]


def _vii0_state(t, p):
    A, B = p["A"], p["B"]
    P = A * np.exp(t) + B * np.exp(-t)
    M = A * np.exp(t) - B * np.exp(-t)
    f = 0.5 * (P * M) ** 0.5
    f3 = (M / P) ** 0.5
    return [f, f, 1 / f3, f3]


def _e11_state(x, p):
    a1, a2, a3 = p["a1"], p["a2"], p["a3"]
    d2, d3 = x - a2, a3 - x
    g = 0.5 * (a1 * d2 * d3) ** -0.25
    return [g, _q(d2) * _q(d3) / _q(a1), _q(a1) * _q(d3) / _q(d2), _q(a1) * _q(d2) / _q(d3)]


def _vi0_state(t, p):
    a, b = p["a"], p["b"]
    X = 0.5 * (a * np.cos(t) + b * np.sin(t))
    Y = 0.5 * (a * np.sin(t) - b * np.cos(t))
    f = (X * Y) ** 0.5
    f3 = (Y / X) ** 0.5
    return [f, f, 1 / f3, f3]


def _qk_iso_state(u, p):
    return [u, (p["tau"] * u + p["a"] * u * u) ** 0.5]


def _qk_iso_dt(u, p):
    return 1 / (2 * (p["tau"] * u + p["a"] * u * u) ** 0.5)


def _qk7_state(u, p):
    a1, a2, a3, C = p["a1"], p["a2"], p["a3"], p["C"]
    b1, b2, b3 = u + a1, u + a2, u + a3
    s = (6 / C) ** 0.5
    r = lambda i, j, k: s * (j ** 4 * k ** 4 / i ** 5) ** (1 / 9)
    return [C * (b1 * b2 * b3) ** (1 / 9), r(b1, b2, b3), r(b2, b3, b1), r(b3, b1, b2)]


def _qk7_dt(u, p):
    a1, a2, a3, C = p["a1"], p["a2"], p["a3"], p["C"]
    return (C / 6) ** 1.5 / ((u + a1) * (u + a2) * (u + a3)) ** (1 / 3)


def _qk7_x(y, p):
    f, f1, f2, f3 = y
    return f * f2 * f3 / 6 - p["a1"]


def _sp7red_state(u, p):
    return [u, ((p["tau"] * u ** (5 / 3) - p["a"]) / (5 * u ** (2 / 3))) ** 0.5]


def _sp7red_dt(u, p):
    return 1 / (6 * _sp7red_state(u, p)[1])


def _sp7gen_state(u, p):
    a1, a2, a3, C = p["a1"], p["a2"], p["a3"], p["C"]
    s = (2 / C) ** 0.5
    b1, b2, b3 = u + a1, u + a2, a3 - u
    return [C * b1 * b2 * b3, s / b1, s / b2, s / b3]


def _sp7gen_dt(u, p):
    a1, a2, a3, C = p["a1"], p["a2"], p["a3"], p["C"]
    return (C ** 3 / 8) ** 0.5 * (u + a1) * (u + a2) * (a3 - u)


def _sp7gen_x(y, p):
    return (2 / p["C"]) ** 0.5 / y[1] - p["a1"]


def _pos(*vals):
    return all(np.real(v) > 0 for v in vals)


_FAM: List[ClosedFormFamily] = [
    ClosedFormFamily(
        "su2_general", "HK4_SU2", {"a1": 0.0, "a2": 1.0, "a3": 2.0}, _su2_state,
        lambda x, p: _pos(x - p["a1"], x - p["a2"], x - p["a3"]),
        lambda p: (max(p["a1"], p["a2"], p["a3"]) + 0.01, max(p["a1"], p["a2"], p["a3"]) + 100),
        description="general Bianchi IX solution in the auxiliary variable x",
        extra_systems=("HPK4_SU11",),
    ),
    ClosedFormFamily(
        "eguchi_hanson", "HK4_SU2", {"a": 1.0}, _eh_state,
        lambda t, p: _pos(t, t ** 4 - p["a"]),
        lambda p: (p["a"] ** 0.25 * 1.001, p["a"] ** 0.25 * 30),
        variable="t", description="Eguchi-Hanson (two equal scalings)",
        extra_systems=("HPK4_SU11",),
    ),
    ClosedFormFamily(
        "bgpp_triaxial", "HK4_SU2", {"a": 1.0, "b": 1.2, "c": 1.5}, _triax_state,
        lambda t, p: _pos(t ** 4 - p["a"] ** 4, t ** 4 - p["b"] ** 4, t ** 4 - p["c"] ** 4),
        lambda p: (max(p["a"], p["b"], p["c"]) * 1.001, max(p["a"], p["b"], p["c"]) * 30),
        variable="t", description="triaxial Bianchi IX",
        extra_systems=("HPK4_SU11",),
    ),
    ClosedFormFamily(
        "su11_general", "HK4_SU11", {"a1": 0.0, "a2": 3.0, "a3": -1.0}, _su11_state,
        lambda x, p: _pos(x - p["a1"], p["a2"] - x, x - p["a3"]),
        lambda p: (max(p["a1"], p["a3"]) + 1e-2 * (p["a2"] - max(p["a1"], p["a3"])),
                   p["a2"] - 1e-2 * (p["a2"] - max(p["a1"], p["a3"]))),
        description="general Bianchi VIII solution",
    ),
    ClosedFormFamily(
        "su11_particular", "HK4_SU11", {"a": 1.0}, _su11_part_state,
        lambda t, p: _pos(t, p["a"] - t ** 4),
        lambda p: (0.01 * p["a"] ** 0.25, 0.99 * p["a"] ** 0.25),
        variable="t", description="Bianchi VIII particular solution",
    ),
    ClosedFormFamily(
        "heis_general", "HK4_HEIS", {"a": 1.0, "b": 2.0, "c": 0.5}, _heis_state,
        lambda r, p: _pos(1.5 * (p["a"] * p["b"]) ** 0.25 * r + p["c"]),
        lambda p: (0.01, 100.0),
        variable="r", description="Bianchi II general solution in dr = f dt",
    ),
    ClosedFormFamily(
        "heis_particular", "HK4_HEIS", {}, _heis_part_state,
        lambda t, p: _pos(t), lambda p: (0.01, 100.0),
        variable="t", description="Heisenberg (Gibbons-Hawking) metric",
    ),
    ClosedFormFamily(
        "e2_general", "HK4_E2", {"a1": 1.0, "a2": 0.0, "a3": 1.0}, _emot_state,
        lambda x, p: _pos(p["a1"], x - p["a2"], x - p["a3"]),
        lambda p: (max(p["a2"], p["a3"]) + 0.01, max(p["a2"], p["a3"]) + 100),
        description="general Bianchi VII0 solution",
        extra_systems=("HPK4_E11",),
    ),
    ClosedFormFamily(
        "bianchi_vii0", "HK4_E2", {"A": 1.0, "B": 0.5}, _vii0_state,
        lambda t, p: _pos(p["A"] * np.exp(t) + p["B"] * np.exp(-t), p["A"] * np.exp(t) - p["B"] * np.exp(-t)),
        lambda p: (0.5 * np.log(p["B"] / p["A"]) + 0.01, 0.5 * np.log(p["B"] / p["A"]) + 5),
        variable="t", description="Bianchi VII0 vacuum solution (A, B)",
        extra_systems=("HPK4_E11",),
    ),
    ClosedFormFamily(
        "e11_general", "HK4_E11", {"a1": 1.0, "a2": 0.0, "a3": 2.0}, _e11_state,
        lambda x, p: _pos(p["a1"], x - p["a2"], p["a3"] - x),
        lambda p: (p["a2"] + 1e-2 * (p["a3"] - p["a2"]), p["a3"] - 1e-2 * (p["a3"] - p["a2"])),
        description="general Bianchi VI0 solution",
        extra_systems=("HPK4_E2",),
    ),
    ClosedFormFamily(
        "bianchi_vi0", "HK4_E11", {"a": 1.0, "b": 0.5}, _vi0_state,
        lambda t, p: _pos(p["a"] * np.cos(t) + p["b"] * np.sin(t), p["a"] * np.sin(t) - p["b"] * np.cos(t)),
        lambda p: (np.arctan2(p["b"], p["a"]) + 0.01, np.arctan2(p["b"], p["a"]) + np.pi / 2 - 0.01),
        variable="t", description="Bianchi VI0 trigonometric solution (a, b)",
        extra_systems=("HPK4_E2",),
    ),
    ClosedFormFamily(
        "hpk_su2_general", "HPK4_SU2", {"a1": 0.0, "a2": 3.0, "a3": -1.0}, _swap23(_su11_state),
        lambda x, p: _pos(x - p["a1"], p["a2"] - x, x - p["a3"]),
        lambda p: (max(p["a1"], p["a3"]) + 1e-2 * (p["a2"] - max(p["a1"], p["a3"])),
                   p["a2"] - 1e-2 * (p["a2"] - max(p["a1"], p["a3"]))),
        description="SU(2) neutral family: Bianchi VIII solution with f2, f3 swapped",
    ),
    ClosedFormFamily(
        "hpk_heis_general", "HPK4_HEIS", {"a": 1.0, "b": 2.0, "c": 0.5}, _neg3(_heis_state),
        lambda r, p: _pos(1.5 * (p["a"] * p["b"]) ** 0.25 * r + p["c"]),
        lambda p: (0.01, 100.0),
        variable="r", description="Heisenberg neutral family (f3 negated)",
    ),
    ClosedFormFamily(
        "qk_iso", "QK_ISO", {"tau": 0.0, "a": 1.0}, _qk_iso_state,
        lambda u, p: _pos(u, p["tau"] * u + p["a"] * u * u),
        lambda p: _qk_iso_span(p), dtdx=_qk_iso_dt, x_of_state=lambda y, p: y[0],
        variable="u", description="f=u, h^2 = tau u + a u^2", tau_param="tau",
    ),
    ClosedFormFamily(
        "qk_gen7", "QK_GEN7", {"a1": 0.0, "a2": 1.0, "a3": 2.0, "C": 1.0}, _qk7_state,
        lambda u, p: _pos(u + p["a1"], u + p["a2"], u + p["a3"]),
        lambda p: (-min(p["a1"], p["a2"], p["a3"]) + 0.01, -min(p["a1"], p["a2"], p["a3"]) + 100),
        dtdx=_qk7_dt, x_of_state=_qk7_x, variable="u",
        description="tau=0 general family, f^9 = C^9 (u+a1)(u+a2)(u+a3)",
    ),
    ClosedFormFamily(
        "spin7_red", "SPIN7_RED", {"tau": 1.0, "a": 1.0}, _sp7red_state,
        lambda u, p: _pos(u, p["tau"] * u ** (5 / 3) - p["a"]),
        lambda p: _sp7red_span(p), dtdx=_sp7red_dt, x_of_state=lambda y, p: y[0],
        variable="u", description="f1^2 = (tau u^{5/3} - a)/(5 u^{2/3})", tau_param="tau",
    ),
    ClosedFormFamily(
        "spin7_gen", "SPIN7_GEN", {"a1": 1.0, "a2": 1.5, "a3": 2.0, "C": 1.0}, _sp7gen_state,
        lambda u, p: _pos(u + p["a1"], u + p["a2"], p["a3"] - u),
        lambda p: (-min(p["a1"], p["a2"]) + 1e-2 * (p["a3"] + min(p["a1"], p["a2"])),
                   p["a3"] - 1e-2 * (p["a3"] + min(p["a1"], p["a2"]))),
        dtdx=_sp7gen_dt, x_of_state=_sp7gen_x, variable="u",
        description="tau=0 general Spin(7) family",
    ),
]


def _qk_iso_span(p):
    tau, a = p["tau"], p["a"]
    if a > 0:
        lo = max(-tau / a, 0.0)
        return (lo + 0.01 * max(1.0, abs(lo)), lo + 100 * max(1.0, abs(lo)))
    if a < 0 and tau > 0:
        hi = -tau / a
        return (0.01 * hi, 0.99 * hi)
    if a == 0 and tau > 0:
        return (0.01, 100.0)
    raise DomainError(f"qk_iso: empty domain for tau={tau}, a={a}")


def _sp7red_span(p):
    tau, a = p["tau"], p["a"]
    if tau > 0:
        lo = max(a / tau, 0.0) ** 0.6
        return (lo + 0.01 * max(1.0, lo), lo + 100 * max(1.0, lo))
    if tau < 0 and a < 0:
        hi = (a / tau) ** 0.6
        return (0.01 * hi, 0.99 * hi)
    if tau == 0 and a < 0:
        return (0.01, 100.0)
    raise DomainError(f"spin7_red: empty domain for tau={tau}, a={a}")


FAMILIES: Dict[str, ClosedFormFamily] = {f.id: f for f in _FAM}


def get_family(name: str) -> ClosedFormFamily:
    try:
        return FAMILIES[name]
    except KeyError:
        raise KeyError(f"unknown family {name!r}; known: {sorted(FAMILIES)}") from None


@dataclass
class FamilyPoint:
    x: float
    state: np.ndarray
    dstate_dt: np.ndarray
    dtdx: float


def _cstep(fn, x: float, p) -> Tuple[np.ndarray, np.ndarray]:
    h = 1e-20 * max(1.0, abs(x))
    val = np.array(fn(complex(x, h), p), dtype=complex)
    return val.real.copy(), val.imag / h


def family_eval(fam: ClosedFormFamily | str, x: float, **params) -> FamilyPoint:
    """State, t-derivative (chain rule through dt/dx) and dt/dx at ``x``."""
    if isinstance(fam, str):
        fam = get_family(fam)
    p = fam.params(**params)
    if not fam.domain(x, p):
        raise DomainError(f"{fam.id}: x={x} outside the domain for {p}")
    val, dval = _cstep(fam.state, x, p)
    if not np.all(np.isfinite(val)):
        raise DomainError(f"{fam.id}: non-finite state at x={x}")
    dtdx = 1.0 if fam.dtdx is None else float(np.real(fam.dtdx(x, p)))
    return FamilyPoint(x, val, dval / dtdx, dtdx)


def residual(sys: OdeSystem | str, state, dstate) -> float:
    """Max absolute violation of the system equations."""
    if isinstance(sys, str):
        sys = get_system(sys)
    return float(np.max(np.abs(sys.equations(state, dstate))))


def family_residuals(fam: ClosedFormFamily | str, n: int = 100, system: Optional[str] = None,
                     **params) -> Dict[str, object]:
    if isinstance(fam, str):
        fam = get_family(fam)
    p = fam.params(**params)
    sys = fam.ode(p) if system is None else get_system(system, p.get(fam.tau_param) if fam.tau_param else None)
    xs = fam.samples(p, n)
    res = []
    for x in xs:
        pt = family_eval(fam, x, **p)
        res.append(residual(sys, pt.state, pt.dstate_dt))
    return {
        "family": fam.id,
        "system": sys.id,
        "params": p,
        "n": n,
        "span": [float(xs[0]), float(xs[-1])],
        "max_residual": float(max(res)),
    }


def _ideal_terms(y, dy, tau: float, printed: bool):
    f, F, dfv, dF = _ideal_args(y, dy)
    rows = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        pair = F[j] * F[k]
        dpair = dF[j] * F[k] + F[j] * dF[k]
        tau_pair = pair if printed else (F[j] + F[k])
        rows.append([f * dpair, -dfv * pair, 2 * F[0] * F[1] * F[2], -2 * pair * (F[j] + F[k]),
                     2 * tau * f * tau_pair, -2 * tau * f * F[i]])
    return np.array(rows)


def ideal_system(y, dy, tau: float) -> np.ndarray:
    """Coefficients ``f * C_i`` of ``dF_i = C_i dt^eta_j^eta_k (mod <F1, F2, F3>)``.

    Obtained by reducing ``dF_i`` with ``F_m`` to eliminate every ``omega``; the
    state ``(f, f1, f2, f3)`` may also be ``(f, h)`` (equal fibre scalings).
    """
    return _ideal_terms(y, dy, tau, False).sum(axis=1)


def ideal_system_printed(y, dy, tau: float) -> np.ndarray:
    """The differential-ideal system with ``2 tau f f_j f_k`` as printed; it
    differs from :func:`ideal_system` only when ``tau != 0``."""
    return _ideal_terms(y, dy, tau, True).sum(axis=1)


def _ideal_args(y, dy):
    if len(y) == 2:
        return y[0], [y[1]] * 3, dy[0], [dy[1]] * 3
    return y[0], list(y[1:]), dy[0], list(dy[1:])


def ideal_residual(fam: ClosedFormFamily | str, x: float, **params) -> float:
    """Max violation of the differential-ideal system for a 7D quaternionic family,
    relative to the size of the terms in each equation."""
    if isinstance(fam, str):
        fam = get_family(fam)
    p = fam.params(**params)
    sys = fam.ode(p)
    if sys.kind not in ("qk", "qk_iso"):
        raise ValueError(f"{fam.id}: the differential-ideal condition concerns quaternionic families")
    pt = family_eval(fam, x, **p)
    terms = _ideal_terms(pt.state, pt.dstate_dt, sys.tau, False)
    scale = np.maximum(1.0, np.abs(terms).sum(axis=1))
    return float(np.max(np.abs(terms.sum(axis=1)) / scale))


# -- integration ------------------------------------------------------------------


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    status: str  # "ok", "domain_exit", "blow_up", "max_steps"
    last_t: float
    n_steps: int
    n_rejected: int = 0
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _rk4_step(F, t, y, h):
    k1 = F(t, y)
    k2 = F(t + h / 2, y + h / 2 * k1)
    k3 = F(t + h / 2, y + h / 2 * k2)
    k4 = F(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_fixed(F: Callable, y0, t0: float, t1: float, n: int) -> np.ndarray:
    """Classical RK4 with ``n`` equal steps; returns the final state."""
    y = np.asarray(y0, dtype=float)
    h = (t1 - t0) / n
    t = t0
    for _ in range(n):
        y = _rk4_step(F, t, y, h)
        t += h
    return y


def integrate(sys: OdeSystem | str, y0, t_span: Tuple[float, float], tol: float = 1e-10,
              lapse: Optional[Callable[[float], float]] = None,
              in_domain: Optional[Callable[[float, np.ndarray], bool]] = None,
              h0: Optional[float] = None, max_steps: int = 200000) -> Trajectory:
    """Adaptive RK4 by step doubling; a step is accepted when the local error
    estimate ``|y_h - y_{h/2}|/15 <= tol * max(1, |y|)``, otherwise halved."""
    if isinstance(sys, str):
        sys = get_system(sys)
    F = lambda t, y: sys.rhs(t, y, lapse)
    t0, t1 = float(t_span[0]), float(t_span[1])
    direction = 1.0 if t1 >= t0 else -1.0
    y = np.asarray(y0, dtype=float)
    h = direction * (h0 if h0 else abs(t1 - t0) / 64)
    ts, ys = [t0], [y.copy()]
    t = t0
    steps = rejected = 0
    status, msg = "ok", ""
    with np.errstate(all="ignore"):
        while direction * (t1 - t) > 1e-15 * max(1.0, abs(t1)):
            if steps + rejected >= max_steps:
                status, msg = "max_steps", f"step budget exhausted at t={t}"
                break
            if direction * (t + h - t1) > 0:
                h = t1 - t
            big = _rk4_step(F, t, y, h)
            half = _rk4_step(F, t + h / 2, _rk4_step(F, t, y, h / 2), h / 2)
            if not (np.all(np.isfinite(big)) and np.all(np.isfinite(half))):
                if abs(h) < 1e-14 * max(1.0, abs(t)):
                    status, msg = "blow_up", f"non-finite state near t={t}"
                    break
                h /= 2
                rejected += 1
                continue
            err = np.max(np.abs(half - big)) / 15
            scale = max(1.0, float(np.max(np.abs(half))))
            if err > tol * scale:
                h /= 2
                rejected += 1
                if abs(h) < 1e-14 * max(1.0, abs(t)):
                    status, msg = "blow_up", f"step size underflow near t={t}"
                    break
                continue
            y_new = half + (half - big) / 15  # local extrapolation
            t_new = t + h
            if in_domain is not None and not in_domain(t_new, y_new):
                status, msg = "domain_exit", f"left the domain after t={t}"
                break
            t, y = t_new, y_new
            ts.append(t)
            ys.append(y.copy())
            steps += 1
            if err < tol * scale / 64:
                h *= 2
    return Trajectory(np.array(ts), np.array(ys), status, t, steps, rejected, msg)


def _system_state_from_y(fam: ClosedFormFamily, sys: OdeSystem, y, t, lapse):
    if sys.kind == "4d":
        return np.array([lapse(t), *y])
    return np.asarray(y)


def oracle_compare(fam: ClosedFormFamily | str, tol: float = 1e-10, **params) -> Dict[str, object]:
    """Integrate the owning system from the family's first sample and compare
    against the closed form along the trajectory."""
    if isinstance(fam, str):
        fam = get_family(fam)
    p = fam.params(**params)
    sys = fam.ode(p)
    lo, hi = fam.span(p)
    x0 = lo
    # keep the span moderate: the closed forms grow polynomially
    x1 = lo + min(hi - lo, 10.0 * max(1.0, abs(lo)))
    start = family_eval(fam, x0, **p)
    if sys.kind == "4d":
        lapse = lambda x: float(np.real(fam.state(x, p)[0]))
        traj = integrate(sys, start.state[1:], (x0, x1), tol=tol, lapse=lapse,
                         in_domain=lambda x, y: fam.domain(x, p))
        worst = 0.0
        for x, y in zip(traj.t, traj.y):
            ref = family_eval(fam, x, **p).state[1:]
            worst = max(worst, float(np.max(np.abs(y - ref))))
        span = (x0, float(traj.t[-1]))
    else:
        # integrate in t; compare at the family variable recovered from the state
        t1 = _t_length(fam, p, x0, x1)
        traj = integrate(sys, start.state, (0.0, t1), tol=tol,
                         in_domain=lambda t, y: fam.domain(fam.x_of_state(y, p), p))
        worst = 0.0
        for y in traj.y:
            x = fam.x_of_state(y, p)
            ref = family_eval(fam, x, **p).state
            worst = max(worst, float(np.max(np.abs(y - ref))))
        span = (0.0, float(traj.t[-1]))
    return {
        "family": fam.id,
        "system": sys.id,
        "params": p,
        "status": traj.status,
        "span": list(span),
        "steps": traj.n_steps,
        "max_deviation": worst,
    }


def _t_length(fam, p, x0, x1, n: int = 400) -> float:
    """``t(x1) - t(x0)`` by composite Simpson on dt/dx."""
    xs = np.linspace(x0, x1, 2 * n + 1)
    w = np.ones_like(xs)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    vals = np.array([float(np.real(fam.dtdx(x, p))) for x in xs])
    return float((xs[1] - xs[0]) / 3 * np.sum(w * vals))


def convergence_order(fam: ClosedFormFamily | str, n0: int = 4, levels: int = 7, **params) -> Dict[str, object]:
    """Observed RK4 order from fixed-step errors against the closed form at the end point.

    Pairs whose errors sit above 1e-2 (pre-asymptotic) or below 1e-12 (roundoff)
    relative to the solution size are not used; the finest usable pair is reported.
    """
    if isinstance(fam, str):
        fam = get_family(fam)
    p = fam.params(**params)
    sys = fam.ode(p)
    # an interior window keeps the endpoint singularities out of the error model
    xs = fam.samples(p, 100)
    x0, x1 = float(xs[50]), float(xs[65])
    if sys.kind == "4d":
        lapse = lambda x: float(np.real(fam.state(x, p)[0]))
        F = lambda t, y: sys.rhs(t, y, lapse)
        y0 = family_eval(fam, x0, **p).state[1:]
        ref = family_eval(fam, x1, **p).state[1:]
        t0, t1 = x0, x1
    else:
        # autonomous in t; the window length in t comes from dt/dx
        F = lambda t, y: sys.rhs(t, y)
        y0 = family_eval(fam, x0, **p).state
        ref = family_eval(fam, x1, **p).state
        t0, t1 = 0.0, _t_length(fam, p, x0, x1, n=4000)
    scale = max(1.0, float(np.max(np.abs(ref))))
    errs = []
    with np.errstate(all="ignore"):
        for k in range(levels):
            yN = rk4_fixed(F, y0, t0, t1, n0 * 2 ** k)
            errs.append(float(np.max(np.abs(yN - ref))))
    orders = []
    for i in range(levels - 1):
        e0, e1 = errs[i], errs[i + 1]
        if 1e-12 * scale < e1 and e0 < 1e-2 * scale:
            orders.append(float(np.log2(e0 / e1)))
    return {
        "family": fam.id,
        "window": [x0, x1],
        "errors": errs,
        "orders": orders,
        "order": orders[-1] if orders else float("nan"),
        # every step size already at roundoff: RK4 reproduces this solution, no order is observable
        "exact_to_roundoff": bool(max(errs) <= 1e-12 * scale),
    }
