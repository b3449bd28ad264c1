"""Cohomogeneity-one special holonomy metrics as frames with scaling functions.

A metric lives on ``G x I`` with a left-invariant base coframe ``e^1..e^n`` and a
transverse variable ``x``.  The evolving orthonormal coframe is

    E^i = sum_j A_ij(x) e^j   (i < n),        E^n = lapse(x) dx,

and ``g = sum_i sigma_i (E^i)^2``.  The fundamental forms are constant forms in
the abstract orthonormal frame, substituted with the ``E^i``.  Exterior
derivatives split as ``d = d_base + dx ^ d/dx``: ``d_base`` is the exact Lie
algebra differential and ``d/dx`` is carried alongside as a value/derivative jet
(derivatives of ``A`` and the lapse by complex step, or exact when supplied).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import evolution as ev
from .charts import CoordChart, get_chart, random_chart_point
from .exterior import KForm, QSqrt2, Signature, hodge_star, wedge
from .lie import LieFrame, get_algebra, heisenberg

__all__ = [
    "FormJet",
    "substitute",
    "CohomOneMetric",
    "METRICS",
    "build",
    "list_metrics",
    "closedness_check",
    "coordinate_closedness",
    "hypo_check",
    "HypoReport",
    "qc_forms",
    "hypo_forms",
    "restriction_identity",
    "three_sasaki_model",
    "three_sasaki_cone_check",
    "g2_package",
    "G2Package",
    "spin7_check",
    "epsilon_basis_check",
    "EPSILON_MAP",
    "export_json",
]


# -- jets ------------------------------------------------------------------------


class FormJet:
    """A form depending on ``x`` together with its ``x``-derivative."""

    __slots__ = ("val", "der")

    def __init__(self, val: KForm, der: KForm):
        self.val = val
        self.der = der

    @property
    def degree(self) -> int:
        return self.val.degree

    def __add__(self, o: "FormJet") -> "FormJet":
        return FormJet(self.val + o.val, self.der + o.der)

    def __sub__(self, o: "FormJet") -> "FormJet":
        return FormJet(self.val - o.val, self.der - o.der)

    def __neg__(self) -> "FormJet":
        return FormJet(-self.val, -self.der)

    def scale(self, c) -> "FormJet":
        return FormJet(self.val * c, self.der * c)

    def __xor__(self, o: "FormJet") -> "FormJet":
        return FormJet(wedge(self.val, o.val), wedge(self.der, o.val) + wedge(self.val, o.der))


def substitute(form: KForm, E: Sequence[FormJet]) -> FormJet:
    """Replace the abstract frame ``e^i`` in a constant form by the jets ``E[i]``."""
    dim = E[0].val.dim
    out = FormJet(KForm(dim, form.degree), KForm(dim, form.degree))
    for idx, c in form.items():
        term = E[idx[0]]
        for i in idx[1:]:
            term = term ^ E[i]
        out = out + term.scale(c)
    return out


def _f2(N: int, *pairs) -> KForm:
    """Sum of ``sign * e^{ab}`` from triples ``(sign, a, b)``."""
    out = KForm(N, 2)
    for s, a, b in pairs:
        out = out + KForm.basis(N, a, b, coeff=s)
    return out


def qc_forms(n: int, N: int) -> Tuple[List[KForm], List[KForm]]:
    """``omega_s`` and ``eta_s`` of the standard qc frame embedded in dimension ``N``."""
    om = [KForm(N, 2) for _ in range(3)]
    for p in range(n):
        a, b, c, d = 4 * p, 4 * p + 1, 4 * p + 2, 4 * p + 3
        om[0] = om[0] + _f2(N, (1, a, b), (1, c, d))
        om[1] = om[1] + _f2(N, (1, a, c), (1, d, b))
        om[2] = om[2] + _f2(N, (1, a, d), (1, b, c))
    eta = [KForm.basis(N, 4 * n + s) for s in range(3)]
    return om, eta


def _quaternionic_F(n: int) -> List[KForm]:
    """``F_i = omega_i + eta_j ^ eta_k - eta_i ^ dt`` in the abstract frame of ``G x R``."""
    N = 4 * n + 4
    om, eta = qc_forms(n, N)
    dt = KForm.basis(N, N - 1)
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        out.append(om[i] + wedge(eta[j], eta[k]) - wedge(eta[i], dt))
    return out


def _g2_forms(n: int = 1) -> Tuple[KForm, KForm]:
    """``phi`` and the displayed ``*phi`` on the 7-frame (n = 1) embedded in ``G x R``."""
    N = 4 * n + 4
    om, eta = qc_forms(n, N)
    e1, e2, e3 = eta
    phi = 2 * wedge(om[0], e1) + 2 * wedge(om[1], e2) - 2 * wedge(om[2], e3) + 2 * wedge(wedge(e1, e2), e3)
    starphi = -(wedge(om[0], om[0]) + 2 * wedge(om[0], wedge(e2, e3)) + 2 * wedge(om[1], wedge(e3, e1))
                - 2 * wedge(om[2], wedge(e1, e2)))
    return phi, starphi


def _hk4_F(para: bool) -> List[KForm]:
    N = 4
    s = -1 if para else 1
    return [
        _f2(N, (s, 0, 1), (1, 2, 3)),
        _f2(N, (1, 0, 2), (-1, 1, 3)),
        _f2(N, (1, 1, 2), (1, 0, 3)),
    ]


def _sp2_F() -> List[KForm]:
    return [
        _f2(8, (1, 0, 1), (1, 2, 3), (1, 4, 5), (1, 6, 7)),
        _f2(8, (1, 0, 2), (-1, 1, 3), (1, 4, 6), (-1, 5, 7)),
        _f2(8, (1, 0, 3), (1, 1, 2), (1, 5, 6), (1, 4, 7)),
    ]


def _sp2_eps_F() -> List[KForm]:
    return [
        _f2(8, (1, 0, 1), (1, 2, 3), (-1, 4, 5), (1, 6, 7)),
        _f2(8, (1, 0, 2), (-1, 1, 3), (-1, 5, 6), (1, 4, 7)),
        _f2(8, (1, 0, 3), (1, 1, 2), (-1, 4, 6), (-1, 5, 7)),
    ]


def _square_sum(F: Sequence[KForm], signs=(1, 1, 1)) -> KForm:
    out = KForm(F[0].dim, 4)
    for s, f in zip(signs, F):
        out = out + s * wedge(f, f)
    return out


# -- metric objects ------------------------------------------------------------------


def _cstep_matrix(fn, x: float, p):
    h = 1e-20 * max(1.0, abs(x))
    A, lap = fn(complex(x, h), p)
    A = np.asarray(A, dtype=complex)
    if A.ndim == 1:
        A = np.diag(A)
    lap = complex(lap)
    return A.real.copy(), A.imag / h, lap.real, lap.imag / h


@dataclass
class CohomOneMetric:
    name: str
    description: str
    base: LieFrame
    chart: Optional[str]
    variable: str
    params: Dict[str, float]
    signature: Tuple[int, ...]
    frame_fn: Callable  # (x, params) -> (A (n,) or (n, n), lapse), complex-safe
    domain: Callable  # (x, params) -> bool
    span: Tuple[float, float]
    forms: Dict[str, KForm]
    kind: str  # "qk", "spin7", "hk4", "hpk4", "hk8"
    expressions: Dict[str, str] = field(default_factory=dict)
    exact_frame: Optional[Callable] = None  # x -> (A, dA, lapse, dlapse) exact
    family: Optional[str] = None
    expected: Dict[str, object] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.base.dim

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @property
    def sig(self) -> Signature:
        return Signature(self.signature)

    def check_domain(self, x) -> None:
        if not self.domain(x, self.params):
            raise ev.DomainError(f"{self.name}: {self.variable}={x} outside the domain")

    # frame and jets
    def frame(self, x: float):
        self.check_domain(x)
        A, dA, lap, dlap = _cstep_matrix(self.frame_fn, float(x), self.params)
        if not (np.all(np.isfinite(A)) and np.isfinite(lap)):
            raise ev.DomainError(f"{self.name}: non-finite frame at {self.variable}={x}")
        return A, dA, lap, dlap

    def _extended(self) -> LieFrame:
        if not hasattr(self, "_ext"):
            N = self.dim
            de = [f.embed(N) for f in self.base.de] + [KForm(N, 2)]
            self._ext = LieFrame(self.base.name + "xR", de)
        return self._ext

    def jets(self, x, exact: bool = False) -> List[FormJet]:
        N, n = self.dim, self.n
        if exact:
            if self.exact_frame is None:
                raise ValueError(f"{self.name} has no exact frame")
            A, dA, lap, dlap = self.exact_frame(x)
            get = lambda M, i, j: M[i][j]
        else:
            A, dA, lap, dlap = self.frame(x)
            get = lambda M, i, j: float(M[i, j])
        E = []
        for i in range(n):
            val = KForm(N, 1, {(j,): get(A, i, j) for j in range(n) if get(A, i, j) != 0})
            der = KForm(N, 1, {(j,): get(dA, i, j) for j in range(n) if get(dA, i, j) != 0})
            E.append(FormJet(val, der))
        E.append(FormJet(KForm(N, 1, {(n,): lap}), KForm(N, 1, {(n,): dlap})))
        return E

    def form_jet(self, name: str, x, exact: bool = False) -> FormJet:
        return substitute(self.forms[name], self.jets(x, exact))

    def d_total(self, jet: FormJet) -> KForm:
        dx = KForm.basis(self.dim, self.n)
        return self._extended().d(jet.val) + wedge(dx, jet.der)

    def d_base(self, jet: FormJet) -> KForm:
        return self._extended().d(jet.val)

    # coordinates
    @property
    def chart_obj(self) -> CoordChart:
        if self.chart is None:
            raise ValueError(f"{self.name} has no coordinate chart")
        return get_chart(self.chart)

    def coord_coframe(self, v) -> np.ndarray:
        """Rows ``E^i`` in the coordinates ``(chart coordinates..., x)``; vectorized, complex-safe."""
        v = np.asarray(v)
        n = self.n
        C = self.chart_obj(v[..., :n])
        x = v[..., n]
        out = np.zeros(v.shape[:-1] + (n + 1, n + 1), dtype=np.result_type(C, x, float))
        flat_x = np.atleast_1d(x).reshape(-1)
        As, laps = [], []
        for xx in flat_x:
            A, lap = self.frame_fn(xx, self.params)
            A = np.asarray(A)
            As.append(np.diag(A) if A.ndim == 1 else A)
            laps.append(lap)
        As = np.array(As).reshape(x.shape + (n, n))
        laps = np.array(laps).reshape(x.shape)
        out[..., :n, :n] = np.einsum("...ij,...jm->...im", As, C)
        out[..., n, n] = laps
        return out

    def coord_metric(self, v) -> np.ndarray:
        E = self.coord_coframe(v)
        s = np.array(self.signature, dtype=float)
        return np.einsum("...im,i,...in->...mn", E, s, E)

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        base = random_chart_point(self.chart_obj, rng)
        lo, hi = self.span
        return np.concatenate([base, [lo + (hi - lo) * rng.random()]])

    def random_x(self, rng: np.random.Generator, k: int) -> np.ndarray:
        lo, hi = self.span
        return lo + (hi - lo) * rng.random(k)

    def to_coord_metric(self):
        from .curvature import CoordMetric

        return CoordMetric.from_cohom(self)


# -- registry -------------------------------------------------------------------------


def _qk_metric(name, desc, base, chart, fam_state, fam_dt, params, domain, span, kind, n, expr, family=None,
               expected=None):
    """7D -> 8D metric from functions ``(f, f1, f2, f3)`` and ``dt/dx``."""
    h = 4 * n

    def frame(x, p):
        f, f1, f2, f3 = fam_state(x, p)
        diag = [f ** 0.5] * h + [f1, f2, f3]
        return np.array(diag), fam_dt(x, p)

    F = _quaternionic_F(n)
    forms = {"F1": F[0], "F2": F[1], "F3": F[2]}
    if kind == "qk":
        forms["Phi"] = _square_sum(F)
    else:
        forms["Psi"] = _square_sum(F, (1, 1, -1))
        phi, starphi = _g2_forms(n)
        forms["phi"] = phi
        forms["starphi"] = starphi
    return CohomOneMetric(name, desc, base, chart, "u" if family else "t", params, (1,) * (h + 4), frame, domain,
                          span, forms, kind, expr, family=family, expected=expected or {})


def _qk_heisenberg(a: float = 1.0, n: int = 1) -> CohomOneMetric:
    n = int(n)

    def state(t, p):
        u = np.exp(p["a"] * t)
        return u, p["a"] / 2 * u, p["a"] / 2 * u, p["a"] / 2 * u

    return _qk_metric(
        "qk_heisenberg", "quaternionic Kahler metric on the quaternionic Heisenberg group times a line",
        heisenberg(n), {1: "heisenberg7", 2: "heisenberg11"}.get(n), state, lambda t, p: 1.0, {"a": a, "n": n},
        lambda t, p: True, (-1.0, 1.0), "qk", n,
        {"E1..E4n": "exp(a t / 2)", "E(eta_s)": "a/2 exp(a t)", "lapse": "1"},
        expected={"einstein_constant_stated": -16 * n * a * a})


def _iso_state(tau, a):
    def state(u, p):
        h = (tau * u + a * u * u) ** 0.5
        return u, h, h, h

    return state


def _qk_new_G1(a: float = 1.0) -> CohomOneMetric:
    tau, at = -0.25, a / 4
    return _qk_metric(
        "qk_new_G1", "quaternionic Kahler metric from the qc-flat group G1",
        get_algebra("L1"), "loccoord", _iso_state(tau, at), lambda u, p: 1 / (2 * (tau * u + at * u * u) ** 0.5),
        {"a": a}, lambda u, p: np.real(u) > 0 and np.real(p["a"] * u * u - u) > 0,
        (1 / a * 1.05, 1 / a * 4) if a > 0 else (0.0, 0.0), "qk", 1,
        {"E1..E4": "sqrt(u)", "E(eta_s)": "sqrt((a u^2 - u)/4)", "lapse": "1/sqrt(a u^2 - u)"},
        family="qk_iso", expected={"einstein_constant": -4 * a})


def _fam_metric(fam_id: str, name: str, desc: str, base: str, chart: str, kind: str, expr, expected=None,
                **params):
    fam = ev.get_family(fam_id)
    p = fam.params(**params)
    lo, hi = fam.span(p)
    # keep sampled points in a moderate interior window
    span = (lo + 0.02 * (hi - lo), lo + 0.3 * (hi - lo)) if hi - lo > 10 else (lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))
    m = _qk_metric(name, desc, get_algebra(base), chart, fam.state, fam.dtdx, p, fam.domain, span, kind, 1, expr,
                   family=fam_id, expected=expected)
    return m


def _qk_nonQK(a1=0.0, a2=1.0, a3=2.0, C=1.0):
    return _fam_metric(
        "qk_gen7", "qk_nonQK_family", "closed fundamental 4-form, not Einstein unless a1=a2=a3",
        "heisenberg7", "heisenberg7", "qk",
        {"E1..E4": "sqrt(C) ((u+a1)(u+a2)(u+a3))^(1/18)",
         "E(eta_i)": "sqrt(6/C) ((u+a_j)^4 (u+a_k)^4 / (u+a_i)^5)^(1/9)",
         "lapse": "(C/6)^(3/2) ((u+a1)(u+a2)(u+a3))^(-1/3)"},
        a1=a1, a2=a2, a3=a3, C=C)


def _spin7_red_metric(name, desc, base, chart, tau, a_s, span, expr, expected=None, **shown):
    fam = ev.get_family("spin7_red")
    p = fam.params(tau=tau, a=a_s)

    def state(u, pp):
        f, h = fam.state(u, p)
        return f, h, h, -h

    m = _qk_metric(name, desc, get_algebra(base), chart, state, lambda u, pp: fam.dtdx(u, p), p,
                   lambda u, pp: fam.domain(u, p), span, "spin7", 1, expr, family="spin7_red",
                   expected=expected)
    m.params = dict(shown)
    return m


def _spin7_heisenberg(a: float = 1.0):
    a_s = -5 * a * a / 16
    return _spin7_red_metric(
        "spin7_heisenberg", "Spin(7) metric from the quaternionic Heisenberg group (u^3 = f)",
        "heisenberg7", "heisenberg7", 0.0, a_s, (0.2, 3.0),
        {"E1..E4": "sqrt(f)", "E(eta_s)": "+-(a/4) f^(-1/3)", "lapse": "(2/a) f^(1/3) / 3 per df"}, a=a)


def _spin7_G1(a: float = 1.0):
    if a <= 0:
        raise ev.DomainError("spin7_G1 needs a > 0")
    top = a ** 0.6
    return _spin7_red_metric(
        "spin7_G1", "Spin(7)-holonomy metric from the qc-flat group G1",
        "L1", "loccoord", -0.25, -a / 4, (0.1 * top, 0.8 * top),
        {"E1..E4": "sqrt(u)", "E(eta_s)": "+-sqrt((a - u^(5/3))/(20 u^(2/3)))",
         "lapse": "sqrt(5 u^(2/3) / (9 (a - u^(5/3))))"},
        expected={"ricci_flat": True, "holonomy": "spin7"}, a=a)


def _spin7_general(a1=1.0, a2=1.5, a3=2.0, C=1.0):
    return _fam_metric(
        "spin7_gen", "spin7_heisenberg_general", "three-parameter Spin(7) family on the quaternionic Heisenberg group",
        "heisenberg7", "heisenberg7", "spin7",
        {"E1..E4": "sqrt(C (u+a1)(u+a2)(a3-u))", "E(eta_i)": "sqrt(2/C)/(u+a1), /(u+a2), /(a3-u)",
         "lapse": "sqrt(C^3/8) (u+a1)(u+a2)(a3-u)"},
        expected={"ricci_flat": True}, a1=a1, a2=a2, a3=a3, C=C)


_HK4 = {
    # name: (family, algebra, chart)
    "hk4_su2": ("su2_general", "su2", "euler_su2"),
    "hk4_eguchi_hanson": ("eguchi_hanson", "su2", "euler_su2"),
    "hk4_bgpp_triaxial": ("bgpp_triaxial", "su2", "euler_su2"),
    "hk4_su11": ("su11_general", "su11", "su11"),
    "hk4_su11_particular": ("su11_particular", "su11", "su11"),
    "hk4_heis": ("heis_general", "heis3", "heis3"),
    "hk4_gibbons_hawking": ("heis_particular", "heis3", "heis3"),
    "hk4_e2": ("e2_general", "e2", "e2"),
    "hk4_bianchi_vii0": ("bianchi_vii0", "e2", "e2"),
    "hk4_e11": ("e11_general", "e11", "e11"),
    "hk4_bianchi_vi0": ("bianchi_vi0", "e11", "e11"),
}

_HPK4 = {
    "hpk4_su2": ("hpk_su2_general", "su2", "euler_su2"),
    "hpk4_su11": ("su2_general", "psu11", "psu11"),
    "hpk4_heis": ("hpk_heis_general", "heis3", "heis3"),
    "hpk4_e2": ("e11_general", "e2", "e2"),
    "hpk4_e11": ("e2_general", "e11", "e11"),
}


# f2 ~ t^2 / 2 near t = 0 leaves the chart metric ill-conditioned there
_SAMPLE_WINDOW = {
    "su11_particular": lambda p: (0.5 * p["a"] ** 0.25, 0.9 * p["a"] ** 0.25),
}


def _four_dim(name: str, para: bool, **params) -> CohomOneMetric:
    fam_id, alg, chart = (_HPK4 if para else _HK4)[name]
    fam = ev.get_family(fam_id)
    p = fam.params(**params)
    lo, hi = fam.span(p)
    span = (lo + 0.05 * (hi - lo), lo + 0.3 * (hi - lo)) if hi - lo > 10 else (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))
    if fam_id in _SAMPLE_WINDOW:
        span = _SAMPLE_WINDOW[fam_id](p)

    def frame(x, pp):
        f, f1, f2, f3 = fam.state(x, p)
        return np.array([f1, f2, f3]), f

    F = _hk4_F(para)
    label = "Omega" if para else "F"
    forms = {f"{label}{i + 1}": F[i] for i in range(3)}
    sig = (1, 1, -1, -1) if para else (1, 1, 1, 1)
    desc = ("neutral hyper-para-Kahler" if para else "hyper-Kahler") + f" metric on {alg} x R ({fam.description})"
    return CohomOneMetric(name, desc, get_algebra(alg), chart, fam.variable, p, sig, frame, fam.domain, span, forms,
                          "hpk4" if para else "hk4", {"E_i": "f_i(x) e^i", "lapse": "f(x)"}, family=fam_id,
                          expected={"ricci_flat": True})


def _lie8_exact(t):
    t = Fraction(t)
    A = [[Fraction(0)] * 7 for _ in range(7)]
    dA = [[Fraction(0)] * 7 for _ in range(7)]
    A[0][0], A[0][1], A[1][0], A[1][1] = -t, -(t + 1), -(t + 1), -t
    dA[0][0], dA[0][1], dA[1][0], dA[1][1] = Fraction(-1), Fraction(-1), Fraction(-1), Fraction(-1)
    for a in range(2, 7):
        A[a][a] = Fraction(1)
    return A, dA, Fraction(1), Fraction(0)


def _hk8_G7() -> CohomOneMetric:
    def frame(t, p):
        A = np.eye(7, dtype=np.result_type(t, float))
        A[0, 0], A[0, 1], A[1, 0], A[1, 1] = -t, -(t + 1), -(t + 1), -t
        return A, 1.0

    F = _sp2_F()
    return CohomOneMetric(
        "hk8_G7", "flat hyper-Kahler metric on G7 x R (linear evolution of e^1, e^2)",
        get_algebra("G7"), "g7", "t", {}, (1,) * 8, frame,
        lambda t, p: abs(np.real(t) + 0.5) > 1e-6, (0.0, 2.0),
        {"F1": F[0], "F2": F[1], "F3": F[2]}, "hk8",
        {"E1": "-t e^1 - (t+1) e^2", "E2": "-(t+1) e^1 - t e^2", "E3..E7": "e^a", "lapse": "1"},
        exact_frame=_lie8_exact, expected={"flat": True})


def _lie8n_exact(u):
    u = Fraction(u)
    A = [[Fraction(int(i == j)) for j in range(7)] for i in range(7)]
    dA = [[Fraction(0)] * 7 for _ in range(7)]
    A[0][0], dA[0][0] = u, Fraction(1)
    return A, dA, Fraction(-1), Fraction(0)


def _hk8_G7_flat() -> CohomOneMetric:
    def frame(u, p):
        d = np.ones(7, dtype=np.result_type(u, float))
        d[0] = u
        return d, -1.0

    F = _sp2_eps_F()
    return CohomOneMetric(
        "hk8_G7_flat", "flat hyper-Kahler metric u^2 (dx^1)^2 + du^2 + sum (dx^s)^2 in the epsilon basis",
        get_algebra("G7_eps"), "invf", "u", {}, (1,) * 8, frame,
        lambda u, p: np.real(u) > 0, (0.3, 3.0),
        {"F1": F[0], "F2": F[1], "F3": F[2]}, "hk8",
        {"E1": "u eps^1", "E2..E7": "eps^a", "lapse": "-1 (h dt = -du)"},
        exact_frame=_lie8n_exact, expected={"flat": True})


METRICS: Dict[str, Tuple[Callable, str]] = {
    "qk_heisenberg": (_qk_heisenberg, "quaternionic Kahler, exponential scalings, Einstein"),
    "qk_new_G1": (_qk_new_G1, "quaternionic Kahler from G1, Ric = -4 a g"),
    "qk_nonQK_family": (_qk_nonQK, "closed 4-form, not Einstein for distinct a_i"),
    "spin7_heisenberg": (_spin7_heisenberg, "Spin(7) holonomy, reduced flow, tau = 0"),
    "spin7_heisenberg_general": (_spin7_general, "Spin(7) holonomy, three-parameter family"),
    "spin7_G1": (_spin7_G1, "Spin(7) holonomy from G1"),
    "hk8_G7": (_hk8_G7, "flat 8D hyper-Kahler on G7"),
    "hk8_G7_flat": (_hk8_G7_flat, "flat 8D hyper-Kahler in the epsilon basis"),
}
for _k in _HK4:
    METRICS[_k] = ((lambda k: lambda **kw: _four_dim(k, False, **kw))(_k), f"4D hyper-Kahler ({_HK4[_k][0]})")
for _k in _HPK4:
    METRICS[_k] = ((lambda k: lambda **kw: _four_dim(k, True, **kw))(_k), f"4D hyper-para-Kahler ({_HPK4[_k][0]})")
# aliases used by reports
METRICS["appendix1"] = METRICS["qk_new_G1"]
METRICS["appendix2"] = METRICS["spin7_G1"]


def list_metrics() -> List[Tuple[str, str]]:
    return [(k, v[1]) for k, v in METRICS.items()]


def build(name: str, **params) -> CohomOneMetric:
    """Construct a registered metric; unknown parameters raise ``TypeError``."""
    try:
        fn = METRICS[name][0]
    except KeyError:
        raise KeyError(f"unknown metric {name!r}; known: {sorted(METRICS)}") from None
    params = {k: v for k, v in params.items() if v is not None}
    return fn(**params)


# -- checks ----------------------------------------------------------------------------


@dataclass
class ClosednessReport:
    metric: str
    form: str
    samples: List[float]
    residuals: List[float]
    seed: Optional[int]
    exact: bool = False

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def as_dict(self):
        return {
            "metric": self.metric,
            "form": self.form,
            "n_samples": len(self.samples),
            "seed": self.seed,
            "exact": self.exact,
            "max_residual": self.max_residual,
        }


def closedness_check(m: CohomOneMetric, form: str, samples: int = 20, seed: int = 0,
                     xs: Optional[Sequence] = None, exact: bool = False, base: bool = False) -> ClosednessReport:
    """``max |d(form)|`` over sample values of the transverse variable.

    The forms are left-invariant along the group, so the base point plays no role
    in the frame computation.  ``base=True`` takes only the base differential
    (e.g. cocalibration ``d(*phi) = 0`` on each slice).
    """
    if xs is None:
        if exact:
            rng = np.random.default_rng(seed)
            lo, hi = m.span
            xs = [Fraction(int(round((lo + (hi - lo) * rng.random()) * 64)), 64) for _ in range(samples)]
            xs = [x for x in xs if m.domain(float(x), m.params)]
        else:
            xs = list(m.random_x(np.random.default_rng(seed), samples))
    res = []
    for x in xs:
        jet = m.form_jet(form, x, exact=exact)
        dF = m.d_base(jet) if base else m.d_total(jet)
        if exact:
            res.append(0.0 if len(dF) == 0 else float(max(abs(float(v)) for _, v in dF.items())))
        else:
            res.append(dF.max_abs())
    return ClosednessReport(m.name, form, [float(x) for x in xs], res, seed, exact)


def coordinate_closedness(m: CohomOneMetric, form: str, v, h: float = 1e-20) -> float:
    """Chart-level cross-check: ``d`` of the coordinate components by complex step."""
    v = np.asarray(v, dtype=float)
    N = m.dim
    F = m.forms[form]
    k = F.degree
    dense = np.zeros((N,) * k)
    from itertools import permutations

    from .exterior import perm_sign

    for idx, c in F.items():
        for perm in permutations(range(k)):
            dense[tuple(idx[p] for p in perm)] = perm_sign(perm) * float(c)

    def coords(vv):
        E = m.coord_coframe(vv)
        out = dense
        for _ in range(k):
            # contract the leading abstract index with E, moving the coordinate index to the back
            out = np.tensordot(out, E, axes=([0], [0]))
        return out

    base = coords(v.astype(complex))
    grad = np.zeros((N,) + base.shape)
    for mu in range(N):
        vv = v.astype(complex)
        vv[mu] += 1j * h
        grad[mu] = coords(vv).imag / h
    # (dF)_{mu0..muk} = sum_j (-1)^j d_{mu_j} F_{mu0..^mu_j..muk}
    out = np.zeros((N,) * (k + 1))
    for perm_pos in range(k + 1):
        axes = list(range(1, k + 1))
        axes.insert(perm_pos, 0)
        out += (-1) ** perm_pos * np.transpose(grad, axes)
    return float(np.max(np.abs(out)))


@dataclass
class HypoReport:
    structure: str
    residuals: Dict[str, str]
    exact: bool = True

    @property
    def passed(self) -> bool:
        return all(v == "0" for v in self.residuals.values())

    def as_dict(self):
        return {"structure": self.structure, "passed": self.passed, "residuals": self.residuals, "exact": self.exact}


def hypo_forms(L: LieFrame, n: int = 1, kind: str = "qk") -> Dict[str, KForm]:
    """Forms whose closedness is the hypo condition of a standard qc frame.

    ``kind="hk"``: the three 2-forms ``omega_i + eta_j ^ eta_k`` (Sp(n)-hypo).
    ``kind="qk"``: the 4-form ``Omega = sum omega_i^2 + 2 omega_i ^ eta_j ^ eta_k``
    (Sp(n)Sp(1)-hypo).
    """
    om, eta = qc_forms(n, L.dim)
    out = {}
    Omega = KForm(L.dim, 4)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        out[f"omega{i + 1}+eta{j + 1}{k + 1}"] = om[i] + wedge(eta[j], eta[k])
        Omega = Omega + wedge(om[i], om[i]) + 2 * wedge(om[i], wedge(eta[j], eta[k]))
    if kind == "qk":
        return {"Omega": Omega}
    if kind == "hk":
        return out
    raise ValueError(f"unknown hypo kind {kind!r}")


_G7_HYPO = ["e12 + e34 + e56", "e13 - e24 + e57", "e14 + e23 + e67"]


def hypo_check(structure: str | LieFrame = "heisenberg7", kind: str = "qk",
               forms: Optional[Dict[str, KForm]] = None) -> HypoReport:
    """Exact residual of each hypo identity ``d(form) = 0``.

    G7 carries its own Sp(2)-hypo triple, used whatever ``kind`` says.
    """
    from .exterior import parse_form

    L = get_algebra(structure) if isinstance(structure, str) else structure
    if forms is None:
        if L.name == "G7":
            forms = {s: parse_form(7, s) for s in _G7_HYPO}
        else:
            forms = hypo_forms(L, (L.dim - 3) // 4, kind)
    res = {}
    for k, f in forms.items():
        dF = L.d(f)
        res[k] = "0" if len(dF) == 0 else dF.pretty()
    return HypoReport(L.name, res, True)


def restriction_identity(n: int = 1) -> bool:
    """``Omega = sum (pullback F_s)^2`` with the pullback ``omega_i + eta_j ^ eta_k`` (exact)."""
    L = heisenberg(n)
    pulled = list(hypo_forms(L, n, "hk").values())
    return _square_sum(pulled) == hypo_forms(L, n, "qk")["Omega"]


def three_sasaki_model() -> Tuple[LieFrame, List[KForm], List[KForm]]:
    """Forms satisfying ``d eta_i = 2 omega_i + 2 eta_j ^ eta_k`` realized on ``L1``.

    On L1 the standard frame has ``d eta = 2 omega - 1/2 eta ^ eta``; scaling eta and
    omega by ``-1/4`` produces the tau = 1 structure equations exactly.
    """
    L = get_algebra("L1")
    om, eta = qc_forms(1, 7)
    c = Fraction(-1, 4)
    return L, [c * w for w in om], [c * e for e in eta]


def three_sasaki_cone_check(ts: Sequence = (Fraction(1, 2), Fraction(1), Fraction(3))) -> Dict[str, object]:
    """Closedness of ``F_i(t) = t^2 omega_i + t^2 eta_j^eta_k - t eta_i ^ dt`` (exact)."""
    L, om, eta = three_sasaki_model()
    # the tau = 1 structure equations themselves
    se = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        se.append(L.d(eta[i]) - 2 * om[i] - 2 * wedge(eta[j], eta[k]))
    N = 8
    Lx = LieFrame("L1xR", [f.embed(N) for f in L.de] + [KForm(N, 2)])
    dt = KForm.basis(N, 7)
    worst = []
    for t in ts:
        t = Fraction(t)
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            w, ejk, ei = om[i].embed(N), wedge(eta[j], eta[k]).embed(N), eta[i].embed(N)
            val = t * t * w + t * t * ejk - t * wedge(ei, dt)
            der = 2 * t * w + 2 * t * ejk - wedge(ei, dt)
            dF = Lx.d(val) + wedge(dt, der)
            worst.append(len(dF))
    return {
        "structure_equations_hold": all(len(x) == 0 for x in se),
        "closed": all(w == 0 for w in worst),
        "t_values": [str(t) for t in ts],
    }


@dataclass
class G2Package:
    phi: KForm
    starphi: KForm
    starphi_display: KForm
    psi: KForm
    orientation: int

    @property
    def matches_display(self) -> bool:
        return self.starphi == self.starphi_display

    def as_dict(self):
        return {
            "phi": self.phi.pretty(),
            "starphi": self.starphi.pretty(),
            "matches_display": self.matches_display,
            "orientation": self.orientation,
            "psi_equals_F_squares": self.psi_check,
            "phi_wedge_starphi_normalized": self.normalization,
        }

    @property
    def psi_check(self) -> bool:
        F = _quaternionic_F(1)
        return _square_sum(F, (1, 1, -1)) == self.psi

    @property
    def normalization(self) -> str:
        half = self.phi * Fraction(1, 2)
        top = wedge(half, hodge_star(half, orientation=self.orientation))
        # coefficient of the oriented volume form
        return str(self.orientation * top[tuple(range(7))])


def g2_package(q=None, orientation: int = -1) -> G2Package:
    """``(phi, *phi, Psi)`` on the 7-frame of a qc-type structure.

    ``*phi`` is computed by the Hodge star with orientation ``-e^{1..7}``, which is
    the orientation reproducing the displayed dual and ``Psi = -*phi - phi ^ dt``.
    """
    om, eta = qc_forms(1, 7)
    e1, e2, e3 = eta
    phi = 2 * wedge(om[0], e1) + 2 * wedge(om[1], e2) - 2 * wedge(om[2], e3) + 2 * wedge(wedge(e1, e2), e3)
    disp = -(wedge(om[0], om[0]) + 2 * wedge(om[0], wedge(e2, e3)) + 2 * wedge(om[1], wedge(e3, e1))
             - 2 * wedge(om[2], wedge(e1, e2)))
    star = hodge_star(phi, orientation=orientation)
    dt = KForm.basis(8, 7)
    psi = -star.embed(8) - wedge(phi.embed(8), dt)
    return G2Package(phi, star, disp, psi, orientation)


def spin7_check(m: CohomOneMetric, samples: int = 20, seed: int = 0) -> Dict[str, float]:
    """``dPsi = 0`` and cocalibration ``d(*phi) = 0`` on slices, at sample values."""
    if m.kind != "spin7":
        raise ValueError(f"{m.name} is not a Spin(7) construction")
    psi = closedness_check(m, "Psi", samples, seed)
    coc = closedness_check(m, "starphi", samples, seed, base=True)
    # Psi = -*phi - phi ^ E^8 in the evolving frame
    x = float(m.random_x(np.random.default_rng(seed), 1)[0])
    E = m.jets(x)
    lhs = substitute(m.forms["Psi"], E).val
    rhs = -substitute(m.forms["starphi"], E).val - wedge(substitute(m.forms["phi"], E).val, E[-1].val)
    return {"dPsi": psi.max_residual, "d_starphi": coc.max_residual, "psi_identity": (lhs - rhs).max_abs()}


# epsilon^i = EPSILON_MAP[i][j] e^j, exact over Q(sqrt 2)
_S = QSqrt2(0, 1)
EPSILON_MAP = [
    [_S, _S, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 0, 0],
    [0, 0, 1, -1, 0, 0, 0],
    [0, 0, 0, 0, _S, 0, 0],
    [0, 0, 0, 0, 0, _S, 0],
    [0, 0, 0, 0, 0, 0, QSqrt2(0, Fraction(1, 2))],
]


def epsilon_basis_check() -> Dict[str, object]:
    """Exact check that the epsilon basis turns the G7 equations into the epsilon-form ones."""
    G7, Ge = get_algebra("G7"), get_algebra("G7_eps")
    eps = [KForm(7, 1, {(j,): c for j, c in enumerate(row) if c != 0}) for row in EPSILON_MAP]
    bad = []
    for i in range(7):
        lhs = G7.d(eps[i])
        rhs = KForm(7, 2)
        for (a, b), c in Ge.de[i].items():
            rhs = rhs + c * wedge(eps[a], eps[b])
        if lhs != rhs:
            bad.append(i + 1)
    return {"exact": True, "mismatched": bad, "passed": not bad}


# -- export ----------------------------------------------------------------------------


def export_json(m: CohomOneMetric, samples: int = 3, seed: int = 0) -> str:
    rng = np.random.default_rng(seed)
    pts = []
    if m.chart is not None:
        for _ in range(samples):
            v = m.random_point(rng)
            pts.append({"point": [float(x) for x in v], "g": m.coord_metric(v).tolist()})
    doc = {
        "schema": "qcgeom.metric/1",
        "name": m.name,
        "description": m.description,
        "params": m.params,
        "base": m.base.name,
        "chart": m.chart,
        "variable": m.variable,
        "signature": list(m.signature),
        "frame": m.expressions,
        "forms": {k: v.pretty() for k, v in m.forms.items()},
        "samples": pts,
        "seed": seed,
    }
    return json.dumps(doc, indent=2, sort_keys=True)
