"""Levi-Civita curvature of coordinate metrics by numerical differentiation.

First derivatives of ``g`` are taken by complex step, so Christoffel symbols are
accurate to rounding.  Their derivatives use 4th-order central differences with
one Richardson level.  Curvature is reported in an orthonormal frame: the
metric's own coframe when it has one, otherwise a Gram-Schmidt frame.

Index conventions: ``R(X, Y)Z = [nabla_X, nabla_Y]Z - nabla_[X,Y] Z``,
``R^a_{bcd} dx_a = R(d_c, d_d) d_b`` and ``R_{abcd} = g(R(e_c, e_d) e_b, e_a)``;
``Ric_{bd} = R^a_{bad}``.  A round sphere has ``R_{1212} > 0``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "CoordMetric",
    "SingularMetricError",
    "Christoffel",
    "christoffel_fd",
    "CurvatureSample",
    "riemann_ricci_fd",
    "curvature_samples",
    "gram_schmidt",
    "EinsteinFit",
    "einstein_fit",
    "ricci_flat_check",
    "HolonomyReport",
    "holonomy_estimate",
    "annihilation",
    "dense_form",
    "thread_count",
]


class SingularMetricError(ValueError):
    pass


@dataclass
class CoordMetric:
    """A metric ``g_ij(v)`` on a coordinate patch.

    ``metric(v)`` and the optional ``coframe(v)`` accept arrays of points with the
    coordinate index last and must tolerate complex input.
    """

    name: str
    dim: int
    signature: Tuple[int, ...]
    metric: Callable
    sampler: Optional[Callable] = None  # rng -> point
    coframe: Optional[Callable] = None  # v -> (.., N, N) rows E^i
    params: Dict[str, object] = field(default_factory=dict)
    coords: Tuple[str, ...] = ()
    forms: Dict[str, object] = field(default_factory=dict)

    def g(self, v) -> np.ndarray:
        return self.metric(np.asarray(v))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        if self.sampler is None:
            raise ValueError(f"{self.name} has no sampler")
        return np.asarray(self.sampler(rng), dtype=float)

    @classmethod
    def from_cohom(cls, m) -> "CoordMetric":
        chart = m.chart_obj
        return cls(
            m.name,
            m.dim,
            tuple(m.signature),
            m.coord_metric,
            m.random_point,
            m.coord_coframe,
            dict(m.params),
            tuple(chart.coords) + (m.variable,),
            dict(m.forms),
        )

    @classmethod
    def euclidean(cls, n: int) -> "CoordMetric":
        def metric(v):
            v = np.asarray(v)
            return np.broadcast_to(np.eye(n), v.shape[:-1] + (n, n)) + 0 * v[..., :1, None]

        return cls(f"euclidean{n}", n, (1,) * n, metric, lambda rng: rng.normal(size=n))

    @classmethod
    def from_function(cls, name: str, fn: Callable, signature: Sequence[int], sampler=None) -> "CoordMetric":
        """Wrap a pointwise ``fn(v) -> (N, N)``; vectorized by looping."""
        N = len(signature)

        def metric(v):
            v = np.asarray(v)
            flat = v.reshape(-1, N)
            out = np.array([np.asarray(fn(p)) for p in flat])
            return out.reshape(v.shape[:-1] + (N, N))

        return cls(name, N, tuple(signature), metric, sampler)


# -- Christoffel symbols -----------------------------------------------------------------

_CSTEP = 1e-20


def _metric_and_grad(m: CoordMetric, V: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """``g`` and ``dg[..., a, b, c] = d_a g_bc`` at points ``V`` of shape (K, N)."""
    K, N = V.shape
    scale = np.maximum(1.0, np.abs(V))
    h = _CSTEP * scale
    P = np.repeat(V[:, None, :].astype(complex), N, axis=1)
    idx = np.arange(N)
    P[:, idx, idx] += 1j * h
    G = m.g(P)
    dg = G.imag / h[:, :, None, None]
    g = G[:, 0].real
    return g, dg


def _christoffel_batch(m: CoordMetric, V: np.ndarray, cond_max: float = 1e12):
    g, dg = _metric_and_grad(m, V)
    if not np.all(np.isfinite(g)) or np.any(np.linalg.cond(g) > cond_max):
        raise SingularMetricError(f"{m.name}: near-degenerate metric at a sampled point")
    ginv = np.linalg.inv(g)
    T = dg + np.swapaxes(dg, 1, 2) - np.transpose(dg, (0, 2, 3, 1))  # T[i,j,l]
    Gam = 0.5 * np.einsum("xkl,xijl->xkij", ginv, T)
    return g, dg, Gam


@dataclass
class Christoffel:
    point: np.ndarray
    gamma: np.ndarray  # gamma[k, i, j] = Gamma^k_ij
    g: np.ndarray
    nabla_g: float
    symmetry: float


def christoffel_fd(m: CoordMetric, v) -> Christoffel:
    v = np.asarray(v, dtype=float)
    g, dg, Gam = _christoffel_batch(m, v[None, :])
    g, dg, Gam = g[0], dg[0], Gam[0]
    # nabla_k g_ij = d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il
    ng = dg - np.einsum("lki,lj->kij", Gam, g) - np.einsum("lkj,il->kij", Gam, g)
    sc = max(1.0, float(np.max(np.abs(dg))))
    return Christoffel(v, Gam, g, float(np.max(np.abs(ng))) / sc,
                       float(np.max(np.abs(Gam - np.swapaxes(Gam, 1, 2)))))


# -- orthonormal frames ---------------------------------------------------------------------


def gram_schmidt(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Columns ``X_i`` with ``g(X_i, X_j) = s_i delta_ij``; pivots on ``|g(v, v)|``."""
    N = g.shape[0]
    rest = [np.eye(N)[:, i] for i in range(N)]
    basis, signs = [], []
    while rest:
        # subtract components along the accepted vectors
        proj = []
        for w in rest:
            for b, s in zip(basis, signs):
                w = w - s * (b @ g @ w) * b
            proj.append(w)
        norms = [abs(w @ g @ w) for w in proj]
        k = int(np.argmax(norms))
        if norms[k] <= 1e-14 * max(1.0, np.max(np.abs(g))):
            # all remaining are null; combine with another to get a non-null vector
            found = False
            for j in range(len(proj)):
                if j != k:
                    w = proj[k] + proj[j]
                    if abs(w @ g @ w) > 1e-10:
                        proj[k], found = w, True
                        break
            if not found:
                raise SingularMetricError("Gram-Schmidt met a degenerate subspace")
        w = proj[k]
        q = float(w @ g @ w)
        s = 1 if q > 0 else -1
        basis.append(w / np.sqrt(abs(q)))
        signs.append(s)
        rest = [p for i, p in enumerate(proj) if i != k]
    return np.array(basis).T, np.array(signs)


# -- curvature ------------------------------------------------------------------------------


@dataclass
class CurvatureSample:
    point: np.ndarray
    coframe: np.ndarray  # rows E^i in coordinates
    signs: np.ndarray
    riemann: np.ndarray  # R_{ijkl} in the orthonormal frame
    ricci: np.ndarray  # Ric_{jl} in the orthonormal frame
    scalar: float
    riemann_coord: np.ndarray  # R^a_{bcd}
    ricci_coord: np.ndarray
    g: np.ndarray
    residuals: Dict[str, float]

    @property
    def max_ricci(self) -> float:
        return float(np.max(np.abs(self.ricci)))

    @property
    def max_riemann(self) -> float:
        return float(np.max(np.abs(self.riemann)))

    def curvature_operator(self, a: int, b: int) -> np.ndarray:
        """``R(X_a, X_b)`` as a matrix acting on frame components: ``M[i, j] = R^i_{jab}``."""
        return self.signs[:, None] * self.riemann[:, :, a, b]

    def curvature_form(self, i: int, j: int) -> Dict[Tuple[int, int], float]:
        """Coefficients of ``Omega^i_j = sum_{k<l} R^i_{jkl} E^{kl}`` (zero-based)."""
        N = len(self.signs)
        return {(k, l): float(self.signs[i] * self.riemann[i, j, k, l])
                for k in range(N) for l in range(k + 1, N)}

    def as_dict(self):
        return {
            "point": [float(x) for x in self.point],
            "max_ricci": self.max_ricci,
            "max_riemann": self.max_riemann,
            "scalar": float(self.scalar),
            "residuals": self.residuals,
        }


def riemann_ricci_fd(m: CoordMetric, v, rel_step: float = 1e-3, richardson: bool = True,
                     frame: str = "auto") -> CurvatureSample:
    """Curvature at ``v``; ``frame`` is "auto" (own coframe if any) or "gram_schmidt"."""
    v = np.asarray(v, dtype=float)
    N = m.dim
    d = rel_step * np.maximum(1.0, np.abs(v))
    offs = [2, 1, -1, -2]
    pts = [v]
    for mu in range(N):
        for lvl in (1.0, 0.5):
            for o in offs:
                p = v.copy()
                p[mu] += o * lvl * d[mu]
                pts.append(p)
    g_all, dg_all, G_all = _christoffel_batch(m, np.array(pts))
    g, dg, Gam = g_all[0], dg_all[0], G_all[0]
    G = G_all[1:].reshape(N, 2, 4, N, N, N)

    def cdiff(Gs, h):
        return (-Gs[0] + 8 * Gs[1] - 8 * Gs[2] + Gs[3]) / (12 * h)

    dG = np.zeros((N, N, N, N))
    err = 0.0
    for mu in range(N):
        D1 = cdiff(G[mu, 0], d[mu])
        D2 = cdiff(G[mu, 1], d[mu] / 2)
        dG[mu] = D2 + (D2 - D1) / 15 if richardson else D1
        err = max(err, float(np.max(np.abs(D2 - D1))) / 15)
    # R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
    R = (np.einsum("cadb->abcd", dG) - np.einsum("dacb->abcd", dG)
         + np.einsum("ace,edb->abcd", Gam, Gam) - np.einsum("ade,ecb->abcd", Gam, Gam))
    Ric_c = np.einsum("abad->bd", R)
    Rlow = np.einsum("ae,ebcd->abcd", g, R)

    if frame == "auto" and m.coframe is not None:
        E = np.asarray(m.coframe(v)).real
        X = np.linalg.inv(E)
        signs = np.array(m.signature, dtype=float)
        chk = X.T @ g @ X
        if np.max(np.abs(chk - np.diag(signs))) > 1e-8 * max(1.0, np.max(np.abs(g))):
            raise ValueError(f"{m.name}: supplied coframe is not orthonormal for the metric")
    else:
        X, signs = gram_schmidt(g)
        signs = signs.astype(float)
        E = np.linalg.inv(X)
    Ron = np.einsum("abcd,ai,bj,ck,dl->ijkl", Rlow, X, X, X, X)
    Ric = np.einsum("i,ijil->jl", signs, Ron)
    scal = float(np.einsum("j,jj->", signs, Ric))
    sc = max(1.0, float(np.max(np.abs(Ron))))
    res = {
        "antisym_12": float(np.max(np.abs(Ron + np.swapaxes(Ron, 0, 1)))) / sc,
        "antisym_34": float(np.max(np.abs(Ron + np.swapaxes(Ron, 2, 3)))) / sc,
        "pair": float(np.max(np.abs(Ron - np.transpose(Ron, (2, 3, 0, 1))))) / sc,
        "bianchi": float(np.max(np.abs(Ron + np.transpose(Ron, (0, 2, 3, 1)) + np.transpose(Ron, (0, 3, 1, 2))))) / sc,
        "ricci_symmetry": float(np.max(np.abs(Ric - Ric.T))) / sc,
        "fd_error": err,
    }
    return CurvatureSample(v, E, signs, Ron, Ric, scal, R, Ric_c, g, res)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QCH_THREADS", "1")))
    except ValueError:
        return 1


def curvature_samples(m: CoordMetric, samples: int = 20, seed: int = 0, points=None,
                      **kw) -> List[CurvatureSample]:
    """Curvature at ``samples`` random points (or the given ``points``), in order."""
    if points is None:
        rng = np.random.default_rng(seed)
        points = [m.sample(rng) for _ in range(samples)]
    fn = lambda p: riemann_ricci_fd(m, p, **kw)
    n = thread_count()
    if n > 1:
        with ThreadPoolExecutor(n) as ex:
            return list(ex.map(fn, points))
    return [fn(p) for p in points]


# -- Einstein / Ricci-flat ---------------------------------------------------------------------


@dataclass
class EinsteinFit:
    metric: str
    lam: float
    residual: float
    per_sample: List[float]
    max_ricci: float
    n_samples: int
    seed: Optional[int]
    symmetry: float

    def as_dict(self):
        return {
            "metric": self.metric,
            "lambda": self.lam,
            "residual": self.residual,
            "max_ricci": self.max_ricci,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "max_symmetry_residual": self.symmetry,
        }


def einstein_fit(m: CoordMetric, samples: int = 20, seed: int = 0,
                 curv: Optional[List[CurvatureSample]] = None) -> EinsteinFit:
    """Least-squares ``lambda`` with ``Ric ~ lambda g`` pooled over samples.

    The residual is ``max |Ric - lambda g| / max(|Ric|, 1)`` (Frobenius norms in
    the orthonormal frame), so it is relative for curved metrics and absolute
    near Ricci-flat ones.
    """
    if curv is None:
        if samples < 5:
            raise ValueError("einstein_fit needs at least 5 samples")
        curv = curvature_samples(m, samples, seed)
    num = sum(float(np.sum(c.ricci * np.diag(c.signs))) for c in curv)
    den = sum(float(np.sum(np.diag(c.signs) ** 2)) for c in curv)
    lam = num / den
    per = []
    for c in curv:
        r = np.linalg.norm(c.ricci - lam * np.diag(c.signs))
        per.append(float(r / max(np.linalg.norm(c.ricci), 1.0)))
    sym = max(max(c.residuals[k] for k in ("antisym_12", "antisym_34", "pair", "bianchi")) for c in curv)
    return EinsteinFit(m.name, lam, max(per), per, max(c.max_ricci for c in curv), len(curv), seed, sym)


def ricci_flat_check(m: CoordMetric, samples: int = 20, seed: int = 0,
                     curv: Optional[List[CurvatureSample]] = None) -> Dict[str, object]:
    if curv is None:
        curv = curvature_samples(m, samples, seed)
    return {
        "metric": m.name,
        "max_ricci": max(c.max_ricci for c in curv),
        "max_riemann": max(c.max_riemann for c in curv),
        "n_samples": len(curv),
        "seed": seed,
        "max_symmetry_residual": max(max(c.residuals[k] for k in ("antisym_12", "antisym_34", "pair", "bianchi"))
                                     for c in curv),
    }


# -- holonomy -----------------------------------------------------------------------------------


def dense_form(form) -> np.ndarray:
    """Antisymmetric dense array of a ``KForm``."""
    from itertools import permutations

    from .exterior import perm_sign

    k, N = form.degree, form.dim
    out = np.zeros((N,) * k)
    for idx, c in form.items():
        for p in permutations(range(k)):
            out[tuple(idx[i] for i in p)] = perm_sign(p) * float(c)
    return out


def annihilation(A: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Derivation action ``(A.T)(X_1..X_k) = -sum_i T(.., A X_i, ..)`` with ``A[i, j]`` acting on vectors."""
    k = T.ndim
    out = np.zeros_like(T)
    for slot in range(k):
        # T(..., A X, ...) : contract slot index of T with A[:, x]
        moved = np.tensordot(T, A, axes=([slot], [0]))  # slot index now last
        out -= np.moveaxis(moved, -1, slot)
    return out


def _rank(M: np.ndarray, tol: float) -> Tuple[int, np.ndarray, float]:
    """Rank of the row space of ``M``; returns rank, orthonormal basis rows, and the gap ratio."""
    if M.shape[0] == 0:
        return 0, M, float("inf")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0:
        return 0, Vt[:0], float("inf")
    rel = s / s[0]
    r = int(np.sum(rel > tol))
    gap = float("inf") if r >= len(s) else float(rel[r - 1] / max(rel[r], 1e-300)) if r > 0 else float("inf")
    return r, Vt[:r], gap


@dataclass
class HolonomyReport:
    metric: str
    span_rank: int
    closure_dim: int
    closure_rounds: int
    span_gap: float
    closure_gap: float
    unstable: bool
    n_points: int
    annihilation: Dict[str, float]
    generators: np.ndarray = field(repr=False, default=None)

    def as_dict(self):
        return {
            "metric": self.metric,
            "span_rank": self.span_rank,
            "closure_dim": self.closure_dim,
            "closure_rounds": self.closure_rounds,
            "span_gap": self.span_gap,
            "closure_gap": self.closure_gap,
            "rank_unstable": self.unstable,
            "n_points": self.n_points,
            "annihilation": self.annihilation,
            "surrogate": "curvature span at sample points closed under brackets; a lower bound, not a proof",
        }


def holonomy_estimate(m: CoordMetric, samples: int = 4, seed: int = 0, forms: Optional[Dict[str, object]] = None,
                      tol: float = 1e-7, gap_min: float = 1e3, stable_rounds: int = 3,
                      curv: Optional[List[CurvatureSample]] = None) -> HolonomyReport:
    """Span rank of the curvature operators and its bracket closure.

    Operators are ``R(X_a, X_b)`` in the orthonormal frame, flattened as matrices.
    ``forms`` maps names to ``KForm``s in that frame; every generator's action on
    them is reported (relative to the form size).
    """
    if curv is None:
        curv = curvature_samples(m, max(samples, 3), seed)
    N = m.dim
    ops = []
    for c in curv:
        for a in range(N):
            for b in range(a + 1, N):
                ops.append(c.curvature_operator(a, b).ravel())
    M = np.array(ops)
    if np.max(np.abs(M)) < 1e-8:
        r, basis, gap = 0, M[:0], float("inf")
    else:
        r, basis, gap = _rank(M, tol)
    span_rank = r
    dims = [r]
    cgap = gap
    rounds = 0
    while r > 0:
        mats = basis.reshape(-1, N, N)
        br = [(mats[i] @ mats[j] - mats[j] @ mats[i]).ravel() for i in range(len(mats)) for j in range(i + 1, len(mats))]
        stacked = np.vstack([basis] + ([np.array(br)] if br else []))
        r, basis, cgap = _rank(stacked, tol * 10)
        rounds += 1
        dims.append(r)
        if len(dims) > stable_rounds and len(set(dims[-stable_rounds:])) == 1:
            break
        if rounds > 20:
            break
    ann = {}
    for name, f in (forms or {}).items():
        T = dense_form(f)
        scale = max(1.0, float(np.max(np.abs(T))))
        worst = 0.0
        for A in basis.reshape(-1, N, N):
            worst = max(worst, float(np.max(np.abs(annihilation(A, T)))) / scale)
        ann[name] = worst
    unstable = (span_rank > 0 and gap < gap_min) or (r > 0 and cgap < gap_min)
    return HolonomyReport(m.name, span_rank, r, rounds, gap, cgap, bool(unstable), len(curv), ann, basis)
