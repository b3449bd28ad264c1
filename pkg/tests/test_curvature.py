import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcgeom import curvature as C
from qcgeom import metrics as M


def _sphere():
    return C.CoordMetric.from_function(
        "s2", lambda v: np.array([[1, 0], [0, np.sin(v[0]) ** 2]]), (1, 1),
        lambda r: np.array([r.uniform(0.5, 2.5), r.uniform(0, 6)]))


def _hyperbolic(n):
    # upper half space, Ric = -(n - 1) g
    def g(v):
        return np.eye(n) / v[-1] ** 2

    def sample(r):
        return np.concatenate([r.normal(size=n - 1), [r.uniform(0.5, 2.0)]])

    return C.CoordMetric.from_function(f"h{n}", g, (1,) * n, sample)


# -- Christoffel symbols ------------------------------------------------------------------


def test_euclidean_christoffel_zero():
    c = C.christoffel_fd(C.CoordMetric.euclidean(4), np.array([0.3, -1.0, 2.0, 0.5]))
    assert np.max(np.abs(c.gamma)) == 0.0
    assert c.nabla_g == 0.0


def test_sphere_christoffel():
    th = 1.1
    c = C.christoffel_fd(_sphere(), np.array([th, 0.4]))
    assert np.isclose(c.gamma[0, 1, 1], -np.sin(th) * np.cos(th), atol=1e-14)
    assert np.isclose(c.gamma[1, 0, 1], np.cos(th) / np.sin(th), atol=1e-14)
    assert c.symmetry == 0.0 and c.nabla_g < 1e-14


def test_flat_hk8_christoffel():
    # g = u^2 (dx^1)^2 + ..., so Gamma^u_{x1 x1} = -u and Gamma^{x1}_{x1 u} = 1/u
    u = 1.5
    v = np.array([0.3, 0.1, -0.2, 0.5, 0.7, 0.2, 0.4, u])
    c = C.christoffel_fd(M.build("hk8_G7_flat").to_coord_metric(), v)
    assert np.isclose(c.gamma[7, 0, 0], -u)
    assert np.isclose(c.gamma[0, 0, 7], 1 / u)


# -- Riemann and Ricci --------------------------------------------------------------------


def test_sphere_curvature():
    c = C.riemann_ricci_fd(_sphere(), np.array([1.1, 0.3]))
    assert np.allclose(c.ricci, np.eye(2), atol=1e-10)
    assert np.isclose(c.scalar, 2.0, atol=1e-10)
    assert abs(abs(c.riemann[0, 1, 0, 1]) - 1) < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hyperbolic_einstein(n):
    fit = C.einstein_fit(_hyperbolic(n), samples=5, seed=1)
    assert abs(fit.lam + (n - 1)) <= 1e-8
    assert fit.residual <= 1e-8


def test_symmetry_residuals_small():
    c = C.riemann_ricci_fd(_hyperbolic(4), np.array([0.2, -0.4, 0.1, 1.3]))
    for k in ("antisym_12", "antisym_34", "pair", "bianchi", "ricci_symmetry"):
        assert c.residuals[k] <= 1e-10, k


def test_fourth_order_step_halving():
    v = np.array([1.1, 0.3])
    errs = [np.max(np.abs(C.riemann_ricci_fd(_sphere(), v, rel_step=h, richardson=False).ricci - np.eye(2)))
            for h in (1e-2, 5e-3)]
    assert errs[0] / errs[1] >= 8
    rich = C.riemann_ricci_fd(_sphere(), v).ricci
    assert np.max(np.abs(rich - np.eye(2))) < errs[1]


def test_gram_schmidt_frame_agrees_with_coframe():
    m = M.build("qk_heisenberg").to_coord_metric()
    v = m.sample(np.random.default_rng(2))
    a = C.riemann_ricci_fd(m, v)
    b = C.riemann_ricci_fd(m, v, frame="gram_schmidt")
    assert np.isclose(a.scalar, b.scalar, rtol=1e-8)


@pytest.mark.parametrize("sig", [(1, 1, -1, -1), (1, -1, 1, -1), (-1, 1, 1, 1)])
def test_gram_schmidt_neutral(sig):
    rng = np.random.default_rng(0)
    P = rng.normal(size=(4, 4))
    g = P.T @ np.diag(sig) @ P
    X, s = C.gram_schmidt(g)
    assert np.allclose(X.T @ g @ X, np.diag(s), atol=1e-10)
    assert sorted(s) == sorted(sig)


def test_gram_schmidt_null_diagonal():
    # both basis vectors are null; the pivot must combine them
    g = np.array([[0.0, 1.0], [1.0, 0.0]])
    X, s = C.gram_schmidt(g)
    assert np.allclose(X.T @ g @ X, np.diag(s))
    assert sorted(s) == [-1, 1]


def test_gram_schmidt_degenerate():
    with pytest.raises(C.SingularMetricError):
        C.gram_schmidt(np.zeros((3, 3)))


def test_singular_metric_rejected():
    m = C.CoordMetric.from_function("deg", lambda v: np.diag([1.0, 0.0 * v[0]]), (1, 1))
    with pytest.raises(C.SingularMetricError):
        C.christoffel_fd(m, np.array([0.5, 0.5]))


@settings(max_examples=10)
@given(st.floats(0.3, 2.8), st.floats(0.2, 3.0))
def test_scaled_sphere_scalar(th, r):
    m = C.CoordMetric.from_function(
        "s2r", lambda v: r * r * np.array([[1, 0], [0, np.sin(v[0]) ** 2]]), (1, 1))
    c = C.riemann_ricci_fd(m, np.array([th, 0.0]))
    assert np.isclose(c.scalar, 2 / r ** 2, rtol=1e-7)


# -- metrics from the registry --------------------------------------------------------------


def test_einstein_qk_new_G1():
    a = 1.5
    fit = C.einstein_fit(M.build("qk_new_G1", a=a).to_coord_metric(), samples=6, seed=0)
    assert abs(fit.lam + 4 * a) <= 1e-5 * 4 * a
    assert fit.residual <= 1e-5


def test_nonqk_not_einstein():
    fit = C.einstein_fit(M.build("qk_nonQK_family").to_coord_metric(), samples=6, seed=0)
    assert fit.residual >= 1e-3


def test_einstein_fit_needs_samples():
    with pytest.raises(ValueError):
        C.einstein_fit(_sphere(), samples=2)


@pytest.mark.parametrize("name", [k for k, _ in M.list_metrics() if k.startswith(("hk4", "hpk4"))])
def test_four_dim_ricci_flat(name):
    r = C.ricci_flat_check(M.build(name).to_coord_metric(), samples=4, seed=0)
    assert r["max_ricci"] <= 1e-6


@pytest.mark.parametrize("name", ["hk8_G7", "hk8_G7_flat"])
def test_hk8_flat(name):
    r = C.ricci_flat_check(M.build(name).to_coord_metric(), samples=4, seed=0)
    assert r["max_riemann"] <= 1e-6


def test_curvature_samples_deterministic():
    m = M.build("hk4_eguchi_hanson").to_coord_metric()
    a = C.curvature_samples(m, samples=2, seed=9)
    b = C.curvature_samples(m, samples=2, seed=9)
    assert all(np.array_equal(x.riemann, y.riemann) for x, y in zip(a, b))


# -- holonomy -------------------------------------------------------------------------------


def test_holonomy_eguchi_hanson():
    m = M.build("hk4_eguchi_hanson")
    h = C.holonomy_estimate(m.to_coord_metric(), forms=m.forms)
    assert h.span_rank == 3 and h.closure_dim == 3 and not h.unstable
    assert max(h.annihilation.values()) <= 1e-8


def test_holonomy_qk_new_G1():
    m = M.build("qk_new_G1")
    h = C.holonomy_estimate(m.to_coord_metric(), forms={"Phi": m.forms["Phi"], "F1": m.forms["F1"]})
    assert h.closure_dim <= 13
    assert h.annihilation["Phi"] <= 1e-8
    assert h.annihilation["F1"] > 1e-2


def test_holonomy_flat():
    h = C.holonomy_estimate(M.build("hk8_G7_flat").to_coord_metric())
    assert h.span_rank == 0 and h.closure_dim == 0


def test_annihilation_derivation():
    # so(2) rotation kills the area form but not a symmetric bilinear form
    A = np.array([[0.0, -1.0], [1.0, 0.0]])
    area = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.allclose(C.annihilation(A, area), 0)
    assert not np.allclose(C.annihilation(A, np.diag([1.0, 2.0])), 0)
