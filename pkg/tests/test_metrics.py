import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcgeom import metrics as M
from qcgeom.evolution import DomainError
from qcgeom.lie import get_algebra, jacobi_check


# -- frame coefficients ----------------------------------------------------------------


@pytest.mark.parametrize("t", [-0.8, 0.0, 0.4])
def test_qk_heisenberg_frame(t):
    a = 0.7
    m = M.build("qk_heisenberg", a=a)
    A, lap = m.frame_fn(t, m.params)
    assert np.allclose(A[:4], np.exp(a * t / 2))
    assert np.allclose(A[4:], a / 2 * np.exp(a * t))
    assert lap == 1.0


@pytest.mark.parametrize("u", [0.6, 1.0, 1.9])
def test_qk_new_G1_frame(u):
    a = 2.0
    m = M.build("qk_new_G1", a=a)
    A, lap = m.frame_fn(u, m.params)
    assert np.allclose(A[:4] ** 2, u)
    assert np.allclose(A[4:] ** 2, (a * u * u - u) / 4)
    assert np.isclose(lap ** 2, 1 / (a * u * u - u))


def test_qk_new_G1_domain():
    m = M.build("qk_new_G1", a=2.0)
    with pytest.raises(DomainError):
        m.frame(0.4)  # a u^2 - u < 0


def test_hk8_flat_coordinate_metric():
    m = M.build("hk8_G7_flat")
    rng = np.random.default_rng(3)
    for _ in range(5):
        v = m.random_point(rng)
        want = np.eye(8)
        want[0, 0] = v[7] ** 2
        assert np.allclose(m.coord_metric(v), want, atol=1e-12)


def test_coord_metric_symmetric_and_positive():
    rng = np.random.default_rng(0)
    for name in ["qk_heisenberg", "qk_new_G1", "spin7_G1", "hk4_eguchi_hanson"]:
        m = M.build(name)
        g = m.coord_metric(m.random_point(rng))
        assert np.allclose(g, g.T)
        assert np.all(np.linalg.eigvalsh(g) > 0)


def test_neutral_signature():
    m = M.build("hpk4_su2")
    g = m.coord_metric(m.random_point(np.random.default_rng(0)))
    ev = np.linalg.eigvalsh(g)
    assert (ev > 0).sum() == 2 and (ev < 0).sum() == 2


def test_build_errors():
    with pytest.raises(KeyError):
        M.build("no_such_metric")
    with pytest.raises(TypeError):
        M.build("qk_heisenberg", bogus=1.0)
    with pytest.raises(DomainError):
        M.build("spin7_G1", a=-1.0)


def test_aliases():
    assert M.build("appendix1").name == "qk_new_G1"
    assert M.build("appendix2").name == "spin7_G1"
    names = dict(M.list_metrics())
    assert "hk8_G7" in names and "hpk4_e11" in names


# -- closedness ------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["qk_heisenberg", "qk_new_G1", "qk_nonQK_family"])
def test_fundamental_four_form_closed(name):
    r = M.closedness_check(M.build(name), "Phi", samples=10, seed=1)
    assert r.max_residual <= 1e-8


@pytest.mark.parametrize("name", ["spin7_heisenberg", "spin7_G1", "spin7_heisenberg_general"])
def test_spin7_form_closed(name):
    m = M.build(name)
    r = M.closedness_check(m, "Psi", samples=10, seed=2)
    assert r.max_residual <= 1e-8
    s = M.spin7_check(m, samples=5)
    assert s["dPsi"] <= 1e-8 and s["d_starphi"] <= 1e-8 and s["psi_identity"] <= 1e-12


def test_spin7_check_rejects_other_kinds():
    with pytest.raises(ValueError):
        M.spin7_check(M.build("qk_heisenberg"))


@pytest.mark.parametrize("name", [k for k, _ in M.list_metrics() if k.startswith(("hk4", "hpk4"))])
def test_four_dim_triples_closed(name):
    m = M.build(name)
    for f in m.forms:
        assert M.closedness_check(m, f, samples=8, seed=0).max_residual <= 1e-8, f


@pytest.mark.parametrize("name", ["hk8_G7", "hk8_G7_flat"])
def test_hk8_closed_exactly(name):
    m = M.build(name)
    for f in ("F1", "F2", "F3"):
        r = M.closedness_check(m, f, samples=5, seed=0, exact=True)
        assert r.exact and r.samples and r.max_residual == 0.0


def test_exact_frame_missing():
    with pytest.raises(ValueError):
        M.closedness_check(M.build("qk_heisenberg"), "Phi", samples=2, exact=True)


def test_single_F_not_closed_on_qk():
    # only the sum of squares is closed; the individual 2-forms are not
    r = M.closedness_check(M.build("qk_heisenberg"), "F1", samples=3)
    assert r.max_residual > 1e-3


def test_coordinate_closedness_agrees():
    rng = np.random.default_rng(5)
    for name, form in [("qk_heisenberg", "Phi"), ("hk4_eguchi_hanson", "F1"), ("hk8_G7_flat", "F2")]:
        m = M.build(name)
        v = m.random_point(rng)
        assert M.coordinate_closedness(m, form, v) <= 1e-8, name
    m = M.build("qk_heisenberg")
    assert M.coordinate_closedness(m, "F1", m.random_point(rng)) > 1e-3


@settings(max_examples=15)
@given(st.floats(0.2, 3.0))
def test_qk_heisenberg_closed_any_a(a):
    r = M.closedness_check(M.build("qk_heisenberg", a=a), "Phi", samples=3, seed=0)
    assert r.max_residual <= 1e-8 * max(1.0, np.exp(2 * a) * a ** 2)


# -- hypo structures and exact identities ----------------------------------------------


@pytest.mark.parametrize("name", ["heisenberg7", "heisenberg11", "L1", "G7"])
def test_hypo_structures(name):
    r = M.hypo_check(name)
    assert r.passed, r.residuals


def test_two_form_triple_not_closed_on_heisenberg():
    # d eta = 2 omega makes d(eta_j ^ eta_k) nonzero; only the 4-form survives
    r = M.hypo_check("heisenberg7", kind="hk")
    assert not r.passed
    assert M.hypo_check("heisenberg7", kind="qk").passed


def test_hypo_unknown_kind():
    with pytest.raises(ValueError):
        M.hypo_check("heisenberg7", kind="spin")


@pytest.mark.parametrize("n", [1, 2])
def test_restriction_identity(n):
    assert M.restriction_identity(n)


def test_three_sasaki_cone():
    r = M.three_sasaki_cone_check()
    assert r["structure_equations_hold"] and r["closed"]


def test_g2_package():
    p = M.g2_package()
    assert p.matches_display
    assert p.psi_check
    assert p.normalization == "7"
    assert not M.g2_package(orientation=1).matches_display


def test_epsilon_basis():
    r = M.epsilon_basis_check()
    assert r["passed"] and r["mismatched"] == []
    assert jacobi_check(get_algebra("G7_eps")).passed


# -- export ----------------------------------------------------------------------------


def test_export_json():
    m = M.build("qk_new_G1", a=2.0)
    doc = json.loads(M.export_json(m, samples=2, seed=4))
    assert doc["schema"] == "qcgeom.metric/1"
    assert doc["name"] == "qk_new_G1" and doc["params"] == {"a": 2.0}
    assert len(doc["samples"]) == 2
    g = np.array(doc["samples"][0]["g"])
    assert np.allclose(g, m.coord_metric(np.array(doc["samples"][0]["point"])))
    assert M.export_json(m, samples=2, seed=4) == M.export_json(m, samples=2, seed=4)
