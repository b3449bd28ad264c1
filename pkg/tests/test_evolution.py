import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcgeom.evolution import (FAMILIES, SYSTEMS, DomainError, bgpp_residual, convergence_order, family_eval,
                              family_residuals, get_family, get_system, ideal_residual, ideal_system_printed,
                              integrate, oracle_compare, residual, rk4_fixed)



@pytest.mark.parametrize("fam", sorted(FAMILIES))
def test_family_solves_its_system(fam):
    r = family_residuals(fam, n=100)
    assert r["max_residual"] <= 1e-10, r


@pytest.mark.parametrize("fam", sorted(k for k, f in FAMILIES.items() if f.extra_systems))
def test_family_solves_dual_systems(fam):
    for s in FAMILIES[fam].extra_systems:
        assert family_residuals(fam, n=50, system=s)["max_residual"] <= 1e-10


def test_residual_examples():
    pt = family_eval("eguchi_hanson", 2.0, a=1.0)
    assert residual("HK4_SU2", pt.state, pt.dstate_dt) <= 1e-12
    assert residual("HK4_SU2", [0, 1, 1, 1], [0, 0, 0, 0]) == 0
    for u in (0.3, 1.0, 7.0):
        pt = family_eval("qk_iso", u, tau=1.0, a=1.0)
        assert residual(get_system("QK_ISO", 1.0), pt.state, pt.dstate_dt) <= 1e-12


def test_general_su2_reduces_to_eguchi_hanson():
    a = 1.0
    for t in (1.2, 2.0, 5.0):
        gen = family_eval("su2_general", (t / 2) ** 4, a1=a / 16, a2=a / 16, a3=0.0).state
        eh = family_eval("eguchi_hanson", t, a=a).state
        assert np.allclose(gen[1:], eh[1:], rtol=1e-13)


def test_heisenberg_particular_member():
    lam = 1.5 ** (1 / 3)
    for r in (0.1, 1.0, 10.0):
        f, f1, f2, f3 = family_eval("heis_general", r, a=1.0, b=1.0, c=0.0).state
        assert np.isclose(f1, lam * r ** (1 / 3)) and np.isclose(f2, f1) and np.isclose(f3, 1 / f1)


def test_domain_violation():
    with pytest.raises(DomainError):
        family_eval("su2_general", 1.5)  # below max a_i = 2
    with pytest.raises(DomainError):
        family_eval("spin7_red", 0.5, tau=1.0, a=1.0)


@settings(max_examples=30)
@given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(0.1, 3))
def test_su2_general_any_parameters(a1, g1, g2):
    p = dict(a1=a1, a2=a1 + g1, a3=a1 + g1 + g2)
    assert family_residuals("su2_general", n=10, **p)["max_residual"] <= 1e-10


@settings(max_examples=30)
@given(st.floats(-2, 2), st.floats(0.2, 3))
def test_qk_iso_any_parameters(tau, a):
    assert family_residuals("qk_iso", n=10, tau=tau, a=a)["max_residual"] <= 1e-10


@pytest.mark.parametrize("fam", ["su2_general", "eguchi_hanson", "bgpp_triaxial"])
def test_bgpp_equivalence(fam):
    f = get_family(fam)
    p = f.params()
    for x in f.samples(p, 20):
        pt = family_eval(f, x)
        assert bgpp_residual(pt.state, pt.dstate_dt) <= 1e-10
        assert residual("HK4_SU2", pt.state, pt.dstate_dt) <= 1e-10
        bumped = pt.dstate_dt + np.array([0, 1e-3, 0, 0])
        assert bgpp_residual(pt.state, bumped) > 1e-5
        assert residual("HK4_SU2", pt.state, bumped) > 1e-5


@pytest.mark.parametrize("para, base, perm, neg", [
    ("HPK4_SU2", "HK4_SU11", (0, 2, 1), (1, 1, 1)),
    ("HPK4_HEIS", "HK4_HEIS", (0, 1, 2), (1, 1, -1)),
    ("HPK4_SU11", "HK4_SU2", (0, 1, 2), (1, 1, 1)),
    ("HPK4_E2", "HK4_E11", (0, 1, 2), (1, 1, 1)),
    ("HPK4_E11", "HK4_E2", (0, 1, 2), (1, 1, 1)),
])
def test_para_systems_are_relabelled(para, base, perm, neg):
    rng = np.random.default_rng(11)
    P, B = get_system(para), get_system(base)
    neg = np.array(neg)
    for _ in range(1000):
        y = rng.uniform(0.3, 3.0, 3)
        lapse = rng.uniform(0.3, 3.0)
        mapped = neg * y[list(perm)]
        lhs = P.rhs(0.0, y, lambda t: lapse)
        rhs = B.rhs(0.0, mapped, lambda t: lapse)
        assert np.allclose(neg * lhs[list(perm)], rhs, rtol=1e-12, atol=1e-12)


def test_ideal_system_equal_scalings():
    f = get_family("qk_gen7")
    for x in f.samples(f.params(a1=1.0, a2=1.0, a3=1.0), 20):
        assert ideal_residual(f, x, a1=1.0, a2=1.0, a3=1.0) <= 1e-12
    worst = max(ideal_residual(f, x) for x in f.samples(f.params(), 20))
    assert worst > 1e-3


@pytest.mark.parametrize("tau", [0.0, 1.0, -0.25])
def test_ideal_system_isotropic(tau):
    f = get_family("qk_iso")
    p = f.params(tau=tau)
    for x in f.samples(p, 20):
        assert ideal_residual(f, x, tau=tau) <= 1e-12


def test_printed_ideal_system_differs_for_nonzero_tau():
    pt = family_eval("qk_iso", 2.0, tau=1.0, a=1.0)
    assert np.max(np.abs(ideal_system_printed(pt.state, pt.dstate_dt, 1.0))) > 1e-2


@pytest.mark.parametrize("fam", ["heis_general", "eguchi_hanson", "spin7_red", "qk_iso", "qk_gen7", "spin7_gen"])
def test_oracle(fam):
    r = oracle_compare(fam)
    assert r["status"] == "ok"
    assert r["max_deviation"] <= 1e-6


@pytest.mark.parametrize("fam", list(FAMILIES))
def test_rk4_order(fam):
    r = convergence_order(fam)
    assert r["exact_to_roundoff"] or r["order"] >= 3.8, r


def test_rk4_fixed_exponential():
    y = rk4_fixed(lambda t, y: -y, np.array([1.0]), 0.0, 1.0, 64)
    assert abs(y[0] - np.exp(-1)) < 1e-8


def test_integrate_reports_domain_exit():
    tr = integrate("HK4_SU2", [1.0, 1.2, 1.5], (0.0, 5.0), lapse=lambda t: 1.0, in_domain=lambda t, y: t < 1.0)
    assert tr.status == "domain_exit" and tr.last_t <= 1.0


def test_integrate_reports_blow_up():
    tr = integrate("HK4_SU2", [1.0, 1.2, 1.5], (0.0, 2.0), lapse=lambda t: 1.0 / (1.0 - t))
    assert tr.status in ("blow_up", "max_steps") and tr.last_t < 1.0


def test_systems_cover_identifiers():
    want = {"QK_ISO", "QK_GEN7", "SPIN7_GEN", "SPIN7_RED", "HK4_SU2", "HK4_SU11", "HK4_HEIS", "HK4_E2",
            "HK4_E11", "HPK4_SU2", "HPK4_SU11", "HPK4_HEIS", "HPK4_E2", "HPK4_E11"}
    assert set(SYSTEMS) == want
