"""Acceptance battery: one test (or a pass/fail pair) per criterion.

Every test records its outcome in ``RESULTS``; the terminal summary prints one
PASS/FAIL line per criterion.  Known conflicts between a stated value and the
computation are strict xfails: the line reads FAIL and the suite stays green.
"""

from fractions import Fraction

import numpy as np
import pytest

from qcgeom import curvature as C
from qcgeom import evolution as ev
from qcgeom import metrics as M
from qcgeom.appendix import appendix_crosscheck
from qcgeom.biquard import curvature, solve_biquard, standard_qc, structure_eq_check, torsion_decompose
from qcgeom.conformal import wr_tensor
from qcgeom.lie import REGISTRY, get_algebra, jacobi_check
from qcgeom.qcexamples import verify_example, verify_heisenberg

RESULTS = {}

INSTANTONS = ["hk4_eguchi_hanson", "hk4_bgpp_triaxial", "hk4_gibbons_hawking", "hk4_bianchi_vii0",
              "hk4_bianchi_vi0"]
PARA = ["hpk4_su2", "hpk4_su11", "hpk4_heis", "hpk4_e2", "hpk4_e11"]


def record(n, part, ok, info=""):
    RESULTS.setdefault(n, []).append((part, bool(ok), info))
    print(f"criterion {n:2d} {part}: {'PASS' if ok else 'FAIL'} [{info}]")
    return bool(ok)


@pytest.fixture(scope="module")
def examples():
    return {k: verify_example(k) for k in (1, 2, 3)}


def _einstein(name, samples=20, seed=0, **params):
    return C.einstein_fit(M.build(name, **params).to_coord_metric(), samples=samples, seed=seed)


# -- exact qc pipeline ------------------------------------------------------------------------


def test_c01_example1(examples):
    r = examples[1]
    bad = [c.name for c in r.checks if not c.passed]
    assert record(1, "S=-1/2, torsion 0, Christoffel list, R_abab=1, WR=0", not bad, bad or "exact")


def test_c02_example2(examples):
    r = examples[2]
    bad = [c.name for c in r.checks if not c.passed]
    assert record(2, "S=-1/4, torsion 0, R1234=-1/2, WR!=0", not bad, bad or "exact")


def test_c03_example3_torsion_and_identities(examples):
    r = examples[3]
    bad = [c.name for c in r.checks if not c.passed and not c.name.startswith("WR")]
    assert record(3, "S=-1, T0=psi(.,I1.), identities", not bad, bad or "exact")


@pytest.mark.xfail(strict=True, reason="WR(e1,e2,e3,e4) evaluates to 0, not -1/2; see the decisions ledger")
def test_c03_example3_wr():
    q = standard_qc("L3")
    conn = solve_biquard(q)
    R = curvature(conn)
    td = torsion_decompose(q, conn, R)
    wr = wr_tensor(R, td, q)[0, 1, 2, 3]
    assert record(3, "WR1234=-1/2", wr == Fraction(-1, 2), f"computed {wr}")


def test_c04_heisenberg():
    reps = [verify_heisenberg(n) for n in (1, 2)]
    assert record(4, "R=0, S=0, Wqc=0 (n=1,2)", all(r.passed for r in reps), "exact")


def test_c05_jacobi():
    names = list(REGISTRY)
    bad = [k for k in names if not jacobi_check(get_algebra(k)).passed]
    assert record(5, f"d^2=0 on {len(names)} algebras", len(names) >= 14 and not bad, bad or "exact")


# -- quaternionic Kahler metrics ----------------------------------------------------------------


@pytest.mark.parametrize("a", [1.0, 2.0])
def test_c06_qk_new_einstein(a):
    fit = _einstein("qk_new_G1", a=a)
    rel = abs(fit.lam + 4 * a) / (4 * a)
    ok = rel <= 1e-5 and fit.residual <= 1e-5
    assert record(6, f"Ric=-4a g, a={a:g}", ok, f"lambda {fit.lam:.10g}, residual {fit.residual:.1e}")


@pytest.mark.parametrize("a", [1.0, 2.0])
def test_c06_corrected_table(a):
    r = appendix_crosscheck(1, a=a, samples=20, seed=0, corrected=True)
    assert r.max_metric_error <= 1e-10
    # informational: the corrected reading is not itself the criterion
    print(f"corrected coordinate table a={a:g}: max error {r.max_metric_error:.1e}")


@pytest.mark.xfail(strict=True, reason="printed g44 factor sin^2 x sin^2 x; see the decisions ledger")
@pytest.mark.parametrize("a", [1.0, 2.0])
def test_c06_coordinate_table(a):
    r = appendix_crosscheck(1, a=a, samples=20, seed=0)
    bad = [m["entry"] for m in r.metric_mismatches]
    assert record(6, f"table vs frame <= 1e-10, a={a:g}", r.max_metric_error <= 1e-10,
                  f"max {r.max_metric_error:.2e}, mismatched {bad}")


@pytest.mark.xfail(strict=True, reason="measured Einstein constant is -4 = -(n+3)a^2; see the decisions ledger")
def test_c07_qk_heisenberg_constant():
    fit = _einstein("qk_heisenberg", a=1.0, n=1)
    ok = abs(fit.lam + 16) <= 1e-5 * 16 and fit.residual <= 1e-5
    assert record(7, "Ric=-16 g (n=1, a=1)", ok, f"lambda {fit.lam:.10g}, residual {fit.residual:.1e}")


def test_c08_non_qk_family():
    m = M.build("qk_nonQK_family", a1=0.0, a2=1.0, a3=2.0)
    d = M.closedness_check(m, "Phi", samples=20, seed=0).max_residual
    fit = C.einstein_fit(m.to_coord_metric(), samples=20, seed=0)
    ok = d <= 1e-8 and fit.residual >= 1e-3
    assert record(8, "dPhi<=1e-8, Einstein residual>=1e-3", ok, f"dPhi {d:.1e}, residual {fit.residual:.3f}")


# -- Spin(7) ------------------------------------------------------------------------------------


def test_c09_spin7_holonomy():
    m = M.build("spin7_G1", a=1.0)
    cm = m.to_coord_metric()
    curv = C.curvature_samples(cm, 20, 0)
    ric = max(c.max_ricci for c in curv)
    h = C.holonomy_estimate(cm, forms={"Psi": m.forms["Psi"]}, curv=curv[:4])
    ann = h.annihilation["Psi"]
    ok = ric <= 1e-6 and h.span_rank >= 16 and h.closure_dim == 21 and ann <= 1e-8 and not h.unstable
    assert record(9, "Ricci<=1e-6, span>=16, closure=21, Psi annihilated", ok,
                  f"Ricci {ric:.1e}, span {h.span_rank}, closure {h.closure_dim}, Psi {ann:.1e}")


# -- ODE families -------------------------------------------------------------------------------


def test_c10_families():
    worst_res, worst_dev, worst_order, bad = 0.0, 0.0, np.inf, []
    for name in ev.FAMILIES:
        res = ev.family_residuals(name, n=100)["max_residual"]
        dev = ev.oracle_compare(name)
        co = ev.convergence_order(name)
        order_ok = co["exact_to_roundoff"] or co["order"] >= 3.8
        if not co["exact_to_roundoff"]:
            worst_order = min(worst_order, co["order"])
        worst_res, worst_dev = max(worst_res, res), max(worst_dev, dev["max_deviation"])
        if res > 1e-10 or dev["status"] != "ok" or dev["max_deviation"] > 1e-6 or not order_ok:
            bad.append(name)
    assert record(10, f"{len(ev.FAMILIES)} families: residual, RK4 oracle, order", not bad,
                  f"residual {worst_res:.1e}, deviation {worst_dev:.1e}, min order {worst_order:.3f}"
                  + (f", failing {bad}" if bad else ""))


# -- 4D metrics ---------------------------------------------------------------------------------


def _closed_and_flat(name):
    m = M.build(name)
    d = max(M.closedness_check(m, f, samples=20, seed=0).max_residual for f in m.forms)
    ric = C.ricci_flat_check(m.to_coord_metric(), samples=20, seed=0)["max_ricci"]
    return m, d, ric


@pytest.mark.parametrize("name", INSTANTONS)
def test_c11_instantons(name):
    _, d, ric = _closed_and_flat(name)
    assert record(11, name, d <= 1e-8 and ric <= 1e-6, f"dF {d:.1e}, Ricci {ric:.1e}")


@pytest.mark.parametrize("name", PARA)
def test_c12_hyper_para_kahler(name):
    m, d, ric = _closed_and_flat(name)
    ev_ = np.linalg.eigvalsh(m.coord_metric(m.random_point(np.random.default_rng(0))))
    sig = (int((ev_ > 0).sum()), int((ev_ < 0).sum()))
    assert record(12, name, d <= 1e-8 and ric <= 1e-6 and sig == (2, 2),
                  f"dOmega {d:.1e}, Ricci {ric:.1e}, signature {sig}")


# -- flat 8D hyper-Kahler -----------------------------------------------------------------------


@pytest.mark.parametrize("name", ["hk8_G7", "hk8_G7_flat"])
def test_c13_flat_hyperkahler(name):
    m = M.build(name)
    riem = C.ricci_flat_check(m.to_coord_metric(), samples=20, seed=0)["max_riemann"]
    assert not m.domain(-0.5, m.params)
    assert record(13, f"{name} Riemann<=1e-8", riem <= 1e-8, f"Riemann {riem:.1e}")


def test_c13_hypo_identities():
    r = M.hypo_check("G7")
    assert record(13, "hypo identities on G7", r.passed, "exact" if r.passed else r.residuals)


# -- exact forms and structure equations --------------------------------------------------------


def test_c14_hodge_dual():
    p = M.g2_package()
    assert record(14, "*phi equals the displayed dual", p.matches_display,
                  f"orientation {p.orientation}, exact")


@pytest.mark.parametrize("k", [1, 2, 3])
def test_c15_structure_equations(k):
    q = standard_qc({1: "L1", 2: "L2", 3: "L3"}[k])
    conn = solve_biquard(q)
    td = torsion_decompose(q, conn, curvature(conn))
    se = structure_eq_check(q, conn, td.S)
    assert record(15, f"example {k}", se.passed, "exact" if se.passed else [r.pretty() for r in se.residuals])
