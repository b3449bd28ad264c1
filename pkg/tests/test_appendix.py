import numpy as np
import pytest

from qcgeom import appendix as A
from qcgeom.metrics import build


@pytest.mark.parametrize("a", [1.0, 2.0])
def test_corrected_table_matches_frame(a):
    r = A.appendix_crosscheck(1, a=a, samples=20, seed=3, corrected=True)
    assert r.metric_ok
    assert r.max_metric_error <= 1e-10


def test_verbatim_table_reports_g44_only():
    r = A.appendix_crosscheck(1, samples=5, seed=0)
    assert [m["entry"] for m in r.metric_mismatches] == ["g44"]
    d = r.as_dict()
    assert d["metric_entries_matching"] == 35 and d["metric_entries_total"] == 36


def test_g44_difference_is_the_sin_factor():
    # the only difference is sin^2 x sin^2 x where sin^2 x sin^2 y fits
    rng = np.random.default_rng(1)
    m = build("qk_new_G1")
    for _ in range(5):
        v = m.random_point(rng)
        t, x, y, z, x5, x6, x7, u = v
        diff = A.TABLE1_CORRECTED(v, 1.0)[(4, 4)] - A.TABLE1(v, 1.0)[(4, 4)]
        want = u * u * (x5 ** 2 + x7 ** 2) * (np.sin(x) ** 2 * np.sin(y) ** 2 - np.sin(x) ** 4) / 4
        assert np.isclose(diff, want, atol=1e-12)


def test_table2_is_a_different_metric():
    r = A.appendix_crosscheck(2, samples=2, seed=0, curvature=False)
    assert not r.metric_ok
    assert "g55" in {m["entry"] for m in r.metric_mismatches}


def test_table2_g55_closed_form():
    a, u = 1.0, 0.6
    v = np.array([0.1, 0.9, 1.2, 0.3, 0.2, -0.4, 0.5, u])
    tab = A.TABLE2(v, a)[(5, 5)]
    assert np.isclose(tab, (9 * u ** (5 / 3) + 4 * a) / (20 * u ** (2 / 3)))
    frame = build("spin7_G1", a=a).coord_metric(v)[4, 4]
    assert np.isclose(frame, (4 * u ** (5 / 3) + a) / (20 * u ** (2 / 3)))


def test_curvature_list_53_of_55():
    r = A.appendix_crosscheck(2, samples=3, seed=0)
    d = r.as_dict()
    assert d["curvature_entries_total"] == 55
    assert d["curvature_entries_matching"] == 53
    bad = {m["entry"] for m in r.curvature_mismatches}
    assert bad == {"Omega^1_2 gamma^58", "Omega^4_5 gamma^38"}
    assert len(r.excluded) == len(A.EXCLUDED_FORMS2) == 21


def test_sign_error_in_omega12():
    r = A.appendix_crosscheck(2, samples=1, seed=0)
    m = next(x for x in r.curvature_mismatches if x["entry"] == "Omega^1_2 gamma^58")
    assert np.isclose(m["computed"], -m["printed_value"], rtol=1e-6)


def test_gamma_frame_sign():
    cm = A.gamma_metric()
    m = build("spin7_G1")
    v = m.random_point(np.random.default_rng(0))
    E, F = cm.coframe(v), m.coord_coframe(v)
    assert np.allclose(E[6], -F[6]) and np.allclose(np.delete(E, 6, 0), np.delete(F, 6, 0))
    assert np.allclose(cm.g(v), m.coord_metric(v))


def test_bad_table_number():
    with pytest.raises(ValueError):
        A.appendix_crosscheck(3)
