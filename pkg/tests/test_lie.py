import numpy as np
import pytest

from qcgeom.charts import CHARTS, chart_consistency, random_chart_point, registry_pairs
from qcgeom.exterior import parse_form
from qcgeom.lie import (REGISTRY, derived_series_dims, get_algebra, heisenberg, jacobi_check, list_algebras,
                        load_algebra_file, parse_algebra_text)


def test_de5_on_L1():
    L = get_algebra("L1")
    assert L.d(L.e(4)) == parse_form(7, "2 e12 + 2 e34 - 1/2 e67")


def test_heisenberg_horizontal_closed():
    L = heisenberg(1)
    assert all(L.d(L.e(a)) == 0 for a in range(4))
    assert L.d(L.e(4)) == parse_form(7, "2 e12 + 2 e34")


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_jacobi_registry(name):
    r = jacobi_check(get_algebra(name))
    assert r.passed, r.as_dict()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_jacobi_heisenberg_any_n(n):
    assert jacobi_check(heisenberg(n)).passed


def test_jacobi_failure_reports_residual():
    L = parse_algebra_text("de^1 = e^2 e^3\nde^2 = e^1 e^2\n")
    r = jacobi_check(L)
    assert not r.passed
    assert r.residuals[0] == parse_form(3, "e123")
    assert "dde1" in r.as_dict()["residuals"]


def test_single_constant_is_heisenberg():
    # c^1_23 alone is the 3D Heisenberg algebra and satisfies Jacobi
    assert jacobi_check(parse_algebra_text("de^1 = e^2 e^3")).passed


def test_algebra_file(tmp_path):
    p = tmp_path / "su2.txt"
    p.write_text("# su(2)\ndim = 3\nde^1 = -e^2 e^3\nde^2 = -e^3 e^1\nde^3 = -e^1 e^2\n")
    L = load_algebra_file(p)
    assert L.name == "su2" and L.dim == 3
    assert L.de == get_algebra("su2").de


def test_algebra_file_errors():
    with pytest.raises(ValueError):
        parse_algebra_text("de^1 = e^2 e^3\nde^1 = 0\n")
    with pytest.raises(ValueError):
        parse_algebra_text("nonsense")


def test_leibniz():
    L = get_algebra("L2")
    a, b = parse_form(7, "e1 + 2 e5"), parse_form(7, "e36 - e27")
    assert L.d(a ^ b) == (L.d(a) ^ b) - (a ^ L.d(b))


def test_structure_constants_antisymmetric():
    L = get_algebra("L3")
    C = L.structure_constants()
    n = L.dim
    assert all(C[k][i][j] == -C[k][j][i] for k in range(n) for i in range(n) for j in range(n))


@pytest.mark.parametrize("a, b, dims", [("L1", "L1_tilde", [7, 6, 6]), ("L3", "L3_tilde", [7, 5, 1])])
def test_isomorphic_pairs_share_derived_series(a, b, dims):
    assert derived_series_dims(get_algebra(a)) == derived_series_dims(get_algebra(b)) == dims


def test_list_algebras_has_anchors():
    rows = list_algebras()
    assert len(rows) >= 14
    assert all(anchor for _, _, anchor in rows)


@pytest.mark.parametrize("L, C", registry_pairs(), ids=lambda x: getattr(x, "name", ""))
def test_chart_consistency(L, C):
    rng = np.random.default_rng(7)
    for _ in range(50):
        r = chart_consistency(L, C, random_chart_point(C, rng))
        assert r.passed, r.as_dict()


def test_euler_chart_generic_and_singular():
    L, C = get_algebra("su2"), CHARTS["euler_su2"]
    assert chart_consistency(L, C, [np.pi / 2, 0.3, -0.7]).passed
    r = chart_consistency(L, C, [0.0, 0.3, -0.7])
    assert r.singular and not r.passed
