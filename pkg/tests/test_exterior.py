from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import kforms
from qcgeom.exterior import SQRT2, KForm, QSqrt2, Signature, hodge_star, interior, kn_product, parse_form, wedge


def e(n, *idx):
    return KForm.basis(n, *idx)


# -- wedge -------------------------------------------------------------------------------


def test_basis_wedge():
    assert wedge(e(4, 0), e(4, 1)) == e(4, 0, 1)
    assert wedge(e(4, 1), e(4, 0)) == -e(4, 0, 1)


def test_wedge_nilpotent():
    assert wedge(e(4, 0), e(4, 0)) == 0


def test_square_of_kahler_form():
    w = parse_form(4, "e12 + e34")
    assert w ^ w == 2 * e(4, 0, 1, 2, 3)


def test_wedge_dimension_mismatch():
    with pytest.raises(ValueError):
        wedge(e(3, 0), e(4, 1))


def test_evaluation_convention():
    assert e(4, 0, 1).evaluate([1, 0, 0, 0], [0, 1, 0, 0]) == 1
    a = KForm.one_form([1, 2, 0, 0])
    b = KForm.one_form([0, 1, 3, 0])
    X, Y = [1, 1, 0, 0], [0, 0, 1, 1]
    assert (a ^ b).evaluate(X, Y) == a.evaluate(X) * b.evaluate(Y) - a.evaluate(Y) * b.evaluate(X)


@given(st.data())
def test_graded_anticommutative(data):
    n = data.draw(st.sampled_from([4, 5, 7]))
    a, b = data.draw(kforms(n)), data.draw(kforms(n))
    assert a ^ b == (-1) ** (a.degree * b.degree) * (b ^ a)


@given(st.data())
def test_wedge_associative(data):
    n = 6
    a, b, c = (data.draw(kforms(n)) for _ in range(3))
    assert (a ^ b) ^ c == a ^ (b ^ c)


# -- interior ----------------------------------------------------------------------------


def test_interior_examples():
    # eta indices 4, 5 in dim 7: xi_1 into eta_1 ^ eta_2 gives eta_2
    assert interior(4, e(7, 4, 5)) == e(7, 5)
    assert interior(6, parse_form(7, "e12 + e34")) == 0
    assert interior(1, e(4, 0, 1)) == -e(4, 0)


def test_interior_of_function_rejected():
    with pytest.raises(ValueError):
        interior(0, KForm.scalar(3, 2))


@given(st.data())
def test_interior_antiderivation(data):
    n = 5
    a = data.draw(kforms(n).filter(lambda f: f.degree >= 1))
    b = data.draw(kforms(n).filter(lambda f: f.degree >= 1))
    v = data.draw(st.integers(0, n - 1))
    lhs = interior(v, a ^ b)
    rhs = (interior(v, a) ^ b) + (-1) ** a.degree * (a ^ interior(v, b))
    assert lhs == rhs


# -- Hodge star --------------------------------------------------------------------------


def test_star_of_one():
    assert hodge_star(KForm.scalar(5)) == KForm.volume(5)


@pytest.mark.parametrize("diag", [(1, 1, 1, 1), (1, 1, -1, -1), (1,) * 7, (1,) * 8, (1, -1, 1, -1, 1, 1, 1, 1)])
@given(st.data())
def test_double_star(diag, data):
    sig = Signature(diag)
    n = len(diag)
    a = data.draw(kforms(n))
    k = a.degree
    assert hodge_star(hodge_star(a, sig), sig) == (-1) ** (k * (n - k)) * sig.det_sign * a


@given(st.data())
def test_star_pairing(data):
    sig = Signature((1, 1, -1, -1))
    a = data.draw(kforms(4, 2))
    b = data.draw(kforms(4, 2))
    inner = sum(c * b[i] * sig.diag[i[0]] * sig.diag[i[1]] for i, c in a.items())
    assert a ^ hodge_star(b, sig) == inner * KForm.volume(4)


def test_orientation_flip():
    a = parse_form(7, "e123")
    assert hodge_star(a, orientation=-1) == -hodge_star(a)


def test_signature_rejects_zero():
    with pytest.raises(ValueError):
        Signature((1, 0, 1))


# -- Kulkarni-Nomizu -----------------------------------------------------------------------


def test_kn_examples():
    g = np.eye(4, dtype=object)
    assert kn_product(g, g)[0, 1, 0, 1] == 2
    assert all(x == 0 for x in kn_product(g, np.zeros((4, 4), dtype=object)).flat)
    w = parse_form(4, "e12 + e34")
    W = np.array([[w.on_basis(i, j) if i < j else -w.on_basis(j, i) if i > j else 0 for j in range(4)]
                  for i in range(4)], dtype=object)
    assert kn_product(W, W)[0, 1, 0, 1] == 2


def test_kn_rejects_mixed_symmetry():
    g = np.eye(3)
    w = np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], dtype=float)
    with pytest.raises(ValueError):
        kn_product(g, w)


def test_kn_curvature_symmetries():
    rng = np.random.default_rng(3)
    h = rng.normal(size=(5, 5))
    h = h + h.T
    k = rng.normal(size=(5, 5))
    k = k + k.T
    T = kn_product(h, k)
    assert np.allclose(T, -T.transpose(1, 0, 2, 3))
    assert np.allclose(T, T.transpose(2, 3, 0, 1))
    assert np.allclose(T + T.transpose(0, 2, 3, 1) + T.transpose(0, 3, 1, 2), 0)


# -- scalars -----------------------------------------------------------------------------


def test_float_promotion_flags_exactness():
    a = parse_form(3, "e12")
    assert a.exact
    b = a + KForm(3, 2, {(0, 1): 0.5})
    assert not b.exact
    assert b[(0, 1)] == 1.5


def test_exact_results_are_reproducible():
    w = parse_form(7, "2 e12 + 2 e34 - 1/2 e67")
    assert repr(w ^ w) == repr(parse_form(7, "2 e12 + 2 e34 - 1/2 e67") ^ w)
    assert (w ^ w)[(0, 1, 5, 6)] == Fraction(-2)


def test_qsqrt2_field():
    x = QSqrt2(1, 1)
    assert x * QSqrt2(-1, 1) == 1
    assert SQRT2 * SQRT2 == 2
    assert (1 / x) * x == 1
    assert abs(float(x) - (1 + 2 ** 0.5)) < 1e-15


@pytest.mark.parametrize("text, idx, val", [
    ("2 e12 + 2 e34 - 1/2 e67", (5, 6), Fraction(-1, 2)),
    ("e^1 e^10", (0, 9), 1),
    ("-e21", (0, 1), 1),
])
def test_parse_form(text, idx, val):
    assert parse_form(10, text)[idx] == val


def test_parse_form_rejects_mixed_degree():
    with pytest.raises(ValueError):
        parse_form(4, "e1 + e23")
