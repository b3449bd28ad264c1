from fractions import Fraction

import numpy as np
import pytest

from qcgeom.biquard import (NotQcError, connection_axioms, curvature, identity_checks, is_three_sasakian,
                            solve_biquard, standard_qc, structure_eq_check, torsion_decompose, validate_qc)
from qcgeom.exterior import KForm
from qcgeom.lie import get_algebra
from qcgeom.metrics import three_sasaki_model

NAMES = ["L1", "L2", "L3", "heisenberg7", "heisenberg11"]


@pytest.fixture(scope="module", params=NAMES)
def pipeline(request):
    q = standard_qc(request.param)
    conn = solve_biquard(q)
    R = curvature(conn)
    return q, conn, R, torsion_decompose(q, conn, R)


def _pipe(name):
    q = standard_qc(name)
    conn = solve_biquard(q)
    R = curvature(conn)
    return q, conn, R, torsion_decompose(q, conn, R)


@pytest.mark.parametrize("name", NAMES)
def test_validate_qc(name):
    checks = validate_qc(standard_qc(name))
    assert checks and all(c.passed for c in checks), [c.as_dict() for c in checks if not c.passed]


def test_not_qc_dimension():
    with pytest.raises(NotQcError):
        standard_qc("su2")


def test_qc_axioms_fail_on_wrong_structure():
    # G7 does not carry the standard qc structure in its own frame
    assert not all(c.passed for c in validate_qc(standard_qc("G7")))


def test_connection_axioms(pipeline):
    q, conn, R, td = pipeline
    bad = [c.as_dict() for c in connection_axioms(conn) if not c.passed]
    assert not bad
    assert all(r == (49, 49) for r in conn.vertical_rank.values()) or q.n > 1


def test_identities(pipeline):
    q, conn, R, td = pipeline
    bad = [c.as_dict() for c in identity_checks(q, conn, R, td) if not c.passed]
    assert not bad


def test_curvature_antisymmetric(pipeline):
    R = pipeline[2]
    assert all(x == 0 for x in (R + R.transpose(1, 0, 2, 3)).flat)
    assert all(x == 0 for x in (R + R.transpose(0, 1, 3, 2)).flat)


def test_structure_equations(pipeline):
    q, conn, R, td = pipeline
    assert structure_eq_check(q, conn, td.S).passed


def test_L1_christoffel_entries():
    t = solve_biquard(standard_qc("L1")).christoffel_table()
    assert t[(2, 1, 2)] == -1
    assert t[(2, 2, 1)] == 1
    assert t[(5, 3, 4)] == Fraction(1, 2)
    assert t[(5, 6, 7)] == Fraction(1, 2)


def test_L3_christoffel_entries():
    t = solve_biquard(standard_qc("L3")).christoffel_table()
    assert t[(1, 3, 1)] == Fraction(3, 2)
    assert t[(1, 1, 3)] == Fraction(-3, 2)


def test_L1_curvature_and_torsion():
    q, conn, R, td = _pipe("L1")
    for a in range(4):
        for b in range(4):
            if a != b:
                assert R[a, b, a, b] == 1
    assert td.S == Fraction(-1, 2)
    assert td.torsion_free
    assert all(x == 0 for x in td.T0.flat) and all(x == 0 for x in td.U.flat)


def test_L2_curvature():
    q, conn, R, td = _pipe("L2")
    assert R[0, 1, 2, 3] == Fraction(-1, 2)
    assert td.S == Fraction(-1, 4)
    assert td.torsion_free


def test_L3_torsion():
    q, conn, R, td = _pipe("L3")
    assert td.S == -1
    assert not td.torsion_free
    assert [td.T0[i, i] for i in range(4)] == [Fraction(-1, 4)] * 2 + [Fraction(1, 4)] * 2


def test_heisenberg_flat():
    for name in ("heisenberg7", "heisenberg11"):
        q, conn, R, td = _pipe(name)
        assert all(x == 0 for x in R.flat)
        assert td.S == 0
        assert all(len(a) == 0 for a in conn.alpha)


def test_connection_forms_example1():
    q, conn, R, td = _pipe("L1")
    for i in range(3):
        assert conn.alpha[i] == (Fraction(1, 4) - td.S / 2) * q.eta[i]


def test_connection_forms_example3():
    q, conn, R, td = _pipe("L3")
    e = lambda i: KForm.basis(7, i)
    c = Fraction(1, 4) + td.S / 2
    assert conn.alpha[0] == (Fraction(1, 4) - td.S / 2) * q.eta[0]
    assert conn.alpha[1] == -e(0) - c * q.eta[1]
    assert conn.alpha[2] == -e(1) - c * q.eta[2]


def test_three_sasakian_flag():
    L, om, eta = three_sasaki_model()
    assert is_three_sasakian(eta, om, [L.d(x) for x in eta])
    q, conn, R, td = _pipe("L1")
    rep = structure_eq_check(q, conn, td.S)
    assert rep.passed and not rep.three_sasakian


def test_exact_pipeline_reproducible():
    a = solve_biquard(standard_qc("L1")).christoffel_table()
    b = solve_biquard(standard_qc(get_algebra("L1"))).christoffel_table()
    assert a == b
