from fractions import Fraction

import pytest

from qcgeom.qcexamples import PRINTED_CHRISTOFFEL, parse_christoffel_list, verify_example, verify_heisenberg


@pytest.fixture(scope="module")
def reports():
    return {k: verify_example(k) for k in (1, 2, 3)}


def test_example1_all_pass(reports):
    r = reports[1]
    assert r.passed, [c for c in r.checks if not c.passed]
    assert r.info["S"] == "-1/2" and r.info["WR_zero"]


def test_example2_all_pass(reports):
    r = reports[2]
    assert r.passed
    assert r.check("R(e1, e2, e3, e4) = -1/2").passed
    assert not r.info["WR_zero"]


def test_example2_printed_list_is_not_its_connection(reports):
    # the list printed for L2 is a reshuffle of the L1 list and is not used as a check
    assert not reports[2].info["printed_christoffel_matches"]


def test_example3_everything_but_wr(reports):
    r = reports[3]
    failing = [c.name for c in r.checks if not c.passed]
    assert failing == ["WR(e1, e2, e3, e4) = -1/2"]
    assert r.info["WR_1234"] == "0" and r.info["R_1234"] == "-1/2"
    assert r.check("Christoffel symbols match the printed list").passed
    assert r.check("T0(X, Y) = psi(X, I1 Y), psi = -1/4 (e12 - e34)").passed


@pytest.mark.parametrize("k", [1, 2, 3])
def test_structure_equations_and_identities(reports, k):
    r = reports[k]
    for c in r.checks:
        if c.name.startswith(("identity:", "connection:", "qc:", "structure equations")):
            assert c.passed, c.name


@pytest.mark.parametrize("n", [1, 2])
def test_heisenberg(n):
    r = verify_heisenberg(n)
    assert r.passed
    assert r.algebra == f"heisenberg{4 * n + 3}"


def test_bad_example_number():
    with pytest.raises(ValueError):
        verify_example(4)


def test_parse_christoffel_list():
    t = parse_christoffel_list([("1/2", "53^4 -54^3")])
    assert t == {(5, 3, 4): Fraction(1, 2), (5, 4, 3): Fraction(-1, 2)}
    with pytest.raises(ValueError):
        parse_christoffel_list([("1", "5x^4")])
    with pytest.raises(ValueError):
        parse_christoffel_list([("1", "53^4"), ("2", "53^4")])


def test_printed_list_sizes():
    assert len(PRINTED_CHRISTOFFEL["L1"]) == 24
    assert len(PRINTED_CHRISTOFFEL["L3"]) == 32


def test_report_dict(reports):
    d = reports[1].as_dict()
    assert d["target"] == "example1" and d["algebra"] == "L1" and d["passed"]
    assert all({"name", "passed", "residual"} <= set(v) for v in d["verdicts"])
