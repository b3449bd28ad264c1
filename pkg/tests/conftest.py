import itertools
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from qcgeom.exterior import KForm

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fraction = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def kforms(draw, dim, degree=None):
    """Random exact form with a handful of terms."""
    k = draw(st.integers(0, dim)) if degree is None else degree
    idx = list(itertools.combinations(range(dim), k))
    chosen = draw(st.lists(st.sampled_from(idx), max_size=6, unique=True))
    return KForm(dim, k, {i: draw(small_fraction) for i in chosen})


__all__ = ["kforms", "small_fraction", "Fraction"]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        parts = results[n]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}: {'ok' if good else 'FAIL'} [{info}]" for name, good, info in parts)
        terminalreporter.write_line(f"criterion {n:2d}  {'PASS' if ok else 'FAIL'}  {detail}")
