import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sumprod import FiniteComplexSet, GaussianRational

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

small_int = st.integers(-6, 6)
small_rational = st.fractions(min_value=-6, max_value=6, max_denominator=4)


@st.composite
def gaussian(draw, nonzero=False, rational=False):
    part = small_rational if rational else small_int
    z = GaussianRational(draw(part), draw(part))
    if nonzero and not z:
        z = GaussianRational(1, draw(small_int))
    return z


def complex_sets(min_size=1, max_size=6, nonzero=False, rational=False):
    return st.lists(
        gaussian(nonzero=nonzero, rational=rational), min_size=min_size, max_size=max_size, unique=True
    ).map(FiniteComplexSet)


@pytest.fixture
def tmp_cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, secs, limit, detail in sorted(RESULTS):
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'} criterion {number}: {secs:.1f}s (limit {limit}s) {detail}"
        )
