from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from jetbundle.exact_kernel import Poly, RatFunc
from jetbundle.proj_line import BinaryForm, Mobius

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_q = st.fractions(min_value=-6, max_value=6, max_denominator=5)
small_int = st.integers(-4, 4)


@st.composite
def polys(draw, max_degree=5):
    return Poly(draw(st.lists(small_q, max_size=max_degree + 1)))


@st.composite
def nonzero_polys(draw, max_degree=4):
    p = draw(polys(max_degree))
    return p if p else Poly((1,))


@st.composite
def ratfuncs(draw):
    return RatFunc(draw(polys(4)), draw(nonzero_polys(3)))


@st.composite
def mobius_maps(draw):
    """Unimodular rational matrices with small entries."""
    a = draw(small_q.filter(bool))
    b, c = draw(small_q), draw(small_q)
    return Mobius(a, b, c, (1 + b * c) / a)


@st.composite
def forms(draw, n):
    return BinaryForm(n, draw(st.lists(small_q, min_size=n + 1, max_size=n + 1)))


def q(x) -> Fraction:
    return Fraction(x)


# acceptance summary -----------------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion this test belongs to")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    num, label = marker
    state = _criteria.setdefault(num, {"label": label, "ok": True, "notes": []})
    if report.outcome != "passed" or hasattr(report, "wasxfail"):
        state["ok"] = False
        state["notes"].append(report.nodeid.split("::")[-1])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep._criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        s = _criteria[num]
        line = f"criterion {num}: {'PASS' if s['ok'] else 'FAIL'}  {s['label']}"
        if s["notes"]:
            line += f"  [not met: {', '.join(s['notes'])}]"
        terminalreporter.write_line(line)
