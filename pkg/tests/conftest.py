import math

import pytest

from collapse_kit.radial_data import FamilySpec, build_family

PG_V3 = -math.sqrt(2.0 / 3.0)
PG_BC = f"r1=3.0,v1={PG_V3!r}"

# closed-form corpus shared by the property tests and the acceptance suite
CORPUS = {
    "minkowski": FamilySpec("minkowski"),
    "schwarzschild_ts": FamilySpec("schwarzschild_ts"),
    "painleve_gullstrand": FamilySpec("painleve_gullstrand"),
    "pg_outer": FamilySpec("painleve_gullstrand", r_min=3.0),
    "constant_density_star": FamilySpec("constant_density_star"),
    "uniform_collapse": FamilySpec("uniform_collapse"),
    "uniform_collapse_mild": FamilySpec("uniform_collapse", {"k0": 1.0, "beta": 1.0}, r_max=0.8),
    "gaussian_blob": FamilySpec("gaussian_blob"),
}

BALL = [k for k, s in CORPUS.items() if s.domain == "ball"]

_ACCEPTANCE = {}


def corpus(name):
    return build_family(CORPUS[name])


@pytest.fixture
def record():
    """Log one acceptance verdict; printed in the terminal summary."""

    def _record(number, title, ok, detail=""):
        _ACCEPTANCE[number] = (title, bool(ok), detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)
