import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cayleydyn.tables import abelian_from_invariants, abelian_isomorphism_classes

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def abelian_corpus(max_n):
    """One table per isomorphism class of abelian groups of order <= max_n."""
    return [(inv, abelian_from_invariants(inv))
            for n in range(1, max_n + 1) for inv in abelian_isomorphism_classes(n)]


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` records and prints one result line."""
    def record(k: int, ok: bool, detail: str = "") -> bool:
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _ACCEPTANCE[k] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
