import json
import pathlib

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def oracle():
    """Values frozen from an independent mpmath computation (tools/derive_oracles.py)."""
    return json.loads((DATA / "oracle_values.json").read_text())


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"ACCEPTANCE {k:2d} {'PASS' if ok else 'FAIL'}: {detail}")
