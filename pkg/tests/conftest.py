import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qtpinch.corpus import corpus as _corpus  # noqa: E402

# criterion number -> (passed, message), filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def corpus():
    return _corpus()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line("criterion %d: %s  %s" % (k, "PASS" if ok else "FAIL", msg))
