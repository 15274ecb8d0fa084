import sys
from pathlib import Path

import hypothesis
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

hypothesis.settings.register_profile("ci", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("ci")

np.seterr(all="raise", under="ignore")

from subsql.model import default_materials, reference_stack  # noqa: E402



@pytest.fixture(scope="session")
def materials():
    return default_materials()


@pytest.fixture(scope="session")
def baseline_stack():
    return reference_stack((35.8, 34.7))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    summary = getattr(mod, "SUMMARY", None)
    if not summary:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(summary):
        terminalreporter.write_line(summary[number])
