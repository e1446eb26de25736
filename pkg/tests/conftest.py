import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from edgecarbon.ingest import data_path, load_ci_day, load_power_model, load_model_profiles  # noqa: E402

from _acceptance import LINES as ACCEPTANCE_LINES  # noqa: E402


@pytest.fixture
def server():
    return load_power_model("server_r610")


@pytest.fixture
def rpi():
    return load_power_model("rpi4")


@pytest.fixture
def profiles():
    return {p.name: p for p in load_model_profiles()}


@pytest.fixture
def cy_day():
    return load_ci_day("CY")


@pytest.fixture
def scenarios_dir():
    return data_path("scenarios")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split('.')[0].split()[-1])):
            terminalreporter.write_line(line)
