import numpy as np
import pytest

from tsharvest.analytics import ModelParams
from tsharvest.config import ExperimentConfig
from tsharvest.levy import LevyParams


@pytest.fixture
def baseline():
    return ModelParams()


@pytest.fixture
def levy():
    return LevyParams()


@pytest.fixture
def small_cfg(tmp_path):
    """Baseline experiment shrunk to seconds of runtime."""
    from dataclasses import replace

    cfg = ExperimentConfig()
    sim = cfg.sim.replace(horizon=20.0)
    exp = replace(cfg.experiment, n_paths=3, output_dir=str(tmp_path), stability_paths=6,
                  coupling_pairs=3, coupling_horizon=10.0, beta_grid="lin:0.2:1.8:5",
                  lambda_grid="lin:0.5:3.5:4", tau2_grid="lin:0:1:5", sigma_grid="lin:0:2:9",
                  n_points=21, validate_increments=20_000)
    return ExperimentConfig(model=cfg.model, sim=sim, quad=cfg.quad, experiment=exp)


def rel(a, b):
    return abs(a - b) / abs(b)


np.seterr(all="ignore")


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if name.startswith("test_criterion_"):
        number = int(name.split("_")[2])
        detail = ACCEPTANCE_LINES.get(number, "")
        ACCEPTANCE_LINES[number] = f"{'PASS' if report.passed else 'FAIL'}  criterion {number:>2}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
