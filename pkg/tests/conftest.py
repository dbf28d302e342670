from pathlib import Path

import numpy as np
import pytest

from pidmodel.binned import load_binned
from pidmodel.demography import stationary_pyramids, synthetic_pyramid
from pidmodel.economy import load_growth_series
from pidmodel.trajectory import PRESETS, build_context

DATA = Path(__file__).resolve().parents[1] / "data"
CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture(scope="session")
def series():
    return load_growth_series(DATA / "gdp.csv")


@pytest.fixture(scope="session")
def baseline(series):
    params = PRESETS[1960]
    context = build_context(params, series, 2002)
    pyramids = stationary_pyramids(synthetic_pyramid(1960, "uniform", level=1000.0), range(1960, 2003))
    return params, context, pyramids


@pytest.fixture(scope="session")
def irs():
    return load_binned(DATA / "irs_1990.csv"), load_binned(DATA / "irs_2004.csv")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
