import os
import sys
import pathlib as pl

import numpy as np
import pandas as pd
import pytest
import hypothesis

__all__ = [
    'DATA_DIR',
    'ieee30',
    'loads_four_years',
    'pjm_data_path',
    'pytest_addoption',
    'pytest_collection_modifyitems',
    'pytest_configure',
    'rng',
    'three_bus',
    'three_bus_path',
]

sys.path.append(str(pl.Path(__file__).parent.parent))

from lrshield import loads as _loads
from lrshield.grid import load_network, builtin_network

DATA_DIR = pl.Path(__file__).parent / 'data'

hypothesis.settings.register_profile(
    'ci',
    max_examples = 100,
    deadline = None,
)
hypothesis.settings.register_profile(
    'dev',
    max_examples = 25,
    deadline = None,
)
hypothesis.settings.load_profile(os.getenv('HYPOTHESIS_PROFILE', 'dev'))


def pytest_configure(config):
    """Register custom markers."""

    config.addinivalue_line(
        'markers',
        'slow: long running test (skipped unless --run-slow is set)',
    )
    config.addinivalue_line(
        'markers',
        'requires_pjm: test reading PJM metered load files '
        '(skipped unless --pjm-data is set)',
    )


def pytest_collection_modifyitems(config, items):
    """Skip slow and PJM data tests unless asked for."""

    skips = {
        'slow': (
            not config.getoption('--run-slow'),
            'Slow test, use --run-slow to run it',
        ),
        'requires_pjm': (
            not config.getoption('--pjm-data'),
            'No PJM data directory, use --pjm-data to set one',
        ),
    }

    for item in items:

        for marker, (skip, reason) in skips.items():

            if skip and marker in item.keywords:

                item.add_marker(pytest.mark.skip(reason = reason))


def pytest_addoption(parser):

    parser.addoption(
        '--run-slow',
        action = 'store_true',
        default = False,
        help = 'Run slow tests (full pipeline, IEEE 30-bus attacks)',
    )
    parser.addoption(
        '--pjm-data',
        default = None,
        action = 'store',
        help = 'Directory of PJM hourly metered load CSV files',
    )


@pytest.fixture(scope = 'session')
def three_bus_path() -> pl.Path:

    return DATA_DIR / 'three_bus.json'


@pytest.fixture(scope = 'session')
def three_bus(three_bus_path):

    return load_network(three_bus_path)


@pytest.fixture(scope = 'session')
def ieee30():

    return builtin_network('ieee30')


@pytest.fixture
def rng() -> np.random.Generator:

    return np.random.default_rng(20150101)


@pytest.fixture(scope = 'session')
def loads_four_years() -> pd.DataFrame:
    """
    Synthetic zonal loads over 2015 to 2018, normalized and mapped to the
    20 loads.
    """

    zonal = _loads.synth_loads('2015-01-01', '2018-12-31', rng = 1)
    series = _loads.normalize_calendar(zonal)

    return _loads.map_zones_to_buses(series)


@pytest.fixture(scope = 'session')
def pjm_data_path(request) -> pl.Path:

    return pl.Path(request.config.getoption('--pjm-data'))
