import numpy as np
import pytest

from stocktrend.evaluation.synthetic import PRESETS, generate_synthetic

FIXTURE_CSV = """date,open,high,low,close,volume
2020-01-02,100,101.25,99.5,100.5,1000
2020-01-03,100.5,102,100.25,101.75,1200
2020-01-06,101.75,101.75,99,99.5,900
2020-01-07,99.5,100.125,98.5,98.75,1500
2020-01-08,98.75,99.875,98.25,99.25,1100
2020-01-09,99.25,101.5,99,101.25,1300
2020-01-10,101.25,103.5,101,103.125,2100
2020-01-13,103.125,103.25,102,102.5,800
2020-01-14,102.5,104.75,102.25,104.5,1750
2020-01-15,104.5,105,103.5,103.75,1025
"""


@pytest.fixture
def fixture_csv():
    return FIXTURE_CSV


@pytest.fixture(scope="session")
def moderate_series():
    return generate_synthetic(1500, PRESETS["moderate"], seed=7)


@pytest.fixture
def rs():
    return np.random.default_rng(12345)
