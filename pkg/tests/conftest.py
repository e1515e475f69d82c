import numpy as np
import pytest

import homsr
from homsr import SourceModel, Strategy


@pytest.fixture(scope="session")
def mc_spatial_report():
    """The 200 x 1000-pair Monte Carlo run at the benchmark scene
    (thermal pair, V = 0.92, eps = 0.5), shared between the estimator
    efficiency tests and the acceptance suite."""
    scene = homsr.SourceScene(0.0, 0.5, visibility=0.92)
    return homsr.batch_precision(
        scene,
        SourceModel.THERMAL_PAIR,
        Strategy.TWO_PHOTON_SPATIAL,
        batch_size=1000,
        n_batches=200,
        seed=20260809,
    )


def assert_rel(value, expected, rtol, label=""):
    ok = abs(value - expected) <= rtol * abs(expected)
    assert ok, f"{label}: {value!r} not within {rtol:.3%} of {expected!r} (rel {abs(value/expected-1):.4%})"


@pytest.fixture
def rel():
    return assert_rel
