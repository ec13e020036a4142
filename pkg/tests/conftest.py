import sys

import numpy as np
import pytest
from hypothesis import settings

from ftcal import scenarios as sc

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def truth(rng):
    return sc.random_true_model(rng)


@pytest.fixture
def body(rng):
    return sc.random_body(rng)


@pytest.fixture
def grid_data(body, truth):
    return sc.make_dataset(body, sc.grid_spec(60, seed=3), truth, "grid", kind="grid")


@pytest.fixture
def sinusoid_data(body, truth, rng):
    return sc.make_dataset(body, sc.sinusoid_spec(rng), truth, "sine")


def random_dataset(rng, C, o, n=200, noise=0.0, name="rand"):
    """Well-excited dataset with Gaussian raw readings (no dynamics)."""
    from ftcal.core import Dataset

    raw0 = rng.normal(0.0, 5.0, (n, 6)) + rng.normal(0.0, 3.0, 6)
    w = raw0 @ C.T + o
    raw = raw0 + noise * rng.standard_normal((n, 6))
    return Dataset(name, np.arange(n) * 0.01, raw, w)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})")
