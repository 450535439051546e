import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from superarrivals.core import default_config  # noqa: E402
from superarrivals.propagator import run  # noqa: E402

PAPER_N = (2, 10, 30, 50)


@functools.lru_cache(maxsize=None)
def cached_run(N=None):
    """Default-config run, static when ``N`` is None; shared across test modules."""
    cfg = default_config()
    cfg = cfg.static() if N is None else cfg.perturbed(N)
    return run(cfg)


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session")
def static_run():
    return cached_run(None)


@pytest.fixture(scope="session")
def perturbed_runs():
    return {N: cached_run(N) for N in PAPER_N}
