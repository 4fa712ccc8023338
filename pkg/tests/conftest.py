# tests/conftest.py
import pytest

from cycleweights.asymptotics import solve_saddle
from cycleweights.exact_oracle import build_h_table
from cycleweights.sampler import sample_batch
from cycleweights.schemas import SamplerConfig
from cycleweights.weights import WeightSequence

DESK_N = 20000
DESK_SAMPLES = 5000
DESK_SEED = 7


@pytest.fixture
def linear():
    """θ_k = k"""
    return WeightSequence.polynomial(1.0)


@pytest.fixture
def ewens2():
    return WeightSequence.ewens(2.0)


@pytest.fixture
def cache_dir(tmp_path):
    return tmp_path / "htables"


@pytest.fixture(scope="session")
def linear_table_2000():
    return build_h_table(WeightSequence.polynomial(1.0), 2000)


@pytest.fixture(scope="session")
def desk_run():
    """α = 1, n = 2·10⁴, N = 5000, seed 7: saddle data and the sampled batch."""
    w = WeightSequence.polynomial(1.0)
    sd = solve_saddle(w, DESK_N)
    table = build_h_table(w, DESK_N)
    cfg = SamplerConfig(n=DESK_N, num_samples=DESK_SAMPLES, seed=DESK_SEED, workers=1)
    return sd, list(sample_batch(w, table, cfg))
