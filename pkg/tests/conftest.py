import numpy as np
import pytest

from fbplab.config import ScenarioConfig
from fbplab.counterexample import construct_family
from fbplab.phase_model import PhaseParams
from fbplab.solvers import solve_unstable_backward
from fbplab.spectral import CosineSeries, Grid


@pytest.fixture(scope="session")
def params():
    return PhaseParams.default()


@pytest.fixture(scope="session")
def grid():
    return Grid(L=np.pi, T_end=1.0, n_x=128, n_t=256, n_modes=32)


@pytest.fixture(scope="session")
def final_datum(grid):
    return CosineSeries(grid.L, [0.0, 0.1])


@pytest.fixture(scope="session")
def backward(final_datum, params, grid):
    return solve_unstable_backward(final_datum, params, grid)


@pytest.fixture(scope="session")
def default_sources(grid):
    return [CosineSeries(grid.L, [1.0]),
            CosineSeries(grid.L, [1.0, 0.3]),
            CosineSeries(grid.L, [1.0, 0.0, 0.3])]


@pytest.fixture(scope="session")
def family(final_datum, default_sources, params, grid):
    """Baseline plus the three reference sourced triples."""
    return construct_family(final_datum, default_sources, params, grid)


@pytest.fixture(scope="session")
def default_config(tmp_path_factory):
    out = tmp_path_factory.mktemp("scenario_out")
    return ScenarioConfig.default().with_output(out)
