import math

import pytest

from undulator import FieldModel, HelixParams, solve_trajectory


def helix_setup(beta_parallel, beta_perp, chi=0.0, n_samples=1024):
    """Field, trajectory and closed-form parameters of one helical case."""
    gamma = 1.0 / math.sqrt(1.0 - beta_parallel ** 2 - beta_perp ** 2)
    model = FieldModel.helical_from_transverse_speed(beta_perp, gamma)
    traj = solve_trajectory(model, gamma, n_samples)
    params = HelixParams.from_speeds(beta_perp, beta_parallel, chi)
    return model, traj, params


@pytest.fixture(scope="session")
def helix_05():
    return helix_setup(0.5, 0.05)


@pytest.fixture(scope="session")
def helix_09():
    return helix_setup(0.9, 0.05)
