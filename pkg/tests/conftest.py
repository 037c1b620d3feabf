import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_dark_angles(rng, d):
    from darkpath.darkbright import DarkAngles

    return DarkAngles(rng.uniform(0.0, np.pi, d - 1), rng.uniform(0.0, 2 * np.pi, d - 1))


def random_loop(rng, d, eta=None, tau=1.0):
    from darkpath.pulses import LoopParams

    return LoopParams(
        angles=random_dark_angles(rng, d),
        pulse_phases=rng.uniform(0.0, 2 * np.pi, d - 1),
        gammas=rng.uniform(0.0, 2 * np.pi, d - 1),
        eta=rng.uniform(0.0, 5.0) if eta is None else eta,
        tau=tau,
    )
