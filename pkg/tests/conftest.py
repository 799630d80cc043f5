import numpy as np
import pytest

from cliffspec import build_potential, find_negative_spectrum
from cliffspec.wavepacket import (
    default_k_grid,
    default_sigma_grid,
    evolve_many,
    gaussian_packet,
    observables,
    project,
)

# Reference values for the standard cliff: the first eleven negative
# eigenvalues, the exterior probability of the fourth state, and the
# quadruple-scaling mismatch of the second/fourth pair.
REFERENCE_SPECTRUM = [
    -72.6416, -210.342, -715.831, -841.391, -2863.33, -3365.56,
    -11453.3, -13462.3, -45813.2, -53849.0, -183253.0,
]
REFERENCE_TAIL_PROBABILITY = 3.174e-16
REFERENCE_PAIR_RATIO_ERROR = 2.7e-5


@pytest.fixture(scope="session")
def spec():
    return build_potential(40)


@pytest.fixture(scope="session")
def spectrum_report(spec):
    return find_negative_spectrum(spec, -2e5, -10.0, points_per_decade=64)


@pytest.fixture(scope="session")
def bounce_run(spec, spectrum_report):
    """The standard left-moving packet evolved through a full bounce."""
    import time

    t0 = time.time()
    grid = default_sigma_grid()
    packet = gaussian_packet(3.0, 0.3, -8.0, grid)
    coeffs = project(spec, packet, default_k_grid(-8.0, 0.3),
                     bound_lambdas=spectrum_report.roots)
    taus = np.linspace(0.0, 0.32, 17)
    states = evolve_many(coeffs, taus)
    return {
        "packet": packet,
        "coeffs": coeffs,
        "states": states,
        "observables": [observables(st) for st in states],
        "runtime": time.time() - t0,
    }
