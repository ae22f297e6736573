import time

import numpy as np
import pytest

from qcorr import GarchParams, fit_gjr, simulate

# Truth for the parameter-recovery experiments.
RECOVERY_TRUE = GarchParams(kind="gjr", mu=0.0, omega=0.05, alpha1=0.05, beta1=0.90, gamma1=0.06)
RECOVERY_SEEDS = [777 + i for i in range(20)]

# Wall-clock seconds the 20-fit recovery experiment took; filled by the fixture.
RECOVERY_ELAPSED = {}


@pytest.fixture(scope="session")
def gjr_recovery_fits():
    """20 GJR fits on synthetic data at T=50000, shared across test modules."""
    start = time.perf_counter()
    fits = {}
    for seed in RECOVERY_SEEDS:
        sim = simulate(RECOVERY_TRUE, length=50000, seed=seed)
        fits[seed] = fit_gjr(sim.returns)
    RECOVERY_ELAPSED["seconds"] = time.perf_counter() - start
    return fits


@pytest.fixture(scope="session")
def gjr_recovery_fits_short():
    """The same 20 experiments fitted on a T=2000 prefix of fresh data."""
    fits = {}
    for seed in RECOVERY_SEEDS:
        sim = simulate(RECOVERY_TRUE, length=2000, seed=seed)
        fits[seed] = fit_gjr(sim.returns)
    return fits


def rng_for(test_seed: int) -> np.random.Generator:
    return np.random.default_rng(test_seed)
