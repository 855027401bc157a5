import pytest

from reflectsim import Brownian, ExperimentConfig, run_error_experiment

SECTION4_MODEL = Brownian(mu=-0.5, sigma2=2.0)


@pytest.fixture(scope="session")
def section4_report():
    """Coupled error study at the acceptance scale (n=100, n_fine=10^4)."""
    cfg = ExperimentConfig(
        model=SECTION4_MODEL,
        x0=0.3,
        n=100,
        n_fine=10000,
        replications=20000,
        seed=20260810,
        workers=2,
    )
    return run_error_experiment(cfg)


@pytest.fixture(scope="session")
def section4_fine_report():
    """Same study against the fully faithful fine reference (n_fine=50000)."""
    cfg = ExperimentConfig(
        model=SECTION4_MODEL,
        x0=0.3,
        n=100,
        n_fine=50000,
        replications=20000,
        seed=20260810,
        workers=2,
    )
    return run_error_experiment(cfg)


@pytest.fixture(scope="session")
def regulator_report():
    """Regulator-accumulation study (n=1000, n_fine=10^5)."""
    cfg = ExperimentConfig(
        model=SECTION4_MODEL,
        x0=0.3,
        n=1000,
        n_fine=100000,
        replications=8000,
        seed=31415,
        workers=2,
    )
    return run_error_experiment(cfg)
