import pytest

from betaensemble import BetaParams, CorrelatorEngine, Potential, solve_endpoints


@pytest.fixture(scope="session")
def quartic():
    return solve_endpoints(Potential.even_quartic(1.0))


@pytest.fixture(scope="session")
def skew():
    return solve_endpoints(Potential(t1=0.3, t2=1.0, t3=0.5, t4=4.0, t0=1.0))


@pytest.fixture(scope="session")
def engines(quartic):
    return {b: CorrelatorEngine(quartic, BetaParams.make(b, 50, 1.0)) for b in (0.5, 1.0, 2.0)}
