"""Fixtures compartilhadas: redes pequenas, símbolos, potenciais e constantes"""

import numpy as np
import pytest

from spde.fourier_core import DispersionQ, FourierField, FrequencyLattice, forward
from spde.gaussian import NoiseSeed
from spde.renorm import Potential, RenormSet, c_total, compute_renorm_set


@pytest.fixture
def rede_pequena():
    return FrequencyLattice(2)


@pytest.fixture
def semente():
    return NoiseSeed(20240611)


@pytest.fixture
def bilaplaciano():
    return DispersionQ.bilaplaciano(nu=1.0)


@pytest.fixture
def quartico():
    """x⁴/4: λ = 1, a₁ = 1"""
    return Potential.quartico()


@pytest.fixture
def sextico():
    return Potential.sextico(1.0)


@pytest.fixture
def campo_aleatorio():
    """Fábrica de campos reais de banda limitada"""
    def _fabrica(grid: FrequencyLattice, semente: int = 0) -> FourierField:
        rng = np.random.default_rng(semente)
        return forward(rng.standard_normal((grid.M,) * 3), grid)
    return _fabrica


@pytest.fixture
def constantes_quarticas(bilaplaciano, quartico):
    """Constantes discretas em ε = 0.5, K = 2, dt = 0.01"""
    return compute_renorm_set(bilaplaciano, quartico, 0.5, K=2, dt=0.01)


@pytest.fixture
def constantes_triviais():
    """Fábrica de RenormSet com C1 = C2 = C3 = 0"""
    def _fabrica(eps: float, K: int, lam: float = 1.0, dt=None) -> RenormSet:
        return RenormSet(sigma2=1.0, sigma2_eps=0.0, lam=lam, a_m=[1.0], C1=0.0, C2=0.0, C3=0.0,
                         C_total=c_total(lam, 0.0, 0.0, 0.0), eps=eps, K=K, dt=dt)
    return _fabrica
