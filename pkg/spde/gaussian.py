"""
Campo livre e cálculo de Wick
Campo livre estacionário ⟨1⟩_ε por Ornstein–Uhlenbeck exato modo a modo,
polinômios de Hermite, potências de Wick e coeficientes de caos gaussiano.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import hermite_e

from config import NOS_GAUSS_HERMITE
from spde.erros import ErroParametro, ErroTempo
from spde.fourier_core import DispersionQ, FourierField, FrequencyLattice, pointwise

logger = logging.getLogger(__name__)

MASCARA_64 = (1 << 64) - 1

Polinomio = Union[Polynomial, Sequence[float]]


# ============================================
# SEMENTES E FLUXOS
# ============================================

@dataclass(frozen=True)
class NoiseSeed:
    """
    Semente mestre de 64 bits

    Cada (amostra, passo) tem seu próprio fluxo Philox: chave = (mestre,
    amostra) e palavra alta do contador = passo. Os modos são sorteados em
    ordem fixa da rede, então o resultado não depende do escalonamento.
    """

    master: int

    def __post_init__(self):
        if not (0 <= int(self.master) <= MASCARA_64):
            raise ErroParametro(f"semente fora de 64 bits: {self.master}")

    def gerador(self, amostra: int, passo: int) -> np.random.Generator:
        chave = np.array([int(self.master) & MASCARA_64, int(amostra) & MASCARA_64], dtype=np.uint64)
        contador = np.array([0, 0, 0, int(passo) & MASCARA_64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=chave, counter=contador))


def _ruido_hermitiano(gen: np.random.Generator, grid: FrequencyLattice) -> np.ndarray:
    """
    Ruído complexo com E|η_k|² = 1 e η_{−k} = conj(η_k)

    Modo zero real; meia-rede com partes real e imaginária de variância 1/2.
    """
    N = grid.n ** 3
    centro = (N - 1) // 2
    metade = N - 1 - centro
    z = gen.standard_normal(1 + 2 * metade)
    plano = np.empty(N, dtype=np.complex128)
    plano[centro] = z[0]
    meia = (z[1:1 + metade] + 1j * z[1 + metade:]) / math.sqrt(2.0)
    plano[centro + 1:] = meia
    plano[:centro] = np.conj(meia[::-1])
    return plano.reshape(grid.shape)


def _par_ruidos(seed: NoiseSeed, amostra: int, passo: int, grid: FrequencyLattice):
    gen = seed.gerador(amostra, passo)
    eta1 = _ruido_hermitiano(gen, grid)
    eta2 = _ruido_hermitiano(gen, grid)
    return eta1, eta2


# ============================================
# ENSEMBLE DE MODOS OU
# ============================================

@dataclass
class ModeOUEnsemble:
    """
    Estado OU complexo por modo, com simetria conjugada

    Se `acoplado_a` for dado, o ensemble é a componente de um par dirigido
    pelo mesmo ruído branco que o campo livre do símbolo de referência
    (cuja trajetória usa apenas o primeiro ruído de cada passo).
    """

    grid: FrequencyLattice
    Q: DispersionQ
    t: float
    coeffs: np.ndarray
    seed: NoiseSeed
    amostra: int = 0
    passo: int = 0
    acoplado_a: Optional[DispersionQ] = None

    def campo(self) -> FourierField:
        return FourierField(self.grid, self.coeffs.copy(), True)

    def _lambdas(self):
        a = self.Q.bracket_sq_rede(self.grid)
        b = a if self.acoplado_a is None else self.acoplado_a.bracket_sq_rede(self.grid)
        return a, b


def sample_stationary(seed: NoiseSeed, grid: FrequencyLattice, Q: DispersionQ,
                      amostra: int = 0, acoplado_a: Optional[DispersionQ] = None,
                      t: float = 0.0) -> ModeOUEnsemble:
    """
    Sorteia o campo livre estacionário, E|f̂(k)|² = 1/(2⟨k⟩_ε²)

    Args:
        seed: semente mestre
        grid: rede de frequências
        Q: símbolo (com ε)
        amostra: índice da réplica Monte Carlo
        acoplado_a: símbolo de referência para o acoplamento por ruído comum
        t: instante associado ao estado
    """
    ens = ModeOUEnsemble(grid, Q, t, np.zeros(grid.shape, dtype=np.complex128),
                         seed, amostra, 0, acoplado_a)
    a, b = ens._lambdas()
    eta1, eta2 = _par_ruidos(seed, amostra, 0, grid)
    if acoplado_a is None:
        ens.coeffs = eta1 / np.sqrt(2.0 * a)
    else:
        # cov(X_a, X_b) = 1/(a+b) com X_b = η₁/√(2b)
        c1 = np.sqrt(2.0 * b) / (a + b)
        c2 = np.sqrt(np.maximum(1.0 / (2.0 * a) - c1 * c1, 0.0))
        ens.coeffs = c1 * eta1 + c2 * eta2
    return ens


def advance(ens: ModeOUEnsemble, dt: float) -> ModeOUEnsemble:
    """
    Atualização OU exata: e^{−⟨k⟩²dt}·x + ruído de variância (1−e^{−2⟨k⟩²dt})/(2⟨k⟩²)

    Returns:
        novo ensemble (o argumento não é alterado)
    """
    if dt <= 0:
        raise ErroTempo(f"passo de tempo deve ser > 0: {dt}")
    a, b = ens._lambdas()
    passo = ens.passo + 1
    eta1, eta2 = _par_ruidos(ens.seed, ens.amostra, passo, ens.grid)
    decaimento = np.exp(-a * dt)
    var_a = -np.expm1(-2.0 * a * dt) / (2.0 * a)
    if ens.acoplado_a is None:
        incremento = np.sqrt(var_a) * eta1
    else:
        var_b = -np.expm1(-2.0 * b * dt) / (2.0 * b)
        cov = -np.expm1(-(a + b) * dt) / (a + b)
        c1 = cov / np.sqrt(var_b)
        c2 = np.sqrt(np.maximum(var_a - c1 * c1, 0.0))
        incremento = c1 * eta1 + c2 * eta2
    return replace(ens, t=ens.t + dt, coeffs=decaimento * ens.coeffs + incremento, passo=passo)


def sample_many(seed: NoiseSeed, grid: FrequencyLattice, Q: DispersionQ,
                amostras: int, threads: int = 1,
                funcao: Optional[Callable[[ModeOUEnsemble], object]] = None) -> List[object]:
    """
    Sorteia `amostras` réplicas em paralelo, na ordem dos índices

    Args:
        funcao: aplicada a cada ensemble dentro do trabalhador (padrão: identidade)
    """
    def _tarefa(i: int):
        ens = sample_stationary(seed, grid, Q, amostra=i)
        return ens if funcao is None else funcao(ens)

    if threads <= 1:
        return [_tarefa(i) for i in range(amostras)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(_tarefa, range(amostras)))


# ============================================
# HERMITE E WICK
# ============================================

def hermite(n: int, x, nu: float):
    """H_n(x; ν) pela recorrência H_{n+1} = x·H_n − nν·H_{n−1}"""
    if n < 0:
        raise ErroParametro(f"grau de Hermite negativo: {n}")
    if nu < 0:
        raise ErroParametro(f"variância negativa: {nu}")
    x = np.asarray(x, dtype=float)
    anterior = np.ones_like(x)
    if n == 0:
        return anterior if x.ndim else float(anterior)
    atual = x.copy()
    for m in range(1, n):
        anterior, atual = atual, x * atual - m * nu * anterior
    return atual if x.ndim else float(atual)


def hermite_polinomio(n: int, nu: float) -> Polynomial:
    """H_n(·; ν) como polinômio"""
    anterior, atual = Polynomial([1.0]), Polynomial([0.0, 1.0])
    if n == 0:
        return anterior
    x = Polynomial([0.0, 1.0])
    for m in range(1, n):
        anterior, atual = atual, x * atual - m * nu * anterior
    return atual


def wick_power(f_phys, n: int, nu: float):
    """Potência de Wick pontual H_n(f(x); ν)"""
    return hermite(n, f_phys, nu)


def wick_power_campo(F: FourierField, n: int, nu: float) -> FourierField:
    """Potência de Wick de um campo, projetada de volta na rede"""
    return pointwise([F], lambda f: wick_power(f, n, nu), max(n, 1))


# ============================================
# CAOS GAUSSIANO
# ============================================

def _como_polinomio(f) -> Optional[Polynomial]:
    if isinstance(f, Polynomial):
        return f
    if callable(f):
        return None
    return Polynomial(np.asarray(f, dtype=float))


def _momento(grau: int, sigma2: float) -> float:
    """E X^grau para X ~ N(0, σ²)"""
    if grau % 2:
        return 0.0
    m = grau // 2
    return float(math.prod(range(1, 2 * m, 2))) * sigma2 ** m


def gaussian_expectation(f: Union[Polinomio, Callable], sigma2: float) -> float:
    """
    E f(X), X ~ N(0, σ²)

    Polinômios (Polynomial ou lista de coeficientes crescentes) usam os
    momentos exatos; funções genéricas usam Gauss–Hermite.
    """
    if sigma2 < 0:
        raise ErroParametro(f"variância negativa: {sigma2}")
    p = _como_polinomio(f)
    if p is not None:
        return float(sum(c * _momento(i, sigma2) for i, c in enumerate(p.coef)))
    nos, pesos = hermite_e.hermegauss(NOS_GAUSS_HERMITE)
    valores = np.asarray(f(np.sqrt(sigma2) * nos), dtype=float)
    return float(np.dot(pesos, valores) / math.sqrt(2.0 * math.pi))


def chaos_coefficients(f: Polinomio, nu: float) -> List[float]:
    """
    c_k = E[f^{(k)}(X)]/k!, X ~ N(0, ν), de modo que f = Σ c_k H_k(·; ν)

    Returns:
        lista [c_0, ..., c_grau]
    """
    if nu < 0:
        raise ErroParametro(f"variância negativa: {nu}")
    p = _como_polinomio(f)
    if p is None:
        raise ErroParametro("chaos_coefficients exige um polinômio")
    grau = p.degree()
    coeficientes = []
    derivada = p
    for k in range(grau + 1):
        coeficientes.append(gaussian_expectation(derivada, nu) / math.factorial(k))
        derivada = derivada.deriv()
    return coeficientes
