"""
Constantes de renormalização
σ², σ_ε², λ, coeficientes de caos a_m, C1, C2, C3, C_ε, as integrais do
núcleo G_{ε,m} e as constantes do modelo padrão c^(1), c^(2).
"""

import itertools
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import fft as sfft
from scipy import integrate, stats

from config import (
    FATOR_CORTE,
    LARGURA_PAINEL,
    LIMITE_GRADE_FFT,
    LIMITE_ITERACOES_DIRETAS,
    NOS_POR_PAINEL,
)
from spde.besov import DyadicPartition, peso_ressonante
from spde.erros import ErroCrescimento, ErroInviavel, ErroParametro, ErroSimbolo
from spde.fourier_core import DispersionQ, FrequencyLattice, validate_symbol
from spde.gaussian import gaussian_expectation

logger = logging.getLogger(__name__)


# ============================================
# POTENCIAL
# ============================================

@dataclass(frozen=True)
class Potential:
    """
    V(x) = Σ_j v_{2j} x^{2j}, coeficientes (v₂, v₄, ..., v_{2n})

    O grau nominal 2n é dado pelo tamanho da lista (n >= 2).
    """

    coeffs: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise ErroParametro("o potencial precisa ter grau >= 4 (ao menos v₂ e v₄)")

    @classmethod
    def quartico(cls, g: float = 0.25) -> "Potential":
        """V = g x⁴ (padrão x⁴/4)"""
        return cls((0.0, g))

    @classmethod
    def sextico(cls, a: float = 1.0) -> "Potential":
        """V = (a/6) x⁶"""
        return cls((0.0, 0.0, a / 6.0))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def grau(self) -> int:
        return 2 * self.n

    @property
    def quartico_puro(self) -> bool:
        """V⁽⁴⁾ constante: nenhum termo de grau > 4"""
        return all(c == 0.0 for c in self.coeffs[2:])

    def polinomio(self) -> Polynomial:
        coef = np.zeros(self.grau + 1)
        for j, v in enumerate(self.coeffs, start=1):
            coef[2 * j] = v
        return Polynomial(coef)

    def derivada(self, ordem: int) -> Polynomial:
        return self.polinomio().deriv(ordem) if ordem > 0 else self.polinomio()

    def eval(self, x, ordem: int = 0):
        return self.derivada(ordem)(x)


# ============================================
# CONJUNTO DE CONSTANTES
# ============================================

@dataclass
class RenormSet:
    """Constantes da teoria em um par (ε, K)"""

    sigma2: float
    sigma2_eps: float
    lam: float
    a_m: List[float]
    C1: float
    C2: float
    C3: float
    C_total: float
    eps: float
    K: int
    dt: Optional[float] = None
    cauda_sigma2: float = 0.0
    simbolo: str = ""
    potencial: List[float] = field(default_factory=list)

    def __post_init__(self):
        esperado = c_total(self.lam, self.C1, self.C2, self.C3)
        if abs(self.C_total - esperado) > 1e-12 * max(1.0, abs(esperado)):
            raise ErroParametro("C_total inconsistente com 3λC1 − 9λ²C2 − 6λ²C3")

    def como_dict(self) -> Dict[str, object]:
        return asdict(self)


# ============================================
# σ² E σ_ε²
# ============================================

def sigma2_limit(Q: DispersionQ, rmax: float = 50.0, tol: float = 1e-10) -> float:
    """
    σ² = (1/2)∫_{ℝ³} 𝒬(2π|θ|)⁻¹ dθ = 2π∫₀^∞ r²/𝒬(2πr) dr

    Quadratura adaptativa em [0, rmax] e na cauda [rmax, ∞). Como 𝒬(z) ≥ ĉ z^{3+η̂},
    a cauda numérica não passa de 2π/(ĉ(2π)^{3+η̂})·rmax^{-η̂}/η̂; se passar, o
    ajuste de crescimento ou a quadratura falhou e isso é avisado no log.

    Raises:
        ErroCrescimento: 𝒬 não cresce mais rápido que z³ (integral diverge)
        ErroSimbolo: 𝒬 negativo
    """
    relatorio = validate_symbol(Q)
    if not relatorio.itens[2]:
        raise ErroSimbolo(f"𝒬 negativo: {relatorio.mensagens[2]}")
    if not relatorio.itens[3]:
        raise ErroCrescimento(f"integral de σ² diverge: {relatorio.mensagens[3]}")

    def integrando(r):
        if r == 0.0:
            return 1.0 / (2.0 * np.pi)
        z = 2.0 * np.pi * r
        return 2.0 * np.pi * r * r / float(Q.avaliar(np.array([z]))[0])

    pontos = [1.0 / (2.0 * np.pi)] if rmax > 1.0 / (2.0 * np.pi) else None
    corpo, _ = integrate.quad(integrando, 0.0, rmax, epsabs=tol, epsrel=tol, limit=500, points=pontos)
    cauda, _ = integrate.quad(integrando, rmax, np.inf, epsabs=tol, epsrel=tol, limit=500)

    eta, c = relatorio.eta_hat, relatorio.c_hat
    cota = 2.0 * np.pi / (c * (2.0 * np.pi) ** (3.0 + eta)) * rmax ** (-eta) / eta
    logger.debug("σ² (%s): corpo=%.12g cauda=%.3e cota=%.3e", Q.nome, corpo, cauda, cota)
    if cauda > cota * (1.0 + 1e-6) + tol:
        logger.warning("cauda de σ² (%s) acima da cota analítica: %.3e > %.3e", Q.nome, cauda, cota)
    return float(corpo + cauda)


def sigma2_eps(Q: DispersionQ, eps: float, K: int) -> float:
    """σ_ε² = (ε/2) Σ_{|k|_∞≤K} 1/⟨k⟩_ε²"""
    if eps <= 0:
        raise ErroParametro("σ_ε² exige ε > 0")
    if K < 0:
        raise ErroParametro(f"K deve ser >= 0: {K}")
    lam = Q.com_eps(eps).bracket_sq_rede(FrequencyLattice(K))
    return float(0.5 * eps * np.sum(1.0 / lam))


def cauda_sigma2_eps(Q: DispersionQ, eps: float, K: int) -> float:
    """Estimativa contínua da parte de σ_ε² fora da rede: 2π∫_{εK}^∞ r²/(ε²+𝒬(2πr)) dr"""
    def integrando(r):
        return 2.0 * np.pi * r * r / (eps * eps + float(Q.avaliar(np.array([2.0 * np.pi * r]))[0]))

    valor, _ = integrate.quad(integrando, eps * K, np.inf, limit=500)
    return float(valor)


def corte_padrao(eps: float) -> int:
    """K = ceil(4/ε)"""
    if eps <= 0:
        raise ErroParametro("o corte padrão exige ε > 0")
    return int(math.ceil(FATOR_CORTE / eps - 1e-12))


# ============================================
# λ, a_m, C1
# ============================================

def coupling_lambda(V: Potential, sigma2: float) -> float:
    """λ = (1/6) E V⁽⁴⁾(N(0, σ²))"""
    if sigma2 < 0:
        raise ErroParametro(f"σ² negativo: {sigma2}")
    return gaussian_expectation(V.derivada(4), sigma2) / 6.0


def a_coeffs(V: Potential, eps: float, lam: float, s2e: float) -> List[float]:
    """a_m = E V^{(2m+2)}(N(0, σ_ε²)) / (6λ(2m−1)!), m = 1..n−1"""
    if lam == 0:
        raise ErroParametro("a_m exige λ ≠ 0")
    return [
        gaussian_expectation(V.derivada(2 * m + 2), s2e) / (6.0 * lam * math.factorial(2 * m - 1))
        for m in range(1, V.n)
    ]


def c1(V: Potential, eps: float, lam: float, s2e: float) -> float:
    """C1 = E V″(N(0, σ_ε²)) / (3λε)"""
    if lam == 0:
        raise ErroParametro("C1 exige λ ≠ 0")
    if eps <= 0:
        raise ErroParametro("C1 exige ε > 0")
    return gaussian_expectation(V.derivada(2), s2e) / (3.0 * lam * eps)


def chaos_weights(a_m: Sequence[float], eps: float, objeto: str) -> Dict[int, float]:
    """
    Pesos da expansão em caos de Wick dos objetos ⟨1'⟩, ⟨2'⟩ e ⟨3'⟩

    Args:
        a_m: coeficientes a_1..a_{n−1}
        eps: ε
        objeto: "1'", "2'" ou "3'"

    Returns:
        {ordem de Wick: peso}
    """
    pesos = {}
    for m, a in enumerate(a_m, start=1):
        escala = eps ** (m - 1)
        if objeto == "1'":
            pesos[2 * m - 1] = a * escala
        elif objeto == "2'":
            pesos[2 * m] = a / m * escala
        elif objeto == "3'":
            pesos[2 * m + 1] = 3.0 * a / (m * (2 * m + 1)) * escala
        else:
            raise ErroParametro(f"objeto sem expansão em caos: {objeto}")
    return pesos


# ============================================
# SOMAS DE REDE DO NÚCLEO
# ============================================

def _fator_tempo(lam_ext: np.ndarray, mu: np.ndarray, dt: Optional[float]) -> np.ndarray:
    """∫₀^∞ e^{−s(Λ+μ)} ds ou sua versão de Euler exponencial com passo dt"""
    if dt is None:
        return 1.0 / (lam_ext + mu)
    phi = -np.expm1(-lam_ext * dt) / lam_ext
    return phi * np.exp(-mu * dt) / (-np.expm1(-(lam_ext + mu) * dt))


def _fatores_externos(Q: DispersionQ, K: int, k: Sequence[int]):
    """Máscara, Λ(ℓ+k) e peso ressonante w(ℓ+k, −ℓ) na rede de ℓ"""
    grid = FrequencyLattice(K)
    l1, l2, l3 = grid.vetores()
    s1, s2, s3 = l1 + k[0], l2 + k[1], l3 + k[2]
    dentro = (np.abs(s1) <= K) & (np.abs(s2) <= K) & (np.abs(s3) <= K)
    norma_s = np.sqrt(s1 * s1 + s2 * s2 + s3 * s3)
    lam_s = Q.bracket_sq(norma_s)
    if any(int(c) != 0 for c in k):
        peso = peso_ressonante(DyadicPartition(K), norma_s, grid.normas())
    else:
        peso = np.ones(grid.shape)
    return dentro, lam_s, peso


def _soma_direta(Q: DispersionQ, N: int, K: int, k: Sequence[int], dt: Optional[float]) -> float:
    grid = FrequencyLattice(K)
    n = grid.n
    n3 = n ** 3
    if n3 ** (N - 1) > LIMITE_ITERACOES_DIRETAS:
        raise ErroInviavel(f"soma direta com N={N}, K={K} exige {n3 ** (N - 1)} iterações")

    vetores = np.stack([c.ravel() for c in grid.vetores()], axis=1)
    lam = Q.bracket_sq_rede(grid).ravel()
    dentro_ext, lam_s, peso = (a.ravel() for a in _fatores_externos(Q, K, k))

    parciais = []
    for tupla in itertools.product(range(n3), repeat=N - 1):
        tupla = list(tupla)
        base = vetores[tupla].sum(axis=0)
        produto = float(np.prod(1.0 / lam[tupla]))
        mu0 = float(np.sum(lam[tupla]))

        ell = base + vetores
        valido = np.all(np.abs(ell) <= K, axis=1)
        ell = ell[valido]
        idx = ((ell[:, 0] + K) * n + (ell[:, 1] + K)) * n + (ell[:, 2] + K)
        ok = dentro_ext[idx]
        if not np.any(ok):
            continue
        idx = idx[ok]
        lam_ultima = lam[valido][ok]
        mu = mu0 + lam_ultima
        termos = peso[idx] * produto / lam_ultima * _fator_tempo(lam_s[idx], mu, dt)
        parciais.append(float(np.sum(termos)))

    return math.factorial(N) / 2.0 ** N * math.fsum(parciais)


def _nos_log_tempo(r_min: float, r_max: float, nos_por_painel: int) -> Tuple[np.ndarray, np.ndarray, float]:
    """Nós e pesos em s (ds já incluído) para ∫_{s_a}^{s_b}, com s_a devolvido à parte"""
    s_a = 1e-4 / r_max
    s_b = 40.0 / r_min
    u_a, u_b = math.log(s_a), math.log(s_b)
    paineis = max(1, int(math.ceil((u_b - u_a) / LARGURA_PAINEL)))
    x, w = np.polynomial.legendre.leggauss(nos_por_painel)
    bordas = np.linspace(u_a, u_b, paineis + 1)
    us, ws = [], []
    for a, b in zip(bordas[:-1], bordas[1:]):
        us.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    u = np.concatenate(us)
    s = np.exp(u)
    return s, np.concatenate(ws) * s, s_a


def _soma_fft(Q: DispersionQ, N: int, K: int, k: Sequence[int],
              nos_por_painel: int, threads: int) -> float:
    L = sfft.next_fast_len((N + 1) * K + 1, real=True)
    if L > LIMITE_GRADE_FFT:
        raise ErroInviavel(f"grade FFT {L}³ acima do limite para N={N}, K={K}")

    grid = FrequencyLattice(K)
    lam = Q.bracket_sq_rede(grid)
    dentro, lam_s, peso = _fatores_externos(Q, K, k)
    idx = grid.frequencias() % L
    bloco = np.ix_(idx, idx, idx)

    r_min = float(N + np.min(lam_s[dentro]))
    r_max = float(N * np.max(lam) + np.max(lam_s[dentro]))
    s_nos, s_pesos, s_a = _nos_log_tempo(r_min, r_max, nos_por_painel)

    def integrando(s: float) -> float:
        f = np.zeros((L, L, L))
        f[bloco] = np.exp(-s * lam) / lam
        espectro = sfft.rfftn(f, workers=threads)
        conv = sfft.irfftn(espectro ** N, s=(L, L, L), workers=threads)[bloco]
        return float(np.sum(np.where(dentro, peso * np.exp(-s * lam_s) * conv, 0.0)))

    valores = np.array([integrando(s) for s in s_nos])
    total = float(np.dot(s_pesos, valores)) + s_a * integrando(s_a)
    return math.factorial(N) / 2.0 ** N * total


def kernel_lattice_sum(Q: DispersionQ, N: int, K: int, k: Sequence[int] = (0, 0, 0),
                       dt: Optional[float] = None, metodo: str = "auto",
                       nos_por_painel: int = NOS_POR_PAINEL, threads: int = 1) -> float:
    """
    E[Ĩ(◇N)∘◇N] no modo k, com Ĩ a integral de Duhamel estacionária

    N!/2^N Σ_{ℓ₁..ℓ_N} w(ℓ+k, −ℓ) ∏⟨ℓ_j⟩⁻² · T(⟨ℓ+k⟩², Σ⟨ℓ_j⟩²), ℓ = Σℓ_j,
    com |ℓ_j|_∞, |ℓ|_∞, |ℓ+k|_∞ ≤ K. T = 1/(Λ+μ) em tempo contínuo ou a
    soma de Euler exponencial quando dt é dado.

    Args:
        Q: símbolo já com ε
        N: número de pernas
        K: corte da rede
        k: modo externo
        dt: passo de tempo da discretização (None: contínuo)
        metodo: "auto", "direto" ou "fft" (a FFT só atende tempo contínuo)
    """
    if N < 1:
        raise ErroParametro(f"número de pernas inválido: {N}")
    k = tuple(int(c) for c in k)
    if metodo == "auto":
        metodo = "direto" if dt is not None or (2 * K + 1) ** (3 * (N - 1)) <= 4096 else "fft"
    if metodo == "direto":
        return _soma_direta(Q, N, K, k, dt)
    if metodo == "fft":
        if dt is not None:
            raise ErroParametro("o caminho FFT só calcula a versão em tempo contínuo")
        return _soma_fft(Q, N, K, k, nos_por_painel, threads)
    raise ErroParametro(f"método desconhecido: {metodo}")


def g_kernel_time_integral(Q: DispersionQ, eps: float, m: int, K: int,
                           k: Sequence[int] = (0, 0, 0), dt: Optional[float] = None,
                           metodo: str = "auto", threads: int = 1) -> float:
    """∫Ĝ_{ε,m}(·, k) = ((2m+1)!/2^{2m}) Σ ... (2m pernas)"""
    if m < 1:
        raise ErroParametro(f"m deve ser >= 1: {m}")
    return (2 * m + 1) * kernel_lattice_sum(Q.com_eps(eps), 2 * m, K, k, dt, metodo, threads=threads)


# ============================================
# C2, C3, C_ε
# ============================================

def _a_para(Q: DispersionQ, V: Potential, eps: float, lam: float, K: int,
            s2e: Optional[float]) -> List[float]:
    if s2e is None:
        s2e = sigma2_eps(Q, eps, K)
    return a_coeffs(V, eps, lam, s2e)


def c2(Q: DispersionQ, V: Potential, eps: float, lam: float, K: int,
       dt: Optional[float] = None, s2e: Optional[float] = None, threads: int = 1) -> float:
    """C2 = Σ_{m=1}^{n−1} a_m²/(m²(2m+1)) ε^{2m−2} ∫Ĝ_{ε,m}(·,0)"""
    a = _a_para(Q, V, eps, lam, K, s2e)
    total = 0.0
    for m, am in enumerate(a, start=1):
        if am == 0.0:
            continue
        kernel = g_kernel_time_integral(Q, eps, m, K, dt=dt, threads=threads)
        total += am * am / (m * m * (2 * m + 1)) * eps ** (2 * m - 2) * kernel
    return total


def c3(Q: DispersionQ, V: Potential, eps: float, lam: float, K: int,
       dt: Optional[float] = None, s2e: Optional[float] = None, threads: int = 1) -> float:
    """C3 = Σ_{m=1}^{n−2} 3a_m a_{m+1}/(m(2m+1)) ε^{2m−1} E[Ĩ(◇(2m+1))∘◇(2m+1)]"""
    a = _a_para(Q, V, eps, lam, K, s2e)
    total = 0.0
    for m in range(1, len(a)):
        coef = 3.0 * a[m - 1] * a[m] / (m * (2 * m + 1)) * eps ** (2 * m - 1)
        if coef == 0.0:
            continue
        total += coef * kernel_lattice_sum(Q.com_eps(eps), 2 * m + 1, K, dt=dt, threads=threads)
    return total


def c_total(lam: float, C1: float, C2: float, C3: float) -> float:
    """C_ε = 3λC1 − 9λ²C2 − 6λ²C3"""
    return 3.0 * lam * C1 - 9.0 * lam * lam * C2 - 6.0 * lam * lam * C3


def compute_renorm_set(Q: DispersionQ, V: Potential, eps: float, K: Optional[int] = None,
                       dt: Optional[float] = None, threads: int = 1) -> RenormSet:
    """
    Todas as constantes em (ε, K)

    Args:
        Q: símbolo (o ε embutido é ignorado)
        V: potencial
        eps: ε > 0
        K: corte (padrão ceil(4/ε))
        dt: passo de tempo para C2/C3 discretos
    """
    if K is None:
        K = corte_padrao(eps)
    sigma2 = sigma2_limit(Q) if not V.quartico_puro else _sigma2_opcional(Q)
    lam = coupling_lambda(V, sigma2 if np.isfinite(sigma2) else 0.0)
    s2e = sigma2_eps(Q, eps, K)
    cauda = cauda_sigma2_eps(Q, eps, K) if np.isfinite(sigma2) else float("inf")
    if cauda > 0.01 * s2e:
        logger.warning("cauda de σ_ε² acima de 1%% em ε=%g, K=%d: %.3e", eps, K, cauda)

    C1 = c1(V, eps, lam, s2e)
    C2 = c2(Q, V, eps, lam, K, dt=dt, s2e=s2e, threads=threads)
    C3 = c3(Q, V, eps, lam, K, dt=dt, s2e=s2e, threads=threads)
    conjunto = RenormSet(
        sigma2=sigma2, sigma2_eps=s2e, lam=lam, a_m=a_coeffs(V, eps, lam, s2e),
        C1=C1, C2=C2, C3=C3, C_total=c_total(lam, C1, C2, C3), eps=eps, K=K, dt=dt,
        cauda_sigma2=cauda, simbolo=Q.nome, potencial=list(V.coeffs),
    )
    logger.info("constantes ε=%g K=%d: λ=%.6g C1=%.6g C2=%.6g C3=%.6g", eps, K, lam, C1, C2, C3)
    return conjunto


def _sigma2_opcional(Q: DispersionQ) -> float:
    """σ² quando λ não depende dele (V quártico): divergência vira +∞"""
    try:
        return sigma2_limit(Q)
    except ErroCrescimento:
        logger.warning("σ² diverge para %s; λ não depende dele com V quártico", Q.nome)
        return float("inf")


# ============================================
# MODELO PADRÃO E DIAGNÓSTICOS
# ============================================

def standard_constants(eps_cutoff: float, K: Optional[int] = None, dt: Optional[float] = None,
                       threads: int = 1) -> Tuple[float, float]:
    """
    c^(1) = E(⟨1⟩̃)² e c^(2) = E[Ĩ(⟨2⟩̃)∘⟨2⟩̃] com corte de Fourier nítido

    Args:
        eps_cutoff: ε do molificador; o corte é |k|_∞ ≤ 1/ε
        K: corte explícito (sobrepõe 1/ε)
        dt: passo para a versão discreta de c^(2)
    """
    if K is None:
        if eps_cutoff <= 0:
            raise ErroParametro("eps_cutoff deve ser > 0")
        K = int(math.floor(1.0 / eps_cutoff + 1e-12))
    Q0 = DispersionQ.laplaciano(0.0)
    lam = Q0.bracket_sq_rede(FrequencyLattice(K))
    c1_std = float(np.sum(0.5 / lam))
    c2_std = kernel_lattice_sum(Q0, 2, K, dt=dt, threads=threads)
    return c1_std, c2_std


def ajuste_log(eps_lista: Sequence[float], valores: Sequence[float]) -> Dict[str, float]:
    """Regressão linear de valores contra log(1/ε)"""
    x = np.log(1.0 / np.asarray(eps_lista, dtype=float))
    ajuste = stats.linregress(x, np.asarray(valores, dtype=float))
    return {"inclinacao": float(ajuste.slope), "intercepto": float(ajuste.intercept),
            "r2": float(ajuste.rvalue ** 2)}


def alvo_eps_c1(V: Potential, sigma2: float, lam: float) -> float:
    """Limite de ε·C1 quando ε → 0: E V″(N(0,σ²))/(3λ)"""
    return gaussian_expectation(V.derivada(2), sigma2) / (3.0 * lam)
