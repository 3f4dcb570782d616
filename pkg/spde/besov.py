"""
Blocos de Littlewood–Paley e paraprodutos
Normas de Besov (escala L∞), paraprodutos de Bony, produto ressonante e os
comutadores Com, [e^{t(ℒ_ε−1)},≺] e [ℐ_ε,≺]
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence

import numpy as np

from spde.erros import ErroGrade, ErroParametro, ErroTempo
from spde.fourier_core import (
    DispersionQ,
    FourierField,
    FrequencyLattice,
    apply_semigroup,
    forward,
    inverse,
    peso_quadratura,
    product,
    propagador,
)

logger = logging.getLogger(__name__)

R_INTERNO = 0.75
R_EXTERNO = 4.0 / 3.0


def _smootherstep(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)


# ============================================
# PARTIÇÃO DIÁDICA
# ============================================

@dataclass(frozen=True)
class DyadicPartition:
    """
    Partição da unidade χ̃ + Σ_j χ(·/2^j) = 1

    χ̃ vale 1 em |ξ| ≤ 3/4 e 0 em |ξ| ≥ 4/3 (transição C² polinomial);
    χ(ξ) = χ̃(ξ/2) − χ̃(ξ) tem suporte no anel 3/4 ≤ |ξ| ≤ 8/3.
    """

    K: int

    @staticmethod
    def chi_tilde(r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        return 1.0 - _smootherstep((r - R_INTERNO) / (R_EXTERNO - R_INTERNO))

    @classmethod
    def chi(cls, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return cls.chi_tilde(r / 2.0) - cls.chi_tilde(r)

    @property
    def jmax(self) -> int:
        """Menor j com 2^j >= 8K/3"""
        alvo = 8.0 * self.K / 3.0
        j = 0
        while 2.0 ** j < alvo:
            j += 1
        return j

    def peso(self, j: int, normas) -> np.ndarray:
        """χ_j avaliado em |k|₂"""
        if j < -1:
            raise ErroParametro(f"bloco j={j} < −1")
        if j == -1:
            return self.chi_tilde(normas)
        return self.chi(np.asarray(normas, dtype=float) / 2.0 ** j)

    def indices(self) -> range:
        return range(-1, self.jmax + 1)


@lru_cache(maxsize=128)
def _filtro(grid: FrequencyLattice, j: int) -> np.ndarray:
    return DyadicPartition(grid.K).peso(j, grid.normas())


def peso_ressonante(particao: DyadicPartition, normas_a, normas_b) -> np.ndarray:
    """Σ_{|i−j|≤1} χ_i(a) χ_j(b): a restrição a ∼ b do produto ressonante"""
    pesos_a = [particao.peso(j, normas_a) for j in particao.indices()]
    pesos_b = [particao.peso(j, normas_b) for j in particao.indices()]
    total = np.zeros(np.broadcast(np.asarray(normas_a), np.asarray(normas_b)).shape)
    n = len(pesos_a)
    for i in range(n):
        for j in range(max(0, i - 1), min(n, i + 2)):
            total = total + pesos_a[i] * pesos_b[j]
    return total


# ============================================
# PERFIL E NORMA DE BESOV
# ============================================

@dataclass
class BesovProfile:
    """b_j = ‖Δ_j f‖_∞ para j = −1..jmax"""

    blocos: np.ndarray

    @property
    def js(self) -> np.ndarray:
        return np.arange(-1, len(self.blocos) - 1)

    def norm(self, alpha: float) -> float:
        if len(self.blocos) == 0:
            return 0.0
        return float(np.max(2.0 ** (alpha * self.js) * self.blocos))

    def linhas_csv(self) -> List[tuple]:
        return [(int(j), float(b)) for j, b in zip(self.js, self.blocos)]


def block(f: FourierField, j: int) -> FourierField:
    """Δ_j f (campo nulo para j além da banda)"""
    if j < -1:
        raise ErroParametro(f"bloco j={j} < −1")
    if j > DyadicPartition(f.grid.K).jmax:
        return FourierField(f.grid, np.zeros_like(f.coeffs), f.hermitian)
    return FourierField(f.grid, f.coeffs * _filtro(f.grid, j), f.hermitian)


def profile(f: FourierField) -> BesovProfile:
    """Normas de bloco em L∞ na grade com padding de produto"""
    M = f.grid.m_alias_free(2)
    particao = DyadicPartition(f.grid.K)
    blocos = np.array([
        float(np.max(np.abs(inverse(block(f, j), M)))) for j in particao.indices()
    ])
    return BesovProfile(blocos)


def besov_norm(f: FourierField, alpha: float) -> float:
    """sup_j 2^{αj}‖Δ_j f‖_∞"""
    return profile(f).norm(alpha)


def norma_sup(f: FourierField) -> float:
    """‖f‖_∞ na grade com padding de produto"""
    return float(np.max(np.abs(inverse(f, f.grid.m_alias_free(2)))))


# ============================================
# PARAPRODUTOS
# ============================================

def _blocos_fisicos(f: FourierField, M: int) -> List[np.ndarray]:
    return [inverse(block(f, j), M) for j in DyadicPartition(f.grid.K).indices()]


def para_lt(f: FourierField, g: FourierField) -> FourierField:
    """f ≺ g = Σ_j S_{j−1}f · Δ_j g"""
    f._checar(g)
    M = f.grid.m_alias_free(2)
    bf = _blocos_fisicos(f, M)
    bg = _blocos_fisicos(g, M)
    total = np.zeros((M, M, M), dtype=np.result_type(bf[0], bg[0]))
    baixo = np.zeros_like(total)
    # posição p na lista corresponde a j = p − 1
    for p in range(2, len(bg)):
        baixo = baixo + bf[p - 2]
        total = total + baixo * bg[p]
    resultado = forward(total, f.grid)
    resultado.hermitian = f.hermitian and g.hermitian
    return resultado


def para_gt(f: FourierField, g: FourierField) -> FourierField:
    """f ≻ g = g ≺ f"""
    return para_lt(g, f)


def resonance(f: FourierField, g: FourierField) -> FourierField:
    """f ∘ g = Σ_{|i−j|≤1} Δ_i f · Δ_j g"""
    f._checar(g)
    M = f.grid.m_alias_free(2)
    bf = _blocos_fisicos(f, M)
    bg = _blocos_fisicos(g, M)
    total = np.zeros((M, M, M), dtype=np.result_type(bf[0], bg[0]))
    n = len(bf)
    for i in range(n):
        for j in range(max(0, i - 1), min(n, i + 2)):
            total = total + bf[i] * bg[j]
    resultado = forward(total, f.grid)
    resultado.hermitian = f.hermitian and g.hermitian
    return resultado


# ============================================
# COMUTADORES
# ============================================

def commutator_com(f: FourierField, g: FourierField, h: FourierField) -> FourierField:
    """Com(f; g; h) = (f≺g)∘h − f·(g∘h)"""
    return resonance(para_lt(f, g), h) - product(f, resonance(g, h))


def heat_para_commutator(f: FourierField, g: FourierField, Q: DispersionQ, t: float) -> FourierField:
    """[e^{t(ℒ_ε−1)}, ≺](f, g)"""
    if t < 0:
        raise ErroTempo(f"tempo negativo: {t}")
    return apply_semigroup(para_lt(f, g), Q, t) - para_lt(f, apply_semigroup(g, Q, t))


class DuhamelAccumulator:
    """
    ℐ_ε(x)(t) = ∫_0^t e^{(t−s)(ℒ_ε−1)} x(s) ds na grade uniforme

    Regra exponencial de ponto à esquerda:
    ℐ(t_{n+1}) = e^{−Λdt}ℐ(t_n) + φ(Λ)x(t_n), φ(Λ) = (1 − e^{−Λdt})/Λ.
    """

    def __init__(self, grid: FrequencyLattice, Q: DispersionQ, dt: float,
                 inicial: Optional[FourierField] = None):
        self.grid = grid
        self.dt = dt
        self._decaimento = propagador(Q, grid, dt)
        self._phi = peso_quadratura(Q, grid, dt)
        self.valor = inicial.copia() if inicial is not None else FourierField.zeros(grid)

    def avancar(self, integrando: FourierField) -> FourierField:
        """Avança um passo usando o integrando no instante atual"""
        self.valor = FourierField(
            self.grid,
            self._decaimento * self.valor.coeffs + self._phi * integrando.coeffs,
            self.valor.hermitian and integrando.hermitian,
        )
        return self.valor


def checar_grade_tempo(t_grid: Sequence[float], origem: bool = True) -> float:
    """Valida uma grade uniforme e devolve o passo"""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2:
        raise ErroTempo("grade temporal precisa de ao menos dois pontos")
    if origem and abs(t_grid[0]) > 1e-14:
        raise ErroTempo(f"grade temporal deve começar em 0, começa em {t_grid[0]}")
    passos = np.diff(t_grid)
    dt = float(passos[0])
    if dt <= 0 or not np.allclose(passos, dt, rtol=1e-9, atol=1e-14):
        raise ErroTempo("grade temporal não uniforme")
    return dt


def duhamel_para_commutator(f_traj: Sequence[FourierField], g_traj: Sequence[FourierField],
                            Q: DispersionQ, t_grid: Sequence[float]) -> List[FourierField]:
    """
    [ℐ_ε, ≺](f, g)(t) = ℐ_ε(f≺g)(t) − f(t) ≺ ℐ_ε(g)(t)

    Args:
        f_traj, g_traj: campos nos instantes de t_grid
        Q: símbolo
        t_grid: grade uniforme começando em 0

    Returns:
        lista de campos, um por instante
    """
    if len(f_traj) != len(t_grid) or len(g_traj) != len(t_grid):
        raise ErroTempo("trajetórias e grade temporal com tamanhos diferentes")
    dt = checar_grade_tempo(t_grid)
    grid = f_traj[0].grid
    acc_fg = DuhamelAccumulator(grid, Q, dt)
    acc_g = DuhamelAccumulator(grid, Q, dt)

    resultado = []
    for n in range(len(t_grid)):
        resultado.append(acc_fg.valor - para_lt(f_traj[n], acc_g.valor))
        if n + 1 < len(t_grid):
            acc_fg.avancar(para_lt(f_traj[n], g_traj[n]))
            acc_g.avancar(g_traj[n])
    return resultado


# ============================================
# RAZÕES DAS ESTIMATIVAS
# ============================================

def bony_ratios(f: FourierField, g: FourierField, alpha: float, beta: float) -> Dict[str, float]:
    """
    Razões empíricas das três estimativas de Bony

    lt: ‖f≺g‖_β / (‖f‖_∞‖g‖_β)
    gt: ‖f≻g‖_{α+β} / (‖f‖_α‖g‖_β)   (β < 0)
    res: ‖f∘g‖_{α+β} / (‖f‖_α‖g‖_β)  (α+β > 0)
    """
    nf_a = besov_norm(f, alpha)
    ng_b = besov_norm(g, beta)
    nf_inf = norma_sup(f)

    def _razao(num, den):
        return float(num / den) if den > 0 else 0.0

    return {
        "lt": _razao(besov_norm(para_lt(f, g), beta), nf_inf * ng_b),
        "gt": _razao(besov_norm(para_gt(f, g), alpha + beta), nf_a * ng_b),
        "res": _razao(besov_norm(resonance(f, g), alpha + beta), nf_a * ng_b),
    }


def commutator_ratio(f: FourierField, g: FourierField, h: FourierField,
                     alpha: float, beta: float, gamma: float) -> float:
    """‖Com(f;g;h)‖_{α+β+γ} / (‖f‖_α‖g‖_β‖h‖_γ)"""
    den = besov_norm(f, alpha) * besov_norm(g, beta) * besov_norm(h, gamma)
    if den == 0:
        return 0.0
    return besov_norm(commutator_com(f, g, h), alpha + beta + gamma) / den


def smoothing_ratio(f: FourierField, Q: DispersionQ, alpha: float, gamma: float,
                    tempos: Sequence[float]) -> float:
    """sup_t t^{(γ−α)/2}‖e^{t(ℒ_ε−1)}f‖_γ / ‖f‖_α"""
    den = besov_norm(f, alpha)
    if den == 0:
        return 0.0
    return max(
        t ** ((gamma - alpha) / 2.0) * besov_norm(apply_semigroup(f, Q, t), gamma) / den
        for t in tempos
    )
