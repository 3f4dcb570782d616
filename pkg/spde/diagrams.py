"""
Ruído aumentado Υ_ε
Construção dos sete objetos estocásticos, das árvores do modelo Φ⁴₃ padrão,
oráculos de segundo momento por contração de Wick, momentos Monte Carlo e
o diagnóstico de regularidade.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import COMPONENTES_UPSILON, KAPPA_PADRAO, LIMITE_ITERACOES_DIRETAS, REGULARIDADES, T_BURN
from spde.besov import DuhamelAccumulator, besov_norm, checar_grade_tempo, resonance
from spde.erros import ErroGrade, ErroInviavel, ErroParametro, ErroTempo
from spde.fourier_core import (
    DispersionQ,
    FourierField,
    FrequencyLattice,
    forward,
    inverse,
    reprojetar,
)
from spde.gaussian import (
    ModeOUEnsemble,
    NoiseSeed,
    advance,
    sample_stationary,
    wick_power_campo,
)
from spde.renorm import Potential, RenormSet, chaos_weights, sigma2_eps, standard_constants

logger = logging.getLogger(__name__)

AUXILIARES = ("1", "2'0", "3'")


# ============================================
# TIPOS
# ============================================

@dataclass
class EnhancedNoise:
    """Os sete componentes de Υ_ε em uma grade temporal, mais trajetórias auxiliares"""

    componentes: Dict[str, List[FourierField]]
    t_grid: np.ndarray
    eps: float
    proveniencia: Dict[str, object] = field(default_factory=dict)
    auxiliares: Dict[str, List[FourierField]] = field(default_factory=dict)

    @classmethod
    def zeros(cls, grid: FrequencyLattice, t_grid: Sequence[float], eps: float = 0.0) -> "EnhancedNoise":
        t_grid = np.asarray(t_grid, dtype=float)
        vazio = lambda: [FourierField.zeros(grid) for _ in t_grid]  # noqa: E731
        return cls({tag: vazio() for tag in COMPONENTES_UPSILON}, t_grid, eps,
                   {}, {tag: vazio() for tag in AUXILIARES})

    @property
    def grid(self) -> FrequencyLattice:
        return next(iter(self.componentes.values()))[0].grid

    @property
    def dt(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0]) if len(self.t_grid) > 1 else 0.0

    def componente(self, tag: str, i: int) -> FourierField:
        if tag in self.componentes:
            return self.componentes[tag][i]
        if tag in self.auxiliares:
            return self.auxiliares[tag][i]
        raise ErroParametro(f"componente ausente: {tag}")

    def indice(self, t: float) -> int:
        """Índice da grade temporal correspondente a t"""
        posicoes = np.flatnonzero(np.isclose(self.t_grid, t, rtol=0.0, atol=1e-9))
        if posicoes.size == 0:
            raise ErroTempo(f"t={t} fora da grade temporal")
        return int(posicoes[0])


@dataclass
class MomentReport:
    """Comparação de um momento Monte Carlo com o oráculo"""

    simbolo: str
    k: Tuple[int, int, int]
    media: float
    erro_padrao: Optional[float]
    oraculo: float
    z: Optional[float]
    amostras: int

    @property
    def z_indefinido(self) -> bool:
        return self.z is None

    def linha_csv(self) -> tuple:
        return (self.simbolo, "%d %d %d" % self.k, self.media, self.erro_padrao,
                self.oraculo, self.z)


@dataclass
class RegularityReport:
    """sup_k ⟨k⟩^{d+2α}E|τ̂(k)|² e a tendência por camadas diádicas"""

    sup: float
    k_sup: Tuple[int, int, int]
    camadas: Dict[int, float]
    crescimento: float
    plano: bool


# ============================================
# MARCHA TEMPORAL COMUM
# ============================================

def _marchar(ens: ModeOUEnsemble, dt: float, passos_burn: int, n_tempos: int,
             locais: Callable[[FourierField], Dict[str, FourierField]]
             ) -> Iterator[Tuple[int, FourierField, Dict[str, FourierField], FourierField, FourierField]]:
    """
    Integra ⟨2'0⟩ e ⟨3'0⟩ desde −T_burn e entrega os instantes t ≥ 0

    Yields:
        (índice em t_grid, ⟨1⟩, objetos locais, ⟨2'0⟩, ⟨3'0⟩)
    """
    grid = ens.grid
    acc20 = DuhamelAccumulator(grid, ens.Q, dt)
    acc30 = DuhamelAccumulator(grid, ens.Q, dt)
    total = passos_burn + n_tempos
    for i in range(total):
        X = ens.campo()
        obj = locais(X)
        if i >= passos_burn:
            yield i - passos_burn, X, obj, acc20.valor, acc30.valor
        if i + 1 < total:
            acc20.avancar(obj["2'"])
            acc30.avancar(obj["3'"])
            ens = advance(ens, dt)


def _passos_burn(t_burn: float, dt: float) -> int:
    return int(math.ceil(t_burn / dt - 1e-9))


def trajetoria_livre(seed: NoiseSeed, grid: FrequencyLattice, Q: DispersionQ,
                     t_grid: Sequence[float], amostra: int = 0,
                     acoplado_a: Optional[DispersionQ] = None,
                     t_burn: float = T_BURN) -> List[FourierField]:
    """⟨1⟩_ε nos instantes de t_grid, no mesmo caminho de ruído usado por build_upsilon"""
    t_grid = np.asarray(t_grid, dtype=float)
    dt = checar_grade_tempo(t_grid)
    passos = _passos_burn(t_burn, dt)
    ens = sample_stationary(seed, grid, Q, amostra, acoplado_a, t=-passos * dt)
    for _ in range(passos):
        ens = advance(ens, dt)
    caminho = [ens.campo()]
    for _ in range(len(t_grid) - 1):
        ens = advance(ens, dt)
        caminho.append(ens.campo())
    return caminho


# ============================================
# CONSTRUÇÃO DE Υ_ε
# ============================================

def _locais_eps(V: Potential, eps: float, lam: float, C1: float):
    raiz = math.sqrt(eps)
    derivadas = {j: V.derivada(j) for j in (1, 2, 3, 4)}

    def locais(X: FourierField) -> Dict[str, FourierField]:
        M = X.grid.m_alias_free(V.grau)
        x = inverse(X, M)
        y = raiz * x
        return {
            "0'": forward(derivadas[4](y) / (6.0 * lam) * np.ones_like(x), X.grid),
            "1'": forward(derivadas[3](y) / (6.0 * lam * raiz), X.grid),
            "2'": forward(derivadas[2](y) / (3.0 * lam * eps) - C1, X.grid),
            "3'": forward(derivadas[1](y) / (lam * eps ** 1.5) - 3.0 * C1 * x, X.grid),
        }
    return locais


def build_upsilon(seed: NoiseSeed, grid: FrequencyLattice, Q: DispersionQ, V: Potential,
                  eps: float, t_grid: Sequence[float], renorm: RenormSet,
                  amostra: int = 0, acoplado_a: Optional[DispersionQ] = None,
                  t_burn: float = T_BURN) -> EnhancedNoise:
    """
    Amostra Υ_ε na grade temporal

    ⟨2'0⟩ e ⟨3'0⟩ são integrais de Duhamel estacionárias realizadas a partir
    de −T_burn com a regra exponencial de ponto à esquerda.

    Args:
        seed: semente mestre
        grid: rede
        Q: símbolo (o ε usado é `eps`)
        V: potencial
        eps: ε > 0
        t_grid: grade uniforme começando em 0
        renorm: constantes no mesmo (ε, K)
        amostra: índice da réplica
        acoplado_a: símbolo cujo campo livre compartilha o ruído branco
        t_burn: duração do aquecimento
    """
    if abs(renorm.eps - eps) > 1e-14 or renorm.K != grid.K:
        raise ErroGrade(
            f"constantes calculadas em (ε={renorm.eps}, K={renorm.K}), pedidas em (ε={eps}, K={grid.K})"
        )
    t_grid = np.asarray(t_grid, dtype=float)
    dt = checar_grade_tempo(t_grid)
    if renorm.dt is None:
        logger.warning("C2/C3 em tempo contínuo com grade discreta dt=%g: centragem só assintótica", dt)
    elif abs(renorm.dt - dt) > 1e-12 * dt:
        raise ErroTempo(f"constantes discretas com dt={renorm.dt}, grade com dt={dt}")

    Qe = Q.com_eps(eps)
    passos = _passos_burn(t_burn, dt)
    ens = sample_stationary(seed, grid, Qe, amostra, acoplado_a, t=-passos * dt)
    locais = _locais_eps(V, eps, renorm.lam, renorm.C1)
    C2, C3 = renorm.C2, renorm.C3

    U = EnhancedNoise({tag: [] for tag in COMPONENTES_UPSILON}, t_grid, eps,
                      {"seed": int(seed.master), "amostra": int(amostra), "t_burn": t_burn,
                       "constantes": renorm.como_dict()},
                      {tag: [] for tag in AUXILIARES})
    for _, X, obj, x20, x30 in _marchar(ens, dt, passos, len(t_grid), locais):
        U.componentes["0'"].append(obj["0'"])
        U.componentes["1'"].append(obj["1'"])
        U.componentes["2'"].append(obj["2'"])
        U.componentes["3'0"].append(x30)
        U.componentes["3'1'"].append(resonance(x30, obj["1'"]) - C3)
        U.componentes["2'2'"].append(resonance(x20, obj["2'"]) - C2)
        U.componentes["3'2'"].append(resonance(x30, obj["2'"]) - (3.0 * C2 + 2.0 * C3) * X)
        U.auxiliares["1"].append(X)
        U.auxiliares["2'0"].append(x20)
        U.auxiliares["3'"].append(obj["3'"])
    logger.debug("Υ_ε amostra %d: ε=%g K=%d, %d passos de aquecimento", amostra, eps, grid.K, passos)
    return U


def build_limit_upsilon(seed: NoiseSeed, grid: FrequencyLattice, eps_cutoff: float,
                        t_grid: Sequence[float], amostra: int = 0,
                        constantes: Optional[Tuple[float, float]] = None,
                        t_burn: float = T_BURN) -> EnhancedNoise:
    """
    Árvores do Φ⁴₃ padrão (𝒬 = z², ε = 0) com corte de Fourier nítido |k|_∞ ≤ 1/ε

    O campo livre é o caminho base do ruído da semente, o mesmo que dirige
    build_upsilon(..., acoplado_a=DispersionQ.laplaciano(0)).

    Args:
        constantes: (c^(1), c^(2)) já calculados (padrão: tempo contínuo)
    """
    t_grid = np.asarray(t_grid, dtype=float)
    dt = checar_grade_tempo(t_grid)
    Kc = min(grid.K, int(math.floor(1.0 / eps_cutoff + 1e-12))) if eps_cutoff > 0 else grid.K
    sub = FrequencyLattice(Kc)
    if constantes is None:
        logger.warning("c^(2) em tempo contínuo com grade discreta dt=%g", dt)
        constantes = standard_constants(eps_cutoff, Kc)
    c1_std, c2_std = constantes

    Q0 = DispersionQ.laplaciano(0.0)
    passos = _passos_burn(t_burn, dt)
    ens = sample_stationary(seed, grid, Q0, amostra, None, t=-passos * dt)

    def locais(X: FourierField) -> Dict[str, FourierField]:
        M = sub.m_alias_free(3)
        x = inverse(X, M)
        return {
            "2'": forward(x * x - c1_std, sub),
            "3'": forward(x ** 3 - 3.0 * c1_std * x, sub),
        }

    class _Truncado:
        """Ensemble visto apenas nos modos |k|_∞ ≤ Kc"""

        def __init__(self, base):
            self.base = base
            self.grid = sub
            self.Q = Q0

        def campo(self):
            return reprojetar(self.base.campo(), sub)

    def _avancar(trunc, passo):
        return _Truncado(advance(trunc.base, passo))

    U = EnhancedNoise({tag: [] for tag in COMPONENTES_UPSILON}, t_grid, 0.0,
                      {"seed": int(seed.master), "amostra": int(amostra), "t_burn": t_burn,
                       "eps_cutoff": eps_cutoff, "K_corte": Kc,
                       "constantes": {"c1": c1_std, "c2": c2_std}},
                      {tag: [] for tag in AUXILIARES})
    acc20 = DuhamelAccumulator(sub, Q0, dt)
    acc30 = DuhamelAccumulator(sub, Q0, dt)
    trunc = _Truncado(ens)
    total = passos + len(t_grid)
    um = FourierField.constante(grid, 1.0)
    for i in range(total):
        X = trunc.campo()
        obj = locais(X)
        if i >= passos:
            x20, x30 = acc20.valor, acc30.valor
            partes = {
                "1'": X,
                "2'": obj["2'"],
                "3'0": x30,
                "3'1'": resonance(x30, X),
                "2'2'": resonance(x20, obj["2'"]) - c2_std,
                "3'2'": resonance(x30, obj["2'"]) - 3.0 * c2_std * X,
            }
            U.componentes["0'"].append(um)
            for tag, valor in partes.items():
                U.componentes[tag].append(reprojetar(valor, grid))
            U.auxiliares["1"].append(reprojetar(X, grid))
            U.auxiliares["2'0"].append(reprojetar(x20, grid))
            U.auxiliares["3'"].append(reprojetar(obj["3'"], grid))
        if i + 1 < total:
            acc20.avancar(obj["2'"])
            acc30.avancar(obj["3'"])
            trunc = _avancar(trunc, dt)
    return U


# ============================================
# ORÁCULOS DE WICK
# ============================================

def _soma_wick(Q: DispersionQ, N: int, K: int, k: Sequence[int],
               funcao: Callable[[np.ndarray], np.ndarray]) -> float:
    """
    Σ_{ℓ₁+…+ℓ_N = k, |ℓ_j|_∞ ≤ K} ∏⟨ℓ_j⟩⁻² · funcao(Σ⟨ℓ_j⟩²)
    """
    grid = FrequencyLattice(K)
    n = grid.n
    n3 = n ** 3
    k = np.asarray(k, dtype=int)
    vetores = np.stack([c.ravel() for c in grid.vetores()], axis=1)
    lam = Q.bracket_sq_rede(grid).ravel()

    if N == 1:
        if np.any(np.abs(k) > K):
            return 0.0
        i = grid.indice(k)
        lam_k = float(Q.bracket_sq_rede(grid)[i])
        return float(funcao(np.array([lam_k]))[0] / lam_k)

    if n3 ** (N - 2) > LIMITE_ITERACOES_DIRETAS:
        raise ErroInviavel(f"oráculo de Wick com N={N}, K={K} grande demais")

    parciais = []
    for tupla in itertools.product(range(n3), repeat=N - 2):
        tupla = list(tupla)
        base = vetores[tupla].sum(axis=0) if tupla else np.zeros(3, dtype=int)
        produto = float(np.prod(1.0 / lam[tupla])) if tupla else 1.0
        mu0 = float(np.sum(lam[tupla])) if tupla else 0.0
        ultimo = k - base - vetores
        valido = np.all(np.abs(ultimo) <= K, axis=1)
        if not np.any(valido):
            continue
        u = ultimo[valido]
        idx = ((u[:, 0] + K) * n + (u[:, 1] + K)) * n + (u[:, 2] + K)
        lam_pen = lam[valido]
        lam_ult = lam[idx]
        mu = mu0 + lam_pen + lam_ult
        parciais.append(float(np.sum(produto / (lam_pen * lam_ult) * funcao(mu))))
    return math.fsum(parciais)


def _oraculo_wick(Q: DispersionQ, n: int, K: int, k, atraso: float) -> float:
    """E[◇n^(s,k) conj ◇n^(t,k)] = n!/2^n Σ ∏⟨ℓ_j⟩⁻² e^{−|t−s|Σ⟨ℓ_j⟩²}"""
    return math.factorial(n) / 2.0 ** n * _soma_wick(Q, n, K, k, lambda mu: np.exp(-atraso * mu))


def _oraculo_duhamel(Q: DispersionQ, N: int, K: int, k, dt: Optional[float]) -> float:
    """E|Ĩ(◇N)^(t,k)|² com Ĩ a integral de Duhamel estacionária"""
    grid = FrequencyLattice(K)
    if any(abs(int(c)) > K for c in k):
        return 0.0
    Lk = float(Q.bracket_sq_rede(grid)[grid.indice(k)])
    if dt is None:
        funcao = lambda mu: 1.0 / (Lk * (Lk + mu))  # noqa: E731
    else:
        x = math.exp(-Lk * dt)
        phi = -math.expm1(-Lk * dt) / Lk

        def funcao(mu):
            xy = x * np.exp(-mu * dt)
            return phi * phi * (1.0 + xy) / ((1.0 - x * x) * (1.0 - xy))
    return math.factorial(N) / 2.0 ** N * _soma_wick(Q, N, K, k, funcao)


def second_moment_oracle(symbol: str, k: Sequence[int], t_pair: Tuple[float, float],
                         Q: DispersionQ, eps: float, K: int,
                         V: Optional[Potential] = None, renorm: Optional[RenormSet] = None,
                         dt: Optional[float] = None, tipo: str = "covariancia") -> float:
    """
    Segundo momento analítico por contração de Wick

    Args:
        symbol: "1", "1^n" (potência de Wick), "1'", "2'" ou "3'0"
        k: modo
        t_pair: (s, t); para "3'0" exige s = t
        Q, eps, K: símbolo, ε e corte
        V, renorm: exigidos por "1'", "2'" e "3'0"
        dt: passo da discretização de Duhamel ("3'0"; None = contínuo)
        tipo: "covariancia" ou, para "1", "incremento" (E|X̂(s,k) − X̂(t,k)|²)

    Returns:
        E[τ̂(s,k) conj τ̂(t,k)] (ou o incremento)
    """
    Qe = Q.com_eps(eps)
    k = tuple(int(c) for c in k)
    s, t = t_pair
    atraso = abs(t - s)

    if symbol == "1":
        if any(abs(c) > K for c in k):
            return 0.0
        lam_k = float(Qe.bracket_sq(np.array([math.sqrt(sum(c * c for c in k))]))[0])
        if tipo == "incremento":
            return float(-math.expm1(-atraso * lam_k) / lam_k)
        return float(math.exp(-atraso * lam_k) / (2.0 * lam_k))

    if symbol.startswith("1^"):
        return _oraculo_wick(Qe, int(symbol[2:]), K, k, atraso)

    if renorm is None:
        raise ErroParametro(f"oráculo de {symbol} exige as constantes de renormalização")
    escala_eps = eps if eps > 0 else 1.0

    if symbol in ("1'", "2'"):
        pesos = chaos_weights(renorm.a_m, escala_eps, symbol)
        return sum(p * p * _oraculo_wick(Qe, ordem, K, k, atraso) for ordem, p in pesos.items() if p)

    if symbol == "3'0":
        if atraso > 0:
            raise ErroParametro("oráculo de ⟨3'0⟩ só no mesmo instante")
        pesos = chaos_weights(renorm.a_m, escala_eps, "3'")
        return sum(p * p * _oraculo_duhamel(Qe, ordem, K, k, dt) for ordem, p in pesos.items() if p)

    raise ErroParametro(f"símbolo sem oráculo: {symbol}")


def coupled_difference_oracle(Q: DispersionQ, eps: float, k: Sequence[int]) -> float:
    """E|X̂_ε(t,k) − X̂_0(t,k)|² com ruído branco comum: 1/(2a) + 1/(2b) − 2/(a+b)"""
    norma = np.array([math.sqrt(sum(int(c) ** 2 for c in k))])
    a = float(Q.com_eps(eps).bracket_sq(norma)[0])
    b = float(Q.com_eps(0.0).bracket_sq(norma)[0])
    return 1.0 / (2.0 * a) + 1.0 / (2.0 * b) - 2.0 / (a + b)


# ============================================
# MONTE CARLO
# ============================================

@dataclass
class ContextoMC:
    """Tudo que uma réplica precisa para sortear os símbolos"""

    grid: FrequencyLattice
    Q: DispersionQ
    eps: float
    t_grid: np.ndarray
    V: Optional[Potential] = None
    renorm: Optional[RenormSet] = None
    t_burn: float = T_BURN
    threads: int = 1

    @property
    def nu(self) -> float:
        """Variância pontual de ⟨1⟩_ε na rede"""
        if self.eps > 0:
            return sigma2_eps(self.Q, self.eps, self.grid.K) / self.eps
        lam = self.Q.com_eps(0.0).bracket_sq_rede(self.grid)
        return float(np.sum(0.5 / lam))


def _jackknife(valores: np.ndarray) -> Optional[float]:
    M = len(valores)
    if M < 2:
        return None
    deixados = (np.sum(valores) - valores) / (M - 1)
    return float(math.sqrt((M - 1) / M * np.sum((deixados - deixados.mean()) ** 2)))


def _valores_replica(pedidos: Sequence[Tuple[str, Tuple[int, int, int]]], i_t: int,
                     seed: NoiseSeed, amostra: int, ctx: ContextoMC,
                     estatistica: str) -> List[float]:
    grid = ctx.grid
    precisa_upsilon = any(not (s == "1" or s.startswith("1^")) for s, _ in pedidos)
    if precisa_upsilon:
        U = build_upsilon(seed, grid, ctx.Q, ctx.V, ctx.eps, ctx.t_grid, ctx.renorm,
                          amostra=amostra, t_burn=ctx.t_burn)
        X = U.auxiliares["1"][i_t]
    else:
        Qe = ctx.Q.com_eps(ctx.eps)
        ens = sample_stationary(seed, grid, Qe, amostra)
        for _ in range(i_t):
            ens = advance(ens, float(ctx.t_grid[1] - ctx.t_grid[0]))
        X = ens.campo()
        U = None

    valores = []
    for simbolo, k in pedidos:
        if simbolo == "1":
            campo = X
        elif simbolo.startswith("1^"):
            campo = wick_power_campo(X, int(simbolo[2:]), ctx.nu)
        else:
            campo = U.componente(simbolo, i_t)
        coef = campo[k]
        valores.append(float(abs(coef) ** 2) if estatistica == "quadrado" else float(coef.real))
    return valores


def mc_moments(pedidos: Sequence[Tuple[str, Sequence[int]]], t: float, M: int,
               seed: NoiseSeed, ctx: ContextoMC, estatistica: str = "quadrado",
               dt_oraculo: Optional[float] = None) -> List[MomentReport]:
    """
    Vários momentos a partir das mesmas réplicas

    Args:
        pedidos: pares (símbolo, modo)
        t: instante (deve estar em ctx.t_grid)
        M: número de réplicas
        estatistica: "quadrado" (E|τ̂|², oráculo de Wick) ou "media" (E Re τ̂, oráculo 0)
        dt_oraculo: passo usado no oráculo de ⟨3'0⟩
    """
    if M < 1:
        raise ErroParametro("M deve ser >= 1")
    pedidos = [(s, tuple(int(c) for c in k)) for s, k in pedidos]
    i_t = int(np.flatnonzero(np.isclose(ctx.t_grid, t, rtol=0.0, atol=1e-9))[0]) \
        if np.any(np.isclose(ctx.t_grid, t, rtol=0.0, atol=1e-9)) else None
    if i_t is None:
        raise ErroTempo(f"t={t} fora da grade temporal")

    def _tarefa(i):
        return _valores_replica(pedidos, i_t, seed, i, ctx, estatistica)

    if ctx.threads <= 1:
        linhas = [_tarefa(i) for i in range(M)]
    else:
        with ThreadPoolExecutor(max_workers=ctx.threads) as executor:
            linhas = list(executor.map(_tarefa, range(M)))
    tabela = np.asarray(linhas, dtype=float).reshape(M, len(pedidos))

    relatorios = []
    for j, (simbolo, k) in enumerate(pedidos):
        valores = tabela[:, j]
        if estatistica == "quadrado":
            oraculo = second_moment_oracle(simbolo, k, (t, t), ctx.Q, ctx.eps, ctx.grid.K,
                                           ctx.V, ctx.renorm, dt=dt_oraculo)
        else:
            oraculo = 0.0
        media = float(np.mean(valores))
        se = _jackknife(valores)
        z = (media - oraculo) / se if se not in (None, 0.0) else None
        relatorios.append(MomentReport(simbolo, k, media, se, oraculo, z, M))
    return relatorios


def mc_moment(symbol: str, k: Sequence[int], t: float, M: int, seed: NoiseSeed,
              ctx: ContextoMC, estatistica: str = "quadrado",
              dt_oraculo: Optional[float] = None) -> MomentReport:
    """Média amostral de |τ̂(t,k)|² com erro padrão jackknife, comparada ao oráculo"""
    return mc_moments([(symbol, k)], t, M, seed, ctx, estatistica, dt_oraculo)[0]


# ============================================
# DIAGNÓSTICOS
# ============================================

def regularity_diagnostic(momentos: np.ndarray, alpha: float, d: int = 3,
                          limite: float = 4.0) -> RegularityReport:
    """
    sup_k ⟨k⟩^{d+2α}E|τ̂(k)|² e máximo por camada diádica

    A tendência é plana quando nenhuma camada excede `limite` vezes a
    primeira camada não nula.

    Args:
        momentos: E|τ̂(k)|² no formato da rede (2K+1)^d
        alpha: regularidade testada
        d: dimensão
    """
    momentos = np.asarray(momentos, dtype=float)
    n = momentos.shape[0]
    K = (n - 1) // 2
    eixos = np.meshgrid(*([np.arange(-K, K + 1)] * d), indexing="ij")
    norma = np.sqrt(sum(e * e for e in eixos))
    bracket = np.sqrt(1.0 + 4.0 * np.pi ** 2 * norma ** 2)
    ponderado = bracket ** (d + 2.0 * alpha) * momentos

    idx = np.unravel_index(int(np.argmax(ponderado)), ponderado.shape)
    k_sup = tuple(int(i) - K for i in idx)
    sup = float(ponderado[idx])

    camada = np.where(norma < 1.0, -1, np.floor(np.log2(np.maximum(norma, 1.0))).astype(int))
    camadas = {int(j): float(np.max(ponderado[camada == j])) for j in np.unique(camada)}
    referencia = next((v for _, v in sorted(camadas.items()) if v > 0), 0.0)
    crescimento = max(camadas.values()) / referencia if referencia > 0 else 0.0
    return RegularityReport(sup, k_sup, camadas, float(crescimento), bool(crescimento <= limite))


def x_norm(U: EnhancedNoise, T: float, kappa: float = KAPPA_PADRAO) -> float:
    """
    ‖Υ‖_{X_T}: soma dos sup_t‖τ(t)‖_{|τ|} mais o termo de Hölder-1/8 de ⟨3'0⟩

    O sup de Hölder é tomado sobre pares da grade com |t−s| ≥ Δt.
    """
    if T > U.t_grid[-1] + 1e-12:
        raise ErroTempo(f"T={T} além da grade temporal (fim {U.t_grid[-1]})")
    ultimos = np.flatnonzero(U.t_grid <= T + 1e-12)
    total = 0.0
    for tag in COMPONENTES_UPSILON:
        alfa = REGULARIDADES[tag](kappa)
        total += max(besov_norm(U.componentes[tag][i], alfa) for i in ultimos)

    trajetoria = U.componentes["3'0"]
    holder = 0.0
    for a in ultimos:
        for b in ultimos:
            if b <= a:
                continue
            distancia = besov_norm(trajetoria[b] - trajetoria[a], 0.25 - kappa)
            holder = max(holder, distancia / (U.t_grid[b] - U.t_grid[a]) ** 0.125)
    return float(total + holder)
