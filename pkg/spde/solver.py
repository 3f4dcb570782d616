"""
Sistema do resto paracontrolado
Coeficientes F_j, o mapa G_ε, o resto de Taylor, o integrador exponencial
(sequencial ou por varreduras de Picard), normas Y e a reconstrução
Φ_ε = ⟨1⟩_ε − λ⟨3'0⟩_ε + v_ε + w_ε, mais a referência de força bruta.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import KAPPA_PADRAO, T_BURN
from spde.besov import (
    besov_norm,
    para_gt,
    para_lt,
    resonance,
)
from spde.diagrams import EnhancedNoise, trajetoria_livre
from spde.erros import ErroExplosao, ErroGrade, ErroNaoContracao, ErroParametro, ErroTempo
from spde.fourier_core import (
    DispersionQ,
    FourierField,
    FrequencyLattice,
    apply_semigroup,
    pointwise,
    peso_quadratura,
    product,
    propagador,
)
from spde.gaussian import NoiseSeed
from spde.renorm import Potential, RenormSet

logger = logging.getLogger(__name__)

MODOS = ("sequencial", "picard")


# ============================================
# CONFIGURAÇÃO E TIPOS
# ============================================

@dataclass
class SolverConfig:
    """
    Parâmetros do integrador

    Attributes:
        eps, lam: ε e λ_ε
        dt, T: passo e horizonte
        K: corte
        kappa, delta0: regularidades (δ₀ ∈ (0, κ/n), padrão κ/(2n))
        picard_iters: teto de varreduras no modo picard
        modo: "sequencial" ou "picard"
        Q: símbolo de ℒ_ε (o ε embutido é substituído por `eps`)
        V: potencial (exigido para ε > 0)
    """

    eps: float
    lam: float
    dt: float
    T: float
    K: int
    kappa: float = KAPPA_PADRAO
    delta0: Optional[float] = None
    picard_iters: int = 50
    modo: str = "sequencial"
    tol: float = 1e-8
    Q: DispersionQ = field(default_factory=lambda: DispersionQ.laplaciano(0.0))
    V: Optional[Potential] = None
    threads: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ErroParametro(f"dt deve ser > 0: {self.dt}")
        if self.T <= 0:
            raise ErroParametro(f"T deve ser > 0: {self.T}")
        if self.T > 1.0:
            logger.warning("horizonte T=%g acima de 1: fora da teoria local", self.T)
        if self.modo not in MODOS:
            raise ErroParametro(f"modo desconhecido: {self.modo}")
        if self.delta0 is None:
            self.delta0 = self.kappa / (2.0 * self.n)
        if not (0.0 < self.delta0 < self.kappa / self.n):
            raise ErroParametro(f"δ₀={self.delta0} fora de (0, κ/n) com κ={self.kappa}, n={self.n}")
        if self.eps > 0 and self.V is None:
            raise ErroParametro("ε > 0 exige o potencial V")

    @property
    def n(self) -> int:
        return self.V.n if self.V is not None else 2

    @property
    def passos(self) -> int:
        return int(round(self.T / self.dt))

    @property
    def t_grid(self) -> np.ndarray:
        return np.arange(self.passos + 1) * self.dt

    @property
    def L(self) -> DispersionQ:
        return self.Q.com_eps(self.eps)


@dataclass
class RemainderPair:
    """Trajetórias (v, w) na grade temporal"""

    v_traj: List[FourierField]
    w_traj: List[FourierField]
    t_grid: np.ndarray
    sweeps: int = 0

    @property
    def inicial(self) -> Tuple[FourierField, FourierField]:
        return self.v_traj[0], self.w_traj[0]

    def u(self, i: int) -> FourierField:
        return self.v_traj[i] + self.w_traj[i]

    def __sub__(self, outro: "RemainderPair") -> "RemainderPair":
        if len(self.t_grid) != len(outro.t_grid):
            raise ErroTempo("pares com grades temporais diferentes")
        return RemainderPair([a - b for a, b in zip(self.v_traj, outro.v_traj)],
                             [a - b for a, b in zip(self.w_traj, outro.w_traj)],
                             self.t_grid)


# ============================================
# RESTO DE TAYLOR E COEFICIENTES
# ============================================

def taylor_remainder(V: Potential, x, y):
    """
    V′(x; y) = V′(x+y) − Σ_{j=0}^{3} V^{(j+1)}(x) y^j / j!

    Somado diretamente pelos termos j ≥ 4 da expansão exata.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    for j in range(4, V.grau):
        derivada = V.derivada(j + 1)
        if not np.any(derivada.coef):
            continue
        total = total + derivada(x) * y ** j / math.factorial(j)
    return total if total.ndim else float(total)


def coeffs_F(lam: float, U: EnhancedNoise, t) -> List[FourierField]:
    """
    F₀..F₃ no instante t (tempo ou índice inteiro da grade)

    Returns:
        [F0, F1, F2, F3]
    """
    i = t if isinstance(t, (int, np.integer)) else U.indice(t)
    c = {tag: U.componente(tag, i) for tag in ("0'", "1'", "2'", "3'0", "3'1'", "2'2'", "3'2'")}
    zero, um, tres = c["0'"], c["1'"], c["3'0"]

    F3 = -lam * zero
    F2 = 3.0 * lam ** 2 * product(zero, tres) - 3.0 * lam * um

    tres2 = product(tres, tres)
    F1 = (-3.0 * lam ** 3 * pointwise([zero, tres], lambda a, b: a * b * b, 3)
          + 6.0 * lam ** 2 * (para_lt(tres, um) + para_gt(tres, um) + c["3'1'"])
          + 9.0 * lam ** 2 * c["2'2'"])

    com = resonance(para_lt(tres, tres), um) - product(tres, resonance(tres, um))
    colchete = (para_lt(tres2, um) + para_gt(tres2, um)
                + resonance(resonance(tres, tres), um)
                + 2.0 * product(c["3'1'"], tres) + 2.0 * com)
    F0 = (lam ** 4 * pointwise([zero, tres], lambda a, b: a * b ** 3, 4)
          - 3.0 * lam ** 3 * colchete
          + 3.0 * lam ** 2 * c["3'2'"]
          - 9.0 * lam ** 3 * product(c["2'2'"], tres))
    return [F0, F1, F2, F3]


# ============================================
# MAPA G
# ============================================

def g_map(lam: float, U: EnhancedNoise, u: FourierField, t, eps: float,
          psi: Optional[FourierField], h: FourierField,
          historico: Optional[FourierField] = None, V: Optional[Potential] = None,
          F: Optional[List[FourierField]] = None) -> FourierField:
    """
    G_ε(λ, Υ(t), u)

    Args:
        lam: λ_ε
        U: ruído aumentado (precisa de ⟨2'0⟩ entre os auxiliares)
        u: v + w no instante t
        t: tempo ou índice
        eps: ε (0 seleciona G_0, sem o resto de Taylor)
        psi: ⟨1⟩_ε(t) para ε > 0
        h: e^{t(ℒ_ε−1)}⟨2'0⟩(0)
        historico: ℐ_ε((u−λ⟨3'0⟩)≺⟨2'⟩)(t) acumulado no passado (None = 0)
        V: potencial, exigido para ε > 0
        F: coeficientes já calculados para t
    """
    i = t if isinstance(t, (int, np.integer)) else U.indice(t)
    if u.grid.K != U.grid.K or h.grid.K != U.grid.K:
        raise ErroGrade("u, h e Υ em redes diferentes")
    dois = U.componente("2'", i)
    f = u - lam * U.componente("3'0", i)
    if F is None:
        F = coeffs_F(lam, U, i)

    G = pointwise([*F, u], lambda a, b, c, d, x: a + x * (b + x * (c + x * d)), 4)
    G = G - 3.0 * lam * para_gt(f, dois)

    if eps > 0:
        if psi is None or V is None:
            raise ErroParametro("G_ε com ε > 0 exige ψ e V")
        if V.grau > 4:
            raiz = math.sqrt(eps)
            resto = pointwise([psi, f], lambda p, y: taylor_remainder(V, raiz * p, raiz * y),
                              V.grau - 1)
            G = G - eps ** -1.5 * resto

    if lam != 0.0:
        I2 = U.componente("2'0", i) - h
        comutador_I = (historico if historico is not None else FourierField.zeros(u.grid)) \
            - para_lt(f, I2)
        com = resonance(para_lt(f, I2), dois) - product(f, resonance(I2, dois))
        G = G + 9.0 * lam ** 2 * (com + resonance(dois, comutador_I)
                                  - product(resonance(dois, h), f))
    return G


# ============================================
# INTEGRADOR
# ============================================

def _finito(*campos: FourierField) -> bool:
    return all(np.all(np.isfinite(c.coeffs)) for c in campos)


class _Integrador:
    """Entradas pré-calculadas por instante e a regra exponencial de um passo"""

    def __init__(self, config: SolverConfig, U: EnhancedNoise, v0: FourierField):
        grid = FrequencyLattice(config.K)
        if U.grid.K != config.K or v0.grid.K != config.K:
            raise ErroGrade(f"Υ com K={U.grid.K}, configuração com K={config.K}")
        if len(U.t_grid) < config.passos + 1 or abs(U.dt - config.dt) > 1e-12 * config.dt:
            raise ErroTempo(
                f"Υ cobre {len(U.t_grid)} instantes com dt={U.dt}; "
                f"pedido {config.passos + 1} com dt={config.dt}"
            )
        self.config = config
        self.U = U
        self.grid = grid
        self.v0 = v0
        L = config.L
        self.decaimento = propagador(L, grid, config.dt)
        self.phi = peso_quadratura(L, grid, config.dt)
        self._h0 = U.componente("2'0", 0)
        self._cache: Dict[int, dict] = {}

    def entradas(self, i: int) -> dict:
        if i not in self._cache:
            t = float(self.U.t_grid[i])
            L = self.config.L
            self._cache[i] = {
                "F": coeffs_F(self.config.lam, self.U, i),
                "h": apply_semigroup(self._h0, L, t),
                "v0": apply_semigroup(self.v0, L, t),
            }
        return self._cache[i]

    def evoluir(self, campo: FourierField, integrando: FourierField) -> FourierField:
        return FourierField(self.grid, self.decaimento * campo.coeffs + self.phi * integrando.coeffs,
                            campo.hermitian and integrando.hermitian)

    def paraproduto(self, i: int, v: FourierField, w: FourierField) -> FourierField:
        """(v + w − λ⟨3'0⟩) ≺ ⟨2'⟩"""
        lam = self.config.lam
        return para_lt(v + w - lam * self.U.componente("3'0", i), self.U.componente("2'", i))

    def integrandos(self, i: int, v: FourierField, w: FourierField,
                    lt: FourierField, historico: FourierField) -> Tuple[FourierField, FourierField]:
        cfg = self.config
        ent = self.entradas(i)
        psi = self.U.componente("1", i) if cfg.eps > 0 else None
        G = g_map(cfg.lam, self.U, v + w, i, cfg.eps, psi, ent["h"], historico, cfg.V, ent["F"])
        iv = -3.0 * cfg.lam * lt
        iw = -3.0 * cfg.lam * resonance(self.U.componente("2'", i), ent["v0"] + w) + G
        return iv, iw


@dataclass
class EstadoPasso:
    """Memória de um passo para o próximo: v(0) e ℐ_ε(f≺⟨2'⟩) acumulado"""

    integrador: _Integrador
    historico: FourierField


def step(v: FourierField, w: FourierField, U: EnhancedNoise, config: SolverConfig, t,
         estado: Optional[EstadoPasso] = None) -> Tuple[FourierField, FourierField]:
    """
    Um passo de Euler exponencial de t para t + dt

    Sem `estado`, só o primeiro passo (t = 0) é aceito: v é o dado inicial e
    o histórico é nulo. O estado, quando dado, é atualizado no lugar.

    Raises:
        ErroParametro: `estado` ausente com t ≠ 0
    """
    i = t if isinstance(t, (int, np.integer)) else U.indice(t)
    if estado is None:
        if i != 0:
            raise ErroParametro(f"passo no índice {i} exige o estado acumulado desde t = 0")
        integrador = _Integrador(config, U, v)
        estado = EstadoPasso(integrador, FourierField.zeros(integrador.grid))
    integ = estado.integrador

    lt = integ.paraproduto(i, v, w)
    iv, iw = integ.integrandos(i, v, w, lt, estado.historico)
    v_novo = integ.evoluir(v, iv)
    w_novo = integ.evoluir(w, iw)
    estado.historico = integ.evoluir(estado.historico, lt)

    if not _finito(v_novo, w_novo):
        tempo = float(U.t_grid[i]) + config.dt
        raise ErroExplosao(f"valores não finitos em t={tempo:.6g}", tempo, (v, w))
    return v_novo, w_novo


def _marcha_sequencial(config: SolverConfig, U: EnhancedNoise, v0: FourierField,
                       w0: FourierField) -> RemainderPair:
    integrador = _Integrador(config, U, v0)
    estado = EstadoPasso(integrador, FourierField.zeros(integrador.grid))
    vs, ws = [v0], [w0]
    for i in range(config.passos):
        v, w = step(vs[-1], ws[-1], U, config, i, estado)
        vs.append(v)
        ws.append(w)
    return RemainderPair(vs, ws, config.t_grid)


def _varredura(integ: _Integrador, vs: List[FourierField], ws: List[FourierField],
               threads: int) -> Tuple[List[FourierField], List[FourierField]]:
    """Aplica o mapa integral discreto a uma trajetória inteira"""
    passos = integ.config.passos

    def _mapear(funcao, indices):
        if threads <= 1:
            return [funcao(i) for i in indices]
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(funcao, indices))

    lts = _mapear(lambda i: integ.paraproduto(i, vs[i], ws[i]), range(passos))
    historicos = [FourierField.zeros(integ.grid)]
    for i in range(passos - 1):
        historicos.append(integ.evoluir(historicos[-1], lts[i]))
    pares = _mapear(lambda i: integ.integrandos(i, vs[i], ws[i], lts[i], historicos[i]), range(passos))

    novos_v, novos_w = [vs[0]], [ws[0]]
    for i, (iv, iw) in enumerate(pares):
        novos_v.append(integ.evoluir(novos_v[-1], iv))
        novos_w.append(integ.evoluir(novos_w[-1], iw))
        if not _finito(novos_v[-1], novos_w[-1]):
            tempo = float(integ.U.t_grid[i + 1])
            raise ErroExplosao(f"valores não finitos em t={tempo:.6g}", tempo,
                               (novos_v[-2], novos_w[-2]))
    return novos_v, novos_w


def _distancia(a: Sequence[FourierField], b: Sequence[FourierField]) -> float:
    return max((x - y).sup_coef() for x, y in zip(a, b))


def _picard(config: SolverConfig, U: EnhancedNoise, v0: FourierField,
            w0: FourierField) -> RemainderPair:
    integ = _Integrador(config, U, v0)
    L = config.L
    vs = [apply_semigroup(v0, L, t) for t in config.t_grid]
    ws = [apply_semigroup(w0, L, t) for t in config.t_grid]

    distancias: List[float] = []
    for varredura in range(1, config.picard_iters + 1):
        novos_v, novos_w = _varredura(integ, vs, ws, config.threads)
        d = max(_distancia(novos_v, vs), _distancia(novos_w, ws))
        distancias.append(d)
        vs, ws = novos_v, novos_w
        logger.debug("Picard varredura %d: distância %.3e", varredura, d)
        if d <= config.tol:
            return RemainderPair(vs, ws, config.t_grid, sweeps=varredura)
        if len(distancias) >= 3 and distancias[-1] > distancias[-2] > distancias[-3]:
            raise ErroNaoContracao(
                f"distância cresceu em duas varreduras seguidas: {distancias[-3:]}", distancias
            )
    logger.warning("Picard parou no teto de %d varreduras (distância %.3e)",
                   config.picard_iters, distancias[-1])
    return RemainderPair(vs, ws, config.t_grid, sweeps=config.picard_iters)


def solve(config: SolverConfig, U: EnhancedNoise, v0: Optional[FourierField] = None,
          w0: Optional[FourierField] = None) -> RemainderPair:
    """
    Trajetória (v, w) em [0, T]

    Args:
        config: parâmetros
        U: ruído aumentado cobrindo [0, T] com o mesmo dt
        v0, w0: dados iniciais (padrão: zero)

    Raises:
        ErroExplosao: valores não finitos
        ErroNaoContracao: Picard divergindo
    """
    grid = FrequencyLattice(config.K)
    v0 = v0 if v0 is not None else FourierField.zeros(grid)
    w0 = w0 if w0 is not None else FourierField.zeros(grid)
    logger.info("resolvendo ε=%g λ=%g K=%d dt=%g T=%g (%s)",
                config.eps, config.lam, config.K, config.dt, config.T, config.modo)
    if config.modo == "picard":
        return _picard(config, U, v0, w0)
    return _marcha_sequencial(config, U, v0, w0)


# ============================================
# NORMA Y
# ============================================

def _norma_y_componente(traj: Sequence[FourierField], t_grid: np.ndarray, eps: float,
                        kappa: float, delta0: float, alfa_alto: float) -> float:
    normas_k = [besov_norm(f, kappa) for f in traj]
    normas_alto = [besov_norm(f, alfa_alto) for f in traj]

    if eps > 0:
        corte = eps * eps
        inicio = max((((math.sqrt(t) / eps) ** delta0) * n for t, n in zip(t_grid, normas_k)
                      if t <= corte), default=0.0)
        resto = max((n for t, n in zip(t_grid, normas_k) if t >= corte), default=0.0)
        alto = max(t ** (2.0 / 3.0) * n for t, n in zip(t_grid, normas_alto))
        base = inicio + resto + alto
    else:
        base = max(n + t ** (2.0 / 3.0) * na for t, n, na in zip(t_grid, normas_k, normas_alto))

    holder = 0.0
    for a in range(len(traj)):
        for b in range(a + 1, len(traj)):
            s, t = t_grid[a], t_grid[b]
            if s == 0.0:
                continue
            dif = besov_norm(traj[b] - traj[a], kappa)
            holder = max(holder, s ** 0.25 * dif / (t - s) ** 0.125)
    return base + holder


def y_norm(P: RemainderPair, eps: float, T: float, kappa: float = KAPPA_PADRAO,
           delta0: Optional[float] = None, n: int = 2) -> float:
    """
    ‖(v, w)‖_{Y_{T,ε}} nos pontos da grade

    ε = 0 seleciona a versão sem o peso (√t/ε)^{δ₀}.
    """
    if T > P.t_grid[-1] + 1e-12:
        raise ErroTempo(f"T={T} além da trajetória (fim {P.t_grid[-1]})")
    if delta0 is None:
        delta0 = kappa / (2.0 * n)
    ultimo = int(np.flatnonzero(P.t_grid <= T + 1e-12)[-1]) + 1
    t_grid = P.t_grid[:ultimo]
    return (_norma_y_componente(P.v_traj[:ultimo], t_grid, eps, kappa, delta0, 1.0 - 2.0 * kappa)
            + _norma_y_componente(P.w_traj[:ultimo], t_grid, eps, kappa, delta0, 1.0 + 2.0 * kappa))


# ============================================
# RECONSTRUÇÃO E REFERÊNCIA
# ============================================

def reconstruct_phi(U: EnhancedNoise, P: RemainderPair, lam: float) -> List[FourierField]:
    """Φ_ε = ⟨1⟩_ε − λ⟨3'0⟩_ε + v_ε + w_ε em cada instante"""
    return [U.componente("1", i) - lam * U.componente("3'0", i) + P.v_traj[i] + P.w_traj[i]
            for i in range(len(P.t_grid))]


def brute_force_reference(seed: NoiseSeed, config: SolverConfig, V: Potential, Q: DispersionQ,
                          renorm: RenormSet, phi0: FourierField, amostra: int = 0,
                          t_burn: float = T_BURN, renormalizar: bool = True) -> List[FourierField]:
    """
    Euler exponencial da equação completa
    ∂_tΦ = (ℒ_ε−1)Φ − ε^{−3/2}V′(√εΦ) + ξ + C_εΦ

    O ruído é o mesmo caminho de ⟨1⟩_ε usado por build_upsilon com a mesma
    semente e amostra: Φ = ⟨1⟩_ε + Z com Z integrado pela regra exponencial.

    Args:
        phi0: Φ(0)
        renormalizar: False remove o termo C_εΦ
    """
    if config.eps <= 0:
        raise ErroParametro("a referência exige ε > 0")
    if renorm.K != config.K or abs(renorm.eps - config.eps) > 1e-14:
        raise ErroGrade(f"constantes em (ε={renorm.eps}, K={renorm.K}), configuração em "
                        f"(ε={config.eps}, K={config.K})")
    grid = FrequencyLattice(config.K)
    if phi0.grid.K != grid.K:
        raise ErroGrade("Φ(0) em outra rede")
    L = Q.com_eps(config.eps)
    livre = trajetoria_livre(seed, grid, L, config.t_grid, amostra, None, t_burn)

    eps = config.eps
    raiz = math.sqrt(eps)
    C = renorm.C_total if renormalizar else 0.0
    derivada = V.derivada(1)
    decaimento = propagador(L, grid, config.dt)
    phi = peso_quadratura(L, grid, config.dt)

    Z = phi0 - livre[0]
    trajetoria = [phi0]
    for i in range(config.passos):
        campo = livre[i] + Z
        nao_linear = pointwise([campo], lambda p: -eps ** -1.5 * derivada(raiz * p) + C * p,
                               V.grau - 1)
        Z = FourierField(grid, decaimento * Z.coeffs + phi * nao_linear.coeffs, True)
        if not _finito(Z):
            tempo = float(config.t_grid[i + 1])
            raise ErroExplosao(f"referência explodiu em t={tempo:.6g}", tempo, trajetoria[-1])
        trajetoria.append(livre[i + 1] + Z)
    return trajetoria


def distancia_l2_relativa(A: Sequence[FourierField], B: Sequence[FourierField]) -> float:
    """max_t ‖A(t) − B(t)‖_{L²} / ‖B(t)‖_{L²}"""
    pior = 0.0
    for a, b in zip(A, B):
        den = float(np.sqrt(np.sum(np.abs(b.coeffs) ** 2)))
        num = float(np.sqrt(np.sum(np.abs((a - b).coeffs) ** 2)))
        pior = max(pior, num / den if den > 0 else num)
    return pior
