"""
Orquestração de experimentos
Configuração JSON, varreduras de constantes, auditoria de momentos,
execuções do integrador, estudo acoplado ε → 0 e validação.
"""

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config import (
    COMPONENTES_UPSILON,
    EPS_SUAVIZACAO,
    EXPOENTES_BONY,
    EXPOENTES_COMUTADOR,
    EXPOENTES_SUAVIZACAO,
    K_VALIDACAO,
    KAPPA_PADRAO,
    LIMITE_RAZAO,
    NU_PADRAO,
    R2_MINIMO_LOG,
    T_BURN,
    VERSAO,
)
from database import RunStore, store
from spde.besov import bony_ratios, commutator_ratio, smoothing_ratio
from spde.diagrams import ContextoMC, build_limit_upsilon, build_upsilon, mc_moments
from spde.erros import ErroConfig, ErroCrescimento, ErroExplosao, ErroSimbolo
from spde.fourier_core import DispersionQ, FourierField, FrequencyLattice, forward, validate_symbol
from spde.gaussian import NoiseSeed
from spde.renorm import (
    Potential,
    ajuste_log,
    alvo_eps_c1,
    compute_renorm_set,
    standard_constants,
)
from spde.solver import SolverConfig, reconstruct_phi, solve, y_norm
from utils.formatters import formatar_duracao, formatar_modo, hash_config, json_canonico
from utils.validators import validar_experimento

logger = logging.getLogger(__name__)

LIMITE_Z = 4.0

MOMENTOS_PADRAO = [
    ["1", [0, 0, 0]],
    ["1", [1, 0, 0]],
    ["1'", [1, 0, 0]],
    ["2'", [1, 0, 0]],
]

SOLVER_PADRAO = {
    "dt": 1e-3,
    "T": 0.1,
    "modo": "sequencial",
    "picard_iters": 50,
    "kappa": KAPPA_PADRAO,
    "passo_snapshot": 10,
}


# ============================================
# CONFIGURAÇÃO DO EXPERIMENTO
# ============================================

@dataclass
class ExperimentConfig:
    """
    Experimento descrito em JSON (a gramática está no README)

    Attributes:
        nome: rótulo do diretório de saída
        simbolo: {"familia": nome, "params": {...}}
        potencial: (v₂, v₄, ..., v_{2n})
        eps: lista de ε
        regra_K: {"tipo": "fator", "fator": c} ou {"tipo": "fixo", "K": n}
        seed: semente mestre
        amostras: réplicas Monte Carlo
        momentos: pares [símbolo, [k1, k2, k3]] auditados por `moments`
        solver: dt, T, modo, picard_iters, kappa, passo_snapshot
        t_burn: aquecimento das integrais estacionárias
        saida: diretório base ("" usa PHI4_OUT_DIR)
    """

    nome: str = "experimento"
    simbolo: Dict[str, Any] = field(
        default_factory=lambda: {"familia": "bilaplaciano", "params": {"nu": NU_PADRAO}})
    potencial: List[float] = field(default_factory=lambda: [0.0, 0.25])
    eps: List[float] = field(default_factory=lambda: [0.2])
    regra_K: Dict[str, Any] = field(default_factory=lambda: {"tipo": "fator", "fator": 4.0})
    seed: int = 20240611
    amostras: int = 100
    momentos: List[Any] = field(default_factory=lambda: [list(m) for m in MOMENTOS_PADRAO])
    solver: Dict[str, Any] = field(default_factory=lambda: dict(SOLVER_PADRAO))
    t_burn: float = T_BURN
    saida: str = ""

    # ---- ida e volta ---------------------------------------------------
    def como_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json_canonico(self.como_dict())

    @classmethod
    def from_dict(cls, dados: Dict[str, Any], comando: Optional[str] = None) -> "ExperimentConfig":
        conhecidos = {f.name for f in fields(cls)}
        desconhecidos = set(dados) - conhecidos
        if desconhecidos:
            raise ErroConfig(f"chaves desconhecidas: {sorted(desconhecidos)}")
        base = cls().como_dict()
        base.update(dados)
        solver = dict(SOLVER_PADRAO)
        solver.update(base["solver"] or {})
        base["solver"] = solver
        valido, mensagem = validar_experimento(base, comando)
        if not valido:
            raise ErroConfig(mensagem)
        return cls(**base)

    @classmethod
    def from_json(cls, texto: str, comando: Optional[str] = None) -> "ExperimentConfig":
        try:
            dados = json.loads(texto)
        except json.JSONDecodeError as e:
            raise ErroConfig(f"JSON inválido: {e}")
        if not isinstance(dados, dict):
            raise ErroConfig("o experimento deve ser um objeto JSON")
        return cls.from_dict(dados, comando)

    @classmethod
    def carregar(cls, caminho: str, comando: Optional[str] = None) -> "ExperimentConfig":
        try:
            texto = Path(caminho).read_text(encoding="utf-8")
        except OSError as e:
            raise ErroConfig(f"não foi possível ler {caminho}: {e}")
        return cls.from_json(texto, comando)

    # ---- derivados -----------------------------------------------------
    def hash(self) -> str:
        return hash_config(self.como_dict())

    def simbolo_Q(self) -> DispersionQ:
        return DispersionQ.da_familia(self.simbolo["familia"], self.simbolo.get("params", {}))

    def potencial_V(self) -> Potential:
        return Potential(tuple(self.potencial))

    def corte(self, eps: float) -> int:
        if self.regra_K["tipo"] == "fixo":
            return int(self.regra_K["K"])
        return int(math.ceil(float(self.regra_K["fator"]) / eps - 1e-12))

    def t_grid(self) -> np.ndarray:
        passos = int(round(self.solver["T"] / self.solver["dt"]))
        return np.arange(passos + 1) * float(self.solver["dt"])


def _repositorio(cfg: ExperimentConfig, repositorio: Optional[RunStore]) -> RunStore:
    if repositorio is not None:
        return repositorio
    return RunStore(cfg.saida) if cfg.saida else store


def _manifesto_base(cfg: ExperimentConfig, comando: str) -> Dict[str, Any]:
    return {
        "versao": VERSAO,
        "comando": comando,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "config": cfg.como_dict(),
        "componentes": list(COMPONENTES_UPSILON),
    }


def _mapear(funcao, itens, threads: int) -> list:
    if threads <= 1:
        return [funcao(item) for item in itens]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(funcao, itens))


# ============================================
# constants
# ============================================

def cmd_constants(cfg: ExperimentConfig, threads: int = 1,
                  repositorio: Optional[RunStore] = None) -> Tuple[Path, bool]:
    """
    Varre ε e grava (ε, K, σ_ε², λ, C1, C2, C3, C_total) mais diagnósticos

    Com três ou mais ε a divergência de C2 é auditada: a regressão contra
    log(1/ε) precisa de R² > R2_MINIMO_LOG. Para 𝒬 = z² + νz⁴ isso só vale
    quando 2π√ν ε ≪ 1; fora desse regime a rede ainda não resolve a
    transição e os incrementos de C2 variam.

    Returns:
        (caminho do CSV, True se a auditoria logarítmica passou)
    """
    Q = cfg.simbolo_Q()
    V = cfg.potencial_V()
    inicio = time.time()

    def _ponto(eps: float):
        return compute_renorm_set(Q, V, eps, K=cfg.corte(eps))

    conjuntos = _mapear(_ponto, cfg.eps, threads)

    linhas = []
    for r in conjuntos:
        alvo = alvo_eps_c1(V, r.sigma2, r.lam) if math.isfinite(r.sigma2) else None
        linhas.append((r.eps, r.K, r.sigma2_eps, r.lam, r.C1, r.C2, r.C3, r.C_total,
                       r.eps * r.C1, alvo))

    diagnosticos: Dict[str, Any] = {}
    passou = True
    if len(conjuntos) >= 2:
        diagnosticos["C2_vs_log"] = ajuste_log([r.eps for r in conjuntos], [r.C2 for r in conjuntos])
        diagnosticos["C1_vs_log"] = ajuste_log([r.eps for r in conjuntos], [r.eps * r.C1 for r in conjuntos])
    if len(conjuntos) >= 3:
        r2 = diagnosticos["C2_vs_log"]["r2"]
        passou = bool(np.isfinite(r2) and r2 > R2_MINIMO_LOG)
        diagnosticos["C2_log_passou"] = passou
        if not passou:
            logger.warning("C2 fora do regime logarítmico: R²=%.5f <= %g (símbolo %s)",
                           r2, R2_MINIMO_LOG, Q.nome)

    repo = _repositorio(cfg, repositorio)
    diretorio = repo.abrir_execucao(f"{cfg.nome}-constants", cfg.hash())
    caminho = repo.escrever_csv(
        diretorio, "constants.csv",
        ["eps", "K", "sigma2_eps", "lambda", "C1", "C2", "C3", "C_total", "eps_C1", "eps_C1_alvo"],
        linhas, cfg.hash(), cfg.seed,
    )
    manifesto = _manifesto_base(cfg, "constants")
    manifesto["constantes"] = [r.como_dict() for r in conjuntos]
    manifesto["diagnosticos"] = diagnosticos
    manifesto["arquivos"] = [caminho.name]
    repo.salvar_manifesto(diretorio, manifesto)
    logger.info("constants: %d pontos em %s", len(conjuntos), formatar_duracao(time.time() - inicio))
    return caminho, passou


# ============================================
# moments
# ============================================

def cmd_moments(cfg: ExperimentConfig, threads: int = 1,
                repositorio: Optional[RunStore] = None) -> Tuple[Path, bool]:
    """
    Auditoria Monte Carlo dos segundos momentos contra os oráculos de Wick

    As constantes usam o dt do integrador, de modo que a centragem é exata
    para os objetos discretizados.

    Returns:
        (caminho do CSV, True se todo |z| <= 4)
    """
    Q = cfg.simbolo_Q()
    V = cfg.potencial_V()
    seed = NoiseSeed(cfg.seed)
    dt = float(cfg.solver["dt"])
    t_grid = np.array([0.0, dt])
    pedidos = [(s, tuple(k)) for s, k in cfg.momentos]

    linhas = []
    passou = True
    for eps in cfg.eps:
        K = cfg.corte(eps)
        grid = FrequencyLattice(K)
        precisa_constantes = any(not (s == "1" or s.startswith("1^")) for s, _ in pedidos)
        renorm = compute_renorm_set(Q, V, eps, K=K, dt=dt, threads=threads) if precisa_constantes else None
        ctx = ContextoMC(grid, Q, eps, t_grid, V, renorm, cfg.t_burn, threads)
        for rel in mc_moments(pedidos, 0.0, cfg.amostras, seed, ctx, dt_oraculo=dt):
            linhas.append((eps, K, rel.simbolo, formatar_modo(rel.k), rel.media,
                           rel.erro_padrao, rel.oraculo, rel.z))
            if rel.z is not None and abs(rel.z) > LIMITE_Z:
                passou = False
                logger.warning("momento %s k=%s em ε=%g: z=%.2f", rel.simbolo, rel.k, eps, rel.z)
            elif rel.z is None:
                logger.warning("momento %s k=%s em ε=%g: z indefinido", rel.simbolo, rel.k, eps)

    repo = _repositorio(cfg, repositorio)
    diretorio = repo.abrir_execucao(f"{cfg.nome}-moments", cfg.hash())
    caminho = repo.escrever_csv(
        diretorio, "moments.csv",
        ["eps", "K", "simbolo", "k", "media", "erro_padrao", "oraculo", "z"],
        linhas, cfg.hash(), cfg.seed,
    )
    manifesto = _manifesto_base(cfg, "moments")
    manifesto["resumo"] = {"passou": passou, "limite_z": LIMITE_Z}
    manifesto["arquivos"] = [caminho.name]
    repo.salvar_manifesto(diretorio, manifesto)
    return caminho, passou


# ============================================
# solve
# ============================================

def _solver_config(cfg: ExperimentConfig, eps: float, lam: float, K: int) -> SolverConfig:
    s = cfg.solver
    return SolverConfig(
        eps=eps, lam=lam, dt=float(s["dt"]), T=float(s["T"]), K=K,
        kappa=float(s.get("kappa", KAPPA_PADRAO)),
        picard_iters=int(s.get("picard_iters", 50)), modo=s.get("modo", "sequencial"),
        Q=cfg.simbolo_Q() if eps > 0 else DispersionQ.laplaciano(0.0),
        V=cfg.potencial_V() if eps > 0 else None,
    )


def _retomar(repo: RunStore, diretorio: Path) -> Optional[Dict[str, Any]]:
    """Manifesto de uma execução completa, com todos os snapshots verificados"""
    manifesto = repo.ler_manifesto(diretorio)
    if not manifesto or not manifesto.get("completo"):
        return None
    for nome in manifesto.get("snapshots", []):
        repo.ler_snapshot(diretorio / nome)
    logger.info("execução já completa em %s; snapshots verificados", diretorio)
    return manifesto


def cmd_solve(cfg: ExperimentConfig, threads: int = 1,
              repositorio: Optional[RunStore] = None) -> Path:
    """
    Amostra Υ_ε, resolve (v, w) e grava snapshots de v, w e Φ_ε no passo configurado

    Usa o primeiro ε da lista. Uma execução completa já gravada é retomada
    (snapshots verificados) em vez de recalculada.

    Returns:
        diretório da execução
    """
    eps = float(cfg.eps[0])
    K = cfg.corte(eps)
    grid = FrequencyLattice(K)
    Q = cfg.simbolo_Q()
    V = cfg.potencial_V()
    seed = NoiseSeed(cfg.seed)
    dt = float(cfg.solver["dt"])
    passo_snapshot = int(cfg.solver.get("passo_snapshot", 10))

    repo = _repositorio(cfg, repositorio)
    diretorio = repo.abrir_execucao(f"{cfg.nome}-solve", cfg.hash())
    if _retomar(repo, diretorio) is not None:
        return diretorio

    renorm = compute_renorm_set(Q, V, eps, K=K, dt=dt, threads=threads)
    sc = _solver_config(cfg, eps, renorm.lam, K)
    sc.threads = threads
    U = build_upsilon(seed, grid, Q, V, eps, sc.t_grid, renorm, t_burn=cfg.t_burn)

    manifesto = _manifesto_base(cfg, "solve")
    manifesto["constantes"] = renorm.como_dict()
    manifesto["completo"] = False
    snapshots: List[str] = []
    try:
        P = solve(sc, U)
    except ErroExplosao as e:
        if e.ultimo_estado is not None:
            v, w = e.ultimo_estado
            snapshots.append(repo.salvar_snapshot(diretorio, "v_explosao", v).name)
            snapshots.append(repo.salvar_snapshot(diretorio, "w_explosao", w).name)
        manifesto["explosao"] = {"tempo": e.tempo, "mensagem": e.mensagem}
        manifesto["snapshots"] = snapshots
        repo.salvar_manifesto(diretorio, manifesto)
        raise

    phi = reconstruct_phi(U, P, renorm.lam)
    linhas = []
    for i in range(0, len(P.t_grid), passo_snapshot):
        for rotulo, campo in (("v", P.v_traj[i]), ("w", P.w_traj[i]), ("phi", phi[i])):
            snapshots.append(repo.salvar_snapshot(diretorio, f"{rotulo}_{i:06d}", campo).name)
        linhas.append((float(P.t_grid[i]), P.v_traj[i].sup_coef(), P.w_traj[i].sup_coef(),
                       phi[i].sup_coef()))
    caminho = repo.escrever_csv(diretorio, "trajetoria.csv", ["t", "sup_v", "sup_w", "sup_phi"],
                                linhas, cfg.hash(), cfg.seed)

    manifesto["completo"] = True
    manifesto["snapshots"] = snapshots
    manifesto["y_norm"] = y_norm(P, eps, sc.T, sc.kappa, sc.delta0, V.n)
    manifesto["varreduras_picard"] = P.sweeps
    manifesto["arquivos"] = [caminho.name]
    repo.salvar_manifesto(diretorio, manifesto)
    return diretorio


# ============================================
# converge
# ============================================

def cmd_converge(cfg: ExperimentConfig, threads: int = 1,
                 repositorio: Optional[RunStore] = None) -> Tuple[Path, bool]:
    """
    Estudo acoplado: resolve em cada ε e em ε = 0 com o mesmo ruído branco
    e grava a distância Y entre os pares (v_ε, w_ε) e (v, w)

    Todos os ε compartilham a rede do menor ε. O modelo limite usa o corte
    nítido |k|_∞ ≤ K e constantes discretas no mesmo dt.

    Returns:
        (caminho do CSV, True se as distâncias decrescem com ε)
    """
    Q = cfg.simbolo_Q()
    V = cfg.potencial_V()
    seed = NoiseSeed(cfg.seed)
    dt = float(cfg.solver["dt"])
    lista = sorted((float(e) for e in cfg.eps), reverse=True)
    K = cfg.corte(min(lista))
    grid = FrequencyLattice(K)
    Q0 = DispersionQ.laplaciano(0.0)

    conjuntos = {eps: compute_renorm_set(Q, V, eps, K=K, dt=dt, threads=threads) for eps in lista}
    lam = conjuntos[lista[0]].lam

    sc0 = _solver_config(cfg, 0.0, lam, K)
    constantes0 = standard_constants(1.0 / K if K > 0 else 1.0, K, dt=dt, threads=threads)
    U0 = build_limit_upsilon(seed, grid, 1.0 / K if K > 0 else 1.0, sc0.t_grid,
                             constantes=constantes0, t_burn=cfg.t_burn)
    P0 = solve(sc0, U0)

    def _distancia(eps: float) -> Tuple[float, float, float]:
        sc = _solver_config(cfg, eps, lam, K)
        U = build_upsilon(seed, grid, Q, V, eps, sc.t_grid, conjuntos[eps],
                          acoplado_a=Q0, t_burn=cfg.t_burn)
        P = solve(sc, U)
        diferenca = P - P0
        sup = max(max(a.sup_coef() for a in diferenca.v_traj), max(b.sup_coef() for b in diferenca.w_traj))
        return eps, y_norm(diferenca, eps, sc.T, sc.kappa, sc.delta0, V.n), sup

    resultados = _mapear(_distancia, lista, threads)
    distancias = [d for _, d, _ in resultados]
    monotona = all(b < a for a, b in zip(distancias, distancias[1:]))
    if not monotona:
        logger.warning("distâncias Y não decrescem ao longo de ε: %s", distancias)

    repo = _repositorio(cfg, repositorio)
    diretorio = repo.abrir_execucao(f"{cfg.nome}-converge", cfg.hash())
    caminho = repo.escrever_csv(diretorio, "converge.csv", ["eps", "K", "distancia_Y", "distancia_sup"],
                                [(e, K, d, s) for e, d, s in resultados], cfg.hash(), cfg.seed)
    manifesto = _manifesto_base(cfg, "converge")
    manifesto["lambda"] = lam
    manifesto["constantes_limite"] = {"c1": constantes0[0], "c2": constantes0[1]}
    manifesto["tendencia_monotona"] = monotona
    manifesto["arquivos"] = [caminho.name]
    repo.salvar_manifesto(diretorio, manifesto)
    return caminho, monotona


# ============================================
# validate
# ============================================

def _campo_aleatorio(seed: NoiseSeed, grid: FrequencyLattice, amostra: int) -> FourierField:
    """Campo real de banda limitada a partir de ruído físico"""
    ruido = seed.gerador(amostra, 0).standard_normal((grid.M,) * 3)
    return forward(ruido, grid)


def cmd_validate(cfg: ExperimentConfig, threads: int = 1,
                 repositorio: Optional[RunStore] = None, pares: int = 20,
                 K: int = K_VALIDACAO) -> Tuple[Path, bool]:
    """
    Valida 𝒬 e mede as razões das estimativas de Bony, do comutador e da suavização

    Bony em (α, β) = EXPOENTES_BONY, comutador em EXPOENTES_COMUTADOR e
    suavização em (α, γ) = EXPOENTES_SUAVIZACAO com t diádico em [1e−4, 1],
    para cada ε de EPS_SUAVIZACAO. Cada razão passa com pior valor <= LIMITE_RAZAO.

    Args:
        pares: número de campos aleatórios (cada amostra usa três)
        K: corte da rede dos campos aleatórios

    Raises:
        ErroSimbolo / ErroCrescimento: se 𝒬 reprova (o CSV é gravado antes)
    """
    Q = cfg.simbolo_Q()
    seed = NoiseSeed(cfg.seed)
    relatorio = validate_symbol(Q)
    linhas: List[tuple] = [
        (f"simbolo_item_{item}", 1.0 if ok else 0.0, 1.0, ok) for item, ok in sorted(relatorio.itens.items())
    ]
    linhas.append(("simbolo_eta", relatorio.eta_hat, 0.0, relatorio.eta_hat > 0))

    grid = FrequencyLattice(K)
    # com 𝒬 reprovado só o semigrupo limite (ε = 0) está definido
    suavizacao = {e: Q.com_eps(e) if e > 0 else DispersionQ.laplaciano(0.0)
                  for e in EPS_SUAVIZACAO if e == 0 or relatorio.passou}
    tempos = [2.0 ** -j for j in range(0, 14)]
    kappa = float(cfg.solver.get("kappa", KAPPA_PADRAO))

    def _amostra(i: int) -> Dict[str, float]:
        f = _campo_aleatorio(seed, grid, 3 * i)
        g = _campo_aleatorio(seed, grid, 3 * i + 1)
        h = _campo_aleatorio(seed, grid, 3 * i + 2)
        razoes = bony_ratios(f, g, *EXPOENTES_BONY)
        razoes["com"] = commutator_ratio(f, g, h, *EXPOENTES_COMUTADOR)
        for e, Qe in suavizacao.items():
            razoes[f"suavizacao_eps_{e:g}"] = smoothing_ratio(f, Qe, *EXPOENTES_SUAVIZACAO, tempos)
        return razoes

    amostras = _mapear(_amostra, range(pares), threads)
    chaves = ["lt", "gt", "res", "com"] + [f"suavizacao_eps_{e:g}" for e in suavizacao]
    for chave in chaves:
        pior = max(a[chave] for a in amostras)
        linhas.append((f"razao_{chave}", float(pior), LIMITE_RAZAO, bool(pior <= LIMITE_RAZAO)))
    razoes_ok = all(l[3] for l in linhas if l[0].startswith("razao_"))

    repo = _repositorio(cfg, repositorio)
    diretorio = repo.abrir_execucao(f"{cfg.nome}-validate", cfg.hash())
    caminho = repo.escrever_csv(diretorio, "validate.csv", ["verificacao", "valor", "limite", "passou"],
                                linhas, cfg.hash(), cfg.seed)
    manifesto = _manifesto_base(cfg, "validate")
    manifesto["simbolo"] = {"passou": relatorio.passou, "motivo": relatorio.motivo,
                            "mensagens": {str(k): v for k, v in relatorio.mensagens.items()}}
    manifesto["kappa"] = kappa
    manifesto["arquivos"] = [caminho.name]
    repo.salvar_manifesto(diretorio, manifesto)

    if not relatorio.passou:
        erro = ErroCrescimento if relatorio.motivo == "growth-violation" else ErroSimbolo
        raise erro(f"𝒬 reprovado ({Q.nome})", relatorio.motivo)
    return caminho, razoes_ok


COMANDOS = {
    "constants": cmd_constants,
    "moments": cmd_moments,
    "solve": cmd_solve,
    "converge": cmd_converge,
    "validate": cmd_validate,
}
