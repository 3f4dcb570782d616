"""
Núcleo de Fourier
Representação truncada de campos reais em 𝐓³, relação de dispersão para 𝒬
geral, transformadas, produtos sem aliasing e o semigrupo diagonal
e^{t(ℒ_ε−1)}.

Convenção: f̂(k) = ∫ f(x) e^{−2πik·x} dx, ou seja fftn(f)/M³.
"""

import logging
import struct
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from scipy import fft as sfft

from spde.erros import ErroGrade, ErroParametro, ErroSimbolo, ErroTempo

logger = logging.getLogger(__name__)

MAGIC_SNAPSHOT = b"PHI4FLD1"


# ============================================
# REDE DE FREQUÊNCIAS
# ============================================

@dataclass(frozen=True)
class FrequencyLattice:
    """
    Modos k ∈ {−K..K}³ e grade física com M pontos por dimensão

    O índice i de cada eixo corresponde à frequência i − K.
    """

    K: int
    M: int = 0

    def __post_init__(self):
        if self.K < 0:
            raise ErroGrade(f"K deve ser >= 0, recebido {self.K}")
        if self.M == 0:
            object.__setattr__(self, "M", 2 * self.K + 1)
        if self.M < 2 * self.K + 1:
            raise ErroGrade(f"M={self.M} < 2K+1={2 * self.K + 1}")

    @property
    def n(self) -> int:
        """Número de modos por eixo"""
        return 2 * self.K + 1

    @property
    def shape(self) -> tuple:
        return (self.n, self.n, self.n)

    def frequencias(self) -> np.ndarray:
        """Frequências inteiras de um eixo"""
        return np.arange(-self.K, self.K + 1)

    def vetores(self) -> tuple:
        """Três arrays (k1, k2, k3) no formato da rede"""
        k = self.frequencias()
        return np.meshgrid(k, k, k, indexing="ij")

    def normas(self) -> np.ndarray:
        """|k|₂ para cada modo"""
        k1, k2, k3 = self.vetores()
        return np.sqrt(k1 * k1 + k2 * k2 + k3 * k3)

    def indice(self, k: Sequence[int]) -> tuple:
        """Índice do modo k no array de coeficientes"""
        if any(abs(int(c)) > self.K for c in k):
            raise ErroGrade(f"modo {tuple(k)} fora da rede K={self.K}")
        return tuple(int(c) + self.K for c in k)

    def m_alias_free(self, grau: int) -> int:
        """Menor grade (rápida para FFT) sem aliasing para produtos de grau `grau`"""
        grau = max(int(grau), 1)
        return sfft.next_fast_len((grau + 1) * self.K + 1)


@dataclass
class FourierField:
    """Coeficientes complexos sobre a rede; hermitian indica campo real"""

    grid: FrequencyLattice
    coeffs: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != self.grid.shape:
            raise ErroGrade(
                f"coeficientes com formato {self.coeffs.shape}, esperado {self.grid.shape}"
            )

    # ---- construtores -------------------------------------------------
    @classmethod
    def zeros(cls, grid: FrequencyLattice) -> "FourierField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), True)

    @classmethod
    def constante(cls, grid: FrequencyLattice, c: float) -> "FourierField":
        campo = cls.zeros(grid)
        campo.coeffs[grid.K, grid.K, grid.K] = c
        return campo

    @classmethod
    def modo(cls, grid: FrequencyLattice, k: Sequence[int], valor: complex = 1.0) -> "FourierField":
        """Exponencial e_k (não hermitiana se k ≠ 0)"""
        campo = cls.zeros(grid)
        campo.coeffs[grid.indice(k)] = valor
        campo.hermitian = all(int(c) == 0 for c in k) and np.isreal(valor)
        return campo

    # ---- acesso --------------------------------------------------------
    def __getitem__(self, k) -> complex:
        return self.coeffs[self.grid.indice(k)]

    def copia(self) -> "FourierField":
        return FourierField(self.grid, self.coeffs.copy(), self.hermitian)

    def _checar(self, outro: "FourierField"):
        if self.grid.K != outro.grid.K:
            raise ErroGrade(f"redes diferentes: K={self.grid.K} e K={outro.grid.K}")

    # ---- aritmética linear ---------------------------------------------
    def __add__(self, outro):
        if isinstance(outro, FourierField):
            self._checar(outro)
            return FourierField(self.grid, self.coeffs + outro.coeffs,
                                self.hermitian and outro.hermitian)
        return self + FourierField.constante(self.grid, outro)

    __radd__ = __add__

    def __sub__(self, outro):
        return self + (-1.0) * outro

    def __rsub__(self, outro):
        return (-1.0) * self + outro

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, escalar):
        if isinstance(escalar, FourierField):
            return product(self, escalar)
        return FourierField(self.grid, self.coeffs * escalar,
                            self.hermitian and np.isreal(escalar))

    __rmul__ = __mul__

    def __truediv__(self, escalar: float):
        return self * (1.0 / escalar)

    def sup_coef(self) -> float:
        """Maior |f̂(k)|, usado como distância de grade"""
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def desvio_hermitiano(self) -> float:
        """max |f̂(−k) − conj f̂(k)|"""
        espelhado = self.coeffs[::-1, ::-1, ::-1]
        return float(np.max(np.abs(espelhado - np.conj(self.coeffs))))


# ============================================
# SÍMBOLO 𝒬
# ============================================

@dataclass(frozen=True)
class DispersionQ:
    """
    Símbolo radial 𝒬 e as quantidades por modo ⟨k⟩_ε

    Args:
        eval: função vetorizada z ↦ 𝒬(z)
        eps: ε ∈ [0, 1]; ε = 0 seleciona ⟨k⟩ = √(1+4π²|k|²)
        params: constantes nomeadas da família
        nome: nome da família
    """

    eval: Callable[[np.ndarray], np.ndarray]
    eps: float = 0.0
    params: Dict[str, object] = field(default_factory=dict, compare=False, hash=False)
    nome: str = "custom"

    def __post_init__(self):
        if not (0.0 <= self.eps <= 1.0):
            raise ErroParametro(f"ε deve estar em [0,1], recebido {self.eps}")

    # ---- famílias ------------------------------------------------------
    @classmethod
    def laplaciano(cls, eps: float = 0.0) -> "DispersionQ":
        return cls(lambda z: np.asarray(z, dtype=float) ** 2, eps, {}, "laplaciano")

    @classmethod
    def bilaplaciano(cls, nu: float = 1.0, eps: float = 0.0) -> "DispersionQ":
        """𝒬(z) = z² + νz⁴"""
        def q(z):
            z2 = np.asarray(z, dtype=float) ** 2
            return z2 + nu * z2 * z2
        return cls(q, eps, {"nu": nu}, "bilaplaciano")

    @classmethod
    def polinomial(cls, nus: Sequence[float], eps: float = 0.0) -> "DispersionQ":
        """𝒬(z) = Σ_j ν_j z^{2j}, com ν₁ = 1"""
        nus = [float(v) for v in nus]
        if not nus or abs(nus[0] - 1.0) > 1e-14:
            raise ErroParametro("família polinomial exige ν₁ = 1")

        def q(z):
            z2 = np.asarray(z, dtype=float) ** 2
            total = np.zeros_like(z2)
            for j in range(len(nus) - 1, -1, -1):
                total = (total + nus[j]) * z2
            return total
        return cls(q, eps, {"nus": nus}, "polinomial")

    @classmethod
    def negativo(cls, nu: float = 0.1, eps: float = 0.0) -> "DispersionQ":
        """𝒬(z) = z² − νz⁴ (viola positividade, só para validação)"""
        def q(z):
            z2 = np.asarray(z, dtype=float) ** 2
            return z2 - nu * z2 * z2
        return cls(q, eps, {"nu": nu}, "negativo")

    @classmethod
    def da_familia(cls, nome: str, params: Optional[dict] = None, eps: float = 0.0) -> "DispersionQ":
        params = dict(params or {})
        fabricas = {
            "laplaciano": cls.laplaciano,
            "bilaplaciano": cls.bilaplaciano,
            "polinomial": cls.polinomial,
            "negativo": cls.negativo,
        }
        if nome not in fabricas:
            raise ErroParametro(f"família de símbolo desconhecida: {nome}")
        return fabricas[nome](eps=eps, **params)

    def com_eps(self, eps: float) -> "DispersionQ":
        return replace(self, eps=float(eps))

    # ---- avaliação -----------------------------------------------------
    def avaliar(self, z) -> np.ndarray:
        valores = np.asarray(self.eval(np.asarray(z, dtype=float)), dtype=float)
        if not np.all(np.isfinite(valores)):
            raise ErroSimbolo(f"𝒬 não finito na família {self.nome}")
        return valores

    def bracket_sq(self, normas: np.ndarray) -> np.ndarray:
        """⟨k⟩_ε² a partir de |k|₂ (vetorizado)"""
        normas = np.asarray(normas, dtype=float)
        if self.eps == 0.0:
            return 1.0 + 4.0 * np.pi ** 2 * normas ** 2
        q = self.avaliar(2.0 * np.pi * self.eps * normas)
        if np.any(q < 0):
            raise ErroSimbolo(f"𝒬 negativo em |k|={float(normas[q < 0].flat[0]):g}")
        return 1.0 + q / self.eps ** 2

    def bracket_sq_rede(self, grid: FrequencyLattice) -> np.ndarray:
        return self.bracket_sq(grid.normas())


# ============================================
# VALIDAÇÃO DA HIPÓTESE SOBRE 𝒬
# ============================================

@dataclass
class ValidationReport:
    """Resultado da validação numérica dos itens (1)–(3)"""

    itens: Dict[int, bool]
    eta_hat: float
    c_hat: float
    mensagens: Dict[int, str]

    @property
    def passou(self) -> bool:
        return all(self.itens.values())

    @property
    def motivo(self) -> str:
        if self.passou:
            return "ok"
        if not self.itens.get(2, True):
            return "negative-symbol"
        if not self.itens.get(3, True):
            return "growth-violation"
        return "origin-normalization"


def validate_symbol(Q: DispersionQ, zmax: float = 1e3, nsamples: int = 400) -> ValidationReport:
    """
    Verifica numericamente os itens (1)–(3) da hipótese sobre 𝒬

    O item (4), sobre o crescimento das derivadas, não é verificado.

    Args:
        Q: símbolo
        zmax: maior z amostrado (> 1)
        nsamples: número de amostras log-espaçadas (>= 100)

    Returns:
        ValidationReport com aprovação por item e expoente η̂ ajustado
    """
    if zmax <= 1:
        raise ErroParametro("zmax deve ser > 1")
    if nsamples < 100:
        raise ErroParametro("nsamples deve ser >= 100")

    itens, mensagens = {}, {}

    # (1) 𝒬(0) = 0 e 𝒬''(0)/2 = 1
    q0 = float(Q.avaliar(np.array([0.0]))[0])
    h = 1e-3
    curvatura = float(Q.avaliar(np.array([h]))[0]) / h ** 2
    itens[1] = abs(q0) < 1e-12 and abs(curvatura - 1.0) < 1e-4
    mensagens[1] = f"Q(0)={q0:.3e}, Q''(0)/2≈{curvatura:.6f}"

    # (2) positividade
    z = np.logspace(-3, np.log10(zmax), nsamples)
    q = Q.avaliar(z)
    itens[2] = bool(np.all(q > 0))
    mensagens[2] = "positivo" if itens[2] else f"valor negativo em z={float(z[q <= 0][0]):.4g}"

    # (3) crescimento Q(z) > c z^{3+η}
    cauda = z >= 1.0
    zc, qc = z[cauda], q[cauda]
    positivos = qc > 0
    if np.count_nonzero(positivos) < 2:
        eta_hat, c_hat = -np.inf, 0.0
    else:
        inclinacao, _ = np.polyfit(np.log(zc[positivos]), np.log(qc[positivos]), 1)
        eta_hat = float(inclinacao - 3.0)
        c_hat = float(np.min(qc / zc ** (3.0 + max(eta_hat, 0.0))))
    itens[3] = bool(eta_hat > 1e-3 and c_hat > 0 and itens[2])
    mensagens[3] = f"η̂={eta_hat:.4f}, ĉ={c_hat:.4g}"

    relatorio = ValidationReport(itens, eta_hat, c_hat, mensagens)
    logger.debug("validação de %s: %s", Q.nome, mensagens)
    return relatorio


def bracket_eps(Q: DispersionQ, k: Sequence[int]) -> float:
    """⟨k⟩_ε = √(1 + ε⁻²𝒬(2πε|k|)), ou ⟨k⟩ se ε = 0"""
    norma = float(np.sqrt(sum(float(c) ** 2 for c in k)))
    return float(np.sqrt(Q.bracket_sq(np.array([norma]))[0]))


# ============================================
# TRANSFORMADAS
# ============================================

def _indices(grid: FrequencyLattice, M: int) -> np.ndarray:
    return grid.frequencias() % M


def forward(f: np.ndarray, grid: FrequencyLattice) -> FourierField:
    """
    Transformada direta com projeção em |k|_∞ ≤ K

    Args:
        f: array físico (M', M', M') com M' >= 2K+1
        grid: rede de destino

    Returns:
        FourierField (hermitiano se f for real)
    """
    f = np.asarray(f)
    if f.ndim != 3 or len(set(f.shape)) != 1:
        raise ErroGrade(f"esperado array cúbico, recebido {f.shape}")
    M = f.shape[0]
    if M < grid.n:
        raise ErroGrade(f"grade física M={M} menor que 2K+1={grid.n}")
    real = not np.iscomplexobj(f)
    espectro = sfft.fftn(f) / float(M) ** 3
    idx = _indices(grid, M)
    coeffs = espectro[np.ix_(idx, idx, idx)]
    return FourierField(grid, coeffs, real)


def inverse(F: FourierField, M: Optional[int] = None) -> np.ndarray:
    """
    Transformada inversa numa grade de M pontos (padrão: grid.M)

    Returns:
        array real se F for hermitiano, complexo caso contrário
    """
    M = F.grid.M if M is None else int(M)
    if M < F.grid.n:
        raise ErroGrade(f"grade física M={M} menor que 2K+1={F.grid.n}")
    espectro = np.zeros((M, M, M), dtype=np.complex128)
    idx = _indices(F.grid, M)
    espectro[np.ix_(idx, idx, idx)] = F.coeffs
    f = sfft.ifftn(espectro) * float(M) ** 3
    return f.real if F.hermitian else f


# ============================================
# SEMIGRUPO E QUADRATURA EXPONENCIAL
# ============================================

def propagador(Q: DispersionQ, grid: FrequencyLattice, t: float) -> np.ndarray:
    """Multiplicador e^{−t⟨k⟩_ε²}"""
    if t < 0:
        raise ErroTempo(f"tempo negativo: {t}")
    return np.exp(-t * Q.bracket_sq_rede(grid))


def peso_quadratura(Q: DispersionQ, grid: FrequencyLattice, dt: float) -> np.ndarray:
    """Multiplicador (1 − e^{−λdt})/λ, λ = ⟨k⟩_ε² (regra exponencial de um passo)"""
    if dt <= 0:
        raise ErroTempo(f"passo de tempo deve ser > 0: {dt}")
    lam = Q.bracket_sq_rede(grid)
    return -np.expm1(-lam * dt) / lam


def apply_semigroup(F: FourierField, Q: DispersionQ, t: float) -> FourierField:
    """e^{t(ℒ_ε−1)} F: cada modo multiplicado por e^{−t⟨k⟩_ε²}"""
    return FourierField(F.grid, F.coeffs * propagador(Q, F.grid, t), F.hermitian)


# ============================================
# PRODUTOS
# ============================================

def product(F: FourierField, G: FourierField, degree_hint: int = 2) -> FourierField:
    """
    Produto pontual com zero-padding sem aliasing e projeção em |k|_∞ ≤ K

    Args:
        F, G: campos na mesma rede
        degree_hint: grau total da não linearidade que contém o produto
    """
    F._checar(G)
    M = F.grid.m_alias_free(max(degree_hint, 2))
    f = inverse(F, M)
    g = inverse(G, M)
    resultado = forward(f * g, F.grid)
    resultado.hermitian = F.hermitian and G.hermitian
    return resultado


def pointwise(campos: Sequence[FourierField], func: Callable, grau: int) -> FourierField:
    """
    Aplica um polinômio de grau `grau` ponto a ponto e projeta de volta

    Args:
        campos: campos reais na mesma rede
        func: recebe os arrays físicos na ordem de `campos`
        grau: grau total do polinômio (define o padding)
    """
    grid = campos[0].grid
    for outro in campos[1:]:
        campos[0]._checar(outro)
    M = grid.m_alias_free(grau)
    fisicos = [inverse(c, M) for c in campos]
    valores = np.asarray(func(*fisicos))
    if valores.ndim == 0:
        valores = np.full((M, M, M), float(valores))
    return forward(valores, grid)


def reprojetar(F: FourierField, grid: FrequencyLattice) -> FourierField:
    """Trunca ou completa com zeros os coeficientes de F na rede `grid`"""
    destino = np.zeros(grid.shape, dtype=np.complex128)
    r = min(F.grid.K, grid.K)
    origem = slice(F.grid.K - r, F.grid.K + r + 1)
    alvo = slice(grid.K - r, grid.K + r + 1)
    destino[alvo, alvo, alvo] = F.coeffs[origem, origem, origem]
    return FourierField(grid, destino, F.hermitian)


# ============================================
# SNAPSHOT BINÁRIO
# ============================================

def to_bytes(F: FourierField) -> bytes:
    """Formato PHI4FLD1: magic, u32 K, u32 M, u8 hermitian, (re, im) f64 LE"""
    cabecalho = MAGIC_SNAPSHOT + struct.pack("<IIB", F.grid.K, F.grid.M, int(F.hermitian))
    return cabecalho + np.ascontiguousarray(F.coeffs, dtype="<c16").tobytes(order="C")


def from_bytes(dados: bytes) -> FourierField:
    """Inverso de to_bytes"""
    if dados[:8] != MAGIC_SNAPSHOT:
        raise ErroGrade("snapshot sem magic PHI4FLD1")
    K, M, herm = struct.unpack("<IIB", dados[8:17])
    grid = FrequencyLattice(K, M)
    esperado = 17 + 16 * grid.n ** 3
    if len(dados) != esperado:
        raise ErroGrade(f"snapshot com {len(dados)} bytes, esperado {esperado}")
    coeffs = np.frombuffer(dados[17:], dtype="<c16").reshape(grid.shape).astype(np.complex128)
    return FourierField(grid, coeffs, bool(herm))
