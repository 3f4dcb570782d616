"""
Configuração do Simulador Φ⁴ perturbado
Gerencia variáveis de ambiente e constantes globais
"""

import os
from dotenv import load_dotenv

# Carregar variáveis de ambiente do arquivo .env (se existir)
load_dotenv()


class Config:
    """Classe de configuração do sistema"""

    # ============================================
    # EXECUÇÃO
    # ============================================
    # Pode ser sobrescrito por um arquivo .env na raiz do projeto:
    # PHI4_THREADS=4
    # PHI4_OUT_DIR=resultados
    # PHI4_LOG_LEVEL=DEBUG

    THREADS = int(os.getenv("PHI4_THREADS", "1") or "1")
    OUT_DIR = os.getenv("PHI4_OUT_DIR", "resultados")
    LOG_LEVEL = os.getenv("PHI4_LOG_LEVEL", "INFO")
    SEED = int(os.getenv("PHI4_SEED", "20240611") or "20240611")

    # ============================================
    # APLICAÇÃO
    # ============================================
    APP_NAME = "phi4-perturbado"
    APP_VERSION = "1.0.0"

    # ============================================
    # VALIDAÇÕES
    # ============================================
    @classmethod
    def validar(cls) -> tuple[bool, str]:
        """
        Valida os valores de execução

        Returns:
            tuple: (válido: bool, mensagem: str)
        """
        if cls.THREADS < 1:
            return False, "PHI4_THREADS deve ser >= 1"

        if not cls.OUT_DIR:
            return False, "PHI4_OUT_DIR não pode ser vazio"

        if cls.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            return False, f"Nível de log desconhecido: {cls.LOG_LEVEL}"

        if cls.SEED < 0 or cls.SEED >= 2**64:
            return False, "PHI4_SEED deve caber em 64 bits sem sinal"

        return True, "Configuração válida"

    @classmethod
    def configurar(cls, threads: int = None, out_dir: str = None,
                   log_level: str = None, seed: int = None, persistir: bool = False):
        """
        Sobrescreve valores em tempo de execução

        Args:
            threads: número de threads
            out_dir: diretório de saída
            log_level: nível de log
            seed: semente mestre
            persistir: grava os valores no arquivo .env
        """
        if threads is not None:
            cls.THREADS = int(threads)
        if out_dir is not None:
            cls.OUT_DIR = out_dir
        if log_level is not None:
            cls.LOG_LEVEL = log_level
        if seed is not None:
            cls.SEED = int(seed)

        if persistir:
            with open(".env", "w") as f:
                f.write(f"PHI4_THREADS={cls.THREADS}\n")
                f.write(f"PHI4_OUT_DIR={cls.OUT_DIR}\n")
                f.write(f"PHI4_LOG_LEVEL={cls.LOG_LEVEL}\n")
                f.write(f"PHI4_SEED={cls.SEED}\n")


# ============================================
# CONSTANTES DO SISTEMA
# ============================================

VERSAO = Config.APP_VERSION
SCHEMA_CSV = 1

# Famílias de símbolo 𝒬 conhecidas e seus parâmetros padrão
FAMILIAS_SIMBOLO = {
    "laplaciano": {},
    "bilaplaciano": {"nu": 1.0},
    "polinomial": {"nus": [1.0, 1.0]},
    "negativo": {"nu": 0.1},
}

# Componentes do ruído aumentado, na ordem canônica
COMPONENTES_UPSILON = ["0'", "1'", "2'", "3'0", "3'1'", "2'2'", "3'2'"]

# Regularidades de Besov de cada componente, em função de κ
REGULARIDADES = {
    "0'": lambda kappa: -kappa,
    "1'": lambda kappa: -0.5 - kappa,
    "2'": lambda kappa: -1.0 - kappa,
    "3'0": lambda kappa: 0.5 - kappa,
    "3'1'": lambda kappa: -kappa,
    "2'2'": lambda kappa: -kappa,
    "3'2'": lambda kappa: -0.5 - kappa,
}

KAPPA_PADRAO = 0.05
T_BURN = 10.0
NOS_GAUSS_HERMITE = 64
# Quadratura em log(s) das somas de rede: nós de Gauss–Legendre por painel
NOS_POR_PAINEL = 8
LARGURA_PAINEL = 2.5

# Limites de custo das somas de rede
LIMITE_ITERACOES_DIRETAS = 2_000_000
LIMITE_GRADE_FFT = 320

# Acoplamento padrão entre ε e o corte K
FATOR_CORTE = 4.0

# Regime logarítmico de C2: para 𝒬 = z² + νz⁴ a transição fica em |k| ≈ 1/(2π√ν ε)
NU_PADRAO = 0.01
R2_MINIMO_LOG = 0.99

# Parâmetros das verificações de `validate`
K_VALIDACAO = 16
EXPOENTES_BONY = (0.6, -0.4)
EXPOENTES_COMUTADOR = (0.9, -0.5, -0.3)
EXPOENTES_SUAVIZACAO = (0.0, 1.0)
EPS_SUAVIZACAO = (0.0, 0.1)
LIMITE_RAZAO = 10.0
