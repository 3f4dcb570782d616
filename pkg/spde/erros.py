"""
Exceções do pacote
Todas carregam um `motivo` legível por máquina, usado pela CLI
"""

from typing import Optional


class Phi4Erro(Exception):
    """Erro base do simulador"""

    motivo = "erro"

    def __init__(self, mensagem: str, motivo: Optional[str] = None):
        super().__init__(mensagem)
        self.mensagem = mensagem
        if motivo is not None:
            self.motivo = motivo

    def __str__(self) -> str:
        return f"{self.motivo}: {self.mensagem}"


class ErroSimbolo(Phi4Erro):
    """Avaliação do símbolo 𝒬 inválida (não finita ou negativa)"""

    motivo = "symbol-evaluation"


class ErroCrescimento(Phi4Erro):
    """O símbolo não cresce rápido o bastante: integral de σ² diverge"""

    motivo = "growth-violation"


class ErroGrade(Phi4Erro):
    """Grades ou formatos incompatíveis"""

    motivo = "grid-mismatch"


class ErroTempo(Phi4Erro):
    """Tempo negativo ou grade temporal inconsistente"""

    motivo = "time-grid"


class ErroParametro(Phi4Erro):
    """Parâmetro fora do domínio permitido"""

    motivo = "parameter"


class ErroInviavel(Phi4Erro):
    """Soma de rede grande demais para o caminho escolhido"""

    motivo = "infeasible"


class ErroExplosao(Phi4Erro):
    """Valores não finitos durante a integração temporal"""

    motivo = "blow-up"

    def __init__(self, mensagem: str, tempo: float, ultimo_estado=None):
        super().__init__(mensagem)
        self.tempo = tempo
        self.ultimo_estado = ultimo_estado


class ErroNaoContracao(Phi4Erro):
    """Iteração de Picard aumentou a distância em duas varreduras seguidas"""

    motivo = "picard-non-contraction"

    def __init__(self, mensagem: str, distancias: list):
        super().__init__(mensagem)
        self.distancias = distancias


class ErroChecksum(Phi4Erro):
    """Snapshot corrompido"""

    motivo = "checksum"


class ErroConfig(Phi4Erro):
    """Configuração de experimento inválida"""

    motivo = "usage"
