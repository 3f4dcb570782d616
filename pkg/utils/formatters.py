"""
Utilitários de formatação
Funções para formatar números, linhas CSV e identificadores de execução
"""

import hashlib
import json
from typing import Any, Iterable, List, Optional, Sequence

from config import SCHEMA_CSV, VERSAO


def formatar_numero(valor: Any) -> str:
    """
    Formata um valor para CSV

    Floats usam repr (ida e volta exata); None vira campo vazio.

    Args:
        valor: número, texto, booleano ou None

    Returns:
        Texto do campo
    """
    if valor is None:
        return ""

    if isinstance(valor, bool):
        return "1" if valor else "0"

    if isinstance(valor, (int, str)):
        return str(valor)

    return repr(float(valor))


def formatar_modo(k: Sequence[int]) -> str:
    """Modo de Fourier como 'k1 k2 k3'"""
    return " ".join(str(int(c)) for c in k)


def formatar_linha_csv(valores: Iterable[Any]) -> str:
    """Linha separada por vírgulas, sem aspas"""
    return ",".join(formatar_numero(v) for v in valores)


def cabecalho_csv(colunas: Sequence[str], config_hash: str = "", seed: Optional[int] = None) -> List[str]:
    """
    Linhas de cabeçalho: versão do esquema, proveniência e nomes das colunas

    Returns:
        Lista de linhas sem quebra de linha
    """
    linhas = [f"# schema={SCHEMA_CSV}"]
    linhas.append(f"# versao={VERSAO} config={config_hash} seed={'' if seed is None else seed}")
    linhas.append(",".join(colunas))
    return linhas


def json_canonico(dados: Any) -> str:
    """JSON com chaves ordenadas e indentação fixa"""
    return json.dumps(dados, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def hash_config(dados: Any) -> str:
    """SHA-256 do JSON canônico (16 primeiros dígitos hexadecimais)"""
    compacto = json.dumps(dados, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(compacto.encode("utf-8")).hexdigest()[:16]


def ler_lista_eps(texto: str) -> List[float]:
    """
    Converte '0.2,0.1, 0.05' em lista de floats

    Returns:
        Lista (vazia se o texto for vazio)
    """
    if not texto or not texto.strip():
        return []

    return [float(parte) for parte in texto.split(",") if parte.strip()]


def formatar_duracao(segundos: float) -> str:
    """Duração legível para o log"""
    if segundos < 60:
        return f"{segundos:.1f}s"

    minutos, resto = divmod(int(segundos), 60)
    if minutos < 60:
        return f"{minutos}min {resto:02d}s"

    horas, minutos = divmod(minutos, 60)
    return f"{horas}h {minutos:02d}min"
