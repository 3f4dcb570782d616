"""
Utilitários de validação
Funções para validar a configuração de experimentos
"""

import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from config import FAMILIAS_SIMBOLO

SUBCOMANDOS = ("constants", "moments", "solve", "converge", "validate")
MODOS_SOLVER = ("sequencial", "picard")


def validar_lista_eps(eps: Sequence[float], permitir_zero: bool = False) -> Tuple[bool, str]:
    """
    Valida a lista de valores de ε

    Args:
        eps: lista de ε
        permitir_zero: aceita ε = 0 (modelo limite)

    Returns:
        Tupla (válido: bool, mensagem: str)
    """
    if not eps:
        return False, "lista de ε vazia"

    for valor in eps:
        try:
            valor = float(valor)
        except (TypeError, ValueError):
            return False, f"ε não numérico: {valor!r}"
        if not math.isfinite(valor):
            return False, f"ε não finito: {valor}"
        if valor < 0 or (valor == 0 and not permitir_zero):
            return False, f"ε deve ser positivo: {valor}"
        if valor > 1:
            return False, f"ε deve ser <= 1: {valor}"

    return True, ""


def validar_semente(seed: Any) -> Tuple[bool, str]:
    """
    Valida uma semente mestre de 64 bits sem sinal

    Returns:
        Tupla (válido: bool, mensagem: str)
    """
    if isinstance(seed, bool) or not isinstance(seed, int):
        return False, f"semente deve ser inteira: {seed!r}"

    if not (0 <= seed < 2 ** 64):
        return False, f"semente fora de 64 bits: {seed}"

    return True, ""


def validar_simbolo(simbolo: Dict[str, Any]) -> Tuple[bool, str]:
    """
    Valida a especificação {"familia": ..., "params": {...}} de 𝒬

    Returns:
        Tupla (válido: bool, mensagem: str)
    """
    if not isinstance(simbolo, dict) or "familia" not in simbolo:
        return False, "símbolo precisa do campo 'familia'"

    familia = simbolo["familia"]
    if familia not in FAMILIAS_SIMBOLO:
        return False, f"família desconhecida: {familia} (conhecidas: {', '.join(FAMILIAS_SIMBOLO)})"

    params = simbolo.get("params", {})
    if not isinstance(params, dict):
        return False, "'params' deve ser um objeto"

    desconhecidos = set(params) - set(FAMILIAS_SIMBOLO[familia])
    if desconhecidos:
        return False, f"parâmetros desconhecidos para {familia}: {sorted(desconhecidos)}"

    return True, ""


def validar_potencial(coeffs: Sequence[float]) -> Tuple[bool, str]:
    """
    Valida os coeficientes (v₂, v₄, ..., v_{2n}) de V

    Returns:
        Tupla (válido: bool, mensagem: str)
    """
    if not isinstance(coeffs, (list, tuple)) or len(coeffs) < 2:
        return False, "potencial precisa de ao menos dois coeficientes (v₂, v₄)"

    if not all(isinstance(c, (int, float)) and math.isfinite(c) for c in coeffs):
        return False, "coeficientes do potencial devem ser números finitos"

    if all(c == 0 for c in coeffs[1:]):
        return False, "potencial sem termos de grau >= 4 dá λ = 0"

    return True, ""


def validar_regra_K(regra: Dict[str, Any]) -> Tuple[bool, str]:
    """
    Valida a regra de corte: {"tipo": "fator", "fator": c} (K = ⌈c/ε⌉)
    ou {"tipo": "fixo", "K": n}

    Returns:
        Tupla (válido: bool, mensagem: str)
    """
    tipo = regra.get("tipo") if isinstance(regra, dict) else None

    if tipo == "fator":
        fator = regra.get("fator")
        if not isinstance(fator, (int, float)) or fator <= 0:
            return False, "regra 'fator' precisa de fator > 0"
        return True, ""

    if tipo == "fixo":
        K = regra.get("K")
        if isinstance(K, bool) or not isinstance(K, int) or K < 0:
            return False, "regra 'fixo' precisa de K inteiro >= 0"
        return True, ""

    return False, f"regra de corte desconhecida: {tipo!r}"


def validar_amostras(M: Any) -> Tuple[bool, str]:
    """Número de réplicas Monte Carlo (>= 1)"""
    if isinstance(M, bool) or not isinstance(M, int) or M < 1:
        return False, f"número de amostras deve ser inteiro >= 1: {M!r}"
    return True, ""


def validar_solver(solver: Dict[str, Any]) -> Tuple[bool, str]:
    """
    Valida o bloco do integrador

    Returns:
        Tupla (válido: bool, mensagem: str)
    """
    dt = solver.get("dt")
    T = solver.get("T")
    if not isinstance(dt, (int, float)) or dt <= 0:
        return False, "solver.dt deve ser > 0"
    if not isinstance(T, (int, float)) or T <= 0:
        return False, "solver.T deve ser > 0"
    if T < dt:
        return False, "solver.T menor que solver.dt"

    if solver.get("modo", "sequencial") not in MODOS_SOLVER:
        return False, f"modo desconhecido: {solver.get('modo')}"

    passo = solver.get("passo_snapshot", 1)
    if isinstance(passo, bool) or not isinstance(passo, int) or passo < 1:
        return False, "solver.passo_snapshot deve ser inteiro >= 1"

    return True, ""


def validar_momentos(pedidos: List[Any]) -> Tuple[bool, str]:
    """Lista de pares [símbolo, [k1, k2, k3]]"""
    for pedido in pedidos:
        if not (isinstance(pedido, (list, tuple)) and len(pedido) == 2):
            return False, f"pedido de momento malformado: {pedido!r}"
        simbolo, k = pedido
        if not isinstance(simbolo, str):
            return False, f"símbolo deve ser texto: {simbolo!r}"
        if not (isinstance(k, (list, tuple)) and len(k) == 3 and all(isinstance(c, int) for c in k)):
            return False, f"modo deve ter três inteiros: {k!r}"
    return True, ""


def validar_experimento(dados: Dict[str, Any], comando: Optional[str] = None) -> Tuple[bool, str]:
    """
    Valida um experimento completo

    Args:
        dados: dicionário já decodificado do JSON
        comando: subcomando que vai consumi-lo

    Returns:
        Tupla (válido: bool, mensagem: str)
    """
    if comando is not None and comando not in SUBCOMANDOS:
        return False, f"subcomando desconhecido: {comando}"

    verificacoes = [
        validar_simbolo(dados.get("simbolo")),
        validar_potencial(dados.get("potencial")),
        validar_lista_eps(dados.get("eps", [])),
        validar_regra_K(dados.get("regra_K")),
        validar_semente(dados.get("seed")),
        validar_amostras(dados.get("amostras")),
        validar_solver(dados.get("solver", {})),
        validar_momentos(dados.get("momentos", [])),
    ]
    for valido, mensagem in verificacoes:
        if not valido:
            return False, mensagem

    return True, "Configuração válida"
