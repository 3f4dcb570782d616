"""
Gerenciador de Execuções
Classe responsável por toda a persistência de resultados em disco
"""

import json
import logging
import struct
import zlib
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from config import Config
from spde.erros import ErroChecksum
from spde.fourier_core import FourierField, from_bytes, to_bytes
from utils.formatters import cabecalho_csv, formatar_linha_csv, json_canonico

logger = logging.getLogger(__name__)

MANIFESTO = "manifest.json"


class RunStore:
    """Gerenciador de diretórios de execução: snapshots, manifestos e CSV"""

    def __init__(self, raiz: Optional[str] = None):
        """
        Args:
            raiz: diretório base (padrão: Config.OUT_DIR, lido na hora do uso)
        """
        self._raiz = Path(raiz) if raiz is not None else None

    @property
    def raiz(self) -> Path:
        return self._raiz if self._raiz is not None else Path(Config.OUT_DIR)

    def configurar(self, raiz: str):
        """Troca o diretório base"""
        self._raiz = Path(raiz)

    def abrir_execucao(self, nome: str, config_hash: str) -> Path:
        """
        Cria (se preciso) o diretório da execução

        Returns:
            Path do diretório <raiz>/<nome>-<hash>
        """
        diretorio = self.raiz / f"{nome}-{config_hash}"
        diretorio.mkdir(parents=True, exist_ok=True)
        return diretorio

    # ============================================
    # SNAPSHOTS
    # ============================================

    def salvar_snapshot(self, diretorio: Path, rotulo: str, campo: FourierField) -> Path:
        """Grava um campo no formato PHI4FLD1 seguido do CRC32"""
        dados = to_bytes(campo)
        caminho = Path(diretorio) / f"{rotulo}.bin"
        with open(caminho, "wb") as f:
            f.write(dados)
            f.write(struct.pack("<I", zlib.crc32(dados) & 0xFFFFFFFF))
        return caminho

    def ler_snapshot(self, caminho: Path) -> FourierField:
        """
        Lê um snapshot verificando o CRC32

        Raises:
            ErroChecksum: arquivo truncado ou corrompido
        """
        conteudo = Path(caminho).read_bytes()
        if len(conteudo) < 4:
            raise ErroChecksum(f"snapshot truncado: {caminho}")
        dados, trailer = conteudo[:-4], conteudo[-4:]
        (esperado,) = struct.unpack("<I", trailer)
        if zlib.crc32(dados) & 0xFFFFFFFF != esperado:
            raise ErroChecksum(f"CRC32 não confere em {caminho}")
        return from_bytes(dados)

    # ============================================
    # MANIFESTO
    # ============================================

    def salvar_manifesto(self, diretorio: Path, manifesto: Dict[str, Any]) -> Path:
        caminho = Path(diretorio) / MANIFESTO
        caminho.write_text(json_canonico(manifesto), encoding="utf-8", newline="\n")
        return caminho

    def ler_manifesto(self, diretorio: Path) -> Optional[Dict[str, Any]]:
        """Manifesto existente ou None"""
        caminho = Path(diretorio) / MANIFESTO
        if not caminho.exists():
            return None
        return json.loads(caminho.read_text(encoding="utf-8"))

    # ============================================
    # CSV
    # ============================================

    def escrever_csv(self, diretorio: Path, nome: str, colunas: Sequence[str],
                     linhas: Sequence[Sequence[Any]], config_hash: str = "",
                     seed: Optional[int] = None) -> Path:
        """
        Grava um CSV com cabeçalho '# schema=1' e quebras de linha Unix

        Returns:
            Path do arquivo
        """
        texto = cabecalho_csv(colunas, config_hash, seed)
        texto.extend(formatar_linha_csv(linha) for linha in linhas)
        caminho = Path(diretorio) / nome
        with open(caminho, "w", encoding="utf-8", newline="\n") as f:
            f.write("\n".join(texto) + "\n")
        logger.info("CSV gravado: %s (%d linhas)", caminho, len(linhas))
        return caminho

    def ler_csv(self, caminho: Path) -> Tuple[List[str], List[List[str]]]:
        """
        Returns:
            (colunas, linhas como texto), ignorando comentários
        """
        linhas = [l for l in Path(caminho).read_text(encoding="utf-8").splitlines()
                  if l and not l.startswith("#")]
        if not linhas:
            return [], []
        return linhas[0].split(","), [l.split(",") for l in linhas[1:]]


# Instância global
store = RunStore()
