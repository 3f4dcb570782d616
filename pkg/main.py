"""
Simulador Φ⁴ perturbado
Aplicação de linha de comando que despacha os subcomandos de experimento
"""

import argparse
import logging
import sys
from typing import List, Optional

from config import Config
from database import store
from spde.erros import ErroConfig, Phi4Erro
from spde.experimentos import COMANDOS, ExperimentConfig
from utils.formatters import ler_lista_eps

logger = logging.getLogger(__name__)


class AplicacaoPhi4:
    """Classe principal da aplicação"""

    def __init__(self):
        self.parser = self._criar_parser()

    def _criar_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog=Config.APP_NAME,
            description="Constantes, momentos e soluções da equação Φ⁴ fracamente não linear em 𝐓³",
        )
        parser.add_argument("--version", action="version", version=f"%(prog)s {Config.APP_VERSION}")
        sub = parser.add_subparsers(dest="comando", required=True)
        for nome in COMANDOS:
            p = sub.add_parser(nome)
            p.add_argument("--config", help="arquivo JSON do experimento")
            p.add_argument("--out", help="diretório de saída (padrão PHI4_OUT_DIR)")
            p.add_argument("--seed", type=int, help="semente mestre de 64 bits")
            p.add_argument("--threads", type=int, help="trabalhadores (padrão PHI4_THREADS)")
            p.add_argument("--eps", help="lista de ε separada por vírgulas")
        return parser

    def _carregar(self, args) -> ExperimentConfig:
        """Lê o experimento e aplica as sobreposições da linha de comando"""
        base = ExperimentConfig.carregar(args.config, args.comando) if args.config else ExperimentConfig()
        dados = base.como_dict()

        if args.eps is not None:
            try:
                dados["eps"] = ler_lista_eps(args.eps)
            except ValueError:
                raise ErroConfig(f"--eps inválido: {args.eps}")
        if args.seed is not None:
            dados["seed"] = args.seed
        if args.out is not None:
            dados["saida"] = args.out
        elif not dados["saida"]:
            dados["saida"] = Config.OUT_DIR

        return ExperimentConfig.from_dict(dados, args.comando)

    def iniciar(self, argv: Optional[List[str]] = None) -> int:
        """
        Executa um subcomando

        Returns:
            0 em sucesso, 1 se a auditoria reprovar, 2 em erro
        """
        args = self.parser.parse_args(argv)

        logging.basicConfig(
            level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )

        valido, mensagem = Config.validar()
        if not valido:
            print(f"erro: usage: {mensagem}", file=sys.stderr)
            return 2

        threads = args.threads if args.threads is not None else Config.THREADS
        if threads < 1:
            print("erro: usage: --threads deve ser >= 1", file=sys.stderr)
            return 2

        try:
            cfg = self._carregar(args)
            store.configurar(cfg.saida)
            resultado = COMANDOS[args.comando](cfg, threads, store)
        except Phi4Erro as e:
            print(f"erro: {e}", file=sys.stderr)
            return 2

        if isinstance(resultado, tuple):
            caminho, passou = resultado
            print(caminho)
            return 0 if passou else 1

        print(resultado)
        return 0


def main():
    """Função principal"""
    app = AplicacaoPhi4()
    sys.exit(app.iniciar())


if __name__ == "__main__":
    main()
