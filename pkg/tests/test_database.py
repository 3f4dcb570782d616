import pytest

from database import RunStore
from spde.erros import ErroChecksum
from spde.fourier_core import FourierField


@pytest.fixture
def repositorio(tmp_path):
    return RunStore(str(tmp_path))


def test_diretorio_da_execucao(repositorio, tmp_path):
    diretorio = repositorio.abrir_execucao("teste", "abc123")
    assert diretorio == tmp_path / "teste-abc123"
    assert diretorio.is_dir()
    assert repositorio.abrir_execucao("teste", "abc123") == diretorio


def test_snapshot_com_crc(repositorio, rede_pequena, campo_aleatorio):
    diretorio = repositorio.abrir_execucao("snap", "0")
    campo = campo_aleatorio(rede_pequena)
    caminho = repositorio.salvar_snapshot(diretorio, "w_000001", campo)
    assert caminho.name == "w_000001.bin"
    assert caminho.stat().st_size == 17 + 16 * 125 + 4
    lido = repositorio.ler_snapshot(caminho)
    assert (lido - campo).sup_coef() == 0.0


def test_snapshot_corrompido(repositorio, rede_pequena):
    diretorio = repositorio.abrir_execucao("snap", "1")
    caminho = repositorio.salvar_snapshot(diretorio, "v", FourierField.constante(rede_pequena, 1.0))
    dados = bytearray(caminho.read_bytes())
    dados[40] ^= 0xFF
    caminho.write_bytes(bytes(dados))
    with pytest.raises(ErroChecksum):
        repositorio.ler_snapshot(caminho)


def test_snapshot_truncado(repositorio, tmp_path):
    caminho = tmp_path / "curto.bin"
    caminho.write_bytes(b"\x00\x01")
    with pytest.raises(ErroChecksum):
        repositorio.ler_snapshot(caminho)


def test_manifesto(repositorio):
    diretorio = repositorio.abrir_execucao("man", "2")
    assert repositorio.ler_manifesto(diretorio) is None
    repositorio.salvar_manifesto(diretorio, {"seed": 3, "completo": True})
    assert repositorio.ler_manifesto(diretorio) == {"seed": 3, "completo": True}
    texto = (diretorio / "manifest.json").read_text(encoding="utf-8")
    assert texto.index('"completo"') < texto.index('"seed"')


def test_csv(repositorio):
    diretorio = repositorio.abrir_execucao("csv", "3")
    caminho = repositorio.escrever_csv(diretorio, "x.csv", ["a", "b", "c"],
                                       [(1, 0.5, None), ("s", 2.0, True)], "hash", 42)
    conteudo = caminho.read_bytes().decode("utf-8")
    assert conteudo == (
        "# schema=1\n"
        "# versao=1.0.0 config=hash seed=42\n"
        "a,b,c\n"
        "1,0.5,\n"
        "s,2.0,1\n"
    )
    colunas, linhas = repositorio.ler_csv(caminho)
    assert colunas == ["a", "b", "c"]
    assert linhas == [["1", "0.5", ""], ["s", "2.0", "1"]]
