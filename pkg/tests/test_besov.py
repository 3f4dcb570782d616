import numpy as np
import pytest

from spde.besov import (
    DuhamelAccumulator,
    DyadicPartition,
    besov_norm,
    block,
    bony_ratios,
    checar_grade_tempo,
    commutator_ratio,
    duhamel_para_commutator,
    heat_para_commutator,
    para_gt,
    para_lt,
    profile,
    resonance,
    smoothing_ratio,
)
from spde.erros import ErroParametro, ErroTempo
from spde.fourier_core import DispersionQ, FourierField, FrequencyLattice, product


class TestParticao:
    @pytest.mark.parametrize("K", [1, 4, 9])
    def test_particao_da_unidade(self, K):
        particao = DyadicPartition(K)
        r = np.linspace(0.0, np.sqrt(3.0) * K, 200)
        soma = sum(particao.peso(j, r) for j in particao.indices())
        np.testing.assert_allclose(soma, 1.0, atol=1e-12)

    def test_suporte_do_anel(self):
        r = np.array([0.5, 0.74, 2.7, 3.0])
        np.testing.assert_allclose(DyadicPartition.chi(r), 0.0, atol=1e-14)

    def test_bloco_negativo(self, rede_pequena, campo_aleatorio):
        with pytest.raises(ErroParametro):
            block(campo_aleatorio(rede_pequena), -2)

    def test_soma_dos_blocos(self, rede_pequena, campo_aleatorio):
        F = campo_aleatorio(rede_pequena)
        total = FourierField.zeros(rede_pequena)
        for j in DyadicPartition(rede_pequena.K).indices():
            total = total + block(F, j)
        np.testing.assert_allclose(total.coeffs, F.coeffs, atol=1e-12)


class TestNorma:
    def test_constante(self, rede_pequena):
        c = FourierField.constante(rede_pequena, 3.0)
        assert besov_norm(c, -0.05) == pytest.approx(3.0 * 2 ** 0.05)
        perfil = profile(c)
        assert perfil.blocos[0] == pytest.approx(3.0)
        assert np.all(perfil.blocos[1:] < 1e-12)


class TestParaprodutos:
    def test_decomposicao_de_bony(self, campo_aleatorio):
        grid = FrequencyLattice(4)
        f, g = campo_aleatorio(grid, 1), campo_aleatorio(grid, 2)
        soma = para_lt(f, g) + para_gt(f, g) + resonance(f, g)
        np.testing.assert_allclose(soma.coeffs, product(f, g).coeffs, atol=1e-10)

    def test_simetria(self, rede_pequena, campo_aleatorio):
        f, g = campo_aleatorio(rede_pequena, 1), campo_aleatorio(rede_pequena, 2)
        np.testing.assert_allclose(para_gt(f, g).coeffs, para_lt(g, f).coeffs)
        np.testing.assert_allclose(resonance(f, g).coeffs, resonance(g, f).coeffs, atol=1e-12)

    @pytest.mark.parametrize("semente", [1, 7, 42])
    def test_razoes_limitadas(self, campo_aleatorio, semente):
        grid = FrequencyLattice(16)
        f, g = campo_aleatorio(grid, semente), campo_aleatorio(grid, semente + 100)
        razoes = bony_ratios(f, g, 0.6, -0.4)
        assert set(razoes) == {"lt", "gt", "res"}
        assert all(np.isfinite(v) and 0 <= v <= 10.0 for v in razoes.values())


class TestComutadores:
    @pytest.mark.parametrize("semente", [3, 11])
    def test_comutador_limitado(self, campo_aleatorio, semente):
        grid = FrequencyLattice(16)
        f, g, h = (campo_aleatorio(grid, semente + i) for i in range(3))
        razao = commutator_ratio(f, g, h, 0.9, -0.5, -0.3)
        assert np.isfinite(razao)
        assert 0 <= razao <= 10.0

    @pytest.mark.parametrize("Q", [DispersionQ.laplaciano(0.0), DispersionQ.bilaplaciano(1.0).com_eps(0.1)],
                             ids=["laplaciano", "bilaplaciano_eps_0.1"])
    def test_suavizacao_limitada(self, campo_aleatorio, Q):
        grid = FrequencyLattice(16)
        tempos = [2.0 ** -j for j in range(14)]
        razao = smoothing_ratio(campo_aleatorio(grid, 5), Q, 0.0, 1.0, tempos)
        assert 0 < razao <= 10.0

    def test_calor_em_t_zero(self, rede_pequena, campo_aleatorio):
        f, g = campo_aleatorio(rede_pequena, 1), campo_aleatorio(rede_pequena, 2)
        C = heat_para_commutator(f, g, DispersionQ.laplaciano(), 0.0)
        assert C.sup_coef() < 1e-12

    def test_calor_tempo_negativo(self, rede_pequena, campo_aleatorio):
        f = campo_aleatorio(rede_pequena)
        with pytest.raises(ErroTempo):
            heat_para_commutator(f, f, DispersionQ.laplaciano(), -0.1)

    def test_duhamel_comutador_comeca_em_zero(self, rede_pequena, campo_aleatorio):
        f = [campo_aleatorio(rede_pequena, i) for i in range(3)]
        g = [campo_aleatorio(rede_pequena, 10 + i) for i in range(3)]
        resultado = duhamel_para_commutator(f, g, DispersionQ.laplaciano(), [0.0, 0.01, 0.02])
        assert len(resultado) == 3
        assert resultado[0].sup_coef() == 0.0

    def test_duhamel_comutador_tamanhos(self, rede_pequena, campo_aleatorio):
        f = [campo_aleatorio(rede_pequena)]
        with pytest.raises(ErroTempo):
            duhamel_para_commutator(f, f, DispersionQ.laplaciano(), [0.0, 0.01])


class TestDuhamel:
    def test_integrando_constante_exato(self, rede_pequena):
        dt = 0.05
        acc = DuhamelAccumulator(rede_pequena, DispersionQ.laplaciano(), dt)
        um = FourierField.constante(rede_pequena, 1.0)
        for _ in range(20):
            acc.avancar(um)
        # no modo zero ⟨0⟩² = 1: ∫₀^t e^{−(t−s)} ds = 1 − e^{−t}
        assert acc.valor[(0, 0, 0)].real == pytest.approx(1.0 - np.exp(-1.0), rel=1e-12)
        assert acc.valor.sup_coef() == pytest.approx(1.0 - np.exp(-1.0), rel=1e-12)

    def test_grade_nao_uniforme(self):
        with pytest.raises(ErroTempo):
            checar_grade_tempo([0.0, 0.1, 0.3])

    def test_grade_fora_da_origem(self):
        with pytest.raises(ErroTempo):
            checar_grade_tempo([0.1, 0.2])

    def test_passo(self):
        assert checar_grade_tempo(np.arange(5) * 0.01) == pytest.approx(0.01)
