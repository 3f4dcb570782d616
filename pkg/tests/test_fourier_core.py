import numpy as np
import pytest

from spde.erros import ErroGrade, ErroParametro, ErroTempo
from spde.fourier_core import (
    DispersionQ,
    FourierField,
    FrequencyLattice,
    apply_semigroup,
    bracket_eps,
    forward,
    from_bytes,
    inverse,
    pointwise,
    product,
    reprojetar,
    to_bytes,
    validate_symbol,
)


class TestFrequencyLattice:
    def test_m_padrao(self):
        grid = FrequencyLattice(3)
        assert grid.M == 7
        assert grid.shape == (7, 7, 7)

    def test_m_pequeno_rejeitado(self):
        with pytest.raises(ErroGrade):
            FrequencyLattice(3, 5)

    def test_k_negativo(self):
        with pytest.raises(ErroGrade):
            FrequencyLattice(-1)

    def test_indice_fora_da_rede(self):
        with pytest.raises(ErroGrade):
            FrequencyLattice(2).indice((3, 0, 0))

    def test_m_alias_free(self):
        grid = FrequencyLattice(4)
        assert grid.m_alias_free(2) >= 13
        assert grid.m_alias_free(3) >= 17


class TestTransformadas:
    def test_inversa_de_direta(self, rede_pequena, campo_aleatorio):
        F = campo_aleatorio(rede_pequena)
        G = forward(inverse(F, 11), rede_pequena)
        np.testing.assert_allclose(G.coeffs, F.coeffs, atol=1e-12)

    def test_campo_real_hermitiano(self, rede_pequena, campo_aleatorio):
        F = campo_aleatorio(rede_pequena, 3)
        assert F.hermitian
        assert F.desvio_hermitiano() < 1e-12
        assert np.isrealobj(inverse(F))

    def test_convencao_de_normalizacao(self):
        grid = FrequencyLattice(1)
        F = forward(np.full((3, 3, 3), 2.5), grid)
        assert F[(0, 0, 0)] == pytest.approx(2.5)
        assert F.sup_coef() == pytest.approx(2.5)

    def test_grade_fisica_pequena(self):
        with pytest.raises(ErroGrade):
            forward(np.zeros((3, 3, 3)), FrequencyLattice(2))


class TestProduto:
    def test_produto_de_exponenciais(self):
        grid = FrequencyLattice(2)
        e1 = FourierField.modo(grid, (1, 0, 0))
        e2 = FourierField.modo(grid, (0, 1, -1))
        P = product(e1, e2)
        assert P[(1, 1, -1)] == pytest.approx(1.0)
        P.coeffs[grid.indice((1, 1, -1))] = 0.0
        assert P.sup_coef() < 1e-12

    def test_projecao_descarta_modos_altos(self):
        grid = FrequencyLattice(2)
        e = FourierField.modo(grid, (2, 0, 0))
        # e_4 fica fora da rede e não pode voltar como alias em e_{-1}
        assert product(e, e).sup_coef() < 1e-12

    def test_pointwise_quadrado_igual_ao_produto(self, rede_pequena, campo_aleatorio):
        F = campo_aleatorio(rede_pequena, 1)
        np.testing.assert_allclose(pointwise([F], lambda f: f * f, 2).coeffs,
                                   product(F, F).coeffs, atol=1e-12)

    def test_campo_vezes_campo_usa_produto(self, rede_pequena, campo_aleatorio):
        F = campo_aleatorio(rede_pequena, 1)
        G = campo_aleatorio(rede_pequena, 2)
        np.testing.assert_allclose((F * G).coeffs, product(F, G).coeffs, atol=1e-12)

    def test_soma_com_escalar_altera_o_modo_zero(self, rede_pequena):
        F = FourierField.zeros(rede_pequena) + 3.0
        assert F[(0, 0, 0)] == pytest.approx(3.0)

    def test_redes_diferentes(self):
        with pytest.raises(ErroGrade):
            FourierField.zeros(FrequencyLattice(1)) + FourierField.zeros(FrequencyLattice(2))


class TestSimbolo:
    def test_laplaciano_independe_de_eps(self):
        normas = np.array([0.0, 1.0, np.sqrt(3.0)])
        a = DispersionQ.laplaciano(0.0).bracket_sq(normas)
        b = DispersionQ.laplaciano(0.3).bracket_sq(normas)
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_bracket_bilaplaciano(self):
        Q = DispersionQ.bilaplaciano(nu=1.0, eps=0.5)
        z = 2 * np.pi * 0.5
        esperado = np.sqrt(1.0 + (z ** 2 + z ** 4) / 0.25)
        assert bracket_eps(Q, (1, 0, 0)) == pytest.approx(esperado)

    def test_eps_fora_do_intervalo(self):
        with pytest.raises(ErroParametro):
            DispersionQ.laplaciano(1.5)

    def test_polinomial_exige_nu1(self):
        with pytest.raises(ErroParametro):
            DispersionQ.polinomial([2.0, 1.0])

    def test_familia_desconhecida(self):
        with pytest.raises(ErroParametro):
            DispersionQ.da_familia("cubico")

    def test_validacao_bilaplaciano(self):
        relatorio = validate_symbol(DispersionQ.bilaplaciano(1.0))
        assert relatorio.passou
        assert relatorio.eta_hat > 0.5

    def test_validacao_laplaciano_cresce_devagar(self):
        relatorio = validate_symbol(DispersionQ.laplaciano())
        assert not relatorio.passou
        assert relatorio.motivo == "growth-violation"
        assert relatorio.eta_hat == pytest.approx(-1.0, abs=1e-6)

    def test_validacao_simbolo_negativo(self):
        relatorio = validate_symbol(DispersionQ.negativo(0.1))
        assert relatorio.itens[1]
        assert not relatorio.itens[2]
        assert relatorio.motivo == "negative-symbol"


class TestSemigrupo:
    def test_multiplicador_por_modo(self, rede_pequena, campo_aleatorio):
        F = campo_aleatorio(rede_pequena)
        t = 0.01
        G = apply_semigroup(F, DispersionQ.laplaciano(), t)
        fator = np.exp(-t * (1 + 4 * np.pi ** 2 * 2))
        assert G[(1, 1, 0)] == pytest.approx(F[(1, 1, 0)] * fator)

    def test_tempo_negativo(self, rede_pequena):
        with pytest.raises(ErroTempo):
            apply_semigroup(FourierField.zeros(rede_pequena), DispersionQ.laplaciano(), -1.0)


class TestReprojecao:
    def test_truncar_e_estender(self, campo_aleatorio):
        grande, pequena = FrequencyLattice(3), FrequencyLattice(1)
        F = campo_aleatorio(grande)
        G = reprojetar(F, pequena)
        assert G[(1, -1, 0)] == F[(1, -1, 0)]
        H = reprojetar(G, grande)
        assert H[(2, 0, 0)] == 0
        assert H[(0, 1, 1)] == F[(0, 1, 1)]


class TestSnapshot:
    def test_formato(self, rede_pequena, campo_aleatorio):
        F = campo_aleatorio(rede_pequena)
        dados = to_bytes(F)
        assert dados[:8] == b"PHI4FLD1"
        assert len(dados) == 17 + 16 * 5 ** 3
        G = from_bytes(dados)
        assert G.grid == F.grid and G.hermitian
        np.testing.assert_array_equal(G.coeffs, F.coeffs)

    def test_magic_invalido(self, rede_pequena):
        dados = b"XXXXXXXX" + to_bytes(FourierField.zeros(rede_pequena))[8:]
        with pytest.raises(ErroGrade):
            from_bytes(dados)

    def test_tamanho_invalido(self, rede_pequena):
        with pytest.raises(ErroGrade):
            from_bytes(to_bytes(FourierField.zeros(rede_pequena))[:-16])
