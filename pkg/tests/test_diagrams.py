import math

import numpy as np
import pytest

from config import COMPONENTES_UPSILON
from spde.diagrams import (
    ContextoMC,
    EnhancedNoise,
    _jackknife,
    build_limit_upsilon,
    build_upsilon,
    coupled_difference_oracle,
    mc_moment,
    mc_moments,
    regularity_diagnostic,
    second_moment_oracle,
    trajetoria_livre,
    x_norm,
)
from spde.erros import ErroGrade, ErroParametro, ErroTempo
from spde.fourier_core import DispersionQ, FourierField, FrequencyLattice, pointwise
from spde.renorm import compute_renorm_set

T_GRID = np.array([0.0, 0.01, 0.02])
T_BURN_CURTO = 0.05


@pytest.fixture
def upsilon_quartico(semente, rede_pequena, bilaplaciano, quartico, constantes_quarticas):
    return build_upsilon(semente, rede_pequena, bilaplaciano, quartico, 0.5, T_GRID,
                         constantes_quarticas, t_burn=T_BURN_CURTO)


class TestEnhancedNoise:
    def test_zeros(self, rede_pequena):
        U = EnhancedNoise.zeros(rede_pequena, T_GRID)
        assert set(U.componentes) == set(COMPONENTES_UPSILON)
        assert U.dt == pytest.approx(0.01)
        assert U.indice(0.02) == 2

    def test_componente_ausente(self, rede_pequena):
        with pytest.raises(ErroParametro):
            EnhancedNoise.zeros(rede_pequena, T_GRID).componente("4'", 0)

    def test_instante_fora_da_grade(self, rede_pequena):
        with pytest.raises(ErroTempo):
            EnhancedNoise.zeros(rede_pequena, T_GRID).indice(0.015)


class TestBuildUpsilon:
    def test_identidades_do_quartico(self, upsilon_quartico, constantes_quarticas):
        U = upsilon_quartico
        for i in range(len(T_GRID)):
            zero = U.componente("0'", i)
            assert zero[(0, 0, 0)].real == pytest.approx(1.0)
            assert (zero - 1.0).sup_coef() < 1e-12
            X = U.componente("1", i)
            np.testing.assert_allclose(U.componente("1'", i).coeffs, X.coeffs, atol=1e-12)
            C1 = constantes_quarticas.C1
            esperado = pointwise([X], lambda x: x * x - C1, 2)
            np.testing.assert_allclose(U.componente("2'", i).coeffs, esperado.coeffs, atol=1e-10)

    def test_determinismo(self, upsilon_quartico, semente, rede_pequena, bilaplaciano, quartico,
                          constantes_quarticas):
        outro = build_upsilon(semente, rede_pequena, bilaplaciano, quartico, 0.5, T_GRID,
                              constantes_quarticas, t_burn=T_BURN_CURTO)
        for tag in COMPONENTES_UPSILON:
            for a, b in zip(upsilon_quartico.componentes[tag], outro.componentes[tag]):
                np.testing.assert_array_equal(a.coeffs, b.coeffs)

    def test_campos_reais(self, upsilon_quartico):
        for tag in COMPONENTES_UPSILON:
            assert upsilon_quartico.componente(tag, 1).desvio_hermitiano() < 1e-10

    def test_3_0_nasce_do_aquecimento(self, upsilon_quartico):
        assert upsilon_quartico.componente("3'0", 0).sup_coef() > 0

    def test_caminho_livre_compartilhado(self, upsilon_quartico, semente, rede_pequena, bilaplaciano):
        livre = trajetoria_livre(semente, rede_pequena, bilaplaciano.com_eps(0.5), T_GRID,
                                 t_burn=T_BURN_CURTO)
        for i, X in enumerate(livre):
            np.testing.assert_array_equal(X.coeffs, upsilon_quartico.componente("1", i).coeffs)

    def test_constantes_de_outra_rede(self, semente, bilaplaciano, quartico, constantes_quarticas):
        with pytest.raises(ErroGrade):
            build_upsilon(semente, FrequencyLattice(3), bilaplaciano, quartico, 0.5, T_GRID,
                          constantes_quarticas, t_burn=T_BURN_CURTO)

    def test_constantes_de_outro_dt(self, semente, rede_pequena, bilaplaciano, quartico,
                                    constantes_quarticas):
        with pytest.raises(ErroTempo):
            build_upsilon(semente, rede_pequena, bilaplaciano, quartico, 0.5, [0.0, 0.02],
                          constantes_quarticas, t_burn=T_BURN_CURTO)


class TestModeloLimite:
    def test_corte_nitido_e_caminho_base(self, semente):
        grid = FrequencyLattice(3)
        U = build_limit_upsilon(semente, grid, 0.5, T_GRID, constantes=(0.4, 0.1),
                                t_burn=T_BURN_CURTO)
        assert U.proveniencia["K_corte"] == 2
        livre = trajetoria_livre(semente, grid, DispersionQ.laplaciano(0.0), T_GRID,
                                 t_burn=T_BURN_CURTO)
        for i in range(len(T_GRID)):
            um = U.componente("1'", i)
            assert um[(3, 0, 0)] == 0
            assert um[(1, -2, 0)] == livre[i][(1, -2, 0)]
            assert U.componente("2'", i)[(0, 3, 0)] == 0
            assert U.componente("0'", i)[(0, 0, 0)] == 1.0


class TestOraculos:
    def test_campo_livre(self, bilaplaciano):
        assert second_moment_oracle("1", (0, 0, 0), (0.0, 0.0), bilaplaciano, 0.5, 2) == pytest.approx(0.5)
        Q = bilaplaciano.com_eps(0.5)
        lam = float(Q.bracket_sq(np.array([1.0]))[0])
        valor = second_moment_oracle("1", (1, 0, 0), (0.0, 0.1), bilaplaciano, 0.5, 2)
        assert valor == pytest.approx(math.exp(-0.1 * lam) / (2 * lam))

    def test_fora_da_rede(self, bilaplaciano):
        assert second_moment_oracle("1", (3, 0, 0), (0.0, 0.0), bilaplaciano, 0.5, 2) == 0.0

    def test_incremento(self):
        Q = DispersionQ.laplaciano()
        valor = second_moment_oracle("1", (0, 0, 0), (0.0, 0.2), Q, 0.0, 1, tipo="incremento")
        assert valor == pytest.approx(1.0 - math.exp(-0.2))

    def test_primeira_potencia_de_wick(self, bilaplaciano):
        a = second_moment_oracle("1", (1, 1, 0), (0.0, 0.05), bilaplaciano, 0.5, 2)
        b = second_moment_oracle("1^1", (1, 1, 0), (0.0, 0.05), bilaplaciano, 0.5, 2)
        assert b == pytest.approx(a)

    def test_quadrado_de_wick_k_zero(self):
        assert second_moment_oracle("1^2", (0, 0, 0), (0.0, 0.0), DispersionQ.laplaciano(), 0.0, 0) \
            == pytest.approx(0.5)

    def test_objetos_do_quartico(self, bilaplaciano, constantes_quarticas):
        r = constantes_quarticas
        k = (1, 0, 0)
        um = second_moment_oracle("1", k, (0.0, 0.0), bilaplaciano, 0.5, 2)
        assert second_moment_oracle("1'", k, (0.0, 0.0), bilaplaciano, 0.5, 2, renorm=r) \
            == pytest.approx(um)
        dois = second_moment_oracle("1^2", k, (0.0, 0.0), bilaplaciano, 0.5, 2)
        assert second_moment_oracle("2'", k, (0.0, 0.0), bilaplaciano, 0.5, 2, renorm=r) \
            == pytest.approx(dois)

    def test_duhamel_k_zero(self, constantes_triviais):
        Q = DispersionQ.laplaciano()
        r = constantes_triviais(0.5, 0)
        # ⟨3'⟩ = ◇3 com peso 1: E|Ĩ(◇3)|² = (3!/2³)·1/(1·4)
        assert second_moment_oracle("3'0", (0, 0, 0), (0.0, 0.0), Q, 0.5, 0, renorm=r) \
            == pytest.approx(3.0 / 16.0)
        discreto = second_moment_oracle("3'0", (0, 0, 0), (0.0, 0.0), Q, 0.5, 0, renorm=r, dt=1e-3)
        assert discreto == pytest.approx(3.0 / 16.0, rel=1e-2)

    def test_3_0_exige_mesmo_instante(self, bilaplaciano, constantes_quarticas):
        with pytest.raises(ErroParametro):
            second_moment_oracle("3'0", (0, 0, 0), (0.0, 0.1), bilaplaciano, 0.5, 2,
                                 renorm=constantes_quarticas)

    def test_exige_constantes(self, bilaplaciano):
        with pytest.raises(ErroParametro):
            second_moment_oracle("2'", (0, 0, 0), (0.0, 0.0), bilaplaciano, 0.5, 2)

    def test_diferenca_acoplada(self, bilaplaciano):
        assert coupled_difference_oracle(bilaplaciano, 0.0, (1, 0, 0)) == pytest.approx(0.0, abs=1e-15)
        assert coupled_difference_oracle(bilaplaciano, 0.5, (1, 0, 0)) > 0


class TestMonteCarlo:
    def test_jackknife(self):
        assert _jackknife(np.array([1.0, 2.0, 3.0, 4.0])) == pytest.approx(math.sqrt(5.0 / 3.0) / 2.0)
        assert _jackknife(np.array([1.0])) is None

    def test_uma_replica(self, semente, rede_pequena, bilaplaciano):
        ctx = ContextoMC(rede_pequena, bilaplaciano, 0.5, T_GRID)
        rel = mc_moment("1", (1, 0, 0), 0.0, 1, semente, ctx)
        assert rel.erro_padrao is None
        assert rel.z_indefinido

    def test_instante_fora_da_grade(self, semente, rede_pequena, bilaplaciano):
        ctx = ContextoMC(rede_pequena, bilaplaciano, 0.5, T_GRID)
        with pytest.raises(ErroTempo):
            mc_moment("1", (1, 0, 0), 0.5, 2, semente, ctx)

    def test_campo_livre_contra_oraculo(self, semente, bilaplaciano):
        ctx = ContextoMC(FrequencyLattice(1), bilaplaciano, 0.5, T_GRID)
        relatorios = mc_moments([("1", (0, 0, 0)), ("1", (1, 0, 0))], 0.0, 400, semente, ctx)
        for rel in relatorios:
            assert abs(rel.z) < 5.0

    def test_media_centrada(self, semente, bilaplaciano):
        ctx = ContextoMC(FrequencyLattice(1), bilaplaciano, 0.5, T_GRID)
        rel = mc_moment("1^2", (0, 0, 0), 0.0, 400, semente, ctx, estatistica="media")
        assert rel.oraculo == 0.0
        assert abs(rel.z) < 5.0

    @pytest.mark.slow
    def test_objetos_do_quartico_contra_oraculo(self, semente, bilaplaciano, quartico):
        grid = FrequencyLattice(1)
        r = compute_renorm_set(bilaplaciano, quartico, 0.5, K=1, dt=0.01)
        ctx = ContextoMC(grid, bilaplaciano, 0.5, T_GRID, quartico, r, T_BURN_CURTO)
        relatorios = mc_moments([("1'", (1, 0, 0)), ("2'", (1, 0, 0))], 0.0, 300, semente, ctx)
        for rel in relatorios:
            assert abs(rel.z) < 5.0


class TestDiagnosticos:
    def test_regularidade_plana(self):
        K = 4
        eixo = np.arange(-K, K + 1)
        k1, k2, k3 = np.meshgrid(eixo, eixo, eixo, indexing="ij")
        bracket = np.sqrt(1 + 4 * np.pi ** 2 * (k1 ** 2 + k2 ** 2 + k3 ** 2))
        alpha = -0.5
        rel = regularity_diagnostic(bracket ** -(3 + 2 * alpha), alpha)
        assert rel.plano
        assert rel.sup == pytest.approx(1.0)
        assert rel.crescimento == pytest.approx(1.0)

    def test_regularidade_crescente(self):
        rel = regularity_diagnostic(np.ones((9, 9, 9)), 0.0)
        assert not rel.plano
        assert rel.crescimento > 4.0

    def test_x_norm_nula(self, rede_pequena):
        assert x_norm(EnhancedNoise.zeros(rede_pequena, T_GRID), 0.02) == 0.0

    def test_x_norm_constante(self, rede_pequena):
        U = EnhancedNoise.zeros(rede_pequena, T_GRID)
        U.componentes["0'"] = [FourierField.constante(rede_pequena, 2.0) for _ in T_GRID]
        assert x_norm(U, 0.02, kappa=0.05) == pytest.approx(2.0 * 2 ** 0.05)

    def test_x_norm_alem_da_grade(self, rede_pequena):
        with pytest.raises(ErroTempo):
            x_norm(EnhancedNoise.zeros(rede_pequena, T_GRID), 1.0)
