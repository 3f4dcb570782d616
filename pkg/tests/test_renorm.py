import logging
import math
from dataclasses import replace

import numpy as np
import pytest

from spde import renorm
from spde.erros import ErroCrescimento, ErroParametro, ErroSimbolo
from spde.fourier_core import DispersionQ, FrequencyLattice
from spde.renorm import (
    Potential,
    RenormSet,
    a_coeffs,
    ajuste_log,
    c1,
    c2,
    c3,
    c_total,
    chaos_weights,
    compute_renorm_set,
    corte_padrao,
    coupling_lambda,
    g_kernel_time_integral,
    kernel_lattice_sum,
    sigma2_eps,
    sigma2_limit,
    standard_constants,
)


class TestPotencial:
    def test_grau(self, sextico):
        assert sextico.n == 3
        assert sextico.grau == 6
        assert not sextico.quartico_puro

    def test_quartico_puro(self, quartico):
        assert quartico.quartico_puro
        assert quartico.eval(2.0) == pytest.approx(4.0)
        assert quartico.eval(2.0, ordem=4) == pytest.approx(6.0)

    def test_grau_minimo(self):
        with pytest.raises(ErroParametro):
            Potential((1.0,))


class TestSigma2:
    @pytest.mark.parametrize("nu", [0.25, 1.0, 4.0])
    def test_bilaplaciano(self, nu):
        assert sigma2_limit(DispersionQ.bilaplaciano(nu)) == pytest.approx(
            1.0 / (8.0 * math.pi * math.sqrt(nu)), rel=1e-6)

    def test_cauda_dentro_da_cota(self, bilaplaciano, caplog):
        with caplog.at_level(logging.WARNING, logger="spde.renorm"):
            sigma2_limit(bilaplaciano)
        assert "cota" not in caplog.text

    def test_cauda_acima_da_cota_avisa(self, bilaplaciano, caplog, monkeypatch):
        real = renorm.validate_symbol
        monkeypatch.setattr(renorm, "validate_symbol", lambda Q: replace(real(Q), c_hat=1e6))
        with caplog.at_level(logging.WARNING, logger="spde.renorm"):
            valor = sigma2_limit(bilaplaciano)
        assert "acima da cota" in caplog.text
        assert valor == pytest.approx(1.0 / (8.0 * math.pi), rel=1e-6)

    def test_laplaciano_diverge(self):
        with pytest.raises(ErroCrescimento):
            sigma2_limit(DispersionQ.laplaciano())

    def test_simbolo_negativo(self):
        with pytest.raises(ErroSimbolo):
            sigma2_limit(DispersionQ.negativo(0.1))

    def test_sigma2_eps_so_modo_zero(self):
        assert sigma2_eps(DispersionQ.laplaciano(), 0.3, 0) == pytest.approx(0.15)

    def test_sigma2_eps_converge(self, bilaplaciano):
        alvo = 1.0 / (8.0 * math.pi)
        grosso = sigma2_eps(bilaplaciano, 0.25, 16)
        fino = sigma2_eps(bilaplaciano, 0.125, 32)
        assert abs(fino - alvo) < abs(grosso - alvo)

    def test_erro_sigma2_eps_decresce(self, bilaplaciano):
        alvo = 1.0 / (8.0 * math.pi)
        erros = [abs(sigma2_eps(bilaplaciano, e, corte_padrao(e)) - alvo) for e in (0.2, 0.1, 0.05)]
        assert erros[0] > erros[1] > erros[2]

    def test_corte_padrao(self):
        assert corte_padrao(0.5) == 8
        assert corte_padrao(0.3) == 14
        with pytest.raises(ErroParametro):
            corte_padrao(0.0)


class TestAcoplamento:
    def test_lambda_quartico(self, quartico):
        assert coupling_lambda(quartico, 0.37) == pytest.approx(1.0)

    def test_lambda_sextico(self, sextico):
        assert coupling_lambda(sextico, 1.0 / (8.0 * math.pi)) == pytest.approx(5.0 / (4.0 * math.pi))

    def test_coeficientes_a(self, quartico, sextico):
        assert a_coeffs(quartico, 0.5, 1.0, 0.2) == pytest.approx([1.0])
        lam, s2e = 2.0, 0.1
        assert a_coeffs(sextico, 0.5, lam, s2e) == pytest.approx([10 * s2e / lam, 10 / (3 * lam)])

    def test_a_exige_lambda(self, quartico):
        with pytest.raises(ErroParametro):
            a_coeffs(quartico, 0.5, 0.0, 0.1)

    def test_c1_quartico(self, quartico):
        assert c1(quartico, 0.25, 1.0, 0.08) == pytest.approx(0.32)

    def test_pesos_de_caos(self):
        a = [1.0, 2.0]
        eps = 0.5
        assert chaos_weights(a, eps, "1'") == pytest.approx({1: 1.0, 3: 1.0})
        assert chaos_weights(a, eps, "2'") == pytest.approx({2: 1.0, 4: 0.5})
        assert chaos_weights(a, eps, "3'") == pytest.approx({3: 1.0, 5: 0.6 * 0.5})
        with pytest.raises(ErroParametro):
            chaos_weights(a, eps, "0'")


class TestSomasDeRede:
    def test_k_zero(self):
        Q = DispersionQ.laplaciano()
        assert kernel_lattice_sum(Q, 2, 0) == pytest.approx(1.0 / 6.0)
        assert kernel_lattice_sum(Q, 3, 0) == pytest.approx(3.0 / 16.0)
        assert g_kernel_time_integral(Q, 0.5, 1, 0) == pytest.approx(0.5)

    def test_discreto_tende_ao_continuo(self):
        Q = DispersionQ.laplaciano()
        assert kernel_lattice_sum(Q, 2, 0, dt=1e-4) == pytest.approx(1.0 / 6.0, rel=1e-3)

    @pytest.mark.parametrize("k", [(0, 0, 0), (1, 0, 0)])
    def test_fft_igual_direta(self, bilaplaciano, k):
        Q = bilaplaciano.com_eps(0.5)
        direta = kernel_lattice_sum(Q, 2, 1, k, metodo="direto")
        fft = kernel_lattice_sum(Q, 2, 1, k, metodo="fft")
        assert fft == pytest.approx(direta, rel=1e-3)

    def test_fft_so_continuo(self, bilaplaciano):
        with pytest.raises(ErroParametro):
            kernel_lattice_sum(bilaplaciano, 2, 1, dt=0.01, metodo="fft")

    def test_metodo_desconhecido(self, bilaplaciano):
        with pytest.raises(ErroParametro):
            kernel_lattice_sum(bilaplaciano, 2, 1, metodo="monte-carlo")


class TestConstantes:
    def test_c2_c3_sextico_k_zero(self, bilaplaciano, sextico):
        # a₁ = 1, a₂ = 10/3 com λ = 1 e σ_ε² = 0.1
        eps = 0.5
        assert c2(bilaplaciano, sextico, eps, 1.0, 0, s2e=0.1) == pytest.approx(0.375)
        assert c3(bilaplaciano, sextico, eps, 1.0, 0, s2e=0.1) == pytest.approx(0.3125)

    def test_c3_nulo_no_quartico(self, bilaplaciano, quartico):
        assert c3(bilaplaciano, quartico, 0.5, 1.0, 1, s2e=0.1) == 0.0

    def test_conjunto_quartico(self, constantes_quarticas):
        r = constantes_quarticas
        assert r.lam == pytest.approx(1.0)
        assert r.a_m == pytest.approx([1.0])
        assert r.C1 == pytest.approx(r.sigma2_eps / r.eps)
        assert r.C3 == 0.0
        assert r.C_total == pytest.approx(c_total(r.lam, r.C1, r.C2, r.C3))
        assert r.sigma2 == pytest.approx(1.0 / (8.0 * math.pi), rel=1e-8)
        assert r.dt == 0.01

    def test_quartico_com_sigma2_divergente(self, quartico):
        r = compute_renorm_set(DispersionQ.laplaciano(), quartico, 0.5, K=1)
        assert math.isinf(r.sigma2)
        assert r.lam == pytest.approx(1.0)

    def test_sextico_exige_sigma2(self, sextico):
        with pytest.raises(ErroCrescimento):
            compute_renorm_set(DispersionQ.laplaciano(), sextico, 0.5, K=1)

    def test_c_total_inconsistente(self):
        with pytest.raises(ErroParametro):
            RenormSet(sigma2=1.0, sigma2_eps=0.1, lam=1.0, a_m=[1.0], C1=1.0, C2=0.0, C3=0.0,
                      C_total=0.0, eps=0.5, K=1)


class TestModeloPadrao:
    def test_k_zero(self):
        assert standard_constants(0.5, K=0) == pytest.approx((0.5, 1.0 / 6.0))

    def test_c1_padrao(self):
        c1_std, _ = standard_constants(1.0)
        lam = DispersionQ.laplaciano().bracket_sq_rede(FrequencyLattice(1))
        assert c1_std == pytest.approx(float(np.sum(0.5 / lam)))

    def test_ajuste_log(self):
        eps = [0.5, 0.25, 0.125]
        valores = [2.0 * math.log(1.0 / e) + 1.0 for e in eps]
        ajuste = ajuste_log(eps, valores)
        assert ajuste["inclinacao"] == pytest.approx(2.0)
        assert ajuste["intercepto"] == pytest.approx(1.0)
        assert ajuste["r2"] == pytest.approx(1.0)
