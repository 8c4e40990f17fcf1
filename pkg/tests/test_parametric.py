import math
import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subdep import (
    BernoulliPairModel,
    CopulaFamily,
    GridDomain,
    ParameterWarning,
    ParetoGeometricMixture,
    StructureError,
    bernoulli_mu_closed,
    bernoulli_pearson,
    bernoulli_subcopula,
    clayton_curve,
    d_measure,
    discretize,
    kendall_clayton,
    lambda_inf_numeric,
    mu_copula_numeric,
    mu_measure,
    schweizer_wolff_numeric,
    spearman_numeric,
    validate,
)


@st.composite
def bernoulli_models(draw):
    den = draw(st.integers(2, 200))
    t1 = F(draw(st.integers(1, den - 1)), den)
    t2 = F(draw(st.integers(1, den - 1)), den)
    lo, hi = max(t1 + t2 - 1, F(0)), min(t1, t2)
    k = draw(st.integers(0, 1000))
    return BernoulliPairModel(t1, t2, lo + (hi - lo) * F(k, 1000))


# --- Bernoulli pair ------------------------------------------------------------


def test_bernoulli_interior_values():
    assert bernoulli_subcopula(BernoulliPairModel(F(1, 2), F(1, 2), F(1, 4))).value(1, 1) == F(1, 4)
    s = bernoulli_subcopula(BernoulliPairModel(F(3, 10), F(6, 10), F(3, 10)))
    assert s.value(1, 1) == F(4, 10)
    assert s.d1.fractions() == [0, F(7, 10), 1]


def test_bernoulli_countermonotone_corner():
    t1 = F(1, 3)
    s = bernoulli_subcopula(BernoulliPairModel(t1, 1 - t1, 0))
    assert s.value(1, 1) == 0
    assert mu_measure(s).mu == -1


def test_bernoulli_rejects_alpha_outside_bounds():
    with pytest.raises(ValueError):
        BernoulliPairModel(F(1, 2), F(1, 2), F(3, 5))
    with pytest.raises(ValueError):
        BernoulliPairModel(F(1, 5), F(1, 5), F(-1, 10))
    with pytest.raises(ValueError):
        BernoulliPairModel(0, F(1, 2), 0)


def test_bernoulli_float_model_is_floating():
    m = BernoulliPairModel(0.3, 0.6, 0.25)
    s = bernoulli_subcopula(m)
    assert not s.exact_mode and validate(s) == []
    assert float(mu_measure(s).mu) == pytest.approx(bernoulli_mu_closed(m), abs=1e-14)


def test_table_regimes():
    t1, t2 = F(3, 10), F(6, 10)
    assert bernoulli_mu_closed(BernoulliPairModel(t1, t2, t1 * t2)) == 0
    up = BernoulliPairModel(t1, t2, min(t1, t2))
    assert bernoulli_mu_closed(up) == 1 and bernoulli_pearson(up) < 1
    down = BernoulliPairModel(t1, t2, max(t1 + t2 - 1, F(0)))
    assert bernoulli_mu_closed(down) == -1 and bernoulli_pearson(down) > -1


def test_pearson_values():
    assert bernoulli_pearson(BernoulliPairModel(F(2, 5), F(2, 5), F(2, 5))) == pytest.approx(1.0)
    assert bernoulli_pearson(BernoulliPairModel(F(1, 5), F(7, 10), F(7, 50))) == 0.0
    # (0.2 - 0.14) / sqrt(0.2 * 0.8 * 0.7 * 0.3)
    assert bernoulli_pearson(BernoulliPairModel(F(1, 5), F(7, 10), F(1, 5))) == pytest.approx(0.3273268353539885, rel=1e-14)


@given(bernoulli_models())
def test_closed_form_matches_generic(m):
    rep = mu_measure(bernoulli_subcopula(m))
    assert rep.mu == bernoulli_mu_closed(m)
    assert rep.d_s == m.alpha - m.theta1 * m.theta2


@given(bernoulli_models())
def test_mu_dominates_pearson(m):
    mu = bernoulli_mu_closed(m)
    r = bernoulli_pearson(m)
    assert np.sign(float(mu)) == np.sign(r)
    assert abs(float(mu)) >= abs(r) - 1e-12


# --- copula families -------------------------------------------------------------


@pytest.mark.parametrize("c", [
    CopulaFamily.W(), CopulaFamily.Pi(), CopulaFamily.M(),
    CopulaFamily.clayton(-1), CopulaFamily.clayton(-0.4), CopulaFamily.clayton(0.7),
    CopulaFamily.clayton(15), CopulaFamily.clayton(1e6), CopulaFamily.mix_m_pi(0.3),
])
def test_copula_boundary_conditions(c):
    t = np.linspace(0, 1, 101)
    assert np.allclose(c(t, 0 * t), 0, atol=1e-15)
    assert np.allclose(c(0 * t, t), 0, atol=1e-15)
    assert np.allclose(c(t, 0 * t + 1), t, atol=1e-15)
    assert np.allclose(c(0 * t + 1, t), t, atol=1e-15)


def test_clayton_matches_formula():
    u = np.array([0.2, 0.5, 0.9])
    v = np.array([0.7, 0.3, 0.95])
    for theta in (-0.5, 0.5, 3.0):
        ref = np.maximum(u ** -theta + v ** -theta - 1, 0) ** (-1 / theta)
        assert np.allclose(CopulaFamily.clayton(theta)(u, v), ref, rtol=1e-13)


def test_clayton_zero_is_pi_with_flag():
    c = CopulaFamily.clayton(0)
    assert c.kind == "Clayton" and c.flags
    assert c(0.3, 0.4) == pytest.approx(0.12)


def test_clayton_rejects_out_of_range():
    with pytest.raises(ValueError):
        CopulaFamily.clayton(-1.5)
    with pytest.raises(ValueError):
        CopulaFamily.clayton(math.inf)


def test_kendall_clayton():
    assert kendall_clayton(2) == 0.5
    assert kendall_clayton(F(2)) == F(1, 2)
    assert kendall_clayton(-1) == -1
    assert kendall_clayton(1e6) == pytest.approx(1 - 2e-6, abs=1e-11)
    with pytest.warns(ParameterWarning):
        assert kendall_clayton(0) == 0
    with pytest.raises(ValueError):
        kendall_clayton(-2)


# --- discretisation ----------------------------------------------------------------


def test_discretized_mixture_recovers_alpha():
    for alpha in (0.0, 0.5, 1.0):
        s = ParetoGeometricMixture(alpha, 0.5).subcopula()
        assert float(mu_measure(s).mu) == pytest.approx(alpha, abs=1e-3)


def test_geometric_levels():
    m = ParetoGeometricMixture(0.5, 0.8)
    lv = m.v_levels()
    assert lv[0] == 0 and lv[-1] == 1 and np.all(np.diff(lv) > 0)
    assert lv[1] == pytest.approx(0.8)
    assert m.truncation_error < 1e-15


def test_discretize_pi_and_w():
    d = GridDomain(np.linspace(0, 1, 41))
    assert mu_measure(discretize(CopulaFamily.Pi(), d, d)).mu == 0
    assert float(mu_measure(discretize(CopulaFamily.clayton(-1), d, d)).mu) == pytest.approx(-1, abs=1e-3)


def test_discretize_rejects_bad_evaluator():
    bad = CopulaFamily("bad", None, (), lambda u, v: u + v)
    d = GridDomain([0, 0.5, 1])
    with pytest.raises(StructureError):
        discretize(bad, d, d)


def test_discretized_clayton_ordered_by_theta():
    d1 = GridDomain(np.linspace(0, 1, 26))
    d2 = GridDomain([0, 0.1, 0.35, 0.5, 0.8, 1])
    prev = None
    for theta in (-1, -0.6, -0.2, 0.3, 1, 4, 12):
        s = discretize(CopulaFamily.clayton(theta), d1, d2)
        rep = mu_measure(s)
        if prev is not None:
            assert np.all(prev[0].values <= s.values + 1e-15)
            assert prev[1].d_s <= rep.d_s + 1e-15 and prev[1].mu <= rep.mu + 1e-12
        prev = (s, rep)


def test_mixture_d_is_alpha_times_d_of_m():
    d1 = GridDomain(np.linspace(0, 1, 11))
    d2 = GridDomain([0, 0.2, 0.36, 1])
    from subdep import restrict
    dm = d_measure(restrict("M", d1, d2)).d_s
    for alpha in (0.25, 0.75):
        assert d_measure(discretize(CopulaFamily.mix_m_pi(alpha), d1, d2)).d_s == pytest.approx(alpha * dm, abs=1e-15)


# --- numeric functionals --------------------------------------------------------------


def test_mu_numeric_endpoints():
    assert mu_copula_numeric(CopulaFamily.Pi(), resolution=17).mu == 0
    assert mu_copula_numeric(CopulaFamily.Pi()).mu == 0
    assert mu_copula_numeric(CopulaFamily.clayton(1e6)).mu == pytest.approx(1, abs=1e-3)
    assert mu_copula_numeric(CopulaFamily.M()).mu == 1
    assert mu_copula_numeric(CopulaFamily.W()).mu == -1


@pytest.mark.parametrize("alpha", [0, 0.25, 0.5, 0.75, 1])
def test_mu_numeric_mixture(alpha):
    assert mu_copula_numeric(CopulaFamily.mix_m_pi(alpha)).mu == pytest.approx(alpha, abs=1e-8)


def test_refinement_never_worse_than_grid():
    c = CopulaFamily.clayton(2.7)
    coarse = mu_copula_numeric(c, resolution=7)
    t = np.linspace(0, 1, 8)
    uu, vv = np.meshgrid(t, t, indexing="ij")
    assert coarse.sup_pos >= np.max(c(uu, vv) - uu * vv)
    assert coarse.precise


def test_resolution_consistency():
    for theta in (-0.7, 0.8, 6.0):
        c = CopulaFamily.clayton(theta)
        for g in (64, 128, 256):
            assert abs(mu_copula_numeric(c, g).mu - mu_copula_numeric(c, 2 * g).mu) < 4 / g


def test_spearman_and_sigma():
    pi = CopulaFamily.Pi()
    assert spearman_numeric(pi) == 0 and schweizer_wolff_numeric(pi) == 0 and lambda_inf_numeric(pi) == 0
    assert spearman_numeric(CopulaFamily.M(), 2048) == pytest.approx(1, abs=1e-3)
    assert spearman_numeric(CopulaFamily.W(), 2048) == pytest.approx(-1, abs=1e-3)
    c = CopulaFamily.clayton(-0.5)
    assert schweizer_wolff_numeric(c) == pytest.approx(abs(spearman_numeric(c)), abs=1e-9)


def test_spearman_mixture_closed_form():
    # rho(aM + (1-a)Pi) = a rho(M) = a
    assert spearman_numeric(CopulaFamily.mix_m_pi(0.4), 2048) == pytest.approx(0.4, abs=1e-5)


def test_quadrature_needs_even_resolution():
    with pytest.raises(ValueError):
        spearman_numeric(CopulaFamily.Pi(), 5)


def test_clayton_curve_rows():
    rows = clayton_curve([-1, 1e-9, 2.0])
    assert rows[0].mu == pytest.approx(-1, abs=1e-3)
    assert rows[0].tau == -1 and rows[0].rho == pytest.approx(-1, abs=1e-3)
    assert all(abs(v) < 1e-6 for v in (rows[1].mu, rows[1].tau, rows[1].rho))
    assert rows[2].tau == 0.5
    assert rows[0].mu < rows[1].mu < rows[2].mu


def test_clayton_curve_zero_flagged():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rows = clayton_curve([0.0], resolution=64, quad_resolution=64)
    assert rows[0].mu == 0 and rows[0].flags


def test_curve_stable_under_doubled_resolution():
    thetas = [-0.8, -0.3, 0.5, 3, 20]
    a = clayton_curve(thetas, resolution=128, quad_resolution=256)
    b = clayton_curve(thetas, resolution=256, quad_resolution=512)
    for r, s in zip(a, b):
        assert abs(r.mu - s.mu) < 4 / 128
        assert abs(r.rho - s.rho) < 1e-3
        assert np.sign(r.mu) == np.sign(r.tau) == np.sign(r.rho)
    assert all(x.mu <= y.mu for x, y in zip(a, a[1:]))
