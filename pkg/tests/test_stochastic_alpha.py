import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as spi
from scipy import stats

from tailbias import (DiscreteAlphaMix, DomainError, GammaAlpha, InfiniteMomentError,
                      LognormalAlpha, MixedLaw, ParetoLaw, RandomStream, integrate,
                      jensen_gap, mixed_density, mixed_density_series, mixed_mean,
                      mixed_mean_gamma, mixed_mean_lognormal, mixed_moment_discrete,
                      mixed_shortfall, sample_mixed)
from tailbias.stochastic_alpha import (expect_alpha, gamma_bias, lognormal_closed_form_gap,
                                       reference_mean, sample_alpha)

HALF = DiscreteAlphaMix((0.5, 0.5), (1.5, 2.5))


def random_mix(rng, p):
    k = rng.integers(2, 6)
    a = rng.uniform(p + 0.1, 6.0, size=k)
    w = rng.dirichlet(np.ones(k))
    return DiscreteAlphaMix(w / w.sum(), a)


# discrete mixtures

def test_discrete_examples():
    assert mixed_moment_discrete(HALF, 1.0, 1) == pytest.approx(7 / 3, rel=1e-15)
    assert mixed_moment_discrete(DiscreteAlphaMix.degenerate(2.0), 1.0, 1) == 2.0
    assert mixed_moment_discrete(HALF, 1.0, 1) - ParetoLaw(1.0, 2.0).mean > 0
    assert jensen_gap(HALF, 1.0, 1) == pytest.approx(1 / 3, rel=1e-14)
    assert jensen_gap(DiscreteAlphaMix.degenerate(3.3), 2.0, 2) == 0.0


def test_jensen_gap_equals_plain_difference():
    rng = np.random.default_rng(5)
    for _ in range(200):
        p = int(rng.integers(1, 3))
        mix = random_mix(rng, p)
        plain = mixed_moment_discrete(mix, 1.7, p) - ParetoLaw(1.7, mix.mean).moment(p)
        assert jensen_gap(mix, 1.7, p) == pytest.approx(plain, rel=1e-9, abs=1e-12)


def test_jensen_gap_sweep():
    rng = np.random.default_rng(20240)
    for _ in range(1000):
        p = int(rng.integers(1, 3))
        mix = random_mix(rng, p)
        gap = jensen_gap(mix, float(rng.uniform(0.5, 3)), p)
        assert gap >= -1e-12
        if mix.variance > 1e-8:
            assert gap > 0


@settings(max_examples=50)
@given(a=st.floats(2.1, 6.0), d=st.floats(0.0, 0.9), w=st.floats(0.05, 0.95))
def test_jensen_gap_two_atoms_nonnegative(a, d, w):
    # two atoms placed around a with weights w, 1-w and mean a
    lo = a - d
    hi = a + d * w / (1 - w)
    mix = DiscreteAlphaMix((w, 1 - w), (lo, hi))
    assert jensen_gap(mix, 1.0, 2 if lo > 2.1 else 1) >= -1e-12


@pytest.mark.parametrize("weights, alphas", [
    ((0.5, 0.6), (2, 3)), ((1.5, -0.5), (2, 3)), ((), ()), ((1.0,), (-1.0,)), ((0.5, 0.5), (2,)),
])
def test_discrete_validation(weights, alphas):
    with pytest.raises(DomainError):
        DiscreteAlphaMix(weights, alphas)


def test_discrete_infinite_moment():
    mix = DiscreteAlphaMix((0.5, 0.5), (0.9, 3.1))
    with pytest.raises(InfiniteMomentError):
        mixed_moment_discrete(mix, 1.0, 1)
    with pytest.raises(InfiniteMomentError):
        jensen_gap(mix, 1.0, 1)
    # a zero-weight atom below p does not count
    ok = DiscreteAlphaMix((0.0, 1.0), (0.5, 3.0))
    assert mixed_moment_discrete(ok, 1.0, 1) == pytest.approx(1.5)


# lognormal exponent

def test_lognormal_zero_variance_limit():
    mix = LognormalAlpha(2.0, 1e-9)
    assert mixed_mean_lognormal(mix, 1.0, "closed_form") == pytest.approx(2.0, rel=1e-12)
    assert mixed_mean_lognormal(mix, 1.0, "quadrature") == pytest.approx(2.0, rel=1e-9)


def test_lognormal_example():
    mix = LognormalAlpha(2.0, 0.5)
    target = 1 + math.exp(0.25)
    assert target == pytest.approx(2.284025, abs=1e-6)
    assert mixed_mean_lognormal(mix, 1.0, "quadrature") == pytest.approx(target, rel=1e-12)


@pytest.mark.parametrize("alpha0", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("sigma", [0.1, 0.3, 0.5])
def test_lognormal_closed_form_vs_quadrature(alpha0, sigma):
    cf, q, diff = lognormal_closed_form_gap(LognormalAlpha(alpha0, sigma), 1.0)
    assert abs(diff) / cf <= 1e-8


@pytest.mark.parametrize("alpha0, sigma", [(2.0, 0.5), (1.5, 0.3)])
def test_lognormal_quadrature_vs_scipy(alpha0, sigma):
    mix = LognormalAlpha(alpha0, sigma)
    dist = stats.lognorm(sigma, scale=math.exp(mix.log_mean))
    ref = spi.quad(lambda e: (1 + e) / e * dist.pdf(e), 0, np.inf, epsrel=1e-13, limit=200)[0]
    assert mixed_mean_lognormal(mix, 1.0, "quadrature") == pytest.approx(ref, rel=1e-9)


def test_lognormal_shift_above_one_reports_gap():
    mix = LognormalAlpha(3.0, 0.3, b=1.5)
    cf, q, diff = lognormal_closed_form_gap(mix, 1.0)
    dist = stats.lognorm(0.3, scale=math.exp(mix.log_mean))
    ref = spi.quad(lambda d: (1.5 + d) / (0.5 + d) * dist.pdf(d), 0, np.inf, epsrel=1e-13)[0]
    assert q == pytest.approx(ref, rel=1e-9)
    assert diff == pytest.approx(cf - q)
    assert abs(diff) > 0.1


@pytest.mark.parametrize("kw", [dict(alpha0=2, sigma=0.3, b=0.5), dict(alpha0=1, sigma=0.3),
                                dict(alpha0=2, sigma=0.0)])
def test_lognormal_validation(kw):
    with pytest.raises(DomainError):
        LognormalAlpha(**kw)


# gamma exponent

@pytest.mark.parametrize("alpha0", [2.0, 3.0, 5.0])
@pytest.mark.parametrize("frac", [0.05, 0.3, 0.6, 0.9])
def test_gamma_closed_form_vs_quadrature(alpha0, frac):
    mix = GammaAlpha(alpha0, frac * (alpha0 - 1))
    cf = mixed_mean_gamma(mix, 1.0, "closed_form")
    q = mixed_mean_gamma(mix, 1.0, "quadrature")
    assert abs(cf - q) / cf <= 1e-8
    assert gamma_bias(mix, 1.0) == pytest.approx(q - ParetoLaw(1.0, alpha0).mean, abs=1e-10)


def test_gamma_examples():
    assert mixed_mean_gamma(GammaAlpha(3.0, 1e-8), 1.0) == pytest.approx(1.5, rel=1e-12)
    mix = GammaAlpha(3.0, 1.0)
    assert mixed_mean_gamma(mix, 1.0, "quadrature") == pytest.approx(5 / 3, rel=1e-12)
    assert gamma_bias(mix, 1.0) == pytest.approx(1 / 6, rel=1e-14)
    assert mixed_mean_gamma(mix, 2.0, "quadrature") == pytest.approx(10 / 3, rel=1e-12)


def test_gamma_quadrature_vs_scipy():
    mix = GammaAlpha(3.0, 1.2)
    dist = stats.gamma(mix.shape, scale=mix.gamma_scale)
    ref = spi.quad(lambda e: (1 + e) / e * dist.pdf(e), 0, np.inf, epsrel=1e-13, limit=200)[0]
    assert mixed_mean_gamma(mix, 1.0, "quadrature") == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("s", [2.0, 2.5])
def test_gamma_infinite_mean(s):
    with pytest.raises(InfiniteMomentError):
        mixed_mean_gamma(GammaAlpha(3.0, s), 1.0)


def test_gamma_pdf_matches_scipy():
    mix = GammaAlpha(2.5, 0.7)
    a = np.linspace(1.01, 6, 40)
    ref = stats.gamma(mix.shape, loc=1.0, scale=mix.gamma_scale).pdf(a)
    assert np.allclose(mix.pdf(a), ref, rtol=1e-11)


# shared properties

MIXTURES = [
    HALF,
    DiscreteAlphaMix((0.2, 0.3, 0.5), (1.2, 2.0, 4.0)),
    LognormalAlpha(2.0, 0.5),
    LognormalAlpha(1.5, 0.3),
    LognormalAlpha(3.0, 0.4, b=1.5),
    GammaAlpha(3.0, 1.0),
    GammaAlpha(1.8, 0.5),
]


@pytest.mark.parametrize("mix", MIXTURES, ids=repr)
def test_mean_preservation(mix):
    if isinstance(mix, DiscreteAlphaMix):
        return
    total = expect_alpha(mix, lambda a, e: np.ones_like(a))
    mean = expect_alpha(mix, lambda a, e: a)
    assert total == pytest.approx(1.0, abs=1e-10)
    assert mean == pytest.approx(mix.mean, abs=1e-10)
    var = expect_alpha(mix, lambda a, e: (a - mix.mean) ** 2)
    assert var == pytest.approx(mix.variance, rel=1e-8)


@pytest.mark.parametrize("mix", MIXTURES, ids=repr)
@pytest.mark.parametrize("scale", [1.0, 2.5])
def test_bias_positive(mix, scale):
    law = MixedLaw(scale, mix)
    assert mixed_mean(law) - reference_mean(law) > 0


def test_mixed_law_validation():
    with pytest.raises(DomainError):
        MixedLaw(0.0, HALF)
    with pytest.raises(DomainError):
        MixedLaw(1.0, "not a law")


# sampling

def test_sample_degenerate_matches_pareto():
    law = MixedLaw(1.0, DiscreteAlphaMix.degenerate(1.0))
    n = 100_000
    x = sample_mixed(law, RandomStream(3), n)
    frac = np.mean(x > 2.0)
    assert abs(frac - 0.5) <= 3 * math.sqrt(0.25 / n)


def test_sample_determinism_and_layout():
    law = MixedLaw(2.0, LognormalAlpha(2.0, 0.5))
    a = sample_mixed(law, RandomStream(8, 1), 1000)
    assert np.array_equal(a, sample_mixed(law, RandomStream(8, 1), 1000))
    assert a.min() >= 2.0
    s = RandomStream(8, 1)
    alpha = sample_alpha(law.mixture, s, 1000)
    u = s.uniform(1000)
    assert np.array_equal(a, 2.0 * (1 - u) ** (-1 / alpha))


def _scipy_alpha_law(mix):
    if isinstance(mix, LognormalAlpha):
        return stats.lognorm(mix.sigma, loc=mix.b, scale=math.exp(mix.log_mean))
    return stats.gamma(mix.shape, loc=1.0, scale=mix.gamma_scale)


@pytest.mark.parametrize("mix", MIXTURES[2:], ids=repr)
def test_sample_alpha_distribution(mix):
    a = sample_alpha(mix, RandomStream(77), 50_000)
    assert stats.kstest(a, _scipy_alpha_law(mix).cdf).pvalue > 1e-3
    assert a.mean() == pytest.approx(mix.mean, abs=5 * math.sqrt(mix.variance / a.size))


def test_sample_alpha_discrete_frequencies():
    mix = DiscreteAlphaMix((0.2, 0.3, 0.5), (1.2, 2.0, 4.0))
    a = sample_alpha(mix, RandomStream(4), 100_000)
    counts = [np.sum(a == v) for v in mix.alphas]
    assert stats.chisquare(counts, np.array(mix.weights) * a.size).pvalue > 1e-3


def test_sample_lognormal_mean_monte_carlo():
    law = MixedLaw(1.0, LognormalAlpha(2.0, 0.5))
    x = sample_mixed(law, RandomStream(42), 10_000_000)
    se = x.std(ddof=1) / math.sqrt(x.size)
    assert abs(x.mean() - 2.284025) <= 3 * se


# density

def test_density_degenerate_equals_pareto():
    law = MixedLaw(1.5, DiscreteAlphaMix.degenerate(2.2))
    y = np.array([1.5, 2.0, 10.0])
    assert np.allclose(mixed_density(law, y), ParetoLaw(1.5, 2.2).density(y), rtol=1e-13)


def test_density_normalizes_and_mean():
    law = MixedLaw(1.0, LognormalAlpha(2.0, 0.5))
    f = lambda y: mixed_density(law, y)
    assert integrate(f, 1.0, np.inf, rel_tol=1e-9).value == pytest.approx(1.0, abs=1e-6)
    m = integrate(lambda y: y * f(y), 1.0, np.inf, rel_tol=1e-9).value
    assert m == pytest.approx(mixed_mean(law), abs=1e-5)


def test_density_gamma_vs_scipy():
    mix = GammaAlpha(2.5, 0.6)
    law = MixedLaw(1.0, mix)
    dist = stats.gamma(mix.shape, loc=1.0, scale=mix.gamma_scale)
    y = 3.0
    ref = spi.quad(lambda a: a * y ** (-a - 1) * dist.pdf(a), 1.0, np.inf, epsrel=1e-12)[0]
    assert mixed_density(law, y) == pytest.approx(ref, rel=1e-9)


def test_density_series_error_decreases():
    law = MixedLaw(1.0, LognormalAlpha(1.5, 0.2))
    exact = mixed_density(law, 2.0)
    errs = [abs(mixed_density_series(1.5, 0.2, 1.0, 2.0, k) - exact) for k in range(1, 13)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-9 * exact


def test_density_series_limits():
    y = np.array([1.0, 2.0, 5.0, 30.0])
    vals = [mixed_density_series(1.5, 0.0, 1.0, yi, 40) for yi in y]
    assert np.allclose(vals, ParetoLaw(1.0, 1.5).density(y), rtol=1e-12)
    # alpha0 -> 1 with k = 1: the leading 1/y**2 shape
    r = [mixed_density_series(1.0 + 1e-9, 0.3, 1.0, yi, 1) * yi**2 for yi in y]
    assert np.allclose(r, 1.0, atol=1e-7)


def test_density_domain():
    with pytest.raises(DomainError):
        mixed_density(MixedLaw(2.0, HALF), 1.0)
    with pytest.raises(DomainError):
        mixed_density_series(1.5, 0.2, 1.0, 2.0, -1)


# shortfall

def test_shortfall_degenerate():
    law = MixedLaw(1.0, DiscreteAlphaMix.degenerate(2.0))
    assert mixed_shortfall(law, 10.0) == pytest.approx(20.0, abs=1e-6)


def test_shortfall_exceeds_reference():
    law = MixedLaw(1.0, HALF)
    assert mixed_shortfall(law, 100.0) >= 200.0


def test_shortfall_ratio_converges_for_discrete_mix():
    law = MixedLaw(1.0, HALF)
    ks = [1e2, 1e3, 1e4, 1e5]
    r = [mixed_shortfall(law, K) / K for K in ks]
    assert all(b > a for a, b in zip(r, r[1:]))
    # the ratio tends to the value of the heaviest atom, 1.5/0.5
    assert abs(r[-1] - 3.0) < abs(r[0] - 3.0)
    assert r[-1] == pytest.approx(3.0, rel=1e-3)


def test_shortfall_discrete_against_direct_sum():
    law = MixedLaw(2.0, DiscreteAlphaMix((0.3, 0.7), (1.4, 3.0)))
    K = 17.0
    w, a = np.array(law.mixture.weights), np.array(law.mixture.alphas)
    tail = w * (2.0 / K) ** a
    ref = K * np.sum(tail * a / (a - 1)) / tail.sum()
    assert mixed_shortfall(law, K) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("mix", [LognormalAlpha(2.0, 0.5), GammaAlpha(3.0, 1.0)], ids=repr)
def test_shortfall_continuous_against_scipy(mix):
    law = MixedLaw(1.0, mix)
    K = 50.0
    num = spi.quad(lambda a: a / (a - 1) * K ** -a * mix.pdf(np.array([a]))[0],
                   mix.lower_bound, np.inf, epsrel=1e-12, limit=400, points=None)[0]
    den = spi.quad(lambda a: K ** -a * mix.pdf(np.array([a]))[0],
                   mix.lower_bound, np.inf, epsrel=1e-12, limit=400)[0]
    val = mixed_shortfall(law, K)
    assert val == pytest.approx(K * num / den, rel=1e-7)
    assert val >= ParetoLaw(1.0, mix.mean).mean_excess(K)


def test_shortfall_errors():
    with pytest.raises(InfiniteMomentError):
        mixed_shortfall(MixedLaw(1.0, DiscreteAlphaMix((0.5, 0.5), (0.8, 3.0))), 10.0)
    with pytest.raises(InfiniteMomentError):
        mixed_shortfall(MixedLaw(1.0, GammaAlpha(2.0, 1.5)), 10.0)
    with pytest.raises(DomainError):
        mixed_shortfall(MixedLaw(3.0, HALF), 2.0)
