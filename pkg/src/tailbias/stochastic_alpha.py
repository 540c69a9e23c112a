"""
Pareto variables whose tail exponent is itself random.

Three mean-preserving laws for alpha are provided:

* `DiscreteAlphaMix` - finitely many exponents with probability weights;
* `LognormalAlpha`  - alpha - b is lognormal, E[alpha] = alpha0, alpha > b >= 1;
* `GammaAlpha`      - alpha - 1 is gamma with mean alpha0 - 1 and sd s.

A `MixedLaw` pairs one of them with a Pareto scale.  Expectations over the
alpha law are computed by quadrature in a standardized variable (a standard
normal for the lognormal case, a centred log-variable for the gamma case), so
the integrands are smooth bell shapes whatever the parameters.
"""
from dataclasses import dataclass
import math
from typing import Sequence, Union

import numpy as np
from scipy import special

from .errors import DomainError, InfiniteMomentError, NumericalError
from .numerics import integrate, log_gamma
from .powerlaw import ParetoLaw, _check_p

__all__ = [
    "DiscreteAlphaMix",
    "LognormalAlpha",
    "GammaAlpha",
    "MixedLaw",
    "expect_alpha",
    "mixed_moment_discrete",
    "jensen_gap",
    "mixed_mean_lognormal",
    "mixed_mean_gamma",
    "lognormal_closed_form_gap",
    "mixed_mean",
    "reference_mean",
    "sample_alpha",
    "sample_mixed",
    "mixed_density",
    "mixed_density_series",
    "mixed_shortfall",
]

_REL_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteAlphaMix:
    weights: Sequence[float]
    alphas: Sequence[float]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        a = np.asarray(self.alphas, dtype=float)
        if w.ndim != 1 or w.shape != a.shape or w.size == 0:
            raise DomainError("weights and alphas must be equal-length, non-empty 1-d sequences")
        if np.any(w < 0) or np.any(w > 1):
            raise DomainError("weights must lie in [0, 1]")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1, got {w.sum()!r}")
        if not np.all(a > 0):
            raise DomainError("alphas must be positive")
        object.__setattr__(self, "weights", tuple(float(v) for v in w))
        object.__setattr__(self, "alphas", tuple(float(v) for v in a))

    @classmethod
    def degenerate(cls, alpha):
        return cls((1.0,), (alpha,))

    @property
    def mean(self):
        return float(np.dot(self.weights, self.alphas))

    @property
    def variance(self):
        a = np.asarray(self.alphas)
        return float(np.dot(self.weights, (a - self.mean) ** 2))

    @property
    def lower_bound(self):
        return min(a for a, w in zip(self.alphas, self.weights) if w > 0)


@dataclass(frozen=True)
class LognormalAlpha:
    alpha0: float
    sigma: float
    b: float = 1.0

    def __post_init__(self):
        if not self.b >= 1:
            raise DomainError(f"b must be >= 1 for a finite mean, got {self.b!r}")
        if not self.alpha0 > self.b:
            raise DomainError(f"alpha0 must exceed b (alpha0={self.alpha0}, b={self.b})")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")

    @property
    def log_mean(self):
        """Mean of log(alpha - b); chosen so that E[alpha] = alpha0."""
        return math.log(self.alpha0 - self.b) - 0.5 * self.sigma**2

    @property
    def mean(self):
        return self.alpha0

    @property
    def variance(self):
        return (self.alpha0 - self.b) ** 2 * math.expm1(self.sigma**2)

    @property
    def lower_bound(self):
        return self.b

    def from_normal(self, z):
        return self.b + np.exp(self.log_mean + self.sigma * np.asarray(z, dtype=float))

    def pdf(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        out = np.zeros_like(alpha)
        pos = alpha > self.b
        d = alpha[pos] - self.b
        z = (np.log(d) - self.log_mean) / self.sigma
        out[pos] = np.exp(-0.5 * z * z) / (math.sqrt(2 * math.pi) * self.sigma * d)
        return out


@dataclass(frozen=True)
class GammaAlpha:
    alpha0: float
    s: float

    def __post_init__(self):
        if not self.alpha0 > 1:
            raise DomainError(f"alpha0 must exceed 1, got {self.alpha0!r}")
        if not self.s > 0:
            raise DomainError(f"s must be positive, got {self.s!r}")

    @property
    def shape(self):
        return (self.alpha0 - 1.0) ** 2 / self.s**2

    @property
    def gamma_scale(self):
        return self.s**2 / (self.alpha0 - 1.0)

    @property
    def mean(self):
        return self.alpha0

    @property
    def variance(self):
        return self.s**2

    @property
    def lower_bound(self):
        return 1.0

    def pdf(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        out = np.zeros_like(alpha)
        pos = alpha > 1
        x = alpha[pos] - 1.0
        k, th = self.shape, self.gamma_scale
        out[pos] = np.exp((k - 1) * np.log(x) - x / th - log_gamma(k) - k * math.log(th))
        return out


AlphaLaw = Union[DiscreteAlphaMix, LognormalAlpha, GammaAlpha]


@dataclass(frozen=True)
class MixedLaw:
    """Pareto law with scale ``scale`` whose exponent is drawn from ``mixture``."""
    scale: float
    mixture: AlphaLaw

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"scale must be positive, got {self.scale!r}")
        if not isinstance(self.mixture, (DiscreteAlphaMix, LognormalAlpha, GammaAlpha)):
            raise DomainError(f"unsupported alpha law {type(self.mixture).__name__}")

    @property
    def mean_alpha(self):
        return self.mixture.mean


def _expm1_minus_x(w):
    """exp(w) - 1 - w without cancellation for small |w|."""
    w = np.asarray(w, dtype=float)
    small = np.abs(w) < 1e-2
    ws = w[small]
    out = np.empty_like(w)
    out[small] = ws * ws * (0.5 + ws * (1 / 6 + ws * (1 / 24 + ws * (1 / 120 + ws / 720))))
    out[~small] = np.expm1(w[~small]) - w[~small]
    return out


def _stirling_tail(k):
    """lgamma(k) - ((k - 1/2) log k - k + log(2 pi)/2)."""
    if k >= 20:
        k2 = k * k
        return (1 / 12 - (1 / 360 - (1 / 1260 - 1 / (1680 * k2)) / k2) / k2) / k
    return math.lgamma(k) - ((k - 0.5) * math.log(k) - k + 0.5 * math.log(2 * math.pi))


def expect_alpha(mixture, g, rel_tol=_REL_TOL, abs_tol=0.0):
    """
    E[g(alpha, alpha - 1)] under the alpha law.

    ``g`` receives two arrays: the exponents and their excess over 1, the
    latter computed without cancellation so that 1/(alpha - 1) stays accurate
    for exponents just above 1.
    """
    if isinstance(mixture, DiscreteAlphaMix):
        a = np.asarray(mixture.alphas)
        vals = np.asarray(g(a, a - 1.0), dtype=float)
        return float(np.dot(mixture.weights, vals))

    if isinstance(mixture, LognormalAlpha):
        c = 1.0 / math.sqrt(2 * math.pi)

        def weighted(z):
            d = np.exp(mixture.log_mean + mixture.sigma * z)
            return mixture.b + d, (mixture.b - 1.0) + d, c * np.exp(-0.5 * z * z)

    elif isinstance(mixture, GammaAlpha):
        # alpha - 1 = (alpha0 - 1) exp(t / sqrt(k)); the density of t is a
        # unit-width bump around 0 for every shape k
        k = mixture.shape
        rk = math.sqrt(k)
        log_c = -0.5 * math.log(2 * math.pi) - _stirling_tail(k)

        def weighted(t):
            w = t / rk
            d = (mixture.alpha0 - 1.0) * np.exp(w)
            return 1.0 + d, d, np.exp(log_c - k * _expm1_minus_x(w))

    else:
        raise DomainError(f"unsupported alpha law {type(mixture).__name__}")

    def integrand(t):
        with np.errstate(over="ignore"):
            alpha, excess, dens = weighted(t)
        out = np.zeros_like(dens)
        live = dens > 0
        out[live] = np.asarray(g(alpha[live], excess[live]), dtype=float) * dens[live]
        return out

    return integrate(integrand, -np.inf, np.inf, rel_tol=rel_tol, abs_tol=abs_tol).value


def mixed_moment_discrete(mix, scale, p):
    """E(X'**p) = sum_i w_i scale**p alpha_i/(alpha_i - p)."""
    _check_p(p)
    if not scale > 0:
        raise DomainError("scale must be positive")
    a = np.asarray(mix.alphas)
    w = np.asarray(mix.weights)
    if np.any(a[w > 0] <= p):
        raise InfiniteMomentError(f"E(X'^{p}) is infinite: every alpha_i must exceed p={p}")
    live = w > 0
    return float(scale**p * np.dot(w[live], a[live] / (a[live] - p)))


def jensen_gap(mix, scale, p):
    """
    E(X'**p) - E(X**p) at the mean exponent.

    Evaluated as p scale**p sum_i w_i (alpha_i - abar)**2 / ((alpha_i - p)(abar - p)**2),
    which equals the plain difference and is visibly non-negative.
    """
    _check_p(p)
    if not scale > 0:
        raise DomainError("scale must be positive")
    a = np.asarray(mix.alphas)
    w = np.asarray(mix.weights)
    live = w > 0
    if np.any(a[live] <= p):
        raise InfiniteMomentError(f"E(X'^{p}) is infinite: every alpha_i must exceed p={p}")
    abar = mix.mean
    terms = w[live] * (a[live] - abar) ** 2 / (a[live] - p)
    return float(p * scale**p * terms.sum() / (abar - p) ** 2)


def mixed_mean_lognormal(mix, scale, mode="closed_form"):
    """
    Mean of a Pareto with lognormally distributed exponent.

    ``closed_form`` returns scale*(alpha0 + exp(sigma**2) - b)/(alpha0 - b),
    which is exact only when b = 1.  ``quadrature`` integrates
    scale*alpha/(alpha - 1) against the alpha law and is valid for any b >= 1.
    """
    if not scale > 0:
        raise DomainError("scale must be positive")
    if mode == "closed_form":
        return scale * (mix.alpha0 + math.exp(mix.sigma**2) - mix.b) / (mix.alpha0 - mix.b)
    if mode == "quadrature":
        if mix.b == 1.0:
            # alpha - 1 = exp(m + sigma z): write alpha/(alpha-1) as 1 + exp(-m - sigma z)
            m, sig = mix.log_mean, mix.sigma
            c = 1.0 / math.sqrt(2 * math.pi)
            val = integrate(lambda z: c * (np.exp(-0.5 * z * z) + np.exp(-m - z * (sig + 0.5 * z))),
                            -np.inf, np.inf, rel_tol=_REL_TOL).value
            return scale * val
        return scale * expect_alpha(mix, lambda a, e: a / e)
    raise DomainError(f"mode must be 'closed_form' or 'quadrature', got {mode!r}")


def lognormal_closed_form_gap(mix, scale):
    """(closed form, quadrature, closed form - quadrature) for the lognormal mean."""
    cf = mixed_mean_lognormal(mix, scale, "closed_form")
    q = mixed_mean_lognormal(mix, scale, "quadrature")
    return cf, q, cf - q


def mixed_mean_gamma(mix, scale, mode="closed_form"):
    """
    Mean of a Pareto with exponent 1 + Gamma(mean alpha0 - 1, sd s).

    Closed form: scale*(1 + (alpha0 - 1)/((alpha0 - 1)**2 - s**2)).  Finite only
    for s < alpha0 - 1.
    """
    if not scale > 0:
        raise DomainError("scale must be positive")
    a1 = mix.alpha0 - 1.0
    if mix.s >= a1:
        raise InfiniteMomentError(
            f"mean is infinite: requires s < alpha0 - 1 (s={mix.s}, alpha0={mix.alpha0})")
    if mode == "closed_form":
        return scale * (1.0 + a1 / (a1 * a1 - mix.s**2))
    if mode == "quadrature":
        return scale * expect_alpha(mix, lambda a, e: a / e)
    raise DomainError(f"mode must be 'closed_form' or 'quadrature', got {mode!r}")


def gamma_bias(mix, scale):
    """scale*s**2/((alpha0-1)(alpha0-s-1)(alpha0+s-1)): excess over the fixed-alpha mean."""
    a1 = mix.alpha0 - 1.0
    if mix.s >= a1:
        raise InfiniteMomentError("mean is infinite: requires s < alpha0 - 1")
    return scale * mix.s**2 / (a1 * (a1 - mix.s) * (a1 + mix.s))


def reference_mean(law):
    """Pareto mean at the mean exponent: scale*abar/(abar - 1)."""
    if isinstance(law, ParetoLaw):
        return law.mean
    return ParetoLaw(law.scale, law.mean_alpha).mean


def mixed_mean(law, mode="quadrature"):
    """E(X') for any `MixedLaw` (or the plain mean of a `ParetoLaw`)."""
    if isinstance(law, ParetoLaw):
        return law.mean
    mix = law.mixture
    if isinstance(mix, DiscreteAlphaMix):
        return mixed_moment_discrete(mix, law.scale, 1)
    if isinstance(mix, LognormalAlpha):
        return mixed_mean_lognormal(mix, law.scale, mode)
    return mixed_mean_gamma(mix, law.scale, mode)


def sample_alpha(mixture, stream, n):
    """``n`` exponents drawn by inversion from the alpha law."""
    u = stream.uniform(n)
    if isinstance(mixture, DiscreteAlphaMix):
        cdf = np.cumsum(mixture.weights)
        idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
        return np.asarray(mixture.alphas)[idx]
    if isinstance(mixture, LognormalAlpha):
        return mixture.from_normal(special.ndtri(u))
    if isinstance(mixture, GammaAlpha):
        return 1.0 + mixture.gamma_scale * special.gammaincinv(mixture.shape, u)
    raise DomainError(f"unsupported alpha law {type(mixture).__name__}")


def sample_mixed(law, stream, n):
    """
    Two-stage draws: n exponents from the alpha law, then one Pareto draw for
    each.  Consumes 2n uniforms (all exponents first).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if isinstance(law, ParetoLaw):
        return law.sample(stream, n)
    alpha = sample_alpha(law.mixture, stream, n)
    u = stream.uniform(n)
    return law.scale * (1.0 - u) ** (-1.0 / alpha)


def _check_y(law, y):
    y = np.asarray(y, dtype=float)
    if np.any(y < law.scale) or np.any(np.isnan(y)):
        raise DomainError(f"y must be >= scale={law.scale}")
    return y


def mixed_density(law, y):
    """Density of X' at y: E[alpha scale**alpha y**(-alpha-1)] over the alpha law."""
    y = _check_y(law, y)
    lam = law.scale
    out = np.empty(y.shape)
    for i, yi in np.ndenumerate(y):
        lr = math.log(yi / lam)
        out[i] = expect_alpha(law.mixture, lambda a, e, yi=yi, lr=lr: a / yi * np.exp(-a * lr))
    return float(out) if out.ndim == 0 else out


def mixed_density_series(alpha0, sigma, scale, y, k):
    """
    Truncated expansion of the lognormal-alpha density (b = 1) around alpha = 1.

    Returns scale/y**2 * sum_{i<=k} M_i (l**(i-1)/(i-1)! + l**i/i!) with
    l = log(scale/y) and M_i = (alpha0-1)**i exp(i(i-1) sigma**2/2) the moments
    of alpha - 1.  The expansion is asymptotic: it improves with k only up to
    an order that shrinks as sigma grows.
    """
    if not alpha0 > 1:
        raise DomainError("alpha0 must exceed 1")
    if not sigma >= 0:
        raise DomainError("sigma must be non-negative")
    if not scale > 0 or not y >= scale:
        raise DomainError("need scale > 0 and y >= scale")
    if k < 0:
        raise DomainError("truncation order k must be >= 0")
    ell = math.log(scale / y)
    total = 0.0
    for i in range(k + 1):
        m_i = math.exp(i * math.log(alpha0 - 1.0) + 0.5 * i * (i - 1) * sigma**2)
        bracket = ell**i / math.factorial(i)
        if i >= 1:
            bracket += ell ** (i - 1) / math.factorial(i - 1)
        total += m_i * bracket
        if not math.isfinite(total):
            raise NumericalError(f"series term {i} is not finite")
    return scale * total / (y * y)


def _require_finite_mean(mixture):
    if isinstance(mixture, DiscreteAlphaMix) and mixture.lower_bound <= 1:
        raise InfiniteMomentError("conditional mean is infinite: some alpha_i <= 1")
    if isinstance(mixture, GammaAlpha) and mixture.s >= mixture.alpha0 - 1:
        raise InfiniteMomentError("conditional mean is infinite: requires s < alpha0 - 1")


def mixed_shortfall(law, K):
    """
    E(X' | X' > K).

    By Fubini the tail integrals of the mixed density reduce to expectations
    over alpha:  K * E[alpha r**alpha/(alpha-1)] / E[r**alpha] with r = scale/K.
    """
    if isinstance(law, ParetoLaw):
        return law.mean_excess(K)
    if not K >= law.scale:
        raise DomainError(f"threshold K={K!r} must be >= scale={law.scale}")
    _require_finite_mean(law.mixture)
    lr = math.log(law.scale / K)
    num = expect_alpha(law.mixture, lambda a, e: a / e * np.exp(a * lr))
    den = expect_alpha(law.mixture, lambda a, e: np.exp(a * lr))
    if not (num > 0 and den > 0):
        raise NumericalError(f"tail probability underflows at K={K!r}")
    return K * num / den
