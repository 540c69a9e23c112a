"""
Exact Pareto laws (constant slowly varying part) and tail-quadrature moments
for general survival functions.

A `ParetoLaw` has survival P(X > x) = (x/scale)**(-alpha) for x >= scale; the
scale doubles as the minimum value.  Moments of order p >= alpha do not exist
and raise `InfiniteMomentError`.
"""
from dataclasses import dataclass
import math
from typing import Callable

import numpy as np

from .errors import DomainError, InfiniteMomentError
from .numerics import integrate, log_gamma

__all__ = [
    "ParetoLaw",
    "SurvivalSpec",
    "moment_tail",
    "conditional_mean_tail",
    "student_half_mean",
]


def _check_p(p):
    if not (isinstance(p, (int, np.integer)) and p >= 1):
        raise DomainError(f"moment order p must be a positive integer, got {p!r}")


@dataclass(frozen=True)
class ParetoLaw:
    scale: float
    alpha: float

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"scale must be positive, got {self.scale!r}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")

    def _check_support(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.scale) or np.any(np.isnan(x)):
            raise DomainError(f"x must be >= scale={self.scale}")
        return x

    def survival(self, x):
        x = self._check_support(x)
        out = (x / self.scale) ** (-self.alpha)
        return float(out) if out.ndim == 0 else out

    def density(self, x):
        x = self._check_support(x)
        out = self.alpha / x * (x / self.scale) ** (-self.alpha)
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0) or np.any(u >= 1) or np.any(np.isnan(u)):
            raise DomainError("u must lie in [0, 1)")
        out = self.scale * (1.0 - u) ** (-1.0 / self.alpha)
        return float(out) if out.ndim == 0 else out

    def sample(self, stream, n):
        """``n`` draws by inversion of the uniforms from ``stream``."""
        if n < 1:
            raise DomainError("n must be >= 1")
        u = stream.uniform(n)
        # 1 - u is exact for u in (0, 1) on the 2**-53 grid used by the stream
        return self.scale * (1.0 - u) ** (-1.0 / self.alpha)

    def as_survival_spec(self):
        return SurvivalSpec(lambda x: (x / self.scale) ** (-self.alpha), self.scale)

    def moment(self, p):
        """E(X**p) = scale**p * alpha/(alpha - p)."""
        _check_p(p)
        if self.alpha <= p:
            raise InfiniteMomentError(
                f"E(X^{p}) is infinite: requires alpha > p (alpha={self.alpha})")
        return self.scale**p * self.alpha / (self.alpha - p)

    @property
    def mean(self):
        return self.moment(1)

    def moment_alpha_convexity(self, p):
        """Second derivative of E(X**p) with respect to alpha: 2p scale**p/(alpha-p)**3."""
        _check_p(p)
        if self.alpha <= p:
            raise InfiniteMomentError(
                f"E(X^{p}) is infinite: requires alpha > p (alpha={self.alpha})")
        return 2.0 * p * self.scale**p / (self.alpha - p) ** 3

    def mean_excess(self, K):
        """E(X | X > K) = K*alpha/(alpha - 1); the ratio to K does not depend on K."""
        if not K >= self.scale:
            raise DomainError(f"threshold K={K!r} must be >= scale={self.scale}")
        if self.alpha <= 1:
            raise InfiniteMomentError(
                f"conditional mean is infinite: requires alpha > 1 (alpha={self.alpha})")
        return K * self.alpha / (self.alpha - 1.0)

    def with_alpha(self, alpha):
        return ParetoLaw(self.scale, alpha)


@dataclass(frozen=True)
class SurvivalSpec:
    """A survival function x -> P(X > x) with support starting at ``support_min``.

    ``survival`` must accept numpy arrays unless ``vectorized`` is False.
    """
    survival: Callable
    support_min: float
    vectorized: bool = True

    def __call__(self, x):
        if self.vectorized:
            return self.survival(x)
        return np.array([self.survival(float(v)) for v in np.atleast_1d(x)])


def _looks_divergent(spec, power):
    # x**power * survival(x) must go to zero for the tail integral to converge
    x0 = max(1.0, abs(spec.support_min))
    xs = x0 * np.array([1e6, 1e9, 1e12])
    g = xs**power * np.asarray(spec(xs), dtype=float)
    return bool(g[-1] > 0 and not (g[2] < g[1] < g[0]))


def moment_tail(spec, p, rel_tol=1e-12):
    """
    E(X**p) = x0**p + p * integral_{x0}^inf x**(p-1) * survival(x) dx.

    The survival function should decay faster than x**-p; an obviously
    non-decaying ``x**p * survival(x)`` raises `InfiniteMomentError`.
    Quadrature failures propagate as `QuadratureError`.
    """
    _check_p(p)
    if spec.support_min < 0:
        raise DomainError("support_min must be >= 0 for integer moments")
    if _looks_divergent(spec, p):
        raise InfiniteMomentError(f"survival does not decay faster than x^-{p}")
    x0 = spec.support_min
    tail = integrate(lambda x: x ** (p - 1) * spec(x), x0, np.inf, rel_tol=rel_tol)
    return x0**p + p * tail.value


def conditional_mean_tail(spec, K, rel_tol=1e-12):
    """E(X | X > K) = K + integral_K^inf survival(x) dx / survival(K)."""
    if not K >= spec.support_min:
        raise DomainError(f"threshold K={K!r} is below the support")
    sk = float(np.asarray(spec(np.array([float(K)])))[0])
    if not sk > 0:
        raise DomainError(f"P(X > {K}) is zero; conditional mean undefined")
    if _looks_divergent(spec, 1):
        raise InfiniteMomentError("survival does not decay faster than 1/x")
    tail = integrate(spec, K, np.inf, rel_tol=rel_tol)
    return K + tail.value / sk


def student_half_mean(alpha, mode="exact"):
    """
    One-sided Student-T mean term 2*nu(alpha).

    ``exact``: 2*sqrt(alpha)*Gamma((alpha+1)/2) / (sqrt(pi)*Gamma(alpha/2)).
    ``approximate``: the linear proxy alpha*(1 + log 4)/pi.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if mode == "exact":
        lr = log_gamma((alpha + 1) / 2) - log_gamma(alpha / 2)
        return 2.0 * math.sqrt(alpha / math.pi) * math.exp(lr)
    if mode == "approximate":
        return alpha * (1.0 + math.log(4.0)) / math.pi
    raise DomainError(f"mode must be 'exact' or 'approximate', got {mode!r}")
