"""
Capped power laws.

A variable z on [L, H) is mapped to x on [L, inf) by the logarithmic dual
transform

    x = L - H log((H - z)/(H - L)),      z = H - (H - L) exp((L - x)/H)

and x is given the density f(x) = (1 + (x - L)/(alpha sigma))**(-alpha-1)/sigma,
whose tail has index alpha.  E(Z) is finite for any alpha > 0.
"""
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .numerics import default_step, integrate, second_derivative

__all__ = ["BoundedLaw"]


@dataclass(frozen=True)
class BoundedLaw:
    L: float
    H: float
    sigma: float
    alpha: float

    def __post_init__(self):
        if not 0 < self.L < self.H:
            raise DomainError(f"need 0 < L < H, got L={self.L!r}, H={self.H!r}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")

    def with_alpha(self, alpha):
        return replace(self, alpha=alpha)

    def dual_transform(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z < self.L) or np.any(z >= self.H) or np.any(np.isnan(z)):
            raise DomainError(f"z must lie in [{self.L}, {self.H})")
        # log1p keeps the map exact near z = L
        out = self.L - self.H * np.log1p(-(z - self.L) / (self.H - self.L))
        return float(out) if out.ndim == 0 else out

    def inverse_transform(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.L) or np.any(np.isnan(x)):
            raise DomainError(f"x must be >= L={self.L}")
        out = self.L - (self.H - self.L) * np.expm1((self.L - x) / self.H)
        return float(out) if out.ndim == 0 else out

    def x_density(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.L) or np.any(np.isnan(x)):
            raise DomainError(f"x must be >= L={self.L}")
        out = (1.0 + (x - self.L) / (self.alpha * self.sigma)) ** (-self.alpha - 1.0) / self.sigma
        return float(out) if out.ndim == 0 else out

    def x_survival(self, x):
        x = np.asarray(x, dtype=float)
        out = (1.0 + (x - self.L) / (self.alpha * self.sigma)) ** (-self.alpha)
        return float(out) if out.ndim == 0 else out

    def x_quantile(self, u):
        u = np.asarray(u, dtype=float)
        return self.L + self.alpha * self.sigma * np.expm1(-np.log1p(-u) / self.alpha)

    def sample(self, stream, n):
        """``n`` draws of Z: x by inversion, then mapped back to [L, H)."""
        return self.inverse_transform(self.x_quantile(stream.uniform(n)))

    def mean(self, rel_tol=1e-13):
        """
        E(Z) as an integral over x.

        Written as H - (H - L) E[exp(-(X - L)/H)] and integrated in the
        standardized excess w = (x - L)/(alpha sigma), so the integrand
        alpha (1 + w)**(-alpha-1) exp(-c w), c = alpha sigma/H, has unit
        width whatever sigma is.  The result lies in [L, H).
        """
        a, L, H = self.alpha, self.L, self.H
        c = a * self.sigma / H

        def integrand(w):
            return a * np.exp(-c * w - (a + 1.0) * np.log1p(w))

        laplace = integrate(integrand, 0.0, np.inf, rel_tol=rel_tol).value
        return H - (H - L) * laplace

    def mean_convexity(self, h=None):
        """Central second difference of alpha -> E(Z) at ``alpha``."""
        if h is None:
            h = default_step(self.alpha)
        if not 0 < h < self.alpha:
            raise DomainError(f"need 0 < h < alpha, got h={h!r}")
        return second_derivative(lambda a: self.with_alpha(a).mean(), self.alpha, h)

    def alpha_uncertainty(self, mix):
        """
        sum_i w_i E(Z; alpha_i) - E(Z; alpha) for a mix centred on ``alpha``.
        """
        if abs(mix.mean - self.alpha) > 1e-9 * max(1.0, self.alpha):
            raise DomainError(f"mixture mean {mix.mean} does not equal alpha={self.alpha}")
        total = sum(w * self.with_alpha(a).mean()
                    for w, a in zip(mix.weights, mix.alphas) if w > 0)
        return total - self.mean()


def bounded_mean(law):
    return law.mean()


def bounded_mean_convexity(law, h=None):
    return law.mean_convexity(h)


def bounded_alpha_uncertainty(law, mix):
    return law.alpha_uncertainty(mix)


def dual_transform(law, z):
    return law.dual_transform(z)


def inverse_transform(law, x):
    return law.inverse_transform(x)


def x_density(law, x):
    return law.x_density(x)


__all__ += ["bounded_mean", "bounded_mean_convexity", "bounded_alpha_uncertainty",
            "dual_transform", "inverse_transform", "x_density"]
