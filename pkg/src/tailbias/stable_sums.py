"""
Characteristic functions of Pareto variables and of their sample averages,
the asymmetric stable limit, and a Monte Carlo check that the stochastic-alpha
bias survives summation.

The Pareto characteristic function is evaluated by quadrature.  After the
substitution u = scale*|t|*y it reads

    cf(t) = alpha a**alpha * int_a^inf exp(iu) u**(-alpha-1) du,   a = scale*|t|

The integral is split at U0 = max(a, 2 pi): below U0 the integrand is
integrated in log u (smooth even when a is tiny), between U0 and U0 + 64 pi
by adaptive quadrature, and the remaining oscillatory tail by its
integration-by-parts expansion.  The real part is formed as 1 - int (1 - cos u)...
so that cf(t) - 1 keeps full relative precision as t -> 0, which is what
`mean_from_cf` differentiates.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, InfiniteMomentError
from .numerics import integrate
from .powerlaw import ParetoLaw
from .results import ResultTable, make_meta
from .stochastic_alpha import MixedLaw, reference_mean, sample_mixed

__all__ = [
    "StableParams",
    "TailPair",
    "pareto_cf",
    "avg_cf",
    "mean_from_cf",
    "stable_cf",
    "beta_from_tails",
    "convergence_experiment",
    "CF_GRID",
]

CF_GRID = (-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0)

_TAIL_TERMS = 10


@dataclass(frozen=True)
class StableParams:
    alpha: float
    beta: float
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not 1 < self.alpha < 2:
            raise DomainError(f"stable alpha must lie in (1, 2), got {self.alpha!r}")
        if not -1 <= self.beta <= 1:
            raise DomainError(f"beta must lie in [-1, 1], got {self.beta!r}")
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")

    @classmethod
    def from_pareto(cls, law, beta=1.0):
        """Stable limit of averages of ``law``: location set to the Pareto mean."""
        return cls(law.alpha, beta, law.scale * law.alpha / (law.alpha - 1.0))


@dataclass(frozen=True)
class TailPair:
    """Limits c, d of the right and left tail coefficients."""
    c: float
    d: float

    def __post_init__(self):
        if self.c < 0 or self.d < 0:
            raise DomainError("tail coefficients must be non-negative")
        if not self.c + self.d > 0:
            raise DomainError("c + d must be positive")


def beta_from_tails(tails):
    """Skewness of the stable limit, (c - d)/(c + d)."""
    return (tails.c - tails.d) / (tails.c + tails.d)


def _osc_tail(U, beta):
    """int_U^inf exp(iu) u**(-beta) du from its asymptotic expansion (U >= 200)."""
    total = 0j
    coef = 1.0
    for k in range(_TAIL_TERMS):
        total += coef * (1j * (-1j) ** k) * U ** (-beta - k)
        coef *= beta + k
    return np.exp(1j * U) * total


def _cf_positive(alpha, a, rel_tol):
    """cf at scale*t = a > 0."""
    U0 = max(a, 2 * math.pi)
    U1 = max(U0 + 64 * math.pi, 200.0)
    beta = alpha + 1.0

    one_minus_re = 0.0
    im = 0.0
    if a < U0:
        la, lu = math.log(a), math.log(U0)
        one_minus_re += integrate(
            lambda v: 2.0 * np.sin(0.5 * np.exp(v)) ** 2 * np.exp(-alpha * v),
            la, lu, rel_tol=rel_tol).value
        im += integrate(lambda v: np.sin(np.exp(v)) * np.exp(-alpha * v),
                        la, lu, rel_tol=rel_tol).value
    # between U0 and U1 the non-oscillating part is integrated exactly
    one_minus_re += (U0 ** -alpha - U1 ** -alpha) / alpha
    amp = abs(U0) ** -alpha
    one_minus_re -= integrate(lambda u: np.cos(u) * u ** -beta, U0, U1,
                              rel_tol=rel_tol, abs_tol=1e-3 * rel_tol * amp).value
    im += integrate(lambda u: np.sin(u) * u ** -beta, U0, U1,
                    rel_tol=rel_tol, abs_tol=1e-3 * rel_tol * amp).value
    tail = _osc_tail(U1, beta)
    one_minus_re += U1 ** -alpha / alpha - tail.real
    im += tail.imag

    factor = alpha * a ** alpha
    return complex(1.0 - factor * one_minus_re, factor * im)


def pareto_cf(law, t, rel_tol=1e-12):
    """E[exp(itY)] for Y ~ ``law``; ``t`` may be a scalar or an array."""
    t_arr = np.asarray(t, dtype=float)
    out = np.empty(t_arr.shape, dtype=complex)
    for idx, ti in np.ndenumerate(t_arr):
        if ti == 0:
            out[idx] = 1.0
            continue
        v = _cf_positive(law.alpha, law.scale * abs(ti), rel_tol)
        out[idx] = v if ti > 0 else v.conjugate()
    return complex(out) if out.ndim == 0 else out


def avg_cf(law, n, t):
    """Characteristic function of the average of ``n`` i.i.d. copies: cf(t/n)**n."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise DomainError("n must be a positive integer")
    return pareto_cf(law, np.asarray(t, dtype=float) / n) ** int(n)


def _central_slope(law, n, h):
    return ((avg_cf(law, n, h) - avg_cf(law, n, -h)) / (2 * h)).imag


def mean_from_cf(law, n=1, h=1e-4):
    """
    Mean of the n-average recovered from -i d/dt cf(t/n)**n at t = 0.

    The imaginary part of the cf carries a |t|**alpha term, so the central
    difference has leading error c*h**(alpha-1) rather than h**2.  Two steps,
    h and h/2, are combined with a Richardson weight for that exponent.
    """
    if law.alpha <= 1:
        raise InfiniteMomentError(f"mean is infinite: requires alpha > 1 (alpha={law.alpha})")
    if not h > 0:
        raise DomainError("h must be positive")
    q = law.alpha - 1.0
    d1 = _central_slope(law, n, h)
    d2 = _central_slope(law, n, h / 2)
    r = 2.0**q
    return (r * d2 - d1) / (r - 1.0)


def stable_cf(params, lambda_scale, t):
    """
    exp(i(lambda_scale*alpha*t/(alpha-1) + |t|**alpha (beta tan(pi alpha/2) sgn t + i)))

    The location is the Pareto mean lambda_scale*alpha/(alpha-1) and the
    scale is fixed at 1.  The modulus is exp(-|t|**alpha).
    """
    if lambda_scale < 0:
        raise DomainError("lambda_scale must be non-negative")
    a, b = params.alpha, params.beta
    t = np.asarray(t, dtype=float)
    at = np.abs(t) ** a
    phase = lambda_scale * a * t / (a - 1.0) + at * b * math.tan(math.pi * a / 2) * np.sign(t)
    mod = np.exp(-at)
    out = mod * np.cos(phase) + 1j * (mod * np.sin(phase))
    return complex(out) if out.ndim == 0 else out


_CHUNK = 1 << 20


def _average_batch(law, stream, n, m):
    """m averages of n draws each, generated in fixed-size chunks of rows."""
    rows_per_chunk = max(1, _CHUNK // n)
    out = np.empty(m)
    done = 0
    while done < m:
        r = min(rows_per_chunk, m - done)
        x = sample_mixed(law, stream, r * n).reshape(r, n)
        out[done:done + r] = x.mean(axis=1)
        done += r
    return out


def convergence_experiment(law, n_values, m, stream, mirrored=False):
    """
    Monte Carlo check that the stochastic-alpha bias is conserved by averaging.

    For each n: ``m`` averages of n draws from ``law`` (negated when
    ``mirrored``), their mean and standard error, the bias against the Pareto
    mean at the mean exponent, a 3-standard-error sign test on it, and the
    sup-distance on `CF_GRID` between the empirical cf of the averages and
    `stable_cf` with beta = +1 (-1 when mirrored).
    """
    if not isinstance(law, (ParetoLaw, MixedLaw)):
        raise DomainError("law must be a ParetoLaw or MixedLaw")
    abar = law.alpha if isinstance(law, ParetoLaw) else law.mean_alpha
    if not 1 < abar < 2:
        raise DomainError(f"mean tail exponent must lie in (1, 2), got {abar!r}")
    if m < 10_000:
        raise DomainError("m must be at least 10000")
    n_values = [int(n) for n in n_values]
    if not n_values or min(n_values) < 1:
        raise DomainError("n_values must be positive integers")

    sign = -1.0 if mirrored else 1.0
    ref = sign * reference_mean(law)
    beta = beta_from_tails(TailPair(0.0, 1.0) if mirrored else TailPair(1.0, 0.0))
    params = StableParams(abar, beta, ref)
    grid = np.asarray(CF_GRID)
    # a mirrored variable has the conjugate cf: location and skewness flip sign
    target = stable_cf(StableParams(abar, 1.0), abs(ref), grid)
    if mirrored:
        target = np.conj(target)

    cols = {k: [] for k in ("n", "mean", "std_error", "reference_mean", "bias",
                            "z_score", "bias_sign", "ecf_sup_distance")}
    start = stream.position
    for n in n_values:
        avgs = sign * _average_batch(law, stream, n, m)
        mean = float(avgs.mean())
        se = float(avgs.std(ddof=1) / math.sqrt(m))
        bias = mean - ref
        z = bias / se if se > 0 else math.copysign(math.inf, bias)
        ecf = np.exp(1j * np.outer(grid, avgs)).mean(axis=1)
        cols["n"].append(n)
        cols["mean"].append(mean)
        cols["std_error"].append(se)
        cols["reference_mean"].append(ref)
        cols["bias"].append(bias)
        cols["z_score"].append(z)
        cols["bias_sign"].append(int(z > 3) - int(z < -3))
        cols["ecf_sup_distance"].append(float(np.max(np.abs(ecf - target))))

    meta = make_meta("sum-converge", {
        "law": repr(law), "n": n_values, "m": m, "mirrored": mirrored,
        "stable": {"alpha": params.alpha, "beta": params.beta, "mu": params.mu},
        "stream_id": stream.stream_id, "start_position": start,
    }, seed=stream.seed)
    return ResultTable(cols, meta)
