"""Moment and shortfall biases of power laws with a stochastic tail exponent."""

__version__ = "0.1.0"

from .errors import (DomainError, InfiniteMomentError, NumericalError,  # noqa: E402
                     QuadratureError, TailBiasError)
from .numerics import (QuadratureResult, RandomStream, integrate, log_gamma,  # noqa: E402
                       second_derivative, uniform)
from .powerlaw import (ParetoLaw, SurvivalSpec, conditional_mean_tail,  # noqa: E402
                       moment_tail, student_half_mean)
from .stochastic_alpha import (DiscreteAlphaMix, GammaAlpha, LognormalAlpha,  # noqa: E402
                               MixedLaw, jensen_gap, mixed_density,
                               mixed_density_series, mixed_mean, mixed_mean_gamma,
                               mixed_mean_lognormal, mixed_moment_discrete,
                               mixed_shortfall, sample_mixed)
from .stable_sums import (StableParams, TailPair, avg_cf, beta_from_tails,  # noqa: E402
                          convergence_experiment, mean_from_cf, pareto_cf, stable_cf)
from .bounded import BoundedLaw  # noqa: E402
