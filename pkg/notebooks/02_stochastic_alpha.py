# # Means under an uncertain tail exponent

# ## Imports

import math

import numpy as np

from tailbias import (DiscreteAlphaMix, GammaAlpha, LognormalAlpha, MixedLaw, RandomStream,
                      jensen_gap, mixed_density, mixed_density_series, mixed_mean,
                      mixed_shortfall, sample_mixed)
from tailbias.stochastic_alpha import lognormal_closed_form_gap, reference_mean

# ## Two exponents, same average

mix = DiscreteAlphaMix((0.5, 0.5), (1.5, 2.5))
law = MixedLaw(1.0, mix)
mixed_mean(law), reference_mean(law), jensen_gap(mix, 1.0, 1)

# ## Lognormal exponent
#
# alpha - 1 is lognormal with mean alpha0 - 1.  The mean grows with sigma even
# though E[alpha] stays put.

for sigma in (0.1, 0.3, 0.5, 0.8):
    law = MixedLaw(1.0, LognormalAlpha(2.0, sigma))
    print(sigma, mixed_mean(law), 1 + math.exp(sigma**2))

# With a shift b > 1 there is no elementary answer; the closed form drifts
# away from quadrature.

lognormal_closed_form_gap(LognormalAlpha(3.0, 0.3, b=1.5), 1.0)

# ## Gamma exponent

for s in (0.2, 0.6, 1.0, 1.6):
    law = MixedLaw(1.0, GammaAlpha(3.0, s))
    print(s, mixed_mean(law, "quadrature"), mixed_mean(law, "closed_form"))

# ## Monte Carlo

law = MixedLaw(1.0, LognormalAlpha(2.0, 0.5))
x = sample_mixed(law, RandomStream(42), 10_000_000)
x.mean(), x.std() / math.sqrt(x.size)

# ## Density and its expansion around alpha = 1

law = MixedLaw(1.0, LognormalAlpha(1.5, 0.2))
exact = mixed_density(law, 2.0)
[(k, abs(mixed_density_series(1.5, 0.2, 1.0, 2.0, k) - exact)) for k in range(1, 10)]

# ## Shortfall
#
# For a finite mix the ratio to K climbs towards the heaviest atom's value.

law = MixedLaw(1.0, DiscreteAlphaMix((0.5, 0.5), (1.5, 2.5)))
[(K, mixed_shortfall(law, K) / K) for K in np.logspace(1, 5, 5)]
