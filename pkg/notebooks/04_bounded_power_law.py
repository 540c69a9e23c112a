# # A power law with a hard cap

# ## Imports

import numpy as np

from tailbias import BoundedLaw, DiscreteAlphaMix, RandomStream

law = BoundedLaw(1.0, 100.0, 1.0, 0.5)

# ## The log transform

z = np.array([1.0, 50.0, 99.0, 99.99])
x = law.dual_transform(z)
x, law.inverse_transform(x)

# ## Finite mean for any alpha

for a in (0.1, 0.3, 0.5, 1.0, 2.0):
    print(a, law.with_alpha(a).mean())

law.mean(), law.sample(RandomStream(1), 1_000_000).mean()

# ## Curvature in alpha

for a in (0.40, 0.45, 0.50, 0.55, 0.60):
    l = law.with_alpha(a)
    print(a, l.mean_convexity(0.01), l.mean_convexity(0.005))

# ## Uncertainty in alpha raises the mean

for spread in (0.05, 0.1, 0.2):
    mix = DiscreteAlphaMix((0.5, 0.5), (0.5 - spread, 0.5 + spread))
    print(spread, law.alpha_uncertainty(mix))
