# # Averages of Pareto draws

# ## Imports

import numpy as np

from tailbias import (LognormalAlpha, MixedLaw, ParetoLaw, RandomStream, StableParams,
                      avg_cf, mean_from_cf, pareto_cf, stable_cf)
from tailbias.stable_sums import convergence_experiment

# ## Characteristic function

law = ParetoLaw(1.0, 1.5)
t = np.array([0.1, 0.5, 1.0, 2.0])
pareto_cf(law, t)

# The average of n copies has cf(t/n)**n; its modulus creeps towards one as n grows.

np.abs(avg_cf(law, 100, t))

# ## The mean read off the cf does not depend on n

[(n, mean_from_cf(law, n)) for n in (1, 10, 100, 1000)]

# ## Skewed stable limit

for beta in (-1.0, 0.0, 1.0):
    print(beta, stable_cf(StableParams(1.5, beta), 1.0, t))

# ## Does averaging wash out the bias?

law = MixedLaw(1.0, LognormalAlpha(1.5, 0.3))
tab = convergence_experiment(law, [1, 10, 100], 100_000, RandomStream(42))
for row in tab.rows():
    print(row["n"], round(row["bias"], 4), round(row["std_error"], 4), round(row["z_score"], 2))

# The exact bias is 2*exp(0.09) - 2, about 0.188, at every n.  At n = 1 the
# standard error of 1e5 single heavy-tailed draws is about as large as the
# bias itself, so the 3-sigma test has little power there.

mirror = convergence_experiment(law, [1, 10, 100], 100_000, RandomStream(42), mirrored=True)
mirror.columns["bias"]
