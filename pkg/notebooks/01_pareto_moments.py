# # Pareto moments and their curvature in alpha

# ## Imports

import numpy as np

from tailbias import ParetoLaw, RandomStream, moment_tail, student_half_mean

# ## Closed form against tail quadrature

for alpha in (1.1, 1.5, 2.0, 3.0, 5.0):
    law = ParetoLaw(1.0, alpha)
    print(alpha, law.mean, moment_tail(law.as_survival_spec(), 1))

# Moments of order p >= alpha are reported as infinite rather than as a number.

try:
    ParetoLaw(1.0, 1.5).moment(2)
except ArithmeticError as exc:
    print(type(exc).__name__, exc)

# ## How the mean bends in alpha

alphas = np.linspace(1.2, 4.0, 8)
curv = [ParetoLaw(1.0, a).moment_alpha_convexity(1) for a in alphas]
for a, c in zip(alphas, curv):
    print(f"alpha={a:.2f}  mean={ParetoLaw(1.0, a).mean:8.3f}  d2/dalpha2={c:10.3f}")

# Near alpha = 1 the curvature explodes, so a small spread in alpha moves the
# mean a lot.

# ## Sampling check

x = ParetoLaw(1.0, 2.5).sample(RandomStream(0), 1_000_000)
x.mean(), ParetoLaw(1.0, 2.5).mean

# ## Mean excess is linear in the threshold

law = ParetoLaw(1.0, 2.0)
[(K, law.mean_excess(K) / K) for K in (10, 100, 1000)]

# ## One-sided Student-t term and its linear proxy

for a in (3, 4, 6, 8, 12, 20):
    ex, ap = student_half_mean(a), student_half_mean(a, "approximate")
    print(a, round(ex, 4), round(ap, 4), f"{abs(ex - ap) / ex:.3%}")
