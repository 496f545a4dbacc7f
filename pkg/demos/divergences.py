"""Tour of the divergence family between two forecasts.

Two forecasters announce distributions over the same finite outcome space;
every notion of disagreement used by the betting strategies derives from one
Hellinger-type power integral of their densities against the half-half
mixture.  This script walks through the family on a worked pair.

Run:  python demos/divergences.py
"""

import numpy as np

from opinion_merge import (
    Distribution,
    alpha_divergence,
    chi2_divergence,
    hellinger_integral,
    kl_divergence,
    log_alpha_divergence,
    mixture_densities,
    renyi_info_gain,
)

# A mildly disagreeing pair: forecast I is uniform, forecast II is confident.
p_i = Distribution([0.5, 0.5])
p_ii = Distribution([0.9, 0.1])
dp = mixture_densities(p_i, p_ii)

print("mixture q:        ", dp.q.tolist())
print("density of I wrt q:", dp.beta_i.tolist())
print("density of II wrt q:", dp.beta_ii.tolist())
print()

# The Hellinger integral at order (1-a)/2 sits inside every divergence.
for a in (-3.0, -0.5, 0.0, 0.5, 3.0):
    h = hellinger_integral(dp, a)
    lin = alpha_divergence(dp, a)
    logf = log_alpha_divergence(dp, a)
    print(f"alpha={a:+.1f}  H={h:9.6f}  linear form={lin:9.6f}  log form={logf:9.6f}")
print()

# Special cases: alpha 0 is the Hellinger distance, alpha -3 is half the
# chi-square distance, and Kullback-Leibler plays the role of alpha -1.
hell_closed = 2 * float(np.sum((np.sqrt(dp.beta_i) - np.sqrt(dp.beta_ii)) ** 2 * dp.q.probs))
print("alpha=0 vs closed-form Hellinger distance:",
      alpha_divergence(dp, 0.0), "vs", hell_closed)
print("alpha=-3 vs chi-square:", alpha_divergence(dp, -3.0), "vs", chi2_divergence(dp))
print("Kullback-Leibler:      ", kl_divergence(dp))
print("Renyi gain, order 2:   ", renyi_info_gain(dp, 2.0), "bits")
print()

# The two forms bracket each other: linear <= log inside |alpha| < 1 and the
# reverse outside.  Mutually singular forecasts push the log form to +inf
# while the linear form stays at its ceiling 4/(1-a^2).
singular = mixture_densities(Distribution([1, 0]), Distribution([0, 1]))
print("mutually singular pair at alpha=0:")
print("  linear form:", alpha_divergence(singular, 0.0))
print("  log form:   ", log_alpha_divergence(singular, 0.0))
