"""
Probabilistic cache placement: water filling beats most-popular
===============================================================

Each station caches file n independently with probability a_n, subject to
the expected storage budget sum(a_n) = M.  A request is offloaded when some
station among the K nearest holds the file and that station's SIR clears
the threshold; mixing the per-rank coverages with the geometric hit weights
makes the objective concave, so the optimum is a water-filling allocation
found by dual bisection.
"""

import numpy as np

from cellcache import (NetworkParams, afot_prob, aese_prob, coverage_profile,
                       mpc_policy, rate_table, solve_prob_caching,
                       zipf_popularity)

N, M = 100, 10
pop = zipf_popularity(N, delta=0.5)

print(f"catalog N = {N}, budget M = {M}, Zipf skew 0.5, MF with L = 2")
print()
print(f"{'gamma(dB)':>9} | {'AFOT opt':>9} {'AFOT mpc':>9} {'gain':>7} | "
      f"{'AESE opt':>9} {'AESE mpc':>9}")
for gdb in (-10.0, -5.0, 0.0, 5.0):
    params = NetworkParams(lambda_b=1.0, alpha=4.0, L=2, K=3,
                           gamma=10 ** (gdb / 10))
    profile = coverage_profile("mf", params)
    rates = rate_table("mf", params).rates
    opt = solve_prob_caching(pop, profile.values, float(M))
    mpc = mpc_policy(N, M)
    a_opt, a_mpc = afot_prob(opt, pop, profile), afot_prob(mpc, pop, profile)
    print(f"{gdb:>9.0f} | {a_opt:>9.4f} {a_mpc:>9.4f} {a_opt - a_mpc:>+7.4f} | "
          f"{aese_prob(opt, pop, rates):>9.4f} {aese_prob(mpc, pop, rates):>9.4f}")

# The optimal allocation hedges: instead of pinning the top M files it
# spreads partial copies over more of the catalog, deepest where requests
# are most likely.  Show the profile at -10 dB.
params = NetworkParams(lambda_b=1.0, alpha=4.0, L=2, K=3, gamma=0.1)
profile = coverage_profile("mf", params)
policy = solve_prob_caching(pop, profile.values, float(M))
a = np.asarray(policy.a)
print()
print("allocation at -10 dB (file rank: caching probability)")
for n in (1, 2, 3, 5, 10, 20, 30, 40, 50):
    print(f"  {n:>3}: {a[n - 1]:.3f}" + ("" if a[n - 1] > 0 else "  (skipped)"))
print(f"files with a_n > 0: {(a > 1e-9).sum()} of {N}; "
      f"storage used: {a.sum():.6f}")

# Flat popularity removes any reason to prefer one file over another and
# the optimizer recovers the uniform M/N split.
flat = solve_prob_caching(zipf_popularity(N, 0.0), profile.values, float(M))
spread = np.ptp(np.asarray(flat.a))
print(f"\nuniform popularity sanity check: max - min of a = {spread:.2e}")
