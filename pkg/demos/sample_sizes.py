"""
How many re-clusterings are enough
==================================

Binomial error of a co-occurrence estimate, and what the bootstrap loses
because a pair of items is only sometimes drawn together.
"""
import numpy as np

from coreclust import bootstrap_indices, bootstrap_sigma, pair_coverage, required_samples

# resolving p = 0.9 to one percentage point
print("samples needed for p=0.9, sigma=0.01:", required_samples(0.9, 0.01))

# a bootstrap sample holds about 63% of the items, so a pair appears in about 40% of samples
for n in (2, 10, 150, 10**6):
    print(f"n={n:>7}: pair coverage {pair_coverage(n):.4f}")

rng = np.random.default_rng(0)
n = 150
both = np.mean([np.isin([0, 1], bootstrap_indices(n, rng)).all() for _ in range(20000)])
print(f"simulated coverage at n={n}: {both:.4f}")

# with 1000 iterations the standard error at p=0.9 is about 1.5%
print(f"bootstrap sigma at p=0.9, m=1000: {bootstrap_sigma(0.9, 1000, 10**6):.4f}")
