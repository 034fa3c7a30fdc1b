"""Learning subspace models from samples and checking them against the plant.

A model planted with known ranks generates samples; the learners must
recover subspaces that reproduce every sample.  The same script contrasts
the two hierarchical projection routes (stored node bases versus bases
rebuilt from leaves and transfer matrices): identical numbers, different
cost profiles.
"""

import numpy as np

import tensorspaces as ts

rng = np.random.default_rng(42)
shape = (6, 5, 4, 4)

# Plant a hierarchical model: leaf ranks 3, internal ranks 4.
tree = ts.assign_ranks(ts.balanced_tree(4), shape, n_samples=20, leaf=3, internal=4)
planted = ts.random_ht_model(shape, tree, rng)

s1, s2 = planted.root_children
coeff_dims = (planted.basis(s1).shape[1], planted.basis(s2).shape[1])
samples = [ts.reconstruct_ht(planted, rng.standard_normal(coeff_dims)) for _ in range(20)]

learned = ts.learn_hierarchical(samples, tree)
residuals = [ts.projection_residual(learned, s) for s in samples]
print(f"planted-rank recovery: worst residual {max(residuals):.2e} over {len(samples)} samples")

# Both projection routes give the same coefficients.
x = rng.standard_normal(shape)
stored = ts.project_ht_materialized(learned, x)
rebuilt = ts.project_ht_factored(learned, x)
print(f"stored vs rebuilt coefficients: max dev {np.max(np.abs(stored - rebuilt)):.2e}")

# Tensor-train: same game on the chain tree.
chain = ts.assign_ranks(ts.tt_tree(4), shape, n_samples=20, leaf=3, internal=4)
tt_planted = ts.random_ht_model(shape, chain, rng)
c1, c2 = tt_planted.root_children
dims = (tt_planted.basis(c1).shape[1], tt_planted.basis(c2).shape[1])
tt_samples = [ts.reconstruct_ht(tt_planted, rng.standard_normal(dims)) for _ in range(20)]
tt_learned = ts.learn_tt(tt_samples, chain)
print("tensor-train worst residual:",
      f"{max(ts.projection_residual(tt_learned, s) for s in tt_samples):.2e}")

# Tucker: per-axis bases only.
tucker_planted = ts.random_tucker_model(shape, (3, 3, 3, 3), rng)
tk_samples = [
    ts.reconstruct_tucker(tucker_planted, rng.standard_normal(tucker_planted.ranks))
    for _ in range(20)
]
tucker_learned = ts.learn_tucker(tk_samples, (3, 3, 3, 3))
print("tucker worst residual:",
      f"{max(ts.projection_residual(tucker_learned, s) for s in tk_samples):.2e}")

# Projection energy is the classification currency: for in-subspace points
# it equals the squared norm; it can never exceed it.
xin = tk_samples[0]
energy = ts.projection_energy(ts.project_tucker(tucker_learned, xin))
print(f"in-subspace energy / squared norm: {energy / ts.frobenius_norm(xin) ** 2:.12f}")
