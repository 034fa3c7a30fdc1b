"""Exact storage and projection-cost accounting.

The counters report integers: stored scalars, and multiply-accumulates per
test-point projection.  On symmetric order-4 configurations they collapse
to closed-form polynomials, printed side by side below, followed by the
crossover table that motivates choosing one representation over another.
"""

import numpy as np

import tensorspaces as ts

rng = np.random.default_rng(7)

n, r, rp = 4, 2, 3
shape = (n, n, n, n)
samples = [rng.standard_normal(shape) for _ in range(6)]

tucker = ts.learn_tucker(samples, [r] * 4)
tree = ts.balanced_tree(4).with_ranks(
    {node: (r if len(node) == 1 else rp) for node in ts.balanced_tree(4).bottom_up()}
)
ht = ts.learn_hierarchical(samples, tree)
chain = ts.tt_tree(4).with_ranks(
    {node: (r if len(node) == 1 else rp) for node in ts.tt_tree(4).bottom_up()}
)
tt = ts.learn_tt(samples, chain)

print(f"symmetric case: axis size n={n}, leaf rank r={r}, internal rank r'={rp}\n")
print(f"{'scheme':22}{'storage':>9}{'formula':>9}{'macs':>9}{'formula':>9}")
rows = [
    ("tucker mode products", ts.cost_general(tucker, "tucker"), ts.cost_formula_tucker(n, r)),
    ("ht stored bases", ts.cost_general(ht, "materialized"), ts.cost_formula_hier1(n, rp)),
    ("ht leaves+transfers", ts.cost_general(ht, "factored"), ts.cost_formula_hier2(n, r, rp)),
    ("tt top factor", ts.cost_general(tt, "tt"), ts.cost_formula_tt(n, r, rp)),
]
for name, report, (storage, macs) in rows:
    print(f"{name:22}{report.storage_scalars:>9}{storage:>9}"
          f"{report.projection_macs:>9}{macs:>9}")

print("\nstorage crossovers as the axis size grows (r=4, r'=8):")
print(f"{'n':>4}{'tucker':>10}{'ht stored':>11}{'ht factored':>13}{'tt':>10}")
for size in (4, 8, 16, 32):
    print(f"{size:>4}"
          f"{ts.cost_formula_tucker(size, 4)[0]:>10}"
          f"{ts.cost_formula_hier1(size, 8)[0]:>11}"
          f"{ts.cost_formula_hier2(size, 4, 8)[0]:>13}"
          f"{ts.cost_formula_tt(size, 4, 8)[0]:>10}")

print("\nnormalized by the ambient dimension n^4:")
report = ts.cost_general(tt, "tt")
print(f"tt storage {report.storage_scalars} scalars -> {report.norm_storage:.4f} per ambient entry")
print(f"tt projection {report.projection_macs} macs -> {report.norm_projection:.4f} per ambient entry")
