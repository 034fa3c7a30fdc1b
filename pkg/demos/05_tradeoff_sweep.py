"""Error versus storage and projection cost, plus a learning curve.

Runs a small deterministic sweep over rank fractions for all three model
families on synthetic data, then a learning curve at fixed ranks.  The CSV
and JSON sidecar land in ./demo_out/; re-running the sidecar through the
CLI reproduces the CSV byte for byte:

    tensorspaces sweep --config demo_out/sweep.json --out demo_out/replay
"""

import tensorspaces as ts

config = ts.ExperimentConfig(
    synthetic=ts.SyntheticSpec(
        class_count=6,
        shape=(8, 8, 8),
        family="tt",
        leaf_rank=0.7,
        internal_rank=0.25,
        samples_per_class=16,
        noise_sigma=0.3,
    ),
    classes_per_run=3,
    repetitions=5,
    rank_fractions=[0.1, 0.25, 0.5, 0.75, 1.0],
    leaf_fraction=0.7,
    seed=99,
    out="demo_out/sweep",
)

rows = ts.run_rank_sweep(config)
csv_path, json_path = ts.emit_results(rows, config.out, config, "sweep")
print(f"sweep written to {csv_path} (sidecar {json_path})\n")

print(f"{'family':8}{'scheme':14}{'frac':>6}{'normStorage':>13}{'normProj':>11}{'meanErr':>9}")
for row in rows:
    print(f"{row.family:8}{row.scheme:14}{row.rank_fraction:>6.2f}"
          f"{row.norm_storage:>13.4f}{row.norm_projection:>11.2f}{row.mean_error:>9.3f}")

curve_config = ts.ExperimentConfig(
    synthetic=config.synthetic,
    classes_per_run=3,
    repetitions=5,
    rank_fractions=[0.5],
    train_sizes=[1, 2, 4, 8],
    leaf_fraction=0.7,
    seed=99,
    out="demo_out/curve",
)
curve = ts.run_learning_curve(curve_config)
ts.emit_results(curve, curve_config.out, curve_config, "learning-curve")

print("\nlearning curve (error by training samples per class):")
for family in ("tucker", "ht", "tt"):
    points = [
        f"m={row.samples_per_class}: {row.mean_error:.3f}"
        for row in curve
        if row.family == family and row.scheme in ("tucker", "materialized", "tt")
    ]
    print(f"  {family:7}", "  ".join(points))
