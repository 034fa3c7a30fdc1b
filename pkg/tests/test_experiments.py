import json

import pytest

from tensorspaces import (
    CSV_HEADER,
    ExperimentConfig,
    SyntheticSpec,
    emit_results,
    load_config,
    run_learning_curve,
    run_rank_sweep,
)


def orthogonal_config(**overrides):
    base = dict(
        synthetic=SyntheticSpec(
            class_count=4, shape=(8, 4, 4), family="ht",
            leaf_rank=2, internal_rank=3, samples_per_class=12,
            noise_sigma=0.0, orthogonal_classes=True,
        ),
        classes_per_run=2,
        repetitions=2,
        rank_fractions=(0.25, 0.5, 1.0),
        leaf_fraction=0.5,
        seed=21,
        out="unused",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_single_class_sweep_error_zero():
    cfg = orthogonal_config(
        classes_per_run=1, repetitions=1, rank_fractions=(1.0,),
        synthetic=SyntheticSpec(
            class_count=1, shape=(4, 4, 4), family="ht", leaf_rank=2,
            internal_rank=2, samples_per_class=6, noise_sigma=0.0,
        ),
    )
    rows = run_rank_sweep(cfg)
    assert all(r.mean_error == 0.0 for r in rows)


def test_orthogonal_sweep_zero_at_planted_fraction_and_above():
    # Planted leaf rank 2 of 8/4/4 axes; at leaf_fraction 0.5 the learner
    # leaves are at least the planted ranks, so fractions >= 0.5 of the
    # internal full rank must classify the noiseless classes exactly.
    # Exception: tucker at fraction 1.0 spans the whole ambient space, every
    # class scores identically and the argmax is no longer informative (that
    # degeneracy is the full-rank overfitting cliff the sweep exists to show).
    cfg = orthogonal_config()
    rows = run_rank_sweep(cfg)
    for r in rows:
        if r.rank_fraction < 0.5:
            continue
        if r.family == "tucker" and r.rank_fraction == 1.0:
            continue
        assert r.mean_error == 0.0, (r.family, r.scheme, r.rank_fraction)


def test_tucker_normalized_storage_symmetric():
    cfg = ExperimentConfig(
        synthetic=SyntheticSpec(
            class_count=2, shape=(6, 6, 6, 6), family="tucker",
            leaf_rank=2, internal_rank=2, samples_per_class=8, noise_sigma=0.1,
        ),
        classes_per_run=2, repetitions=1, rank_fractions=(0.5,),
        families=("tucker",), seed=3, out="unused",
    )
    rows = run_rank_sweep(cfg)
    (row,) = rows
    n, r = 6, 3  # fraction 0.5 of full leaf rank 6
    assert row.norm_storage == (4 * n * r) / n**4


def test_learning_curve_full_size_matches_sweep():
    cfg = orthogonal_config(rank_fractions=(0.5,))
    sweep = run_rank_sweep(cfg)
    curve_cfg = orthogonal_config(rank_fractions=(0.5,), train_sizes=(2, 6))
    curve = run_learning_curve(curve_cfg)
    full = [r for r in curve if r.samples_per_class == 6]
    assert len(full) == len(sweep)
    for a, b in zip(sweep, full):
        assert a.family == b.family and a.scheme == b.scheme
        assert a.per_rep_errors == b.per_rep_errors
        assert a.norm_storage == b.norm_storage
        assert a.norm_projection == b.norm_projection


def test_learning_curve_monotone_noiseless():
    cfg = orthogonal_config(rank_fractions=(0.5,), train_sizes=(2, 4, 6))
    rows = run_learning_curve(cfg)
    for family in ("tucker", "ht", "tt"):
        fam = [r for r in rows if r.family == family and r.scheme != "factored"]
        fam.sort(key=lambda r: r.samples_per_class)
        assert fam[-1].mean_error <= fam[0].mean_error


def test_learning_curve_clamp_recorded():
    cfg = orthogonal_config(rank_fractions=(1.0,), train_sizes=(1, 6),
                            families=("tt",))
    rows = run_learning_curve(cfg)
    small = [r for r in rows if r.samples_per_class == 1]
    assert small
    assert any(any(rep for rep in r.details["clamped"]) for r in small)
    big = [r for r in rows if r.samples_per_class == 6]
    assert all(not any(rep for rep in r.details["clamped"]) for r in big)


def test_learning_curve_size_validation():
    cfg = orthogonal_config(train_sizes=(7,))
    with pytest.raises(ValueError):
        run_learning_curve(cfg)
    with pytest.raises(ValueError):
        run_learning_curve(orthogonal_config(train_sizes=None))


def test_emit_results_golden_header_and_rerun(tmp_path):
    cfg = orthogonal_config(rank_fractions=(0.5, 1.0))
    rows = run_rank_sweep(cfg)
    csv_path, json_path = emit_results(rows, tmp_path / "run", cfg, "sweep")
    text = csv_path.read_text()
    lines = text.splitlines()
    assert lines[0] == (
        "family,scheme,rankFraction,leafFraction,samplesPerClass,"
        "normStorage,normProjection,meanError,stdError,seed"
    )
    assert CSV_HEADER == lines[0]
    assert len(lines) == 1 + len(rows)

    # sidecar reruns bit-identically
    cfg2, command = load_config(json_path)
    assert command == "sweep"
    rows2 = run_rank_sweep(cfg2)
    csv2, _ = emit_results(rows2, tmp_path / "rerun", cfg2, "sweep")
    assert csv2.read_bytes() == csv_path.read_bytes()

    payload = json.loads(json_path.read_text())
    assert payload["config"]["seed"] == cfg.seed
    assert len(payload["rows"]) == len(rows)
    assert payload["rows"][0]["per_rep_errors"] == rows[0].per_rep_errors


def test_emit_results_empty_rows(tmp_path):
    cfg = orthogonal_config()
    csv_path, _ = emit_results([], tmp_path / "empty", cfg, "sweep")
    assert csv_path.read_text() == CSV_HEADER + "\n"


def test_scheme_override_restricts_rows():
    cfg = orthogonal_config(scheme="tt", rank_fractions=(0.5,))
    rows = run_rank_sweep(cfg)
    assert rows and all(r.family == "tt" and r.scheme == "tt" for r in rows)


def test_ht_schemes_share_errors_differ_in_cost():
    cfg = orthogonal_config(families=("ht",), rank_fractions=(0.5,))
    rows = run_rank_sweep(cfg)
    assert {r.scheme for r in rows} == {"materialized", "factored"}
    a, b = rows
    assert a.per_rep_errors == b.per_rep_errors
    assert a.norm_storage != b.norm_storage


def test_freeze_split_keeps_split_fixed():
    # With the whole pool selected each repetition and the split frozen,
    # every repetition sees identical data, so errors repeat exactly even
    # on noisy inputs.
    spec = SyntheticSpec(
        class_count=4, shape=(8, 4, 4), family="ht", leaf_rank=2,
        internal_rank=3, samples_per_class=12, noise_sigma=1.5,
        orthogonal_classes=True,
    )
    cfg = orthogonal_config(synthetic=spec, freeze_split=True, classes_per_run=4,
                            rank_fractions=(0.5,), repetitions=3)
    rows = run_rank_sweep(cfg)
    for r in rows:
        assert len(set(r.per_rep_errors)) == 1


def test_sweep_from_dataset_directory(tmp_path):
    from tensorspaces import generate_synthetic, write_csv_dataset

    data = generate_synthetic(3, (6, 4, 4), "ht", {"leaf": 2, "internal": 3},
                              8, 0.05, seed=31)
    write_csv_dataset(data, tmp_path / "ds", seed=31)
    cfg = ExperimentConfig(
        dataset_path=str(tmp_path / "ds"),
        reshape_factors=[[6, 4], [4]],
        classes_per_run=2,
        repetitions=2,
        rank_fractions=(0.5,),
        leaf_fraction=0.5,
        families=("ht",),
        seed=31,
        out="unused",
    )
    rows = run_rank_sweep(cfg)
    assert {r.scheme for r in rows} == {"materialized", "factored"}
    assert all(0.0 <= r.mean_error <= 1.0 for r in rows)
    assert all(r.samples_per_class == 4 for r in rows)


def test_split_is_disjoint_and_exhaustive():
    import numpy as np

    from tensorspaces.experiments import _rep_split, acquire_dataset

    cfg = orthogonal_config(classes_per_run=3)
    data = acquire_dataset(cfg)
    for rep in range(3):
        chosen, train, test = _rep_split(data, cfg, rep)
        assert len(chosen) == 3
        for label in chosen:
            originals = data[label]
            pieces = train[label] + test[label]
            assert len(pieces) == len(originals)
            matched = [
                sum(np.array_equal(p, o) for p in pieces) for o in originals
            ]
            assert matched == [1] * len(originals)


def test_config_validation_and_dict_roundtrip():
    with pytest.raises(ValueError):
        ExperimentConfig()  # neither dataset_path nor synthetic
    with pytest.raises(ValueError):
        orthogonal_config(rank_fractions=(0.0,))
    with pytest.raises(ValueError):
        orthogonal_config(train_fraction=1.0)
    with pytest.raises(ValueError):
        orthogonal_config(families=("pca",))
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"bogus_key": 1})
    cfg = orthogonal_config()
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()
