"""Experiment harness: rank sweeps, learning curves, CSV/JSON emission.

A run is driven by an :class:`ExperimentConfig`.  Per repetition the
harness draws a subset of classes from the pool, splits each class into
train/test halves, trains one library per (family, rank fraction) cell and
evaluates it; cells are aggregated over repetitions into
:class:`ResultRow` entries.  Every random choice comes from a named
Philox stream derived from the master seed (see
:mod:`tensorspaces.seeding`), so cells are order-independent and a config
re-runs bit-identically; the CSV written by :func:`emit_results` is
byte-stable and the JSON sidecar carries everything needed to re-run.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .classify import FAMILIES, VALID_SCHEMES, train_library, evaluate
from .costs import cost_general
from .data import generate_synthetic, load_image_dataset
from .seeding import rng_for
from .trees import assign_ranks, balanced_tree, full_node_rank, tt_tree, tucker_ranks

__all__ = [
    "CSV_HEADER",
    "SyntheticSpec",
    "ExperimentConfig",
    "ResultRow",
    "acquire_dataset",
    "family_rank_config",
    "run_rank_sweep",
    "run_learning_curve",
    "emit_results",
    "load_config",
]

CSV_HEADER = (
    "family,scheme,rankFraction,leafFraction,samplesPerClass,"
    "normStorage,normProjection,meanError,stdError,seed"
)

DEFAULT_RANK_FRACTIONS = tuple(k / 10 for k in range(1, 11))

RESULTS_FORMAT = "tensorspaces-results"


@dataclass
class SyntheticSpec:
    """Parameters of the synthetic dataset generator."""

    class_count: int = 18
    shape: tuple = (8, 8, 8, 8)
    family: str = "tt"
    leaf_rank: float = 0.7
    internal_rank: float = 0.25
    samples_per_class: int = 24
    noise_sigma: float = 0.3
    orthogonal_classes: bool = False
    seed: int | None = None

    def __post_init__(self):
        self.shape = tuple(int(s) for s in self.shape)
        if self.family not in FAMILIES:
            raise ValueError(f"unknown synthetic family {self.family!r}")


@dataclass
class ExperimentConfig:
    """Everything a sweep or learning-curve run needs.

    Exactly one of ``dataset_path`` (image directory plus
    ``reshape_factors``) and ``synthetic`` must be set.  ``rank_fractions``
    drives the sweep; hierarchical families keep their leaves at
    ``leaf_fraction`` of full rank and sweep the internal rank, while the
    tucker family sweeps every axis.  ``train_sizes`` (per-class training
    sizes) is only used by learning curves.
    """

    dataset_path: str | None = None
    reshape_factors: list | None = None
    synthetic: SyntheticSpec | None = None
    classes_per_run: int = 4
    train_fraction: float = 0.5
    repetitions: int = 10
    families: tuple = FAMILIES
    scheme: str | None = None
    rank_fractions: tuple = DEFAULT_RANK_FRACTIONS
    leaf_fraction: float = 0.7
    train_sizes: tuple | None = None
    freeze_split: bool = False
    per_class_centering: bool = False
    seed: int = 0
    out: str = "results"

    def __post_init__(self):
        if isinstance(self.synthetic, dict):
            self.synthetic = SyntheticSpec(**self.synthetic)
        self.families = tuple(self.families)
        self.rank_fractions = tuple(float(f) for f in self.rank_fractions)
        if self.train_sizes is not None:
            self.train_sizes = tuple(int(m) for m in self.train_sizes)
        if self.dataset_path is None and self.synthetic is None:
            raise ValueError("config needs dataset_path or synthetic")
        for fam in self.families:
            if fam not in FAMILIES:
                raise ValueError(f"unknown family {fam!r}")
        if not self.families:
            raise ValueError("families must be non-empty")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.classes_per_run < 1:
            raise ValueError("classes_per_run must be >= 1")
        if not self.rank_fractions:
            raise ValueError("rank_fractions must be non-empty")
        for f in self.rank_fractions:
            if not 0.0 < f <= 1.0:
                raise ValueError(f"rank fraction {f} must lie in (0, 1]")
        if self.scheme is not None:
            if not any(self.scheme in VALID_SCHEMES[fam] for fam in self.families):
                raise ValueError(f"scheme {self.scheme!r} fits none of {self.families}")

    def to_dict(self):
        d = asdict(self)
        d["families"] = list(self.families)
        d["rank_fractions"] = list(self.rank_fractions)
        if self.train_sizes is not None:
            d["train_sizes"] = list(self.train_sizes)
        if self.synthetic is not None:
            d["synthetic"] = asdict(self.synthetic)
            d["synthetic"]["shape"] = list(self.synthetic.shape)
        return d

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class ResultRow:
    """One aggregated sweep cell; ``details`` goes to the JSON sidecar only."""

    family: str
    scheme: str
    rank_fraction: float
    leaf_fraction: float
    samples_per_class: int
    norm_storage: float
    norm_projection: float
    mean_error: float
    std_error: float
    per_rep_errors: list
    seed: int
    details: dict = field(default_factory=dict)


def acquire_dataset(config):
    """Load the image dataset or generate the synthetic one."""
    if config.dataset_path is not None:
        if config.reshape_factors is None:
            raise ValueError("image datasets need reshape_factors")
        return load_image_dataset(config.dataset_path, config.reshape_factors)
    spec = config.synthetic
    seed = spec.seed if spec.seed is not None else config.seed
    return generate_synthetic(
        spec.class_count,
        spec.shape,
        spec.family,
        {"leaf": spec.leaf_rank, "internal": spec.internal_rank},
        spec.samples_per_class,
        spec.noise_sigma,
        seed,
        orthogonal_classes=spec.orthogonal_classes,
    )


def _schemes_for(family, override):
    if override is not None:
        return (override,) if override in VALID_SCHEMES[family] else ()
    return VALID_SCHEMES[family]


def _rep_split(data, config, rep):
    """Choose classes and split each into train/test, all from named streams."""
    pool = sorted(data)
    if config.classes_per_run > len(pool):
        raise ValueError(
            f"classes_per_run {config.classes_per_run} exceeds pool of {len(pool)}"
        )
    sel = rng_for(config.seed, "select", rep)
    idx = sel.choice(len(pool), size=config.classes_per_run, replace=False)
    chosen = sorted(pool[int(i)] for i in idx)
    split_rep = 0 if config.freeze_split else rep
    train, test = {}, {}
    for label in chosen:
        samples = data[label]
        n = len(samples)
        if n < 2:
            raise ValueError(f"class {label!r} has {n} sample(s); cannot split")
        n_train = min(max(int(math.floor(n * config.train_fraction + 0.5)), 1), n - 1)
        perm = rng_for(config.seed, "split", split_rep, label).permutation(n)
        train_idx = sorted(int(i) for i in perm[:n_train])
        test_idx = sorted(int(i) for i in perm[n_train:])
        train[label] = [samples[i] for i in train_idx]
        test[label] = [samples[i] for i in test_idx]
    return chosen, train, test


def family_rank_config(family, shape, n_train, fraction, leaf_fraction):
    """Resolve the swept rank spec into concrete per-node/per-axis ranks."""
    if family == "tucker":
        return {"ranks": tucker_ranks(shape, n_train, float(fraction))}
    tree = tt_tree(len(shape)) if family == "tt" else balanced_tree(len(shape))
    tree = assign_ranks(tree, shape, n_train, leaf=leaf_fraction, internal=float(fraction))
    return {"tree": tree}


def _rank_details(family, rank_config):
    if family == "tucker":
        return {"ranks": list(rank_config["ranks"])}
    tree = rank_config["tree"]
    return {"ranks": {"-".join(map(str, k)): int(v) for k, v in sorted(tree.ranks.items())}}


def _clamp_rank_config(family, rank_config, shape, m):
    """Clamp ranks to what ``m`` samples per class can support."""
    events = []
    if family == "tucker":
        clamped = []
        for axis, r in enumerate(rank_config["ranks"]):
            cap = full_node_rank((axis,), shape, m)
            clamped.append(min(r, cap))
            if cap < r:
                events.append({"node": str(axis), "requested": int(r), "clamped": int(cap)})
        return {"ranks": clamped}, events
    tree = rank_config["tree"]
    ranks = {}
    for node in tree.nodes:
        if node == tree.root:
            continue
        cap = full_node_rank(node, shape, m)
        r = tree.rank(node)
        ranks[node] = min(r, cap)
        if cap < r:
            events.append({
                "node": "-".join(map(str, node)),
                "requested": int(r),
                "clamped": int(cap),
            })
    return {"tree": tree.with_ranks(ranks)}, events


def _train_and_score(train, test, family, rank_config, config):
    lib = train_library(
        train,
        family,
        ranks=rank_config.get("ranks"),
        tree=rank_config.get("tree"),
        per_class_centering=config.per_class_centering,
    )
    result = evaluate(lib, test)
    reference_model = lib.models[sorted(lib.models)[0]]
    costs = {
        scheme: cost_general(reference_model, scheme)
        for scheme in _schemes_for(family, config.scheme)
    }
    return result, costs


def _aggregate(cells, order, config):
    rows = []
    for key in order:
        family, scheme, fraction, m = key
        reps = cells[key]
        errors = [rep["error"] for rep in reps]
        rows.append(
            ResultRow(
                family=family,
                scheme=scheme,
                rank_fraction=float(fraction),
                leaf_fraction=float(config.leaf_fraction),
                samples_per_class=int(min(rep["n_train"] for rep in reps)),
                norm_storage=float(np.mean([rep["norm_storage"][scheme] for rep in reps])),
                norm_projection=float(np.mean([rep["norm_projection"][scheme] for rep in reps])),
                mean_error=float(np.mean(errors)),
                std_error=float(np.std(errors)),
                per_rep_errors=[float(e) for e in errors],
                seed=int(config.seed),
                details={
                    "train_size": m,
                    "ranks": reps[0]["ranks"],
                    "clamped": [rep["clamps"] for rep in reps],
                },
            )
        )
    return rows


def run_rank_sweep(config):
    """Sweep rank fractions for every family; one averaged row per cell.

    Hierarchical-family rows are emitted once per projection scheme; the
    error columns coincide (the schemes compute the same coefficients) and
    only the cost columns differ.
    """
    data = acquire_dataset(config)
    shape = tuple(np.asarray(next(iter(data.values()))[0]).shape)
    cells = {}
    for rep in range(config.repetitions):
        _, train, test = _rep_split(data, config, rep)
        n_train = min(len(v) for v in train.values())
        for family in config.families:
            if not _schemes_for(family, config.scheme):
                continue
            for fraction in config.rank_fractions:
                rank_config = family_rank_config(
                    family, shape, n_train, fraction, config.leaf_fraction
                )
                result, costs = _train_and_score(train, test, family, rank_config, config)
                for scheme, report in costs.items():
                    key = (family, scheme, fraction, None)
                    cells.setdefault(key, []).append({
                        "error": result.error_rate,
                        "n_train": n_train,
                        "norm_storage": {scheme: report.norm_storage},
                        "norm_projection": {scheme: report.norm_projection},
                        "ranks": _rank_details(family, rank_config)["ranks"],
                        "clamps": [],
                    })
    ordered = [
        (family, scheme, fraction, None)
        for family in config.families
        for fraction in config.rank_fractions
        for scheme in _schemes_for(family, config.scheme)
        if (family, scheme, fraction, None) in cells
    ]
    return _aggregate(cells, ordered, config)


def run_learning_curve(config):
    """Vary the per-class training size at fixed rank configuration.

    Ranks are resolved once against the full training half (so model
    capacity is constant along the curve) and clamped per size to what the
    subsample can support; clamps are recorded in the row details.  The
    test half stays fixed within a repetition.
    """
    if not config.train_sizes:
        raise ValueError("learning curves need train_sizes")
    data = acquire_dataset(config)
    shape = tuple(np.asarray(next(iter(data.values()))[0]).shape)
    cells = {}
    for rep in range(config.repetitions):
        _, train, test = _rep_split(data, config, rep)
        n_full = min(len(v) for v in train.values())
        for m in config.train_sizes:
            if m < 1 or m > n_full:
                raise ValueError(
                    f"training size {m} exceeds available {n_full} samples per class"
                )
            sub_train = {}
            for label in sorted(train):
                perm = rng_for(config.seed, "subsample", rep, m, label).permutation(
                    len(train[label])
                )
                keep = sorted(int(i) for i in perm[:m])
                sub_train[label] = [train[label][i] for i in keep]
            for family in config.families:
                if not _schemes_for(family, config.scheme):
                    continue
                for fraction in config.rank_fractions:
                    requested = family_rank_config(
                        family, shape, n_full, fraction, config.leaf_fraction
                    )
                    rank_config, clamps = _clamp_rank_config(family, requested, shape, m)
                    result, costs = _train_and_score(
                        sub_train, test, family, rank_config, config
                    )
                    for scheme, report in costs.items():
                        key = (family, scheme, fraction, m)
                        cells.setdefault(key, []).append({
                            "error": result.error_rate,
                            "n_train": m,
                            "norm_storage": {scheme: report.norm_storage},
                            "norm_projection": {scheme: report.norm_projection},
                            "ranks": _rank_details(family, rank_config)["ranks"],
                            "clamps": clamps,
                        })
    ordered = [
        (family, scheme, fraction, m)
        for family in config.families
        for fraction in config.rank_fractions
        for m in config.train_sizes
        for scheme in _schemes_for(family, config.scheme)
        if (family, scheme, fraction, m) in cells
    ]
    return _aggregate(cells, ordered, config)


def _fmt(x):
    return format(float(x), ".12g")


def emit_results(rows, out_base, config, command):
    """Write ``<out_base>.csv`` and the JSON sidecar; returns both paths.

    The CSV column order is fixed; floats print with 12 significant
    digits, so identical rows give identical bytes.  The sidecar holds the
    resolved config, the command, and per-row details (per-repetition
    errors, resolved ranks, clamp events) sufficient to re-run the exact
    experiment.
    """
    base = Path(out_base)
    if base.parent != Path("."):
        base.parent.mkdir(parents=True, exist_ok=True)
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join([
            row.family,
            row.scheme,
            _fmt(row.rank_fraction),
            _fmt(row.leaf_fraction),
            str(int(row.samples_per_class)),
            _fmt(row.norm_storage),
            _fmt(row.norm_projection),
            _fmt(row.mean_error),
            _fmt(row.std_error),
            str(int(row.seed)),
        ]))
    csv_path = base.with_suffix(".csv")
    csv_path.write_text("\n".join(lines) + "\n")

    payload = {
        "format": RESULTS_FORMAT,
        "version": 1,
        "command": command,
        "config": config.to_dict(),
        "rows": [
            {
                "family": row.family,
                "scheme": row.scheme,
                "rank_fraction": row.rank_fraction,
                "leaf_fraction": row.leaf_fraction,
                "samples_per_class": row.samples_per_class,
                "norm_storage": row.norm_storage,
                "norm_projection": row.norm_projection,
                "mean_error": row.mean_error,
                "std_error": row.std_error,
                "per_rep_errors": row.per_rep_errors,
                "seed": row.seed,
                "details": row.details,
            }
            for row in rows
        ],
    }
    json_path = base.with_suffix(".json")
    json_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


def load_config(path):
    """Read a config file or a results sidecar; returns (config, command|None)."""
    obj = json.loads(Path(path).read_text())
    if isinstance(obj, dict) and obj.get("format") == RESULTS_FORMAT:
        return ExperimentConfig.from_dict(obj["config"]), obj.get("command")
    return ExperimentConfig.from_dict(obj), None
