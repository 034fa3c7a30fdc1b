"""Command-line entry point.

Subcommands: ``sweep``, ``learning-curve``, ``synth-gen``, ``train``,
``classify``, ``costs``.  Each takes ``--config <file>`` (a JSON config or
a results sidecar, which embeds one) plus ``--seed`` / ``--out`` overrides;
``--set key=value`` overrides any other config field (values parse as
JSON, falling back to a plain string).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .classify import classify as classify_point
from .classify import train_library
from .data import load_image_dataset, write_csv_dataset
from .experiments import (
    ExperimentConfig,
    acquire_dataset,
    emit_results,
    family_rank_config,
    load_config,
    run_learning_curve,
    run_rank_sweep,
)
from .serialize import load_library, save_library


def _parse_override(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"override {text!r} is not key=value")
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    return key, parsed


def _build_config(args, require=()):
    raw = {}
    command = None
    if args.config:
        cfg, command = load_config(args.config)
        raw = cfg.to_dict()
    for key, value in args.set or []:
        head, _, rest = key.partition(".")
        if rest:
            raw.setdefault(head, {})
            raw[head][rest] = value
        else:
            raw[head] = value
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out"] = args.out
    for key in require:
        if raw.get(key) is None:
            raise SystemExit(f"error: config is missing required field {key!r}")
    return ExperimentConfig.from_dict(raw), command


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file or results sidecar")
    parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    parser.add_argument("--out", default=None, help="override the output path")
    parser.add_argument(
        "--set", action="append", type=_parse_override, metavar="KEY=VALUE",
        help="override any config field (repeatable; value parsed as JSON)",
    )


def _cmd_sweep(args):
    config, _ = _build_config(args)
    rows = run_rank_sweep(config)
    csv_path, json_path = emit_results(rows, config.out, config, "sweep")
    print(f"wrote {csv_path} and {json_path} ({len(rows)} rows)")
    return 0


def _cmd_learning_curve(args):
    config, _ = _build_config(args)
    rows = run_learning_curve(config)
    csv_path, json_path = emit_results(rows, config.out, config, "learning-curve")
    print(f"wrote {csv_path} and {json_path} ({len(rows)} rows)")
    return 0


def _cmd_synth_gen(args):
    config, _ = _build_config(args, require=("synthetic",))
    data = acquire_dataset(config)
    spec = config.synthetic
    seed = spec.seed if spec.seed is not None else config.seed
    meta_path = write_csv_dataset(data, config.out, seed=seed,
                                  extra_meta={"family": spec.family})
    print(f"wrote dataset under {Path(config.out)} ({meta_path})")
    return 0


def _cmd_train(args):
    config, _ = _build_config(args)
    if args.data:
        if config.reshape_factors is None:
            raise SystemExit("error: training from images needs reshape_factors")
        data = load_image_dataset(args.data, config.reshape_factors)
    else:
        data = acquire_dataset(config)
    family = args.family or config.families[0]
    fraction = args.rank_fraction if args.rank_fraction is not None else config.rank_fractions[0]
    n_min = min(len(v) for v in data.values())
    shape = tuple(np.asarray(next(iter(data.values()))[0]).shape)
    rank_config = family_rank_config(family, shape, n_min, fraction, config.leaf_fraction)
    lib = train_library(
        data, family,
        ranks=rank_config.get("ranks"), tree=rank_config.get("tree"),
        per_class_centering=config.per_class_centering,
    )
    json_path = save_library(lib, config.out)
    print(f"trained {family} library on {len(data)} classes; wrote {json_path}")
    return 0


def _cmd_classify(args):
    lib = load_library(args.model)
    config, _ = _build_config(args) if args.config or args.set else (None, None)
    factors = None
    if config is not None and config.reshape_factors is not None:
        factors = config.reshape_factors
    root = Path(args.data)
    if factors is not None:
        data = load_image_dataset(root, factors)
    else:
        # CSV datasets written by synth-gen carry their factors in dataset.json.
        meta_file = root / "dataset.json"
        if not meta_file.exists():
            raise SystemExit("error: pass --config with reshape_factors or use a "
                             "dataset directory containing dataset.json")
        meta = json.loads(meta_file.read_text())
        data = load_image_dataset(root, meta["reshape_factors"])
    lines = ["path,trueLabel,predicted"]
    errors = 0
    total = 0
    for label in sorted(data):
        for k, tensor in enumerate(data[label]):
            predicted = classify_point(lib, tensor)
            lines.append(f"{label}/{k},{label},{predicted}")
            errors += predicted != label
            total += 1
    out = Path(args.out or "predictions.csv")
    out.write_text("\n".join(lines) + "\n")
    known = set(data) <= set(lib.labels)
    if known:
        print(f"wrote {out}; error rate {errors / total:.4f} over {total} points")
    else:
        print(f"wrote {out} ({total} points; true labels not all in library)")
    return 0


def _cmd_costs(args):
    """Cost table straight from shapes and ranks; no data is touched."""
    config, _ = _build_config(args)
    if config.synthetic is None:
        raise SystemExit("error: costs needs a synthetic spec for shape and sample count")
    from .classify import VALID_SCHEMES
    from .costs import cost_ht_counts, cost_tt_counts, cost_tucker_counts
    from .experiments import _fmt

    shape = config.synthetic.shape
    n_train = max(1, int(math.floor(
        config.synthetic.samples_per_class * config.train_fraction + 0.5)))
    ambient = math.prod(shape)
    lines = ["family,scheme,rankFraction,leafFraction,storage,projection,"
             "normStorage,normProjection"]
    for family in config.families:
        for fraction in config.rank_fractions:
            rank_config = family_rank_config(
                family, shape, n_train, fraction, config.leaf_fraction
            )
            if config.scheme is None:
                schemes = VALID_SCHEMES[family]
            elif config.scheme in VALID_SCHEMES[family]:
                schemes = (config.scheme,)
            else:
                schemes = ()
            for scheme in schemes:
                if family == "tucker":
                    storage, macs = cost_tucker_counts(shape, rank_config["ranks"])
                else:
                    tree = rank_config["tree"]
                    if scheme == "tt":
                        storage, macs = cost_tt_counts(shape, tree, tree.ranks)
                    else:
                        storage, macs = cost_ht_counts(shape, tree, tree.ranks, scheme)
                lines.append(",".join([
                    family, scheme, _fmt(fraction), _fmt(config.leaf_fraction),
                    str(storage), str(macs),
                    _fmt(storage / ambient), _fmt(macs / ambient),
                ]))
    out = Path(config.out).with_suffix(".csv")
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(lines) - 1} rows)")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="tensorspaces",
        description="Tensor-subspace models for classification with exact cost accounting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="rank-fraction sweep; writes CSV + JSON sidecar")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("learning-curve", help="error versus per-class training size")
    _add_common(p)
    p.set_defaults(func=_cmd_learning_curve)

    p = sub.add_parser("synth-gen", help="write a synthetic dataset as CSV matrices")
    _add_common(p)
    p.set_defaults(func=_cmd_synth_gen)

    p = sub.add_parser("train", help="train a class library and save it")
    _add_common(p)
    p.add_argument("--data", help="image/CSV dataset directory (default: config dataset)")
    p.add_argument("--family", choices=("tucker", "ht", "tt"))
    p.add_argument("--rank-fraction", type=float, default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("classify", help="classify a dataset with a saved library")
    _add_common(p)
    p.add_argument("--model", required=True, help="library base path (.json/.bin pair)")
    p.add_argument("--data", required=True, help="dataset directory")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("costs", help="storage/projection cost table without training")
    _add_common(p)
    p.set_defaults(func=_cmd_costs)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
