"""Dataset ingestion and synthetic generation.

Image datasets live in a ``root/<label>/<file>`` layout.  Two file formats
are read: binary 8-bit PGM (P5) and plain CSV matrices.  Each image is a
2-D array that gets reshaped to a higher-order tensor by factoring the row
and column sizes, e.g. a 486 x 640 image with factors ``[[18, 27],
[32, 20]]`` becomes an 18 x 27 x 32 x 20 tensor (row factors first, then
column factors; plain C-order reshape under the package linearization).

The synthetic generator draws one random subspace model per class and
emits ``samples = model(random coefficients) + noise``; signals are
normalized to unit Frobenius norm and the noise term has Frobenius norm
exactly ``noise_sigma``, so sigma is the noise-to-signal ratio.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from PIL import Image

from .models import (
    random_ht_model,
    random_orthonormal,
    random_tucker_model,
    reconstruct,
)
from .seeding import rng_for
from .trees import balanced_tree, resolve_rank, tt_tree

__all__ = [
    "load_image_dataset",
    "generate_synthetic",
    "write_csv_dataset",
    "synthetic_labels",
]

_SUPPORTED_SUFFIXES = (".pgm", ".csv")


def _read_pgm(path):
    with Image.open(path) as img:
        if img.mode != "L":
            raise ValueError(f"{path}: only 8-bit grayscale PGM is supported")
        return np.asarray(img, dtype=np.float64) / 255.0


def _read_csv(path):
    arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return arr


def _check_factors(reshape_factors, image_shape):
    try:
        row_factors, col_factors = reshape_factors
        row_factors = [int(f) for f in row_factors]
        col_factors = [int(f) for f in col_factors]
    except (TypeError, ValueError) as exc:
        raise ValueError(
            "reshape_factors must be two lists of integers, [row factors, column factors]"
        ) from exc
    if not row_factors or not col_factors:
        raise ValueError("reshape factor lists must be non-empty")
    rows, cols = image_shape
    if math.prod(row_factors) != rows:
        raise ValueError(f"row factors {row_factors} do not multiply to {rows}")
    if math.prod(col_factors) != cols:
        raise ValueError(f"column factors {col_factors} do not multiply to {cols}")
    return row_factors, col_factors


def load_image_dataset(path, reshape_factors):
    """Load ``root/<label>/<file>`` into a dict label -> list of tensors.

    PGM pixel values are scaled to [0, 1]; CSV values are used verbatim.
    All images must share one size, and the reshape factors must multiply
    to that size.
    """
    root = Path(path)
    if not root.is_dir():
        raise ValueError(f"{root} is not a directory")
    labels = sorted(d.name for d in root.iterdir() if d.is_dir())
    if not labels:
        raise ValueError(f"{root} contains no class subdirectories")
    data = {}
    expected = None
    factors = None
    for label in labels:
        files = sorted(
            f for f in (root / label).iterdir()
            if f.is_file() and f.suffix.lower() in _SUPPORTED_SUFFIXES
        )
        if not files:
            raise ValueError(f"class directory {root / label} has no .pgm or .csv files")
        samples = []
        for f in files:
            img = _read_pgm(f) if f.suffix.lower() == ".pgm" else _read_csv(f)
            if expected is None:
                expected = img.shape
                factors = _check_factors(reshape_factors, expected)
            elif img.shape != expected:
                raise ValueError(f"{f}: image size {img.shape} != {expected}")
            row_factors, col_factors = factors
            samples.append(img.reshape(tuple(row_factors) + tuple(col_factors)))
        data[label] = samples
    return data


def synthetic_labels(class_count):
    return [f"class{i:02d}" for i in range(int(class_count))]


def _planted_ht_tree(shape, family, leaf_spec, internal_spec):
    order = len(shape)
    tree = tt_tree(order) if family == "tt" else balanced_tree(order)
    ranks = {}
    for node in tree.bottom_up():
        if len(node) == 1:
            ranks[node] = resolve_rank(leaf_spec, shape[node[0]])
        else:
            left, right = tree.children[node]
            ceiling = ranks[left] * ranks[right]
            ranks[node] = resolve_rank(internal_spec, ceiling)
    return tree.with_ranks(ranks)


def _planted_model(shape, family, planted_ranks, rng, axis0_basis=None):
    leaf_spec = planted_ranks.get("leaf", 1.0)
    internal_spec = planted_ranks.get("internal", 1.0)
    if family == "tucker":
        ranks = [resolve_rank(leaf_spec, dim) for dim in shape]
        model = random_tucker_model(shape, ranks, rng)
        if axis0_basis is not None:
            model = type(model)(shape=model.shape,
                                factor_bases=(axis0_basis,) + model.factor_bases[1:])
        return model
    tree = _planted_ht_tree(shape, family, leaf_spec, internal_spec)
    model = random_ht_model(shape, tree, rng)
    if axis0_basis is not None:
        # Redraw with the pinned axis-0 leaf: rebuild bottom-up so node bases stay consistent.
        leaf_bases = dict(model.leaf_bases)
        leaf_bases[0] = axis0_basis
        node_bases = {}
        stored = lambda n: leaf_bases[n[0]] if len(n) == 1 else node_bases[n]
        for node in tree.bottom_up():
            if len(node) > 1:
                left, right = tree.children[node]
                node_bases[node] = np.kron(stored(left), stored(right)) @ model.transfer[node]
        model = type(model)(shape=model.shape, tree=tree, leaf_bases=leaf_bases,
                            node_bases=node_bases, transfer=dict(model.transfer))
    return model


def _coefficient_shape(model):
    from .models import TuckerModel

    if isinstance(model, TuckerModel):
        return tuple(model.ranks)
    s1, s2 = model.root_children
    return (model.basis(s1).shape[1], model.basis(s2).shape[1])


def generate_synthetic(class_count, shape, family, planted_ranks, samples_per_class,
                       noise_sigma, seed, orthogonal_classes=False, return_models=False):
    """Labeled synthetic tensors from per-class random subspace models.

    ``planted_ranks`` is ``{"leaf": spec, "internal": spec}`` where each
    spec is an absolute rank or a fraction of the generator ceiling (axis
    size for leaves, product of children ranks for internal nodes).  With
    ``orthogonal_classes`` the classes draw their axis-0 leaf bases from
    disjoint column blocks of one orthonormal matrix, which makes the class
    subspaces mutually orthogonal.  Deterministic given ``seed``.
    """
    shape = tuple(int(s) for s in shape)
    class_count = int(class_count)
    samples_per_class = int(samples_per_class)
    noise_sigma = float(noise_sigma)
    if class_count < 1 or samples_per_class < 1:
        raise ValueError("need at least one class and one sample per class")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    labels = synthetic_labels(class_count)

    axis0_blocks = None
    if orthogonal_classes:
        leaf_spec = planted_ranks.get("leaf", 1.0)
        r0 = resolve_rank(leaf_spec, shape[0])
        if class_count * r0 > shape[0]:
            raise ValueError(
                f"orthogonal classes need axis 0 size >= classes * leaf rank "
                f"({class_count} * {r0} > {shape[0]})"
            )
        block = random_orthonormal(shape[0], class_count * r0, rng_for(seed, "orth"))
        axis0_blocks = [block[:, c * r0:(c + 1) * r0] for c in range(class_count)]

    data = {}
    models = {}
    for c, label in enumerate(labels):
        rng = rng_for(seed, "class", c)
        axis0 = axis0_blocks[c] if axis0_blocks is not None else None
        model = _planted_model(shape, family, planted_ranks, rng, axis0_basis=axis0)
        models[label] = model
        coeff_shape = _coefficient_shape(model)
        samples = []
        for _ in range(samples_per_class):
            signal = reconstruct(model, rng.standard_normal(coeff_shape))
            signal = signal / np.sqrt(np.sum(np.square(signal)))
            noise = rng.standard_normal(shape)
            noise = noise / np.sqrt(np.sum(np.square(noise)))
            samples.append(signal + noise_sigma * noise)
        data[label] = samples
    if return_models:
        return data, models
    return data


def default_matrix_factors(shape):
    """Split a tensor shape into [row factors, column factors] halves."""
    shape = [int(s) for s in shape]
    cut = (len(shape) + 1) // 2
    return [shape[:cut], shape[cut:]]


def write_csv_dataset(data, out_dir, seed=None, extra_meta=None):
    """Write tensors as CSV matrices in the loader's directory layout.

    Each tensor is flattened to a matrix whose rows combine the first half
    of the axes (C order), so loading the files back with the recorded
    ``reshape_factors`` reproduces the tensors exactly.  A ``dataset.json``
    records shape, factors and labels.
    """
    if not data or not any(len(v) for v in data.values()):
        raise ValueError("nothing to write: empty dataset")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    shape = None
    for label in sorted(data):
        class_dir = out / label
        class_dir.mkdir(parents=True, exist_ok=True)
        for k, tensor in enumerate(data[label]):
            tensor = np.asarray(tensor, dtype=np.float64)
            if shape is None:
                shape = tensor.shape
                factors = default_matrix_factors(shape)
            matrix = tensor.reshape(math.prod(factors[0]), math.prod(factors[1]))
            np.savetxt(class_dir / f"sample{k:04d}.csv", matrix, fmt="%.17g", delimiter=",")
    meta = {
        "shape": list(shape),
        "reshape_factors": factors,
        "labels": sorted(data),
        "samples_per_label": {label: len(v) for label, v in sorted(data.items())},
    }
    if seed is not None:
        meta["seed"] = int(seed)
    if extra_meta:
        meta.update(extra_meta)
    (out / "dataset.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return out / "dataset.json"
