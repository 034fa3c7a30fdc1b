"""Library persistence: JSON metadata plus one flat binary array file.

``save_library(lib, base)`` writes ``base.json`` and ``base.bin``.  The
JSON carries everything self-describing (family, scheme, shape, labels,
tree structure and ranks, and an array index of name/shape/offset
entries); the .bin file is the concatenation of all matrices as
little-endian float64 in C order.  Loading reproduces the arrays
bit-exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .classify import ClassLibrary
from .models import HTModel, TTModel, TuckerModel
from .trees import DimensionTree

__all__ = ["save_library", "load_library"]

FORMAT_NAME = "tensorspaces-library"
FORMAT_VERSION = 1

_DTYPE = np.dtype("<f8")


def _node_key(node):
    return "-".join(str(a) for a in node)


def _key_node(key):
    return tuple(int(a) for a in key.split("-"))


def _tree_to_meta(tree):
    return {
        "order": tree.order,
        "children": {
            _node_key(node): [list(left), list(right)]
            for node, (left, right) in sorted(tree.children.items())
        },
        "ranks": {_node_key(node): int(r) for node, r in sorted(tree.ranks.items())},
    }


def _tree_from_meta(meta):
    children = {
        _key_node(key): (tuple(left), tuple(right))
        for key, (left, right) in meta["children"].items()
    }
    ranks = {_key_node(key): int(r) for key, r in meta["ranks"].items()}
    return DimensionTree(order=int(meta["order"]), children=children, ranks=ranks)


class _ArrayWriter:
    def __init__(self):
        self.index = []
        self.chunks = []
        self.offset = 0

    def add(self, name, array):
        array = np.ascontiguousarray(array, dtype=np.float64)
        raw = array.astype(_DTYPE, copy=False).tobytes()
        self.index.append({"name": name, "shape": list(array.shape), "offset": self.offset})
        self.chunks.append(raw)
        self.offset += len(raw)


def save_library(lib, base_path):
    """Write ``base_path``.json and ``base_path``.bin; returns the JSON path."""
    base = Path(base_path)
    writer = _ArrayWriter()
    writer.add("centering", lib.centering)
    if lib.class_means is not None:
        for label in sorted(lib.class_means):
            writer.add(f"class_mean/{label}", lib.class_means[label])

    meta = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "family": lib.family,
        "scheme": lib.scheme,
        "shape": list(lib.shape),
        "labels": list(lib.labels),
        "per_class_centering": lib.class_means is not None,
        "dtype": _DTYPE.str,
    }

    first = lib.models[lib.labels[0]]
    if isinstance(first, TuckerModel):
        meta["model_kind"] = "tucker"
        for label in lib.labels:
            for axis, u in enumerate(lib.models[label].factor_bases):
                writer.add(f"model/{label}/factor/{axis}", u)
    else:
        meta["model_kind"] = "tt" if isinstance(first, TTModel) else "ht"
        meta["tree"] = _tree_to_meta(first.tree)
        for label in lib.labels:
            model = lib.models[label]
            for axis in sorted(model.leaf_bases):
                writer.add(f"model/{label}/leaf/{axis}", model.leaf_bases[axis])
            for node in sorted(model.node_bases):
                writer.add(f"model/{label}/node/{_node_key(node)}", model.node_bases[node])
            for node in sorted(model.transfer):
                writer.add(f"model/{label}/transfer/{_node_key(node)}", model.transfer[node])

    meta["arrays"] = writer.index
    json_path = base.with_suffix(".json")
    bin_path = base.with_suffix(".bin")
    json_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    bin_path.write_bytes(b"".join(writer.chunks))
    return json_path


def load_library(base_path):
    """Rebuild a :class:`ClassLibrary` written by :func:`save_library`."""
    base = Path(base_path)
    json_path = base if base.suffix == ".json" else base.with_suffix(".json")
    meta = json.loads(json_path.read_text())
    if meta.get("format") != FORMAT_NAME:
        raise ValueError(f"{json_path} is not a {FORMAT_NAME} file")
    raw = json_path.with_suffix(".bin").read_bytes()

    arrays = {}
    for entry in meta["arrays"]:
        shape = tuple(int(s) for s in entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = int(entry["offset"])
        flat = np.frombuffer(raw, dtype=_DTYPE, count=count, offset=start)
        arrays[entry["name"]] = flat.reshape(shape).astype(np.float64)

    shape = tuple(int(s) for s in meta["shape"])
    labels = list(meta["labels"])
    kind = meta["model_kind"]
    models = {}
    if kind == "tucker":
        for label in labels:
            factors = []
            axis = 0
            while f"model/{label}/factor/{axis}" in arrays:
                factors.append(arrays[f"model/{label}/factor/{axis}"])
                axis += 1
            models[label] = TuckerModel(shape=shape, factor_bases=tuple(factors))
    else:
        tree = _tree_from_meta(meta["tree"])
        cls = TTModel if kind == "tt" else HTModel
        prefix_nodes = [n for n in tree.children if n != tree.root]
        for label in labels:
            leaf_bases = {
                axis: arrays[f"model/{label}/leaf/{axis}"] for axis in range(tree.order)
            }
            node_bases = {
                node: arrays[f"model/{label}/node/{_node_key(node)}"]
                for node in prefix_nodes
            }
            transfer = {
                node: arrays[f"model/{label}/transfer/{_node_key(node)}"]
                for node in prefix_nodes
            }
            models[label] = cls(shape=shape, tree=tree, leaf_bases=leaf_bases,
                                node_bases=node_bases, transfer=transfer)

    class_means = None
    if meta.get("per_class_centering"):
        class_means = {label: arrays[f"class_mean/{label}"] for label in labels}
    return ClassLibrary(
        family=meta["family"],
        scheme=meta["scheme"],
        centering=arrays["centering"],
        models=models,
        class_means=class_means,
    )
