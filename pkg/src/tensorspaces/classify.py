"""Per-class subspace training and nearest-subspace classification.

One model per class, all sharing family, tree and rank configuration.  A
test point is centered with the training mean, projected onto every class
subspace, and labeled with the class of maximal projection energy
(squared Frobenius norm of the coefficients).  Ties break to the lowest
label so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import (
    learn_hierarchical,
    learn_tt,
    learn_tucker,
    project,
    projection_energy,
)
from .trees import assign_ranks, balanced_tree, full_node_rank, tt_tree, tucker_ranks

__all__ = [
    "FAMILIES",
    "DEFAULT_SCHEME",
    "VALID_SCHEMES",
    "ClassLibrary",
    "EvaluationResult",
    "train_library",
    "class_energies",
    "classify",
    "evaluate",
]

FAMILIES = ("tucker", "ht", "tt")

DEFAULT_SCHEME = {"tucker": "tucker", "ht": "materialized", "tt": "tt"}

VALID_SCHEMES = {
    "tucker": ("tucker",),
    "ht": ("materialized", "factored"),
    "tt": ("tt",),
}


@dataclass
class ClassLibrary:
    """Trained per-class models plus the shared centering tensor.

    ``class_means`` is only populated when the library was trained with
    per-class centering, in which case each class's own mean is subtracted
    before scoring against that class.
    """

    family: str
    scheme: str
    centering: np.ndarray
    models: dict
    class_means: dict | None = None

    @property
    def labels(self):
        return tuple(sorted(self.models))

    @property
    def shape(self):
        return tuple(self.centering.shape)


@dataclass
class EvaluationResult:
    """Error rate and confusion counts for one evaluation pass."""

    error_rate: float
    confusion: dict
    n_test: int
    per_run_rates: list = field(default_factory=list)

    def __post_init__(self):
        if not self.per_run_rates:
            self.per_run_rates = [self.error_rate]


def _check_family_scheme(family, scheme):
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if scheme is None:
        scheme = DEFAULT_SCHEME[family]
    if scheme not in VALID_SCHEMES[family]:
        raise ValueError(f"scheme {scheme!r} is not valid for family {family!r}")
    return scheme


def _validate_ranks_feasible(family, shape, ranks_or_tree, class_sizes):
    n_min = min(class_sizes.values())
    if family == "tucker":
        for axis, r in enumerate(ranks_or_tree):
            cap = full_node_rank((axis,), shape, n_min)
            if r > cap:
                raise ValueError(
                    f"rank {r} on axis {axis} infeasible with {n_min} samples (max {cap})"
                )
    else:
        tree = ranks_or_tree
        for node in tree.nodes:
            if node == tree.root:
                continue
            cap = full_node_rank(node, shape, n_min)
            if tree.rank(node) > cap:
                raise ValueError(
                    f"rank {tree.rank(node)} on node {node} infeasible with "
                    f"{n_min} samples (max {cap})"
                )


def train_library(data, family, *, ranks=None, tree=None, scheme=None,
                  per_class_centering=False):
    """Train one subspace model per class.

    ``data`` maps label -> list of equally shaped tensors.  For the tucker
    family ``ranks`` is a per-axis list, an int, or a fraction of full rank;
    for ht/tt either pass a tree that already carries ranks or a
    ``{"leaf": spec, "internal": spec}`` dict resolved against the smallest
    class's training count.  Rank infeasibility raises; nothing is clamped
    here.  Centering is the global mean of all training samples unless
    ``per_class_centering`` is set.
    """
    scheme = _check_family_scheme(family, scheme)
    if not data:
        raise ValueError("no training classes given")
    labels = sorted(data)
    samples_by_class = {}
    shape = None
    for label in labels:
        samples = [np.asarray(s, dtype=np.float64) for s in data[label]]
        if not samples:
            raise ValueError(f"class {label!r} has no training samples")
        for s in samples:
            if shape is None:
                shape = s.shape
            elif s.shape != shape:
                raise ValueError(f"class {label!r} sample shape {s.shape} != {shape}")
        samples_by_class[label] = samples
    class_sizes = {label: len(v) for label, v in samples_by_class.items()}
    n_min = min(class_sizes.values())

    if family == "tucker":
        resolved = tucker_ranks(shape, n_min, ranks if ranks is not None else 1.0)
    else:
        if tree is None:
            tree = tt_tree(len(shape)) if family == "tt" else balanced_tree(len(shape))
        if not tree.has_complete_ranks():
            spec = ranks if ranks is not None else {}
            resolved_tree = assign_ranks(
                tree, shape, n_min,
                leaf=spec.get("leaf", 1.0), internal=spec.get("internal", 1.0),
            )
        else:
            resolved_tree = tree
        resolved = resolved_tree

    _validate_ranks_feasible(family, shape, resolved, class_sizes)

    all_samples = [s for label in labels for s in samples_by_class[label]]
    centering = np.mean(np.stack(all_samples, axis=-1), axis=-1)
    class_means = None
    if per_class_centering:
        class_means = {
            label: np.mean(np.stack(samples_by_class[label], axis=-1), axis=-1)
            for label in labels
        }

    models = {}
    for label in labels:
        mean = class_means[label] if per_class_centering else centering
        centered = [s - mean for s in samples_by_class[label]]
        if family == "tucker":
            models[label] = learn_tucker(centered, resolved)
        elif family == "tt":
            models[label] = learn_tt(centered, resolved)
        else:
            models[label] = learn_hierarchical(centered, resolved)
    return ClassLibrary(
        family=family,
        scheme=scheme,
        centering=centering,
        models=models,
        class_means=class_means,
    )


def class_energies(lib, x):
    """Projection energy of the centered input against every class model."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != lib.shape:
        raise ValueError(f"input shape {x.shape} does not match library shape {lib.shape}")
    energies = {}
    for label in lib.labels:
        mean = lib.class_means[label] if lib.class_means is not None else lib.centering
        energies[label] = projection_energy(project(lib.models[label], x - mean))
    return energies


def classify(lib, x):
    """Label of maximal projection energy; ties go to the lowest label."""
    energies = class_energies(lib, x)
    best_label = None
    best = -np.inf
    for label in lib.labels:  # ascending, so strict improvement keeps the lowest
        if energies[label] > best:
            best = energies[label]
            best_label = label
    return best_label


def evaluate(lib, test_data):
    """Error rate and confusion counts over a labeled test set."""
    if not test_data or not any(len(v) for v in test_data.values()):
        raise ValueError("empty test set")
    unknown = set(test_data) - set(lib.labels)
    if unknown:
        raise ValueError(f"test labels {sorted(unknown)} not in library")
    confusion = {}
    errors = 0
    total = 0
    for label in sorted(test_data):
        for x in test_data[label]:
            predicted = classify(lib, x)
            confusion[(label, predicted)] = confusion.get((label, predicted), 0) + 1
            errors += predicted != label
            total += 1
    return EvaluationResult(error_rate=errors / total, confusion=confusion, n_test=total)
