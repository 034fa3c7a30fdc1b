"""Tensor-subspace models for classification with exact cost accounting.

The package learns Tucker, hierarchical (tree-structured) and tensor-train
subspace models from labeled tensor data, classifies by maximal projection
energy, and counts storage and projection costs exactly.  See the README
for a tour; the ``demos/`` scripts walk each capability.
"""

from .core import (
    complement_axes,
    fold,
    frobenius_norm,
    kron,
    normalize_axes,
    reshape,
    unfold,
    vectorize,
)
from .linalg import SVDResult, effective_rank, orthonormality_defect, truncated_svd
from .trees import (
    DimensionTree,
    assign_ranks,
    balanced_tree,
    full_node_rank,
    resolve_rank,
    tt_tree,
    tucker_ranks,
)
from .models import (
    HTModel,
    TTModel,
    TuckerModel,
    build_node_basis,
    is_tt_shaped,
    learn_hierarchical,
    learn_tt,
    learn_tucker,
    project,
    project_ht_factored,
    project_ht_materialized,
    project_tt,
    project_tucker,
    projection_energy,
    projection_residual,
    random_ht_model,
    random_orthonormal,
    random_tucker_model,
    reconstruct,
    reconstruct_ht,
    reconstruct_tucker,
)
from .costs import (
    SCHEME_FACTORED,
    SCHEME_MATERIALIZED,
    SCHEME_TT,
    SCHEME_TUCKER,
    CostReport,
    cost_formula_hier1,
    cost_formula_hier2,
    cost_formula_tt,
    cost_formula_tucker,
    cost_general,
)
from .classify import (
    ClassLibrary,
    EvaluationResult,
    class_energies,
    classify,
    evaluate,
    train_library,
)
from .data import generate_synthetic, load_image_dataset, write_csv_dataset
from .seeding import rng_for, stream_key
from .serialize import load_library, save_library
from .experiments import (
    CSV_HEADER,
    ExperimentConfig,
    ResultRow,
    SyntheticSpec,
    acquire_dataset,
    emit_results,
    load_config,
    run_learning_curve,
    run_rank_sweep,
)

__version__ = "0.1.0"
