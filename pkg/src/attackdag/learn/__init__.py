from .svm import (
    DimensionMismatch,
    NonFiniteFeature,
    SingleClassData,
    SvmModel,
    SvmParams,
    as_arrays,
    fit_svm,
    full_alphas,
    gram_matrix,
    kernel_eval,
    kkt_violation,
    train_svm,
)
from .baselines import (
    EmptyData,
    GaussianNbModel,
    SgdSvmModel,
    TreeModel,
    hinge_objective,
    knn_predict,
    train_gnb,
    train_sgd_svm,
    train_tree,
)
from .evaluation import LengthMismatch, evaluate, format_reduction, search_space_reduction
from .gridsearch import CellResult, GridSpec, grid_search_min_fn

__all__ = [
    "CellResult",
    "DimensionMismatch",
    "EmptyData",
    "GaussianNbModel",
    "GridSpec",
    "LengthMismatch",
    "NonFiniteFeature",
    "SgdSvmModel",
    "SingleClassData",
    "SvmModel",
    "SvmParams",
    "TreeModel",
    "as_arrays",
    "evaluate",
    "fit_svm",
    "format_reduction",
    "full_alphas",
    "gram_matrix",
    "grid_search_min_fn",
    "hinge_objective",
    "kernel_eval",
    "kkt_violation",
    "knn_predict",
    "search_space_reduction",
    "train_gnb",
    "train_sgd_svm",
    "train_svm",
    "train_tree",
]
