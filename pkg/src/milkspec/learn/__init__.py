from milkspec.learn.cluster import ClusterResult, cluster_validate, kmeans, silhouette
from milkspec.learn.grid import GridPoint, GridSearchResult, grid_search
from milkspec.learn.knn import KnnClassifier
from milkspec.learn.linear import LinearSvmClassifier
from milkspec.learn.metrics import (
    ClassificationReport,
    classification_report,
    confusion_matrix,
    render_report_text,
    report_to_dict,
)
from milkspec.learn.mlp import MlpClassifier, mlp_gradient
from milkspec.learn.models import KINDS, ModelSpec, fit_model, predict
from milkspec.learn.rng import SplitMix64, seeded_rng
from milkspec.learn.scaling import Standardizer
from milkspec.learn.split import SplitSpec, split_indices, stratified_folds, train_test_split
from milkspec.learn.tree import DecisionTreeClassifier, RandomForestClassifier

__all__ = [
    "KINDS",
    "ClassificationReport",
    "ClusterResult",
    "DecisionTreeClassifier",
    "GridPoint",
    "GridSearchResult",
    "KnnClassifier",
    "LinearSvmClassifier",
    "MlpClassifier",
    "ModelSpec",
    "RandomForestClassifier",
    "SplitMix64",
    "SplitSpec",
    "Standardizer",
    "classification_report",
    "cluster_validate",
    "confusion_matrix",
    "fit_model",
    "grid_search",
    "kmeans",
    "mlp_gradient",
    "predict",
    "render_report_text",
    "report_to_dict",
    "seeded_rng",
    "silhouette",
    "split_indices",
    "stratified_folds",
    "train_test_split",
]
