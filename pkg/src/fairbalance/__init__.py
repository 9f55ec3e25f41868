"""Fairness-aware oversampling and evaluation for imbalanced tabular data."""

from .data import (
    ColumnMeta,
    CsvSchema,
    Dataset,
    FoldPlan,
    RatioReport,
    ScalerParams,
    SubgroupPartition,
    downsample_to_level,
    imbalance_ratios,
    ingest_csv,
    partition_subgroups,
    standardize_apply,
    standardize_fit,
    stratified_kfold,
)
from .linear import Hyper, LinearModel, feature_importance, predict, train
from .metrics import (
    Confusion,
    FairnessReport,
    GroupConfusion,
    balanced_accuracy,
    confusion_by_group,
    fair_utility,
    fairness_report,
)
from .neighbors import KERNEL, NeighborQuery, knn, nearest_neighbors
from .oversample import (
    FosPlan,
    SynthesisRecord,
    fos,
    interpolate,
    plan_fos,
    random_oversample,
    reweigh,
    smote,
)

__version__ = "0.1.0"
