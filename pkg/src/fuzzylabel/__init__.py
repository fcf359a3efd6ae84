"""Fuzzy label generation and fuzzy-label enhanced KNN classifiers."""
from ._kernels import BACKEND
from .classify_multi import MultiLabelModel, fit_baseline_mlknn, fit_mlknn
from .classify_single import MajorityKNN, SingleLabelModel
from .dataset import (DataError, Dataset, FoldSplit, LabelMode, ValidationError, fuzzy_to_logical, kfold_split,
                      load_arff, load_csv, save_csv, standardize)
from .fcm import FcmConfig, fcm_fit
from .flgen import FLGenLP, PropagationConfig, fixed_point_oracle, flgen_lp
from .graph import GraphConfig, build_graph
from .harness import ExperimentPlan, ExperimentReport, emit_report, load_report, run_comparison, run_three_arm
from .synthdata import SynthConfig, gen_multi_label, gen_single_label

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DataError", "Dataset", "ExperimentPlan", "ExperimentReport", "FLGenLP", "FcmConfig", "FoldSplit",
    "GraphConfig", "LabelMode", "MajorityKNN", "MultiLabelModel", "PropagationConfig", "SingleLabelModel",
    "SynthConfig", "ValidationError", "build_graph", "emit_report", "fcm_fit", "fit_baseline_mlknn", "fit_mlknn",
    "fixed_point_oracle", "flgen_lp", "fuzzy_to_logical", "gen_multi_label", "gen_single_label", "kfold_split",
    "load_arff", "load_csv", "load_report", "run_comparison", "run_three_arm", "save_csv", "standardize",
]
