"""Greedy exact-ICL clustering of directed graphs under the stochastic block model."""
from .graph import (DirectedGraph, EdgeListError, ParseReport, parse_edge_list, read_partition,
                    write_edge_list, write_partition)
from .greedy import FitResult, FitState, greedy_fit
from .init import InitConfig, fit_with_restarts, kmeans_init, random_init
from .merge import merge_pass
from .metrics import entropy, mutual_information, nmi
from .stats import Partition, Priors, compute_stats, icl_asymptotic, icl_exact
from .synth import SbmParams, SettingConfig, make_setting, sample_sbm

__all__ = [
    "DirectedGraph", "EdgeListError", "ParseReport", "parse_edge_list", "read_partition",
    "write_edge_list", "write_partition", "FitResult", "FitState", "greedy_fit", "InitConfig",
    "fit_with_restarts", "kmeans_init", "random_init", "merge_pass", "entropy",
    "mutual_information", "nmi", "Partition", "Priors", "compute_stats", "icl_asymptotic",
    "icl_exact", "SbmParams", "SettingConfig", "make_setting", "sample_sbm",
]
