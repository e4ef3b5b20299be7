from .loo import LooSplit, build_loo, top_popular_entities
from .metrics import hit_at_k, hit_rate_at_k, mean_ndcg_at_k, ndcg_at_k
from .plans import ExperimentPlan, Setting, build_experiment_store
from .runner import CellResult, ExperimentResult, evaluate_fitted, run_experiment
from .stats import TTestResult, paired_t_test

__all__ = [
    "LooSplit",
    "build_loo",
    "top_popular_entities",
    "hit_at_k",
    "hit_rate_at_k",
    "ndcg_at_k",
    "mean_ndcg_at_k",
    "ExperimentPlan",
    "Setting",
    "build_experiment_store",
    "CellResult",
    "ExperimentResult",
    "evaluate_fitted",
    "run_experiment",
    "TTestResult",
    "paired_t_test",
]
