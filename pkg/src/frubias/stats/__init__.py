from .association import (AnovaResult, CorrelationEntry, CramersVResult, Method, PearsonResult, anova_r2,
                          associate, correlation_table, cramers_v, pearson)
from .fairness import BaselineMetrics, group_metrics, individual_metrics, read_predictions
from .scenarios import Label, ScenarioCell, Thresholds, classify, classify_scenarios

__all__ = [
    "AnovaResult", "BaselineMetrics", "CorrelationEntry", "CramersVResult", "Label", "Method",
    "PearsonResult", "ScenarioCell", "Thresholds", "anova_r2", "associate", "classify",
    "classify_scenarios", "correlation_table", "cramers_v", "group_metrics", "individual_metrics",
    "pearson", "read_predictions",
]
