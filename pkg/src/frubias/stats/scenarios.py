"""Crossing FRU magnitude with correlation strength.

=================== =============== ===============
                    Large FRU       Small FRU
=================== =============== ===============
Strong correlation  not likely      implicit bias
Weak correlation    explicit bias   safe
=================== =============== ===============
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from ..errors import ValidationError
from .association import CorrelationEntry

DEFAULT_FRU_LARGE = 0.5
DEFAULT_CORR_STRONG = 0.3
ENV_FRU_LARGE = "FRUBIAS_FRU_LARGE"
ENV_CORR_STRONG = "FRUBIAS_CORR_STRONG"


class Label(str, Enum):
    NOT_LIKELY = "not_likely"
    IMPLICIT_BIAS = "implicit_bias"
    EXPLICIT_BIAS = "explicit_bias"
    SAFE = "safe"


SCENARIOS = {
    ("strong", "large"): Label.NOT_LIKELY,
    ("strong", "small"): Label.IMPLICIT_BIAS,
    ("weak", "large"): Label.EXPLICIT_BIAS,
    ("weak", "small"): Label.SAFE,
}


@dataclass(frozen=True)
class Thresholds:
    fru_large: float = DEFAULT_FRU_LARGE
    corr_strong: float = DEFAULT_CORR_STRONG

    def __post_init__(self):
        for name in ("fru_large", "corr_strong"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValidationError(f"{name} must lie in (0, 1), got {v}", module="stats")

    @classmethod
    def from_env(cls, environ=None) -> "Thresholds":
        environ = os.environ if environ is None else environ
        try:
            return cls(float(environ.get(ENV_FRU_LARGE, DEFAULT_FRU_LARGE)),
                       float(environ.get(ENV_CORR_STRONG, DEFAULT_CORR_STRONG)))
        except ValueError as exc:
            raise ValidationError(f"bad threshold in environment: {exc}", module="stats") from exc


def classify(relative_fru: float, max_correlation: float, thresholds: Thresholds = Thresholds()) -> Label:
    fru = "large" if relative_fru >= thresholds.fru_large else "small"
    corr = "strong" if abs(max_correlation) >= thresholds.corr_strong else "weak"
    return SCENARIOS[(corr, fru)]


@dataclass(frozen=True)
class ScenarioCell:
    protected: int
    protected_name: str
    relative_fru: float
    fru_magnitude: str
    correlation_strength: str
    label: Label
    evidence: CorrelationEntry | None
    ranked_evidence: tuple[CorrelationEntry, ...]
    thresholds: Thresholds

    def as_dict(self, table=None) -> dict:
        return {
            "protected": self.protected,
            "protected_name": self.protected_name,
            "relative_fru": round(self.relative_fru, 12),
            "fru_magnitude": self.fru_magnitude,
            "correlation_strength": self.correlation_strength,
            "label": self.label.value,
            "evidence": None if self.evidence is None else self.evidence.as_dict(table),
            "ranked_evidence": [e.as_dict(table) for e in self.ranked_evidence],
            "thresholds": {"fru_large": self.thresholds.fru_large, "corr_strong": self.thresholds.corr_strong},
        }


def classify_scenarios(level1, correlations: Sequence[CorrelationEntry],
                       thresholds: Thresholds = Thresholds(), protected: Sequence[int] | None = None,
                       n_evidence: int = 3) -> list[ScenarioCell]:
    """Label every protected feature with one of the four bias scenarios.

    Correlation strength uses the largest absolute significant association with
    any unprotected feature. ``ranked_evidence`` keeps the ``n_evidence``
    strongest significant pairs.
    """
    n_features = len(level1.results)
    if protected is None:
        protected = sorted({e.protected for e in correlations})
    protected_set = set(protected)
    by_pair = {(e.protected, e.unprotected): e for e in correlations}
    gaps = [(p, j) for p in protected for j in range(n_features)
            if j not in protected_set and (p, j) not in by_pair]
    if gaps:
        raise ValidationError(f"missing correlation pairs (protected, unprotected): {gaps}", module="stats")

    cells = []
    for p in protected:
        result = level1.results[p]
        rel = result.relative_to_reference or 0.0
        entries = [by_pair[(p, j)] for j in range(n_features) if j not in protected_set]
        significant = sorted((e for e in entries if e.significant and e.defined),
                             key=lambda e: (-abs(e.value), e.unprotected))
        top = significant[0] if significant else None
        strength = abs(top.value) if top is not None else 0.0
        fru = "large" if rel >= thresholds.fru_large else "small"
        corr = "strong" if strength >= thresholds.corr_strong else "weak"
        cells.append(ScenarioCell(
            protected=p,
            protected_name=result.name,
            relative_fru=rel,
            fru_magnitude=fru,
            correlation_strength=corr,
            label=SCENARIOS[(corr, fru)],
            evidence=top,
            ranked_evidence=tuple(significant[:n_evidence]),
            thresholds=thresholds,
        ))
    return cells
