"""Correlation and association between protected and unprotected features."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from ..dataset import DataTable
from ..errors import ValidationError
from .distributions import chi2_sf, f_critical, t_two_sided_p

ALPHA = 0.05


class PearsonResult(NamedTuple):
    r: float
    p: float
    defined: bool = True


class CramersVResult(NamedTuple):
    v: float
    p: float
    chi2: float
    dof: int
    degenerate: bool = False


class AnovaResult(NamedTuple):
    r2: float
    f: float
    f_critical: float
    significant: bool
    defined: bool = True


def pearson(x, y) -> PearsonResult:
    """Product-moment correlation with a two-sided t-test p-value.

    A constant input yields ``r = 0, p = 1`` with ``defined=False``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("pearson needs two 1-d arrays of equal length", module="stats")
    n = x.size
    if n < 3:
        raise ValidationError("pearson needs at least three observations", module="stats")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValidationError("pearson inputs must be finite", module="stats")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        return PearsonResult(0.0, 1.0, False)
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return PearsonResult(r, 0.0)
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return PearsonResult(r, t_two_sided_p(t, n - 2))


def contingency_table(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValidationError("columns must be 1-d and of equal length", module="stats")
    if a.size == 0:
        raise ValidationError("empty contingency table", module="stats")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1))
    np.add.at(table, (ia, ib), 1.0)
    return table


def cramers_v(a, b) -> CramersVResult:
    """Cramér's V from the Pearson chi-squared statistic, without corrections."""
    table = contingency_table(a, b)
    r, c = table.shape
    if r < 2 or c < 2:
        return CramersVResult(0.0, 1.0, 0.0, 0, True)
    n = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    chi2 = float(np.sum((table - expected) ** 2 / expected))
    dof = (r - 1) * (c - 1)
    v = math.sqrt(chi2 / (n * min(r - 1, c - 1)))
    return CramersVResult(min(v, 1.0), chi2_sf(chi2, dof), chi2, dof)


def anova_r2(group, response, alpha: float = ALPHA) -> AnovaResult:
    """Share of ``response`` variance explained by ``group`` membership.

    Equivalent to least squares on group indicator columns, with the joint
    F-test of all group effects.
    """
    group = np.asarray(group)
    y = np.asarray(response, dtype=float)
    if group.shape != y.shape or y.ndim != 1:
        raise ValidationError("group and response must be 1-d and of equal length", module="stats")
    levels, idx = np.unique(group, return_inverse=True)
    g, n = levels.size, y.size
    if g < 2:
        raise ValidationError("anova_r2 needs at least two groups", module="stats")
    if n <= g:
        raise ValidationError("anova_r2 needs more observations than groups", module="stats")
    mean = y.mean()
    ss_total = float(np.sum((y - mean) ** 2))
    crit = f_critical(g - 1, n - g, alpha)
    if ss_total == 0:
        return AnovaResult(0.0, 0.0, crit, False, False)
    counts = np.bincount(idx, minlength=g)
    sums = np.bincount(idx, weights=y, minlength=g)
    ss_between = float(np.sum(counts * (sums / counts - mean) ** 2))
    r2 = min(max(ss_between / ss_total, 0.0), 1.0)
    if r2 >= 1.0:
        f = math.inf
    else:
        f = (r2 / (g - 1)) / ((1.0 - r2) / (n - g))
    return AnovaResult(r2, f, crit, f > crit)


class Method(str, Enum):
    PEARSON = "pearson"
    CRAMERS_V = "cramers_v"
    R_SQUARED_F = "r_squared_f"


@dataclass(frozen=True)
class CorrelationEntry:
    protected: int
    unprotected: int
    method: Method
    value: float
    significant: bool
    p_value_or_fstat: float
    defined: bool = True

    def as_dict(self, table: DataTable | None = None) -> dict:
        out = {
            "protected": self.protected,
            "unprotected": self.unprotected,
            "method": self.method.value,
            "value": round(self.value, 12),
            "significant": self.significant,
            "p_value_or_fstat": None if math.isinf(self.p_value_or_fstat) else round(self.p_value_or_fstat, 12),
            "defined": self.defined,
        }
        if table is not None:
            out["protected_name"] = table.schema[self.protected].name
            out["unprotected_name"] = table.schema[self.unprotected].name
        return out


def associate(table: DataTable, protected: int, other: int, alpha: float = ALPHA) -> CorrelationEntry:
    """Pick the association measure for a feature pair and evaluate it.

    numeric/numeric uses Pearson, nominal/nominal Cramér's V, and mixed pairs
    the R-squared of the numeric column explained by the nominal one, with
    the F-test deciding significance.
    """
    ps, os_ = table.schema[protected], table.schema[other]
    x, y = table.column(protected), table.column(other)
    if np.isnan(x).any() or np.isnan(y).any():
        keep = ~(np.isnan(x) | np.isnan(y))
        x, y = x[keep], y[keep]
    if ps.is_numeric and os_.is_numeric:
        res = pearson(x, y)
        return CorrelationEntry(protected, other, Method.PEARSON, res.r, res.defined and res.p < alpha,
                                res.p, res.defined)
    if not ps.is_numeric and not os_.is_numeric:
        res = cramers_v(x, y)
        v = res.v
        if protected == other and not res.degenerate:
            v = 1.0  # chi2 = n * (r - 1) exactly; the sum of squares can land one ulp short
        return CorrelationEntry(protected, other, Method.CRAMERS_V, v, not res.degenerate and res.p < alpha,
                                res.p, not res.degenerate)
    group, response = (x, y) if not ps.is_numeric else (y, x)
    res = anova_r2(group, response, alpha)
    return CorrelationEntry(protected, other, Method.R_SQUARED_F, res.r2, res.significant, res.f, res.defined)


def correlation_table(table: DataTable, protected: list[int] | None = None,
                      alpha: float = ALPHA) -> list[CorrelationEntry]:
    """Association of every protected feature with every feature (itself included)."""
    protected = table.protected_indices if protected is None else list(protected)
    return [associate(table, p, j, alpha) for p in protected for j in range(table.n_features)]
