"""Group and individual fairness metrics used as a literature baseline."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ..dataset import DataTable, TableView, as_view
from ..distance import pairwise_distances
from ..errors import ParseError, ValidationError
from ..operators import DistanceKind


@dataclass(frozen=True)
class BaselineMetrics:
    statistical_parity: float
    disparate_impact: float
    equal_opportunity: float | None = None
    average_odds: float | None = None
    consistency: float | None = None
    gei: float | None = None
    basis: str = "labels"
    flags: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        def r(v):
            return None if v is None or not math.isfinite(v) else round(v, 12)
        return {
            "basis": self.basis,
            "statistical_parity": r(self.statistical_parity),
            "disparate_impact": r(self.disparate_impact),
            "equal_opportunity": r(self.equal_opportunity),
            "average_odds": r(self.average_odds),
            "consistency": r(self.consistency),
            "gei": r(self.gei),
            "flags": list(self.flags),
        }


def _rate(mask, values):
    return float(values[mask].mean())


def group_metrics(table: DataTable, unprivileged, favorable: int = 0, predictions=None) -> BaselineMetrics:
    """Statistical parity and disparate impact (plus odds metrics with predictions).

    Parameters
    ----------
    unprivileged : bool array or str
        Membership of the unprivileged group, or the name of a group column
        stored on the table.
    favorable : int
        Class code of the favorable outcome.
    predictions : array of int, optional
        Predicted class codes. Without them, rates come from the labels and the
        odds-based metrics are omitted.
    """
    if isinstance(unprivileged, str):
        if unprivileged not in table.groups:
            raise ValidationError(f"unknown group column {unprivileged!r}", module="stats")
        unprivileged = table.groups[unprivileged]
    unpriv = np.asarray(unprivileged, dtype=bool)
    if unpriv.shape != (table.n_instances,):
        raise ValidationError("group column is not aligned with the table", module="stats")
    if unpriv.all() or not unpriv.any():
        raise ValidationError("one of the groups is empty", module="stats")
    priv = ~unpriv
    truth = table.labels == favorable
    outcome = truth if predictions is None else np.asarray(predictions) == favorable
    if outcome.shape != truth.shape:
        raise ValidationError("predictions are not aligned with the table", module="stats")

    flags = []
    pu, pp = _rate(unpriv, outcome), _rate(priv, outcome)
    parity = pu - pp
    if pp == 0:
        flags.append("disparate_impact_divergent")
        impact = math.inf if pu > 0 else math.nan
    else:
        impact = pu / pp
    if predictions is None:
        return BaselineMetrics(parity, impact, basis="labels", flags=tuple(flags))

    def tpr(group):
        pos = group & truth
        return _rate(pos, outcome) if pos.any() else math.nan

    def fpr(group):
        neg = group & ~truth
        return _rate(neg, outcome) if neg.any() else math.nan

    eo = tpr(unpriv) - tpr(priv)
    odds = 0.5 * ((fpr(unpriv) - fpr(priv)) + eo)
    return BaselineMetrics(parity, impact, eo, odds, basis="predictions", flags=tuple(flags))


def nearest_neighbors(table: DataTable | TableView, k: int, kind=DistanceKind.HMOM,
                      normalize: bool = False) -> np.ndarray:
    """Indices of the ``k`` nearest other instances (ties broken by index)."""
    dist = np.array(pairwise_distances(kind, as_view(table), normalize))
    np.fill_diagonal(dist, np.inf)
    return np.argsort(dist, axis=1, kind="stable")[:, :k]


def consistency(predictions, neighbors: np.ndarray) -> float:
    yhat = np.asarray(predictions, dtype=float)
    return float(1.0 - np.mean(np.abs(yhat - yhat[neighbors].mean(axis=1))))


def generalized_entropy_index(labels, predictions, alpha: float = 2.0) -> float:
    """GEI over benefits ``b = yhat - y + 1``."""
    b = np.asarray(predictions, dtype=float) - np.asarray(labels, dtype=float) + 1.0
    mu = b.mean()
    if mu == 0:
        raise ValidationError("mean benefit is zero", module="stats")
    if alpha == 1:
        ratio = b / mu
        with np.errstate(divide="ignore", invalid="ignore"):
            return float(np.mean(np.where(ratio > 0, ratio * np.log(ratio), 0.0)))
    if alpha == 0:
        return float(-np.mean(np.log(b / mu)))
    return float(np.mean((b / mu) ** alpha - 1.0) / (alpha * (alpha - 1.0)))


def individual_metrics(table: DataTable | TableView, predictions, k_neighbors: int = 5,
                       favorable: int = 0, kind=DistanceKind.HMOM,
                       normalize: bool = False) -> tuple[float, float]:
    """Consistency and generalized entropy index of binary predictions.

    ``predictions`` holds class codes; they are turned into 0/1 with the
    favorable class as 1, like the labels.
    """
    view = as_view(table)
    n = view.n_instances
    if not 1 <= k_neighbors < n:
        raise ValidationError(f"k_neighbors must be in [1, {n - 1}], got {k_neighbors}", module="stats")
    pred = np.asarray(predictions)
    if pred.shape != (n,):
        raise ValidationError("predictions are not aligned with the table", module="stats")
    yhat = (pred == favorable).astype(float)
    y = (view.labels == favorable).astype(float)
    neighbors = nearest_neighbors(view, k_neighbors, kind, normalize)
    return consistency(yhat, neighbors), generalized_entropy_index(y, yhat)


def read_predictions(path: str | os.PathLike, table: DataTable) -> np.ndarray:
    """Read ``instance_id,prediction`` rows; predictions are class codes."""
    n = table.n_instances
    out = np.full(n, -1, dtype=np.int64)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["instance_id", "prediction"]:
            raise ParseError("predictions file needs the header instance_id,prediction", module="stats")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise ParseError("expected instance_id,prediction", row=lineno, module="stats")
            try:
                i = int(row[0])
            except ValueError:
                raise ParseError(f"bad instance id {row[0]!r}", row=lineno, module="stats") from None
            if not 0 <= i < n:
                raise ParseError(f"instance id {i} out of range", row=lineno, module="stats")
            cell = row[1].strip()
            try:
                code = int(cell)
            except ValueError:
                raise ParseError(f"bad prediction {cell!r}", row=lineno, module="stats") from None
            if not 0 <= code < table.n_classes:
                raise ParseError(f"prediction {code} is not a class code", row=lineno, module="stats")
            out[i] = code
    missing = np.flatnonzero(out < 0)
    if missing.size:
        raise ValidationError(f"predictions missing for {missing.size} instances (first: {missing[0]})",
                              module="stats")
    return out
