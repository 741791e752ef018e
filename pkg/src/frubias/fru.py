"""Fuzzy-rough uncertainty (FRU) of features.

FRU of a suppressed feature set for class ``k`` is the Euclidean norm of the
positive growth of boundary membership, divided by the norm of the boundary
membership computed on the full feature set::

    delta(x) = max(0, bnd_masked(x) - bnd_full(x))
    omega_k  = ||delta||_2 / ||bnd_full||_2
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .dataset import DataTable, FeatureMask, TableView, apply_mask
from .distance import DistanceCache, pairwise_distances
from .errors import ValidationError
from .granulation import RegionMembership, compute_regions
from .operators import DistanceKind, FuzzyConfig, ImplicatorKind, TNormKind

AGGREGATIONS = ("mean", "max")


def fuzzy_rough_uncertainty(full_bnd, masked_bnd, denominator_bnd=None):
    """Evaluate FRU per class from boundary memberships.

    Parameters
    ----------
    full_bnd, masked_bnd : array_like, shape (n,) or (n, K)
        Boundary membership before and after suppression.
    denominator_bnd : array_like, optional
        Boundary used for normalization; defaults to ``full_bnd``.

    Returns
    -------
    omega : ndarray, shape (K,)
        ``nan`` where the denominator is zero but the numerator is not.
    diverging : ndarray of bool, shape (K,)
    """
    full = np.atleast_1d(np.asarray(full_bnd, dtype=float))
    masked = np.asarray(masked_bnd, dtype=float).reshape(full.shape)
    denom = full if denominator_bnd is None else np.asarray(denominator_bnd, dtype=float).reshape(full.shape)
    if full.ndim == 1:
        full, masked, denom = full[:, None], masked[:, None], denom[:, None]
    growth = np.maximum(0.0, masked - full)
    num = np.sqrt(np.sum(growth * growth, axis=0))
    den = np.sqrt(np.sum(denom * denom, axis=0))
    zero = den == 0
    diverging = zero & (num > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        omega = np.where(zero, np.where(diverging, np.nan, 0.0), num / np.where(zero, 1.0, den))
    return omega, diverging


def aggregate_classes(omega: np.ndarray, how: str = "mean") -> float:
    finite = omega[~np.isnan(omega)]
    if finite.size == 0:
        return math.nan
    if how == "mean":
        return float(finite.mean())
    if how == "max":
        return float(finite.max())
    raise ValidationError(f"unknown class aggregation {how!r}; use one of {AGGREGATIONS}", module="fru")


@dataclass(frozen=True)
class FruResult:
    feature: int
    name: str
    per_class: tuple[float, ...]
    aggregate: float
    relative_to_reference: float | None = None
    relative_to_sum: float | None = None
    excluded: tuple[int, ...] = ()
    diverging_classes: tuple[int, ...] = ()

    def as_dict(self, precision: int = 12) -> dict:
        return {
            "feature": self.feature,
            "name": self.name,
            "excluded": list(self.excluded),
            "fru_per_class": [_round(v, precision) for v in self.per_class],
            "aggregate": _round(self.aggregate, precision),
            "relative_to_reference": _round(self.relative_to_reference, precision),
            "relative_to_sum": _round(self.relative_to_sum, precision),
            "diverging_classes": list(self.diverging_classes),
        }


def _round(value, precision):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return round(float(value), precision)


def _relativize(results: Sequence[FruResult]) -> tuple[list[FruResult], int | None, list[str]]:
    """Fill relative FRU values; returns (results, reference feature, flags)."""
    agg = np.array([r.aggregate for r in results], dtype=float)
    clean = np.where(np.isnan(agg), 0.0, agg)
    flags = []
    if np.isnan(agg).any():
        flags.append("diverging")
    if clean.size == 0 or clean.max() <= 0:
        flags.append("all-zero")
        return [replace(r, relative_to_reference=0.0, relative_to_sum=0.0) for r in results], None, flags
    ref = int(np.argmax(clean))
    top, total = clean[ref], clean.sum()
    out = [
        replace(r, relative_to_reference=float(v / top), relative_to_sum=float(v / total))
        for r, v in zip(results, clean)
    ]
    return out, results[ref].feature, flags


def _result_for(table, view, config, baseline, denominator, aggregate, cache, feature, name):
    masked = compute_regions(view, config, cache=cache)
    omega, diverging = fuzzy_rough_uncertainty(baseline.bnd, masked.bnd,
                                               None if denominator is None else denominator.bnd)
    return FruResult(
        feature=feature,
        name=name,
        per_class=tuple(float(v) for v in omega),
        aggregate=aggregate_classes(omega, aggregate),
        excluded=tuple(sorted(view.mask.excluded)),
        diverging_classes=tuple(int(k) for k in np.flatnonzero(diverging)),
    )


def fru_for_mask(table: DataTable, config: FuzzyConfig, mask: FeatureMask,
                 baseline: RegionMembership | None = None, denominator: RegionMembership | None = None,
                 aggregate: str = "mean", cache: DistanceCache | None = None,
                 feature: int = -1, name: str = "") -> FruResult:
    """FRU of suppressing every feature in ``mask`` at once."""
    if baseline is None:
        baseline = compute_regions(table, config, cache=cache)
    view = apply_mask(table, mask)
    return _result_for(table, view, config, baseline, denominator, aggregate, cache, feature, name)


def fru_for_feature(table: DataTable, config: FuzzyConfig, feature: int,
                    baseline: RegionMembership | None = None, aggregate: str = "mean",
                    cache: DistanceCache | None = None) -> FruResult:
    """FRU of suppressing a single feature."""
    if not 0 <= feature < table.n_features:
        raise ValidationError(f"feature index {feature} out of range", module="fru")
    return fru_for_mask(table, config, FeatureMask([feature]), baseline, None, aggregate, cache,
                        feature=feature, name=table.schema[feature].name)


@dataclass(frozen=True, eq=False)
class Level1Report:
    config: FuzzyConfig
    results: tuple[FruResult, ...]
    reference_feature: int | None
    baseline: RegionMembership
    aggregation: str = "mean"
    flags: tuple[str, ...] = ()

    @property
    def baseline_fingerprint(self) -> str:
        return self.baseline.config_fingerprint

    def by_name(self, name: str) -> FruResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def aggregates(self) -> np.ndarray:
        return np.array([r.aggregate for r in self.results])

    def as_dict(self, precision: int = 12) -> dict:
        return {
            "config": self.config.as_dict(),
            "aggregation": self.aggregation,
            "baseline_fingerprint": self.baseline_fingerprint,
            "reference_feature": self.reference_feature,
            "flags": list(self.flags),
            "features": [r.as_dict(precision) for r in self.results],
        }


@dataclass(frozen=True, eq=False)
class Level2Report:
    config: FuzzyConfig
    protected: int
    protected_name: str
    results: tuple[FruResult, ...]
    baseline_mode: str = "full"
    flags: tuple[str, ...] = ()

    def as_dict(self, precision: int = 12) -> dict:
        return {
            "protected": self.protected,
            "protected_name": self.protected_name,
            "baseline_mode": self.baseline_mode,
            "flags": list(self.flags),
            "features": [r.as_dict(precision) for r in self.results],
        }


def _map(fn, items, jobs):
    if jobs is None or jobs <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def level1(table: DataTable, config: FuzzyConfig, aggregate: str = "mean", jobs: int = 1,
           cache: DistanceCache | None = None) -> Level1Report:
    """Suppress every feature in turn and report its FRU.

    The reference feature is the one with the greatest aggregate FRU; ties go
    to the lowest index.
    """
    if table.n_features < 2:
        raise ValidationError("Level-1 analysis needs at least two features", module="fru")
    if aggregate not in AGGREGATIONS:
        raise ValidationError(f"unknown class aggregation {aggregate!r}", module="fru")
    baseline = compute_regions(table, config, cache=cache)
    results = _map(lambda f: fru_for_feature(table, config, f, baseline, aggregate, cache),
                   range(table.n_features), jobs)
    results, ref, flags = _relativize(results)
    return Level1Report(config, tuple(results), ref, baseline, aggregate, tuple(flags))


def level2(table: DataTable, config: FuzzyConfig, protected: int, baseline: RegionMembership | None = None,
           baseline_mode: str = "full", aggregate: str = "mean", jobs: int = 1,
           cache: DistanceCache | None = None) -> Level2Report:
    """Suppress each unprotected feature together with ``protected``.

    ``baseline_mode="full"`` normalizes by the full-feature boundary (shared
    with Level-1); ``"single"`` normalizes by the boundary obtained with only
    the protected feature suppressed. Growth is always measured against the
    full-feature boundary.
    """
    if table.n_features < 3:
        raise ValidationError("Level-2 analysis needs at least three features", module="fru")
    if not 0 <= protected < table.n_features:
        raise ValidationError(f"protected feature index {protected} out of range", module="fru")
    if baseline_mode not in ("full", "single"):
        raise ValidationError(f"unknown Level-2 baseline {baseline_mode!r}", module="fru")
    if baseline is None:
        baseline = compute_regions(table, config, cache=cache)
    denominator = None
    if baseline_mode == "single":
        denominator = compute_regions(apply_mask(table, FeatureMask([protected])), config, cache=cache)
    protected_set = set(table.protected_indices) | {protected}
    features = [j for j in range(table.n_features) if j not in protected_set]

    def one(j):
        return fru_for_mask(table, config, FeatureMask([j, protected]), baseline, denominator,
                            aggregate, cache, feature=j, name=table.schema[j].name)

    results, _, flags = _relativize(_map(one, features, jobs))
    return Level2Report(config, protected, table.schema[protected].name, tuple(results),
                        baseline_mode, tuple(flags))


@dataclass(eq=False)
class SweepGrid:
    implicators: tuple[ImplicatorKind, ...]
    tnorms: tuple[TNormKind, ...]
    distances: tuple[DistanceKind, ...]
    lambdas: tuple[float, ...]
    normalize_distance: bool = False
    cells: dict = field(default_factory=dict)

    def configs(self) -> list[FuzzyConfig]:
        return [
            FuzzyConfig(i, t, d, lam, self.normalize_distance)
            for d, i, t, lam in itertools.product(self.distances, self.implicators, self.tnorms, self.lambdas)
        ]

    def rows(self, class_labels: Sequence[str] | None = None) -> list[dict]:
        """Long-format records, one per (cell, feature)."""
        out = []
        for config in self.configs():
            report = self.cells[config]
            for r in report.results:
                row = {
                    "implicator": config.implicator.value,
                    "tnorm": config.tnorm.value,
                    "distance": config.distance.value,
                    "lambda": config.smoothing,
                    "feature": r.feature,
                    "name": r.name,
                    "fru": r.aggregate,
                    "relative_to_reference": r.relative_to_reference,
                    "relative_to_sum": r.relative_to_sum,
                }
                for k, v in enumerate(r.per_class):
                    label = class_labels[k] if class_labels is not None else k
                    row[f"fru_class_{label}"] = v
                out.append(row)
        return out


def _as_tuple(values, kind):
    try:
        return tuple(dict.fromkeys(kind(v) for v in values))
    except ValueError as exc:
        raise ValidationError(str(exc), module="fru") from exc


def sweep(table: DataTable, implicators: Iterable = (ImplicatorKind.LUKASIEWICZ,),
          tnorms: Iterable = (TNormKind.MINIMUM,), distances: Iterable = (DistanceKind.HMOM,),
          lambdas: Iterable[float] = (0.5,), normalize_distance: bool = False,
          aggregate: str = "mean", jobs: int = 1) -> SweepGrid:
    """Level-1 analysis for every cell of an operator/distance/smoothing grid.

    Work is ordered by suppressed feature: each distance matrix is built once
    and shared by every cell with the same distance kind.
    """
    grid = SweepGrid(
        implicators=_as_tuple(implicators, ImplicatorKind),
        tnorms=_as_tuple(tnorms, TNormKind),
        distances=_as_tuple(distances, DistanceKind),
        lambdas=tuple(dict.fromkeys(float(v) for v in lambdas)),
        normalize_distance=normalize_distance,
    )
    if not (grid.implicators and grid.tnorms and grid.distances and grid.lambdas):
        raise ValidationError("sweep grid is empty", module="fru")
    bad = [v for v in grid.lambdas if not v > 0]
    if bad:
        raise ValidationError(f"smoothing values must be > 0, got {bad}", module="fru")
    if aggregate not in AGGREGATIONS:
        raise ValidationError(f"unknown class aggregation {aggregate!r}", module="fru")
    if table.n_features < 2:
        raise ValidationError("Level-1 analysis needs at least two features", module="fru")

    configs = grid.configs()
    for kind in grid.distances:
        cell_configs = [c for c in configs if c.distance is kind]
        full_view = TableView(table)
        dist = pairwise_distances(kind, full_view, normalize_distance)
        baselines = dict(zip(cell_configs, _map(
            lambda c: _regions_from_distances(full_view, c, dist), cell_configs, jobs)))
        per_cell = {c: [] for c in cell_configs}
        for f in range(table.n_features):
            view = apply_mask(table, FeatureMask([f]))
            dist = pairwise_distances(kind, view, normalize_distance)

            def one(c, view=view, dist=dist, f=f):
                masked = _regions_from_distances(view, c, dist)
                omega, diverging = fuzzy_rough_uncertainty(baselines[c].bnd, masked.bnd)
                return FruResult(f, table.schema[f].name, tuple(float(v) for v in omega),
                                 aggregate_classes(omega, aggregate), excluded=(f,),
                                 diverging_classes=tuple(int(k) for k in np.flatnonzero(diverging)))

            for c, res in zip(cell_configs, _map(one, cell_configs, jobs)):
                per_cell[c].append(res)
        for c in cell_configs:
            results, ref, flags = _relativize(per_cell[c])
            grid.cells[c] = Level1Report(c, tuple(results), ref, baselines[c], aggregate, tuple(flags))
    return grid


class _FixedDistances:
    """Cache stand-in that always returns one precomputed matrix."""

    def __init__(self, matrix):
        self.matrix = matrix

    def get(self, view, kind, normalize):
        return self.matrix


def _regions_from_distances(view, config, dist):
    return compute_regions(view, config, cache=_FixedDistances(dist))


def parse_lambda_grid(text: str) -> list[float]:
    """Parse ``start:stop:step`` (stop inclusive within 1e-9) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"lambda grid must be start:stop:step, got {text!r}", module="cli")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError as exc:
            raise ValidationError(f"bad lambda grid {text!r}", module="cli") from exc
        if step <= 0 or stop < start:
            raise ValidationError(f"bad lambda grid {text!r}", module="cli")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [round(start + i * step, 12) for i in range(count)]
    else:
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise ValidationError(f"bad lambda list {text!r}", module="cli") from exc
    if not values:
        raise ValidationError("empty lambda grid", module="cli")
    bad = [v for v in values if not v > 0]
    if bad:
        raise ValidationError(f"smoothing values must be > 0, got {bad}", module="cli")
    return values
