"""Fuzzy-rough lower/upper approximations and region memberships.

With crisp class membership ``m`` and similarity ``phi``::

    lower(x) = min(m(x), min_y I(m(x) * phi(x, y), m(y)))
    upper(x) = max(m(x), max_y T(m(y) * phi(y, x), m(y)))

    POS = lower,  NEG = 1 - upper,  BND = upper - lower

Both reductions range over every ``y`` including ``x`` itself. An empty
minimum is 1 and an empty maximum is 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .dataset import DataTable, TableView, as_view
from .distance import DistanceCache, pairwise_distances
from .errors import ValidationError
from .operators import IMPLICATORS, TNORMS, FuzzyConfig


@dataclass(frozen=True, eq=False)
class RegionMembership:
    """Positive/boundary/negative memberships, each of shape ``(n, K)``."""

    pos: np.ndarray
    bnd: np.ndarray
    neg: np.ndarray
    config_fingerprint: str

    @property
    def lower(self) -> np.ndarray:
        return self.pos

    @property
    def upper(self) -> np.ndarray:
        return 1.0 - self.neg

    @property
    def n_classes(self) -> int:
        return self.pos.shape[1]


def _fingerprint(view: TableView, config: FuzzyConfig) -> str:
    return config.fingerprint(extra=repr(sorted(view.mask.excluded)))


def _distances(view, config, cache):
    if cache is not None:
        return cache.get(view, config.distance, config.normalize_distance)
    return pairwise_distances(config.distance, view, config.normalize_distance)


def similarity_matrix(view, config: FuzzyConfig, cache: DistanceCache | None = None) -> np.ndarray:
    return np.exp(-config.smoothing * _distances(as_view(view), config, cache))


def _check_class(view, k):
    if not 0 <= k < view.n_classes:
        raise ValidationError(f"class {k} does not exist", module="granulation")


def _lower(sim, member, implicator):
    # rows: x, columns: y
    impl = IMPLICATORS[implicator](member[:, None] * sim, member[None, :])
    return np.minimum(member, impl.min(axis=1))


def _upper(sim, member, tnorm):
    # sim is symmetric, so phi(y, x) for row x, column y is sim[x, y]
    conj = TNORMS[tnorm](member[None, :] * sim, member[None, :])
    return np.maximum(member, conj.max(axis=1))


def lower_approximation(table: DataTable | TableView, config: FuzzyConfig, k: int,
                        similarity: np.ndarray | None = None) -> np.ndarray:
    """Membership of every instance to the lower approximation of class ``k``."""
    view = as_view(table)
    _check_class(view, k)
    sim = similarity if similarity is not None else similarity_matrix(view, config)
    return _lower(sim, view.class_members(k), config.implicator)


def upper_approximation(table: DataTable | TableView, config: FuzzyConfig, k: int,
                        similarity: np.ndarray | None = None) -> np.ndarray:
    """Membership of every instance to the upper approximation of class ``k``."""
    view = as_view(table)
    _check_class(view, k)
    sim = similarity if similarity is not None else similarity_matrix(view, config)
    return _upper(sim, view.class_members(k), config.tnorm)


def compute_regions(table: DataTable | TableView, config: FuzzyConfig,
                    cache: DistanceCache | None = None) -> RegionMembership:
    """Region memberships for every instance and class.

    The similarity matrix is built once and shared by all classes. Pass a
    :class:`DistanceCache` to reuse distance matrices across calls that differ
    only in operators or smoothing.
    """
    view = as_view(table)
    sim = similarity_matrix(view, config, cache)
    n, n_classes = view.n_instances, view.n_classes
    pos = np.empty((n, n_classes))
    up = np.empty((n, n_classes))
    for k in range(n_classes):
        member = view.class_members(k)
        pos[:, k] = _lower(sim, member, config.implicator)
        up[:, k] = _upper(sim, member, config.tnorm)
    neg = 1.0 - up
    bnd = up - pos
    for arr in (pos, bnd, neg):
        arr.setflags(write=False)
    return RegionMembership(pos=pos, bnd=bnd, neg=neg, config_fingerprint=_fingerprint(view, config))


def write_membership_csv(path, regions: RegionMembership, class_labels=None) -> None:
    """Dump memberships as ``instance_id,class,pos,bnd,neg`` rows."""
    n, n_classes = regions.pos.shape
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance_id", "class", "pos", "bnd", "neg"])
        for k in range(n_classes):
            label = class_labels[k] if class_labels is not None else k
            for x in range(n):
                writer.writerow([x, label, _fmt(regions.pos[x, k]), _fmt(regions.bnd[x, k]),
                                 _fmt(regions.neg[x, k])])


def write_boundary_delta_csv(path, full: RegionMembership, masked: RegionMembership,
                             class_labels=None) -> None:
    """Per-instance boundary change ``masked - full`` for every class."""
    n, n_classes = full.bnd.shape
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance_id", "class", "bnd_full", "bnd_masked", "delta"])
        for k in range(n_classes):
            label = class_labels[k] if class_labels is not None else k
            for x in range(n):
                a, b = full.bnd[x, k], masked.bnd[x, k]
                writer.writerow([x, label, _fmt(a), _fmt(b), _fmt(b - a)])


def _fmt(value: float) -> str:
    return repr(round(float(value), 12))
