"""Heterogeneous Manhattan/Euclidean-Overlap distances.

Per attribute, nominal features contribute the overlap distance (0 if the
codes match, else 1) and numeric features the absolute difference of their
range-scaled values. A missing value on either side contributes 1.
"""

from __future__ import annotations

from collections import OrderedDict
from threading import Lock

import numpy as np

from .dataset import DataTable, TableView, as_view
from .errors import ValidationError
from .operators import DistanceKind


def _attribute_delta(spec, a, b):
    if spec.is_numeric:
        delta = np.abs(a - b)
    else:
        delta = (a != b).astype(np.float64)
    nan = np.isnan(a) | np.isnan(b)
    if np.any(nan):
        delta = np.where(nan, 1.0, delta)
    return delta


def _finish(acc, kind, m, normalize):
    if kind is DistanceKind.HEOM:
        acc = np.sqrt(acc)
        return acc / np.sqrt(m) if normalize else acc
    return acc / m if normalize else acc


def hetero_distance(kind, table: DataTable | TableView, i: int, j: int, normalize: bool = False) -> float:
    """Distance between instances ``i`` and ``j`` over the active features."""
    kind = DistanceKind(kind)
    view = as_view(table)
    active = view.active
    if not active:
        raise ValidationError("no active features", module="fuzzy-core")
    values = view.table.values
    acc = 0.0
    for a in active:
        delta = float(_attribute_delta(view.table.schema[a], values[i, a], values[j, a]))
        acc += delta if kind is DistanceKind.HMOM else delta * delta
    return float(_finish(acc, kind, len(active), normalize))


def pairwise_distances(kind, table: DataTable | TableView, normalize: bool = False) -> np.ndarray:
    """Full ``(n, n)`` distance matrix.

    Columns are accumulated in ascending feature order so results are
    bit-reproducible for a given view.
    """
    kind = DistanceKind(kind)
    view = as_view(table)
    active = view.active
    if not active:
        raise ValidationError("no active features", module="fuzzy-core")
    values = view.table.values
    n = view.n_instances
    acc = np.zeros((n, n))
    for a in active:
        col = values[:, a]
        delta = _attribute_delta(view.table.schema[a], col[:, None], col[None, :])
        if kind is DistanceKind.HEOM:
            delta = delta * delta
        acc += delta
    return _finish(acc, kind, len(active), normalize)


class DistanceCache:
    """Small LRU of distance matrices keyed by (mask, kind, normalization).

    One cache belongs to one table. Thread-safe; a matrix is computed at most
    once even under concurrent requests for the same key.
    """

    def __init__(self, table: DataTable, maxsize: int = 32):
        self.table = table
        self.maxsize = maxsize
        self._store: OrderedDict = OrderedDict()
        self._lock = Lock()
        self._key_locks: dict = {}
        self.misses = 0

    def get(self, view: TableView, kind, normalize: bool) -> np.ndarray:
        if view.table is not self.table:
            raise ValidationError("view belongs to a different table", module="granulation")
        key = (view.mask.excluded, DistanceKind(kind), bool(normalize))
        with self._lock:
            if key in self._store:
                self._store.move_to_end(key)
                return self._store[key]
            key_lock = self._key_locks.setdefault(key, Lock())
        with key_lock:
            with self._lock:
                if key in self._store:
                    return self._store[key]
            matrix = pairwise_distances(kind, view, normalize)
            matrix.setflags(write=False)
            with self._lock:
                self.misses += 1
                self._store[key] = matrix
                while len(self._store) > self.maxsize:
                    self._store.popitem(last=False)
                self._key_locks.pop(key, None)
            return matrix
