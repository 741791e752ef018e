"""Fuzzy implicators, t-norms and the exponential similarity relation.

The public :func:`implicate` and :func:`tnorm` accept scalars or arrays and
check the ``[0, 1]`` domain. Granulation uses the unchecked tables
``IMPLICATORS`` and ``TNORMS`` directly on whole similarity matrices.

Closed forms are arranged so that crisp arguments give exact results in
floating point, e.g. Lukasiewicz ``T(x, 1)`` is ``x - (1 - 1)`` rather than
``x + 1 - 1``, which would round.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, DomainError


class ImplicatorKind(str, Enum):
    STANDARD = "standard"
    KLEENE_DIENES = "kleene-dienes"
    LUKASIEWICZ = "lukasiewicz"
    ZADEH = "zadeh"
    GOEDEL = "goedel"
    LARSEN = "larsen"
    MAMDANI = "mamdani"
    REICHENBACH = "reichenbach"
    YAGER = "yager"
    GOGUEN = "goguen"


class TNormKind(str, Enum):
    MINIMUM = "minimum"
    PRODUCT = "product"
    LUKASIEWICZ = "lukasiewicz"
    DRASTIC = "drastic"


class DistanceKind(str, Enum):
    HMOM = "hmom"
    HEOM = "heom"


def _standard(x, y):
    return np.where(x <= y, 1.0, 0.0)


def _goedel(x, y):
    return np.where(x <= y, 1.0, y)


def _goguen(x, y):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(x <= y, 1.0, y / np.where(x > 0, x, 1.0))


def _yager(x, y):
    # numpy already evaluates 0.0 ** 0.0 as 1.0; the explicit branch documents it
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where((x == 0) & (y == 0), 1.0, np.power(y, x))


IMPLICATORS = {
    ImplicatorKind.STANDARD: _standard,
    ImplicatorKind.KLEENE_DIENES: lambda x, y: np.maximum(1.0 - x, y),
    ImplicatorKind.LUKASIEWICZ: lambda x, y: np.minimum(1.0 - x + y, 1.0),
    ImplicatorKind.ZADEH: lambda x, y: np.maximum(1.0 - x, np.minimum(x, y)),
    ImplicatorKind.GOEDEL: _goedel,
    ImplicatorKind.LARSEN: lambda x, y: x * y,
    ImplicatorKind.MAMDANI: lambda x, y: np.minimum(x, y),
    ImplicatorKind.REICHENBACH: lambda x, y: 1.0 - x * (1.0 - y),
    ImplicatorKind.YAGER: _yager,
    ImplicatorKind.GOGUEN: _goguen,
}


def _drastic(x, y):
    return np.where(y == 1.0, x, np.where(x == 1.0, y, 0.0))


TNORMS = {
    TNormKind.MINIMUM: lambda x, y: np.minimum(x, y),
    TNormKind.PRODUCT: lambda x, y: x * y,
    TNormKind.LUKASIEWICZ: lambda x, y: np.maximum(0.0, x - (1.0 - y)),
    TNormKind.DRASTIC: _drastic,
}


def _check_unit(name, value):
    arr = np.asarray(value, dtype=float)
    if np.isnan(arr).any() or (arr < 0).any() or (arr > 1).any():
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}", module="fuzzy-core")
    return arr


def _result(out, a, b):
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        return float(out)
    return out


def implicate(kind, a, b):
    """Evaluate the fuzzy implicator ``kind`` at ``(a, b)``."""
    kind = ImplicatorKind(kind)
    x, y = _check_unit("a", a), _check_unit("b", b)
    return _result(IMPLICATORS[kind](x, y), a, b)


def tnorm(kind, a, b):
    """Evaluate the t-norm ``kind`` at ``(a, b)``."""
    kind = TNormKind(kind)
    x, y = _check_unit("a", a), _check_unit("b", b)
    return _result(TNORMS[kind](x, y), a, b)


@dataclass(frozen=True)
class FuzzyConfig:
    """Operator choice and smoothing for one granulation.

    ``normalize_distance`` divides HMOM by the active feature count and HEOM by
    its square root. It is off by default: the raw aggregate is what makes
    suppressing one feature visibly change the similarity relation.
    """

    implicator: ImplicatorKind = ImplicatorKind.LUKASIEWICZ
    tnorm: TNormKind = TNormKind.MINIMUM
    distance: DistanceKind = DistanceKind.HMOM
    smoothing: float = 0.5
    normalize_distance: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "implicator", ImplicatorKind(self.implicator))
            object.__setattr__(self, "tnorm", TNormKind(self.tnorm))
            object.__setattr__(self, "distance", DistanceKind(self.distance))
        except ValueError as exc:
            raise ConfigurationError(str(exc), module="fuzzy-core") from exc
        lam = float(self.smoothing)
        if not np.isfinite(lam) or lam <= 0:
            raise ConfigurationError(f"smoothing parameter must be > 0, got {self.smoothing!r}",
                                     module="fuzzy-core")
        object.__setattr__(self, "smoothing", lam)

    def as_dict(self) -> dict:
        return {
            "implicator": self.implicator.value,
            "tnorm": self.tnorm.value,
            "distance": self.distance.value,
            "lambda": self.smoothing,
            "normalize_distance": self.normalize_distance,
        }

    def fingerprint(self, extra: str = "") -> str:
        text = repr(sorted(self.as_dict().items())) + extra
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def similarity(config: FuzzyConfig | float, d):
    """Exponential similarity ``exp(-lambda * d)``.

    ``config`` may be a :class:`FuzzyConfig` or the smoothing value itself.
    """
    lam = config.smoothing if isinstance(config, FuzzyConfig) else float(config)
    if not lam > 0:
        raise ConfigurationError(f"smoothing parameter must be > 0, got {lam!r}", module="fuzzy-core")
    d_arr = np.asarray(d, dtype=float)
    if (d_arr < 0).any():
        raise DomainError("distance must be non-negative", module="fuzzy-core")
    out = np.exp(-lam * d_arr)
    return float(out) if np.ndim(d) == 0 else out
