"""Loading, validating and preprocessing mixed-type tabular data.

A :class:`DataTable` stores every feature in a single ``(n, m)`` float64
matrix: numeric columns are min-max scaled into ``[0, 1]`` and nominal
columns hold integer category codes. Tables are immutable; masking produces
a lightweight :class:`TableView` that only records which columns are hidden.
"""

from __future__ import annotations

import csv
import io
import json
import os
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import BinaryIO, Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError, ValidationError

MISSING_TOKENS = frozenset({"", "?", "NA", "NaN", "nan"})


class FeatureKind(str, Enum):
    NUMERIC = "numeric"
    NOMINAL = "nominal"


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: FeatureKind
    protected: bool = False
    categories: tuple[str, ...] = ()
    observed_min: float | None = None
    observed_max: float | None = None
    constant: bool = False

    @property
    def is_numeric(self) -> bool:
        return self.kind is FeatureKind.NUMERIC

    def denormalize(self, values):
        """Map scaled values back to the original numeric range."""
        if not self.is_numeric:
            raise ValidationError(f"feature {self.name!r} is not numeric", module="dataset")
        values = np.asarray(values, dtype=float)
        if self.constant:
            return np.full_like(values, self.observed_min)
        span = self.observed_max - self.observed_min
        return values * span + self.observed_min

    def normalize(self, values):
        if not self.is_numeric:
            raise ValidationError(f"feature {self.name!r} is not numeric", module="dataset")
        values = np.asarray(values, dtype=float)
        if self.constant:
            return np.zeros_like(values)
        return (values - self.observed_min) / (self.observed_max - self.observed_min)


def _freeze(array):
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DataTable:
    """Validated, normalized dataset with crisp class labels.

    Parameters
    ----------
    schema : tuple of FeatureSpec
    values : ndarray of shape (n_instances, n_features)
        Scaled numeric values or nominal category codes. ``NaN`` marks a
        missing cell and only appears when the table was loaded with
        ``allow_missing=True``.
    labels : ndarray of int, shape (n_instances,)
        Class codes ``0..K-1``.
    class_labels : tuple of str
        Original label for every class code.
    groups : mapping of str to bool ndarray
        Auxiliary group columns (for baseline fairness metrics). They are
        never part of the feature set.
    """

    schema: tuple[FeatureSpec, ...]
    values: np.ndarray
    labels: np.ndarray
    class_labels: tuple[str, ...]
    groups: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if values.ndim != 2 or values.shape[1] != len(self.schema):
            raise ValidationError("values must be (n_instances, n_features)", module="dataset")
        if labels.shape != (values.shape[0],):
            raise ValidationError("labels must have one entry per instance", module="dataset")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.class_labels)):
            raise ValidationError("class codes must lie in 0..K-1", module="dataset")
        names = [f.name for f in self.schema]
        if len(set(names)) != len(names):
            raise ValidationError("feature names must be unique", module="dataset")
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "labels", _freeze(labels))
        object.__setattr__(self, "groups", {k: _freeze(np.asarray(v, dtype=bool)) for k, v in self.groups.items()})

    @property
    def n_instances(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    @property
    def feature_names(self) -> list[str]:
        return [f.name for f in self.schema]

    @property
    def protected_indices(self) -> list[int]:
        return [i for i, f in enumerate(self.schema) if f.protected]

    @property
    def has_missing(self) -> bool:
        return bool(np.isnan(self.values).any())

    def column(self, index: int) -> np.ndarray:
        return self.values[:, index]

    def feature_index(self, name: str) -> int:
        for i, spec in enumerate(self.schema):
            if spec.name == name:
                return i
        raise ValidationError(
            f"unknown feature {name!r}; valid features: {', '.join(self.feature_names)}",
            module="dataset",
        )

    def class_members(self, k: int) -> np.ndarray:
        """Crisp membership of every instance to class ``k`` as 0.0/1.0."""
        return (self.labels == k).astype(np.float64)

    def with_protected(self, names: Iterable[str]) -> "DataTable":
        """Copy of the table whose protected flags are exactly ``names``."""
        wanted = set(names)
        for name in wanted:
            self.feature_index(name)
        schema = tuple(replace(f, protected=f.name in wanted) for f in self.schema)
        return replace(self, schema=schema)


@dataclass(frozen=True)
class FeatureMask:
    excluded: frozenset = frozenset()

    def __init__(self, excluded: Iterable[int] = ()):
        object.__setattr__(self, "excluded", frozenset(int(i) for i in excluded))

    def union(self, other: "FeatureMask") -> "FeatureMask":
        return FeatureMask(self.excluded | other.excluded)

    def validate(self, n_features: int) -> None:
        bad = [i for i in self.excluded if not 0 <= i < n_features]
        if bad:
            raise ValidationError(f"mask refers to unknown feature indices {sorted(bad)}", module="dataset")
        if len(self.excluded) >= n_features:
            raise ValidationError("mask excludes every feature; at least one must remain active", module="dataset")


@dataclass(frozen=True, eq=False)
class TableView:
    """A table with some feature columns hidden. Holds no copied data."""

    table: DataTable
    mask: FeatureMask = FeatureMask()

    def __post_init__(self):
        self.mask.validate(self.table.n_features)

    @property
    def active(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.table.n_features) if i not in self.mask.excluded)

    @property
    def n_active(self) -> int:
        return self.table.n_features - len(self.mask.excluded)

    @property
    def labels(self) -> np.ndarray:
        return self.table.labels

    @property
    def n_instances(self) -> int:
        return self.table.n_instances

    @property
    def n_classes(self) -> int:
        return self.table.n_classes

    @property
    def schema(self) -> tuple[FeatureSpec, ...]:
        return tuple(self.table.schema[i] for i in self.active)

    def class_members(self, k: int) -> np.ndarray:
        return self.table.class_members(k)


def apply_mask(table: DataTable | TableView, mask: FeatureMask) -> TableView:
    """Hide the masked columns. Masking a view composes with its mask."""
    if isinstance(table, TableView):
        return TableView(table.table, table.mask.union(mask))
    return TableView(table, mask)


def as_view(table: DataTable | TableView) -> TableView:
    return table if isinstance(table, TableView) else TableView(table)


# ---------------------------------------------------------------------------
# Parsing


@dataclass(frozen=True)
class ColumnHint:
    name: str
    kind: FeatureKind | None = None
    protected: bool = False


@dataclass(frozen=True)
class SchemaHint:
    """Optional schema descriptor controlling how raw columns are read.

    ``columns`` lists every non-label column in file order. ``label`` names the
    class column (defaults to the last column). ``classes`` pins the class
    order; labels not listed are rejected.
    """

    columns: tuple[ColumnHint, ...] = ()
    label: str | None = None
    classes: tuple[str, ...] | None = None

    @classmethod
    def from_dict(cls, data: Mapping) -> "SchemaHint":
        try:
            cols = tuple(
                ColumnHint(
                    name=str(c["name"]),
                    kind=FeatureKind(c["kind"]) if c.get("kind") else None,
                    protected=bool(c.get("protected", False)),
                )
                for c in data.get("columns", ())
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"malformed schema descriptor: {exc}", module="dataset") from exc
        classes = data.get("classes")
        return cls(
            columns=cols,
            label=data.get("label"),
            classes=tuple(str(c) for c in classes) if classes is not None else None,
        )


def read_schema(path: str | os.PathLike) -> SchemaHint:
    """Read a JSON schema descriptor file."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"schema file {path}: {exc}") from exc
    return SchemaHint.from_dict(data)


def _read_rows(text: str, fmt: str) -> tuple[list[str] | None, list[list[str]]]:
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        rows = [row for row in reader if row]
        if not rows:
            raise ParseError("empty input")
        return [h.strip() for h in rows[0]], [[c.strip() for c in r] for r in rows[1:]]
    if fmt in ("whitespace", "german"):
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows:
            raise ParseError("empty input")
        return None, rows
    raise ValidationError(f"unknown table format {fmt!r}", module="dataset")


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def load_table(
    source: BinaryIO | bytes | str | os.PathLike,
    schema_hint: SchemaHint | None = None,
    fmt: str = "csv",
    allow_missing: bool = False,
) -> DataTable:
    """Parse a delimited table into a normalized :class:`DataTable`.

    Parameters
    ----------
    source : path, bytes or binary stream
    schema_hint : SchemaHint, optional
        Declares column names, kinds and protected flags. Without it, a
        column is numeric when every cell parses as a float.
    fmt : {"csv", "whitespace", "german"}
        ``csv`` expects a header row; the other two are headerless and
        whitespace-delimited. ``german`` applies the UCI German Credit column
        schema.
    allow_missing : bool
        Keep missing cells as NaN instead of rejecting the table.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            raw = fh.read()
    elif isinstance(source, bytes):
        raw = source
    else:
        raw = source.read()
    text = raw.decode("utf-8-sig")
    if fmt == "german" and schema_hint is None:
        schema_hint = GERMAN_SCHEMA
    header, rows = _read_rows(text, fmt)

    width = len(header) if header is not None else len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            # 1-based, counting the header line when present
            lineno = r + (2 if header is not None else 1)
            raise ParseError(f"expected {width} fields, found {len(row)}", row=lineno)
    if width < 2:
        raise ParseError("table needs at least one feature column and a label column")

    if header is None:
        if schema_hint is not None and schema_hint.columns:
            header = [c.name for c in schema_hint.columns] + [schema_hint.label or "class"]
        else:
            header = [f"f{i + 1}" for i in range(width - 1)] + ["class"]
    if len(header) != width:
        raise ValidationError(
            f"schema declares {len(header)} columns but the data has {width}", module="dataset"
        )

    label_name = schema_hint.label if schema_hint is not None and schema_hint.label else header[-1]
    if label_name not in header:
        raise ValidationError(f"label column {label_name!r} not found", module="dataset")
    label_pos = header.index(label_name)

    hints = {}
    if schema_hint is not None:
        hints = {c.name: c for c in schema_hint.columns}
        unknown = set(hints) - set(header)
        if unknown:
            raise ValidationError(f"schema names unknown columns {sorted(unknown)}", module="dataset")

    labels_raw = [row[label_pos] for row in rows]
    for r, lab in enumerate(labels_raw):
        if lab in MISSING_TOKENS:
            raise ValidationError(f"row {r + 1}: missing class label", module="dataset")
    if schema_hint is not None and schema_hint.classes is not None:
        class_labels = tuple(schema_hint.classes)
        unknown = sorted(set(labels_raw) - set(class_labels))
        if unknown:
            raise ValidationError(f"unknown class labels {unknown}", module="dataset")
    else:
        class_labels = tuple(dict.fromkeys(labels_raw))
    code_of = {lab: i for i, lab in enumerate(class_labels)}
    labels = np.array([code_of[lab] for lab in labels_raw], dtype=np.int64)

    specs = []
    columns = []
    for c, name in enumerate(header):
        if c == label_pos:
            continue
        cells = [row[c] for row in rows]
        missing = [i for i, cell in enumerate(cells) if cell in MISSING_TOKENS]
        if missing and not allow_missing:
            raise ValidationError(
                f"missing value in column {name!r} at row {missing[0] + 1} (use allow_missing)",
                module="dataset",
            )
        hint = hints.get(name)
        kind = hint.kind if hint is not None else None
        present = [cell for cell in cells if cell not in MISSING_TOKENS]
        if kind is None:
            numeric = bool(present) and all(_parse_float(cell) is not None for cell in present)
            kind = FeatureKind.NUMERIC if numeric else FeatureKind.NOMINAL
        protected = hint.protected if hint is not None else False
        spec, col = _encode_column(name, kind, protected, cells)
        specs.append(spec)
        columns.append(col)

    values = np.column_stack(columns) if columns else np.empty((len(rows), 0))
    return DataTable(schema=tuple(specs), values=values, labels=labels, class_labels=class_labels)


def _encode_column(name, kind, protected, cells):
    miss = np.array([cell in MISSING_TOKENS for cell in cells])
    if kind is FeatureKind.NUMERIC:
        raw = np.full(len(cells), np.nan)
        for i, cell in enumerate(cells):
            if miss[i]:
                continue
            v = _parse_float(cell)
            if v is None or not np.isfinite(v):
                raise ValidationError(f"non-numeric value {cell!r} in numeric column {name!r}", module="dataset")
            raw[i] = v
        lo, hi = float(np.nanmin(raw)), float(np.nanmax(raw))
        constant = lo == hi
        spec = FeatureSpec(name, kind, protected, observed_min=lo, observed_max=hi, constant=constant)
        if constant:
            warnings.warn(f"numeric column {name!r} is constant; mapped to 0.0", stacklevel=3)
        return spec, spec.normalize(raw)
    categories = tuple(dict.fromkeys(cell for i, cell in enumerate(cells) if not miss[i]))
    if not categories:
        raise ValidationError(f"nominal column {name!r} has no observed categories", module="dataset")
    code = {c: i for i, c in enumerate(categories)}
    col = np.array([np.nan if miss[i] else code[cell] for i, cell in enumerate(cells)], dtype=float)
    return FeatureSpec(name, kind, protected, categories=categories), col


# ---------------------------------------------------------------------------
# German Credit

_N, _C = FeatureKind.NUMERIC, FeatureKind.NOMINAL

# UCI attribute order; names follow the usual descriptive labels.
GERMAN_COLUMNS = (
    ("checking_account", _C),
    ("months", _N),
    ("credit_history", _C),
    ("purpose", _C),
    ("credit_amount", _N),
    ("savings_account", _C),
    ("employment_since", _C),
    ("installment_rate", _N),
    ("personal_status_sex", _C),
    ("other_debtors", _C),
    ("residence_since", _N),
    ("property", _C),
    ("age", _N),
    ("other_installment", _C),
    ("housing", _C),
    ("existing_credits", _N),
    ("job", _C),
    ("people_liable", _N),
    ("telephone", _C),
    ("foreign_worker", _C),
)

GERMAN_SCHEMA = SchemaHint(
    columns=tuple(ColumnHint(name, kind) for name, kind in GERMAN_COLUMNS),
    label="credit_risk",
    classes=("1", "2"),
)

FEMALE_CODES = frozenset({"A92", "A95"})
MALE_CODES = frozenset({"A91", "A93", "A94"})


def german_credit_adapter(raw: DataTable) -> DataTable:
    """Recode personal status & sex into binary gender and flag protected features.

    ``A92`` and ``A95`` become ``female``; ``A91``, ``A93`` and ``A94`` become
    ``male``. Gender and age are marked protected, nothing else changes.
    """
    try:
        j = raw.feature_index("personal_status_sex")
    except ValidationError:
        raise ValidationError(
            "personal_status_sex not present; the German Credit adapter was already applied "
            "or the table is not in UCI encoding",
            module="dataset",
        ) from None
    spec = raw.schema[j]
    codes = raw.column(j)
    if np.isnan(codes).any():
        raise ValidationError("missing personal status code", module="dataset")
    genders = ("male", "female")
    mapping = {}
    for code, status in enumerate(spec.categories):
        if status in FEMALE_CODES:
            mapping[code] = 1
        elif status in MALE_CODES:
            mapping[code] = 0
        else:
            raise ValidationError(f"unknown personal status code {status!r}", module="dataset")
    new_col = np.array([mapping[int(c)] for c in codes], dtype=float)
    values = raw.values.copy()
    values[:, j] = new_col
    schema = list(raw.schema)
    schema[j] = FeatureSpec("gender", FeatureKind.NOMINAL, protected=True, categories=genders)
    age = raw.feature_index("age")
    schema[age] = replace(schema[age], protected=True)
    return replace(raw, schema=tuple(schema), values=values)


def load_german(path: str | os.PathLike | None = None) -> DataTable:
    """Load the UCI ``german.data`` file and apply :func:`german_credit_adapter`.

    Without a path the copy bundled with the package is used.
    """
    if path is None:
        raw = resources.files("frubias").joinpath("data/german.data").read_bytes()
        return german_credit_adapter(load_table(raw, fmt="german"))
    return german_credit_adapter(load_table(path, fmt="german"))


def binarize_age(table: DataTable, threshold_years: float, column: str = "age",
                 group_name: str | None = None) -> DataTable:
    """Add a boolean group column marking instances younger than the threshold.

    ``True`` means *young* (``age < threshold_years``), the unprivileged group.
    The age feature itself is left untouched.
    """
    j = table.feature_index(column)
    spec = table.schema[j]
    if not spec.is_numeric:
        raise ValidationError(f"column {column!r} is not numeric", module="dataset")
    years = spec.denormalize(table.column(j))
    young = years < threshold_years
    if young.all() or not young.any():
        warnings.warn(
            f"threshold {threshold_years} lies outside the observed {column} range; one group is empty",
            stacklevel=2,
        )
    groups = dict(table.groups)
    groups[group_name or f"{column}<{threshold_years:g}"] = young
    return replace(table, groups=groups)


def category_group(table: DataTable, column: str, category: str,
                   group_name: str | None = None) -> DataTable:
    """Add a boolean group column marking instances whose nominal value is ``category``."""
    j = table.feature_index(column)
    spec = table.schema[j]
    if spec.is_numeric:
        raise ValidationError(f"column {column!r} is numeric; use a threshold", module="dataset")
    if category not in spec.categories:
        raise ValidationError(
            f"category {category!r} not in {column!r} (have {', '.join(spec.categories)})",
            module="dataset",
        )
    members = table.column(j) == spec.categories.index(category)
    groups = dict(table.groups)
    groups[group_name or f"{column}={category}"] = members
    return replace(table, groups=groups)


def feature_names_to_mask(table: DataTable, names: Sequence[str]) -> FeatureMask:
    return FeatureMask(table.feature_index(n) for n in names)
