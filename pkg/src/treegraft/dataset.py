"""Attribute schemas, weighted examples and deterministic holdout splits.

Supports the classic UCI ``.names``/``.data`` file pair plus CSV with a
header row.  ``?`` (or an empty CSV cell) marks a missing value.  Example
order is preserved exactly as read: downstream tie-breaking depends on it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .rng import Xoshiro256StarStar

MISSING = None
CLASS_ATTR_NAME = "class"


class DataError(ValueError):
    """Malformed schema or data input; carries optional line context."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str  # "continuous" | "discrete" | "class"
    values: tuple[str, ...] = ()
    position: int = 0

    @property
    def is_continuous(self) -> bool:
        return self.kind == "continuous"


class Schema:
    """Ordered attribute list with the class attribute last."""

    def __init__(self, attributes: Sequence[AttributeSpec]):
        attrs = tuple(attributes)
        class_specs = [a for a in attrs if a.kind == "class"]
        if len(class_specs) != 1:
            raise DataError("schema must declare exactly one class attribute")
        if attrs[-1].kind != "class":
            raise DataError("class attribute must be last in the schema")
        seen = set()
        for i, a in enumerate(attrs):
            if a.position != i:
                raise DataError(f"attribute {a.name!r} has position {a.position}, expected {i}")
            if a.name in seen:
                raise DataError(f"duplicate attribute name {a.name!r}")
            seen.add(a.name)
            if a.kind in ("discrete", "class"):
                if not a.values:
                    raise DataError(f"attribute {a.name!r} has an empty value list")
                if len(set(a.values)) != len(a.values):
                    raise DataError(f"attribute {a.name!r} has duplicate values")
        self.attributes = attrs
        self.class_spec = attrs[-1]
        self.class_labels = self.class_spec.values
        self.inputs = attrs[:-1]
        self._by_name = {a.name: a for a in attrs}
        self._codes = {
            a.position: {v: i for i, v in enumerate(a.values)}
            for a in attrs
            if a.values
        }

    @property
    def n_classes(self) -> int:
        return len(self.class_labels)

    @property
    def continuous_positions(self) -> tuple[int, ...]:
        return tuple(a.position for a in self.inputs if a.is_continuous)

    @property
    def discrete_positions(self) -> tuple[int, ...]:
        return tuple(a.position for a in self.inputs if a.kind == "discrete")

    def by_name(self, name: str) -> AttributeSpec:
        try:
            return self._by_name[name]
        except KeyError:
            raise DataError(f"unknown attribute {name!r}") from None

    def label_code(self, label: str) -> int:
        try:
            return self._codes[self.class_spec.position][label]
        except KeyError:
            raise DataError(f"undeclared class label {label!r}") from None

    def value_code(self, position: int, symbol: str) -> int:
        try:
            return self._codes[position][symbol]
        except KeyError:
            raise DataError(
                f"undeclared value {symbol!r} for attribute "
                f"{self.attributes[position].name!r}"
            ) from None

    def __eq__(self, other) -> bool:
        return isinstance(other, Schema) and self.attributes == other.attributes

    def __hash__(self):
        return hash(self.attributes)


@dataclass(frozen=True)
class Example:
    """One weighted case; ``values`` has a slot per non-class attribute."""

    values: tuple
    label: str | None
    weight: float = 1.0


class Columns:
    """Dense per-attribute arrays; NaN / -1 encode missing values."""

    def __init__(self, dataset: "Dataset"):
        schema = dataset.schema
        n = len(dataset.examples)
        self.cont: dict[int, np.ndarray] = {}
        self.disc: dict[int, np.ndarray] = {}
        for spec in schema.inputs:
            if spec.is_continuous:
                col = np.full(n, np.nan)
                for i, ex in enumerate(dataset.examples):
                    v = ex.values[spec.position]
                    if v is not None:
                        col[i] = v
                self.cont[spec.position] = col
            else:
                col = np.full(n, -1, dtype=np.int64)
                for i, ex in enumerate(dataset.examples):
                    v = ex.values[spec.position]
                    if v is not None:
                        col[i] = schema.value_code(spec.position, v)
                self.disc[spec.position] = col
        self.labels = np.array(
            [
                schema.label_code(ex.label) if ex.label is not None else -1
                for ex in dataset.examples
            ],
            dtype=np.int64,
        )
        self.weights = np.array([ex.weight for ex in dataset.examples])
        self.n_classes = schema.n_classes


class Dataset:
    """Schema plus ordered examples, as read from a source file."""

    def __init__(self, schema: Schema, examples: Iterable[Example], provenance=("<memory>", "rows")):
        self.schema = schema
        self.examples = tuple(examples)
        self.provenance = provenance
        self._columns: Columns | None = None

    def __len__(self) -> int:
        return len(self.examples)

    def columns(self) -> Columns:
        if self._columns is None:
            self._columns = Columns(self)
        return self._columns

    @property
    def name(self) -> str:
        source = str(self.provenance[0])
        stem = source.rsplit("/", 1)[-1]
        return stem.split(".", 1)[0] if "." in stem else stem


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("|", 1)[0] for line in text.split("\n"))


def _split_entries(text: str):
    """Split ``.names`` text into period-terminated entries with line numbers.

    A period terminates an entry only when followed by whitespace or end of
    input, so decimal points inside values survive.
    """
    entries = []
    buf: list[str] = []
    line = 1
    entry_line = None
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
        if ch == "." and (i + 1 == len(text) or text[i + 1] in " \t\r\n"):
            entries.append(("".join(buf), entry_line if entry_line is not None else line))
            buf = []
            entry_line = None
        else:
            if not ch.isspace() and entry_line is None:
                entry_line = line
            buf.append(ch)
        i += 1
    if "".join(buf).strip():
        raise DataError("unterminated entry (missing final period)", entry_line)
    return entries


def parse_names(text: str) -> Schema:
    """Parse a ``.names`` schema: class labels first, then one attribute per entry."""
    entries = _split_entries(_strip_comments(text))
    if not entries:
        raise DataError("no entries found")
    class_text, class_line = entries[0]
    labels = tuple(v.strip() for v in class_text.split(",") if v.strip())
    if not labels:
        raise DataError("empty class label list", class_line)
    if len(set(labels)) != len(labels):
        raise DataError("duplicate class label", class_line)

    specs: list[AttributeSpec] = []
    seen: set[str] = set()
    for body, line in entries[1:]:
        if ":" not in body:
            raise DataError("attribute entry must look like 'name: ...'", line)
        name, _, rest = body.partition(":")
        name = name.strip()
        rest = rest.strip()
        if not name:
            raise DataError("empty attribute name", line)
        if name in seen or name == CLASS_ATTR_NAME:
            raise DataError(f"duplicate attribute name {name!r}", line)
        seen.add(name)
        if rest == "continuous":
            specs.append(AttributeSpec(name, "continuous", (), len(specs)))
        else:
            values = tuple(v.strip() for v in rest.split(",") if v.strip())
            if not values:
                raise DataError(f"attribute {name!r} has no values", line)
            if len(set(values)) != len(values):
                raise DataError(f"attribute {name!r} has duplicate values", line)
            specs.append(AttributeSpec(name, "discrete", values, len(specs)))
    specs.append(AttributeSpec(CLASS_ATTR_NAME, "class", labels, len(specs)))
    return Schema(specs)


def _parse_field(raw: str, spec: AttributeSpec, schema: Schema, line: int):
    token = raw.strip()
    if token == "?" or token == "":
        return MISSING
    if spec.is_continuous:
        try:
            return float(token)
        except ValueError:
            raise DataError(
                f"non-numeric value {token!r} for continuous attribute {spec.name!r}", line
            ) from None
    if token not in spec.values:
        raise DataError(f"undeclared value {token!r} for attribute {spec.name!r}", line)
    return token


def _example_from_fields(fields: list[str], schema: Schema, line: int, labeled: bool) -> Example:
    values = tuple(
        _parse_field(fields[spec.position], spec, schema, line) for spec in schema.inputs
    )
    label = None
    if labeled:
        token = fields[-1].strip()
        if token not in schema.class_labels:
            raise DataError(f"undeclared class label {token!r}", line)
        label = token
    return Example(values, label)


def parse_data(text: str, schema: Schema, allow_unlabeled: bool = False) -> Dataset:
    """Parse comma-separated records against ``schema``.

    ``?`` marks a missing value and a trailing period on a record is
    tolerated.  With ``allow_unlabeled`` a record may omit the class field.
    """
    n_inputs = len(schema.inputs)
    examples = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        row = line.strip()
        if not row:
            continue
        fields = row.split(",")
        if fields and fields[-1].strip().endswith("."):
            last = fields[-1].strip()[:-1]
            fields[-1] = last
        if len(fields) == n_inputs + 1:
            labeled = True
        elif allow_unlabeled and len(fields) == n_inputs:
            labeled = False
        else:
            raise DataError(
                f"expected {n_inputs + 1} fields, found {len(fields)}", lineno
            )
        examples.append(_example_from_fields(fields, schema, lineno, labeled))
    return Dataset(schema, examples, ("<string>", "data"))


def parse_csv(text: str, schema: Schema) -> Dataset:
    """Parse CSV with a header naming every schema attribute (any column order)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV input") from None
    header = [h.strip() for h in header]
    wanted = {a.name for a in schema.attributes}
    for name in header:
        if name not in wanted:
            raise DataError(f"unknown header name {name!r}", 1)
    if len(set(header)) != len(header):
        raise DataError("duplicate header name", 1)
    missing_cols = wanted - set(header)
    if missing_cols:
        raise DataError(f"missing header name(s): {sorted(missing_cols)}", 1)
    col_of = {name: i for i, name in enumerate(header)}

    examples = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"expected {len(header)} cells, found {len(row)}", lineno)
        ordered = [row[col_of[a.name]] for a in schema.attributes]
        examples.append(_example_from_fields(ordered, schema, lineno, labeled=True))
    return Dataset(schema, examples, ("<csv>", "csv"))


def format_data(dataset: Dataset) -> str:
    """Render a dataset back to ``.data`` text (missing values as ``?``)."""
    lines = []
    for ex in dataset.examples:
        fields = []
        for spec in dataset.schema.inputs:
            v = ex.values[spec.position]
            if v is None:
                fields.append("?")
            elif spec.is_continuous:
                fields.append(repr(v))
            else:
                fields.append(v)
        if ex.label is not None:
            fields.append(ex.label)
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SplitPlan:
    """Deterministic train/evaluation index split of a dataset."""

    seed: int
    train_fraction: float
    train_indices: tuple[int, ...]
    eval_indices: tuple[int, ...]


def make_split(dataset: Dataset, seed: int, train_fraction: float) -> SplitPlan:
    """Uniform random split: shuffle with xoshiro256**, take the first
    ``round(train_fraction * N)`` indices as training (round half up)."""
    n = len(dataset)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    n_train = int(np.floor(train_fraction * n + 0.5))
    if n_train == 0 or n_train == n:
        raise ValueError("dataset too small to split at this fraction")
    order = list(range(n))
    Xoshiro256StarStar(seed).shuffle(order)
    train = tuple(sorted(order[:n_train]))
    rest = tuple(sorted(order[n_train:]))
    return SplitPlan(seed, train_fraction, train, rest)


def load_names(path) -> Schema:
    with open(path, encoding="utf-8") as fh:
        return parse_names(fh.read())


def load_data(path, schema: Schema, allow_unlabeled: bool = False) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        ds = parse_data(fh.read(), schema, allow_unlabeled=allow_unlabeled)
    return Dataset(ds.schema, ds.examples, (str(path), "data"))


def load_csv(path, schema: Schema) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        ds = parse_csv(fh.read(), schema)
    return Dataset(ds.schema, ds.examples, (str(path), "csv"))


def bundled_path(name: str):
    """Directory entry for a bundled data file (``""`` for the directory)."""
    from importlib.resources import files

    return files("treegraft").joinpath("data").joinpath(name)


def load_bundled(name: str) -> Dataset:
    """Load a dataset shipped with the package by stem name."""
    schema = parse_names(bundled_path(f"{name}.names").read_text(encoding="utf-8"))
    ds = parse_data(bundled_path(f"{name}.data").read_text(encoding="utf-8"), schema)
    return Dataset(schema, ds.examples, (f"{name}.data", "data"))


def bundled_names() -> tuple[str, ...]:
    stems = sorted(
        p.name[: -len(".names")]
        for p in bundled_path("").iterdir()
        if p.name.endswith(".names")
    )
    return tuple(stems)
