"""Domain types and on-disk formats for feature matrices, labels, selections.

Two fixed binary layouts are the interchange contract with external feature
exporters:

* FSEL (features): magic ``FSEL``, u32 LE version (=1), u64 LE sample count
  ``n``, u64 LE feature dimension ``k``, u32 LE extractor-id byte length,
  the id as UTF-8, then ``n * k`` float32 LE values, row-major.
* LSEL (labels): magic ``LSEL``, u32 LE version (=1), u64 LE ``n``,
  u64 LE class count ``c``, then ``n`` u32 LE labels.

CSV fallbacks exist for both: comma-separated rows for features, one
integer per line for labels.  Lines starting with ``#`` are metadata
comments; the feature writer records the extractor id in one so that a
binary -> CSV -> binary conversion is lossless.

Values are stored as 32-bit floats, but all downstream arithmetic is done
in 64-bit.  Loaded objects are immutable (backing arrays are marked
read-only) and safe to share across threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    DuplicateExtractorError,
    FormatError,
    LabelOutOfRangeError,
    NonFiniteValueError,
    SampleCountMismatchError,
    ValidationError,
)

_FSEL_MAGIC = b"FSEL"
_LSEL_MAGIC = b"LSEL"
_FORMAT_VERSION = 1

# CSV float formatting: 9 significant digits round-trip any binary32 value.
_CSV_FLOAT_FMT = "%.9g"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(eq=False)
class FeatureMatrix:
    """Dense per-sample feature matrix from a single extractor.

    ``data`` is an (n, k) float array; float32 is the storage dtype, but
    float64 matrices (e.g. outputs of in-memory transforms) are accepted
    and only narrowed when saved.
    """

    extractor_id: str
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.dtype not in (np.float32, np.float64):
            data = data.astype(np.float64)
        if data.ndim != 2:
            raise DimensionMismatchError(
                f"feature data must be 2-D, got shape {data.shape}"
            )
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValidationError(f"feature matrix must be at least 1x1, got {data.shape}")
        if not np.isfinite(data).all():
            raise NonFiniteValueError(
                f"feature matrix {self.extractor_id!r} contains NaN or Inf"
            )
        self.data = _freeze(data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def k(self) -> int:
        return self.data.shape[1]


@dataclass(eq=False)
class LabelVector:
    """Integer class labels in [0, c) with every class represented."""

    labels: np.ndarray
    c: int

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] < 1:
            raise ValidationError(f"labels must be a non-empty 1-D array, got shape {labels.shape}")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == labels.astype(np.int64)):
                raise ValidationError("labels must be integers")
        labels = labels.astype(np.int64)
        if self.c < 1:
            raise ValidationError(f"class count must be >= 1, got {self.c}")
        if labels.min() < 0 or labels.max() >= self.c:
            raise LabelOutOfRangeError(
                f"labels must lie in [0, {self.c}), got range "
                f"[{labels.min()}, {labels.max()}]"
            )
        present = np.bincount(labels, minlength=self.c) > 0
        if not present.all():
            missing = np.flatnonzero(~present).tolist()
            raise LabelOutOfRangeError(f"classes with no samples: {missing}")
        self.labels = _freeze(labels)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def class_indices(self, class_id: int) -> np.ndarray:
        """Sample indices of one class, in ascending order."""
        return np.flatnonzero(self.labels == class_id)

    def class_sizes(self) -> np.ndarray:
        """Per-class sample counts, indexed by class id."""
        return np.bincount(self.labels, minlength=self.c)


@dataclass(eq=False)
class FeatureBundle:
    """Feature matrices from m extractors over the same samples, plus labels."""

    matrices: tuple[FeatureMatrix, ...]
    labels: LabelVector

    def __post_init__(self) -> None:
        self.matrices = tuple(self.matrices)
        if len(self.matrices) < 1:
            raise ValidationError("bundle needs at least one feature matrix")
        n = self.labels.n
        for fm in self.matrices:
            if fm.n != n:
                raise SampleCountMismatchError(
                    f"matrix {fm.extractor_id!r} has n={fm.n}, labels have n={n}"
                )
        ids = [fm.extractor_id for fm in self.matrices]
        if len(set(ids)) != len(ids):
            raise DuplicateExtractorError(f"duplicate extractor ids in {ids}")

    @property
    def n(self) -> int:
        return self.labels.n

    @property
    def m(self) -> int:
        return len(self.matrices)

    def matrix(self, extractor_id: str) -> FeatureMatrix:
        for fm in self.matrices:
            if fm.extractor_id == extractor_id:
                return fm
        raise ValidationError(f"no matrix with extractor_id {extractor_id!r}")


@dataclass(eq=False)
class SelectionResult:
    """Outcome of one selection run: chosen indices plus provenance."""

    selected: np.ndarray
    per_class_budget: dict[int, int]
    p: float
    method: str
    n: int
    scores: np.ndarray | None = field(default=None)

    def __post_init__(self) -> None:
        sel = np.asarray(self.selected, dtype=np.int64)
        sel = np.sort(sel)
        if sel.size > 0:
            if sel[0] < 0 or sel[-1] >= self.n:
                raise ValidationError(
                    f"selected indices must lie in [0, {self.n})"
                )
            if np.any(np.diff(sel) == 0):
                raise ValidationError("selected indices must be unique")
        if sum(self.per_class_budget.values()) != sel.size:
            raise ValidationError(
                "per-class budget counts must sum to the selection size"
            )
        self.selected = _freeze(sel)
        if self.scores is not None:
            self.scores = _freeze(np.asarray(self.scores, dtype=np.float64))


def save_features(m: FeatureMatrix, path: str | Path) -> None:
    """Write an FSEL file; byte-for-byte deterministic for identical input."""
    id_bytes = m.extractor_id.encode("utf-8")
    header = (
        _FSEL_MAGIC
        + struct.pack("<I", _FORMAT_VERSION)
        + struct.pack("<QQ", m.n, m.k)
        + struct.pack("<I", len(id_bytes))
        + id_bytes
    )
    payload = np.ascontiguousarray(m.data, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def _read_exact(buf: bytes, offset: int, size: int, what: str) -> tuple[bytes, int]:
    end = offset + size
    if end > len(buf):
        raise FormatError(f"truncated file: {what} needs {size} bytes at offset {offset}")
    return buf[offset:end], end


def _load_features_binary(path: Path) -> FeatureMatrix:
    buf = path.read_bytes()
    magic, off = _read_exact(buf, 0, 4, "magic")
    if magic != _FSEL_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {_FSEL_MAGIC!r}")
    raw, off = _read_exact(buf, off, 4, "version")
    version = struct.unpack("<I", raw)[0]
    if version != _FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    raw, off = _read_exact(buf, off, 16, "dimensions")
    n, k = struct.unpack("<QQ", raw)
    raw, off = _read_exact(buf, off, 4, "extractor id length")
    id_len = struct.unpack("<I", raw)[0]
    raw, off = _read_exact(buf, off, id_len, "extractor id")
    extractor_id = raw.decode("utf-8")
    payload, off = _read_exact(buf, off, 4 * n * k, "feature payload")
    if off != len(buf):
        raise FormatError(f"{len(buf) - off} trailing bytes after payload")
    if n < 1 or k < 1:
        raise FormatError(f"header declares empty matrix n={n}, k={k}")
    data = np.frombuffer(payload, dtype="<f4").astype(np.float32).reshape(n, k)
    return FeatureMatrix(extractor_id=extractor_id, data=data)


def _csv_rows(path: Path) -> tuple[list[str], list[str]]:
    """Split a CSV file into leading '#' metadata lines and data lines."""
    text = path.read_text(encoding="utf-8")
    comments: list[str] = []
    rows: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comments.append(stripped)
        else:
            rows.append(stripped)
    return comments, rows


def _load_features_csv(path: Path) -> FeatureMatrix:
    comments, rows = _csv_rows(path)
    if not rows:
        raise FormatError(f"no data rows in {path}")
    extractor_id = path.stem
    for comment in comments:
        body = comment.lstrip("#").strip()
        if body.startswith("extractor_id:"):
            extractor_id = body.split(":", 1)[1].strip()
    parsed: list[list[float]] = []
    width = None
    for lineno, row in enumerate(rows, start=1):
        cells = row.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(
                f"ragged CSV: row {lineno} has {len(cells)} cells, expected {width}"
            )
        try:
            parsed.append([float(cell) for cell in cells])
        except ValueError as exc:
            raise FormatError(f"unparseable number in row {lineno}: {exc}") from exc
    data = np.asarray(parsed, dtype=np.float64).astype(np.float32)
    return FeatureMatrix(extractor_id=extractor_id, data=data)


def load_features(path: str | Path, format: str = "binary") -> FeatureMatrix:
    """Load and validate a feature matrix.

    Binary loads are bit-exact inverses of :func:`save_features`.
    """
    path = Path(path)
    if format == "binary":
        return _load_features_binary(path)
    if format == "csv":
        return _load_features_csv(path)
    raise ValidationError(f"unknown feature format {format!r}")


def save_features_csv(m: FeatureMatrix, path: str | Path) -> None:
    """CSV fallback writer; 9 significant digits round-trip float32 exactly."""
    values = np.ascontiguousarray(m.data, dtype=np.float32)
    lines = [f"# extractor_id: {m.extractor_id}"]
    for row in values:
        lines.append(",".join(_CSV_FLOAT_FMT % float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_labels(y: LabelVector, path: str | Path) -> None:
    """Write an LSEL file; deterministic for identical input."""
    header = (
        _LSEL_MAGIC
        + struct.pack("<I", _FORMAT_VERSION)
        + struct.pack("<QQ", y.n, y.c)
    )
    payload = y.labels.astype("<u4").tobytes()
    Path(path).write_bytes(header + payload)


def _load_labels_binary(path: Path) -> LabelVector:
    buf = path.read_bytes()
    magic, off = _read_exact(buf, 0, 4, "magic")
    if magic != _LSEL_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {_LSEL_MAGIC!r}")
    raw, off = _read_exact(buf, off, 4, "version")
    version = struct.unpack("<I", raw)[0]
    if version != _FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    raw, off = _read_exact(buf, off, 16, "counts")
    n, c = struct.unpack("<QQ", raw)
    payload, off = _read_exact(buf, off, 4 * n, "label payload")
    if off != len(buf):
        raise FormatError(f"{len(buf) - off} trailing bytes after payload")
    labels = np.frombuffer(payload, dtype="<u4").astype(np.int64)
    return LabelVector(labels=labels, c=int(c))


def _load_labels_csv(path: Path) -> LabelVector:
    _, rows = _csv_rows(path)
    if not rows:
        raise FormatError(f"no data rows in {path}")
    try:
        labels = np.asarray([int(row) for row in rows], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"unparseable label: {exc}") from exc
    if labels.min() < 0:
        raise LabelOutOfRangeError("negative label in CSV")
    return LabelVector(labels=labels, c=int(labels.max()) + 1)


def load_labels(path: str | Path, format: str = "binary") -> LabelVector:
    """Load and validate a label vector (binary LSEL or one-int-per-line CSV)."""
    path = Path(path)
    if format == "binary":
        return _load_labels_binary(path)
    if format == "csv":
        return _load_labels_csv(path)
    raise ValidationError(f"unknown label format {format!r}")


def save_labels_csv(y: LabelVector, path: str | Path) -> None:
    lines = [str(int(v)) for v in y.labels]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def sniff_format(path: str | Path) -> str:
    """Classify a file as FSEL/LSEL binary or CSV from its magic bytes."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    return "binary" if magic in (_FSEL_MAGIC, _LSEL_MAGIC) else "csv"


def load_bundle(
    feature_paths: Sequence[str | Path],
    labels_path: str | Path,
) -> FeatureBundle:
    """Load several feature files plus one label file into a validated bundle.

    Matrix order preserves argument order (scores are order-invariant; the
    order only matters for provenance).  File formats are sniffed from the
    magic bytes, so binary and CSV inputs can be mixed.
    """
    if len(feature_paths) < 1:
        raise ValidationError("need at least one feature path")
    matrices = []
    for p in feature_paths:
        p = Path(p)
        matrices.append(load_features(p, format=sniff_format(p)))
    labels_path = Path(labels_path)
    labels = load_labels(labels_path, format=sniff_format(labels_path))
    return FeatureBundle(matrices=tuple(matrices), labels=labels)


def save_selection(sel: SelectionResult, path: str | Path) -> None:
    """Write the selected indices, one per line, ascending."""
    lines = [str(int(i)) for i in sel.selected]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_selection_indices(path: str | Path) -> np.ndarray:
    """Read an index-per-line selection file."""
    _, rows = _csv_rows(Path(path))
    if not rows:
        raise FormatError(f"no indices in {path}")
    try:
        return np.asarray([int(r) for r in rows], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"unparseable index: {exc}") from exc
