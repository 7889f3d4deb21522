"""Dataset ingestion, feature encoding, splitting and descriptive statistics.

The file format is the classic comma-separated endgame layout: six square
coordinates (letter, digit, three times) plus a spelled-out class label,
one record per line, no header.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .board import FILES, IllegalPositionError, Position, Side, Square, validate_position

CLASS_LABELS: tuple[str, ...] = (
    "draw",
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen",
)
LABEL_INDEX = {label: i for i, label in enumerate(CLASS_LABELS)}
N_CLASSES = len(CLASS_LABELS)


class FormatError(ValueError):
    pass


class DegenerateSplitError(ValueError):
    pass


@dataclass(frozen=True)
class Record:
    """One dataset row: the three piece squares (black to move) plus label."""

    wk_file: str
    wk_rank: int
    wr_file: str
    wr_rank: int
    bk_file: str
    bk_rank: int
    label: str

    def __post_init__(self):
        for letter in (self.wk_file, self.wr_file, self.bk_file):
            if letter not in FILES:
                raise FormatError(f"bad file letter: {letter!r}")
        for rank in (self.wk_rank, self.wr_rank, self.bk_rank):
            if not (isinstance(rank, int) and 1 <= rank <= 8):
                raise FormatError(f"rank out of range: {rank!r}")
        if self.label not in LABEL_INDEX:
            raise FormatError(f"unknown label: {self.label!r}")
        reason = validate_position(*self._squares(), Side.BLACK)
        if reason is not None:
            raise IllegalPositionError(reason)

    def _squares(self) -> tuple[Square, Square, Square]:
        return (
            Square(FILES.index(self.wk_file) + 1, self.wk_rank),
            Square(FILES.index(self.wr_file) + 1, self.wr_rank),
            Square(FILES.index(self.bk_file) + 1, self.bk_rank),
        )

    def to_position(self) -> Position:
        wk, wr, bk = self._squares()
        return Position(wk, wr, bk, Side.BLACK)

    @classmethod
    def from_position(cls, p: Position, label: str) -> "Record":
        return cls(
            FILES[p.wk.file - 1], p.wk.rank,
            FILES[p.wr.file - 1], p.wr.rank,
            FILES[p.bk.file - 1], p.bk.rank,
            label,
        )

    def to_line(self) -> str:
        return (
            f"{self.wk_file},{self.wk_rank},{self.wr_file},{self.wr_rank},"
            f"{self.bk_file},{self.bk_rank},{self.label}"
        )

    def ordinal_values(self) -> tuple[int, int, int, int, int, int]:
        """Letters a..h mapped to 1..8, ranks as-is."""
        return (
            FILES.index(self.wk_file) + 1, self.wk_rank,
            FILES.index(self.wr_file) + 1, self.wr_rank,
            FILES.index(self.bk_file) + 1, self.bk_rank,
        )


def parse_record(line: str) -> Record:
    """Parse one `F,R,F,R,F,R,LABEL` line; whitespace and CR are tolerated."""
    fields = [f.strip() for f in line.strip().split(",")]
    if len(fields) != 7:
        raise FormatError(f"expected 7 comma-separated fields, got {len(fields)}")
    ranks = []
    for text in (fields[1], fields[3], fields[5]):
        if not text.isdigit():
            raise FormatError(f"bad rank: {text!r}")
        ranks.append(int(text))
    return Record(fields[0], ranks[0], fields[2], ranks[1], fields[4], ranks[2], fields[6])


def load_dataset(source) -> list[Record]:
    """Read records from a path, text stream or byte stream, preserving order.

    Parse failures are re-raised with the 1-based line number attached.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return load_dataset(fh)
    records = []
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        if not raw.strip():
            continue
        try:
            records.append(parse_record(raw))
        except (FormatError, IllegalPositionError) as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    return records


@dataclass(frozen=True)
class EncodingScheme:
    kind: str = "ordinal"       # "ordinal" | "onehot"
    normalize: str = "none"     # "none" | "minmax"

    def __post_init__(self):
        if self.kind not in ("ordinal", "onehot"):
            raise ValueError(f"unknown encoding kind: {self.kind!r}")
        if self.normalize not in ("none", "minmax"):
            raise ValueError(f"unknown normalization: {self.normalize!r}")

    @property
    def width(self) -> int:
        return 6 if self.kind == "ordinal" else 48


@dataclass(frozen=True)
class FittedEncoding:
    """An encoding scheme plus any data-fitted normalization bounds, enough
    to map new records into the exact feature space a model was trained on."""

    scheme: EncodingScheme
    col_min: tuple[float, ...] | None = None
    col_max: tuple[float, ...] | None = None

    @property
    def width(self) -> int:
        return self.scheme.width

    def fingerprint(self) -> str:
        return f"{self.scheme.kind}+{self.scheme.normalize}:{self.width}"

    def transform(self, records: list[Record]) -> np.ndarray:
        raw = np.array([r.ordinal_values() for r in records], dtype=np.float64)
        if self.scheme.kind == "onehot":
            n = raw.shape[0]
            out = np.zeros((n, 48), dtype=np.float64)
            for col in range(6):
                idx = raw[:, col].astype(int) - 1
                out[np.arange(n), col * 8 + idx] = 1.0
            return out
        if self.scheme.normalize == "minmax":
            lo = np.array(self.col_min)
            span = np.array(self.col_max) - lo
            span[span == 0.0] = 1.0  # constant column maps to 0
            return (raw - lo) / span
        return raw

    def inverse(self, features: np.ndarray) -> np.ndarray:
        """Recover the ordinal integer matrix from encoded features."""
        if self.scheme.kind == "onehot":
            blocks = features.reshape(features.shape[0], 6, 8)
            return np.argmax(blocks, axis=2).astype(np.int64) + 1
        if self.scheme.normalize == "minmax":
            lo = np.array(self.col_min)
            span = np.array(self.col_max) - lo
            span[span == 0.0] = 1.0
            return np.rint(features * span + lo).astype(np.int64)
        return np.rint(features).astype(np.int64)


@dataclass(frozen=True)
class EncodedMatrix:
    features: np.ndarray            # N x D float64
    labels: np.ndarray              # N int64 class indices
    encoding: FittedEncoding
    class_order: tuple[str, ...] = CLASS_LABELS

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_classes(self) -> int:
        return len(self.class_order)

    def subset(self, rows: np.ndarray) -> "EncodedMatrix":
        return replace(self, features=self.features[rows], labels=self.labels[rows])


def encode(records: list[Record], scheme: EncodingScheme) -> EncodedMatrix:
    """Encode records as a feature matrix; min-max bounds are fitted from
    the data itself (per column), so re-encoding is byte-identical."""
    if not records:
        raise ValueError("cannot encode an empty record list")
    fitted = FittedEncoding(scheme)
    if scheme.kind == "ordinal" and scheme.normalize == "minmax":
        raw = np.array([r.ordinal_values() for r in records], dtype=np.float64)
        fitted = FittedEncoding(scheme, tuple(raw.min(axis=0)), tuple(raw.max(axis=0)))
    labels = np.array([LABEL_INDEX[r.label] for r in records], dtype=np.int64)
    return EncodedMatrix(fitted.transform(records), labels, fitted)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not (0.0 < self.train_fraction < 1.0):
            raise ValueError("train_fraction must lie strictly between 0 and 1")


def split(matrix: EncodedMatrix, spec: SplitSpec) -> tuple[EncodedMatrix, EncodedMatrix]:
    """Deterministic disjoint train/test partition.  The train size is
    floor(N * fraction); stratification keeps per-class counts within one
    sample of the exact proportion, topping up by largest remainder."""
    n = matrix.n_samples
    n_train = int(np.floor(n * spec.train_fraction))
    rng = np.random.default_rng(spec.seed)
    if not spec.stratified:
        perm = rng.permutation(n)
        train_rows = np.sort(perm[:n_train])
        test_rows = np.sort(perm[n_train:])
        return matrix.subset(train_rows), matrix.subset(test_rows)

    classes = [k for k in range(matrix.n_classes) if np.any(matrix.labels == k)]
    targets = {k: np.count_nonzero(matrix.labels == k) * spec.train_fraction for k in classes}
    base = {k: int(np.floor(targets[k])) for k in classes}
    shortfall = n_train - sum(base.values())
    by_remainder = sorted(classes, key=lambda k: (-(targets[k] - base[k]), k))
    for k in by_remainder[:shortfall]:
        base[k] += 1
    if any(base[k] == 0 for k in classes):
        empty = [matrix.class_order[k] for k in classes if base[k] == 0]
        raise DegenerateSplitError(f"classes with zero training rows: {empty}")
    train_parts = []
    for k in classes:
        idx = np.flatnonzero(matrix.labels == k)
        perm = rng.permutation(idx.size)
        train_parts.append(idx[perm[: base[k]]])
    train_rows = np.sort(np.concatenate(train_parts))
    mask = np.ones(n, dtype=bool)
    mask[train_rows] = False
    return matrix.subset(train_rows), matrix.subset(np.flatnonzero(mask))


def statistics(records: list[Record]) -> list[tuple[str, int, float]]:
    """Per-label (label, count, percentage) rows in canonical class order.

    Percentages are always recomputed from the counts.
    """
    counts = {label: 0 for label in CLASS_LABELS}
    for r in records:
        counts[r.label] += 1
    total = len(records)
    return [
        (label, counts[label], (counts[label] / total * 100.0) if total else 0.0)
        for label in CLASS_LABELS
    ]


def statistics_csv(records: list[Record]) -> str:
    lines = ["label,count,percentage"]
    for label, count, pct in statistics(records):
        lines.append(f"{label},{count},{pct:.4f}")
    return "\n".join(lines) + "\n"


def statistics_json(records: list[Record]) -> str:
    rows = [
        {"label": label, "count": count, "percentage": round(pct, 4)}
        for label, count, pct in statistics(records)
    ]
    return json.dumps({"total": len(records), "classes": rows}, indent=2)
