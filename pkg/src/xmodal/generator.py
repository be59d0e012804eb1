"""Attribution vectors: synthetic generation and file ingestion.

Synthetic vectors model normalised feature-attribution output (unit L1
mass split across features via a Dirichlet draw, each feature then given
an independent random direction).  Real attribution exports can be
ingested from CSV or JSON instead; both paths produce the same
:class:`AttributionVector` records the rest of the pipeline consumes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import DomainProfile

__all__ = [
    "DataFormatError",
    "DegenerateInputError",
    "AttributionVector",
    "IngestedBatch",
    "generate_attribution",
    "ingest_attributions",
    "write_attributions_csv",
]


class DataFormatError(ValueError):
    """Raised when an attribution file cannot be parsed as specified."""


class DegenerateInputError(ValueError):
    """Raised when ingested data cannot be normalised (all-zero rows)."""


@dataclass(frozen=True)
class AttributionVector:
    """One explanation target: signed per-feature attribution scores."""

    domain: str
    sample_id: int
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"values must be 1-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must be finite (no NaN/inf)")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class IngestedBatch:
    """Attribution vectors read from a file, plus provenance."""

    source_path: str
    feature_names: tuple[str, ...]
    vectors: tuple[AttributionVector, ...]
    normalized: bool

    def __post_init__(self) -> None:
        width = len(self.feature_names)
        for vec in self.vectors:
            if vec.values.size != width:
                raise ValueError(
                    f"sample {vec.sample_id} has {vec.values.size} values, "
                    f"expected {width}"
                )


def generate_attribution(
    domain: DomainProfile, stream: np.random.Generator, sample_id: int = 0
) -> AttributionVector:
    """Draw one synthetic attribution vector for ``domain``.

    Magnitudes come from a symmetric Dirichlet (so |values| sums to
    exactly 1), signs from independent fair coin flips.  Draw-order
    contract: one Dirichlet draw, then one uniform(size=n) for signs.
    """
    n = domain.feature_count
    magnitudes = stream.dirichlet(np.full(n, domain.dirichlet_concentration))
    flips = stream.uniform(size=n)
    signs = np.where(flips < 0.5, -1.0, 1.0)
    return AttributionVector(
        domain=domain.name, sample_id=sample_id, values=magnitudes * signs
    )


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


def _parse_cell(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(
            f"row {row}, column {column!r}: not a number: {text!r}"
        ) from None
    if not np.isfinite(value):
        raise DataFormatError(f"row {row}, column {column!r}: non-finite value")
    return value


def _ingest_csv(path: Path) -> tuple[tuple[str, ...], list[np.ndarray]]:
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file (line 1: missing header)")
        if header[:1] != ["sample_id"]:
            raise DataFormatError(
                f"{path}: line 1: header must start with 'sample_id', "
                f"got {header[:1] or ['<nothing>']}"
            )
        feature_names = tuple(header[1:])
        if not feature_names:
            raise DataFormatError(f"{path}: line 1: header has no feature columns")
        rows: list[np.ndarray] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}: line {line_no}: expected {len(header)} cells, "
                    f"got {len(row)}"
                )
            rows.append(
                np.array(
                    [
                        _parse_cell(cell, line_no, feature_names[i])
                        for i, cell in enumerate(row[1:])
                    ]
                )
            )
    return feature_names, rows


def _ingest_json(path: Path) -> tuple[tuple[str, ...], list[np.ndarray]]:
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(payload, dict) or "feature_names" not in payload:
        raise DataFormatError(f"{path}: expected object with 'feature_names'")
    if "samples" not in payload:
        raise DataFormatError(f"{path}: expected object with 'samples'")
    names = payload["feature_names"]
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise DataFormatError(f"{path}: 'feature_names' must be a string list")
    if not names:
        raise DataFormatError(f"{path}: 'feature_names' is empty")
    samples = payload["samples"]
    if not isinstance(samples, list):
        raise DataFormatError(f"{path}: 'samples' must be a list")
    rows: list[np.ndarray] = []
    for idx, row in enumerate(samples):
        if not isinstance(row, list) or len(row) != len(names):
            raise DataFormatError(
                f"{path}: sample {idx}: expected list of {len(names)} numbers"
            )
        values = []
        for j, cell in enumerate(row):
            if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                raise DataFormatError(
                    f"{path}: sample {idx}, column {names[j]!r}: not a number"
                )
            if not np.isfinite(cell):
                raise DataFormatError(
                    f"{path}: sample {idx}, column {names[j]!r}: non-finite value"
                )
            values.append(float(cell))
        rows.append(np.array(values))
    return tuple(names), rows


def ingest_attributions(path: str | Path, normalize: bool = False) -> IngestedBatch:
    """Read attribution vectors from a ``.csv`` or ``.json`` file.

    CSV layout: header ``sample_id,<feature>,...`` then one row per
    sample.  JSON layout: ``{"feature_names": [...], "samples": [[...]]}``.
    With ``normalize=True`` every row is rescaled to unit L1 mass; rows
    with zero mass make that impossible and raise
    :class:`DegenerateInputError` listing the offending sample ids
    (without normalisation they pass through and are flagged as
    degenerate downstream instead).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"attribution file not found: {path}")
    suffix = path.suffix.lower()
    if suffix == ".csv":
        feature_names, rows = _ingest_csv(path)
    elif suffix == ".json":
        feature_names, rows = _ingest_json(path)
    else:
        raise DataFormatError(f"{path}: unsupported extension {suffix!r}")

    if normalize:
        zero_rows = [i for i, row in enumerate(rows) if float(np.abs(row).sum()) == 0.0]
        if zero_rows:
            raise DegenerateInputError(
                "cannot normalise all-zero sample(s): "
                + ", ".join(str(i) for i in zero_rows)
            )
        rows = [row / np.abs(row).sum() for row in rows]

    domain = path.stem
    vectors = tuple(
        AttributionVector(domain=domain, sample_id=i, values=row)
        for i, row in enumerate(rows)
    )
    return IngestedBatch(
        source_path=str(path),
        feature_names=feature_names,
        vectors=vectors,
        normalized=normalize,
    )


def write_attributions_csv(
    path: str | Path,
    feature_names: Sequence[str],
    vectors: Sequence[AttributionVector],
) -> None:
    """Write vectors in the same CSV layout ``ingest_attributions`` reads.

    Floats are written with ``repr`` (shortest round-trip form), so a
    write -> ingest cycle reproduces the values bit-for-bit.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample_id", *feature_names])
        for vec in vectors:
            writer.writerow([vec.sample_id, *[repr(float(v)) for v in vec.values]])
