"""Explanation encoding: attribution vector -> discrete symbol stream.

An attribution vector is turned into an ordered sequence of message
symbols by (1) ranking features by absolute attribution, (2) keeping the
style's top-k, and (3) quantising each kept value into a sign and a
magnitude level on a per-vector scale.  The result also carries the
delivery duration implied by the modality's presentation rate and the
plug-in entropy of the emitted symbol content.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Sequence

import numpy as np

from .core import ExperimentConfig, Modality, Style
from .infotheory import entropy

__all__ = [
    "DegenerateSampleError",
    "Sign",
    "MessageSymbol",
    "EncodedExplanation",
    "quantize_value",
    "quantize_vector",
    "encode",
]


class DegenerateSampleError(ValueError):
    """Raised when a vector carries no quantisable signal (all zeros)."""


class Sign(IntEnum):
    """Direction of a feature's attribution."""

    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1

    @classmethod
    def of(cls, value: float) -> "Sign":
        if value > 0.0:
            return cls.POSITIVE
        if value < 0.0:
            return cls.NEGATIVE
        return cls.ZERO


@dataclass(frozen=True)
class MessageSymbol:
    """One transmitted unit: which feature, which direction, how strong."""

    feature_index: int
    sign: Sign
    level: int


@dataclass(frozen=True)
class EncodedExplanation:
    """A symbol stream plus the delivery facts metrics need downstream."""

    symbols: tuple[MessageSymbol, ...]
    modality: Modality
    style: Style
    feature_count: int
    quant_levels: int
    word_count: int
    duration_s: float
    message_entropy_bits: float


def quantize_value(
    value: float, max_magnitude: float, quant_levels: int
) -> tuple[Sign, int]:
    """Quantise one attribution onto ``quant_levels`` magnitude buckets.

    The level is floor(q * |v| / max_magnitude) clamped to q - 1, so the
    largest-magnitude feature always lands in the top bucket and zero in
    the bottom one.  The scale is per-vector: ``max_magnitude`` must be
    the max |v| of the vector being encoded.
    """
    if quant_levels < 2:
        raise ValueError(f"quant_levels must be >= 2, got {quant_levels}")
    if max_magnitude < 0.0:
        raise ValueError(f"max_magnitude must be >= 0, got {max_magnitude}")
    if max_magnitude == 0.0:
        raise DegenerateSampleError("cannot quantise against a zero scale")
    level = int(np.floor(quant_levels * abs(value) / max_magnitude))
    return Sign.of(value), min(level, quant_levels - 1)


def quantize_vector(
    values: Sequence[float], quant_levels: int
) -> list[tuple[Sign, int]]:
    """Quantise every component of a vector on its own max-|v| scale.

    Raises :class:`DegenerateSampleError` for an all-zero vector, which
    has no scale to quantise against.
    """
    arr = np.asarray(values, dtype=np.float64)
    max_magnitude = float(np.max(np.abs(arr))) if arr.size else 0.0
    if max_magnitude == 0.0:
        raise DegenerateSampleError("all-zero attribution vector")
    return [quantize_value(float(v), max_magnitude, quant_levels) for v in arr]


def encode(
    values: Sequence[float],
    modality: Modality,
    style: Style,
    cfg: ExperimentConfig,
) -> EncodedExplanation:
    """Encode an attribution vector for delivery in ``modality``/``style``.

    Features are presented in decreasing |attribution| (ties broken by
    feature index, so encoding is fully deterministic), truncated to the
    style's top-k (None keeps all).  Duration is the style's scripted
    word count divided by the modality's words-per-second rate.  The
    message entropy is the plug-in entropy of the emitted (sign, level)
    contents -- the "how surprising is what was actually said" load
    driver, deliberately blind to which feature each symbol names.
    """
    mparams = cfg.modality_params[modality]
    sparams = cfg.style_params[style]
    arr = np.asarray(values, dtype=np.float64)
    n = int(arr.size)
    if n == 0:
        raise DegenerateSampleError("empty attribution vector")

    quantised = quantize_vector(arr, sparams.quant_levels)
    order = sorted(range(n), key=lambda i: (-abs(float(arr[i])), i))
    keep = n if sparams.top_k is None else min(sparams.top_k, n)
    symbols = tuple(
        MessageSymbol(feature_index=i, sign=quantised[i][0], level=quantised[i][1])
        for i in order[:keep]
    )
    return EncodedExplanation(
        symbols=symbols,
        modality=modality,
        style=style,
        feature_count=n,
        quant_levels=sparams.quant_levels,
        word_count=sparams.word_count,
        duration_s=sparams.word_count / mparams.rate_wps,
        message_entropy_bits=entropy([(s.sign, s.level) for s in symbols]),
    )
