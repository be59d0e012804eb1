"""Perception: pass an encoded explanation through a lossy channel.

Two loss mechanisms apply in sequence, each driven by its own random
stream so they can be reasoned about (and tested) independently:

1. Retention -- which transmitted symbols survive the listener's
   capacity limit.  Text readers skim a prefix (the first C symbols in
   presentation order, deterministically); listeners of speech retain
   position i with probability rho**i (1-based), modelling serial decay.
2. Symbol noise -- each retained symbol is independently corrupted with
   probability p: its magnitude level shifts by +/-1 (clamped to the
   valid range).  The sign is never corrupted; direction is assumed far
   more salient than fine magnitude.

The perceived result is indexed by feature: features never transmitted
or not retained come back as the MISSING sentinel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModalityParams, PrefixRetention, SerialDecayRetention
from .encoder import EncodedExplanation, MessageSymbol

__all__ = ["Missing", "MISSING", "Percept", "perceive"]


class Missing:
    """Sentinel for a feature the receiver never took in."""

    _instance: "Missing | None" = None

    def __new__(cls) -> "Missing":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:  # pragma: no cover - trivial
        return "MISSING"


MISSING = Missing()


@dataclass(frozen=True)
class Percept:
    """What survived the channel, indexed by feature."""

    perceived: tuple[MessageSymbol | Missing, ...]
    retained_count: int
    corrupted_count: int


def _retain(
    message: EncodedExplanation,
    modality: ModalityParams,
    retention_stream: np.random.Generator,
) -> list[MessageSymbol]:
    policy = modality.retention
    if isinstance(policy, PrefixRetention):
        return list(message.symbols[: policy.capacity])
    if isinstance(policy, SerialDecayRetention):
        kept = []
        for position, symbol in enumerate(message.symbols, start=1):
            if retention_stream.uniform() < policy.rho**position:
                kept.append(symbol)
        return kept
    raise TypeError(f"unknown retention policy: {policy!r}")


def perceive(
    message: EncodedExplanation,
    modality: ModalityParams,
    retention_stream: np.random.Generator,
    noise_stream: np.random.Generator,
) -> Percept:
    """Apply retention then symbol noise; return the per-feature percept.

    Draw-order contract (tests depend on it): serial-decay retention
    consumes exactly one uniform per transmitted symbol in presentation
    order (prefix retention consumes none); noise consumes one uniform
    per *retained* symbol in order, plus one extra uniform for the shift
    direction whenever that symbol corrupts.
    """
    retained = _retain(message, modality, retention_stream)

    heard: dict[int, MessageSymbol] = {}
    corrupted = 0
    p = modality.symbol_noise_p
    top = message.quant_levels - 1
    for symbol in retained:
        if noise_stream.uniform() < p:
            corrupted += 1
            shift = -1 if noise_stream.uniform() < 0.5 else 1
            level = min(max(symbol.level + shift, 0), top)
            symbol = MessageSymbol(
                feature_index=symbol.feature_index, sign=symbol.sign, level=level
            )
        heard[symbol.feature_index] = symbol

    perceived = tuple(
        heard.get(i, MISSING) for i in range(message.feature_count)
    )
    return Percept(
        perceived=perceived,
        retained_count=len(retained),
        corrupted_count=corrupted,
    )
