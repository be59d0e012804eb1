"""Per-sample metrics: load, efficiency, trust calibration, composite.

The metric definitions (all dimensionless unless noted):

* cognitive load       L  = alpha * duration_s + beta * message_entropy_bits
* comprehension eff.   CE = I_M / L
* trust calibration    TCE = |trust - q_true|  (per sample; condition-level
  TCE is the mean of these absolute errors)
* composite            Phi = lambda1 * CE - lambda2 * TCE
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CompositeWeights, Modality, ModalityParams, Style, TrustParams

__all__ = [
    "cognitive_load",
    "comprehension_efficiency",
    "TrustDraw",
    "simulate_trust",
    "composite_score",
    "folded_normal_mean",
    "SampleRecord",
    "ConditionSummary",
]


def cognitive_load(
    duration_s: float, message_entropy_bits: float, modality: ModalityParams
) -> float:
    """Time-plus-surprise load: alpha * duration + beta * entropy."""
    if duration_s <= 0.0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    if message_entropy_bits < 0.0:
        raise ValueError(
            f"message_entropy_bits must be >= 0, got {message_entropy_bits}"
        )
    return modality.alpha * duration_s + modality.beta * message_entropy_bits


def comprehension_efficiency(retention: float, load: float) -> float:
    """Information retained per unit of cognitive load."""
    if load <= 0.0:
        raise ValueError(f"load must be positive, got {load}")
    return retention / load


@dataclass(frozen=True)
class TrustDraw:
    """One simulated trust outcome against its ground-truth quality."""

    q_true: float
    trust: float
    tce_abs: float


def simulate_trust(
    modality: Modality,
    style: Style,
    trust: TrustParams,
    stream: np.random.Generator,
) -> TrustDraw:
    """Draw a ground-truth quality and the user's (mis)calibrated trust.

    q_true ~ Uniform(q_low, q_high); trust = q_true + bias(M) *
    style_factor(S) + Normal(0, sigma(M)), clamped into [0, 1].  Text
    biases trust downward (scepticism toward terse written output),
    voice upward; richer styles temper the bias via their factor.
    Draw-order contract: one uniform, then one standard normal.
    """
    q_true = float(stream.uniform(trust.q_low, trust.q_high))
    shift = trust.bias_by_modality[modality] * trust.style_factor[style]
    noise = float(stream.standard_normal()) * trust.sigma_by_modality[modality]
    t = min(max(q_true + shift + noise, 0.0), 1.0)
    return TrustDraw(q_true=q_true, trust=t, tce_abs=abs(t - q_true))


def composite_score(
    ce: float,
    tce: float,
    weights: CompositeWeights,
    lambda2: float | None = None,
) -> float:
    """Phi = lambda1 * CE - lambda2 * TCE (optionally overriding lambda2)."""
    l2 = weights.lambda2 if lambda2 is None else lambda2
    return weights.lambda1 * ce - l2 * tce


def folded_normal_mean(shift: float, sigma: float) -> float:
    """E|X| for X ~ Normal(shift, sigma^2), in closed form.

    E|X| = sigma * sqrt(2/pi) * exp(-shift^2 / (2 sigma^2))
         + shift * (1 - 2 * Phi(-shift / sigma))

    This is the expected trust-calibration error when clamping is
    inactive: T - Q is then exactly Normal(bias * factor, sigma^2).
    """
    if sigma <= 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    z = shift / sigma
    gauss_part = sigma * math.sqrt(2.0 / math.pi) * math.exp(-0.5 * z * z)
    cdf_neg_z = 0.5 * (1.0 + math.erf(-z / math.sqrt(2.0)))
    return gauss_part + shift * (1.0 - 2.0 * cdf_neg_z)


@dataclass(frozen=True)
class SampleRecord:
    """All metrics for one simulated (domain, modality, style) sample."""

    domain: str
    modality: Modality
    style: Style
    sample_id: int
    i_m: float
    load: float
    ce: float
    duration_s: float
    message_entropy_bits: float
    q_true: float
    trust: float
    tce_abs: float
    degenerate: bool


@dataclass(frozen=True)
class ConditionSummary:
    """Aggregates over the non-degenerate samples of one (M, S) cell."""

    modality: Modality
    style: Style
    sample_count: int
    mean_ce: float
    var_ce: float
    mean_tce: float
    var_tce: float
    pooled_i_m: float
    mean_load: float
    phi_default: float
