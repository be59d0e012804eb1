"""Shared vocabulary for the cross-modal explanation simulator.

This module owns the enumerations, parameter records, experiment
configuration (including JSON round-trip and validation), and the
deterministic random-stream derivation that every other module builds on.
Everything here is immutable; simulation state lives only inside the
numpy generators handed out by :func:`derive_stream`.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from typing import Any, Iterator, Mapping

import numpy as np

__all__ = [
    "ConfigError",
    "Modality",
    "Style",
    "StreamPurpose",
    "DomainProfile",
    "PrefixRetention",
    "SerialDecayRetention",
    "ModalityParams",
    "StyleParams",
    "TrustParams",
    "CompositeWeights",
    "ExperimentConfig",
    "StreamKey",
    "ValidationIssue",
    "ValidationReport",
    "RandomStream",
    "derive_stream",
    "default_config",
    "validate_config",
    "config_to_json",
    "config_from_json",
    "load_config",
    "dump_config",
    "config_fingerprint",
]

# A RandomStream is a plain numpy Generator; the alias documents intent.
RandomStream = np.random.Generator


class ConfigError(ValueError):
    """Raised when a configuration document cannot be parsed or validated."""


class Modality(str, enum.Enum):
    """Delivery channel for an explanation."""

    TEXT = "text"
    VOICE = "voice"


class Style(str, enum.Enum):
    """Presentation style controlling verbosity and resolution."""

    BRIEF = "brief"
    DETAILED = "detailed"
    ANALOGY = "analogy"


class StreamPurpose(str, enum.Enum):
    """What a derived random stream is consumed for.

    Each simulated sample draws from four mutually independent streams so
    that changing, say, the trust model never perturbs attribution draws.
    """

    ATTRIBUTION = "attribution"
    RETENTION = "retention"
    SYMBOL_NOISE = "symbol_noise"
    TRUST = "trust"


# ---------------------------------------------------------------------------
# Parameter records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainProfile:
    """Synthetic attribution domain: how many features and how concentrated."""

    name: str
    feature_count: int
    feature_names: tuple[str, ...]
    dirichlet_concentration: float = 1.0


@dataclass(frozen=True)
class PrefixRetention:
    """Keep the first ``capacity`` message symbols, drop the rest.

    Models a reader who reliably absorbs a bounded prefix of a written
    message (re-reading makes early content effectively lossless).
    """

    capacity: int

    kind = "prefix"


@dataclass(frozen=True)
class SerialDecayRetention:
    """Retain the symbol at 1-based position ``i`` with probability ``rho**i``.

    Models serial position decay in a transient audio stream: late symbols
    are progressively less likely to survive working memory.
    """

    rho: float

    kind = "serial_decay"


@dataclass(frozen=True)
class ModalityParams:
    """Channel constants for one delivery modality.

    ``alpha`` converts seconds of exposure into load units, ``beta``
    converts message entropy bits into load units, ``symbol_noise_p`` is
    the per-symbol probability that a retained symbol's magnitude level is
    shifted by one step.
    """

    rate_wps: float
    alpha: float
    beta: float
    symbol_noise_p: float
    retention: PrefixRetention | SerialDecayRetention


@dataclass(frozen=True)
class StyleParams:
    """Message shape for one presentation style.

    ``top_k`` is the number of features the message names (``None`` means
    every feature), ``quant_levels`` the number of magnitude buckets used
    when wording those features, ``word_count`` the fixed rendered length.
    """

    top_k: int | None
    quant_levels: int
    word_count: int


@dataclass(frozen=True)
class TrustParams:
    """Trust-formation model: where reported trust lands relative to truth.

    Underlying correctness is drawn uniformly from ``[q_low, q_high]``;
    modality bias (scaled by a per-style factor) plus Gaussian jitter is
    added and the result clamped to [0, 1].
    """

    q_low: float
    q_high: float
    bias_by_modality: Mapping[Modality, float]
    style_factor: Mapping[Style, float]
    sigma_by_modality: Mapping[Modality, float]


@dataclass(frozen=True)
class CompositeWeights:
    """Weights of the efficiency and calibration terms in the composite score."""

    lambda1: float
    lambda2: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete, serialisable description of one simulation experiment."""

    master_seed: int
    samples_per_condition_per_domain: int
    domains: tuple[DomainProfile, ...]
    modality_params: Mapping[Modality, ModalityParams]
    style_params: Mapping[Style, StyleParams]
    trust: TrustParams
    weights: CompositeWeights
    lambda2_sweep: tuple[float, ...]

    def conditions(self) -> Iterator[tuple[Modality, Style]]:
        """All six (modality, style) cells in canonical declaration order."""
        for modality in Modality:
            for style in Style:
                yield modality, style


# ---------------------------------------------------------------------------
# Defaults
# ---------------------------------------------------------------------------

_FINANCE_FEATURES = (
    "income",
    "debt_ratio",
    "credit_age",
    "utilization",
    "inquiries",
    "delinquencies",
    "employment_years",
    "savings",
)

_GENETICS_FEATURES = tuple(f"gene_{i}" for i in range(1, 11))


def default_config() -> ExperimentConfig:
    """Built-in experiment: two domains, six conditions, thirty samples each.

    The constants encode the modelling story documented in the README.
    Reading is self-paced: its per-second cost is low (and re-reading
    makes retention effectively lossless, hence a prefix capacity above
    any domain's feature count) while the per-bit cost of integrating
    message content dominates; listening costs sustained attention, fades
    with serial position, and mishears magnitude wording far more often.
    Brief messages word the few features they name finely, detailed prose
    covers every feature coarsely, the analogy style sits between.  Text
    induces under-trust and voice over-trust; the fuller the explanation,
    the more evidence the receiver has to anchor on, so the bias is
    tempered most by detailed and somewhat by analogy styles.
    """
    return ExperimentConfig(
        master_seed=42,
        samples_per_condition_per_domain=30,
        domains=(
            DomainProfile("finance", 8, _FINANCE_FEATURES, 1.0),
            DomainProfile("genetics", 10, _GENETICS_FEATURES, 1.0),
        ),
        modality_params={
            Modality.TEXT: ModalityParams(
                rate_wps=4.17,
                alpha=0.04,
                beta=1.60,
                symbol_noise_p=0.02,
                retention=PrefixRetention(capacity=12),
            ),
            Modality.VOICE: ModalityParams(
                rate_wps=2.5,
                alpha=0.05,
                beta=1.30,
                symbol_noise_p=0.26,
                retention=SerialDecayRetention(rho=0.90),
            ),
        },
        style_params={
            Style.BRIEF: StyleParams(top_k=3, quant_levels=9, word_count=30),
            Style.DETAILED: StyleParams(top_k=None, quant_levels=3, word_count=120),
            Style.ANALOGY: StyleParams(top_k=5, quant_levels=5, word_count=40),
        },
        trust=TrustParams(
            q_low=0.60,
            q_high=0.95,
            bias_by_modality={Modality.TEXT: -0.25, Modality.VOICE: 0.13},
            style_factor={Style.BRIEF: 1.0, Style.DETAILED: 0.70, Style.ANALOGY: 0.90},
            sigma_by_modality={Modality.TEXT: 0.035, Modality.VOICE: 0.07},
        ),
        weights=CompositeWeights(lambda1=1.0, lambda2=0.5),
        lambda2_sweep=tuple(round(0.1 * i, 1) for i in range(1, 11)),
    )


# ---------------------------------------------------------------------------
# Random stream derivation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StreamKey:
    """Addresses one independent random stream inside an experiment."""

    master_seed: int
    domain: str
    modality: Modality
    style: Style
    sample_index: int
    purpose: StreamPurpose

    def canonical(self) -> str:
        return "|".join(
            (
                str(self.master_seed),
                self.domain,
                self.modality.value,
                self.style.value,
                str(self.sample_index),
                self.purpose.value,
            )
        )


def derive_stream(key: StreamKey) -> RandomStream:
    """Return the deterministic random stream addressed by ``key``.

    Construction (fixed for reproducibility): the key fields are joined
    into the canonical ASCII string ``seed|domain|modality|style|index|
    purpose``, hashed with SHA-256, and the 256-bit digest (read as four
    little-endian 64-bit words) seeds a Philox counter-based bit generator
    through numpy's ``SeedSequence``.  Identical keys therefore yield
    identical streams on every platform regardless of derivation order,
    and distinct keys yield statistically independent streams.
    """
    digest = hashlib.sha256(key.canonical().encode("ascii")).digest()
    words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    """One violated constraint: where it lives and what went wrong."""

    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def raise_if_failed(self) -> None:
        if self.issues:
            detail = "; ".join(f"{i.path}: {i.message}" for i in self.issues)
            raise ConfigError(f"invalid configuration: {detail}")


def validate_config(cfg: ExperimentConfig) -> ValidationReport:
    """Check every declared invariant; report all violations, not just the first."""
    issues: list[ValidationIssue] = []

    def bad(path: str, message: str) -> None:
        issues.append(ValidationIssue(path, message))

    if not 0 <= cfg.master_seed < 2**64:
        bad("master_seed", "must be an unsigned 64-bit integer")
    if cfg.samples_per_condition_per_domain <= 0:
        bad("samples_per_condition_per_domain", "must be a positive integer")

    if not cfg.domains:
        bad("domains", "at least one domain is required")
    seen_names: set[str] = set()
    for i, dom in enumerate(cfg.domains):
        path = f"domains[{i}]"
        if not dom.name:
            bad(f"{path}.name", "must be non-empty")
        if dom.name in seen_names:
            bad(f"{path}.name", f"duplicate domain name {dom.name!r}")
        seen_names.add(dom.name)
        if dom.feature_count < 2:
            bad(f"{path}.feature_count", "must be at least 2")
        if len(dom.feature_names) != dom.feature_count:
            bad(f"{path}.feature_names", "length must equal feature_count")
        if len(set(dom.feature_names)) != len(dom.feature_names):
            bad(f"{path}.feature_names", "names must be unique")
        if not dom.dirichlet_concentration > 0:
            bad(f"{path}.dirichlet_concentration", "must be > 0")

    for modality in Modality:
        params = cfg.modality_params.get(modality)
        path = f"modality_params.{modality.value}"
        if params is None:
            bad(path, "missing")
            continue
        if not params.rate_wps > 0:
            bad(f"{path}.rate_wps", "must be > 0")
        if not params.alpha > 0:
            bad(f"{path}.alpha", "must be > 0")
        if not params.beta > 0:
            bad(f"{path}.beta", "must be > 0")
        if not 0 <= params.symbol_noise_p <= 1:
            bad(f"{path}.symbol_noise_p", "must lie in [0, 1]")
        retention = params.retention
        if isinstance(retention, PrefixRetention):
            if retention.capacity < 1:
                bad(f"{path}.retention.capacity", "must be a positive integer")
        elif isinstance(retention, SerialDecayRetention):
            if not 0 < retention.rho < 1:
                bad(f"{path}.retention.rho", "must lie strictly inside (0, 1)")
        else:  # pragma: no cover - guarded by parser
            bad(f"{path}.retention", "unknown retention kind")

    min_features = min((d.feature_count for d in cfg.domains), default=0)
    for style in Style:
        params = cfg.style_params.get(style)
        path = f"style_params.{style.value}"
        if params is None:
            bad(path, "missing")
            continue
        if params.top_k is not None:
            if params.top_k < 1:
                bad(f"{path}.top_k", "must be a positive integer or 'all'")
            elif cfg.domains and params.top_k > min_features:
                bad(
                    f"{path}.top_k",
                    f"exceeds the smallest domain feature_count ({min_features})",
                )
        if params.quant_levels < 2:
            bad(f"{path}.quant_levels", "must be at least 2")
        if params.word_count < 1:
            bad(f"{path}.word_count", "must be a positive integer")

    trust = cfg.trust
    if not (0 <= trust.q_low <= 1 and 0 <= trust.q_high <= 1):
        bad("trust.q_low/q_high", "must lie in [0, 1]")
    if not trust.q_low < trust.q_high:
        bad("trust.q_low", "must be strictly below q_high")
    for modality in Modality:
        if modality not in trust.bias_by_modality:
            bad(f"trust.bias_by_modality.{modality.value}", "missing")
        sigma = trust.sigma_by_modality.get(modality)
        if sigma is None:
            bad(f"trust.sigma_by_modality.{modality.value}", "missing")
        elif not sigma > 0:
            bad(f"trust.sigma_by_modality.{modality.value}", "must be > 0")
    for style in Style:
        factor = trust.style_factor.get(style)
        if factor is None:
            bad(f"trust.style_factor.{style.value}", "missing")
        elif not 0 < factor <= 1:
            bad(f"trust.style_factor.{style.value}", "must lie in (0, 1]")

    if not cfg.weights.lambda1 > 0:
        bad("weights.lambda1", "must be > 0")
    if not cfg.weights.lambda2 >= 0:
        bad("weights.lambda2", "must be >= 0")

    if not cfg.lambda2_sweep:
        bad("lambda2_sweep", "must contain at least one value")
    else:
        for j, value in enumerate(cfg.lambda2_sweep):
            if not 0 < value <= 1:
                bad(f"lambda2_sweep[{j}]", "values must lie in (0, 1]")
        if any(
            b <= a for a, b in zip(cfg.lambda2_sweep, cfg.lambda2_sweep[1:])
        ):
            bad("lambda2_sweep", "values must be strictly increasing")

    return ValidationReport(tuple(issues))


# ---------------------------------------------------------------------------
# JSON round-trip
# ---------------------------------------------------------------------------


def _require_keys(obj: Mapping[str, Any], allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        names = ", ".join(sorted(unknown))
        raise ConfigError(f"{path}: unknown key(s): {names}")
    missing = allowed - set(obj)
    if missing:
        names = ", ".join(sorted(missing))
        raise ConfigError(f"{path}: missing key(s): {names}")


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {type(value).__name__}")
    return float(value)


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {type(value).__name__}")
    return value


def _parse_retention(obj: Any, path: str) -> PrefixRetention | SerialDecayRetention:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = obj.get("kind")
    if kind == "prefix":
        _require_keys(obj, {"kind", "capacity"}, path)
        return PrefixRetention(capacity=_as_int(obj["capacity"], f"{path}.capacity"))
    if kind == "serial_decay":
        _require_keys(obj, {"kind", "rho"}, path)
        return SerialDecayRetention(rho=_as_number(obj["rho"], f"{path}.rho"))
    raise ConfigError(f"{path}.kind: expected 'prefix' or 'serial_decay', got {kind!r}")


def config_from_json(text: str) -> ExperimentConfig:
    """Parse a configuration document.  Unknown keys are an error.

    The document mirrors :class:`ExperimentConfig` field for field; raises
    :class:`ConfigError` with the offending path on any structural problem.
    Validation of numeric ranges is separate (see :func:`validate_config`).
    """
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    if not isinstance(root, dict):
        raise ConfigError("configuration root must be a JSON object")

    _require_keys(
        root,
        {
            "master_seed",
            "samples_per_condition_per_domain",
            "domains",
            "modality_params",
            "style_params",
            "trust",
            "weights",
            "lambda2_sweep",
        },
        "config",
    )

    domains: list[DomainProfile] = []
    raw_domains = root["domains"]
    if not isinstance(raw_domains, list):
        raise ConfigError("domains: expected an array")
    for i, raw in enumerate(raw_domains):
        path = f"domains[{i}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected an object")
        _require_keys(
            raw,
            {"name", "feature_count", "feature_names", "dirichlet_concentration"},
            path,
        )
        names = raw["feature_names"]
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            raise ConfigError(f"{path}.feature_names: expected an array of strings")
        domains.append(
            DomainProfile(
                name=str(raw["name"]),
                feature_count=_as_int(raw["feature_count"], f"{path}.feature_count"),
                feature_names=tuple(names),
                dirichlet_concentration=_as_number(
                    raw["dirichlet_concentration"], f"{path}.dirichlet_concentration"
                ),
            )
        )

    raw_modalities = root["modality_params"]
    if not isinstance(raw_modalities, dict):
        raise ConfigError("modality_params: expected an object")
    _require_keys(raw_modalities, {m.value for m in Modality}, "modality_params")
    modality_params: dict[Modality, ModalityParams] = {}
    for modality in Modality:
        raw = raw_modalities[modality.value]
        path = f"modality_params.{modality.value}"
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected an object")
        _require_keys(
            raw, {"rate_wps", "alpha", "beta", "symbol_noise_p", "retention"}, path
        )
        modality_params[modality] = ModalityParams(
            rate_wps=_as_number(raw["rate_wps"], f"{path}.rate_wps"),
            alpha=_as_number(raw["alpha"], f"{path}.alpha"),
            beta=_as_number(raw["beta"], f"{path}.beta"),
            symbol_noise_p=_as_number(raw["symbol_noise_p"], f"{path}.symbol_noise_p"),
            retention=_parse_retention(raw["retention"], f"{path}.retention"),
        )

    raw_styles = root["style_params"]
    if not isinstance(raw_styles, dict):
        raise ConfigError("style_params: expected an object")
    _require_keys(raw_styles, {s.value for s in Style}, "style_params")
    style_params: dict[Style, StyleParams] = {}
    for style in Style:
        raw = raw_styles[style.value]
        path = f"style_params.{style.value}"
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected an object")
        _require_keys(raw, {"top_k", "quant_levels", "word_count"}, path)
        raw_top_k = raw["top_k"]
        if raw_top_k == "all":
            top_k: int | None = None
        else:
            top_k = _as_int(raw_top_k, f"{path}.top_k")
        style_params[style] = StyleParams(
            top_k=top_k,
            quant_levels=_as_int(raw["quant_levels"], f"{path}.quant_levels"),
            word_count=_as_int(raw["word_count"], f"{path}.word_count"),
        )

    raw_trust = root["trust"]
    if not isinstance(raw_trust, dict):
        raise ConfigError("trust: expected an object")
    _require_keys(
        raw_trust,
        {"q_low", "q_high", "bias_by_modality", "style_factor", "sigma_by_modality"},
        "trust",
    )

    def _by_modality(obj: Any, path: str) -> dict[Modality, float]:
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: expected an object")
        _require_keys(obj, {m.value for m in Modality}, path)
        return {
            m: _as_number(obj[m.value], f"{path}.{m.value}") for m in Modality
        }

    def _by_style(obj: Any, path: str) -> dict[Style, float]:
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: expected an object")
        _require_keys(obj, {s.value for s in Style}, path)
        return {s: _as_number(obj[s.value], f"{path}.{s.value}") for s in Style}

    trust = TrustParams(
        q_low=_as_number(raw_trust["q_low"], "trust.q_low"),
        q_high=_as_number(raw_trust["q_high"], "trust.q_high"),
        bias_by_modality=_by_modality(
            raw_trust["bias_by_modality"], "trust.bias_by_modality"
        ),
        style_factor=_by_style(raw_trust["style_factor"], "trust.style_factor"),
        sigma_by_modality=_by_modality(
            raw_trust["sigma_by_modality"], "trust.sigma_by_modality"
        ),
    )

    raw_weights = root["weights"]
    if not isinstance(raw_weights, dict):
        raise ConfigError("weights: expected an object")
    _require_keys(raw_weights, {"lambda1", "lambda2"}, "weights")
    weights = CompositeWeights(
        lambda1=_as_number(raw_weights["lambda1"], "weights.lambda1"),
        lambda2=_as_number(raw_weights["lambda2"], "weights.lambda2"),
    )

    raw_sweep = root["lambda2_sweep"]
    if not isinstance(raw_sweep, list):
        raise ConfigError("lambda2_sweep: expected an array")
    sweep = tuple(
        _as_number(v, f"lambda2_sweep[{j}]") for j, v in enumerate(raw_sweep)
    )

    return ExperimentConfig(
        master_seed=_as_int(root["master_seed"], "master_seed"),
        samples_per_condition_per_domain=_as_int(
            root["samples_per_condition_per_domain"],
            "samples_per_condition_per_domain",
        ),
        domains=tuple(domains),
        modality_params=modality_params,
        style_params=style_params,
        trust=trust,
        weights=weights,
        lambda2_sweep=sweep,
    )


def config_to_json(cfg: ExperimentConfig) -> str:
    """Serialise a configuration to canonical, human-editable JSON.

    The output re-parses (via :func:`config_from_json`) to a semantically
    identical configuration and is byte-stable: fixed key order, two-space
    indent, trailing newline.
    """

    def retention_doc(r: PrefixRetention | SerialDecayRetention) -> dict[str, Any]:
        if isinstance(r, PrefixRetention):
            return {"kind": "prefix", "capacity": r.capacity}
        return {"kind": "serial_decay", "rho": r.rho}

    doc = {
        "master_seed": cfg.master_seed,
        "samples_per_condition_per_domain": cfg.samples_per_condition_per_domain,
        "domains": [
            {
                "name": d.name,
                "feature_count": d.feature_count,
                "feature_names": list(d.feature_names),
                "dirichlet_concentration": d.dirichlet_concentration,
            }
            for d in cfg.domains
        ],
        "modality_params": {
            m.value: {
                "rate_wps": p.rate_wps,
                "alpha": p.alpha,
                "beta": p.beta,
                "symbol_noise_p": p.symbol_noise_p,
                "retention": retention_doc(p.retention),
            }
            for m, p in ((m, cfg.modality_params[m]) for m in Modality)
        },
        "style_params": {
            s.value: {
                "top_k": "all" if p.top_k is None else p.top_k,
                "quant_levels": p.quant_levels,
                "word_count": p.word_count,
            }
            for s, p in ((s, cfg.style_params[s]) for s in Style)
        },
        "trust": {
            "q_low": cfg.trust.q_low,
            "q_high": cfg.trust.q_high,
            "bias_by_modality": {
                m.value: cfg.trust.bias_by_modality[m] for m in Modality
            },
            "style_factor": {s.value: cfg.trust.style_factor[s] for s in Style},
            "sigma_by_modality": {
                m.value: cfg.trust.sigma_by_modality[m] for m in Modality
            },
        },
        "weights": {
            "lambda1": cfg.weights.lambda1,
            "lambda2": cfg.weights.lambda2,
        },
        "lambda2_sweep": list(cfg.lambda2_sweep),
    }
    return json.dumps(doc, indent=2) + "\n"


def load_config(path: str) -> ExperimentConfig:
    """Read, parse, and fully validate a configuration file."""
    with open(path, "r", encoding="utf-8") as handle:
        cfg = config_from_json(handle.read())
    validate_config(cfg).raise_if_failed()
    return cfg


def dump_config(cfg: ExperimentConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(config_to_json(cfg))


def config_fingerprint(cfg: ExperimentConfig) -> str:
    """SHA-256 hex digest of the canonical JSON form; stable across runs."""
    return hashlib.sha256(config_to_json(cfg).encode("utf-8")).hexdigest()
