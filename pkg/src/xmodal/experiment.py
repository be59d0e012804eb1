"""Protocol orchestration: run the full factorial study and aggregate.

``run_protocol`` executes the complete crossed design (every domain x
modality x style cell, a fixed number of samples each) and returns a
:class:`ResultSet` of per-sample records plus per-condition summaries.
Every random draw comes from a stream derived by hashing
(master_seed, domain, modality, style, sample_index, purpose), so
results are bit-reproducible and independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean, variance
from typing import Hashable, Iterable, Sequence

import numpy as np

from .core import (
    ExperimentConfig,
    Modality,
    StreamKey,
    StreamPurpose,
    Style,
    config_fingerprint,
    derive_stream,
    validate_config,
)
from .encoder import DegenerateSampleError, encode, quantize_vector
from .generator import AttributionVector, IngestedBatch, generate_attribution
from .infotheory import DensityCurve, information_retention, kde
from .metrics import (
    ConditionSummary,
    SampleRecord,
    cognitive_load,
    composite_score,
    comprehension_efficiency,
    simulate_trust,
)
from .percept import MISSING, perceive

__all__ = [
    "ResultSet",
    "PhiMatrix",
    "run_protocol",
    "run_ingested",
    "lambda_sweep",
    "summarize_kde",
]


@dataclass(frozen=True)
class ResultSet:
    """Everything one protocol run produced, tied to its exact config."""

    config: ExperimentConfig
    config_fingerprint: str
    records: tuple[SampleRecord, ...]
    summaries: tuple[ConditionSummary, ...]


@dataclass(frozen=True)
class PhiMatrix:
    """Composite scores on a lambda2 grid: rows = lambda2, cols = condition."""

    lambda2_values: tuple[float, ...]
    conditions: tuple[tuple[Modality, Style], ...]
    phi: tuple[tuple[float, ...], ...]
    argmax_per_lambda: tuple[int, ...]

    def argmax_condition(self, row: int) -> tuple[Modality, Style]:
        """Best condition at the row-th lambda2 value."""
        return self.conditions[self.argmax_per_lambda[row]]


# One sample's pooled-MI contribution: aligned (true, perceived) symbol lists.
_PairBlock = tuple[list[Hashable], list[Hashable]]


def _simulate_one(
    cfg: ExperimentConfig,
    vector: AttributionVector,
    modality: Modality,
    style: Style,
) -> tuple[SampleRecord, _PairBlock | None]:
    """Push one attribution vector through channel, metrics and trust."""

    def stream(purpose: StreamPurpose) -> np.random.Generator:
        return derive_stream(
            StreamKey(
                master_seed=cfg.master_seed,
                domain=vector.domain,
                modality=modality,
                style=style,
                sample_index=vector.sample_id,
                purpose=purpose,
            )
        )

    mparams = cfg.modality_params[modality]
    sparams = cfg.style_params[style]
    draw = simulate_trust(modality, style, cfg.trust, stream(StreamPurpose.TRUST))

    def record(
        i_m: float,
        load: float,
        ce: float,
        entropy_bits: float,
        degenerate: bool,
    ) -> SampleRecord:
        return SampleRecord(
            domain=vector.domain,
            modality=modality,
            style=style,
            sample_id=vector.sample_id,
            i_m=i_m,
            load=load,
            ce=ce,
            duration_s=sparams.word_count / mparams.rate_wps,
            message_entropy_bits=entropy_bits,
            q_true=draw.q_true,
            trust=draw.trust,
            tce_abs=draw.tce_abs,
            degenerate=degenerate,
        )

    try:
        message = encode(vector.values, modality, style, cfg)
    except DegenerateSampleError:
        # No signal to transmit: charge the pure-duration load, zero the
        # information metrics, and flag the sample for exclusion.
        duration = sparams.word_count / mparams.rate_wps
        load = cognitive_load(duration, 0.0, mparams)
        return record(0.0, load, 0.0, 0.0, True), None

    percept = perceive(
        message,
        mparams,
        stream(StreamPurpose.RETENTION),
        stream(StreamPurpose.SYMBOL_NOISE),
    )
    # MI symbols are quantised (sign, level) contents; feature identity is
    # carried by list position, not embedded in the symbol value (embedding
    # it would make every true symbol unique and MI blind to distortion).
    truth: list[Hashable] = list(quantize_vector(vector.values, sparams.quant_levels))
    perceived: list[Hashable] = [
        MISSING if sym is MISSING else (sym.sign, sym.level)
        for sym in percept.perceived
    ]
    i_m, degenerate = information_retention(truth, perceived)
    load = cognitive_load(message.duration_s, message.message_entropy_bits, mparams)
    ce = comprehension_efficiency(i_m, load)
    rec = record(i_m, load, ce, message.message_entropy_bits, degenerate)
    return rec, None if degenerate else (truth, perceived)


def _summarize(
    cfg: ExperimentConfig,
    records: Sequence[SampleRecord],
    blocks: dict[tuple[Modality, Style], list[_PairBlock]],
) -> tuple[ConditionSummary, ...]:
    summaries = []
    for modality, style in cfg.conditions():
        cell = [
            r
            for r in records
            if r.modality is modality and r.style is style and not r.degenerate
        ]
        ces = [r.ce for r in cell]
        tces = [r.tce_abs for r in cell]
        pooled_truth: list[Hashable] = []
        pooled_perceived: list[Hashable] = []
        for truth, perceived in blocks.get((modality, style), []):
            pooled_truth.extend(truth)
            pooled_perceived.extend(perceived)
        pooled_i_m = (
            information_retention(pooled_truth, pooled_perceived)[0]
            if pooled_truth
            else 0.0
        )
        mean_ce = fmean(ces) if ces else 0.0
        mean_tce = fmean(tces) if tces else 0.0
        summaries.append(
            ConditionSummary(
                modality=modality,
                style=style,
                sample_count=len(cell),
                mean_ce=mean_ce,
                var_ce=variance(ces) if len(ces) > 1 else 0.0,
                mean_tce=mean_tce,
                var_tce=variance(tces) if len(tces) > 1 else 0.0,
                pooled_i_m=pooled_i_m,
                mean_load=fmean([r.load for r in cell]) if cell else 0.0,
                phi_default=composite_score(mean_ce, mean_tce, cfg.weights),
            )
        )
    return tuple(summaries)


def run_protocol(cfg: ExperimentConfig) -> ResultSet:
    """Run every (domain, modality, style, sample) cell of the design.

    Iteration order is canonical (domains, then conditions, then sample
    index) but does not influence any value: each sample's streams are
    derived purely from its own coordinates.
    """
    validate_config(cfg).raise_if_failed()
    records: list[SampleRecord] = []
    blocks: dict[tuple[Modality, Style], list[_PairBlock]] = {}
    for domain in cfg.domains:
        for modality, style in cfg.conditions():
            for index in range(cfg.samples_per_condition_per_domain):
                vector = generate_attribution(
                    domain,
                    derive_stream(
                        StreamKey(
                            master_seed=cfg.master_seed,
                            domain=domain.name,
                            modality=modality,
                            style=style,
                            sample_index=index,
                            purpose=StreamPurpose.ATTRIBUTION,
                        )
                    ),
                    sample_id=index,
                )
                rec, block = _simulate_one(cfg, vector, modality, style)
                records.append(rec)
                if block is not None:
                    blocks.setdefault((modality, style), []).append(block)
    return ResultSet(
        config=cfg,
        config_fingerprint=config_fingerprint(cfg),
        records=tuple(records),
        summaries=_summarize(cfg, records, blocks),
    )


def run_ingested(
    cfg: ExperimentConfig,
    batch: IngestedBatch,
    modality: Modality,
    style: Style,
) -> ResultSet:
    """Run ingested attribution vectors through one (modality, style) cell.

    Channel and trust draws still come from the derived streams (trust is
    synthetic either way -- there is no behavioural ground truth in an
    attribution file), keyed by each vector's own domain and sample id.
    """
    validate_config(cfg).raise_if_failed()
    records: list[SampleRecord] = []
    blocks: dict[tuple[Modality, Style], list[_PairBlock]] = {}
    for vector in batch.vectors:
        rec, block = _simulate_one(cfg, vector, modality, style)
        records.append(rec)
        if block is not None:
            blocks.setdefault((modality, style), []).append(block)
    return ResultSet(
        config=cfg,
        config_fingerprint=config_fingerprint(cfg),
        records=tuple(records),
        summaries=_summarize(cfg, records, blocks),
    )


def lambda_sweep(
    rs: ResultSet, lambda2_values: Iterable[float] | None = None
) -> PhiMatrix:
    """Score every condition's mean CE/TCE across a lambda2 grid.

    Defaults to the config's sweep grid.  Ties in a row's argmax break
    lexicographically on (modality value, style value) so the sweep is
    fully deterministic.
    """
    grid = tuple(
        rs.config.lambda2_sweep if lambda2_values is None else lambda2_values
    )
    if not grid:
        raise ValueError("lambda2 sweep grid is empty")
    conditions = tuple(rs.config.conditions())
    by_condition = {(s.modality, s.style): s for s in rs.summaries}
    rows = []
    argmaxes = []
    lambda1 = rs.config.weights.lambda1
    for l2 in grid:
        row = tuple(
            lambda1 * by_condition[c].mean_ce - l2 * by_condition[c].mean_tce
            for c in conditions
        )
        best = max(
            range(len(conditions)),
            key=lambda j: (
                row[j],
                # Negated-ordinal trick: ties prefer the lexicographically
                # smallest (modality, style) value pair.
                tuple(-ord(ch) for ch in conditions[j][0].value),
                tuple(-ord(ch) for ch in conditions[j][1].value),
            ),
        )
        rows.append(row)
        argmaxes.append(best)
    return PhiMatrix(
        lambda2_values=grid,
        conditions=conditions,
        phi=tuple(rows),
        argmax_per_lambda=tuple(argmaxes),
    )


def summarize_kde(
    rs: "ResultSet | Sequence[SampleRecord]", metric: str, group_by: str = "modality"
) -> list[tuple[Modality, DensityCurve]]:
    """Density curves of a per-sample metric, one per modality.

    ``metric`` is ``"ce"`` or ``"tce"``.  Accepts a full result set or a
    bare record sequence (e.g. re-read from CSV).  Degenerate samples
    are excluded, matching the condition summaries.  A group whose
    values have no spread cannot be density-estimated and raises
    ``ValueError`` naming the group.
    """
    if group_by != "modality":
        raise ValueError(f"unsupported group_by: {group_by!r}")
    getters = {"ce": lambda r: r.ce, "tce": lambda r: r.tce_abs}
    if metric not in getters:
        raise ValueError(f"unknown metric {metric!r}: expected 'ce' or 'tce'")
    get = getters[metric]
    records = rs.records if isinstance(rs, ResultSet) else rs
    curves = []
    for modality in Modality:
        values = [
            get(r) for r in records if r.modality is modality and not r.degenerate
        ]
        if not values:
            continue
        try:
            curves.append((modality, kde(values)))
        except ValueError as exc:
            raise ValueError(f"modality {modality.value!r}: {exc}") from None
    return curves
