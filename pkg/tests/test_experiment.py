"""Protocol orchestration, aggregation, sweep, and density summaries."""

import json
from dataclasses import replace
from statistics import fmean, variance

import pytest

from xmodal import (
    ConfigError,
    IngestedBatch,
    Modality,
    SampleRecord,
    Style,
    composite_score,
    config_fingerprint,
    ingest_attributions,
    lambda_sweep,
    run_ingested,
    run_protocol,
    summarize_kde,
)


def test_full_design_produces_one_record_per_cell_sample(cfg, rs):
    assert len(rs.records) == 360
    per_cell = {}
    for r in rs.records:
        per_cell.setdefault((r.domain, r.modality, r.style), []).append(r.sample_id)
    assert len(per_cell) == 12  # 2 domains x 6 conditions
    for ids in per_cell.values():
        assert sorted(ids) == list(range(30))
    assert rs.config_fingerprint == config_fingerprint(cfg)


def test_runs_are_reproducible(cfg, rs):
    again = run_protocol(cfg)
    assert again.records == rs.records
    assert again.summaries == rs.summaries


def test_sample_streams_are_isolated(cfg, rs):
    # shrinking the design must not change the samples that remain
    small = run_protocol(replace(cfg, samples_per_condition_per_domain=3))
    by_key = {
        (r.domain, r.modality, r.style, r.sample_id): r for r in rs.records
    }
    for r in small.records:
        assert by_key[(r.domain, r.modality, r.style, r.sample_id)] == r


def test_record_fields_are_internally_consistent(rs):
    for r in rs.records:
        if r.degenerate:
            continue
        assert 0.0 <= r.i_m <= 1.0 + 1e-12
        assert r.load > 0.0
        assert r.ce == pytest.approx(r.i_m / r.load, abs=1e-12)
        assert r.tce_abs == pytest.approx(abs(r.trust - r.q_true), abs=1e-12)
        assert 0.0 <= r.trust <= 1.0


def test_summaries_match_recomputation_from_records(cfg, rs):
    for summary in rs.summaries:
        cell = [
            r
            for r in rs.records
            if r.modality is summary.modality
            and r.style is summary.style
            and not r.degenerate
        ]
        assert summary.sample_count == len(cell) == 60
        ces = [r.ce for r in cell]
        tces = [r.tce_abs for r in cell]
        assert summary.mean_ce == pytest.approx(fmean(ces), abs=1e-12)
        assert summary.var_ce == pytest.approx(variance(ces), abs=1e-12)
        assert summary.mean_tce == pytest.approx(fmean(tces), abs=1e-12)
        assert summary.var_tce == pytest.approx(variance(tces), abs=1e-12)
        assert summary.mean_load == pytest.approx(
            fmean(r.load for r in cell), abs=1e-12
        )
        assert summary.phi_default == pytest.approx(
            composite_score(summary.mean_ce, summary.mean_tce, cfg.weights), abs=1e-15
        )
        assert 0.0 <= summary.pooled_i_m <= 1.0 + 1e-12


def test_degenerate_samples_are_excluded_from_aggregates(cfg, tmp_path):
    path = tmp_path / "mix.json"
    path.write_text(
        json.dumps(
            {
                "feature_names": ["a", "b", "c"],
                "samples": [[0.5, -0.3, 0.2], [0.0, 0.0, 0.0], [0.9, 0.05, -0.05]],
            }
        )
    )
    rs = run_ingested(
        cfg, ingest_attributions(path), Modality.TEXT, Style.DETAILED
    )
    assert len(rs.records) == 3
    flags = [r.degenerate for r in rs.records]
    assert flags == [False, True, False]
    zero = rs.records[1]
    assert zero.i_m == 0.0 and zero.ce == 0.0 and zero.message_entropy_bits == 0.0
    by_cond = {(s.modality, s.style): s for s in rs.summaries}
    assert by_cond[(Modality.TEXT, Style.DETAILED)].sample_count == 2


def test_ingested_domain_comes_from_file_stem(cfg, tmp_path):
    path = tmp_path / "loanbook.json"
    path.write_text(
        json.dumps({"feature_names": ["a", "b", "c"], "samples": [[0.5, 0.3, -0.2]]})
    )
    rs = run_ingested(cfg, ingest_attributions(path), Modality.VOICE, Style.BRIEF)
    assert rs.records[0].domain == "loanbook"


def test_ingested_empty_batch_is_allowed(cfg):
    batch = IngestedBatch(
        source_path="inline",
        feature_names=("a", "b"),
        vectors=(),
        normalized=False,
    )
    rs = run_ingested(cfg, batch, Modality.TEXT, Style.BRIEF)
    assert rs.records == ()


def test_ingested_narrow_vectors_clamp_to_available_features(cfg, tmp_path):
    # brief keeps top 3, but 2-feature vectors simply transmit both
    path = tmp_path / "narrow.json"
    path.write_text(json.dumps({"feature_names": ["a", "b"], "samples": [[0.6, -0.4]]}))
    rs = run_ingested(cfg, ingest_attributions(path), Modality.TEXT, Style.BRIEF)
    assert len(rs.records) == 1
    assert not rs.records[0].degenerate
    assert 0.0 <= rs.records[0].i_m <= 1.0


def test_protocol_rejects_invalid_config(cfg):
    bad = replace(cfg, samples_per_condition_per_domain=0)
    with pytest.raises(ConfigError):
        run_protocol(bad)


# --- lambda sweep ---------------------------------------------------------------


def test_sweep_scores_are_affine_in_lambda(cfg, rs):
    matrix = lambda_sweep(rs)
    assert matrix.lambda2_values == cfg.lambda2_sweep
    assert len(matrix.conditions) == 6
    by_cond = {(s.modality, s.style): s for s in rs.summaries}
    for i, l2 in enumerate(matrix.lambda2_values):
        for j, cond in enumerate(matrix.conditions):
            s = by_cond[cond]
            expected = cfg.weights.lambda1 * s.mean_ce - l2 * s.mean_tce
            assert matrix.phi[i][j] == pytest.approx(expected, abs=1e-12)


def test_sweep_argmax_index_agrees_with_row_maximum(rs):
    matrix = lambda_sweep(rs)
    for i, row in enumerate(matrix.phi):
        j = matrix.argmax_per_lambda[i]
        assert row[j] == max(row)
        assert matrix.argmax_condition(i) == matrix.conditions[j]


def test_sweep_winner_tce_never_increases_with_lambda(rs):
    # heavier trust penalty can only push the winner toward lower TCE
    matrix = lambda_sweep(rs)
    by_cond = {(s.modality, s.style): s for s in rs.summaries}
    winner_tces = [
        by_cond[matrix.argmax_condition(i)].mean_tce
        for i in range(len(matrix.lambda2_values))
    ]
    assert all(a >= b - 1e-12 for a, b in zip(winner_tces, winner_tces[1:]))


def test_sweep_custom_grid_and_empty_grid(rs):
    matrix = lambda_sweep(rs, [0.5, 1.0])
    assert matrix.lambda2_values == (0.5, 1.0)
    with pytest.raises(ValueError, match="empty"):
        lambda_sweep(rs, [])


# --- KDE summaries ----------------------------------------------------------------


def test_kde_summary_one_curve_per_modality(rs):
    for metric in ("ce", "tce"):
        curves = summarize_kde(rs, metric)
        assert [m for m, _ in curves] == [Modality.TEXT, Modality.VOICE]
        for _, curve in curves:
            assert curve.integral() == pytest.approx(1.0, abs=1e-3)


def test_kde_summary_rejects_unknown_requests(rs):
    with pytest.raises(ValueError, match="metric"):
        summarize_kde(rs, "phi")
    with pytest.raises(ValueError, match="group_by"):
        summarize_kde(rs, "ce", group_by="style")


def _flat_record(i):
    return SampleRecord(
        domain="d",
        modality=Modality.TEXT,
        style=Style.BRIEF,
        sample_id=i,
        i_m=0.5,
        load=2.0,
        ce=0.25,  # identical for every record: zero spread
        duration_s=1.0,
        message_entropy_bits=1.0,
        q_true=0.5,
        trust=0.6,
        tce_abs=0.1,
        degenerate=False,
    )


def test_kde_summary_zero_spread_names_the_group():
    records = tuple(_flat_record(i) for i in range(10))
    with pytest.raises(ValueError, match="text"):
        summarize_kde(records, "ce")
