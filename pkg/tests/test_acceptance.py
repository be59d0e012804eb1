"""Acceptance gate: the behavioural guarantees the package ships with.

Each test here checks one numbered guarantee end to end at its stated
tolerance and emits a single PASS/FAIL line (run with ``-v`` to see one
line per criterion, ``-s`` to also see the printed verdicts).  These are
deliberately integration-level: they exercise the shipped default
configuration, the real CLI, and real files on disk.
"""

import math
import time
import warnings
from collections import Counter
from dataclasses import replace

import numpy as np

from xmodal import (
    MISSING,
    Modality,
    PrefixRetention,
    Style,
    default_config,
    entropy,
    folded_normal_mean,
    generate_attribution,
    information_retention,
    ingest_attributions,
    kde,
    lambda_sweep,
    mutual_information,
    run_protocol,
    simulate_trust,
    summarize_kde,
    write_attributions_csv,
)
from xmodal.cli import main


def _verdict(label, ok, detail=""):
    suffix = f"  [{detail}]" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'} {label}{suffix}")
    assert ok, f"{label}{suffix}"


def _by_condition(rs):
    return {(s.modality, s.style): s for s in rs.summaries}


def test_criterion_01_design_shape_and_runtime(rs):
    """360 records: 30 samples x 2 domains x 6 conditions, in seconds."""
    started = time.perf_counter()
    timed = run_protocol(default_config())
    elapsed = time.perf_counter() - started

    counts = Counter((r.domain, r.modality, r.style) for r in timed.records)
    shape_ok = (
        len(timed.records) == 360
        and len(counts) == 12
        and set(counts.values()) == {30}
    )
    if 3.0 <= elapsed <= 10.0:
        warnings.warn(f"protocol run took {elapsed:.2f} s (soft budget is 3 s)")
    runtime_ok = elapsed <= 10.0
    _verdict(
        "criterion 1: full design = 360 records, runtime within budget",
        shape_ok and runtime_ok,
        f"records={len(timed.records)}, cells={len(counts)}, runtime={elapsed:.2f}s",
    )
    assert rs.records == timed.records  # session fixture is the same run


def test_criterion_02_text_reads_more_efficient_per_style(rs):
    """Mean CE higher for text than voice within every style (margin 0.005)."""
    by = _by_condition(rs)
    margins = {
        style.value: by[(Modality.TEXT, style)].mean_ce
        - by[(Modality.VOICE, style)].mean_ce
        for style in Style
    }
    _verdict(
        "criterion 2: mean CE(text) > mean CE(voice) per style by >= 0.005",
        all(m >= 0.005 for m in margins.values()),
        ", ".join(f"{k}:+{v:.4f}" for k, v in margins.items()),
    )


def test_criterion_03_voice_better_trust_calibration_per_style(rs):
    """Mean TCE lower for voice than text within every style (margin 0.01)."""
    by = _by_condition(rs)
    margins = {
        style.value: by[(Modality.TEXT, style)].mean_tce
        - by[(Modality.VOICE, style)].mean_tce
        for style in Style
    }
    _verdict(
        "criterion 3: mean TCE(voice) < mean TCE(text) per style by >= 0.01",
        all(m >= 0.01 for m in margins.values()),
        ", ".join(f"{k}:+{v:.4f}" for k, v in margins.items()),
    )


def test_criterion_04_composite_ranking_flips_inside_sweep(cfg, rs):
    """Text-detailed tops phi at lambda2=0.5, voice-analogy at 1.0, and the
    analytic crossover lies in (0.5, 1.0]."""
    matrix = lambda_sweep(rs)
    idx = {round(l2, 6): i for i, l2 in enumerate(matrix.lambda2_values)}
    best_half = matrix.argmax_condition(idx[0.5])
    best_full = matrix.argmax_condition(idx[1.0])

    by = _by_condition(rs)
    td = by[(Modality.TEXT, Style.DETAILED)]
    va = by[(Modality.VOICE, Style.ANALOGY)]
    crossover = (td.mean_ce - va.mean_ce) / (td.mean_tce - va.mean_tce)

    ok = (
        best_half == (Modality.TEXT, Style.DETAILED)
        and best_full == (Modality.VOICE, Style.ANALOGY)
        and 0.5 < crossover <= 1.0
    )
    _verdict(
        "criterion 4: argmax(0.5)=text-detailed, argmax(1.0)=voice-analogy, "
        "crossover in (0.5, 1.0]",
        ok,
        f"argmax@0.5={best_half[0].value}-{best_half[1].value}, "
        f"argmax@1.0={best_full[0].value}-{best_full[1].value}, "
        f"lambda*={crossover:.4f}",
    )


def test_criterion_05_modality_variance_ordering(rs):
    """Text CE is the steadier metric, voice TCE the noisier one."""
    usable = [r for r in rs.records if not r.degenerate]
    text = [r for r in usable if r.modality is Modality.TEXT]
    voice = [r for r in usable if r.modality is Modality.VOICE]
    var = lambda xs: float(np.var(xs, ddof=1))
    var_ce_t, var_ce_v = var([r.ce for r in text]), var([r.ce for r in voice])
    var_tce_t, var_tce_v = (
        var([r.tce_abs for r in text]),
        var([r.tce_abs for r in voice]),
    )
    ok = var_ce_t < var_ce_v and var_tce_v > var_tce_t
    _verdict(
        "criterion 5: var CE text < voice; var TCE voice > text",
        ok,
        f"varCE {var_ce_t:.5f}<{var_ce_v:.5f}, varTCE {var_tce_v:.5f}>{var_tce_t:.5f}",
    )


def test_criterion_06_trust_error_matches_folded_normal(cfg):
    """With quality pinned (clamping provably inactive), the empirical mean
    |trust - quality| over 1e5 draws sits within 3 SE of the closed form."""
    pinned = replace(cfg.trust, q_low=0.5 - 1e-9, q_high=0.5 + 1e-9)
    details = []
    ok = True
    for modality in Modality:
        for style in Style:
            shift = pinned.bias_by_modality[modality] * pinned.style_factor[style]
            sigma = pinned.sigma_by_modality[modality]
            # clamping cannot trigger: 0.5 + shift +/- 5 sigma stays in (0, 1)
            assert 0.0 < 0.5 + shift - 5 * sigma and 0.5 + shift + 5 * sigma < 1.0
            rng = np.random.default_rng(2024)
            draws = np.array(
                [
                    simulate_trust(modality, style, pinned, rng).tce_abs
                    for _ in range(100_000)
                ]
            )
            expected = folded_normal_mean(shift, sigma)
            se = draws.std(ddof=1) / math.sqrt(draws.size)
            gap = abs(float(draws.mean()) - expected)
            ok = ok and gap <= 3.0 * se
            details.append(f"{modality.value[0]}{style.value[0]}:{gap / se:.2f}se")
    _verdict(
        "criterion 6: mean |T-Q| within 3 SE of folded-normal mean per condition",
        ok,
        " ".join(details),
    )


def _mi_from_joint_table(pairs):
    """Independent oracle: sum over the contingency table directly."""
    joint = Counter(pairs)
    left = Counter(a for a, _ in pairs)
    right = Counter(u for _, u in pairs)
    n = len(pairs)
    return sum(
        (c / n) * math.log2((c / n) / ((left[a] / n) * (right[u] / n)))
        for (a, u), c in joint.items()
    )


def test_criterion_07_information_estimators_against_oracles():
    """Closed-form entropies, MI bounds, and a brute-force MI oracle."""
    ok = abs(entropy({"a": 1, "b": 1, "c": 1, "d": 1}) - 2.0) <= 1e-12
    ok = ok and abs(entropy(["x", "x", "y", "z"]) - 1.5) <= 1e-12

    xs = ["a", "b", "b", "c", "c", "c"]
    ok = ok and abs(mutual_information(list(zip(xs, xs))) - entropy(xs)) <= 1e-12

    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 13))  # up to 12 pairs
        ka, ku = int(rng.integers(1, 5)), int(rng.integers(1, 5))  # alphabets <= 4
        pairs = [(int(rng.integers(0, ka)), int(rng.integers(0, ku))) for _ in range(n)]
        mi = mutual_information(pairs)
        oracle = max(_mi_from_joint_table(pairs), 0.0)
        worst = max(worst, abs(mi - oracle))
        h_a = entropy([a for a, _ in pairs])
        h_u = entropy([u for _, u in pairs])
        ok = ok and abs(mi - oracle) <= 1e-12 and -1e-12 <= mi <= min(h_a, h_u) + 1e-12
    _verdict(
        "criterion 7: entropy closed forms (1e-12), MI = joint-table oracle, "
        "0 <= I <= min(H(A), H(U))",
        ok,
        f"worst MI deviation {worst:.2e}",
    )


def test_criterion_08_lossless_limit_and_blank_perception(cfg):
    """No truncation + no noise + full capacity => I_M = 1 exactly;
    perceiving nothing => I_M = 0."""
    lossless = replace(
        cfg,
        modality_params={
            m: replace(
                cfg.modality_params[m],
                symbol_noise_p=0.0,
                retention=PrefixRetention(
                    capacity=max(d.feature_count for d in cfg.domains)
                ),
            )
            for m in Modality
        },
        style_params={
            s: replace(cfg.style_params[s], top_k=None) for s in Style
        },
    )
    result = run_protocol(lossless)
    usable = [r for r in result.records if not r.degenerate]
    perfect = all(r.i_m == 1.0 for r in usable)

    blank, blank_degenerate = information_retention(
        ["a", "b", "a", "c"], [MISSING] * 4
    )
    ok = perfect and len(usable) >= 300 and blank == 0.0 and not blank_degenerate
    _verdict(
        "criterion 8: lossless channel retains exactly 1.0; blank percept 0.0",
        ok,
        f"{len(usable)} usable records all at i_m=1.0; blank i_m={blank}",
    )


def test_criterion_09_outputs_byte_reproducible(tmp_path):
    """Two identical CLI runs produce byte-identical CSVs and SVGs."""
    dirs = (tmp_path / "a", tmp_path / "b")
    for d in dirs:
        assert main(["simulate", "--out", str(d)]) == 0
        assert main(["sweep", "--out", str(d)]) == 0
        assert main(["report", str(d / "samples.csv"), "--out", str(d)]) == 0
    names = [
        "samples.csv",
        "summary.csv",
        "phi.csv",
        "phi_sweep.csv",
        "mean_tradeoff.svg",
        "sample_scatter.svg",
        "phi_heatmap.svg",
        "sweep_heatmap.svg",
        "kde_ce.svg",
        "kde_tce.svg",
    ]
    mismatched = [
        n for n in names if (dirs[0] / n).read_bytes() != (dirs[1] / n).read_bytes()
    ]
    _verdict(
        "criterion 9: repeated runs byte-identical across all artifacts",
        not mismatched,
        f"{len(names)} files compared" + (f"; differ: {mismatched}" if mismatched else ""),
    )


def test_criterion_10_density_curves_are_calibrated(rs):
    """Every emitted density integrates to 1 (+/- 1e-3) and the estimator
    recovers the standard normal peak on 1000 draws."""
    integrals = [
        curve.integral()
        for metric in ("ce", "tce")
        for _, curve in summarize_kde(rs, metric)
    ]
    unit_mass = all(abs(v - 1.0) <= 1e-3 for v in integrals)

    draws = np.random.default_rng(0).standard_normal(1000)
    curve = kde(draws)
    peak = float(np.interp(0.0, curve.grid, curve.density))
    peak_ok = abs(peak - 1.0 / math.sqrt(2.0 * math.pi)) < 0.05
    _verdict(
        "criterion 10: KDE curves integrate to 1 +/- 1e-3; normal peak within 0.05",
        unit_mass and peak_ok,
        f"integrals={['%.6f' % v for v in integrals]}, peak={peak:.4f}",
    )


def test_criterion_11_ingestion_round_trip_and_error_codes(cfg, tmp_path, capsys):
    """File -> ingest -> re-emit is value-identical (1e-12) and malformed
    inputs exit with the documented codes."""
    rng = np.random.default_rng(77)
    vectors = [
        generate_attribution(cfg.domains[0], rng, sample_id=i) for i in range(10)
    ]
    first = tmp_path / "attr.csv"
    second = tmp_path / "attr2.csv"
    write_attributions_csv(first, cfg.domains[0].feature_names, vectors)
    batch = ingest_attributions(first)
    max_err = max(
        float(np.max(np.abs(orig.values - loaded.values)))
        for orig, loaded in zip(vectors, batch.vectors)
    )
    write_attributions_csv(second, batch.feature_names, batch.vectors)
    round_trip_ok = max_err <= 1e-12 and first.read_bytes() == second.read_bytes()

    missing = main(
        ["ingest", str(tmp_path / "ghost.csv"), "--modality", "text",
         "--style", "brief", "--out", str(tmp_path / "o1")]
    )
    bad = tmp_path / "bad.csv"
    bad.write_text("sample_id,a,b,c\n0,0.1,zap,0.2\n")
    malformed = main(
        ["ingest", str(bad), "--modality", "text", "--style", "brief",
         "--out", str(tmp_path / "o2")]
    )
    usage = main(["ingest", str(first)])  # missing required flags
    capsys.readouterr()

    codes_ok = (missing, malformed, usage) == (2, 3, 1)
    _verdict(
        "criterion 11: ingest round-trip value-identical; exit codes 2/3/1",
        round_trip_ok and codes_ok,
        f"max_err={max_err:.1e}, codes={(missing, malformed, usage)}",
    )
