"""Command-line interface.

Subcommands
-----------
default-config  write the built-in configuration as JSON
simulate        run the full protocol; emit CSVs and core figures
sweep           score conditions across a lambda2 grid; emit CSV + heatmap
ingest          run external attribution vectors through one condition
report          re-render figures (incl. densities) from a samples CSV

Exit codes: 0 success; 1 usage or configuration error; 2 I/O error
(missing/unwritable paths); 3 data/format error (malformed input files).
Seed precedence: ``--seed`` flag > config file > ``XMODAL_SEED``
environment variable > built-in default.  All subcommands are
idempotent: re-running with the same inputs rewrites identical outputs.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import NoReturn, Sequence

from .core import (
    ConfigError,
    ExperimentConfig,
    Modality,
    Style,
    config_to_json,
    default_config,
    load_config,
)
from .experiment import (
    PhiMatrix,
    ResultSet,
    lambda_sweep,
    run_ingested,
    run_protocol,
    summarize_kde,
)
from .generator import DataFormatError, DegenerateInputError, ingest_attributions
from .report import (
    FigureSpec,
    condition_column,
    read_samples_csv,
    render_heatmap,
    render_kde,
    render_mean_tradeoff,
    render_scatter,
    write_phi_csv,
    write_samples_csv,
    write_summary_csv,
)

__all__ = ["main", "build_parser"]

_ENV_SEED = "XMODAL_SEED"


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit 1 (2 is reserved for I/O errors)."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="xmodal",
        description="Simulate explanation delivery across modalities and styles.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_cfg = sub.add_parser(
        "default-config", help="write the built-in configuration as JSON"
    )
    p_cfg.add_argument(
        "path", nargs="?", default=None, help="output file (default: stdout)"
    )
    p_cfg.set_defaults(func=cmd_default_config)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="configuration JSON file")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--out", default="out", help="output directory (default: out)")

    p_sim = sub.add_parser("simulate", help="run the full factorial protocol")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="composite scores across a lambda2 grid")
    common(p_sweep)
    p_sweep.add_argument(
        "--lambda2",
        default=None,
        metavar="LO:HI:STEP",
        help="override the sweep grid, e.g. 0.1:1.0:0.1",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_ing = sub.add_parser(
        "ingest", help="run attribution vectors from a file through one condition"
    )
    p_ing.add_argument("file", help="attribution CSV or JSON file")
    common(p_ing)
    p_ing.add_argument(
        "--modality",
        required=True,
        choices=[m.value for m in Modality],
        help="delivery modality",
    )
    p_ing.add_argument(
        "--style",
        required=True,
        choices=[s.value for s in Style],
        help="explanation style",
    )
    p_ing.add_argument(
        "--normalize",
        action="store_true",
        help="rescale each vector to unit L1 mass before encoding",
    )
    p_ing.set_defaults(func=cmd_ingest)

    p_rep = sub.add_parser(
        "report", help="re-render all figures from an existing samples CSV"
    )
    p_rep.add_argument("samples", help="samples.csv produced by simulate/ingest")
    p_rep.add_argument("--out", default="out", help="output directory (default: out)")
    p_rep.set_defaults(func=cmd_report)

    return parser


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Apply the seed precedence: flag > config file > env > built-in."""
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = default_config()
        env_seed = os.environ.get(_ENV_SEED)
        if env_seed is not None:
            try:
                cfg = replace(cfg, master_seed=int(env_seed))
            except ValueError:
                raise ConfigError(
                    f"{_ENV_SEED} must be an integer, got {env_seed!r}"
                ) from None
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    return cfg


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _phi_heatmap_inputs(
    rs: ResultSet,
) -> tuple[list[str], list[str], list[list[float]]]:
    by_condition = {(s.modality, s.style): s.phi_default for s in rs.summaries}
    rows = [m.value for m in Modality]
    cols = [s.value for s in Style]
    values = [[by_condition[(m, s)] for s in Style] for m in Modality]
    return rows, cols, values


def cmd_default_config(args: argparse.Namespace) -> int:
    text = config_to_json(default_config())
    if args.path is None:
        sys.stdout.write(text)
    else:
        Path(args.path).write_text(text)
        print(f"wrote {args.path}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(args)
    started = time.perf_counter()
    rs = run_protocol(cfg)
    elapsed = time.perf_counter() - started

    write_samples_csv(rs.records, out / "samples.csv")
    write_summary_csv(rs.summaries, out / "summary.csv")
    write_phi_csv(lambda_sweep(rs, [cfg.weights.lambda2]), out / "phi.csv")
    render_mean_tradeoff(
        rs.records,
        FigureSpec(kind="mean_tradeoff", title="Mean comprehension-trust trade-off"),
        out / "mean_tradeoff.svg",
    )
    render_scatter(
        rs.records,
        FigureSpec(
            kind="sample_scatter",
            title="Per-sample comprehension vs trust calibration",
        ),
        out / "sample_scatter.svg",
    )
    rows, cols, values = _phi_heatmap_inputs(rs)
    render_heatmap(
        rows,
        cols,
        values,
        FigureSpec(kind="phi_heatmap", title="Composite score by modality and style"),
        out / "phi_heatmap.svg",
    )

    degenerate = sum(1 for r in rs.records if r.degenerate)
    print(
        f"simulated {len(rs.records)} sample records "
        f"({len(rs.records) - degenerate} usable, {degenerate} degenerate) "
        f"in {elapsed:.2f} s"
    )
    print(f"config fingerprint: {rs.config_fingerprint}")
    print(
        "wrote samples.csv, summary.csv, phi.csv, mean_tradeoff.svg, "
        f"sample_scatter.svg, phi_heatmap.svg to {out}"
    )
    return 0


def _parse_lambda_grid(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--lambda2 expects LO:HI:STEP, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"--lambda2 expects numbers, got {text!r}") from None
    if step <= 0.0 or hi < lo:
        raise ConfigError("--lambda2 needs STEP > 0 and HI >= LO")
    grid = []
    value = lo
    while value <= hi + 1e-9:
        grid.append(round(value, 12))
        value += step
    if any(not 0.0 < v <= 1.0 for v in grid):
        raise ConfigError("--lambda2 values must lie in (0, 1]")
    return tuple(grid)


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(args)
    grid = _parse_lambda_grid(args.lambda2) if args.lambda2 else None
    rs = run_protocol(cfg)
    matrix = lambda_sweep(rs, grid)

    write_phi_csv(matrix, out / "phi_sweep.csv")
    render_heatmap(
        ["%g" % l2 for l2 in matrix.lambda2_values],
        [condition_column(m, s) for m, s in matrix.conditions],
        matrix.phi,
        FigureSpec(
            kind="sweep_heatmap",
            title="Composite score across trust-weight settings",
        ),
        out / "sweep_heatmap.svg",
    )
    for i, l2 in enumerate(matrix.lambda2_values):
        modality, style = matrix.argmax_condition(i)
        best = matrix.phi[i][matrix.argmax_per_lambda[i]]
        print(
            f"lambda2={l2:g}: best condition {modality.value}-{style.value} "
            f"(phi={best:.4f})"
        )
    print(f"wrote phi_sweep.csv, sweep_heatmap.svg to {out}")
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(args)
    batch = ingest_attributions(args.file, normalize=args.normalize)
    modality = Modality(args.modality)
    style = Style(args.style)
    rs = run_ingested(cfg, batch, modality, style)

    write_samples_csv(rs.records, out / "samples.csv")
    write_summary_csv(rs.summaries, out / "summary.csv")

    degenerate_ids = [r.sample_id for r in rs.records if r.degenerate]
    print(
        f"ingested {len(batch.vectors)} vectors from {batch.source_path} "
        f"as {modality.value}-{style.value}"
    )
    print("note: trust outcomes are synthetic (attribution files carry no ground truth)")
    if degenerate_ids:
        print(
            f"skipped as degenerate (all-zero signal): "
            f"{len(degenerate_ids)} sample(s): "
            + ", ".join(str(i) for i in degenerate_ids)
        )
    print(f"wrote samples.csv, summary.csv to {out}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    records = read_samples_csv(args.samples)
    render_mean_tradeoff(
        records,
        FigureSpec(kind="mean_tradeoff", title="Mean comprehension-trust trade-off"),
        out / "mean_tradeoff.svg",
    )
    render_scatter(
        records,
        FigureSpec(
            kind="sample_scatter",
            title="Per-sample comprehension vs trust calibration",
        ),
        out / "sample_scatter.svg",
    )
    render_kde(
        summarize_kde(records, "ce"),
        FigureSpec(kind="kde", title="Comprehension efficiency density by modality"),
        out / "kde_ce.svg",
        x_label="comprehension efficiency",
    )
    render_kde(
        summarize_kde(records, "tce"),
        FigureSpec(kind="kde", title="Trust calibration error density by modality"),
        out / "kde_tce.svg",
        x_label="trust calibration error",
    )
    print(
        f"re-rendered mean_tradeoff.svg, sample_scatter.svg, kde_ce.svg, "
        f"kde_tce.svg from {args.samples} into {out}"
    )
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataFormatError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
