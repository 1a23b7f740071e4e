"""``aps`` command line: batch runs over a performance-matrix CSV.

Subcommands: validate, metrics, select, pca, plot, report.  Options can
come from flags, a ``--config`` file of ``key = value`` lines, or the
``APS_OUTPUT_DIR`` environment variable, merged in that precedence
order on top of the built-in defaults.  The resolved configuration is
echoed to stderr so every run is reproducible from its log.

Exit codes: 0 success, 1 user error (flags/config), 2 data error
(unreadable or invalid input), 3 internal error.
"""

import argparse
import csv
import io
import os
import re
import sys
import tempfile
from dataclasses import dataclass, fields as dataclass_fields
from pathlib import Path
from typing import Sequence

from .core import ApsError, PerformanceMatrix
from . import ingest
from .metrics import (DIFFICULTY_ORIENTATIONS, DIVERSITY_VARIANTS,
                      metric_table)
from .pca import IMPUTATION_MODES, pca_project
from .search import SEARCH_MODES, exhaustive_search, greedy_search
from .viz import PlotSpec, mini_aps_grid, pca_scatter_svg

_INPUT_FORMATS = ("auto", "long", "wide")


class _UserError(Exception):
    """Bad flags or config; maps to exit 1."""


class _DataError(Exception):
    """Unreadable input file; maps to exit 2 like ApsError."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved options for one run (worker_count already an int)."""

    input_path: str | None = None
    input_format: str = "auto"
    difficulty_orientation: str = "one-minus-mean"
    diversity_variant: str = "nth-root"
    pca_imputation: str = "complete-rows-only"
    output_dir: str = "./aps-out"
    worker_count: int = 1


_CONFIG_KEYS = tuple(f.name for f in dataclass_fields(RunConfig))


def _fmt4(x: float) -> str:
    return f"{x:.4f}"  # round-half-even, matching table precision


def _write_atomic(path: Path, text: str) -> None:
    """Write via a sibling temp file + rename; never leaves partials."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".",
                               suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--input", "-i", default=argparse.SUPPRESS,
                   help="input CSV (wide or long format)")
    g.add_argument("--format", default=argparse.SUPPRESS,
                   choices=_INPUT_FORMATS, help="input shape (default auto)")
    g.add_argument("--output-dir", "-o", default=argparse.SUPPRESS,
                   help="where output files go (default ./aps-out, or "
                        "$APS_OUTPUT_DIR)")
    g.add_argument("--difficulty-orientation", default=argparse.SUPPRESS,
                   choices=DIFFICULTY_ORIENTATIONS)
    g.add_argument("--diversity-variant", default=argparse.SUPPRESS,
                   choices=DIVERSITY_VARIANTS)
    g.add_argument("--pca-imputation", default=argparse.SUPPRESS,
                   choices=IMPUTATION_MODES)
    g.add_argument("--workers", default=argparse.SUPPRESS,
                   help="worker count for the selection search, or 'auto'")
    g.add_argument("--config", default=argparse.SUPPRESS,
                   help="file of key = value lines mirroring these options")

    parser = argparse.ArgumentParser(
        prog="aps", parents=[common],
        description="Analyze an algorithm-performance matrix: per-dataset "
                    "metrics, diverse-subset search, PCA, and SVG plots.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common],
                   help="print shape counts and warnings for the input")
    sub.add_parser("metrics", parents=[common],
                   help="write per-dataset difficulty/variance to metrics.csv")
    p_sel = sub.add_parser("select", parents=[common],
                           help="search dataset subsets by diversity; "
                                "writes selections.csv")
    p_sel.add_argument("--size", required=True,
                       help="subset size or range, e.g. 3 or 2..4")
    p_sel.add_argument("--mode", choices=SEARCH_MODES, default="max")
    p_sel.add_argument("--top", type=int, default=1,
                       help="how many ranked selections to keep per size")
    p_sel.add_argument("--strategy", choices=("exhaustive", "greedy"),
                       default="exhaustive")
    p_pca = sub.add_parser("pca", parents=[common],
                           help="project datasets onto principal components; "
                                "writes pca.csv")
    p_pca.add_argument("--components", type=int, default=2)
    p_plot = sub.add_parser("plot", parents=[common],
                            help="write SVG scatter plots")
    p_plot.add_argument("kind", choices=("mini", "pca"))
    p_plot.add_argument("--color-by", choices=("difficulty", "variance"),
                        default=None, help="gradient-color the PCA scatter")
    p_plot.add_argument("--ordered", action="store_true",
                        help="mini grid: render both orientations of each pair")
    sub.add_parser("report", parents=[common],
                   help="write a Markdown summary to report.md")
    return parser


def _parse_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UserError(f"cannot read config file {path}: {exc}") from None
    values: dict[str, str] = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise _UserError(f"{path}:{num}: expected 'key = value'")
        if key not in _CONFIG_KEYS:
            raise _UserError(
                f"{path}:{num}: unknown key {key!r} "
                f"(known: {', '.join(_CONFIG_KEYS)})")
        values[key] = value
    return values


def _check_choice(value: str, allowed: Sequence[str], what: str) -> str:
    if value not in allowed:
        raise _UserError(
            f"invalid {what} {value!r} (choose from {', '.join(allowed)})")
    return value


def _resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Defaults <- environment <- config file <- command-line flags."""
    merged: dict[str, object] = {
        "input_path": None,
        "input_format": "auto",
        "difficulty_orientation": "one-minus-mean",
        "diversity_variant": "nth-root",
        "pca_imputation": "complete-rows-only",
        "output_dir": "./aps-out",
        "worker_count": "auto",
    }
    env_dir = os.environ.get("APS_OUTPUT_DIR")
    if env_dir:
        merged["output_dir"] = env_dir
    given = vars(ns)
    if "config" in given:
        merged.update(_parse_config_file(given["config"]))
    for flag, key in (("input", "input_path"), ("format", "input_format"),
                      ("output_dir", "output_dir"),
                      ("difficulty_orientation", "difficulty_orientation"),
                      ("diversity_variant", "diversity_variant"),
                      ("pca_imputation", "pca_imputation"),
                      ("workers", "worker_count")):
        if flag in given:
            merged[key] = given[flag]
    _check_choice(merged["input_format"], _INPUT_FORMATS, "input format")
    _check_choice(merged["difficulty_orientation"], DIFFICULTY_ORIENTATIONS,
                  "difficulty orientation")
    _check_choice(merged["diversity_variant"], DIVERSITY_VARIANTS,
                  "diversity variant")
    _check_choice(merged["pca_imputation"], IMPUTATION_MODES,
                  "imputation mode")
    workers = merged["worker_count"]
    if workers == "auto":
        workers = 1
    else:
        try:
            workers = int(workers)
        except (TypeError, ValueError):
            raise _UserError(
                f"worker count must be a positive integer or 'auto', "
                f"got {workers!r}") from None
        if workers < 1:
            raise _UserError(f"worker count must be >= 1, got {workers}")
    return RunConfig(
        input_path=merged["input_path"],
        input_format=merged["input_format"],
        difficulty_orientation=merged["difficulty_orientation"],
        diversity_variant=merged["diversity_variant"],
        pca_imputation=merged["pca_imputation"],
        output_dir=str(merged["output_dir"]),
        worker_count=workers,
    )


def _print_config(cfg: RunConfig) -> None:
    for f in dataclass_fields(RunConfig):
        print(f"config: {f.name} = {getattr(cfg, f.name)}", file=sys.stderr)


def _load_matrix(cfg: RunConfig) -> PerformanceMatrix:
    if not cfg.input_path:
        raise _UserError("no input file; pass --input or set input_path "
                         "in the config file")
    try:
        text = Path(cfg.input_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _DataError(f"cannot read input {cfg.input_path}: {exc}") from None
    fmt = cfg.input_format
    if fmt == "auto":
        first = text.lstrip("﻿").split("\n", 1)[0].rstrip("\r")
        fmt = "long" if first.startswith("dataset,algorithm,score") else "wide"
    if fmt == "long":
        return ingest.parse_long(text)
    return ingest.parse_wide(text)


def _note(path: Path) -> None:
    print(f"wrote {path}", file=sys.stderr)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]],
              trailer: str | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if trailer is not None:
        buf.write(trailer + "\n")
    return buf.getvalue()


def _cmd_validate(matrix: PerformanceMatrix, cfg: RunConfig,
                  ns: argparse.Namespace) -> int:
    rep = ingest.validate(matrix)
    print(f"datasets: {rep.dataset_count}")
    print(f"algorithms: {rep.algorithm_count}")
    print(f"present cells: {rep.present_cells}")
    print(f"missing cells: {rep.missing_cells}")
    print(f"complete rows: {rep.complete_row_count}")
    for warning in rep.warnings:
        print(f"warning: {warning}")
    return 0


def _cmd_metrics(matrix: PerformanceMatrix, cfg: RunConfig,
                 ns: argparse.Namespace) -> int:
    report = metric_table(matrix, cfg.difficulty_orientation)
    rows = [[r.dataset, _fmt4(r.difficulty),
             "" if r.variance is None else _fmt4(r.variance),
             str(r.present_count)] for r in report.rows]
    path = Path(cfg.output_dir) / "metrics.csv"
    _write_atomic(path, _csv_text(
        ["dataset", "difficulty", "variance", "present_count"], rows))
    _note(path)
    return 0


def _parse_size_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)(?:\.\.(\d+))?", text)
    if not m:
        raise _UserError(f"bad --size {text!r}; expected N or A..B")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) else lo
    if lo < 2 or hi < lo:
        raise _UserError(f"bad --size {text!r}; need 2 <= A <= B")
    return lo, hi


def _cmd_select(matrix: PerformanceMatrix, cfg: RunConfig,
                ns: argparse.Namespace) -> int:
    lo, hi = _parse_size_range(ns.size)
    if ns.top < 1:
        raise _UserError(f"--top must be >= 1, got {ns.top}")
    rows = []
    for size in range(lo, hi + 1):
        if ns.strategy == "greedy":
            result = greedy_search(matrix, size, mode=ns.mode,
                                   variant=cfg.diversity_variant)
        else:
            result = exhaustive_search(matrix, size, mode=ns.mode,
                                       top_k=ns.top,
                                       variant=cfg.diversity_variant,
                                       workers=cfg.worker_count)
        for sel in result.top:
            rows.append([str(sel.rank), str(size), ";".join(sel.datasets),
                         _fmt4(sel.score)])
    path = Path(cfg.output_dir) / "selections.csv"
    _write_atomic(path, _csv_text(["rank", "size", "datasets", "score"], rows))
    _note(path)
    return 0


def _cmd_pca(matrix: PerformanceMatrix, cfg: RunConfig,
             ns: argparse.Namespace) -> int:
    projection = pca_project(matrix, k=ns.components,
                             imputation=cfg.pca_imputation)
    k = projection.coordinates.shape[1]
    rows = [[name, *(_fmt4(float(v)) for v in projection.coordinates[i])]
            for i, name in enumerate(projection.dataset_ids)]
    trailer = "# explained_variance_ratio," + ",".join(
        _fmt4(float(r)) for r in projection.explained_variance_ratio)
    path = Path(cfg.output_dir) / "pca.csv"
    _write_atomic(path, _csv_text(
        ["dataset", *(f"pc{i + 1}" for i in range(k))], rows, trailer))
    _note(path)
    return 0


def _safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", label)


def _metric_values(matrix: PerformanceMatrix, ids: Sequence[str],
                   which: str, orientation: str):
    report = metric_table(matrix, orientation)
    by_name = {r.dataset: r for r in report.rows}
    if which == "difficulty":
        return [by_name[d].difficulty for d in ids]
    return [by_name[d].variance for d in ids]


def _cmd_plot(matrix: PerformanceMatrix, cfg: RunConfig,
              ns: argparse.Namespace) -> int:
    out = Path(cfg.output_dir)
    if ns.kind == "mini":
        grid = mini_aps_grid(matrix, ordered=ns.ordered)
        for warning in grid.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        for label, svg in grid.plots:
            path = out / f"mini_{_safe_name(label)}.svg"
            _write_atomic(path, svg)
            _note(path)
        return 0
    projection = pca_project(matrix, k=2, imputation=cfg.pca_imputation)
    metric_values = None
    spec = PlotSpec()
    if ns.color_by:
        metric_values = _metric_values(matrix, projection.dataset_ids,
                                       ns.color_by,
                                       cfg.difficulty_orientation)
        spec = PlotSpec(color_by=ns.color_by)
    path = out / "pca_scatter.svg"
    _write_atomic(path, pca_scatter_svg(projection, metric_values, spec))
    _note(path)
    return 0


def _cmd_report(matrix: PerformanceMatrix, cfg: RunConfig,
                ns: argparse.Namespace) -> int:
    rep = ingest.validate(matrix)
    table = metric_table(matrix, cfg.difficulty_orientation)
    lines = [
        "# Performance space report",
        "",
        "## Input",
        "",
        f"- datasets: {rep.dataset_count}",
        f"- algorithms: {rep.algorithm_count} "
        f"({', '.join(matrix.algorithms)})",
        f"- present / missing cells: {rep.present_cells} / "
        f"{rep.missing_cells}",
        f"- complete rows: {rep.complete_row_count}",
        f"- warnings: {len(rep.warnings)}",
        "",
        "## Per-dataset metrics",
        "",
        f"Mean difficulty {_fmt4(table.mean_difficulty)}, "
        f"median {_fmt4(table.median_difficulty)} "
        f"(orientation: {table.orientation}).",
        "",
        "| dataset | difficulty | variance | present |",
        "| --- | --- | --- | --- |",
    ]
    for r in table.rows:
        var = "" if r.variance is None else _fmt4(r.variance)
        lines.append(f"| {r.dataset} | {_fmt4(r.difficulty)} | {var} | "
                     f"{r.present_count} |")
    lines += ["", "## Most diverse selections", ""]
    sizes = [s for s in (2, 3, 4) if s <= rep.complete_row_count]
    if sizes:
        lines += ["| size | datasets | score |", "| --- | --- | --- |"]
        for size in sizes:
            result = exhaustive_search(matrix, size, mode="max", top_k=1,
                                       variant=cfg.diversity_variant,
                                       workers=cfg.worker_count)
            best = result.best
            lines.append(f"| {size} | {'; '.join(best.datasets)} | "
                         f"{_fmt4(best.score)} |")
    else:
        lines.append("Too few complete rows for subset search.")
    lines += ["", "## Projection", ""]
    try:
        k = min(2, matrix.n_algorithms)
        projection = pca_project(matrix, k=k, imputation=cfg.pca_imputation)
        ratios = ", ".join(_fmt4(float(r))
                           for r in projection.explained_variance_ratio)
        lines.append(f"Explained variance ratios (k={k}, "
                     f"{cfg.pca_imputation}): {ratios}.")
    except ApsError as exc:
        lines.append(f"Projection unavailable: {exc}.")
    lines.append("")
    path = Path(cfg.output_dir) / "report.md"
    _write_atomic(path, "\n".join(lines))
    _note(path)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "metrics": _cmd_metrics,
    "select": _cmd_select,
    "pca": _cmd_pca,
    "plot": _cmd_plot,
    "report": _cmd_report,
}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse argv, run one subcommand, return the process exit code."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help/usage printing
        return 0 if (exc.code or 0) == 0 else 1
    try:
        cfg = _resolve_config(ns)
    except _UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _print_config(cfg)
    try:
        matrix = _load_matrix(cfg)
        return _COMMANDS[ns.command](matrix, cfg, ns)
    except _UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (_DataError, ApsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
