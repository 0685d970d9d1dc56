"""Command line entry point: ``memecology {scan,metrics,report,synth}``.

Exit codes:
    0  all requested outputs written
    1  unexpected internal error
    2  usage error or missing/unreadable input
    3  count cache incompatible with this version (re-scan required)
    4  invalid data (phrase file, background set, synth spec)
    5  output location not writable
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from . import dynamics, ecology, innovation, series
from .corpus import activity_from_counts, date_to_day, month_label, year_of
from .matcher import COUNT_MODES, build_matcher, count_vocabulary, scan_paths
from .phraseset import PhraseLoadError, PhraseSet, load_background, load_phrases, sample_background
from .stats import StatsError
from .synth import SpecError, SyntheticCorpus, load_spec
from .table import CacheVersionError, load_cache, save_cache, write_csv

log = logging.getLogger("memecology")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_CACHE, EXIT_DATA, EXIT_OUTPUT = 0, 1, 2, 3, 4, 5
CACHE_NAME = "counts.mec"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    inputs: list[str] = field(default_factory=list)
    phrases: str | None = None
    background: str | None = None
    background_sample: int = 5000
    min_count: int = 100
    seed: int = 0
    alphas: list[float] = field(default_factory=lambda: list(ecology.DEFAULT_ALPHAS))
    window: tuple[int, int] | None = None
    peak_window: int = 14
    gap_tolerance: int = 0
    count_mode: str = "all"
    mrr_mode: str = "restart"
    bins_per_decade: int = 10
    shards: int = 1
    out: str = "out"
    cache: str | None = None

    def validate(self) -> None:
        if not self.alphas:
            raise CliError("at least one --alpha is required", EXIT_USAGE)
        for a in self.alphas:
            if not 0.0 < a < 1.0:
                raise CliError(f"--alpha must lie in (0, 1), got {a}", EXIT_USAGE)
        if self.count_mode not in COUNT_MODES:
            raise CliError(f"--count-mode must be one of {COUNT_MODES}", EXIT_USAGE)
        if self.mrr_mode not in innovation.MRR_MODES:
            raise CliError(f"--mrr-mode must be one of {innovation.MRR_MODES}", EXIT_USAGE)
        if self.peak_window < 1:
            raise CliError("--peak-window must be >= 1", EXIT_USAGE)

    def analysis_hash(self) -> str:
        """Hash of the settings that shape the outputs (paths excluded)."""
        keys = ("background_sample", "min_count", "seed", "alphas", "window", "peak_window",
                "gap_tolerance", "count_mode", "mrr_mode", "bins_per_decade")
        d = asdict(self)
        blob = json.dumps({k: d[k] for k in keys}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# -- config parsing --------------------------------------------------------


def _parse_day(text: str) -> int:
    text = text.strip()
    if text.lstrip("-").isdigit():
        return int(text)
    return date_to_day(dt.date.fromisoformat(text))


def parse_window(text: str) -> tuple[int, int]:
    """``FIRST:LAST`` as day indices or ISO dates, inclusive."""
    try:
        a, b = text.split(":")
        first, last = _parse_day(a), _parse_day(b)
    except ValueError:
        raise CliError(f"--window must look like 2010-01-01:2019-12-31, got {text!r}", EXIT_USAGE) from None
    if last < first:
        raise CliError(f"--window {text!r} is empty", EXIT_USAGE)
    return first, last


def read_config_file(path: str) -> dict[str, str | list[str]]:
    """Plain ``key = value`` lines; repeated keys accumulate (for alpha/input)."""
    out: dict[str, Any] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc.strerror}", EXIT_USAGE) from None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value", EXIT_USAGE)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out.setdefault(key, []).append(value)
    return out


_LIST_KEYS = {"input": "inputs", "alpha": "alphas"}
_CONVERT = {
    "background_sample": int, "min_count": int, "seed": int, "peak_window": int,
    "gap_tolerance": int, "bins_per_decade": int, "shards": int,
}


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, values in file_values.items():
        name = _LIST_KEYS.get(key, key)
        if not hasattr(cfg, name):
            raise CliError(f"unknown config key {key!r}", EXIT_USAGE)
        if name == "alphas":
            setattr(cfg, name, [float(v) for v in values])
        elif name == "inputs":
            setattr(cfg, name, list(values))
        elif name == "window":
            cfg.window = parse_window(values[-1])
        else:
            setattr(cfg, name, _CONVERT.get(name, str)(values[-1]))
    # flags win over the file
    for name in ("phrases", "background", "background_sample", "min_count", "seed", "peak_window",
                 "gap_tolerance", "count_mode", "mrr_mode", "bins_per_decade", "shards", "out", "cache"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "input", None):
        cfg.inputs = list(args.input)
    if getattr(args, "alpha", None):
        cfg.alphas = list(args.alpha)
    if getattr(args, "window", None):
        cfg.window = parse_window(args.window)
    cfg.validate()
    return cfg


# -- output helpers --------------------------------------------------------


def fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


class TableWriter:
    def __init__(self, out: Path, cfg: RunConfig, extra_meta: dict | None = None):
        self.out = out
        self.meta = {"config_hash": cfg.analysis_hash(), "code_version": __version__}
        if extra_meta:
            self.meta.update(extra_meta)
        self.written: list[str] = []

    def write(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.out / f"{name}.csv"
        n = 0
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
                n += 1
        meta = dict(self.meta, table=name, columns=list(header), rows=n)
        (self.out / f"{name}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.written.append(name)
        return path


def _ensure_out(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise CliError(f"output directory {out} is not writable: {exc.strerror}", EXIT_OUTPUT) from None
    return out


# -- scan ------------------------------------------------------------------


def _load_phraseset(cfg: RunConfig) -> PhraseSet:
    if not cfg.phrases:
        raise CliError("--phrases is required", EXIT_USAGE)
    if not os.path.isfile(cfg.phrases):
        raise CliError(f"phrase file not found: {cfg.phrases}", EXIT_USAGE)
    try:
        return load_phrases(cfg.phrases)
    except PhraseLoadError as exc:
        raise CliError(f"{cfg.phrases}: {exc}", EXIT_DATA) from None


def cmd_scan(cfg: RunConfig, export_csv: bool = False) -> dict:
    """Scan the inputs once and write the versioned count cache plus a summary."""
    if not cfg.inputs:
        raise CliError("--input is required", EXIT_USAGE)
    for p in cfg.inputs:
        if not os.path.exists(p):
            raise CliError(f"input not found: {p}", EXIT_USAGE)
    phrases = _load_phraseset(cfg)
    out = _ensure_out(cfg.out)

    t0 = time.perf_counter()
    if cfg.background:
        if not os.path.isfile(cfg.background):
            raise CliError(f"background file not found: {cfg.background}", EXIT_USAGE)
        try:
            words = load_background(cfg.background)
        except PhraseLoadError as exc:
            raise CliError(f"{cfg.background}: {exc}", EXIT_DATA) from None
        phrases = phrases.with_background(words)
    else:
        vocab = count_vocabulary(cfg.inputs)
        try:
            words = sample_background(vocab, cfg.background_sample, cfg.min_count, cfg.seed)
        except ValueError as exc:
            raise CliError(f"background sampling failed: {exc}", EXIT_DATA) from None
        phrases = phrases.with_background(words, cfg.seed)

    matcher = build_matcher(phrases, cfg.count_mode)
    try:
        table = scan_paths(matcher, cfg.inputs, shards=cfg.shards)
    except OSError as exc:
        raise CliError(f"read error: {exc}", EXIT_USAGE) from None
    elapsed = time.perf_counter() - t0

    meta = {
        "phrases": phrases.labels(),
        "background": sorted(phrases.background),
        "count_mode": cfg.count_mode,
        "background_seed": phrases.rng_seed,
    }
    cache_path = Path(cfg.cache) if cfg.cache else out / CACHE_NAME
    save_cache(cache_path, table, meta)
    if export_csv:
        write_csv(table, out / "counts.csv", out / "background_counts.csv")

    summary = {
        "documents": table.n_documents,
        "skipped_records": table.skipped,
        "tokens": table.tokens,
        "phrases": len(phrases),
        "background_words": len(phrases.background),
        "shards": cfg.shards,
        "seconds": round(elapsed, 3),
        "documents_per_second": round(table.n_documents / elapsed, 1) if elapsed > 0 else None,
        "tokens_per_second": round(table.tokens / elapsed, 1) if elapsed > 0 else None,
        "cache": str(cache_path),
    }
    (out / "scan_summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    log.info("scanned %d documents (%d skipped) in %.1fs", table.n_documents, table.skipped, elapsed)
    return summary


# -- metrics ---------------------------------------------------------------


def cmd_metrics(cfg: RunConfig) -> dict:
    """Compute every report table from a count cache."""
    cache_path = Path(cfg.cache) if cfg.cache else Path(cfg.out) / CACHE_NAME
    if not cache_path.is_file():
        raise CliError(f"count cache not found: {cache_path}", EXIT_USAGE)
    try:
        table, meta = load_cache(cache_path)
    except CacheVersionError as exc:
        raise CliError(str(exc), EXIT_CACHE) from None
    out = _ensure_out(cfg.out)
    labels = meta.get("phrases", [])
    writer = TableWriter(out, cfg, {"cache_sha256": hashlib.sha256(cache_path.read_bytes()).hexdigest()})
    summary: dict[str, Any] = {"documents": table.n_documents, "phrases": table.n_phrases}

    writer.write(
        "corpus_stats",
        ["year_month", "posts", "comments", "total"],
        [(month_label(r.month), r.posts, r.comments, r.total) for r in activity_from_counts(table.documents)],
    )

    full = table.day_range()
    if full is None:
        for name, header in _EMPTY_TABLES.items():
            writer.write(name, header, [])
        summary["tables"] = writer.written
        return summary
    full_window = series.Window(*full)
    window = series.Window(*cfg.window) if cfg.window else full_window
    pids = list(range(table.n_phrases))

    # attention
    att_rows, trend_rows = [], []
    try:
        att = series.aggregate_attention(table, pids, window)
        att_rows = [(month_label(r.month), r.mean, r.ci95, r.n) for r in att.rows]
        trend_rows.append(("attention", None, None, att.pearson_r, att.p_value, len(att.rows)))
        summary["attention_pearson_r"] = att.pearson_r
    except (series.SeriesError, StatsError) as exc:
        log.warning("attention: %s", exc)
    writer.write("attention", ["year_month", "mean", "ci95", "n"], att_rows)

    # diversity
    div_rows = []
    try:
        div = ecology.diversity_trend(table, window)
        div_rows = [(month_label(r.month), r.mean_d, r.ci95, r.communities_with_d, r.total_communities) for r in div.rows]
        if div.fit is not None:
            f = div.fit
            trend_rows.append(("diversity", f.slope, f.intercept, f.pearson_r, f.p_value, f.n))
            summary["diversity_pearson_r"] = f.pearson_r
    except (ecology.EcologyError, StatsError) as exc:
        log.warning("diversity: %s", exc)
    writer.write("diversity", ["year_month", "mean_D", "ci95", "n_communities", "total_communities"], div_rows)

    # lifespans use the whole corpus; activity and trends use the analysis window
    spans: list[ecology.Lifespan] = []
    try:
        normalized = series.normalized_matrix(table, pids, full_window)
        spans = ecology.lifespans(normalized, cfg.alphas, cfg.gap_tolerance)
    except series.SeriesError as exc:
        log.warning("lifespans: %s", exc)
    writer.write(
        "lifespans",
        ["phrase_id", "alpha", "start_day", "peak_day", "end_day", "length"],
        [(s.phrase_id, s.alpha, s.start_day, s.peak_day, s.end_day, s.length_days) for s in spans],
    )

    active_rows = []
    for alpha in cfg.alphas:
        group = [s for s in spans if s.alpha == alpha]
        for r in ecology.active_series(group, table, window):
            active_rows.append((month_label(r.month), alpha, r.active, r.normalized_active))
    writer.write("active", ["year_month", "alpha", "active", "normalized_active"], active_rows)

    lt_rows, fit_rows = [], []
    for alpha in cfg.alphas:
        group = [s for s in spans if s.alpha == alpha]
        try:
            lt = ecology.lifespan_trend(group, window)[alpha]
        except (ecology.EcologyError, KeyError, StatsError) as exc:
            log.warning("lifespan trend alpha=%s: %s", alpha, exc)
            continue
        lt_rows.extend((alpha, month_label(r.month), r.mean_length, r.ci95, r.n) for r in lt.rows)
        fit_rows.append((alpha, lt.fit.slope, lt.fit.intercept, lt.fit.pearson_r, lt.fit.p_value))
    writer.write("lifespan_trend", ["alpha", "year_month", "mean_length", "ci95", "n"], lt_rows)
    writer.write("trends", ["alpha", "slope", "intercept", "pearson_r", "p"], fit_rows)
    summary["lifespan_trends"] = {a: r for a, _, _, r, _ in fit_rows}
    writer.write("metric_trends", ["metric", "slope", "intercept", "pearson_r", "p", "n"], trend_rows)

    # dynamics
    raw = series.all_daily_series(table, window)
    peaks = {}
    for pid, s in raw.items():
        try:
            peaks[pid] = dynamics.raw_peak(s)
        except dynamics.DynamicsError:
            continue
    curves = dynamics.peak_aligned(raw, peaks, cfg.peak_window)
    pa_rows = []
    for c in curves:
        for j, d in enumerate(c.deltas):
            pa_rows.append((c.year, int(d), float(c.mean[j]), float(c.ci95[j]), int(c.n[j])))
    writer.write("peak_aligned", ["year", "delta", "mean", "ci95", "n"], pa_rows)

    groups: dict[tuple[int, str], list[float]] = {}
    for pid in pids:
        for v in dynamics.velocities(raw[pid]):
            groups.setdefault((v.year, v.kind), []).append(v.magnitude)
    fit_out, hist_out = [], []
    for (year, kind) in sorted(groups):
        samples = groups[(year, kind)]
        try:
            fit = dynamics.fit_lognormal(samples)
            fit_out.append((year, kind, fit.mu, fit.sigma, fit.n))
        except dynamics.DynamicsError as exc:
            log.info("velocity fit %s/%s: %s", year, kind, exc)
        h = dynamics.velocity_histogram(samples, cfg.bins_per_decade)
        for j, center in enumerate(h.centers):
            fd = None if h.fit_density is None else float(h.fit_density[j])
            hist_out.append((year, kind, float(center), float(h.density[j]), fd))
    writer.write("velocity_fit", ["year", "kind", "mu", "sigma", "n"], fit_out)
    writer.write("velocity_hist", ["year", "kind", "bin_center", "density", "fit_density"], hist_out)

    # innovation
    entries = innovation.entry_events(table)
    writer.write(
        "entries",
        ["phrase_id", "rank", "community", "first_use_day"],
        [(pid, k, e.community, e.first_use_day) for pid in sorted(entries) for k, e in enumerate(entries[pid].entries, 1)],
    )
    years = [y for y in innovation.years_with_entries(entries) if year_of(window.first_day) <= y <= year_of(window.last_day)]
    rankings = {y: innovation.innovation_ranking(entries, y, cfg.mrr_mode) for y in years}
    writer.write(
        "rankings",
        ["year", "rank", "community", "mrr"],
        [(y, k, c, s) for y in years for k, (c, s) in enumerate(rankings[y].ordered, 1)],
    )
    shift_rows = []
    for y in years:
        if y + 1 not in rankings:
            continue
        try:
            tau, p, n = innovation.rank_shift(rankings[y], rankings[y + 1])
        except (innovation.InnovationError, StatsError) as exc:
            log.info("rank shift %d/%d: %s", y, y + 1, exc)
            continue
        shift_rows.append((f"{y}/{y + 1}", tau, p, n))
    writer.write("rank_shift", ["year_pair", "tau", "p", "n_common"], shift_rows)

    summary["labels"] = labels
    summary["top_communities"] = {y: rankings[y].top(10) for y in years}
    summary["rank_shift"] = shift_rows
    summary["tables"] = writer.written
    return summary


_EMPTY_TABLES = {
    "attention": ["year_month", "mean", "ci95", "n"],
    "diversity": ["year_month", "mean_D", "ci95", "n_communities", "total_communities"],
    "lifespans": ["phrase_id", "alpha", "start_day", "peak_day", "end_day", "length"],
    "active": ["year_month", "alpha", "active", "normalized_active"],
    "lifespan_trend": ["alpha", "year_month", "mean_length", "ci95", "n"],
    "trends": ["alpha", "slope", "intercept", "pearson_r", "p"],
    "metric_trends": ["metric", "slope", "intercept", "pearson_r", "p", "n"],
    "peak_aligned": ["year", "delta", "mean", "ci95", "n"],
    "velocity_fit": ["year", "kind", "mu", "sigma", "n"],
    "velocity_hist": ["year", "kind", "bin_center", "density", "fit_density"],
    "entries": ["phrase_id", "rank", "community", "first_use_day"],
    "rankings": ["year", "rank", "community", "mrr"],
    "rank_shift": ["year_pair", "tau", "p", "n_common"],
}


def render_summary(summary: dict) -> str:
    lines = [f"memecology {__version__} report", ""]
    lines.append(f"documents scanned: {summary.get('documents', 0)}")
    lines.append(f"phrases tracked:   {summary.get('phrases', 0)}")
    if "attention_pearson_r" in summary:
        lines.append(f"normalized attention vs time: Pearson r = {summary['attention_pearson_r']:+.3f}")
    if "diversity_pearson_r" in summary:
        lines.append(f"mean Simpson diversity vs time: Pearson r = {summary['diversity_pearson_r']:+.3f}")
    for alpha, r in sorted(summary.get("lifespan_trends", {}).items()):
        lines.append(f"mean lifespan vs time (alpha={alpha}): Pearson r = {r:+.3f}")
    tops = summary.get("top_communities", {})
    if tops:
        lines += ["", "most innovative communities (MRR):"]
        for year, top in tops.items():
            names = ", ".join(c for c, _ in top[:5])
            lines.append(f"  {year}: {names}")
    shifts = summary.get("rank_shift", [])
    if shifts:
        lines += ["", "year-over-year ranking similarity (Kendall tau-b):"]
        for pair, tau, p, n in shifts:
            lines.append(f"  {pair}: tau = {tau:+.3f} (p = {p:.3g}, n = {n})")
    lines += ["", "tables: " + ", ".join(summary.get("tables", []))]
    return "\n".join(lines) + "\n"


def cmd_report(cfg: RunConfig) -> dict:
    summary = cmd_metrics(cfg)
    (Path(cfg.out) / "summary.txt").write_text(render_summary(summary), encoding="utf-8")
    return summary


# -- synth -----------------------------------------------------------------


def cmd_synth(spec_path: str, out_dir: str) -> dict:
    """Write ``corpus.jsonl``, ``truth.csv``, ``phrases.txt`` and ``background.txt``."""
    if not os.path.isfile(spec_path):
        raise CliError(f"spec file not found: {spec_path}", EXIT_USAGE)
    try:
        corpus = SyntheticCorpus(load_spec(spec_path))
    except SpecError as exc:
        raise CliError(f"{spec_path}: {exc}", EXIT_DATA) from None
    out = _ensure_out(out_dir)
    with open(out / "corpus.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        n = corpus.write(fh)
    with open(out / "truth.csv", "w", encoding="utf-8", newline="") as fh:
        corpus.truth.write_csv(fh)
    (out / "phrases.txt").write_text("".join(p.phrase + "\n" for p in corpus.spec.plants), encoding="utf-8")
    (out / "background.txt").write_text("".join(w + "\n" for w in corpus.vocab), encoding="utf-8")
    return {"documents": n, "out": str(out)}


# -- argument parsing ------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags take precedence")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("-v", "--verbose", action="store_true")


def _analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cache", help=f"count cache (default: OUT/{CACHE_NAME})")
    p.add_argument("--window", help="analysis window FIRST:LAST (ISO dates or day indices)")
    p.add_argument("--alpha", type=float, action="append", help="lifespan threshold (repeatable)")
    p.add_argument("--peak-window", type=int, dest="peak_window", help="days either side of the peak (default 14)")
    p.add_argument("--gap-tolerance", type=int, dest="gap_tolerance", help="sub-threshold days allowed inside a lifespan")
    p.add_argument("--mrr-mode", choices=innovation.MRR_MODES, dest="mrr_mode")
    p.add_argument("--bins-per-decade", type=int, dest="bins_per_decade")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memecology", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="count phrases and background words in a corpus")
    _common(scan)
    scan.add_argument("--input", action="append", help="input file or directory (repeatable)")
    scan.add_argument("--phrases", help="phrase file, one phrase per line")
    scan.add_argument("--background", help="background word file (skips sampling)")
    scan.add_argument("--background-sample", type=int, dest="background_sample", help="words to sample (default 5000)")
    scan.add_argument("--min-count", type=int, dest="min_count", help="minimum corpus count for sampled words (default 100)")
    scan.add_argument("--seed", type=int, help="background sampling seed")
    scan.add_argument("--count-mode", choices=COUNT_MODES, dest="count_mode")
    scan.add_argument("--shards", type=int, help="worker processes (default 1)")
    _analysis_flags(scan)
    scan.add_argument("--export-csv", action="store_true", dest="export_csv", help="also write the count table as CSV")

    for name, helptext in (("metrics", "compute report tables from a count cache"),
                           ("report", "metrics plus a plain-text summary")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        _analysis_flags(p)

    synth = sub.add_parser("synth", help="generate a synthetic corpus from a JSON spec")
    synth.add_argument("--spec", required=True, help="JSON generator spec")
    synth.add_argument("--out", default="synth", help="output directory (default: synth)")
    synth.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "synth":
            result = cmd_synth(args.spec, args.out)
            print(f"wrote {result['documents']} documents to {result['out']}")
            return EXIT_OK
        cfg = build_config(args)
        if args.command == "scan":
            summary = cmd_scan(cfg, export_csv=args.export_csv)
            print(json.dumps(summary, indent=2))
        elif args.command == "metrics":
            summary = cmd_metrics(cfg)
            print(f"wrote {len(summary['tables'])} tables to {cfg.out}")
        else:
            summary = cmd_report(cfg)
            print(render_summary(summary), end="")
    except CliError as exc:
        print(f"memecology: error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"memecology: error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
