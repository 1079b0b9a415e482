"""Command line pipeline: ingest -> probe -> correct -> analyze -> report.

Each subcommand reads the files written by the previous one, so stages can
be rerun or swapped independently. Settings come from built-in defaults, an
optional YAML config (``--config``) and command-line flags, in that order of
precedence (flags win).

Exit codes: 0 success, 1 usage or input error, 2 data or contract error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import __version__
from .analysis import (
    SCENARIOS, default_range, degree_distribution, omitted_periods, rq1_counts,
    rq2_power_law, rq3_diversity, rq4_components, rq5_pair_survival, rq6_size_stats,
    survival_curve,
)
from .correction import (
    CorrectionError, NormalFit, apply_corrections, fit_normal_mle, read_corrected,
    write_corrected, z_test,
)
from .dataset import DatasetError, deathpool_window, parse_dataset, validate, write_json_lines
from .dates import iso, period_starts, to_day
from .liveness import (
    FixtureProber, FixtureStore, LiveProber, MissingFixture, ProbePolicy, ProbeResult,
    UNREACHABLE, classify_all, load_successor_table, read_verdicts, verdict_counts,
    write_verdicts,
)
from .networks import build_ma, snapshot_series, write_aa_edges, write_cc_edges

log = logging.getLogger("ecolife")

FIXTURE_ENV = "ECOLIFE_FIXTURE_STORE"
REPORT_SCHEMA = 1
RQS = ("rq1", "rq2", "rq3", "rq4", "rq5", "rq6")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

RQ5_NOTE = ("avg_days is the mean longevity of the mashups using the pair, "
            "alive mashups clipped at the reference date")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


# ------------------------------------------------------------------ config

@dataclass
class RunConfig:
    seed: int | None = None
    beta: str = "2020-09-10"
    trust_window: tuple[str, str] = ("2018-01-01", "2020-12-31")
    fit_scope: str = "pooled"
    reference: str | None = None
    cadence: dict = field(default_factory=lambda: {"rq1": "monthly", "networks": "yearly",
                                                   "rq6": "yearly"})
    scenario: str | None = None
    population: str = "new_only"
    range: tuple[str, str] | None = None
    n_boot: int = 1000
    workers: int = 1
    repeat: int = 1
    mode: str = "fixture"
    store: str | None = None
    successors: str | None = None
    probe: dict = field(default_factory=lambda: {"timeout": 10.0, "retries": 3,
                                                 "retry_gap": 1.0, "rate_limit": 1.0})

    def policy(self) -> ProbePolicy:
        return ProbePolicy(**self.probe)


_CONFIG_KEYS = {
    "seed", "beta", "trust_window", "fit_scope", "reference", "cadence", "scenario",
    "population", "range", "n_boot", "workers", "repeat", "mode", "store", "successors",
    "probe",
}


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise UsageError(f"config file is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a mapping")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    layers = [load_config(args.config)] if getattr(args, "config", None) else []
    flags = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS and v is not None}
    for layer in layers + [flags]:
        for key, value in layer.items():
            if key == "cadence":
                if isinstance(value, str):
                    value = {k: value for k in cfg.cadence}
                cfg.cadence = {**cfg.cadence, **value}
            elif key == "probe":
                cfg.probe = {**cfg.probe, **value}
            elif key in ("trust_window", "range"):
                setattr(cfg, key, tuple(str(v) for v in value))
            else:
                setattr(cfg, key, value)
    try:
        to_day(cfg.beta)
        for d in cfg.trust_window + (cfg.range or ()):
            to_day(d)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad date in configuration: {exc}") from exc
    if len(cfg.trust_window) != 2 or (cfg.range is not None and len(cfg.range) != 2):
        raise UsageError("trust_window and range take two dates")
    for key in ("rq1", "networks", "rq6"):
        if cfg.cadence.get(key) not in ("daily", "monthly", "yearly"):
            raise UsageError(f"bad cadence for {key}: {cfg.cadence.get(key)!r}")
    if cfg.scenario is not None and cfg.scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {cfg.scenario!r}")
    return cfg


# ---------------------------------------------------------------- writers

def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                    encoding="utf-8", newline="\n")


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else v for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --------------------------------------------------------------- commands

def cmd_ingest(args, cfg: RunConfig) -> int:
    try:
        ds = parse_dataset(args.input, args.format)
    except FileNotFoundError as exc:
        raise UsageError(f"input not found: {exc}") from exc
    out = _out_dir(args.out)
    report = validate(ds)
    write_json_lines(ds, out / "dataset.jsonl")
    (out / "validation.json").write_text(report.to_json() + "\n", encoding="utf-8", newline="\n")
    n_api, n_mashup = ds.counts
    print(f"ingested {n_api} APIs, {n_mashup} mashups; {len(ds.errors)} row errors; "
          f"flags: {json.dumps(report.counts, sort_keys=True)}", file=sys.stderr)
    return EXIT_OK


def _read_dataset(path):
    try:
        return parse_dataset(path, "json_lines")
    except FileNotFoundError as exc:
        raise UsageError(f"dataset not found: {exc}") from exc


def cmd_probe(args, cfg: RunConfig) -> int:
    ds = _read_dataset(args.dataset)
    if cfg.mode == "fixture":
        store_path = cfg.store or os.environ.get(FIXTURE_ENV)
        if not store_path:
            raise UsageError(f"fixture mode needs --store or ${FIXTURE_ENV}")
        if not Path(store_path).is_dir():
            raise UsageError(f"fixture store not found: {store_path}")
        prober = FixtureProber(FixtureStore(store_path))
    else:
        prober = LiveProber(cfg.policy())
    table = load_successor_table(cfg.successors) if cfg.successors else load_successor_table()
    try:
        verdicts = classify_all(ds, prober, table, repeat=cfg.repeat, workers=cfg.workers)
    except MissingFixture as exc:
        raise DataError(str(exc)) from exc
    write_verdicts(verdicts, args.out)
    counts = verdict_counts(verdicts)
    print("verdicts: " + ", ".join(f"{k}/{v}={n}" for (k, v), n in sorted(counts.items())),
          file=sys.stderr)
    if cfg.mode == "live":
        n_unreach = sum(1 for v in verdicts.values() for e in v.evidence
                        if isinstance(e, ProbeResult) and e.outcome == UNREACHABLE)
        if n_unreach:
            print(f"warning: {n_unreach} probes found the target unreachable", file=sys.stderr)
    return EXIT_OK


def _reference_sample(path) -> list[float]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise UsageError(f"reference sample not found: {path}") from exc
    if isinstance(data, dict):
        data = data.get("longevity_days", data.get("reference_sample_days"))
    if not isinstance(data, list):
        raise DataError("reference sample must be a list of day counts")
    return data


def _fit(ds, cfg: RunConfig):
    lo, hi = cfg.trust_window
    kinds = ("all",) if cfg.fit_scope == "pooled" else ("api", "mashup")
    fits = {}
    for kind in kinds:
        samples = deathpool_window(ds, lo, hi, kind=kind)
        if len(samples) < 2:
            raise DataError(f"trust window {lo}..{hi} holds {len(samples)} {kind} "
                            "deathpool longevities; at least 2 are needed")
        fits[kind] = fit_normal_mle(samples)
    return fits["all"] if cfg.fit_scope == "pooled" else fits


def cmd_correct(args, cfg: RunConfig) -> int:
    if cfg.seed is None:
        raise UsageError("correct samples death times and needs --seed")
    if cfg.fit_scope not in ("pooled", "by_kind"):
        raise UsageError(f"unknown fit scope {cfg.fit_scope!r}")
    ds = _read_dataset(args.dataset)
    try:
        verdicts = read_verdicts(args.verdicts)
    except FileNotFoundError as exc:
        raise UsageError(f"verdict file not found: {exc}") from exc
    fit = _fit(ds, cfg)
    try:
        cd = apply_corrections(ds, verdicts, fit, seed=cfg.seed, beta=cfg.beta,
                               trust_window=cfg.trust_window)
    except CorrectionError as exc:
        raise DataError(str(exc)) from exc
    out = _out_dir(args.out)
    write_corrected(cd, out / "corrected.jsonl")

    summary = {"seed": cfg.seed, "beta": iso(to_day(cfg.beta)),
               "trust_window": [iso(to_day(d)) for d in cfg.trust_window],
               "fit_scope": cfg.fit_scope}
    fits = {"all": fit} if isinstance(fit, NormalFit) else fit
    summary["fits"] = {k: {**f.to_dict(), "sigma_hat": f.sigma_hat} for k, f in fits.items()}
    if cfg.reference:
        ref = fit_normal_mle(_reference_sample(cfg.reference))
        summary["reference"] = {**ref.to_dict(), "sigma_hat": ref.sigma_hat}
        tests = {k: z_test(f, ref) for k, f in fits.items()}
        summary["z_test"] = {k: {"z": t.z, "band": t.band} for k, t in tests.items()}
    prov: dict[str, int] = {}
    for lc in cd.lifecycles.values():
        prov[lc.provenance] = prov.get(lc.provenance, 0) + 1
    flags: dict[str, int] = {}
    for fl in cd.flags.values():
        for f in fl:
            flags[f] = flags.get(f, 0) + 1
    summary["provenance_counts"] = prov
    summary["flag_counts"] = flags
    _dump_json(summary, out / "fit_summary.json")
    for k, f in fits.items():
        line = f"fit[{k}]: mu={f.mu_hat:.1f} sigma2={f.sigma2_hat:.1f} n={f.n}"
        if "z_test" in summary:
            zt = summary["z_test"][k]
            line += f" z={zt['z']:.3f} ({zt['band']})"
        print(line, file=sys.stderr)
    return EXIT_OK


def _parse_rqs(names) -> list[str]:
    names = list(names) or ["all"]
    out = []
    for n in names:
        n = n.lower()
        if n == "all":
            out.extend(RQS)
        elif n in RQS:
            out.append(n)
        else:
            raise UsageError(f"unknown analysis {n!r}; choose from {', '.join(RQS)} or all")
    return sorted(set(out))


def _fmt(x):
    return repr(float(x)) if isinstance(x, float) else x


def cmd_analyze(args, cfg: RunConfig) -> int:
    rqs = _parse_rqs(args.which)
    try:
        cd = read_corrected(args.corrected)
    except FileNotFoundError as exc:
        raise UsageError(f"corrected dataset not found: {exc}") from exc
    out = _out_dir(args.out)
    seed = cfg.seed if cfg.seed is not None else int(cd.meta.get("seed", 0))
    empty = len(cd.dataset) == 0
    rng = None if empty else (cfg.range or default_range(cd))
    report: dict = {
        "schema_version": REPORT_SCHEMA,
        "meta": dict(cd.meta),
        "config": {"seed": seed, "cadence": cfg.cadence, "n_boot": cfg.n_boot,
                   "population": cfg.population,
                   "range": None if rng is None else [iso(to_day(d)) for d in rng]},
        "assumptions": [],
    }

    series = []
    if not empty and {"rq2", "rq3", "rq4"} & set(rqs):
        net = build_ma(cd)
        series = snapshot_series(net, cfg.cadence["networks"], rng)
        if args.export_edges:
            with open(out / "aa_edges.tsv", "w", encoding="utf-8", newline="\n") as fh:
                write_aa_edges(series, fh)
            with open(out / "cc_edges.tsv", "w", encoding="utf-8", newline="\n") as fh:
                write_cc_edges(series, fh)

    if "rq1" in rqs:
        scenarios = [cfg.scenario] if cfg.scenario else list(SCENARIOS)
        rows, block = [], {}
        for sc in scenarios:
            res = rq1_counts(cd, cfg.cadence["rq1"], sc, rng) if not empty else {}
            block[sc] = {}
            for kind in ("api", "mashup"):
                ts = res.get(kind)
                pts = [] if ts is None else list(ts.points)
                block[sc][kind] = [[iso(t), int(v)] for t, v in pts]
                rows.extend((iso(t), sc, kind, int(v)) for t, v in pts)
        rows.sort()
        _write_csv(out / "rq1.csv", ("t", "scenario", "kind", "count"), rows)
        report["rq1"] = {"cadence": cfg.cadence["rq1"], "series": block}

    if "rq2" in rqs:
        fits = rq2_power_law(series, n_boot=cfg.n_boot, seed=seed, workers=cfg.workers)
        cols = ("t", "n_nodes", "alpha", "xmin", "ks", "p_value", "n_tail",
                "low_confidence", "error")
        rows = [(iso(r.t), r.n_nodes, _fmt(r.alpha) if r.alpha is not None else None, r.xmin,
                 _fmt(r.ks) if r.ks is not None else None,
                 _fmt(r.p_value) if r.p_value is not None else None, r.n_tail,
                 int(r.low_confidence), r.error) for r in fits]
        _write_csv(out / "rq2.csv", cols, rows)
        hist = [(iso(t), k, n) for t, aa, _ in series for k, n in degree_distribution(aa).items()]
        _write_csv(out / "rq2_degrees.csv", ("t", "degree", "count"), hist)
        report["rq2"] = [{"t": iso(r.t), "n_nodes": r.n_nodes, "alpha": r.alpha, "xmin": r.xmin,
                          "ks": r.ks, "p_value": r.p_value, "n_tail": r.n_tail,
                          "low_confidence": r.low_confidence, "error": r.error} for r in fits]

    if "rq3" in rqs:
        div, table = rq3_diversity(series)
        _write_csv(out / "rq3.csv", ("t", "category", "api_count", "rank"),
                   [(iso(t), c, n, r) for t, c, n, r in table])
        report["rq3"] = {"diversity": [[iso(t), int(v)] for t, v in div.points]}

    if "rq4" in rqs:
        stats = [(t, rq4_components(aa)) for t, aa, _ in series]
        _write_csv(out / "rq4.csv",
                   ("t", "component_count", "count_size_gt_4", "largest_component_size"),
                   [(iso(t), *s) for t, s in stats])
        report["rq4"] = [{"t": iso(t), "component_count": s.component_count,
                          "count_size_gt_4": s.count_size_gt_4,
                          "largest_component_size": s.largest_component_size}
                         for t, s in stats]

    if "rq5" in rqs:
        pairs = rq5_pair_survival(cd) if not empty else []
        _write_csv(out / "rq5.csv",
                   ("api_a", "api_b", "total_use", "active_use", "survival_rate", "avg_days"),
                   [(p.api_a, p.api_b, p.total_use, p.active_use, _fmt(p.survival_rate),
                     _fmt(p.avg_days)) for p in pairs])
        report["rq5"] = {
            "top_pairs": [{"api_a": p.api_a, "api_b": p.api_b, "total_use": p.total_use,
                           "active_use": p.active_use, "survival_rate": p.survival_rate,
                           "avg_days": p.avg_days} for p in pairs[:10]],
            "curve": [{"lo": lo, "hi": hi, "n_pairs": n, "mean_survival_rate": r}
                      for lo, hi, n, r in survival_curve(pairs)],
        }
        report["assumptions"].append(RQ5_NOTE)

    if "rq6" in rqs:
        rows6, block6 = [], {}
        for pop in ("new_only", "all_active"):
            stats = rq6_size_stats(cd, cfg.cadence["rq6"], pop, rng) if not empty else []
            rows6.extend((pop, iso(s.t), s.n, _fmt(s.min), _fmt(s.q1), _fmt(s.median),
                          _fmt(s.q3), _fmt(s.max), _fmt(s.mean)) for s in stats)
            periods = [] if empty else period_starts(rng[0], rng[1], cfg.cadence["rq6"])
            block6[pop] = {"rows": [{"t": iso(s.t), "n": s.n, "min": s.min, "q1": s.q1,
                                     "median": s.median, "q3": s.q3, "max": s.max,
                                     "mean": s.mean} for s in stats],
                           "omitted_periods": omitted_periods(stats, periods)}
        _write_csv(out / "rq6.csv",
                   ("population", "t", "n", "min", "q1", "median", "q3", "max", "mean"), rows6)
        report["rq6"] = block6

    _dump_json(report, out / "report.json")
    print(f"wrote {', '.join(rqs)} to {out}", file=sys.stderr)
    return EXIT_OK


def render_report(report: dict, fit_summary: dict | None = None) -> str:
    """Plain-text digest of an analysis report."""
    lines = ["# Ecosystem lifecycle report", ""]
    meta = report.get("meta", {})
    lines.append(f"seed {meta.get('seed')}, beta {meta.get('beta')}, "
                 f"trust window {meta.get('trust_window')}")
    if fit_summary:
        for k, f in sorted(fit_summary.get("fits", {}).items()):
            lines.append(f"fit[{k}]: mu={f['mu_hat']:.1f} days, sigma={f['sigma_hat']:.1f}, "
                         f"n={f['n']}")
        for k, zt in sorted(fit_summary.get("z_test", {}).items()):
            lines.append(f"z-test[{k}] vs reference: z={zt['z']:.3f} ({zt['band']})")
    if "rq1" in report:
        lines += ["", "## Active entities (last point per scenario)"]
        for sc, block in report["rq1"]["series"].items():
            for kind, pts in block.items():
                if pts:
                    peak = max(pts, key=lambda p: p[1])
                    lines.append(f"{sc:10s} {kind:7s} last {pts[-1][1]:6d} at {pts[-1][0]}; "
                                 f"peak {peak[1]} at {peak[0]}")
    if "rq2" in report:
        lines += ["", "## Degree distribution fits"]
        for r in report["rq2"]:
            if r["error"]:
                lines.append(f"{r['t']}  {r['n_nodes']:5d} nodes  {r['error']}")
            else:
                lc = " (low confidence)" if r["low_confidence"] else ""
                lines.append(f"{r['t']}  {r['n_nodes']:5d} nodes  alpha={r['alpha']:.2f} "
                             f"xmin={r['xmin']} p={r['p_value']:.3f}{lc}")
    if "rq3" in report:
        lines += ["", "## Category diversity"]
        lines += [f"{t}  {v}" for t, v in report["rq3"]["diversity"]]
    if "rq4" in report:
        lines += ["", "## Components"]
        lines += [f"{r['t']}  {r['component_count']} components, {r['count_size_gt_4']} larger "
                  f"than 4, largest {r['largest_component_size']}" for r in report["rq4"]]
    if "rq5" in report:
        lines += ["", "## Pair survival (top pairs)"]
        lines += [f"{p['api_a']} + {p['api_b']}: {p['active_use']}/{p['total_use']} "
                  f"= {p['survival_rate']:.2f}" for p in report["rq5"]["top_pairs"]]
    if "rq6" in report:
        lines += ["", "## Composition size (new mashups)"]
        lines += [f"{r['t']}  n={r['n']} median={r['median']:g} mean={r['mean']:.2f} "
                  f"max={r['max']:g}" for r in report["rq6"]["new_only"]["rows"]]
    if report.get("assumptions"):
        lines += ["", "## Assumptions"] + [f"- {a}" for a in report["assumptions"]]
    return "\n".join(lines) + "\n"


def cmd_report(args, cfg: RunConfig) -> int:
    d = Path(args.analysis_dir)
    try:
        report = json.loads((d / "report.json").read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise UsageError(f"no report.json in {d}") from exc
    fit_summary = None
    if args.fit_summary:
        try:
            fit_summary = json.loads(Path(args.fit_summary).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise UsageError(f"fit summary not found: {args.fit_summary}") from exc
    text = render_report(report, fit_summary)
    (d / "report.md").write_text(text, encoding="utf-8", newline="\n")
    sys.stdout.write(text)
    return EXIT_OK


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML run configuration; flags override it")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="ecolife", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ecolife {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", parents=[common], help="parse and validate a raw dataset")
    s.add_argument("input")
    s.add_argument("--format", choices=("json_lines", "csv_pair"), default="json_lines")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("probe", parents=[common], help="classify every entity's liveness")
    s.add_argument("dataset")
    s.add_argument("--out", required=True, help="verdict JSON-lines file")
    s.add_argument("--mode", choices=("fixture", "live"))
    s.add_argument("--store", help=f"fixture store directory (or ${FIXTURE_ENV})")
    s.add_argument("--repeat", type=int)
    s.add_argument("--successors", help="successor table JSON")
    s.set_defaults(func=cmd_probe)

    s = sub.add_parser("correct", parents=[common], help="estimate lifecycles")
    s.add_argument("dataset")
    s.add_argument("verdicts")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--beta")
    s.add_argument("--trust-window", nargs=2, metavar=("START", "END"), dest="trust_window")
    s.add_argument("--fit-scope", choices=("pooled", "by_kind"), dest="fit_scope")
    s.add_argument("--reference", help="reference longevity sample (JSON)")
    s.set_defaults(func=cmd_correct)

    s = sub.add_parser("analyze", parents=[common], help="compute rq1..rq6")
    s.add_argument("corrected")
    s.add_argument("which", nargs="*", help="rq1..rq6 or all (default)")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--cadence", choices=("daily", "monthly", "yearly"))
    s.add_argument("--scenario", choices=SCENARIOS)
    s.add_argument("--population", choices=("new_only", "all_active"))
    s.add_argument("--range", nargs=2, metavar=("START", "END"))
    s.add_argument("--n-boot", type=int, dest="n_boot")
    s.add_argument("--export-edges", action="store_true",
                   help="also write aa_edges.tsv and cc_edges.tsv")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("report", parents=[common], help="render a text summary")
    s.add_argument("analysis_dir")
    s.add_argument("--fit-summary", dest="fit_summary")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, --version and argument errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"ecolife: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DatasetError) as exc:
        print(f"ecolife: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
