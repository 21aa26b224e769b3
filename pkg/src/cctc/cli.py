"""Command-line interface: ingest, test, profile, simulate and benchmark.

Every option may also come from a ``key = value`` file passed with
``--config``; keys are the long flag names without the leading dashes.
Explicit flags win over the file. Exit codes: 0 success, 1 usage error,
2 data error, 3 numerical or method error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapConfig, mbb_test
from .ctc import compound_ctc
from .delay import cross_extremogram, pccf, select_delay
from .errors import CctcError, DomainError, IngestionError, NoDelayFoundError, UsageError
from .impact import ImpactParams
from .series import Series, format_real
from .simulate.benchmark import BenchmarkSettings, Method, rows_to_csv, rows_to_text, run_benchmark
from .simulate.models import MODEL_IDS, ModelSpec, NoiseFamily, generate
from .weights import DeConfig, optimize_weights

log = logging.getLogger("cctc")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
TIME_NAMES = frozenset({"t", "time", "timestamp", "date", "datetime", "epoch"})


# ----------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_list(s: str) -> list:
    return [part.strip() for part in str(s).split(",") if part.strip()]


def _int(name):
    def conv(s):
        try:
            return int(s)
        except ValueError:
            raise UsageError(f"--{name}: expected an integer, got {s!r}") from None
    return conv


def _float(name):
    def conv(s):
        try:
            v = float(s)
        except ValueError:
            raise UsageError(f"--{name}: expected a number, got {s!r}") from None
        if not math.isfinite(v):
            raise UsageError(f"--{name}: must be finite")
        return v
    return conv


def _auto_int(name):
    conv = _int(name)
    return lambda s: "auto" if str(s).strip().lower() == "auto" else conv(s)


def parse_p_range(s: str) -> list:
    """``"1:10"`` (inclusive) or a comma list such as ``"1,3,5"``."""
    s = str(s).strip()
    try:
        if ":" in s:
            lo, hi = (int(v) for v in s.split(":"))
            lags = list(range(lo, hi + 1))
        else:
            lags = [int(v) for v in _csv_list(s)]
    except ValueError:
        raise UsageError(f"--p-range: expected 'lo:hi' or a comma list, got {s!r}") from None
    if not lags:
        raise UsageError("--p-range is empty")
    if min(lags) < 1:
        raise UsageError("--p-range entries must be >= 1")
    return sorted(set(lags))


def parse_weights(s: str):
    s = str(s).strip().lower()
    if s in ("uniform", "optimize"):
        return s
    try:
        return [float(v) for v in _csv_list(s)]
    except ValueError:
        raise UsageError(f"--weights: expected 'uniform', 'optimize' or a comma list, got {s!r}") from None


# dest -> (converter, default)
OPTIONS = {
    "input": (_csv_list, None),
    "columns": (_csv_list, None),
    "flip": (_csv_list, []),
    "time_column": (str, "auto"),
    "confounder": (str, None),
    "p": (_int("p"), 3),
    "p_range": (parse_p_range, "1:10"),
    "k": (_auto_int("k"), "auto"),
    "alpha": (_float("alpha"), 1e4),
    "weights": (parse_weights, "uniform"),
    "threshold_cbar": (lambda s: [_float("threshold-cbar")(v) for v in _csv_list(s)], "0.05,0.1,0.15"),
    "q": (_float("q"), 0.95),
    "blocks": (_auto_int("blocks"), "auto"),
    "b": (_int("b"), 100),
    "shift": (_auto_int("shift"), "auto"),
    "seed": (_int("seed"), 0),
    "level": (_float("level"), 0.05),
    "variant": (str, "compound"),
    "out": (str, None),
    "model": (str, "M2"),
    "noise": (str, "pareto"),
    "n": (_int("n"), 1000),
    "burn_in": (_int("burn-in"), 500),
    "models": (_csv_list, ",".join(f"M{i}" for i in range(1, 10))),
    "methods": (_csv_list, "compound"),
    "reps": (_int("reps"), 100),
    "jobs": (_int("jobs"), 1),
}

COMMAND_OPTIONS = {
    "ingest": ("input", "columns", "flip", "time_column", "out"),
    "test": ("input", "columns", "flip", "time_column", "confounder", "p", "k", "alpha", "weights",
             "blocks", "b", "shift", "seed", "level", "variant", "out"),
    "profile": ("input", "columns", "flip", "time_column", "p_range", "k", "alpha", "weights",
                "threshold_cbar", "q", "blocks", "b", "shift", "seed", "level", "out"),
    "simulate": ("model", "noise", "n", "burn_in", "seed", "out"),
    "benchmark": ("models", "noise", "methods", "reps", "n", "p", "k", "alpha", "blocks", "b",
                  "shift", "seed", "level", "jobs", "out"),
}

HELP = {
    "input": "input CSV path(s), comma separated",
    "columns": "data columns to use (default: all)",
    "flip": "columns whose sign is reversed on ingestion",
    "time_column": "timestamp column name, 'auto' or 'none'",
    "confounder": "confounder column for the conditional variant",
    "p": "extremal delay",
    "p_range": "lags to profile, 'lo:hi' or a comma list",
    "k": "number of extremes or 'auto' (floor(sqrt(n)))",
    "alpha": "impact-function shape",
    "weights": "comma list, 'uniform' or 'optimize'",
    "threshold_cbar": "PCCF thresholds for delay selection, comma list",
    "q": "cross-extremogram quantile",
    "blocks": "bootstrap block length or 'auto' (ceil(n^(1/3)))",
    "b": "bootstrap replicates (0 skips the test in profile)",
    "shift": "time shift of the effect series or 'auto' (= p)",
    "seed": "base random seed",
    "level": "significance level",
    "variant": "compound, max, conditional or multivariate",
    "out": "output directory (simulate: output file, '-' for stdout)",
    "model": f"model id ({', '.join(MODEL_IDS)})",
    "noise": "noise family: t, pareto or poisson (benchmark: comma list)",
    "n": "kept path length",
    "burn_in": "discarded warm-up steps",
    "models": "model ids, comma list",
    "methods": f"methods, comma list ({', '.join(m.value for m in Method)})",
    "reps": "replications per model and noise",
    "jobs": "worker processes",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cctc", description="Compound causal tail coefficients for extremes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, dests in COMMAND_OPTIONS.items():
        sp = sub.add_parser(name, help=f"{name} command")
        sp.add_argument("--config", help="key = value file; flags override it")
        sp.add_argument("-v", "--verbose", action="store_true")
        for dest in dests:
            default = OPTIONS[dest][1]
            extra = f" (default: {default})" if default not in (None, []) else ""
            # None marks "not given" so the config file can fill it in
            sp.add_argument("--" + dest.replace("_", "-"), dest=dest, default=None, help=HELP[dest] + extra)
    return parser


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def echo(self) -> dict:
        # the output location is not part of the analysis
        return {k: v for k, v in sorted(self.values.items()) if k != "out"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    dests = COMMAND_OPTIONS[args.command]
    from_file = read_config_file(args.config) if args.config else {}
    unknown = sorted(set(from_file) - set(dests))
    if unknown:
        raise UsageError(f"unknown config key(s) for '{args.command}': {', '.join(unknown)}")
    values = {}
    for dest in dests:
        conv, default = OPTIONS[dest]
        raw = getattr(args, dest)
        if raw is None:
            raw = from_file.get(dest, default)
        values[dest] = conv(raw) if isinstance(raw, str) else raw
    cfg = RunConfig(args.command, values)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    v = cfg.values
    if cfg.command in ("ingest", "test", "profile") and not v.get("input"):
        raise UsageError("--input is required")
    if cfg.command in ("ingest", "test", "profile", "benchmark") and not v.get("out"):
        raise UsageError("--out is required")
    if "p" in v and v["p"] < 1:
        raise UsageError("--p must be >= 1")
    if "alpha" in v and not v["alpha"] > 0:
        raise UsageError("--alpha must be positive")
    if "level" in v and not 0 < v["level"] < 1:
        raise UsageError("--level must lie in (0, 1)")
    if "b" in v and v["b"] < (0 if cfg.command == "profile" else 1):
        raise UsageError("--b is too small")
    if "q" in v and not 0 < v["q"] < 1:
        raise UsageError("--q must lie in (0, 1)")
    if "variant" in v and v["variant"] not in ("compound", "max", "conditional", "multivariate"):
        raise UsageError(f"--variant must be compound, max, conditional or multivariate, got {v['variant']!r}")
    if v.get("variant") == "conditional" and not v.get("confounder"):
        raise UsageError("the conditional variant needs --confounder")
    if cfg.command == "profile" and isinstance(v["weights"], list):
        raise UsageError("profile accepts only 'uniform' or 'optimize' weights")
    if isinstance(v.get("weights"), list):
        w = np.asarray(v["weights"])
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise UsageError("--weights must be non-negative and sum to 1")
    if "noise" in v and cfg.command == "simulate":
        _noise(v["noise"])
    if "model" in v and v["model"] not in MODEL_IDS:
        raise UsageError(f"unknown model id {v['model']!r}; valid ids: {', '.join(MODEL_IDS)}")


def _noise(name):
    try:
        return NoiseFamily(name)
    except ValueError:
        raise UsageError(f"unknown noise family {name!r}; valid: t, pareto, poisson") from None


# --------------------------------------------------------------- ingestion

@dataclass(frozen=True)
class Ingested:
    series: tuple
    time: tuple | None
    time_name: str | None
    rejected: tuple  # (file, line, reason)
    rows_read: int

    def names(self):
        return [s.name for s in self.series]


def _read_table(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [(i, r) for i, r in enumerate(csv.reader(fh), 1) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from None
    except (UnicodeDecodeError, csv.Error) as exc:
        raise IngestionError(f"{path}: not a readable UTF-8 CSV file ({exc})") from None
    if not rows:
        raise IngestionError(f"{path}: empty file, a header row is required")
    header = [h.strip() for h in rows[0][1]]
    if len(set(header)) != len(header):
        raise IngestionError(f"{path}: duplicate column names in header")
    body = rows[1:]
    for lineno, r in body:
        if len(r) != len(header):
            raise IngestionError(f"{path}:{lineno}: ragged row with {len(r)} fields, header has {len(header)}")
    return header, body


def _number(text: str):
    try:
        v = float(text)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def ingest(paths, columns=None, flip=(), time_column="auto") -> Ingested:
    """Parse one or more header-bearing CSV files into aligned Series.

    Several files are joined row by row. Rows with a missing, non-numeric or
    non-finite value in any selected column are dropped and reported with
    their line number. Only selected columns are parsed.
    """
    paths = [paths] if isinstance(paths, (str, Path)) else list(paths)
    tables = [(str(p), *_read_table(p)) for p in paths]
    nrows = {len(body) for _, _, body in tables}
    if len(nrows) != 1:
        raise IngestionError("input files have different numbers of data rows")
    where = {}
    time_name = None
    for fi, (path, header, _) in enumerate(tables):
        for ci, name in enumerate(header):
            if fi == 0 and ci == 0 and time_column == "auto" and name.lower() in TIME_NAMES:
                time_name = name
            if name in where and name != time_name:
                raise IngestionError(f"column {name!r} appears in more than one input file")
            where.setdefault(name, (fi, ci))
    if time_column not in ("auto", "none"):
        if time_column not in where:
            raise IngestionError(f"unknown time column {time_column!r}; available: {', '.join(where)}")
        time_name = time_column
    data_cols = [c for c in where if c != time_name]
    if columns:
        missing = [c for c in columns if c not in where]
        if missing:
            raise IngestionError(f"unknown column(s) {', '.join(missing)}; available: {', '.join(data_cols)}")
        data_cols = list(columns)
    flip = list(flip or ())
    bad_flip = [c for c in flip if c not in data_cols]
    if bad_flip:
        raise IngestionError(f"cannot flip unknown or unselected column(s): {', '.join(bad_flip)}")
    if not data_cols:
        raise IngestionError("no data columns selected")

    n = nrows.pop()
    values = {c: [] for c in data_cols}
    times = []
    rejected = []
    for r in range(n):
        row = []
        reason = None
        for c in data_cols:
            fi, ci = where[c]
            path, _, body = tables[fi]
            text = body[r][1][ci].strip()
            v = _number(text)
            if v is None:
                reason = (path, body[r][0], f"column {c!r}: {'missing' if text in ('', 'NA', 'NaN', 'nan') else 'non-numeric'} value {text!r}")
                break
            row.append(v)
        if reason:
            rejected.append(reason)
            continue
        for c, v in zip(data_cols, row):
            values[c].append(-v if c in flip else v)
        if time_name is not None:
            fi, ci = where[time_name]
            times.append(tables[fi][2][r][1][ci].strip())
    if not values[data_cols[0]]:
        raise IngestionError(f"no usable rows ({len(rejected)} rejected)")
    series = tuple(Series(np.asarray(values[c]), c) for c in data_cols)
    return Ingested(series, tuple(times) if time_name else None, time_name, tuple(rejected), n)


def write_series_csv(fh, series, time=None, time_name="t"):
    """Write Series as CSV in the ingestion format, reals at 17 significant digits."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(([time_name] if time is not None else []) + [s.name for s in series])
    for i in range(len(series[0])):
        w.writerow(([time[i]] if time is not None else []) + [format_real(s.values[i]) for s in series])


# ---------------------------------------------------------------- helpers

def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.out)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IngestionError(f"cannot create output directory {d}: {exc}") from None
    return d


def _write(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot write {path}: {exc}") from None


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _real_or_blank(v):
    return "" if v is None or (isinstance(v, float) and not math.isfinite(v)) else format_real(v)


def _json_real(v):
    return None if v is None or not math.isfinite(v) else float(v)


def _pair_seed(seed: int, *key) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=tuple(key)).generate_state(1)[0])


def _load(cfg: RunConfig) -> Ingested:
    data = ingest(cfg.input, cfg.columns, cfg.flip, cfg.time_column)
    for path, line, reason in data.rejected:
        log.warning("%s:%d rejected: %s", path, line, reason)
    if data.rejected:
        log.warning("%d row(s) rejected", len(data.rejected))
    return data


def _bootstrap_cfg(cfg: RunConfig, seed: int) -> BootstrapConfig:
    return BootstrapConfig(
        cfg.b,
        None if cfg.blocks == "auto" else cfg.blocks,
        None if cfg.shift == "auto" else cfg.shift,
        seed,
        cfg.level,
    )


def _impact_params(cfg: RunConfig, x, effects, p, k, seed):
    """Weights for one cause/effects pair: uniform, explicit or optimized."""
    dim = p * len(effects)
    if cfg.weights == "uniform":
        return ImpactParams.uniform(dim, cfg.alpha)
    if cfg.weights == "optimize":
        y = effects if len(effects) > 1 else effects[0]
        res = optimize_weights(x, y, p, k, cfg.alpha, DeConfig(seed=seed))
        return ImpactParams(cfg.alpha, res.weights)
    if len(cfg.weights) != dim:
        raise UsageError(f"--weights has {len(cfg.weights)} entries, expected {dim}")
    return ImpactParams(cfg.alpha, cfg.weights)


def _failure(pair, exc):
    return {"pair": pair, "error": type(exc).__name__, "message": str(exc)}


def _failure_code(failures) -> int:
    if not failures:
        return EXIT_OK
    kinds = {f["error"] for f in failures}
    if kinds & {"UsageError"}:
        return EXIT_USAGE
    if kinds & {"IngestionError", "DomainError"}:
        return EXIT_DATA
    return EXIT_NUMERIC


# ---------------------------------------------------------------- commands

def cmd_ingest(cfg: RunConfig) -> int:
    data = _load(cfg)
    out = _out_dir(cfg)
    buf = io.StringIO()
    write_series_csv(buf, data.series, data.time, data.time_name)
    _write(out / "ingested.csv", buf.getvalue())
    report = {
        "rows_read": data.rows_read,
        "rows_kept": len(data.series[0]),
        "rejected": [{"file": f, "line": ln, "reason": r} for f, ln, r in data.rejected],
        "columns": data.names(),
        "flipped": list(cfg.flip),
    }
    _write(out / "ingest_report.json", _dump_json(report))
    print(f"ingested {report['rows_kept']} of {data.rows_read} rows; {len(data.rejected)} rejected", file=sys.stderr)
    return EXIT_OK


def _test_jobs(cfg: RunConfig, series):
    """``(label, cause, effects, key)`` for every ordered test of the run."""
    by_name = {s.name: s for s in series}
    conf = cfg.confounder
    if conf and conf not in by_name:
        raise IngestionError(f"confounder column {conf!r} was not ingested")
    pool = [s for s in series if s.name != conf]
    if len(pool) < 2:
        raise UsageError("at least two series are required")
    jobs = []
    for i, cause in enumerate(pool):
        if cfg.variant == "multivariate":
            effects = [s for s in pool if s is not cause]
            jobs.append((f"{cause.name}->({','.join(s.name for s in effects)})", cause, effects, (i,)))
            continue
        for j, effect in enumerate(pool):
            if i != j:
                jobs.append((f"{cause.name}->{effect.name}", cause, [effect], (i, j)))
    return jobs, (by_name[conf] if conf else None)


def cmd_test(cfg: RunConfig) -> int:
    data = _load(cfg)
    jobs, z = _test_jobs(cfg, data.series)
    out = _out_dir(cfg)
    p = cfg.p
    results, failures = [], []
    for label, cause, effects, key in jobs:
        seed = _pair_seed(cfg.seed, *key)
        try:
            k = cfg.k
            params = None if cfg.variant == "max" else _impact_params(cfg, cause, effects, p, k, seed)
            eff = effects if len(effects) > 1 else effects[0]
            res = mbb_test(cause, eff, p, k, params, _bootstrap_cfg(cfg, seed), cfg.variant, z)
        except CctcError as exc:
            log.error("pair %s failed: %s", label, exc)
            failures.append(_failure(label, exc))
            continue
        results.append({
            "pair": label,
            "cause": cause.name,
            "effects": [s.name for s in effects],
            "variant": cfg.variant,
            "p": p,
            "k": res.observed.k,
            "effective_k": res.observed.effective_k,
            "coefficient": res.observed.value,
            "p_value": res.p_value,
            "decision": "reject" if res.reject else "accept",
            "weights": None if params is None else params.weights.tolist(),
            "block_len": res.config.block_len,
            "shift": res.config.shift,
            "seed": seed,
            "redraws": res.redraws,
        })
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pair", "p", "k", "coefficient", "p_value", "reject"])
    for r in results:
        w.writerow([r["pair"], r["p"], r["k"], format_real(r["coefficient"]), format_real(r["p_value"]),
                    int(r["decision"] == "reject")])
    _write(out / "results.csv", buf.getvalue())
    _write(out / "results.json", _dump_json({"config": cfg.echo(), "results": results, "failures": failures}))
    if failures:
        _write(out / "failures.json", _dump_json(failures))
    for r in results:
        print(f"{r['pair']}: coefficient {r['coefficient']:.4f}, p-value {r['p_value']:.3f}, {r['decision']}")
    return _failure_code(failures)


def cmd_profile(cfg: RunConfig) -> int:
    data = _load(cfg)
    series = data.series
    if len(series) < 2:
        raise UsageError("at least two series are required")
    lags = cfg.p_range
    max_lag = max(lags)
    n = len(series[0])
    if max_lag >= n:
        raise UsageError(f"largest lag {max_lag} must be below the series length {n}")
    out = _out_dir(cfg)
    rows, selections, failures = [], [], []
    for i, cause in enumerate(series):
        for j, effect in enumerate(series):
            if i == j:
                continue
            label = f"{cause.name}->{effect.name}"
            try:
                phi = pccf(cause, effect, max_lag).values
                ext = cross_extremogram(cause, effect, max_lag, cfg.q).values
            except CctcError as exc:
                failures.append(_failure(label, exc))
                continue
            for p in lags:
                seed = _pair_seed(cfg.seed, i, j, p)
                try:
                    params = _impact_params(cfg, cause, [effect], p, cfg.k, seed)
                    if cfg.b > 0:
                        res = mbb_test(cause, effect, p, cfg.k, params, _bootstrap_cfg(cfg, seed))
                        coef, pval = res.observed.value, res.p_value
                    else:
                        coef, pval = compound_ctc(cause, effect, p, cfg.k, params).value, None
                except CctcError as exc:
                    failures.append(_failure(f"{label} p={p}", exc))
                    continue
                rows.append((label, p, coef, pval, float(phi[p - 1]), float(ext[p - 1])))
            if not np.any(np.isfinite(phi)):
                log.warning("pair %s: PCCF undefined at every lag, no delay selected", label)
            for cbar in cfg.threshold_cbar:
                try:
                    sel = select_delay(phi, cbar) if np.any(np.isfinite(phi)) else None
                except NoDelayFoundError:
                    sel = None
                selections.append((label, cbar, sel))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pair", "p", "coefficient", "p_value", "pccf", "extremogram"])
    for label, p, coef, pval, phi_v, ext_v in rows:
        w.writerow([label, p, format_real(coef), _real_or_blank(pval), _real_or_blank(phi_v), _real_or_blank(ext_v)])
    _write(out / "profile.csv", buf.getvalue())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pair", "threshold_cbar", "selected_p"])
    for label, cbar, sel in selections:
        w.writerow([label, format_real(cbar), "" if sel is None else sel])
    _write(out / "delay_selection.csv", buf.getvalue())
    summary = {
        "config": cfg.echo(),
        "profile": [{"pair": r[0], "p": r[1], "coefficient": r[2], "p_value": _json_real(r[3]),
                     "pccf": _json_real(r[4]), "extremogram": _json_real(r[5])} for r in rows],
        "selection": [{"pair": s[0], "threshold_cbar": s[1], "selected_p": s[2]} for s in selections],
        "failures": failures,
    }
    _write(out / "profile.json", _dump_json(summary))
    if failures:
        _write(out / "failures.json", _dump_json(failures))
    return _failure_code(failures)


def cmd_simulate(cfg: RunConfig) -> int:
    spec = ModelSpec.of(cfg.model, _noise(cfg.noise).value, cfg.n, cfg.burn_in)
    series = generate(spec, np.random.default_rng(cfg.seed))
    buf = io.StringIO()
    write_series_csv(buf, series, [str(i) for i in range(spec.n)], "t")
    if cfg.out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        _write(Path(cfg.out), buf.getvalue())
    return EXIT_OK


def cmd_benchmark(cfg: RunConfig) -> int:
    try:
        methods = [Method(m) for m in cfg.methods]
    except ValueError:
        raise UsageError(f"unknown method in {cfg.methods}; valid: {', '.join(m.value for m in Method)}") from None
    noises = [_noise(f).value for f in _csv_list(cfg.noise)]
    settings = BenchmarkSettings(
        n=cfg.n, p=cfg.p, k=cfg.k, alpha=cfg.alpha, b=cfg.b,
        block_len=None if cfg.blocks == "auto" else cfg.blocks,
        shift=None if cfg.shift == "auto" else cfg.shift, level=cfg.level,
    )
    rows = run_benchmark(cfg.models, noises, cfg.reps, methods, cfg.seed, cfg.jobs, settings)
    out = _out_dir(cfg)
    _write(out / "benchmark.csv", rows_to_csv(rows))
    text = rows_to_text(rows)
    _write(out / "benchmark.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "test": cmd_test,
    "profile": cmd_profile,
    "simulate": cmd_simulate,
    "benchmark": cmd_benchmark,
}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, (IngestionError, DomainError, OSError)):
        return EXIT_DATA
    return EXIT_NUMERIC


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s", stream=sys.stderr)
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (CctcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


def main_entry():  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
