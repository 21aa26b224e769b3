"""Monte Carlo comparison of causal-discovery methods on the model zoo.

Within one replication every method sees the same simulated path. Each
replication draws from its own stream keyed by ``(seed, model, noise, rep)``,
so results do not depend on scheduling.
"""
from __future__ import annotations

import csv
import enum
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..bootstrap import BootstrapConfig, mbb_test
from ..ctc import gpd_hybrid_values, resolve_k
from ..errors import CctcError, UsageError
from ..impact import ImpactParams
from ..series import format_real
from .comparators import gpd_permutation_from_cdfs, granger_test, hard_threshold_decision
from .models import MODEL_IDS, ModelSpec, NoiseFamily, generate, true_edges

log = logging.getLogger(__name__)

MAX_EXCLUDED_FRACTION = 0.02


class Method(str, enum.Enum):
    COMPOUND_BOOTSTRAP = "compound"
    MAX_BOOTSTRAP = "max-bootstrap"
    MAX_HARD_THRESHOLD = "hard-threshold"
    GRANGER = "granger"
    GPD_PERMUTATION = "gpd-permutation"


METHOD_TITLES = {
    Method.COMPOUND_BOOTSTRAP: "Compound CTC w. bootstrap",
    Method.MAX_BOOTSTRAP: "CTC w. bootstrap",
    Method.MAX_HARD_THRESHOLD: "CTC w. hard threshold",
    Method.GRANGER: "Granger causality test",
    Method.GPD_PERMUTATION: "Permutation test",
}


@dataclass(frozen=True)
class BenchmarkRow:
    model: str
    noise: str
    method: Method
    pct_correct_xy: float
    pct_correct_yx: float
    reps: int
    excluded_reps: int = 0


@dataclass(frozen=True)
class BenchmarkSettings:
    n: int = 1000
    p: int = 3
    k: object = "auto"
    alpha: float = 1e4
    b: int = 100
    block_len: int | None = None
    shift: int | None = None
    level: float = 0.05


def rep_seed(seed: int, model: str, noise: str, rep: int, stream: int = 0) -> np.random.SeedSequence:
    """Stream 0 simulates the path; stream ``1 + i`` feeds the i-th ``Method``."""
    key = (MODEL_IDS.index(model), list(NoiseFamily).index(NoiseFamily(noise)), rep, stream)
    return np.random.SeedSequence(seed, spawn_key=key)


def _decide(method: Method, series, settings: BenchmarkSettings, ss: np.random.SeedSequence):
    """Decisions ``(reject x->y, reject y->x)`` for one path."""
    p, level = settings.p, settings.level
    x = series[0]
    multi = x is not None and len(series) == 3 and series[1].name == "Y1"
    if multi:
        if method is not Method.COMPOUND_BOOTSTRAP:
            raise UsageError(f"method {method.value!r} is not defined for multivariate models")
        x, y1, y2 = series
        cause_effects = [(x, [y1, y2]), (y1, [x, y2])]
    else:
        y = series[1]
        cause_effects = [(x, [y]), (y, [x])]
    seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(2)]
    if method in (Method.COMPOUND_BOOTSTRAP, Method.MAX_BOOTSTRAP):
        variant = "compound" if method is Method.COMPOUND_BOOTSTRAP else "max"
        out = []
        for (cause, effects), s in zip(cause_effects, seeds):
            params = ImpactParams.uniform(p * len(effects), settings.alpha) if variant == "compound" else None
            cfg = BootstrapConfig(settings.b, settings.block_len, settings.shift, s, level)
            eff = effects if len(effects) > 1 else effects[0]
            out.append(mbb_test(cause, eff, p, settings.k, params, cfg, variant).reject)
        return tuple(out)
    y = series[1]
    if method is Method.MAX_HARD_THRESHOLD:
        return hard_threshold_decision(x, y, p, settings.k), hard_threshold_decision(y, x, p, settings.k)
    if method is Method.GRANGER:
        return granger_test(x, y, p, level)[1], granger_test(y, x, p, level)[1]
    if method is Method.GPD_PERMUTATION:
        k = resolve_k(settings.k, len(x))
        fx, fy = gpd_hybrid_values(x.values, k), gpd_hybrid_values(y.values, k)
        return (gpd_permutation_from_cdfs(fx, fy, p, k, settings.b, seeds[0], level)[1],
                gpd_permutation_from_cdfs(fy, fx, p, k, settings.b, seeds[1], level)[1])
    raise UsageError(f"unknown method {method!r}")


def run_rep(model: str, noise: str, rep: int, methods, seed: int, settings: BenchmarkSettings):
    """Simulate one path and apply every method; failures are returned, not raised."""
    path_ss = rep_seed(seed, model, noise, rep)
    series = generate(ModelSpec.of(model, noise, settings.n), np.random.default_rng(path_ss))
    out = {}
    for method in methods:
        mss = rep_seed(seed, model, noise, rep, 1 + list(Method).index(method))
        try:
            out[method] = _decide(method, series, settings, mss)
        except CctcError as exc:
            log.warning("model %s noise %s rep %d method %s failed: %s", model, noise, rep, method.value, exc)
            out[method] = exc
    return out


def _run_rep_args(args):
    return run_rep(*args)


def score(decisions, truth) -> tuple:
    """Percent correct per direction from ``(reject_xy, reject_yx)`` pairs."""
    if not decisions:
        return float("nan"), float("nan")
    arr = np.array(decisions, dtype=bool)
    want = np.array(["xy" in truth, "yx" in truth])
    correct = arr == want
    return tuple(100.0 * correct.mean(axis=0))


def run_benchmark(models, noises, reps: int, methods, seed: int = 0, parallelism: int = 1,
                  settings: BenchmarkSettings | None = None):
    """Percent of correct decisions per (model, noise, method) over *reps* paths."""
    settings = settings or BenchmarkSettings()
    methods = [Method(m) for m in methods]
    for m in models:
        if m not in MODEL_IDS:
            raise UsageError(f"unknown model id {m!r}; valid ids: {', '.join(MODEL_IDS)}")
    noises = [NoiseFamily(f).value for f in noises]
    if reps <= 0:
        return []
    jobs = [(m, f, r, methods, seed, settings) for m in models for f in noises for r in range(reps)]
    if parallelism > 1:
        with ProcessPoolExecutor(parallelism) as pool:
            results = list(pool.map(_run_rep_args, jobs, chunksize=max(1, len(jobs) // (8 * parallelism))))
    else:
        results = [run_rep(*job) for job in jobs]
    rows = []
    for m in models:
        for f in noises:
            block = [res for job, res in zip(jobs, results) if job[0] == m and job[1] == f]
            for method in methods:
                decisions = [r[method] for r in block if not isinstance(r[method], Exception)]
                excluded = reps - len(decisions)
                if excluded > MAX_EXCLUDED_FRACTION * reps:
                    raise CctcError(f"{excluded} of {reps} replications failed for model {m}, "
                                    f"noise {f}, method {method.value}")
                xy, yx = score(decisions, true_edges(m))
                rows.append(BenchmarkRow(m, f, method, xy, yx, len(decisions), excluded))
    return rows


CSV_COLUMNS = ("model", "noise", "method", "direction", "pct_correct", "reps", "excluded_reps")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        for direction, pct in (("xy", r.pct_correct_xy), ("yx", r.pct_correct_yx)):
            w.writerow([r.model, r.noise, r.method.value, direction, format_real(pct), r.reps, r.excluded_reps])
    return buf.getvalue()


def rows_to_text(rows) -> str:
    """Aligned table: one line per model, two percentage columns per method."""
    if not rows:
        return "(no rows)\n"
    methods = list(dict.fromkeys(r.method for r in rows))
    lines = []
    for noise in dict.fromkeys(r.noise for r in rows):
        lines.append(f"noise: {noise}")
        head = "Model | " + " | ".join(f"{METHOD_TITLES[m]:^21}" for m in methods)
        sub = "      | " + " | ".join(f"{'X->Y':>10} {'Y->X':>10}" for _ in methods)
        lines += [head, sub, "-" * len(head)]
        by_model = {}
        for r in rows:
            if r.noise == noise:
                by_model.setdefault(r.model, {})[r.method] = r
        for model, cells in by_model.items():
            parts = []
            for m in methods:
                r = cells.get(m)
                parts.append(f"{r.pct_correct_xy:>9.0f}% {r.pct_correct_yx:>9.0f}%" if r else f"{'':>21}")
            lines.append(f"{model:<5} | " + " | ".join(parts))
        lines.append("")
    return "\n".join(lines)
