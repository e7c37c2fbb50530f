"""Run an ExperimentConfig: trial fan-out, ordered aggregation, record stream, fixtures."""

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

from . import experiments
from .config import ExperimentConfig

OUT_ENV = "BSCOUNT_OUT_DIR"
DEFAULT_OUT = "bscount-out"


@dataclass
class RunRecord:
    config_digest: str
    kind: str
    records: list
    fixtures: list = field(default_factory=list)
    fixture_paths: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    out_dir: str | None = None

    @property
    def n_checks(self):
        return len(self.records)

    @property
    def n_failed(self):
        return sum(1 for r in self.records if not r.get("pass", True))

    @property
    def ok(self):
        return self.n_failed == 0 and not self.fixtures

    @property
    def status(self):
        return 0 if self.ok else 1

    def summary(self):
        return {
            "config_digest": self.config_digest,
            "kind": self.kind,
            "checks": self.n_checks,
            "failed": self.n_failed,
            "fixtures": self.fixture_paths,
            "status": "pass" if self.ok else "fail",
            "timing": self.timing,
        }


def dumps(rec):
    """Canonical record line: sorted keys, no whitespace variation."""
    return json.dumps(rec, sort_keys=True, separators=(",", ":"), allow_nan=False)


def default_out_dir(config):
    base = os.environ.get(OUT_ENV, DEFAULT_OUT)
    return str(Path(base) / f"{config.kind}-{config.digest()[:8]}")


def _trial_fn(config):
    p = config.params
    if config.kind == "abstract_bound":
        return partial(experiments.abstract_bound_trial, config.seed, params=p), config.trials
    if config.kind == "antisym_oracle":
        fn = partial(experiments.antisym_trial, config.seed, params=p, families=config.trials)
        return fn, experiments.antisym_trial_count(p, config.trials)
    if config.kind == "jordan":
        return partial(experiments.jordan_trial, config.seed, params=p), config.trials
    return None, 0


def _call(fn, trial):
    return fn(trial)


def run_trials(fn, n_trials, jobs=1):
    """Results in trial order regardless of how the work is scheduled."""
    if jobs <= 1 or n_trials <= 1:
        return [fn(t) for t in range(n_trials)]
    chunk = max(1, n_trials // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(partial(_call, fn), range(n_trials), chunksize=chunk))


def _plot_files(config, cloud, records, out):
    files = {}
    if cloud is not None:
        path = out / "eigenvalues.csv"
        from ..schrodinger import cloud_to_csv

        cloud_to_csv(cloud, path)
        files["eigenvalues"] = str(path)
        path = out / "cloud.dat"
        with open(path, "w") as fh:
            fh.write("# re im alg_mult certificate converged\n")
            conv = cloud.converged
            for i, (re, im, m, c) in enumerate(cloud.rows()):
                flag = "nan" if conv is None else int(conv[i])
                fh.write(f"{re!r} {im!r} {m} {c!r} {flag}\n")
        files["cloud"] = str(path)
        path = out / "bounds.dat"
        with open(path, "w") as fh:
            fh.write("# gamma alpha eps n_count rhs ratio\n")
            for r in records:
                if r.get("check") == "clr":
                    fh.write(f"{r['gamma']!r} {r['alpha']!r} {r['eps']!r} {r['n_count']} {r['rhs']!r} {r['ratio']!r}\n")
        files["bounds"] = str(path)
    if config.kind == "constants_table":
        path = out / "constants.dat"
        cols = ["d", "gamma", "p", "tau_d", "C_clr", "L_cl", "C_lt", "gamma_prime", "K_q"]
        with open(path, "w") as fh:
            fh.write("# " + " ".join(cols) + "\n")
            for r in records:
                fh.write(" ".join(repr(r.get(c)) if r.get(c) is not None else "nan" for c in cols) + "\n")
        files["constants"] = str(path)
    if config.kind == "accumulation_sweep":
        path = out / "sweep.dat"
        with open(path, "w") as fh:
            fh.write("# h weight param sum normalized converged\n")
            for r in records:
                w = r["weight"]
                fh.write(f"{r['h']!r} {w['kind']} {w['param']!r} {r['sum']!r} {r['normalized']!r} {r['converged']}\n")
        files["sweep"] = str(path)
    return files


def run(config: ExperimentConfig, jobs=1, out=None, write=True):
    """Execute ``config``; the record stream depends only on the config, never on ``jobs``."""
    t0 = time.perf_counter()
    cloud = None
    fn, n_trials = _trial_fn(config)
    if fn is not None:
        results = run_trials(fn, n_trials, jobs)
        records = [r for recs, _ in results for r in recs]
        fixtures = [f for _, fxs in results for f in fxs]
    elif config.kind == "schrodinger":
        cloud, records, fixtures = experiments.schrodinger_run(config.params)
    elif config.kind == "constants_table":
        records, fixtures = experiments.constants_records(config.params), []
    elif config.kind == "accumulation_sweep":
        records, fixtures = experiments.sweep_records(config.params), []
    else:
        raise ValueError(f"unknown kind {config.kind!r}")
    elapsed = time.perf_counter() - t0
    result = RunRecord(config.digest(), config.kind, records, fixtures, timing={"seconds": round(elapsed, 3), "jobs": jobs})
    if write:
        out_dir = Path(out or config.out or default_out_dir(config))
        out_dir.mkdir(parents=True, exist_ok=True)
        result.out_dir = str(out_dir)
        with open(out_dir / "records.jsonl", "w") as fh:
            for rec in records:
                fh.write(dumps(rec) + "\n")
        if fixtures:
            fdir = out_dir / "fixtures"
            fdir.mkdir(exist_ok=True)
            for i, fx in enumerate(fixtures):
                parts = [config.kind, str(config.seed), str(fx.get("trial", i))]
                if "convention" in fx:
                    parts.append(fx["convention"])
                path = fdir / ("-".join(parts) + ".json")
                write_fixture(fx, path)
                result.fixture_paths.append(str(path))
        result.timing["files"] = _plot_files(config, cloud, records, out_dir)
        with open(out_dir / "config.json", "w") as fh:
            json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        with open(out_dir / "summary.json", "w") as fh:
            json.dump(result.summary(), fh, indent=2, sort_keys=True)
    return result


def write_fixture(fx, path):
    with open(path, "w") as fh:
        json.dump(fx, fh, indent=1, sort_keys=True)


@dataclass
class ReplayResult:
    kind: str
    expected: dict
    observed: dict

    @property
    def same_verdict(self):
        keys = ("holds", "n_count", "pass", "failed")
        return all(self.expected.get(k) == self.observed.get(k) for k in keys if k in self.expected)


def replay(path):
    with open(path) as fh:
        fx = json.load(fh)
    kind = fx.get("kind")
    if kind not in experiments.REPLAYERS:
        raise ValueError(f"fixture {path} has unknown kind {kind!r}")
    return ReplayResult(kind, fx.get("expected", {}), experiments.REPLAYERS[kind](fx))
