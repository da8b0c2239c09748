"""Monte Carlo sweeps over G_d(n, c ln(n)/n) and their CSV output."""

import csv
import io
import logging
import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ._accel import thread_count
from .dag import MAX_CLOSURE_N, sample_barak_erdos, transitive_closure
from .formulas import f_epsilon_exact, phase_limit, pittel_tungol_window, theta
from .rng import derive_seed

log = logging.getLogger(__name__)

PHASE_HEADER = ("c", "n", "trial", "seed", "gamma_star", "theta", "f_n", "f_limit")
GAMMA_HEADER = ("c", "n", "trial", "seed", "gamma_star", "lo", "hi", "in_window")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    n_list: tuple
    c_list: tuple
    trials: int
    master_seed: int
    output_path: str = None
    threads: int = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "c_list", tuple(float(c) for c in self.c_list))
        if not self.n_list or not self.c_list:
            raise ConfigError("need at least one n and one c")
        if any(n < 2 for n in self.n_list):
            raise ConfigError("every n must be >= 2")
        if any(n > MAX_CLOSURE_N for n in self.n_list):
            raise ConfigError(f"n above {MAX_CLOSURE_N} exceeds the closure memory cap")
        if any(not math.isfinite(c) or c < 0 for c in self.c_list):
            raise ConfigError("every c must be a finite non-negative number")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")


def edge_probability(n, c):
    """c ln(n)/n clamped to [0, 1]; returns (p, clamped)."""
    p = c * math.log(n) / n
    if p > 1.0:
        return 1.0, True
    return p, False


def _float_bits(x):
    return int.from_bytes(struct.pack("<d", float(x)), "little")


def trial_seed(master_seed, c, n, trial):
    return derive_seed(master_seed, _float_bits(c), n, trial)


@dataclass(frozen=True)
class PhaseRecord:
    c: float
    n: int
    trial: int
    seed: int
    gamma_star: int
    theta: float
    f_n: float
    f_limit: float
    clamped: bool = False

    def row(self):
        return (_num(self.c), self.n, self.trial, self.seed, self.gamma_star,
                _num(self.theta), _num(self.f_n), _num(self.f_limit))


@dataclass(frozen=True)
class GammaRecord:
    c: float
    n: int
    trial: int
    seed: int
    gamma_star: int
    lo: float
    hi: float
    in_window: bool

    def row(self):
        return (_num(self.c), self.n, self.trial, self.seed, self.gamma_star,
                _num(self.lo), _num(self.hi), int(self.in_window))


def _num(x):
    return f"{x:.17g}"


def gamma_star_trial(n, c, seed):
    p, clamped = edge_probability(n, c)
    g = sample_barak_erdos(n, p, seed)
    return transitive_closure(g).gamma_star, clamped


def _tasks(cfg):
    return [
        (c, n, t, trial_seed(cfg.master_seed, c, n, t))
        for c in cfg.c_list
        for n in cfg.n_list
        for t in range(cfg.trials)
    ]


def _run_trials(cfg):
    tasks = _tasks(cfg)
    workers = cfg.threads or thread_count()

    def one(task):
        c, n, t, seed = task
        gs, clamped = gamma_star_trial(n, c, seed)
        if clamped:
            log.warning("c=%g, n=%d: edge probability clamped to 1", c, n)
        return task, gs, clamped

    if workers == 1 or len(tasks) == 1:
        results = [one(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, tasks))
    results.sort(key=lambda r: (r[0][0], r[0][1], r[0][2]))
    return results


def run_phase_sweep(cfg):
    records = []
    for (c, n, t, seed), gs, clamped in _run_trials(cfg):
        eps = theta(gs)
        records.append(PhaseRecord(c, n, t, seed, gs, eps, f_epsilon_exact(n, eps), phase_limit(c), clamped))
    if cfg.output_path:
        write_csv(cfg.output_path, PHASE_HEADER, records)
    return records


def run_gamma_sweep(cfg, A=1.0, kappa=0.1):
    if any(n < 16 for n in cfg.n_list):
        raise ConfigError("gamma sweeps need n >= 16 for the window formula")
    records = []
    for (c, n, t, seed), gs, _ in _run_trials(cfg):
        w = pittel_tungol_window(n, c, A, kappa)
        records.append(GammaRecord(c, n, t, seed, gs, w.lo, w.hi, w.contains(gs)))
    if cfg.output_path:
        write_csv(cfg.output_path, GAMMA_HEADER, records)
    return records


def dumps_csv(header, records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(path, header, records):
    with open(os.fspath(path), "w", newline="") as fh:
        fh.write(dumps_csv(header, records))
