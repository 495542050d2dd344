"""Monte Carlo engine for the continuous-time Res-Ind dynamics.

Each sample draws its own generator from (seed, sample index) with a
counter-based bit generator, so results do not depend on how samples are
spread over workers.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chain import step
from .diagrams import MultiDiagram, YoungDiagram, corner_contents
from .freeprob import moments_to_cumulants
from .groups import FiniteGroupTable, plancherel_weights
from .pausing import ClockMode, Exponential, PausingTime, jump_counts

__all__ = [
    "Delta",
    "Plancherel",
    "SimConfig",
    "SimReport",
    "sample_rng",
    "sample_initial",
    "grow_plancherel",
    "run_ct",
    "run_trajectory",
    "scaled_cumulants",
    "estimate",
    "MAX_K",
]

MAX_K = 8


@dataclass(frozen=True)
class Delta:
    state: MultiDiagram


@dataclass(frozen=True)
class Plancherel:
    pass


@dataclass
class SimConfig:
    n: int
    table: FiniteGroupTable
    ensemble: Delta | Plancherel
    pausing: PausingTime = field(default_factory=Exponential)
    clock: ClockMode = field(default_factory=ClockMode)
    t_grid: tuple = (0.0,)
    samples: int = 100
    K: int = 5
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        self.t_grid = tuple(float(t) for t in self.t_grid)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.K <= MAX_K:
            raise ValueError(f"K must lie in 1..{MAX_K}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if any(t < 0 for t in self.t_grid):
            raise ValueError("times must be nonnegative")
        if isinstance(self.ensemble, Delta):
            st = self.ensemble.state
            if len(st) != self.table.n_irreps or st.n != self.n:
                raise ValueError("Delta state must have one entry per irrep and n boxes")


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def grow_plancherel(size: int, rng: np.random.Generator) -> YoungDiagram:
    """Plancherel-distributed diagram by sequential box insertion."""
    parts: list[int] = []
    for _ in range(size):
        xs, ys = corner_contents(parts)
        masses = []
        for x in xs:
            num = 1.0
            for y in ys:
                num *= x - y
            den = 1.0
            for x2 in xs:
                if x2 != x:
                    den *= x - x2
            masses.append(num / den)
        u = rng.random() * sum(masses)
        acc = 0.0
        pick = len(xs) - 1
        for i, mval in enumerate(masses):
            acc += mval
            if u < acc:
                pick = i
                break
        x = xs[pick]
        # addable content x sits in row -x if x <= 0 (new row when row == len)
        row = next(i for i in range(len(parts) + 1)
                   if (parts[i] if i < len(parts) else 0) - i == x)
        if row == len(parts):
            parts.append(1)
        else:
            parts[row] += 1
    return YoungDiagram(parts)


def sample_initial(ensemble, n: int, table: FiniteGroupTable, rng: np.random.Generator) -> MultiDiagram:
    if isinstance(ensemble, Delta):
        return ensemble.state
    w = np.array([float(x) for x in plancherel_weights(table)])
    sizes = rng.multinomial(n, w / w.sum())
    return MultiDiagram(tuple(grow_plancherel(int(s), rng) for s in sizes))


def run_trajectory(lam0: MultiDiagram, times, config: SimConfig, rng: np.random.Generator) -> list:
    """States at each time in ``times`` (model time t, real time t tau_n)."""
    times = np.asarray(times, dtype=float)
    order = np.argsort(times, kind="stable")
    tau = config.clock.tau(config.n)
    counts = jump_counts(config.pausing, times * tau, rng)
    out = [None] * len(times)
    lam, done = lam0, 0
    for i in order:
        for _ in range(int(counts[i]) - done):
            lam = step(lam, config.table, rng)
        done = max(done, int(counts[i]))
        out[i] = lam
    return out


def run_ct(lam0: MultiDiagram, t: float, config: SimConfig, rng: np.random.Generator) -> MultiDiagram:
    """X at model time t: N_{t tau_n} steps of the chain from lam0."""
    if lam0.n != config.n:
        raise ValueError("initial state must have n boxes")
    return run_trajectory(lam0, [t], config, rng)[0]


def scaled_cumulants(nu, n: int, order: int) -> np.ndarray:
    """R_1..R_order of the transition measure of nu shrunk by 1/sqrt(n)."""
    xs, ys = corner_contents(tuple(nu))
    xs_a = np.array(xs, dtype=float)
    ys_a = np.array(ys, dtype=float)
    diff = xs_a[:, None] - xs_a[None, :]
    np.fill_diagonal(diff, 1.0)
    num = np.prod(xs_a[:, None] - ys_a[None, :], axis=1) if len(ys) else np.ones(len(xs))
    masses = num / np.prod(diff, axis=1)
    loc = xs_a / math.sqrt(n)
    moments = [float(np.dot(masses, loc**k)) for k in range(1, order + 1)]
    return np.array(moments_to_cumulants(moments))


def _sample_stats(config: SimConfig, index: int) -> np.ndarray:
    """Array (len(t_grid), n_irreps, 1 + K) of size/n and R_2..R_{K+1} for one sample."""
    rng = sample_rng(config.seed, index)
    lam0 = sample_initial(config.ensemble, config.n, config.table, rng)
    states = run_trajectory(lam0, config.t_grid, config, rng)
    out = np.zeros((len(config.t_grid), config.table.n_irreps, 1 + config.K))
    for i, lam in enumerate(states):
        for z, nu in enumerate(lam):
            out[i, z, 0] = sum(nu) / config.n
            out[i, z, 1:] = scaled_cumulants(nu, config.n, config.K + 1)[1:]
    return out


def _chunk(args):
    config, indices = args
    return [_sample_stats(config, i) for i in indices]


@dataclass
class SimReport:
    t_grid: tuple
    irreps: tuple
    K: int
    samples: int
    size_mean: np.ndarray  # (t, zeta)
    size_se: np.ndarray
    r_mean: np.ndarray  # (t, zeta, j) for R_2..R_{K+1}
    r_se: np.ndarray
    config: dict = field(default_factory=dict)
    runtime: float = 0.0

    def rows(self) -> list[dict]:
        out = []
        for i, t in enumerate(self.t_grid):
            for z, lab in enumerate(self.irreps):
                row = {"t": t, "zeta": lab, "size_mean": float(self.size_mean[i, z]),
                       "size_se": float(self.size_se[i, z])}
                for j in range(self.K):
                    row[f"R{j + 2}"] = float(self.r_mean[i, z, j])
                    row[f"R{j + 2}_se"] = float(self.r_se[i, z, j])
                out.append(row)
        return out

    def to_csv(self) -> str:
        rows = self.rows()
        cols = list(rows[0].keys())
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        """Deterministic JSON; runtime is left out so equal seeds give equal bytes."""
        return json.dumps({"config": self.config, "samples": self.samples, "K": self.K,
                           "rows": self.rows()}, sort_keys=True, indent=1) + "\n"

    def to_bytes(self) -> bytes:
        return self.to_json().encode()


def _describe(config: SimConfig) -> dict:
    ens = ("plancherel" if isinstance(config.ensemble, Plancherel)
           else "delta:" + ";".join(",".join(map(str, e)) or "-" for e in config.ensemble.state))
    return {"n": config.n, "group": config.table.name, "ensemble": ens,
            "pausing": repr(config.pausing), "clock": config.clock.mode,
            "alpha": config.clock.alpha, "t_grid": list(config.t_grid),
            "samples": config.samples, "K": config.K, "seed": config.seed}


def estimate(config: SimConfig) -> SimReport:
    """Per-sample sizes and scaled cumulants averaged in sample order."""
    start = time.perf_counter()
    idx = list(range(config.samples))
    workers = max(1, int(config.workers))
    if workers == 1:
        stats = [_sample_stats(config, i) for i in idx]
    else:
        chunks = [idx[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_chunk, [(config, c) for c in chunks]))
        stats = [None] * config.samples
        for c, res in zip(chunks, parts):
            for i, s in zip(c, res):
                stats[i] = s
    arr = np.stack(stats)  # (samples, t, zeta, 1 + K)
    S = config.samples
    mean = arr.mean(axis=0)
    se = arr.std(axis=0, ddof=1) / math.sqrt(S) if S > 1 else np.zeros_like(mean)
    return SimReport(
        t_grid=config.t_grid,
        irreps=tuple(config.table.irrep_labels),
        K=config.K,
        samples=S,
        size_mean=mean[..., 0],
        size_se=se[..., 0],
        r_mean=mean[..., 1:],
        r_se=se[..., 1:],
        config=_describe(config),
        runtime=time.perf_counter() - start,
    )
