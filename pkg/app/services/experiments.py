"""
Monte Carlo harness: concentration runs (sampled RGG vs grid RGG), conjecture
runs over a family of test functions, and the binomial reciprocal audit.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import binom

from app.config import get_settings
from app.errors import ConfigurationError, EmptyRecordsError
from app.models import GeometricGraph, PointSet
from app.schemas import (
    BoundParams,
    ConjectureRecord,
    ConjectureSummary,
    ExperimentConfig,
    ExperimentRecord,
    ReciprocalRecord,
    t_label,
)
from app.services.bounds import (
    a_of_n,
    c_d_feasible,
    hs_tail_bound,
    is_informative,
    reciprocal_tail_bound,
    ws_tail_bound,
)
from app.services.geometry import make_grid, radius, sample_uniform, schedule_for
from app.services.graph import build_rgg, hs_distance, hs_via_neighbour_counts, is_connected, transition_matrix
from app.services.matching import bottleneck_matching
from app.services.rng import Xoshiro256StarStar, substream_seed, trial_seed
from app.services.spectra import (
    conjecture_statistic,
    equidistribution_gap,
    mean_spectral_gap,
    spectral_mean_gap,
    walk_spectrum,
    wasserstein_distance,
)

logger = logging.getLogger(__name__)

Sampler = Callable[[int, int, int], PointSet]

NAN = float("nan")
MIN_RECIPROCAL_DRAWS = 10_000
MIN_RECIPROCAL_MEAN = 20.0
SCHEDULE_WARNING_FRACTION = 0.10


def identity(x):
    return x


def square(x):
    return x * x


def absolute(x):
    return np.abs(x)


def cos_pi(x):
    return np.cos(np.pi * x)


DEFAULT_FUNCTIONS: Dict[str, Callable] = {
    "identity": identity,
    "square": square,
    "abs": absolute,
    "cos_pi": cos_pi,
}


@dataclass(frozen=True)
class _Trial:
    """One (d, m, trial) cell; picklable so it can cross a process pool"""
    config: ExperimentConfig
    d: int
    m: int
    trial: int
    sampler: Sampler
    functions: Optional[Dict[str, Callable]] = None

    @property
    def n(self) -> int:
        return self.m ** self.d

    @property
    def seed(self) -> int:
        return trial_seed(self.config.master_seed, self.d, self.m, self.trial)


@dataclass
class _Graphs:
    n: int
    r: float
    X: PointSet
    D: PointSet
    gX: GeometricGraph
    gD: GeometricGraph
    connected: bool


def _tasks(config: ExperimentConfig, sampler: Sampler, functions=None) -> List[_Trial]:
    tasks = []
    for d in config.dims:
        for m in config.sides:
            if m ** d < 2:
                raise ConfigurationError(f"d={d}, m={m} gives n={m ** d}; experiments need n >= 2")
            tasks.extend(_Trial(config, d, m, trial, sampler, functions) for trial in range(config.trials))
    return tasks


def _build(task: _Trial) -> _Graphs:
    d, m, n = task.d, task.m, task.n
    schedule = schedule_for(task.config.schedule, d)
    r = radius(schedule, n, d)
    X = task.sampler(n, d, task.seed)
    D = make_grid(m, d)
    gX = build_rgg(X, r, label=f"sample d={d} m={m} trial={task.trial}")
    gD = build_rgg(D, r, label=f"grid d={d} m={m}")
    connected = is_connected(gX) and is_connected(gD)
    if not connected:
        logger.warning(f"d={d} m={m} trial={task.trial}: disconnected graph, trial flagged")
    return _Graphs(n=n, r=r, X=X, D=D, gX=gX, gD=gD, connected=connected)


def _c_d(config: ExperimentConfig, t: float, q: float, d: int) -> float:
    if config.c_d_mode.kind == "fixed":
        return config.c_d_mode.value
    if q >= 0.5:
        return NAN
    return c_d_feasible(t, q, d)


def _bound_columns(config: ExperimentConfig, n: int, d: int, r: float, q: float):
    c_d, hs_bound, ws_bound = {}, {}, {}
    for t in config.t_grid:
        key = t_label(t)
        value = _c_d(config, t, q, d)
        c_d[key] = value
        if math.isfinite(value) and value > 0:
            params = BoundParams(n=n, d=d, r=r, t=t, c_d=value)
            hs_bound[key] = hs_tail_bound(params)
            ws_bound[key] = ws_tail_bound(params)
        else:
            hs_bound[key] = ws_bound[key] = NAN
    return c_d, hs_bound, ws_bound


def _concentration_trial(task: _Trial) -> ExperimentRecord:
    settings = get_settings()
    built = _build(task)
    n, d, r = built.n, task.d, built.r
    a = a_of_n(n, d, r)
    matching = bottleneck_matching(built.X, built.D)
    q = matching.bottleneck / r
    c_d, hs_bound, ws_bound = _bound_columns(task.config, n, d, r, q)

    hs = hs_dense = w1 = mean_gap = conj = lambda2_X = lambda2_D = NAN
    if built.connected:
        sX = walk_spectrum(built.gX)
        sD = walk_spectrum(built.gD)
        hs = hs_via_neighbour_counts(built.gX, built.gD, matching)
        if n <= settings.dense_check_max_n:
            PX = transition_matrix(built.gX)
            PD = transition_matrix(built.gD)
            hs_dense = hs_distance(PX, PD, matching)
            mean_gap = mean_spectral_gap(PX, PD)
        else:
            mean_gap = spectral_mean_gap(sX, sD)
        w1 = wasserstein_distance(sX, sD)
        conj = conjecture_statistic(sX, sD, identity)
        lambda2_X, lambda2_D = sX.second, sD.second

    return ExperimentRecord(
        trial=task.trial,
        seed=task.seed,
        d=d,
        n=n,
        r=r,
        a_n=a,
        connected=built.connected,
        M_n=matching.bottleneck,
        M_over_r=q,
        hs_dist=hs,
        w1_dist=w1,
        mean_gap=mean_gap,
        conj_stat_identity=conj,
        lambda2_X=lambda2_X,
        lambda2_D=lambda2_D,
        side=task.m,
        hs_dist_dense=hs_dense,
        hs_sq_scaled=hs * hs * a,
        w1_scaled=w1 * a ** 0.25,
        ws_bound=ws_bound,
        hs_bound=hs_bound,
        c_d=c_d,
    )


def _conjecture_trial(task: _Trial) -> List[ConjectureRecord]:
    built = _build(task)
    records = []
    if built.connected:
        sX = walk_spectrum(built.gX)
        sD = walk_spectrum(built.gD)
    for name, f in task.functions.items():
        if built.connected:
            statistic = conjecture_statistic(sX, sD, f)
            gap = equidistribution_gap(sX, sD, f)
        else:
            statistic = gap = NAN
        records.append(
            ConjectureRecord(
                trial=task.trial,
                seed=task.seed,
                d=task.d,
                n=built.n,
                connected=built.connected,
                function=name,
                statistic=statistic,
                equidistribution_gap=gap,
            )
        )
    return records


def _run(worker: Callable, tasks: List[_Trial], workers: Optional[int]):
    workers = workers or get_settings().workers
    if workers > 1 and len(tasks) > 1:
        logger.info(f"running {len(tasks)} trials on {workers} processes")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(worker, tasks))
    results = []
    for i, task in enumerate(tasks, 1):
        results.append(worker(task))
        logger.debug(f"trial {i}/{len(tasks)} done (d={task.d}, m={task.m}, trial={task.trial})")
    return results


def _log_disconnected(frame: pd.DataFrame) -> None:
    for _, row in frame.iterrows():
        if row["schedule_warning"]:
            logger.warning(
                f"d={row['d']} n={row['n']}: {row['disconnected']}/{row['trials']} trials disconnected; "
                f"the radius schedule is too small for this n"
            )


def run_concentration(config: ExperimentConfig, sampler: Optional[Sampler] = None) -> List[ExperimentRecord]:
    """
    One record per (d, m, trial), ordered by (d, m, trial). Trials are seeded
    from (master_seed, d, m, trial) alone, so the records do not depend on the
    number of workers.
    """
    tasks = _tasks(config, sampler or sample_uniform)
    logger.info(f"concentration run: dims={config.dims} sides={config.sides} trials={config.trials} seed={config.master_seed}")
    records = _run(_concentration_trial, tasks, config.workers)
    records.sort(key=lambda rec: (rec.d, rec.side, rec.trial))
    _log_disconnected(summarize(records))
    return records


def run_conjecture(
    config: ExperimentConfig,
    f_family: Optional[Dict[str, Callable]] = None,
    sampler: Optional[Sampler] = None,
) -> Tuple[List[ConjectureRecord], List[ConjectureSummary]]:
    """Per-trial, per-function statistics plus per-(d, n, function) medians over connected trials"""
    functions = DEFAULT_FUNCTIONS if f_family is None else f_family
    if not functions:
        raise ConfigurationError("the test function family is empty")
    order = {name: i for i, name in enumerate(functions)}
    tasks = _tasks(config, sampler or sample_uniform, dict(functions))
    logger.info(f"conjecture run: dims={config.dims} sides={config.sides} functions={list(functions)}")
    records = [rec for batch in _run(_conjecture_trial, tasks, config.workers) for rec in batch]
    records.sort(key=lambda rec: (rec.d, rec.n, rec.trial, order[rec.function]))

    df = pd.DataFrame([rec.model_dump() for rec in records])
    used = df[df["connected"]]
    summaries = []
    for (d, n, name), group in used.groupby(["d", "n", "function"], sort=False):
        summaries.append(
            ConjectureSummary(
                d=int(d),
                n=int(n),
                function=name,
                trials_used=len(group),
                median_statistic=float(group["statistic"].median()),
                median_equidistribution_gap=float(group["equidistribution_gap"].median()),
            )
        )
    summaries.sort(key=lambda s: (s.d, s.n, order[s.function]))
    return records, summaries


def summarize(records: Sequence[ExperimentRecord]) -> pd.DataFrame:
    """Per-(d, n) medians over connected trials, with disconnected counts and the schedule warning flag"""
    if not records:
        raise EmptyRecordsError("no records to summarize")
    df = pd.DataFrame([rec.to_row() for rec in records])
    grouped = df.groupby(["d", "n"], sort=True)
    out = grouped.agg(trials=("trial", "size"), connected=("connected", "sum")).reset_index()
    out["disconnected"] = out["trials"] - out["connected"]
    out["disconnected_fraction"] = out["disconnected"] / out["trials"]
    out["schedule_warning"] = out["disconnected_fraction"] >= SCHEDULE_WARNING_FRACTION

    metrics = ["M_n", "M_over_r", "hs_dist", "w1_dist", "mean_gap", "conj_stat_identity", "w1_scaled", "hs_sq_scaled"]
    medians = df[df["connected"]].groupby(["d", "n"])[metrics].median().add_prefix("median_").reset_index()
    return out.merge(medians, on=["d", "n"], how="left")


def is_strictly_decreasing(values: Iterable[float]) -> bool:
    values = list(values)
    return all(b < a for a, b in zip(values, values[1:]))


def binomial_draws(n: int, p: float, draws: int, seed: int) -> np.ndarray:
    """Binomial(n, p) variates by inversion of the CDF against the package stream"""
    u = Xoshiro256StarStar(seed).random_array(draws)
    cdf = binom.cdf(np.arange(n + 1), n, p)
    return np.minimum(np.searchsorted(cdf, u, side="right"), n)


def _float_bits(x: float) -> int:
    return int(np.float64(x).view(np.uint64))


def run_reciprocal_mc(
    n_grid: Sequence[int],
    p_grid: Sequence[float],
    t_grid: Sequence[float],
    draws: int = 100_000,
    master_seed: int = 0,
) -> List[ReciprocalRecord]:
    """
    Empirical Pr{|1/X - 1/EX| > t/EX} for X ~ Binomial(n, p) against
    reciprocal_tail_bound(t, np). X = 0 counts as an exceedance.
    """
    if draws < MIN_RECIPROCAL_DRAWS:
        raise ConfigurationError(f"draws must be >= {MIN_RECIPROCAL_DRAWS}, got {draws}")
    records = []
    for n in n_grid:
        for p in p_grid:
            if n < 1 or not 0 < p <= 1:
                raise ConfigurationError(f"invalid binomial parameters n={n}, p={p}")
            mean = n * p
            seed = substream_seed(master_seed, [n, _float_bits(p)])
            if mean < MIN_RECIPROCAL_MEAN:
                message = f"np={mean:g} < {MIN_RECIPROCAL_MEAN:g}; conditioning on X >= 1 is not negligible"
                logger.warning(f"n={n} p={p}: {message}")
                for t in t_grid:
                    bound = reciprocal_tail_bound(t, mean)
                    records.append(
                        ReciprocalRecord(
                            n=n, p=p, mean=mean, t=t, draws=draws, seed=seed, empirical=NAN, std_error=NAN,
                            bound=bound, informative=is_informative(bound), within_bound=False, warning=message,
                        )
                    )
                continue

            x = binomial_draws(n, p, draws, seed).astype(np.float64)
            with np.errstate(divide="ignore"):
                deviation = np.abs(1.0 / x - 1.0 / mean)
            for t in t_grid:
                frequency = float(np.mean(deviation > t / mean))
                std_error = math.sqrt(frequency * (1.0 - frequency) / draws)
                bound = reciprocal_tail_bound(t, mean)
                records.append(
                    ReciprocalRecord(
                        n=n, p=p, mean=mean, t=t, draws=draws, seed=seed, empirical=frequency, std_error=std_error,
                        bound=bound, informative=is_informative(bound),
                        within_bound=frequency <= bound + 3.0 * std_error,
                    )
                )
            logger.info(f"reciprocal audit n={n} p={p}: {draws} draws")
    return records
