"""Reproducible Monte Carlo over shuffled decks.

Trial ``i`` always draws from ``trial_rng(seed, i)`` and per-trial results are
merged in index order, so every estimate depends only on the inputs and the
seed, whatever the number of worker processes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from cardguess.birthday import SurvivalCurve, lambda_of, record_times, t_for_lambda
from cardguess.deck import DeckSpec, shuffle, trial_rng
from cardguess.game import _check_mode, best_score, occurrence_ranks, play, worst_score_even

DEFAULT_SEED = 42
DEFAULT_TRIALS = 10_000
Z95 = 1.959963984540054

# Even decks above this size play the worst strategy on a sampled prefix of
# the draw order; below it the whole deck is shuffled.
PREFIX_MIN_CARDS = 4096


@dataclass(frozen=True)
class SimSummary:
    trials: int
    mean: float
    sample_std: float
    stderr: float
    seed: int
    spec: DeckSpec
    target: str

    @property
    def ci95(self) -> tuple[float, float]:
        return self.mean - Z95 * self.stderr, self.mean + Z95 * self.stderr


def summarize(values: np.ndarray, seed: int, spec: DeckSpec, target: str) -> SimSummary:
    values = np.asarray(values, dtype=np.float64)
    trials = values.size
    if trials < 1:
        raise ValueError("need at least one trial")
    mean = math.fsum(values) / trials
    if trials > 1:
        std = math.sqrt(math.fsum((values - mean) ** 2) / (trials - 1))
    else:
        std = 0.0
    return SimSummary(trials, mean, std, std / math.sqrt(trials), seed, spec, target)


def _workers(threads: int) -> int:
    if threads < 0:
        raise ValueError("threads must be non-negative")
    return threads or os.cpu_count() or 1


def run_trials(
    kernel: Callable[..., np.ndarray], args: tuple, trials: int, seed: int, threads: int = 1
) -> np.ndarray:
    """Evaluate ``kernel(*args, seed, start, stop)`` over index blocks and stack the results in order."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    workers = min(_workers(threads), trials)
    if workers == 1:
        return kernel(*args, seed, 0, trials)
    edges = np.linspace(0, trials, 4 * workers + 1).astype(int)
    blocks = [(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(kernel, *args, seed, a, b) for a, b in blocks]
        return np.concatenate([f.result() for f in futures])


# -- scores -----------------------------------------------------------------


def _prefix_length(spec: DeckSpec) -> int:
    """Prefix length after which a type is almost surely exhausted (lambda = 2^m)."""
    m = spec.m_star
    return min(spec.N, int(math.ceil(2 * t_for_lambda(spec, m - 1, 1.0))) + 64)


def worst_even_trial(spec: DeckSpec, rng: np.random.Generator, prefix: int) -> int:
    """Worst-strategy score from a uniformly sampled prefix of the draw order.

    Card ``c`` has type ``c // m + 1``.  If no type is exhausted inside the
    prefix, the rest of the order is drawn as a uniform permutation of the
    unused cards, which keeps the full order uniform.
    """
    N, m = spec.N, spec.m_star
    ids = rng.choice(N, size=prefix, replace=False)
    drawn = ids // m + 1
    if prefix < N and not np.any(occurrence_ranks(drawn) == m):
        rest = np.setdiff1d(np.arange(N), ids, assume_unique=True)
        drawn = np.concatenate([drawn, rng.permutation(rest) // m + 1])
    return worst_score_even(drawn, m)


def _score_block(spec: DeckSpec, mode: str, seed: int, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start, dtype=np.int64)
    lazy = mode == "worst" and spec.is_even and spec.N >= PREFIX_MIN_CARDS
    prefix = _prefix_length(spec) if lazy else 0
    for k, i in enumerate(range(start, stop)):
        rng = trial_rng(seed, i)
        if lazy:
            out[k] = worst_even_trial(spec, rng, prefix)
            continue
        deck = shuffle(spec, rng)
        if mode == "best":
            out[k] = best_score(deck.cards, spec.m_star)
        elif spec.is_even:
            out[k] = worst_score_even(deck.draw_order, spec.m_star)
        else:
            out[k] = play(deck, "worst").score
    return out


def run_score_trials(
    spec: DeckSpec, mode: str, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED, threads: int = 1
) -> SimSummary:
    _check_mode(mode)
    values = run_trials(_score_block, (spec, mode), trials, seed, threads)
    return summarize(values, seed, spec, mode)


# -- record times -------------------------------------------------------------


def _record_block(
    spec: DeckSpec, max_j: int, horizon: int, orientation: str, seed: int, start: int, stop: int
) -> np.ndarray:
    """``T_1..T_max_j`` per trial, each capped at ``horizon``."""
    out = np.empty((stop - start, max_j), dtype=np.int64)
    for k, i in enumerate(range(start, stop)):
        deck = shuffle(spec, trial_rng(seed, i))
        seq = deck.cards if orientation == "bottom-up" else deck.draw_order
        out[k] = record_times(seq[:horizon], max_j)
    return out


def _check_orientation(orientation: str) -> None:
    if orientation not in ("bottom-up", "top-down"):
        raise ValueError(f"unknown orientation {orientation!r}")


def sample_record_times(
    spec: DeckSpec,
    max_j: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    horizon: int | None = None,
    orientation: str = "bottom-up",
    threads: int = 1,
) -> np.ndarray:
    """Array of shape ``(trials, max_j)`` holding ``min(T_j, horizon)``."""
    _check_orientation(orientation)
    if not 1 <= max_j <= spec.m_star - 1:
        raise ValueError(f"max_j must lie in [1, {spec.m_star - 1}]")
    horizon = spec.N if horizon is None else min(spec.N, horizon)
    return run_trials(_record_block, (spec, max_j, horizon, orientation), trials, seed, threads)


def estimate_survival(
    spec: DeckSpec,
    j: int,
    t_grid: Sequence[int],
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    orientation: str = "bottom-up",
    threads: int = 1,
) -> SurvivalCurve:
    """Fraction of shuffles with ``T_j >= t`` at each grid time."""
    _check_orientation(orientation)
    grid = tuple(int(t) for t in t_grid)
    if any(not 0 <= t <= spec.N for t in grid):
        raise ValueError(f"grid times must lie in [0, {spec.N}]")
    if j == 0:
        surv = tuple(1.0 if t == 0 else 0.0 for t in grid)
        return SurvivalCurve(0, grid, surv, "empirical", orientation, trials)
    horizon = max(grid, default=0)
    T = sample_record_times(spec, j, trials, seed, horizon, orientation, threads)[:, j - 1]
    surv = tuple(float(np.count_nonzero(T >= t)) / trials for t in grid)
    return SurvivalCurve(j, grid, surv, "empirical", orientation, trials)


class JointSurvival(NamedTuple):
    joint: float
    product_of_exponentials: float
    stderr: float
    trials: int


def estimate_joint_survival(
    spec: DeckSpec,
    times: Sequence[int],
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> JointSurvival:
    """``P(T_1 >= t_1, ..., T_k >= t_k)`` next to ``prod_j exp(-lambda_j(t_j))``."""
    times = tuple(int(t) for t in times)
    k = len(times)
    if not 1 <= k <= spec.m_star - 1:
        raise ValueError(f"need between 1 and {spec.m_star - 1} times")
    if any(a > b for a, b in zip(times, times[1:])):
        raise ValueError("times must be sorted")
    if any(not 0 <= t <= spec.N for t in times):
        raise ValueError(f"times must lie in [0, {spec.N}]")
    product = math.exp(-math.fsum(lambda_of(spec, j, t) for j, t in enumerate(times, start=1)))
    T = sample_record_times(spec, k, trials, seed, max(times), "bottom-up", threads)
    hit = np.all(T >= np.asarray(times), axis=1)
    p = float(np.count_nonzero(hit)) / trials
    return JointSurvival(p, product, math.sqrt(p * (1 - p) / trials), trials)
