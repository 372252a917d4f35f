"""Record times ``T_j``, tuple counts ``W_j(t)`` and their Poisson-type approximations.

``T_j`` is the largest ``t`` such that no type occurs more than ``j`` times in
the first ``t`` cards, and ``W_j(t)`` counts the ``(j+1)``-subsets of the first
``t`` positions holding a single type, so ``W_j(t) == 0`` exactly when
``T_j >= t``.  Positions are read bottom-up by default; pass
``orientation="top-down"`` to read in draw order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from cardguess.deck import DeckSpec, ShuffledDeck, beta_j
from cardguess.game import occurrence_ranks

Orientation = Literal["bottom-up", "top-down"]
ORIENTATIONS: tuple[str, ...] = ("bottom-up", "top-down")
SOURCES: tuple[str, ...] = ("empirical", "exact", "approx")


@dataclass(frozen=True)
class SurvivalCurve:
    """``P(T_j >= t)`` on a grid of times."""

    j: int
    times: tuple[int, ...]
    survival: tuple[float, ...]
    source: str
    orientation: str = "bottom-up"
    trials: int | None = None

    def __post_init__(self) -> None:
        if len(self.times) != len(self.survival):
            raise ValueError("times and survival must have equal length")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {self.orientation!r}")

    def at(self, t: int) -> float:
        return self.survival[self.times.index(t)]

    def stderr(self) -> tuple[float, ...]:
        """Binomial standard errors of an empirical curve."""
        if self.trials is None:
            raise ValueError("only empirical curves carry a trial count")
        return tuple(math.sqrt(p * (1 - p) / self.trials) for p in self.survival)


def _sequence(deck: ShuffledDeck, orientation: str) -> np.ndarray:
    if orientation == "bottom-up":
        return deck.cards
    if orientation == "top-down":
        return deck.draw_order
    raise ValueError(f"unknown orientation {orientation!r}")


def _check_record_j(spec: DeckSpec, j: int, allow_zero: bool = False) -> None:
    lo = 0 if allow_zero else 1
    if not lo <= j <= spec.m_star - 1:
        raise ValueError(f"j must lie in [{lo}, {spec.m_star - 1}], got {j}")


def record_times(seq: np.ndarray, max_j: int) -> np.ndarray:
    """``out[j - 1]`` = ``T_j`` of the sequence, for ``j = 1..max_j``."""
    seq = np.asarray(seq)
    ranks = occurrence_ranks(seq)
    out = np.full(max_j, seq.size, dtype=np.int64)
    # first position where some type reaches j + 1 occurrences
    running = np.maximum.accumulate(ranks)
    for j in range(1, max_j + 1):
        hit = np.searchsorted(running, j + 1)
        if hit < seq.size:
            out[j - 1] = hit
    return out


def compute_T(deck: ShuffledDeck, j: int, orientation: Orientation = "bottom-up") -> int:
    """Record time ``T_j``; ``T_0`` is 0 by convention."""
    _check_record_j(deck.spec, j, allow_zero=True)
    if j == 0:
        return 0
    return int(record_times(_sequence(deck, orientation), j)[j - 1])


def count_W(deck: ShuffledDeck, j: int, t: int, orientation: Orientation = "bottom-up") -> int:
    """Number of same-type ``(j+1)``-subsets among the first ``t`` positions."""
    if not 0 <= t <= deck.spec.N:
        raise ValueError(f"t must lie in [0, {deck.spec.N}], got {t}")
    if j < 1:
        raise ValueError(f"j must be at least 1, got {j}")
    counts = np.bincount(_sequence(deck, orientation)[:t])
    return sum(math.comb(int(c), j + 1) for c in counts if c > j)


def lambda_of(spec: DeckSpec, j: int, t: float) -> float:
    """Poisson mean ``t^(j+1) * beta_(j+1) / n^j``."""
    _check_record_j(spec, j)
    if t < 0:
        raise ValueError("t must be non-negative")
    return t ** (j + 1) * beta_j(spec, j + 1) / spec.n**j


def t_for_lambda(spec: DeckSpec, j: int, lam: float) -> float:
    """Real ``t`` at which :func:`lambda_of` equals ``lam``."""
    _check_record_j(spec, j)
    return (lam * spec.n**j / beta_j(spec, j + 1)) ** (1.0 / (j + 1))


def survival_approx(spec: DeckSpec, j: int, t: float) -> tuple[float, float]:
    """``(exp(-lambda), t / n)``: the approximation of ``P(T_j >= t)`` and its error scale.

    The error is of order ``t / n`` with an unspecified constant, so only the
    ratio itself is returned.
    """
    return math.exp(-lambda_of(spec, j, t)), t / spec.n


def approx_survival_curve(
    spec: DeckSpec, j: int, times: Sequence[int], orientation: Orientation = "bottom-up"
) -> SurvivalCurve:
    """``exp(-lambda)`` curve; for ``j = 0`` the exact law of ``T_0 = 0``."""
    times = tuple(times)
    if j == 0:
        surv = tuple(1.0 if t <= 0 else 0.0 for t in times)
    else:
        _check_record_j(spec, j)
        t = np.asarray(times, dtype=np.float64)
        lam = t ** (j + 1) * beta_j(spec, j + 1) / spec.n**j
        surv = tuple(np.exp(-lam).tolist())
    return SurvivalCurve(j, times, surv, "approx", orientation)


def _falling(x: int, k: int) -> int:
    return math.prod(range(x - k + 1, x + 1)) if k <= x else 0


def exact_mean_W(spec: DeckSpec, j: int, t: int) -> Fraction:
    """``E[W_j(t)] = C(t, j+1) * sum_i m_i^(j+1) / N^(j+1)`` with falling factorials."""
    _check_record_j(spec, j)
    if not 0 <= t <= spec.N:
        raise ValueError(f"t must lie in [0, {spec.N}], got {t}")
    k = j + 1
    hits = sum(_falling(m, k) for m in spec.mults)
    return Fraction(math.comb(t, k) * hits, _falling(spec.N, k))


def tuple_bound(spec: DeckSpec, j: int) -> int:
    """Most ``(j+1)``-tuples a single type can contribute: ``C(m*, j+1)``."""
    return math.comb(spec.m_star, j + 1)


def chernoff_tail(spec: DeckSpec, j: int, t: int, x: float) -> float:
    """``exp(-x^2 / (2 c E[W_j(t)]))`` with ``c = C(m*, j+1)``.

    Upper bound on ``P(W_j(t) <= E[W_j(t)] - x)``, hence on ``P(T_j >= t)``.
    """
    mean = float(exact_mean_W(spec, j, t))
    if mean <= 0:
        raise ValueError("E[W_j(t)] is zero; the bound is undefined")
    if not 0 <= x < mean:
        raise ValueError(f"x must lie in [0, {mean}), got {x}")
    return math.exp(-(x * x) / (2 * tuple_bound(spec, j) * mean))


def survival_upper_bound(spec: DeckSpec, j: int, t: int) -> float:
    """``P(T_j >= t) <= exp(-E[W_j(t)] / (2c))``, the limit of :func:`chernoff_tail` as ``x -> E[W]``."""
    mean = float(exact_mean_W(spec, j, t))
    if mean <= 0:
        return 1.0
    return math.exp(-mean / (2 * tuple_bound(spec, j)))


def lambda_tail_bound(spec: DeckSpec, j: int, t: float, C: float = 1.0, C_prime: float = 0.5) -> float:
    """``C * exp(-C' * lambda)``; the constants exist but are not explicit, so callers choose them."""
    if C <= 0 or C_prime <= 0:
        raise ValueError("C and C' must be positive")
    return min(1.0, C * math.exp(-C_prime * lambda_of(spec, j, t)))
