"""Closed-form approximations of the expected greedy scores and exact summation identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from cardguess.birthday import SurvivalCurve
from cardguess.deck import DeckSpec, beta_j, gamma_j


class UnsupportedDeckError(ValueError):
    """The worst-strategy formulas only cover decks with equal multiplicities."""


def harmonic(k: int) -> float:
    """``H_k = 1 + 1/2 + ... + 1/k`` with ``H_0 = 0``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return math.fsum(1.0 / i for i in range(1, k + 1))


# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function for ``x > 0``."""
    if x <= 0:
        raise ValueError(f"gamma_fn is defined here for x > 0, got {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


@dataclass(frozen=True)
class ApproxReport:
    value: float
    terms: tuple[tuple[int, float], ...]
    leading: float = 0.0
    error_order: str = ""


def approx_best(spec: DeckSpec) -> ApproxReport:
    """``H_{m*} H_n + sum_{j=1}^{m*} ln gamma_j``."""
    m_star = spec.m_star
    leading = harmonic(m_star) * harmonic(spec.n)
    terms = tuple((j, math.log(gamma_j(spec, j))) for j in range(1, m_star + 1))
    value = leading + math.fsum(v for _, v in terms)
    return ApproxReport(value, terms, leading, f"ln n (ln n / n)^(1/{m_star})")


def approx_best_beta_form(spec: DeckSpec) -> float:
    """``H_{m*} H_n + m* ln m + sum_j ln(beta_j) / j``; algebraically equal to :func:`approx_best` on even decks."""
    m_star = spec.m_star
    m = float(spec.m_avg)
    return (
        harmonic(m_star) * harmonic(spec.n)
        + m_star * math.log(m)
        + math.fsum(math.log(beta_j(spec, j)) / j for j in range(1, m_star + 1))
    )


def approx_best_leading(spec: DeckSpec) -> float:
    """The earlier leading-order estimate ``H_m ln n``."""
    return harmonic(spec.m_star) * math.log(spec.n)


def approx_worst(spec: DeckSpec, all_terms: bool = False) -> ApproxReport:
    """``sum_j Gamma((j+1)/j) / (gamma_j n^(1/j))``.

    The default range is ``j = floor(m/2)+1 .. m``; ``all_terms`` starts at ``j = 1``.
    """
    if not spec.is_even:
        raise UnsupportedDeckError("the worst-strategy approximation needs an even deck")
    m, n = spec.m_star, spec.n
    start = 1 if all_terms else m // 2 + 1
    terms = tuple(
        (j, gamma_fn((j + 1) / j) / (gamma_j(spec, j) * n ** (1.0 / j))) for j in range(start, m + 1)
    )
    value = math.fsum(v for _, v in terms)
    return ApproxReport(value, terms, 0.0, f"n^(-2/{m}) log^2 n")


def _curves_by_j(curves: Sequence[SurvivalCurve], count: int, times: range) -> list[SurvivalCurve]:
    by_j = {c.j: c for c in curves}
    if sorted(by_j) != list(range(count)):
        raise ValueError(f"expected one curve for each j = 0..{count - 1}")
    for c in by_j.values():
        if c.times != tuple(times):
            raise ValueError(f"curve j={c.j} must cover t = {times.start}..{times.stop - 1}")
    return [by_j[j] for j in range(count)]


def best_from_survival(spec: DeckSpec, curves: Sequence[SurvivalCurve]) -> float:
    """``sum_{j=0}^{m*-1} sum_{t=1}^{N} (1 - P(T_j >= t)) / t``."""
    N = spec.N
    ordered = _curves_by_j(curves, spec.m_star, range(1, N + 1))
    return math.fsum((1.0 - p) / t for c in ordered for t, p in zip(c.times, c.survival))


def best_from_record_laws(spec: DeckSpec, laws: Mapping[int, Mapping[int, float]]) -> float:
    """``m* H_N - sum_{j=1}^{m*-1} E[H_{T_j}]`` from the laws ``{j: {s: P(T_j = s)}}``."""
    N, m_star = spec.N, spec.m_star
    h = [0.0]
    for i in range(1, N + 1):
        h.append(h[-1] + 1.0 / i)
    expected = []
    for j in range(1, m_star):
        expected.append(math.fsum(float(p) * h[s] for s, p in laws[j].items()))
    return m_star * harmonic(N) - math.fsum(expected)


def worst_from_survival(spec: DeckSpec, curves: Sequence[SurvivalCurve]) -> float:
    """``sum_{j=0}^{m-1} sum_{t=0}^{nm-1} P(T_j >= t) / (nm - t)`` with ``T_j`` read top-down.

    Empirical curves must be top-down; exact and approximate curves describe
    the law, which does not depend on the reading direction.
    """
    if not spec.is_even:
        raise UnsupportedDeckError("the worst-strategy sum needs an even deck")
    N = spec.N
    ordered = _curves_by_j(curves, spec.m_star, range(0, N))
    for c in ordered:
        if c.source == "empirical" and c.orientation != "top-down":
            raise ValueError("empirical curves for the worst strategy must be read top-down")
    return math.fsum(p / (N - t) for c in ordered for t, p in zip(c.times, c.survival))
