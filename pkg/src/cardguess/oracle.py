"""Exact small-instance answers: greedy scores, record-time laws, tuple-count laws.

Expected scores come from a recursion over remaining-count states.  Types
sharing a multiplicity are interchangeable, so a state only records how many
types of each multiplicity have ``c`` cards left.  Record-time and tuple-count
laws use multivariate hypergeometric weights over prefix count vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from cardguess.birthday import SurvivalCurve, _check_record_j
from cardguess.coupling import ImpossibleEventError, couple_sequence
from cardguess.deck import DeckSpec
from cardguess.game import _check_mode

MAX_STATES = 10**7
MAX_ENUMERATION = 8


class CapacityError(RuntimeError):
    """The exact computation would exceed its state-space guard."""


@dataclass(frozen=True)
class Pmf:
    """Finite law on non-negative integers.

    When ``tail_from`` is set, the last support point stands for every value
    ``>= tail_from``.
    """

    support: tuple[int, ...]
    probs: tuple[float | Fraction, ...]
    tail_from: int | None = None

    def __post_init__(self) -> None:
        if len(self.support) != len(self.probs):
            raise ValueError("support and probs must have equal length")
        if any(p < 0 for p in self.probs):
            raise ValueError("probabilities must be non-negative")
        if abs(float(sum(self.probs)) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {float(sum(self.probs))}, not 1")

    def as_dict(self) -> dict[int, float | Fraction]:
        return dict(zip(self.support, self.probs))

    def mean(self) -> float | Fraction:
        return sum(k * p for k, p in zip(self.support, self.probs))


# -- enumeration ------------------------------------------------------------


def arrangements(spec: DeckSpec) -> Iterator[tuple[int, ...]]:
    """Every distinct arrangement of the deck, each once."""
    remaining = list(spec.mults)
    seq: list[int] = []

    def rec() -> Iterator[tuple[int, ...]]:
        if len(seq) == spec.N:
            yield tuple(seq)
            return
        for i, c in enumerate(remaining):
            if c:
                remaining[i] -= 1
                seq.append(i + 1)
                yield from rec()
                seq.pop()
                remaining[i] += 1

    return rec()


def count_arrangements(spec: DeckSpec) -> int:
    out = math.factorial(spec.N)
    for m in spec.mults:
        out //= math.factorial(m)
    return out


# -- expected scores ----------------------------------------------------------


def _score_groups(spec: DeckSpec) -> list[tuple[int, int]]:
    groups: dict[int, int] = {}
    for m in spec.mults:
        groups[m] = groups.get(m, 0) + 1
    return sorted(groups.items())


def count_score_states(spec: DeckSpec) -> int:
    return math.prod(math.comb(k + m, m) for m, k in _score_groups(spec))


def exact_score_dp(spec: DeckSpec, mode: str, exact: bool = True, max_states: int = MAX_STATES):
    """Expected greedy score, as a :class:`~fractions.Fraction` unless ``exact=False``.

    ``E(c) = extremal_g c_g / R + sum_i (c_i / R) E(c - e_i)`` where ``R`` is the
    number of cards left and the extremum runs over all types (exhausted ones
    included for ``worst``).
    """
    _check_mode(mode)
    if count_score_states(spec) > max_states:
        raise CapacityError(f"{count_score_states(spec)} states exceed the guard of {max_states}")
    groups = _score_groups(spec)
    start = tuple(tuple(k if c == m else 0 for c in range(m + 1)) for m, k in groups)
    one = Fraction(1) if exact else 1.0

    layers: list[set] = [set() for _ in range(spec.N + 1)]
    layers[spec.N].add(start)
    for R in range(spec.N, 0, -1):
        for state in layers[R]:
            for nxt, _ in _moves(state):
                layers[R - 1].add(nxt)

    value: dict = {state: 0 * one for state in layers[0]}
    for R in range(1, spec.N + 1):
        for state in layers[R]:
            present = [c for hist in state for c, h in enumerate(hist) if h]
            ext = max(present) if mode == "best" else min(present)
            acc = ext * one
            for nxt, w in _moves(state):
                acc += w * value[nxt]
            value[state] = acc / R
    return value[start]


def _moves(state):
    """Successor states and their weights ``(#types with c left) * c``."""
    for g, hist in enumerate(state):
        for c in range(1, len(hist)):
            h = hist[c]
            if h:
                new = list(hist)
                new[c] -= 1
                new[c - 1] += 1
                yield state[:g] + (tuple(new),) + state[g + 1 :], h * c


# -- record times and tuple counts ------------------------------------------


def _capped_polynomial(spec: DeckSpec, j: int) -> list[int]:
    """Coefficients of ``prod_i sum_{k <= min(j, m_i)} C(m_i, k) x^k``."""
    poly = [1]
    for m in spec.mults:
        factor = [math.comb(m, k) for k in range(min(j, m) + 1)]
        out = [0] * (len(poly) + len(factor) - 1)
        for a, pa in enumerate(poly):
            for b, fb in enumerate(factor):
                out[a + b] += pa * fb
        poly = out
    return poly


def _survival_all(spec: DeckSpec, j: int) -> list[Fraction]:
    poly = _capped_polynomial(spec, j)
    N = spec.N
    return [Fraction(poly[t] if t < len(poly) else 0, math.comb(N, t)) for t in range(N + 1)]


def exact_survival(spec: DeckSpec, j: int, t: int) -> Fraction:
    """``P(T_j >= t)``: no type occurs more than ``j`` times among ``t`` uniformly drawn cards."""
    _check_record_j(spec, j, allow_zero=True)
    if not 0 <= t <= spec.N:
        raise ValueError(f"t must lie in [0, {spec.N}], got {t}")
    if j == 0:
        return Fraction(1 if t == 0 else 0)
    return _survival_all(spec, j)[t]


def exact_survival_curve(
    spec: DeckSpec, j: int, times: Sequence[int], orientation: str = "bottom-up"
) -> SurvivalCurve:
    _check_record_j(spec, j, allow_zero=True)
    if j == 0:
        surv = [1.0 if t == 0 else 0.0 for t in times]
    else:
        table = _survival_all(spec, j)
        surv = [float(table[t]) for t in times]
    return SurvivalCurve(j, tuple(times), tuple(surv), "exact", orientation)


def exact_T_law(spec: DeckSpec, j: int) -> dict[int, Fraction]:
    """``{s: P(T_j = s)}`` over ``s = 0..N``, zero-probability points dropped."""
    _check_record_j(spec, j, allow_zero=True)
    if j == 0:
        return {0: Fraction(1)}
    surv = _survival_all(spec, j) + [Fraction(0)]
    return {s: surv[s] - surv[s + 1] for s in range(spec.N + 1) if surv[s] != surv[s + 1]}


def exact_W_pmf(spec: DeckSpec, j: int, t: int, max_states: int = MAX_STATES) -> Pmf:
    """Law of ``W_j(t)`` from the prefix count vector: ``W = sum_i C(count_i, j+1)``."""
    _check_record_j(spec, j)
    if not 0 <= t <= spec.N:
        raise ValueError(f"t must lie in [0, {spec.N}], got {t}")
    ways: dict[tuple[int, int], int] = {(0, 0): 1}
    for m in spec.mults:
        nxt: dict[tuple[int, int], int] = {}
        for (used, w), cnt in ways.items():
            for k in range(min(m, t - used) + 1):
                key = (used + k, w + math.comb(k, j + 1))
                nxt[key] = nxt.get(key, 0) + cnt * math.comb(m, k)
        ways = nxt
        if len(ways) > max_states:
            raise CapacityError("tuple-count law exceeds the state guard")
    total = math.comb(spec.N, t)
    law: dict[int, int] = {}
    for (used, w), cnt in ways.items():
        if used == t:
            law[w] = law.get(w, 0) + cnt
    support = tuple(sorted(law))
    return Pmf(support, tuple(Fraction(law[w], total) for w in support))


# -- Poisson and total variation ----------------------------------------------


def poisson_pmf(lam: float, k_max: int) -> Pmf:
    """Poisson probabilities for ``0..k_max``, the remaining mass in a bucket ``k_max + 1``."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    if lam == 0:
        return Pmf((0,), (1.0,))
    probs = []
    p = math.exp(-lam)
    for k in range(k_max + 1):
        probs.append(p)
        p *= lam / (k + 1)
    tail = max(0.0, 1.0 - math.fsum(probs))
    return Pmf(tuple(range(k_max + 2)), tuple(probs) + (tail,), tail_from=k_max + 1)


def _folded(p: Pmf, cut: int | None) -> dict[int, float | Fraction]:
    out: dict[int, float | Fraction] = {}
    for k, v in zip(p.support, p.probs):
        key = k if cut is None or k < cut else cut
        out[key] = out.get(key, 0) + v
    return out


def tv_distance(p: Pmf, q: Pmf) -> float | Fraction:
    """Half the l1 distance; mass beyond a tail bucket is pooled on both sides."""
    cuts = [c for c in (p.tail_from, q.tail_from) if c is not None]
    cut = min(cuts) if cuts else None
    a, b = _folded(p, cut), _folded(q, cut)
    return sum(abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)) / 2


# -- coupling law -----------------------------------------------------------


def _falling(x: int, k: int) -> int:
    return math.prod(range(x - k + 1, x + 1)) if k <= x else 0


def exact_coupling_law(
    spec: DeckSpec, s: Sequence[int], max_cards: int = MAX_ENUMERATION
) -> tuple[dict[tuple[int, ...], Fraction], dict[tuple[int, ...], Fraction]]:
    """Exact law of the coupled deck and of the deck conditioned on ``s`` sharing a type."""
    if spec.N > max_cards:
        raise CapacityError(f"enumeration is limited to N <= {max_cards}")
    s = tuple(sorted(s))
    k = len(s)
    valid = [i + 1 for i, m in enumerate(spec.mults) if m >= k]
    if not valid:
        raise ImpossibleEventError(f"no type has {k} cards")
    ff = {i: _falling(spec.mults[i - 1], k) for i in valid}
    lcm = math.lcm(*(math.comb(spec.mults[i - 1], k) for i in valid))
    share = {i: ff[i] * (lcm // math.comb(spec.mults[i - 1], k)) for i in valid}

    coupled: dict[tuple[int, ...], int] = {}
    conditional: dict[tuple[int, ...], int] = {}
    n_arr = 0
    for z in arrangements(spec):
        n_arr += 1
        if len({z[p - 1] for p in s}) == 1:
            conditional[z] = 1
        for i in valid:
            where = [p + 1 for p, v in enumerate(z) if v == i]
            for s_star in itertools.combinations(where, k):
                out = couple_sequence(z, s, s_star)
                coupled[out] = coupled.get(out, 0) + share[i]
    total = n_arr * sum(ff.values()) * lcm
    n_cond = len(conditional)
    return (
        {d: Fraction(w, total) for d, w in coupled.items()},
        {d: Fraction(1, n_cond) for d in conditional},
    )


def law_tv(p: dict, q: dict) -> Fraction:
    return sum(abs(p.get(k, 0) - q.get(k, 0)) for k in set(p) | set(q)) / 2
