"""Coupling a deck with a copy conditioned on a set of positions sharing one type.

Given positions ``s``, the coupled deck:

1. picks a type ``I`` with ``P(I = i)`` proportional to the falling factorial
   ``m_i (m_i - 1) ... (m_i - |s| + 1)``, which is the law of the common type
   given that all cards at ``s`` agree;
2. picks ``s*`` uniformly among the ``|s|``-subsets of the positions of type ``I``;
3. moves the cards at ``s - s*`` into ``s* - s`` in order, and fills
   ``s - s*`` with the displaced type-``I`` cards.

Positions are 1-based and counted bottom-up.  Drawing ``s`` uniformly inside
``{1..t}`` gives a size-bias coupling ``(W, W*)`` of ``W_j(t)`` with
``W* <= W + C(m*, j+1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from cardguess.birthday import count_W
from cardguess.deck import DeckSpec, ShuffledDeck


class ImpossibleEventError(ValueError):
    """No type has enough cards to fill every conditioned position."""


@dataclass(frozen=True)
class CouplingRecord:
    original: ShuffledDeck
    positions_s: tuple[int, ...]
    chosen_type: int
    positions_s_star: tuple[int, ...]
    coupled: ShuffledDeck


def type_weights(spec: DeckSpec, size: int) -> np.ndarray:
    """Unnormalised ``P(I = i)``: falling factorials ``m_i^(size)``, index ``i - 1``."""
    w = np.ones(spec.n, dtype=np.float64)
    mults = np.asarray(spec.mults)
    for r in range(size):
        w *= np.maximum(mults - r, 0)
    return w


def _check_positions(spec: DeckSpec, s: Sequence[int]) -> tuple[int, ...]:
    s = tuple(sorted(int(p) for p in s))
    if len(set(s)) != len(s):
        raise ValueError("positions must be distinct")
    if s and (s[0] < 1 or s[-1] > spec.N):
        raise ValueError(f"positions must lie in 1..{spec.N}")
    if len(s) > spec.m_star:
        raise ImpossibleEventError(f"no type has {len(s)} cards")
    return s


def couple_sequence(seq: Sequence[int], s: Sequence[int], s_star: Sequence[int]) -> tuple[int, ...]:
    """Step 3 on a plain sequence: cards at ``s - s*`` go to ``s* - s`` in order."""
    if len(s) != len(s_star):
        raise ValueError("s and s* must have equal size")
    out = list(seq)
    src = [p for p in sorted(s) if p not in s_star]
    dst = [p for p in sorted(s_star) if p not in s]
    for a, b in zip(src, dst):
        out[b - 1] = seq[a - 1]
        out[a - 1] = seq[b - 1]
    return tuple(out)


def apply_coupling(deck: ShuffledDeck, s: Sequence[int], s_star: Sequence[int]) -> ShuffledDeck:
    return ShuffledDeck(deck.spec, couple_sequence(deck.as_tuple(), s, s_star))


def couple_deck(deck: ShuffledDeck, s: Sequence[int], rng: np.random.Generator) -> CouplingRecord:
    spec = deck.spec
    s = _check_positions(spec, s)
    weights = type_weights(spec, len(s))
    chosen = int(rng.choice(spec.n, p=weights / weights.sum())) + 1
    where = np.flatnonzero(deck.cards == chosen) + 1
    s_star = tuple(sorted(int(p) for p in rng.choice(where, size=len(s), replace=False)))
    coupled = apply_coupling(deck, s, s_star)
    return CouplingRecord(deck, s, chosen, s_star, coupled)


def size_bias_pair(deck: ShuffledDeck, j: int, t: int, rng: np.random.Generator) -> tuple[int, int]:
    """``(W_j(t), W_j(t)*)`` with ``s'`` uniform among the ``(j+1)``-subsets of ``{1..t}``."""
    if t < j + 1:
        raise ValueError(f"t must be at least j + 1 = {j + 1}")
    s_prime = np.sort(rng.choice(t, size=j + 1, replace=False)) + 1
    record = couple_deck(deck, s_prime.tolist(), rng)
    return count_W(deck, j, t), count_W(record.coupled, j, t)


def couple_rows(decks: np.ndarray, s: np.ndarray, s_star: np.ndarray) -> np.ndarray:
    """Row-wise :func:`couple_sequence` on a ``(B, N)`` array with ``(B, k)`` position arrays."""
    s = np.sort(s, axis=1)
    s_star = np.sort(s_star, axis=1)
    only_s = ~(s[:, :, None] == s_star[:, None, :]).any(axis=2)
    only_star = ~(s_star[:, :, None] == s[:, None, :]).any(axis=2)
    # unmatched positions first, ascending; shared ones pushed to the end
    big = decks.shape[1] + 1
    src = np.sort(np.where(only_s, s, big), axis=1)
    dst = np.sort(np.where(only_star, s_star, big), axis=1)
    out = decks.copy()
    rows = np.arange(decks.shape[0])
    for c in range(s.shape[1]):
        live = src[:, c] < big
        r, a, b = rows[live], src[live, c] - 1, dst[live, c] - 1
        out[r, b] = decks[r, a]
        out[r, a] = decks[r, b]
    return out


def size_bias_batch(
    spec: DeckSpec, j: int, t: int, samples: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """``samples`` independent draws of :func:`size_bias_pair`, vectorised over shuffles."""
    k = j + 1
    if t < k:
        raise ValueError(f"t must be at least j + 1 = {k}")
    if k > spec.m_star:
        raise ImpossibleEventError(f"no type has {k} cards")
    decks = rng.permuted(np.tile(spec.expanded(), (samples, 1)), axis=1)
    s = np.argsort(rng.random((samples, t)), axis=1)[:, :k] + 1
    weights = type_weights(spec, k)
    chosen = rng.choice(spec.n, size=samples, p=weights / weights.sum()) + 1
    # uniform k-subset of the chosen type's positions: smallest random keys win
    keys = np.where(decks == chosen[:, None], rng.random(decks.shape), 2.0)
    s_star = np.argsort(keys, axis=1)[:, :k] + 1
    coupled = couple_rows(decks, s, s_star)
    table = np.array([math.comb(c, k) for c in range(spec.m_star + 1)], dtype=np.int64)

    def tuples(z: np.ndarray) -> np.ndarray:
        counts = (z[:, :t, None] == np.arange(1, spec.n + 1)).sum(axis=1)
        return table[counts].sum(axis=1)

    return tuples(decks), tuples(coupled)
