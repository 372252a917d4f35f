"""Complete-feedback guessing under the greedy best and worst strategies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from cardguess.deck import ShuffledDeck

Mode = Literal["best", "worst"]
MODES: tuple[str, ...] = ("best", "worst")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be 'best' or 'worst', got {mode!r}")


@dataclass(frozen=True)
class GameTrace:
    mode: str
    guesses: tuple[int, ...]
    correct: tuple[bool, ...]

    @property
    def score(self) -> int:
        return sum(self.correct)


def greedy_guess(remaining_counts: Mapping[int, int], mode: Mode) -> int:
    """Type with the most (best) or fewest (worst) remaining cards.

    Exhausted types stay in the candidate set for ``worst``; guessing one of
    them is the only way to be certain of a miss.  Ties go to the smallest type.
    """
    _check_mode(mode)
    if not any(c > 0 for c in remaining_counts.values()):
        raise RuntimeError("no cards remain")
    if mode == "best":
        target = max(remaining_counts.values())
    else:
        target = min(remaining_counts.values())
    return min(t for t, c in remaining_counts.items() if c == target)


def play(deck: ShuffledDeck, mode: Mode) -> GameTrace:
    """Reveal the deck from the top, guessing greedily before each card."""
    _check_mode(mode)
    remaining = {i + 1: m for i, m in enumerate(deck.spec.mults)}
    guesses = []
    correct = []
    for card in deck.draw_order.tolist():
        g = greedy_guess(remaining, mode)
        guesses.append(g)
        correct.append(g == card)
        remaining[card] -= 1
    return GameTrace(mode, tuple(guesses), tuple(correct))


def occurrence_ranks(seq: np.ndarray) -> np.ndarray:
    """``r[k]`` = how many times ``seq[k]`` occurs in ``seq[:k + 1]``."""
    seq = np.asarray(seq)
    order = np.argsort(seq, kind="stable")
    s = seq[order]
    idx = np.arange(s.size)
    starts = np.ones(s.size, dtype=bool)
    starts[1:] = s[1:] != s[:-1]
    group_start = np.maximum.accumulate(np.where(starts, idx, 0))
    ranks = np.empty(s.size, dtype=np.int64)
    ranks[order] = idx - group_start + 1
    return ranks


def _leaders(seq: np.ndarray, ranks: np.ndarray, levels: int) -> np.ndarray:
    """``out[j - 1, k]`` = smallest type reaching count ``j`` within ``seq[:k + 1]``."""
    big = np.iinfo(np.int64).max
    out = np.full((levels, seq.size), big, dtype=np.int64)
    rows = ranks - 1
    keep = rows < levels
    out[rows[keep], np.nonzero(keep)[0]] = seq[keep]
    np.minimum.accumulate(out, axis=1, out=out)
    return out


def best_score(cards: np.ndarray, m_star: int) -> int:
    """Greedy best score of a bottom-up deck, equal to ``play(deck, 'best').score``.

    When ``k`` cards remain they are exactly ``cards[:k]``; the guess is the
    smallest type holding the maximal count there.
    """
    cards = np.asarray(cards)
    ranks = occurrence_ranks(cards)
    level = np.maximum.accumulate(ranks)
    guess = _leaders(cards, ranks, m_star)[level - 1, np.arange(cards.size)]
    return int(np.count_nonzero(guess == cards))


def worst_score_even(drawn: np.ndarray, m: int) -> int:
    """Greedy worst score on an even deck from a top-down prefix of the draw order.

    With equal multiplicities the fewest-remaining types are those drawn most
    often so far.  Once a type is exhausted every later guess misses, so the
    prefix only has to reach the first card completing a type.
    """
    drawn = np.asarray(drawn)
    ranks = occurrence_ranks(drawn)
    done = np.flatnonzero(ranks == m)
    if done.size:
        stop = int(done[0]) + 1
        drawn, ranks = drawn[:stop], ranks[:stop]
    level = np.maximum.accumulate(ranks)
    leaders = _leaders(drawn, ranks, m)
    guess = np.empty(drawn.size, dtype=np.int64)
    guess[0] = 1
    guess[1:] = leaders[level[:-1] - 1, np.arange(drawn.size - 1)]
    return int(np.count_nonzero(guess == drawn))


def fast_score(deck: ShuffledDeck, mode: Mode) -> int:
    """Score of :func:`play` without building a trace."""
    _check_mode(mode)
    if mode == "best":
        return best_score(deck.cards, deck.spec.m_star)
    if deck.spec.is_even:
        return worst_score_even(deck.draw_order, deck.spec.m_star)
    return play(deck, mode).score
