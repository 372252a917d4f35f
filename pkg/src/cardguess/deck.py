"""Deck multiplicities, balance statistics and seeded shuffling.

Card types are labelled ``1..n``.  A shuffled deck stores the sequence of types
from the bottom of the deck upwards, so ``cards[0]`` is the last card dealt.
Use :attr:`ShuffledDeck.draw_order` for the order in which cards are revealed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class DeckSpec:
    """Multiplicity vector ``(m_1, ..., m_n)`` of a deck."""

    mults: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.mults) == 0:
            raise ValueError("a deck needs at least one card type")
        for m in self.mults:
            if isinstance(m, bool) or int(m) != m or m < 1:
                raise ValueError(f"multiplicities must be positive integers, got {m!r}")
        object.__setattr__(self, "mults", tuple(int(m) for m in self.mults))

    @classmethod
    def even(cls, m: int, n: int) -> "DeckSpec":
        """The deck ``m * 1_n``: ``n`` types with ``m`` cards each."""
        if n < 1:
            raise ValueError("n must be at least 1")
        return cls((m,) * n)

    @property
    def n(self) -> int:
        return len(self.mults)

    @property
    def N(self) -> int:
        return sum(self.mults)

    @property
    def m_star(self) -> int:
        return max(self.mults)

    @property
    def m_avg(self) -> Fraction:
        return Fraction(self.N, self.n)

    @property
    def is_even(self) -> bool:
        return len(set(self.mults)) == 1

    def label(self) -> str:
        """Short text form: ``3x100`` for even decks, ``2;4`` otherwise."""
        if self.is_even:
            return f"{self.mults[0]}x{self.n}"
        return ";".join(str(m) for m in self.mults)

    def expanded(self) -> np.ndarray:
        """Cards in sorted order, e.g. ``(2, 1)`` gives ``[1, 1, 2]``."""
        return np.repeat(np.arange(1, self.n + 1, dtype=np.int64), self.mults)


def new_spec(mults: Iterable[int]) -> DeckSpec:
    return DeckSpec(tuple(mults))


def _check_j(spec: DeckSpec, j: int) -> None:
    if not 1 <= j <= spec.m_star:
        raise ValueError(f"j must lie in [1, {spec.m_star}], got {j}")


def binomial_average(spec: DeckSpec, j: int) -> Fraction:
    """Exact ``(1/n) * sum_i C(m_i, j)``."""
    return Fraction(sum(math.comb(m, j) for m in spec.mults), spec.n)


def gamma_j(spec: DeckSpec, j: int) -> float:
    """j-th root of the average of ``C(m_i, j)`` over types."""
    _check_j(spec, j)
    return float(binomial_average(spec, j)) ** (1.0 / j)


def beta_j(spec: DeckSpec, j: int) -> float:
    """Average of ``C(m_i, j) / m^j`` where ``m`` is the mean multiplicity."""
    _check_j(spec, j)
    return float(binomial_average(spec, j) / spec.m_avg**j)


@dataclass(frozen=True)
class ShuffledDeck:
    """One arrangement of a deck, listed from the bottom card to the top card."""

    spec: DeckSpec
    cards: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        cards = np.asarray(self.cards, dtype=np.int64)
        if cards.ndim != 1 or cards.size != self.spec.N:
            raise ValueError(f"expected {self.spec.N} cards, got shape {cards.shape}")
        counts = np.bincount(cards, minlength=self.spec.n + 1)
        if counts.size != self.spec.n + 1 or counts[0] != 0:
            raise ValueError("card types must lie in 1..n")
        if tuple(counts[1:].tolist()) != self.spec.mults:
            raise ValueError("cards do not match the deck multiplicities")
        cards.setflags(write=False)
        object.__setattr__(self, "cards", cards)

    @classmethod
    def from_cards(cls, cards: Sequence[int], spec: DeckSpec | None = None) -> "ShuffledDeck":
        """Build from a bottom-up sequence; the DeckSpec is inferred when omitted."""
        if spec is None:
            spec = DeckSpec(tuple(np.bincount(np.asarray(cards), minlength=max(cards) + 1)[1:].tolist()))
        return cls(spec, np.asarray(cards))

    @classmethod
    def from_draw_order(cls, order: Sequence[int], spec: DeckSpec | None = None) -> "ShuffledDeck":
        """Build from the order in which cards are revealed (top card first)."""
        return cls.from_cards(list(order)[::-1], spec)

    @property
    def draw_order(self) -> np.ndarray:
        return self.cards[::-1]

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.cards.tolist())


def trial_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Independent stream for trial ``index`` under master ``seed``.

    Streams come from a counter-based Philox generator keyed by the seed
    sequence ``(seed, index)``, so any trial can be regenerated on its own.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def shuffle(spec: DeckSpec, rng: np.random.Generator) -> ShuffledDeck:
    """Uniformly random arrangement of the deck (Fisher-Yates on the expanded cards)."""
    cards = spec.expanded()
    rng.shuffle(cards)
    return ShuffledDeck(spec, cards)
