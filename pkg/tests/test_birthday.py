import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cardguess.birthday import (
    approx_survival_curve,
    chernoff_tail,
    compute_T,
    count_W,
    exact_mean_W,
    lambda_of,
    lambda_tail_bound,
    survival_approx,
    survival_upper_bound,
    t_for_lambda,
)
from cardguess.deck import DeckSpec, ShuffledDeck, new_spec, shuffle, trial_rng
from cardguess.montecarlo import estimate_survival
from cardguess.oracle import exact_survival


def brute_W(cards, j, t):
    return sum(1 for s in itertools.combinations(range(t), j + 1) if len({cards[p] for p in s}) == 1)


@pytest.mark.parametrize(
    "cards, j, expected",
    [((1, 2, 2, 1), 1, 2), ((1, 2, 1, 2, 2, 1), 2, 4), ((1, 1, 1), 1, 1)],
)
def test_compute_T(cards, j, expected):
    assert compute_T(ShuffledDeck.from_cards(cards), j) == expected


def test_compute_T_orientation_and_domain():
    deck = ShuffledDeck.from_cards((1, 2, 1, 2, 2, 1))
    assert compute_T(deck, 1, "top-down") == 2
    assert compute_T(deck, 0) == 0
    with pytest.raises(ValueError):
        compute_T(deck, 3)


def test_compute_T_without_violation():
    deck = ShuffledDeck.from_cards((1, 2, 3, 1, 2, 3))
    assert compute_T(deck, 1) == 3


@pytest.mark.parametrize(
    "cards, j, t, expected",
    [((1, 1, 2, 2), 1, 4, 2), ((1, 2, 1, 2), 1, 3, 1), ((1, 1, 1, 2), 2, 2, 0), ((1, 1, 1, 2), 1, 1, 0)],
)
def test_count_W(cards, j, t, expected):
    assert count_W(ShuffledDeck.from_cards(cards), j, t) == expected


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=5), st.integers(0, 2**32), st.data())
def test_W_zero_iff_T_at_least_t(mults, seed, data):
    spec = new_spec(mults)
    if spec.m_star < 2:
        return
    deck = shuffle(spec, trial_rng(seed))
    j = data.draw(st.integers(1, spec.m_star - 1))
    t = data.draw(st.integers(0, spec.N))
    w = count_W(deck, j, t)
    assert w == brute_W(deck.as_tuple(), j, t)
    assert (w == 0) == (compute_T(deck, j) >= t)


def test_lambda_examples():
    spec = DeckSpec.even(2, 100)
    assert lambda_of(spec, 1, 20) == pytest.approx(1.0, rel=1e-12)
    assert lambda_of(spec, 1, 0) == 0


def test_fair_odds_near_32_cards():
    spec = DeckSpec.even(2, 365)
    t = t_for_lambda(spec, 1, math.log(2))
    assert round(t) == 32
    assert lambda_of(spec, 1, t) == pytest.approx(math.log(2))


def test_survival_approx():
    approx, scale = survival_approx(DeckSpec.even(2, 100), 1, 20)
    assert approx == pytest.approx(math.exp(-1), rel=1e-12)
    assert scale == pytest.approx(0.2)
    assert survival_approx(DeckSpec.even(2, 100), 1, 0) == (1.0, 0.0)


def test_survival_approx_small_deck_against_enumeration():
    spec = DeckSpec.even(2, 2)
    approx, scale = survival_approx(spec, 1, 2)
    exact = Fraction(4, 6)
    assert exact_survival(spec, 1, 2) == exact
    assert approx == pytest.approx(math.exp(-0.5))
    assert abs(approx - float(exact)) == pytest.approx(0.0601360, abs=1e-6)
    assert abs(approx - float(exact)) <= scale


@pytest.mark.parametrize(
    "mults, j, t, expected",
    [((2, 2), 1, 2, Fraction(1, 3)), ((2, 2), 1, 1, 0), ((2, 2), 1, 4, 2), ((3, 2, 1), 2, 1, 0)],
)
def test_exact_mean_W(mults, j, t, expected):
    assert exact_mean_W(new_spec(mults), j, t) == expected


@pytest.mark.parametrize("mults", [(2, 2), (3, 1), (2, 2, 1), (3, 2, 2), (4, 1, 1)])
def test_exact_mean_W_against_enumeration(mults):
    from cardguess.oracle import arrangements, count_arrangements

    spec = new_spec(mults)
    decks = list(arrangements(spec))
    for j in range(1, spec.m_star):
        for t in range(spec.N + 1):
            total = Fraction(sum(brute_W(z, j, t) for z in decks), count_arrangements(spec))
            assert total == exact_mean_W(spec, j, t)


@pytest.mark.parametrize("mults", [(2, 2, 2, 2), (3, 3, 1), (2, 2, 2, 1, 1, 1, 1)])
def test_mean_W_monte_carlo(mults):
    spec = new_spec(mults)
    rng_trials = 100_000
    for j in range(1, spec.m_star):
        t = spec.N - 1
        vals = np.array([count_W(shuffle(spec, trial_rng(8, i)), j, t) for i in range(rng_trials)])
        se = vals.std(ddof=1) / math.sqrt(rng_trials)
        assert abs(vals.mean() - float(exact_mean_W(spec, j, t))) <= 4 * se


def test_chernoff_examples():
    spec = DeckSpec.even(2, 2)
    assert chernoff_tail(spec, 1, 2, 0.0) == 1.0
    bound = chernoff_tail(spec, 1, 2, 1 / 6)
    assert bound == pytest.approx(math.exp(-1 / 24), rel=1e-12)
    assert bound >= 2 / 3
    xs = np.linspace(0.01, 1 / 3 - 1e-9, 20)
    vals = [chernoff_tail(spec, 1, 2, x) for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_chernoff_domain():
    spec = DeckSpec.even(2, 2)
    with pytest.raises(ValueError):
        chernoff_tail(spec, 1, 2, 1 / 3)
    with pytest.raises(ValueError):
        chernoff_tail(spec, 1, 1, 0.0)


@pytest.mark.parametrize("mults", [(2, 2), (3, 3), (2, 2, 2), (3, 2, 1), (4, 4, 2), (3, 3, 3, 3)])
def test_chernoff_dominates_exact_survival(mults):
    spec = new_spec(mults)
    for j in range(1, spec.m_star):
        for t in range(j + 1, spec.N + 1):
            mean = float(exact_mean_W(spec, j, t))
            if mean == 0:
                continue
            exact = float(exact_survival(spec, j, t))
            for frac in (0.0, 0.25, 0.5, 0.9, 0.999):
                assert exact <= chernoff_tail(spec, j, t, frac * mean) + 1e-15
            assert exact <= survival_upper_bound(spec, j, t) + 1e-15


def test_lambda_tail_bound_caps_at_one():
    spec = DeckSpec.even(3, 50)
    assert lambda_tail_bound(spec, 1, 0) == 1.0
    assert lambda_tail_bound(spec, 1, 40, C=2.0, C_prime=0.25) == pytest.approx(
        min(1.0, 2.0 * math.exp(-0.25 * lambda_of(spec, 1, 40)))
    )


def test_approx_curve_j0():
    curve = approx_survival_curve(DeckSpec.even(2, 5), 0, range(0, 4))
    assert curve.survival == (1.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("n", [100, 1000])
@pytest.mark.parametrize("m", [2, 3])
def test_survival_close_to_exponential(m, n):
    spec = DeckSpec.even(m, n)
    j = 1
    grid = sorted({int(round(t_for_lambda(spec, j, lam))) for lam in np.linspace(0.1, 3, 12)})
    curve = estimate_survival(spec, j, grid, trials=100_000 if n == 100 else 20_000, seed=5)
    for t, p, se in zip(curve.times, curve.survival, curve.stderr()):
        approx, scale = survival_approx(spec, j, t)
        assert abs(p - approx) <= 5 * scale + 4 * se, t
