"""Card-guessing games with complete feedback and the birthday problem without replacement."""

from cardguess.deck import DeckSpec, ShuffledDeck, beta_j, gamma_j, new_spec, shuffle, trial_rng

__all__ = [
    "DeckSpec",
    "ShuffledDeck",
    "beta_j",
    "gamma_j",
    "new_spec",
    "shuffle",
    "trial_rng",
]

__version__ = "0.1.0"
