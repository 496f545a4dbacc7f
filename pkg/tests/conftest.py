"""Shared scripted players for engine-level tests."""

import numpy as np
import pytest

from opinion_merge.engine import ScepticStrategy
from opinion_merge.measures import BettingFunction, Distribution


class FixedForecaster:
    """Announces the same distribution every round."""

    def __init__(self, probs):
        self._d = Distribution(probs)

    def forecast(self, n, history):
        return self._d


class ScriptedForecaster:
    """Announces a fixed per-round sequence of distributions."""

    def __init__(self, rounds):
        self._rounds = [Distribution(p) for p in rounds]

    def forecast(self, n, history):
        return self._rounds[n - 1]


class ScriptedSceptic(ScepticStrategy):
    """Plays a fixed per-round sequence of payoff profiles."""

    def __init__(self, bets):
        self._bets = bets

    def bet(self, ctx):
        return BettingFunction(self._bets[ctx.n - 1])


class ScriptedReality:
    """Plays a fixed outcome sequence."""

    def __init__(self, outcomes):
        self._outcomes = list(outcomes)

    def choose(self, ctx):
        return self._outcomes[ctx.n - 1]


class ScriptedXi:
    """Announces a fixed per-round sequence of test functions."""

    def __init__(self, rounds):
        self._rounds = [np.asarray(x, dtype=float) for x in rounds]

    def xi(self, n, p, history):
        return self._rounds[n - 1]


@pytest.fixture
def anchor_pair():
    """The worked (0.5, 0.5) vs (0.9, 0.1) example used throughout."""
    from opinion_merge.measures import mixture_densities

    return mixture_densities(Distribution([0.5, 0.5]), Distribution([0.9, 0.1]))
