"""Forcing strategies in the semimartingale protocol.

Reality announces a test function alongside the Forecaster's distribution;
the Sceptic bets additive, zero-mean increments.  The quadratic forcer turns
a budget on cumulative second moments into a capital that tracks the squared
partial sum, the finitely-often forcer applies it to centered event
indicators, and the set-aside transform banks capital peaks so they can
never be lost again.

Run:  python demos/forcing_strategies.py
"""

import numpy as np

from opinion_merge import Distribution, run_competitive, run_semimartingale
from opinion_merge.measures import BettingFunction
from opinion_merge.engine import ScepticStrategy
from opinion_merge.strategies import (
    ConstantSceptic,
    borel_cantelli_forcer,
    quadratic_forcer,
    set_aside_transform,
)


class Uniform:
    def forecast(self, n, history):
        return Distribution([0.5, 0.5])


class PlusMinus:
    def xi(self, n, p, history):
        return np.array([1.0, -1.0])


class Sequence:
    def __init__(self, outcomes):
        self.outcomes = list(outcomes)

    def choose(self, ctx):
        return self.outcomes[ctx.n - 1]


# Quadratic forcer: capital = 1 + (S^2 - V)/C while within budget C.
outcomes = [0, 0, 1, 0, 0, 0, 1, 0]
t = run_semimartingale("martingale", "additive", Uniform(), PlusMinus(),
                       quadratic_forcer(20.0), Sequence(outcomes), len(outcomes))
print("quadratic forcer capitals:")
for rec in t.rounds:
    print(f"  round {rec.index}: capital {rec.capital:.3f}")

# Finitely-often forcer: grows whenever a supposedly rare event keeps
# happening.  Here the event has probability 0.01 but occurs every round.
class Rare:
    def forecast(self, n, history):
        return Distribution([0.01, 0.99])


class Indicator:
    def xi(self, n, p, history):
        return np.array([1.0, 0.0])


s = borel_cantelli_forcer(4, lambda ctx: np.array([1.0, 0.0]))
t = run_semimartingale("submartingale", "additive", Rare(), Indicator(),
                       s, Sequence([0] * 12), 12)
print("\nfinitely-often forcer against a recurring 1%-event:")
print(f"  capital after 12 hits: {t.rounds[-1].capital:.2f}")

# Set-aside transform: the inner strategy repeatedly doubles and crashes;
# the wrapper banks a unit every time the active stake exceeds 2, so the
# banked reserve can never be lost.
class DoubleOrNothing(ScepticStrategy):
    def bet(self, ctx):
        return BettingFunction([2.0, 0.0])


wrapped = set_aside_transform(DoubleOrNothing())
f = Uniform()
t = run_competitive(f, f, wrapped, ConstantSceptic(), Sequence([0] * 10), 10)
print("\nset-aside transform over a doubling inner strategy:")
for rec in t.rounds:
    print(f"  round {rec.index}: capital {np.exp(rec.log_k_i.log_value):6.2f}")
print(f"  banked reserve: {wrapped.reserve:.0f} (never decreases)")
