"""The exact capital identity of the coupled Sceptic pair.

Both Sceptics bet normalized powers of the density ratio each round.  The
payoff exponents are rigged so that, after every round and against any
Reality,

    2/(1+a) ln K_I  +  2/(1-a) ln K_II  =  cumulative log-form a-divergence.

This script runs the pair on drifting forecasts, prints both sides round by
round, and then walks an exceptional play where one forecast assigns zero
probability: the identity survives through the infinity conventions.

Run:  python demos/capital_identity.py
"""

from opinion_merge import (
    Distribution,
    check_small_alpha_identity,
    log_alpha_divergence,
    run_competitive,
)
from opinion_merge.scenarios import gen_forecast_pair, reality_adversarial
from opinion_merge.strategies import alpha_pair

ALPHA = -0.5

forecaster_i, forecaster_ii = gen_forecast_pair(seed=7, m=3, regime="drift")
sceptic_i, sceptic_ii = alpha_pair(ALPHA)
reality = reality_adversarial("max_ratio")  # worst case for forecaster I

transcript = run_competitive(forecaster_i, forecaster_ii,
                             sceptic_i, sceptic_ii, reality, horizon=10)

coeff_i = 2.0 / (1.0 + ALPHA)
coeff_ii = 2.0 / (1.0 - ALPHA)
print(f"round  {'lhs':>12}  {'cumulative divergence':>22}")
cum = 0.0
for rec in transcript.rounds:
    cum += log_alpha_divergence(rec.dp, ALPHA)
    lhs = coeff_i * rec.log_k_i.log_value + coeff_ii * rec.log_k_ii.log_value
    print(f"{rec.index:5d}  {lhs:12.8f}  {cum:22.8f}")

report = check_small_alpha_identity(transcript, ALPHA)
print("\nchecker says:", report)

# An exceptional play: forecast I rules out outcome 2, forecast II does not,
# and Reality plays exactly that outcome.  Sceptic I's capital jumps to +inf
# while Sceptic II's drops to 0; the left side becomes inf - inf, which the
# protocol treats as true by convention, and the pair stops betting.
class FixedForecaster:
    def __init__(self, probs):
        self._d = Distribution(probs)

    def forecast(self, n, history):
        return self._d


class FixedReality:
    def choose(self, ctx):
        return 2


sceptic_i, sceptic_ii = alpha_pair(0.5)
t = run_competitive(FixedForecaster([0.6, 0.4, 0.0]), FixedForecaster([0.3, 0.3, 0.4]),
                    sceptic_i, sceptic_ii, FixedReality(), horizon=3)
print("\nexceptional play:")
print("  K_I infinite:", t.final_log_k_i.is_infinite,
      "| K_II zero:", t.final_log_k_ii.is_zero,
      "| pair stopped:", sceptic_i._state.stopped)
print("  identity still passes:", check_small_alpha_identity(t, 0.5).passed)
