"""Seeded Forecaster and Reality generators for every forecast regime.

Regimes cover the cases the capital guarantees distinguish: agreeing
forecasts, independently drifting forecasts, mutually singular forecasts,
pairs with a one-sided zero density, and c-timid pairs whose density ratio
stays inside [1/c, c].  Identical seeds and parameters reproduce identical
streams.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .extmath import safe_ratio
from .measures import Distribution

INTERIOR_FLOOR = 1e-6
REGIMES = ("agree", "drift", "singular", "zero_mixed")


class GenerationFailedError(RuntimeError):
    """Rejection sampling could not satisfy the requested constraints."""


def _interior_point(rng: np.random.Generator, m: int) -> list[float]:
    """Uniform simplex point (normalized unit exponentials), floored away
    from the boundary to avoid incidental zeros."""
    draws = rng.standard_exponential(m).tolist()
    total = sum(draws)
    p = [max(x / total, INTERIOR_FLOOR) for x in draws]
    total = sum(p)
    return [x / total for x in p]


class ForecastScript:
    """Lazy per-round (p_i, p_ii) source shared by a pair of Forecasters.

    Rounds are generated in order from one RNG stream and cached so both
    Forecasters of a pair see the same draw.
    """

    def __init__(self, gen_round):
        self._gen_round = gen_round
        self._cache: dict[int, tuple[Distribution, Distribution]] = {}
        self._next = 1

    def pair(self, n: int) -> tuple[Distribution, Distribution]:
        while self._next <= n:
            self._cache[self._next] = self._gen_round(self._next)
            self._next += 1
        return self._cache[n]


class ScriptedForecaster:
    def __init__(self, script: ForecastScript, side: str):
        self._script = script
        self._side = side

    def forecast(self, n: int, history) -> Distribution:
        p_i, p_ii = self._script.pair(n)
        return p_i if self._side == "I" else p_ii


def _forecasters(script: ForecastScript) -> tuple[ScriptedForecaster, ScriptedForecaster]:
    return ScriptedForecaster(script, "I"), ScriptedForecaster(script, "II")


def gen_forecast_pair(seed: int, m: int, regime: str):
    """Forecaster pair for one of the regimes in REGIMES."""
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; choose from {REGIMES}")
    rng = np.random.default_rng(seed)

    if regime == "agree":
        def gen(n):
            d = Distribution._trusted(_interior_point(rng, m))
            return d, d
    elif regime == "drift":
        def gen(n):
            return (Distribution._trusted(_interior_point(rng, m)),
                    Distribution._trusted(_interior_point(rng, m)))
    elif regime == "singular":
        half = m // 2

        def gen(n):
            a = [0.0] * m
            b = [0.0] * m
            a[:half] = _interior_point(rng, half) if half > 1 else [1.0]
            b[half:] = _interior_point(rng, m - half) if m - half > 1 else [1.0]
            return Distribution._trusted(a), Distribution._trusted(b)
    else:  # zero_mixed: forecast I null on one outcome, forecast II full support
        def gen(n):
            j = int(rng.integers(m))
            p_ii = _interior_point(rng, m)
            p_i = _interior_point(rng, m)
            p_i[j] = 0.0
            total = sum(p_i)
            return (Distribution._trusted([x / total for x in p_i]),
                    Distribution._trusted(p_ii))

    return _forecasters(ForecastScript(gen))


def gen_timid_pair(seed: int, m: int, c: float, max_rejects: int = 1000):
    """Forecaster pair whose every round is c-timid, by rejection sampling.

    Forecast II is forecast I perturbed entrywise by factors in
    [c^-1/2, c^1/2] and renormalized; renormalization can push the density
    ratio outside [1/c, c], so candidates are checked and redrawn.
    """
    if not c > 1.0:
        raise ValueError(f"need c > 1, got {c}")
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    rng = np.random.default_rng(seed)
    half_band = math.sqrt(c)
    inv_c = 1.0 / c

    def gen(n):
        for _ in range(max_rejects):
            p_i = _interior_point(rng, m)
            factors = rng.uniform(1.0 / half_band, half_band, m).tolist()
            raw = [x * f for x, f in zip(p_i, factors)]
            total = sum(raw)
            p_ii = [x / total for x in raw]
            # the density ratio equals p_ii/p_i entrywise on full support,
            # so the timidity band can be checked directly
            if all(inv_c <= y / x <= c for x, y in zip(p_i, p_ii)):
                return Distribution._trusted(p_i), Distribution._trusted(p_ii)
        raise GenerationFailedError(
            f"no c-timid pair found in {max_rejects} draws (m={m}, c={c})")

    return _forecasters(ForecastScript(gen))


class SamplingReality:
    """Draws the outcome from the chosen Forecaster's current distribution."""

    def __init__(self, source: str, seed: int):
        if source not in ("I", "II"):
            raise ValueError(f"source must be 'I' or 'II', got {source!r}")
        self._source = source
        self._rng = np.random.default_rng(seed)

    def choose(self, ctx) -> int:
        p = ctx.p_i if self._source == "I" else ctx.p_ii
        u = self._rng.random()
        acc = 0.0
        for w, pw in enumerate(p.tolist()):
            acc += pw
            if u < acc:
                return w
        return p.m - 1


class AdversarialReality:
    """Picks the outcome optimizing the density ratio beta_i / beta_ii."""

    def __init__(self, objective: str):
        if objective not in ("max_ratio", "min_ratio"):
            raise ValueError(f"objective must be max_ratio or min_ratio, got {objective!r}")
        self._objective = objective

    def choose(self, ctx) -> int:
        bi, bii, _ = ctx.dp.lists()
        ratios = [safe_ratio(x, y) for x, y in zip(bi, bii)]
        best = max(ratios) if self._objective == "max_ratio" else min(ratios)
        return ratios.index(best)  # lowest index on ties


class FixedReality:
    """Plays one fixed outcome every round."""

    def __init__(self, outcome: int):
        self._outcome = int(outcome)

    def choose(self, ctx) -> int:
        return self._outcome


def reality_from(source: str, seed: int) -> SamplingReality:
    return SamplingReality(source, seed)


def reality_adversarial(objective: str, outcome: Optional[int] = None):
    """Adversarial Reality; objective 'fixed' plays the given outcome."""
    if objective == "fixed":
        if outcome is None:
            raise ValueError("fixed objective needs an outcome")
        return FixedReality(outcome)
    return AdversarialReality(objective)


def gen_random_pairs(seed: int, count: int, m_choices=(2, 3, 5),
                     zero_fraction: float = 0.15):
    """Seeded batch of density pairs for property sweeps.

    Mostly interior simplex pairs, with a `zero_fraction` share where
    forecast I is null on one outcome (one-sided zero densities).
    """
    from .measures import mixture_densities

    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        m = int(rng.choice(m_choices))
        p_i = _interior_point(rng, m)
        p_ii = _interior_point(rng, m)
        if rng.random() < zero_fraction:
            j = int(rng.integers(m))
            p_i[j] = 0.0
            total = sum(p_i)
            p_i = [x / total for x in p_i]
        pairs.append(mixture_densities(Distribution._trusted(p_i),
                                       Distribution._trusted(p_ii)))
    return pairs
