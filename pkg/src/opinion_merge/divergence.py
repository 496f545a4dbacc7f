"""Divergence functionals between two forecasts.

The alpha-divergence family comes in two flavours sharing one Hellinger
integral H(alpha) = sum_w beta_i^((1-a)/2) * beta_ii^((1+a)/2) * q(w):

    alpha_divergence      D = 4/(1-a^2) * (1 - H)
    log_alpha_divergence  D = 4/(a^2-1) * ln H

alpha = 0 gives the Hellinger distance, alpha = -3 is half the chi-square
distance, and the Kullback-Leibler divergence plays the role of alpha = -1
(where both formulas above degenerate).  All functions return values in
[0, +inf]; +inf is a legitimate value, reached when H is 0 (|a| < 1) or
+inf (|a| > 1).

Hellinger integrals are memoized per density pair: the betting strategies
and the verification checks evaluate the same integral several times per
round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .extmath import INF, ext_pow
from .measures import DensityPair, MeasureError

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class AlphaParam:
    """Order of an alpha-divergence; -1 and 1 are excluded (KL is separate)."""

    value: float

    def __post_init__(self):
        if self.value in (-1.0, 1.0):
            raise MeasureError("alpha must differ from -1 and 1")

    def __float__(self) -> float:
        return self.value


def _alpha_value(alpha) -> float:
    a = alpha.value if isinstance(alpha, AlphaParam) else float(alpha)
    if a == -1.0 or a == 1.0:
        raise MeasureError("alpha must differ from -1 and 1")
    return a


def _power_integral(dp: DensityPair, expo_i: float, expo_ii: float) -> float:
    """sum_w beta_i^expo_i * beta_ii^expo_ii * q(w) over the support of q.

    Uses 0^0 = 1 and 0^neg = +inf per the betting conventions; an infinite
    term with positive q mass makes the whole sum +inf.  On the support of q
    the densities sum to 2, so at most one of them vanishes per outcome.
    """
    bi, bii, qv = dp.lists()
    if not dp.has_zeros:
        total = 0.0
        for x, y, qw in zip(bi, bii, qv):
            total += (x ** expo_i) * (y ** expo_ii) * qw
        return total
    total = 0.0
    for x, y, qw in zip(bi, bii, qv):
        if qw == 0.0:
            continue
        term = ext_pow(x, expo_i) * ext_pow(y, expo_ii)
        if term == INF:
            return INF
        total += term * qw
    return total


def hellinger_integral(dp: DensityPair, alpha) -> float:
    """Hellinger integral of order (1-alpha)/2 of the pair (memoized)."""
    a = _alpha_value(alpha)
    cached = dp._cache.get(a)
    if cached is None:
        cached = _power_integral(dp, (1.0 - a) / 2.0, (1.0 + a) / 2.0)
        dp._cache[a] = cached
    return cached


def alpha_divergence(dp: DensityPair, alpha) -> float:
    """The linear-form alpha-divergence 4/(1-a^2) * (1 - H); always >= 0."""
    a = _alpha_value(alpha)
    h = hellinger_integral(dp, a)
    if h == INF:
        return INF  # 4/(1-a^2) < 0 there and (1 - h) = -inf
    d = (4.0 / (1.0 - a * a)) * (1.0 - h)
    return d if d > 0.0 else 0.0  # clip float negatives like -1e-17


def log_alpha_divergence(dp: DensityPair, alpha) -> float:
    """The log-form alpha-divergence 4/(a^2-1) * ln H; always >= 0."""
    a = _alpha_value(alpha)
    h = hellinger_integral(dp, a)
    if h == 0.0 or h == INF:
        return INF
    d = (4.0 / (a * a - 1.0)) * math.log(h)
    return d if d > 0.0 else 0.0


def kl_divergence(dp: DensityPair) -> float:
    """Kullback-Leibler divergence of forecast I from forecast II.

    sum_w ln(beta_i/beta_ii) * p_i(w), with 0 * ln(0/x) = 0; +inf as soon
    as forecast I charges an outcome where beta_ii vanishes.
    """
    bi, bii, qv = dp.lists()
    total = 0.0
    for x, y, qw in zip(bi, bii, qv):
        if qw == 0.0 or x == 0.0:
            continue  # forecast I carries no mass here
        if y == 0.0:
            return INF
        total += math.log(x / y) * x * qw
    return total if total > 0.0 else 0.0


def chi2_divergence(dp: DensityPair) -> float:
    """Half the chi-square distance: (1/2) sum (beta_i-beta_ii)^2/beta_ii q.

    Terms with beta_i = beta_ii = 0 contribute 0; a positive numerator over
    beta_ii = 0 makes the result +inf.  Equals alpha_divergence at alpha=-3.
    """
    bi, bii, qv = dp.lists()
    total = 0.0
    for x, y, qw in zip(bi, bii, qv):
        if qw == 0.0:
            continue
        num = (x - y) * (x - y)
        if y == 0.0:
            if num > 0.0:
                return INF
            continue
        total += num / y * qw
    return 0.5 * total


def renyi_info_gain(dp: DensityPair, alpha: float) -> float:
    """Renyi information gain of order alpha (binary log), alpha > 0, != 1."""
    if not (alpha > 0.0) or alpha == 1.0:
        raise MeasureError(f"Renyi order must be positive and != 1, got {alpha}")
    s = _power_integral(dp, alpha, 1.0 - alpha)
    if s == 0.0 or s == INF:
        return INF
    return math.log(s) / ((alpha - 1.0) * _LN2)
