"""Extended-real arithmetic under the betting conventions.

All capital and payoff arithmetic in this package runs over [0, +inf] in the
linear domain and [-inf, +inf] in the log domain, with the fixed conventions

    0 * inf = 0        0 / 0 = 1        t / 0 = +inf  (t > 0)
    ln 0 = -inf        ln inf = +inf    exp(-inf) = 0
    0 ** 0 = 1         0 ** e = +inf for e < 0

A log-domain capital that would combine +inf with -inf is flagged INDEFINITE
rather than collapsed to a number; verification treats such states as passing
by convention.
"""

from __future__ import annotations

import math

INF = math.inf


def ext_mul(a: float, b: float) -> float:
    """Product with 0 * inf = 0 (either order)."""
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


def ext_pow(base: float, expo: float) -> float:
    """base ** expo for base in [0, inf] with 0**0 = 1 and 0**neg = inf."""
    if expo == 0.0:
        return 1.0
    if base == 0.0:
        return 0.0 if expo > 0.0 else INF
    if base == INF:
        return INF if expo > 0.0 else 0.0
    return base ** expo


def ext_log(x: float) -> float:
    if x == 0.0:
        return -INF
    if x == INF:
        return INF
    return math.log(x)


def ext_exp(x: float) -> float:
    if x == -INF:
        return 0.0
    if x == INF:
        return INF
    try:
        return math.exp(x)
    except OverflowError:
        return INF


def safe_ratio(num: float, den: float) -> float:
    """num / den over nonnegative reals with 0/0 = 1 and t/0 = +inf."""
    if den == 0.0:
        return 1.0 if num == 0.0 else INF
    if num == INF:
        return INF
    return num / den


def truncate_one(x: float) -> float:
    """Truncate above at 1: x if x <= 1, else 1 (accepts -inf)."""
    return x if x <= 1.0 else 1.0


def pos_part(x: float) -> float:
    return x if x > 0.0 else 0.0


class LogCapital:
    """A nonnegative capital stored as its natural log.

    -inf encodes capital 0 and +inf encodes capital inf; both are absorbing
    under further updates, except that adding -inf to +inf (in either order)
    marks the capital INDEFINITE instead of silently picking a value.
    Instances are immutable; updates return new values.
    """

    __slots__ = ("log_value", "indefinite")

    def __init__(self, log_value: float = 0.0, indefinite: bool = False):
        object.__setattr__(self, "log_value", log_value)
        object.__setattr__(self, "indefinite", indefinite)

    def __setattr__(self, name, value):
        raise AttributeError("LogCapital is immutable")

    def __eq__(self, other) -> bool:
        return (isinstance(other, LogCapital)
                and self.log_value == other.log_value
                and self.indefinite == other.indefinite)

    def __hash__(self) -> int:
        return hash((self.log_value, self.indefinite))

    def __repr__(self) -> str:
        if self.indefinite:
            return "LogCapital(indefinite)"
        return f"LogCapital({self.log_value})"

    def plus_log(self, increment: float) -> "LogCapital":
        """Return the capital after multiplying by exp(increment)."""
        if self.indefinite:
            return self
        v = self.log_value
        if v == INF or v == -INF:
            if (increment == INF or increment == -INF) and increment != v:
                return LogCapital(v, indefinite=True)
            return self
        if -INF < increment < INF:
            return LogCapital(v + increment)
        return LogCapital(increment)

    def times_payoff(self, payoff: float) -> "LogCapital":
        """Return the capital after multiplying by a payoff in [0, inf]."""
        return self.plus_log(ext_log(payoff))

    @property
    def value(self) -> float:
        """Linear-domain capital; NaN for INDEFINITE states."""
        if self.indefinite:
            return math.nan
        return ext_exp(self.log_value)

    @property
    def is_zero(self) -> bool:
        return not self.indefinite and self.log_value == -INF

    @property
    def is_infinite(self) -> bool:
        return not self.indefinite and self.log_value == INF
