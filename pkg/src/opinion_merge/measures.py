"""Finite probability distributions, mixture densities and betting functions.

A forecast is a probability vector over m >= 2 outcomes.  Two forecasts are
compared through their densities with respect to the half-half mixture
q = (p_i + p_ii) / 2, which is fixed as the reference measure so that the
densities are canonical: on the support of q the two densities always sum
to 2, and an outcome carries density 0 exactly when that forecast gives it
probability 0.

Outcome spaces stay small (protocol rounds run by the hundred thousand), so
the arithmetic here is scalar on purpose; vectors are exposed as read-only
numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .extmath import INF

SUM_TOL = 1e-9          # construction tolerance for probability vectors
BETTING_REL_TOL = 1e-9  # relative tolerance for the unit-mean bet contract

_EMPTY: frozenset[int] = frozenset()


class MeasureError(ValueError):
    """Malformed distribution, density pair or betting function."""


@dataclass(frozen=True)
class OutcomeSpace:
    """A finite outcome space, optionally with display labels."""

    size: int
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.size < 2:
            raise MeasureError(f"outcome space needs size >= 2, got {self.size}")
        if self.labels is not None and len(self.labels) != self.size:
            raise MeasureError("label count does not match outcome space size")

    def label(self, omega: int) -> str:
        if self.labels is not None:
            return self.labels[omega]
        return f"w{omega}"


class Distribution:
    """Probability vector over a finite outcome space.

    Entries must be nonnegative and sum to 1 within 1e-9; the vector is
    renormalized on construction so the stored sum is exact to float
    precision.  Instances are immutable; `probs` exposes a read-only numpy
    view built on first use.
    """

    __slots__ = ("_list", "_probs")

    def __init__(self, probs: Sequence[float]):
        if isinstance(probs, np.ndarray):
            vals = probs.tolist()
        else:
            vals = [float(x) for x in probs]
        if len(vals) < 2:
            raise MeasureError("a distribution needs a 1-d vector with >= 2 entries")
        total = 0.0
        for x in vals:
            if not (0.0 <= x < INF):
                raise MeasureError(f"probabilities must be finite and >= 0, got {vals}")
            total += x
        if abs(total - 1.0) > SUM_TOL:
            raise MeasureError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "_list", [x / total for x in vals])
        object.__setattr__(self, "_probs", None)

    @classmethod
    def _trusted(cls, vals: list[float]) -> "Distribution":
        """Wrap an already-normalized nonnegative list without re-checking."""
        self = object.__new__(cls)
        object.__setattr__(self, "_list", vals)
        object.__setattr__(self, "_probs", None)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Distribution is immutable")

    @property
    def probs(self) -> np.ndarray:
        arr = self._probs
        if arr is None:
            arr = np.array(self._list)
            arr.flags.writeable = False
            object.__setattr__(self, "_probs", arr)
        return arr

    @property
    def m(self) -> int:
        return len(self._list)

    def tolist(self) -> list[float]:
        return list(self._list)

    def __getitem__(self, omega: int) -> float:
        return self._list[omega]

    def __len__(self) -> int:
        return len(self._list)

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and self._list == other._list

    def __repr__(self) -> str:
        return f"Distribution({self._list})"


class DensityPair:
    """Densities of two forecasts w.r.t. their half-half mixture q.

    beta_i * q == p_i entrywise by construction; zero_i / zero_ii are the
    outcome sets where each density vanishes (outcomes off the support of q
    belong to both).  Arrays are built lazily from the internal float lists;
    `_cache` additionally memoizes per-pair integrals.
    """

    __slots__ = ("_bi", "_bii", "q", "zero_i", "zero_ii", "has_zeros", "_cache", "_arrays")

    def __init__(self, bi: list[float], bii: list[float], q: Distribution,
                 zero_i: frozenset[int], zero_ii: frozenset[int], has_zeros: bool):
        self._bi = bi
        self._bii = bii
        self.q = q
        self.zero_i = zero_i
        self.zero_ii = zero_ii
        self.has_zeros = has_zeros
        self._cache: dict = {}
        self._arrays = None

    def _built(self) -> tuple[np.ndarray, np.ndarray]:
        pair = self._arrays
        if pair is None:
            a = np.array(self._bi)
            b = np.array(self._bii)
            a.flags.writeable = False
            b.flags.writeable = False
            pair = (a, b)
            self._arrays = pair
        return pair

    @property
    def beta_i(self) -> np.ndarray:
        return self._built()[0]

    @property
    def beta_ii(self) -> np.ndarray:
        return self._built()[1]

    @property
    def m(self) -> int:
        return self.q.m

    @property
    def support(self) -> np.ndarray:
        return self.q.probs > 0.0

    @property
    def p_i(self) -> np.ndarray:
        return self.beta_i * self.q.probs

    @property
    def p_ii(self) -> np.ndarray:
        return self.beta_ii * self.q.probs

    def lists(self) -> tuple[list[float], list[float], list[float]]:
        """(beta_i, beta_ii, q) as plain float lists for scalar loops."""
        return self._bi, self._bii, self.q._list

    def __repr__(self) -> str:
        return f"DensityPair(beta_i={self._bi}, beta_ii={self._bii}, q={self.q._list})"


def mixture_densities(p_i: Distribution, p_ii: Distribution) -> DensityPair:
    """Build the canonical density pair of two forecasts.

    q(w) = 0 (both forecasts null at w) forces both densities to 0 there;
    such outcomes stay in the vectors but carry no mass.
    """
    if p_i.m != p_ii.m:
        raise MeasureError(f"dimension mismatch: {p_i.m} vs {p_ii.m}")
    a = p_i._list
    b = p_ii._list
    m = len(a)
    qv = [0.0] * m
    bi = [0.0] * m
    bii = [0.0] * m
    zi: list[int] = []
    zii: list[int] = []
    for w in range(m):
        qw = (a[w] + b[w]) * 0.5
        qv[w] = qw
        if qw > 0.0:
            x = a[w] / qw
            y = b[w] / qw
            bi[w] = x
            bii[w] = y
            if x == 0.0:
                zi.append(w)
            if y == 0.0:
                zii.append(w)
        else:
            zi.append(w)
            zii.append(w)
    return DensityPair(
        bi,
        bii,
        Distribution._trusted(qv),
        frozenset(zi) if zi else _EMPTY,
        frozenset(zii) if zii else _EMPTY,
        bool(zi or zii),
    )


class BettingFunction:
    """Nonnegative extended-real payoff vector; fair iff unit mean.

    +inf payoffs are legal, but only on outcomes the relevant forecast gives
    probability 0 (the 0 * inf = 0 convention keeps the mean finite).
    """

    __slots__ = ("_list", "_payoff")

    def __init__(self, payoff: Sequence[float]):
        if isinstance(payoff, np.ndarray):
            vals = payoff.tolist()
        else:
            vals = [float(x) for x in payoff]
        for x in vals:
            if not x >= 0.0:  # also catches NaN
                raise MeasureError(f"payoffs must be >= 0 (inf allowed), got {vals}")
        object.__setattr__(self, "_list", vals)
        object.__setattr__(self, "_payoff", None)

    def __setattr__(self, name, value):
        raise AttributeError("BettingFunction is immutable")

    @property
    def payoff(self) -> np.ndarray:
        arr = self._payoff
        if arr is None:
            arr = np.array(self._list)
            arr.flags.writeable = False
            object.__setattr__(self, "_payoff", arr)
        return arr

    @property
    def m(self) -> int:
        return len(self._list)

    def tolist(self) -> list[float]:
        return list(self._list)

    def __getitem__(self, omega: int) -> float:
        return self._list[omega]

    def __eq__(self, other) -> bool:
        return isinstance(other, BettingFunction) and self._list == other._list

    def __repr__(self) -> str:
        return f"BettingFunction({self._list})"


def constant_one(m: int) -> BettingFunction:
    return BettingFunction([1.0] * m)


def betting_mean(f: BettingFunction, p: Distribution) -> float:
    """Expectation of the payoff under p with 0 * inf = 0."""
    total = 0.0
    for x, pw in zip(f._list, p._list):
        if pw > 0.0:
            if x == INF:
                return INF
            total += x * pw
    return total


def validate_betting(f: BettingFunction, p: Distribution) -> bool:
    """True iff payoffs are >= 0 and the mean under p is 1 within 1e-9."""
    if f.m != p.m:
        raise MeasureError(f"dimension mismatch: {f.m} vs {p.m}")
    mean = betting_mean(f, p)
    if mean == INF:
        return False
    return abs(mean - 1.0) <= BETTING_REL_TOL * max(1.0, abs(mean))


@dataclass(frozen=True)
class ExceptionalPair:
    """Null sets (e_i for forecast I, e_ii for forecast II) outside of which
    the two forecasts share null events."""

    e_i: frozenset[int]
    e_ii: frozenset[int]

    def contains(self, omega: int) -> bool:
        return omega in self.e_i or omega in self.e_ii


def exceptional_pair(dp: DensityPair) -> ExceptionalPair:
    """The canonical exceptional pair: each forecast's zero-density set."""
    return ExceptionalPair(e_i=dp.zero_i, e_ii=dp.zero_ii)


def is_valid_exceptional(pair: ExceptionalPair, dp: DensityPair) -> bool:
    bi, bii, qv = dp.lists()
    for w in pair.e_i:
        if bi[w] * qv[w] > 0.0:
            return False
    for w in pair.e_ii:
        if bii[w] * qv[w] > 0.0:
            return False
    for w in range(dp.m):
        if w in pair.e_i or w in pair.e_ii:
            continue
        if (bi[w] * qv[w] == 0.0) != (bii[w] * qv[w] == 0.0):
            return False
    return True


def is_c_timid(dp: DensityPair, c: float) -> bool:
    """True iff beta_ii / beta_i stays within [1/c, c] everywhere (0/0 = 1)."""
    if not c > 1.0:
        raise MeasureError(f"timidity constant must exceed 1, got {c}")
    bi, bii, _ = dp.lists()
    inv_c = 1.0 / c
    for x, y in zip(bi, bii):
        if x == 0.0:
            if y != 0.0:
                return False  # ratio +inf
            continue          # 0/0 reads as 1
        ratio = y / x
        if ratio > c or ratio < inv_c:
            return False
    return True


def is_absolutely_continuous(p_i: Distribution, p_ii: Distribution) -> bool:
    """True iff every p_ii-null outcome is also p_i-null."""
    if p_i.m != p_ii.m:
        raise MeasureError(f"dimension mismatch: {p_i.m} vs {p_ii.m}")
    for x, y in zip(p_i._list, p_ii._list):
        if y == 0.0 and x != 0.0:
            return False
    return True
