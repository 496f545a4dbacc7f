"""Sceptic strategies with exact capital guarantees.

The central construction is the coupled pair of Sceptics parameterized by an
order alpha: each round both bet normalized powers of the density ratio, and
the weighted sum of their log capitals reproduces the cumulative log-form
alpha-divergence between the two forecast streams exactly, whatever Reality
and the Forecasters do.  Around it sit the ratio tracker (Sceptic I shadowing
Sceptic II's bet through the likelihood ratio), capital mixtures, the
set-aside transform, quadratic forcing strategies for the semimartingale
protocol, and the horizon-tuned growth strategies built from all of the
above.

Strategy instances are stateful and belong to a single engine run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .divergence import AlphaParam, hellinger_integral
from .engine import BetContext, ScepticStrategy
from .extmath import INF, ext_log, ext_mul, ext_pow, safe_ratio, truncate_one
from .measures import BettingFunction, DensityPair, Distribution, constant_one

WEIGHT_SUM_TOL = 1e-12


class WeightSumError(ValueError):
    """Mixture weights must be positive and sum to 1."""


class ConstantSceptic(ScepticStrategy):
    """Bets the fair constant 1 every round."""

    def bet(self, ctx: BetContext) -> BettingFunction:
        return constant_one(ctx.p.m)


class RandomValidSceptic(ScepticStrategy):
    """Seeded random bets, always valid: positive payoffs scaled to unit mean.

    Used as an adversarial-but-legal Sceptic II when testing guarantees that
    must hold against arbitrary opponents.
    """

    def __init__(self, seed: int, low: float = 0.25, high: float = 4.0):
        self._rng = np.random.default_rng(seed)
        self._low = low
        self._high = high

    def bet(self, ctx: BetContext) -> BettingFunction:
        raw = self._rng.uniform(self._low, self._high, ctx.p.m)
        return BettingFunction(raw / float(raw @ ctx.p.probs))


@dataclass
class _PairState:
    """Shared stop flag: once Reality reveals an outcome where exactly one
    density vanishes, both pair members bet 1 forever."""

    stopped: bool = False


class AlphaPairSceptic(ScepticStrategy):
    """One member of the coupled alpha-pair.

    For a round with Hellinger integral h in (0, inf) the bets are the
    normalized density-ratio powers

        side I:  (beta_ii / beta_i) ** ((1+alpha)/2) / h
        side II: (beta_i / beta_ii) ** ((1-alpha)/2) / h

    with ratios resolved by 0/0 = 1 and continuity of x**e at 0 and inf.
    h = 0 (mutually singular forecasts, only |alpha| < 1) switches to the
    singular bets: side I pays inf on the set where beta_i vanishes and 1
    elsewhere, side II mirrors.  h = inf (one-sided zeros, only |alpha| > 1)
    switches to a designed pair concentrated on the opponent-null set so the
    capital identity keeps both sides at +inf.
    """

    def __init__(self, alpha: float, side: str, state: _PairState):
        self.alpha = AlphaParam(float(alpha)).value
        if side not in ("I", "II"):
            raise ValueError(f"side must be 'I' or 'II', got {side!r}")
        self.side = side
        self._state = state

    def bet(self, ctx: BetContext) -> BettingFunction:
        dp = ctx.dp
        if dp is None:
            raise ValueError("alpha-pair strategies need the round's density pair")
        if self._state.stopped:
            return constant_one(dp.m)
        h = hellinger_integral(dp, self.alpha)
        if h == 0.0:
            return self._singular_bet(dp)
        if h == INF:
            return self._one_sided_bet(dp)
        bi, bii, _ = dp.lists()
        if self.side == "I":
            num, den, expo = bii, bi, (1.0 + self.alpha) / 2.0
        else:
            num, den, expo = bi, bii, (1.0 - self.alpha) / 2.0
        inv_h = 1.0 / h
        if dp.has_zeros:
            pay = [ext_pow(safe_ratio(x, y), expo) * inv_h for x, y in zip(num, den)]
        else:
            pay = [(x / y) ** expo * inv_h for x, y in zip(num, den)]
        return BettingFunction(pay)

    def _singular_bet(self, dp: DensityPair) -> BettingFunction:
        bi = dp.lists()[0]
        if self.side == "I":
            pay = [INF if x == 0.0 else 1.0 for x in bi]
        else:
            pay = [1.0 if x == 0.0 else INF for x in bi]
        return BettingFunction(pay)

    def _one_sided_bet(self, dp: DensityPair) -> BettingFunction:
        # The opponent-null set carries positive mass under the other
        # forecast, so an indicator bet there has a well-defined unit scale.
        bi, bii, qv = dp.lists()
        if self.alpha < -1.0:
            null_set = [y == 0.0 for y in bii]
            own = bi if self.side == "I" else None
        else:
            null_set = [x == 0.0 for x in bi]
            own = bii if self.side == "II" else None
        if own is not None:
            mass = sum(b * qw for b, qw, z in zip(own, qv, null_set) if z)
            pay = [1.0 / mass if z else 0.0 for z in null_set]
        else:
            pay = [INF if z else 1.0 for z in null_set]
        return BettingFunction(pay)

    def observe(self, ctx: BetContext, outcome: int) -> None:
        bi, bii, _ = ctx.dp.lists()
        if (bi[outcome] == 0.0) != (bii[outcome] == 0.0):
            self._state.stopped = True


def alpha_pair(alpha: float) -> tuple[AlphaPairSceptic, AlphaPairSceptic]:
    """The coupled (Sceptic I, Sceptic II) pair of order alpha."""
    state = _PairState()
    return AlphaPairSceptic(alpha, "I", state), AlphaPairSceptic(alpha, "II", state)


class RatioTrackerSceptic(ScepticStrategy):
    """Sceptic I shadowing Sceptic II through the likelihood ratio.

    Pays (beta_ii / beta_i) * f_ii(w), with the payoff forced to inf where
    beta_i vanishes.  The raw mean under forecast I can fall below 1 when
    forecast II charges outcomes that forecast I does not; the shortfall is
    restored by adding the constant deficit to every payoff, which keeps the
    unit-mean contract without weakening the strategy.
    """

    def bet(self, ctx: BetContext) -> BettingFunction:
        dp = ctx.dp
        f_ii = ctx.opponent_bet
        if dp is None or f_ii is None:
            raise ValueError("ratio tracker plays Sceptic I and needs Sceptic II's bet")
        pay = np.empty(dp.m)
        for w in range(dp.m):
            if dp.beta_i[w] == 0.0 and dp.beta_ii[w] > 0.0:
                pay[w] = INF
            else:
                pay[w] = ext_mul(safe_ratio(dp.beta_ii[w], dp.beta_i[w]), f_ii[w])
        p = ctx.p.probs
        live = (p > 0.0) & np.isfinite(pay)
        mean = float(pay[live] @ p[live])
        deficit = 1.0 - mean
        if deficit > 0.0:
            pay = pay + deficit
        return BettingFunction(pay)


class MixtureSceptic(ScepticStrategy):
    """Capital-weighted mixture of sub-strategies.

    Splits the initial capital across the components; every round the master
    bet is the capital-share-weighted average of the component bets, which
    keeps the master capital equal to the weighted sum of component capitals
    exactly (in real arithmetic).  Component capitals are tracked in the log
    domain so long horizons cannot overflow.
    """

    def __init__(self, strategies: Sequence[ScepticStrategy], weights: Sequence[float]):
        w = np.asarray(list(weights), dtype=float)
        if len(strategies) != w.size or w.size == 0:
            raise WeightSumError("need one positive weight per strategy")
        if np.any(w <= 0.0):
            raise WeightSumError(f"weights must be positive, got {w}")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise WeightSumError(f"weights sum to {float(w.sum())!r}, not 1")
        self.components = list(strategies)
        self.weights = w
        self._log_w = np.log(w)
        self._log_k = np.zeros(w.size)  # component log capitals
        self._round_bets: Optional[list[BettingFunction]] = None

    @property
    def component_log_capitals(self) -> np.ndarray:
        return self._log_k.copy()

    def log_capital(self) -> float:
        """Master log capital: log sum of weighted component capitals."""
        z = self._log_w + self._log_k
        if np.any(z == INF):
            return INF
        hi = float(np.max(z))
        if hi == -INF:
            return -INF
        return hi + math.log(float(np.sum(np.exp(z - hi))))

    def bet(self, ctx: BetContext) -> BettingFunction:
        bets = [s.bet(ctx) for s in self.components]
        self._round_bets = bets
        master = self.log_capital()
        if math.isinf(master):
            return constant_one(ctx.p.m)
        z = self._log_w + self._log_k
        shares = np.exp(z - master)
        pay = np.zeros(ctx.p.m)
        for k, f in enumerate(bets):
            if shares[k] > 0.0:
                pay = pay + shares[k] * f.payoff
        return BettingFunction(pay)

    def observe(self, ctx: BetContext, outcome: int) -> None:
        if self._round_bets is not None:
            for k, f in enumerate(self._round_bets):
                lk = self._log_k[k]
                if not math.isinf(lk):
                    self._log_k[k] = lk + ext_log(f[outcome])
            self._round_bets = None
        for s in self.components:
            s.observe(ctx, outcome)


def mix_strategies(strategies: Sequence[ScepticStrategy],
                   weights: Sequence[float]) -> MixtureSceptic:
    """Mix Sceptic strategies; master capital is the weighted capital sum."""
    return MixtureSceptic(strategies, weights)


def big_alpha_sceptic_i(alpha: float) -> MixtureSceptic:
    """Sceptic I strategy enforcing the one-sided capital bound for alpha < -1.

    Splits capital c = 2/(1-alpha) on the alpha-pair side-I strategy and
    1 - c on the ratio tracker; c optimizes the guaranteed lower bound and
    makes its normalizing constant exactly 1.
    """
    if not alpha < -1.0:
        raise ValueError(f"this construction needs alpha < -1, got {alpha}")
    c = 2.0 / (1.0 - alpha)
    pair_i, _ = alpha_pair(alpha)
    return MixtureSceptic([pair_i, RatioTrackerSceptic()], [c, 1.0 - c])


class SetAsideSceptic(ScepticStrategy):
    """Banks 1 unit of capital every time the active stake exceeds 2.

    Plays the inner strategy with the active stake only; the reserve is never
    risked, so total capital always dominates the number of banked units and
    unbounded peaks of the inner capital translate into unbounded reserve.
    """

    def __init__(self, inner: ScepticStrategy):
        self.inner = inner
        self.reserve = 0.0
        self.active = 1.0
        self.capital = 1.0
        self.triggers = 0
        self._round_inner: Optional[BettingFunction] = None

    def bet(self, ctx: BetContext) -> BettingFunction:
        f_in = self.inner.bet(ctx)
        if self.capital <= 0.0 or math.isinf(self.capital):
            self._round_inner = None
            return constant_one(ctx.p.m)
        share = self.active / self.capital
        pay = np.empty(ctx.p.m)
        for w in range(ctx.p.m):
            pay[w] = ext_mul(share, f_in[w]) + (1.0 - share)
        self._round_inner = f_in
        return BettingFunction(pay)

    def observe(self, ctx: BetContext, outcome: int) -> None:
        self.inner.observe(ctx, outcome)
        if self._round_inner is None:
            return
        self.active = ext_mul(self.active, self._round_inner[outcome])
        self.capital = self.active + self.reserve
        while self.active > 2.0 and not math.isinf(self.active):
            self.reserve += 1.0
            self.active -= 1.0
            self.triggers += 1
        self._round_inner = None


def set_aside_transform(inner: ScepticStrategy) -> SetAsideSceptic:
    """Wrap a strategy so unbounded capital peaks become unbounded capital."""
    return SetAsideSceptic(inner)


def _mean_under(values: np.ndarray, p: Distribution) -> float:
    """Expectation with the 0 * inf = 0 convention (values may hold +-inf)."""
    live = p.probs > 0.0
    vals = values[live]
    if np.any(np.isinf(vals)):
        raise ValueError("infinite value on a charged outcome")
    return float(vals @ p.probs[live])


def submartingale_center(xi: np.ndarray, p: Distribution) -> np.ndarray:
    """Subtract the mean under p; the centered square never exceeds the raw one."""
    xi = np.asarray(xi, dtype=float)
    return xi - _mean_under(xi, p)


class QuadraticForcerSceptic(ScepticStrategy):
    """Semimartingale strategy whose capital tracks the squared partial sum.

    While the cumulative second moment stays within the budget C the capital
    equals 1 + (S_n^2 - V_n)/C, where S_n sums the realized test values and
    V_n their per-round second moments; each step plays the additive bet
    g = (2 S xi + xi^2 - E[xi^2]) / C.  Once the budget is exceeded the
    strategy stops betting for good.

    `xi_fn` derives the test values from the round context (defaults to
    Reality's announced test function); `center` subtracts the mean first,
    which turns the submartingale case into the martingale one.
    """

    def __init__(self, budget: float,
                 xi_fn: Optional[Callable[[BetContext], np.ndarray]] = None,
                 center: bool = False):
        if not budget > 0.0:
            raise ValueError(f"budget must be positive, got {budget}")
        self.budget = float(budget)
        self.xi_fn = xi_fn
        self.center = center
        self.s = 0.0
        self.v = 0.0
        self.capital = 1.0
        self.frozen = False
        self._round: Optional[tuple[np.ndarray, np.ndarray, float]] = None

    def _test_values(self, ctx: BetContext) -> np.ndarray:
        xi = self.xi_fn(ctx) if self.xi_fn is not None else ctx.xi
        if xi is None:
            raise ValueError("no test function available this round")
        xi = np.asarray(xi, dtype=float)
        if self.center:
            xi = xi - _mean_under(xi, ctx.p)
        return xi

    def additive_bet(self, ctx: BetContext) -> np.ndarray:
        if self.frozen or self.capital <= 0.0 or math.isinf(self.capital):
            self._round = None
            return np.zeros(ctx.p.m)
        xi = self._test_values(ctx)
        live = ctx.p.probs > 0.0
        v_n = float((xi[live] ** 2) @ ctx.p.probs[live])
        if self.v + v_n > self.budget:
            self.frozen = True
            self._round = None
            return np.zeros(ctx.p.m)
        g = np.empty(ctx.p.m)
        for w in range(ctx.p.m):
            if math.isinf(xi[w]):
                g[w] = INF  # xi^2 dominates; only reachable off the support
            else:
                g[w] = (2.0 * self.s * xi[w] + xi[w] * xi[w] - v_n) / self.budget
        self._round = (xi, g, v_n)
        return g

    def bet(self, ctx: BetContext) -> BettingFunction:
        g = self.additive_bet(ctx)
        if self._round is None:
            return constant_one(ctx.p.m)
        return BettingFunction(np.maximum(1.0 + g / self.capital, 0.0))

    def observe(self, ctx: BetContext, outcome: int) -> None:
        if self._round is None:
            return
        xi, g, v_n = self._round
        self.capital = max(self.capital + float(g[outcome]), 0.0)
        self.s += float(xi[outcome])
        self.v += v_n
        self._round = None


def quadratic_forcer(budget: float,
                     xi_fn: Optional[Callable[[BetContext], np.ndarray]] = None,
                     center: bool = False) -> QuadraticForcerSceptic:
    return QuadraticForcerSceptic(budget, xi_fn=xi_fn, center=center)


def _budget_weights(c_max: int) -> np.ndarray:
    w = np.array([c ** -2.0 for c in range(1, c_max + 1)])
    return w / w.sum()


def budget_mixture(c_max: int,
                   xi_fn: Optional[Callable[[BetContext], np.ndarray]] = None,
                   center: bool = False) -> MixtureSceptic:
    """Mixture of quadratic forcers over budgets 1..c_max, weights c^-2."""
    if c_max < 1:
        raise ValueError(f"c_max must be >= 1, got {c_max}")
    subs = [QuadraticForcerSceptic(float(c), xi_fn=xi_fn, center=center)
            for c in range(1, c_max + 1)]
    return MixtureSceptic(subs, _budget_weights(c_max))


def borel_cantelli_forcer(c_max: int,
                          event_fn: Callable[[BetContext], np.ndarray]) -> MixtureSceptic:
    """Forcing strategy for 'the event happens finitely often'.

    Feeds centered event indicators into the budgeted quadratic forcers and
    mixes over budgets 1..c_max with weights proportional to c^-2; with
    c_max = 1 this is the single budget-1 forcer.
    """

    def indicator(ctx: BetContext) -> np.ndarray:
        return np.asarray(event_fn(ctx), dtype=float)

    return budget_mixture(c_max, xi_fn=indicator, center=True)


def _truncated_log_ratio(ctx: BetContext) -> np.ndarray:
    dp = ctx.dp
    if dp is None:
        raise ValueError("needs the round's density pair")
    out = np.empty(dp.m)
    for w in range(dp.m):
        out[w] = truncate_one(ext_log(safe_ratio(dp.beta_i[w], dp.beta_ii[w])))
    return out


def _ratio_tail_event(ctx: BetContext) -> np.ndarray:
    dp = ctx.dp
    if dp is None:
        raise ValueError("needs the round's density pair")
    return (dp.beta_i > math.e * dp.beta_ii).astype(float)


def criterion_sceptic_i(alpha: float, c_max: int = 64) -> MixtureSceptic:
    """Sceptic I strategy behind the merging criterion for alpha in (-1, 1).

    Equal-weight mixture of (a) budgeted forcers on the truncated log density
    ratio, (b) the finitely-often forcer on the event that the ratio exceeds
    e, and (c) the ratio tracker.  It gets rich whenever the cumulative
    alpha-divergence stays finite but Sceptic II's capital explodes.  alpha
    only scales the guarantee's constants, not the moves; it is validated
    here for contract clarity.
    """
    if not -1.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (-1, 1), got {alpha}")
    parts = [
        budget_mixture(c_max, xi_fn=_truncated_log_ratio, center=True),
        borel_cantelli_forcer(c_max, _ratio_tail_event),
        RatioTrackerSceptic(),
    ]
    return MixtureSceptic(parts, [1.0 / 3.0] * 3)


# -- horizon-tuned growth strategies ----------------------------------------

def epsilon_anytime(k: int) -> float:
    """The anytime tuning sequence sqrt(ln k / e^k), k >= 2."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return math.sqrt(math.log(k) / math.exp(k))


def anytime_k(n: int) -> int:
    """Index of the mixture component matched to horizon n: ceil(ln n)."""
    if n < 2:
        raise ValueError(f"horizon must be >= 2, got {n}")
    return math.ceil(math.log(n))


def anytime_weights(k_max: int) -> np.ndarray:
    """Weights proportional to k^-2 over k in {2, ..., k_max}."""
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    w = np.array([k ** -2.0 for k in range(2, k_max + 1)])
    return w / w.sum()


def growth_joint_fixed(n: int) -> tuple[AlphaPairSceptic, AlphaPairSceptic]:
    """Joint pair tuned for a horizon known in advance: alpha = -1 + 2/sqrt(n)."""
    if n < 2:
        raise ValueError(f"fixed-horizon joint strategy needs n >= 2, got {n}")
    return alpha_pair(-1.0 + 2.0 / math.sqrt(n))


def growth_sceptic_i_fixed(n: int) -> MixtureSceptic:
    """Sceptic I alone, tuned for a known horizon: alpha = -1 - 2/sqrt(n)."""
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n}")
    return big_alpha_sceptic_i(-1.0 - 2.0 / math.sqrt(n))


def growth_joint_anytime(k_max: int) -> tuple[MixtureSceptic, MixtureSceptic]:
    """Horizon-free joint pair: k^-2-weighted mixture of tuned pairs."""
    weights = anytime_weights(k_max)
    side_i = []
    side_ii = []
    for k in range(2, k_max + 1):
        s_i, s_ii = alpha_pair(-1.0 + 2.0 * epsilon_anytime(k))
        side_i.append(s_i)
        side_ii.append(s_ii)
    return MixtureSceptic(side_i, weights), MixtureSceptic(side_ii, weights)


def growth_sceptic_i_anytime(k_max: int) -> MixtureSceptic:
    """Horizon-free Sceptic I: k^-2-weighted mixture of tuned one-sided strategies."""
    weights = anytime_weights(k_max)
    subs = [big_alpha_sceptic_i(-1.0 - 2.0 * epsilon_anytime(k))
            for k in range(2, k_max + 1)]
    return MixtureSceptic(subs, weights)
