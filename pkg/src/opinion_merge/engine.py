"""Protocol engines: move order, bet validation, capital bookkeeping.

Three protocols are supported.  In the competitive protocol two Forecasters
announce distributions, Sceptic II bets against Forecaster II, then Sceptic I
bets against Forecaster I (seeing Sceptic II's bet), then Reality picks the
outcome and both capitals are updated multiplicatively.  The modified
protocol additionally announces an exceptional pair of null sets before the
Sceptics move.  The semimartingale protocol has a single Forecaster, Reality
announcing a test function with a signed mean constraint, and one Sceptic
betting either multiplicatively (unit-mean payoff) or additively (zero-mean
increment bounded below by the current capital).

Capitals live in the log domain; +inf and -inf are absorbing, and the
+inf/-inf clash is carried as an INDEFINITE flag rather than collapsed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

import numpy as np

from .extmath import INF, LogCapital, ext_log, ext_mul
from .measures import (
    BettingFunction,
    DensityPair,
    Distribution,
    ExceptionalPair,
    betting_mean,
    exceptional_pair,
    is_valid_exceptional,
    mixture_densities,
    validate_betting,
)

XI_MEAN_TOL = 1e-9
ADDITIVE_MEAN_TOL = 1e-9


class EngineError(Exception):
    """Base class for protocol violations detected by the engine."""


class InvalidBetError(EngineError):
    def __init__(self, player: str, detail: str = ""):
        self.player = player
        super().__init__(f"invalid bet from {player}" + (f": {detail}" if detail else ""))


class InvalidExceptionalError(EngineError):
    pass


class InvalidXiError(EngineError):
    pass


class NonfiniteCapitalError(EngineError):
    pass


@dataclass(slots=True)
class BetContext:
    """What a Sceptic sees when asked for a bet.

    `p` is the distribution the bet must be fair under (the Sceptic's own
    Forecaster).  `opponent_bet` carries Sceptic II's bet when Sceptic I is
    asked, and is None for Sceptic II: the move order lets I react to II but
    not the other way round.  `xi` is Reality's test function in the
    semimartingale protocol.
    """

    n: int
    p: Distribution
    dp: Optional[DensityPair] = None
    opponent_bet: Optional[BettingFunction] = None
    exceptional: Optional[ExceptionalPair] = None
    xi: Optional[np.ndarray] = None
    history: Optional["Transcript"] = None


class ScepticStrategy:
    """Base class for Sceptic strategies.

    Strategies are stateful and owned by a single engine run; build a fresh
    instance per run.  `bet` returns the multiplicative payoff profile;
    `additive_bet` may return the zero-mean increment profile natively
    (semimartingale strategies do), otherwise the engine derives it.
    `observe` is called once per round with the realized outcome.
    """

    def bet(self, ctx: BetContext) -> BettingFunction:
        raise NotImplementedError

    def additive_bet(self, ctx: BetContext) -> Optional[np.ndarray]:
        return None

    def observe(self, ctx: BetContext, outcome: int) -> None:
        pass


class Forecaster(Protocol):
    def forecast(self, n: int, history: "Transcript") -> Distribution: ...


class Reality(Protocol):
    def choose(self, ctx: "RealityContext") -> int: ...


@dataclass(slots=True)
class RealityContext:
    """Full round state visible to Reality, who moves last."""

    n: int
    p_i: Distribution
    p_ii: Distribution
    dp: DensityPair
    f_i: Optional[BettingFunction] = None
    f_ii: Optional[BettingFunction] = None
    xi: Optional[np.ndarray] = None
    history: Optional["Transcript"] = None


@dataclass(frozen=True, slots=True)
class RoundRecord:
    index: int
    p_i: Distribution
    p_ii: Distribution
    dp: DensityPair
    f_ii: BettingFunction
    f_i: BettingFunction
    outcome: int
    log_k_i: LogCapital
    log_k_ii: LogCapital
    exceptional: Optional[ExceptionalPair] = None
    outcome_in_exceptional: Optional[bool] = None


@dataclass
class Transcript:
    """Ordered round records; capitals start at 1 (log 0)."""

    kind: str
    rounds: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rounds)

    @property
    def final_log_k_i(self) -> LogCapital:
        return self.rounds[-1].log_k_i if self.rounds else LogCapital()

    @property
    def final_log_k_ii(self) -> LogCapital:
        return self.rounds[-1].log_k_ii if self.rounds else LogCapital()


@dataclass(frozen=True, slots=True)
class SemimartingaleRound:
    index: int
    p: Distribution
    xi: np.ndarray
    g: Optional[np.ndarray]             # additive increment profile
    f: Optional[BettingFunction]        # multiplicative profile when defined
    outcome: int
    capital: float                      # linear-domain capital after the round
    log_capital: LogCapital


def _checked_bet(strategy: ScepticStrategy, ctx: BetContext, player: str) -> BettingFunction:
    f = strategy.bet(ctx)
    if not isinstance(f, BettingFunction):
        f = BettingFunction(f)
    if f.m != ctx.p.m:
        raise InvalidBetError(player, f"payoff length {f.m} != {ctx.p.m}")
    if not validate_betting(f, ctx.p):
        raise InvalidBetError(player, f"mean under forecast is {betting_mean(f, ctx.p)!r}, not 1")
    return f


def _run_two_sceptic(
    forecaster_i,
    forecaster_ii,
    sceptic_i: ScepticStrategy,
    sceptic_ii: ScepticStrategy,
    reality,
    horizon: int,
    exceptional_provider: Optional[Callable[[DensityPair], ExceptionalPair]],
    kind: str,
) -> Transcript:
    if horizon < 1:
        raise EngineError(f"horizon must be >= 1, got {horizon}")
    t = Transcript(kind=kind)
    log_k_i = LogCapital()
    log_k_ii = LogCapital()
    for n in range(1, horizon + 1):
        p_i = forecaster_i.forecast(n, t)
        p_ii = forecaster_ii.forecast(n, t)
        dp = mixture_densities(p_i, p_ii)

        exc = None
        if exceptional_provider is not None:
            exc = exceptional_provider(dp)
            if not is_valid_exceptional(exc, dp):
                raise InvalidExceptionalError(f"round {n}: announced pair is not exceptional")

        ctx_ii = BetContext(n=n, p=p_ii, dp=dp, exceptional=exc, history=t)
        f_ii = _checked_bet(sceptic_ii, ctx_ii, "Sceptic II")

        ctx_i = BetContext(n=n, p=p_i, dp=dp, opponent_bet=f_ii, exceptional=exc, history=t)
        f_i = _checked_bet(sceptic_i, ctx_i, "Sceptic I")

        rctx = RealityContext(n=n, p_i=p_i, p_ii=p_ii, dp=dp, f_i=f_i, f_ii=f_ii, history=t)
        omega = int(reality.choose(rctx))
        if not 0 <= omega < p_i.m:
            raise EngineError(f"round {n}: Reality chose outcome {omega} outside the space")

        log_k_i = log_k_i.times_payoff(f_i[omega])
        log_k_ii = log_k_ii.times_payoff(f_ii[omega])
        t.rounds.append(
            RoundRecord(
                index=n,
                p_i=p_i,
                p_ii=p_ii,
                dp=dp,
                f_ii=f_ii,
                f_i=f_i,
                outcome=omega,
                log_k_i=log_k_i,
                log_k_ii=log_k_ii,
                exceptional=exc,
                outcome_in_exceptional=exc.contains(omega) if exc is not None else None,
            )
        )
        sceptic_ii.observe(ctx_ii, omega)
        sceptic_i.observe(ctx_i, omega)
    return t


def run_competitive(forecaster_i, forecaster_ii, sceptic_i, sceptic_ii, reality,
                    horizon: int) -> Transcript:
    """Run the competitive testing protocol for `horizon` rounds."""
    return _run_two_sceptic(
        forecaster_i, forecaster_ii, sceptic_i, sceptic_ii, reality, horizon,
        exceptional_provider=None, kind="competitive",
    )


def run_modified(forecaster_i, forecaster_ii, sceptic_i, sceptic_ii, reality,
                 horizon: int,
                 exceptional_provider: Optional[Callable[[DensityPair], ExceptionalPair]] = None,
                 ) -> Transcript:
    """Run the modified protocol: an exceptional pair is announced each round.

    The default provider announces the canonical pair (each forecast's
    zero-density set).  Whether the realized outcome fell inside the
    announced pair is recorded on each round.
    """
    provider = exceptional_provider if exceptional_provider is not None else exceptional_pair
    return _run_two_sceptic(
        forecaster_i, forecaster_ii, sceptic_i, sceptic_ii, reality, horizon,
        exceptional_provider=provider, kind="modified",
    )


def additive_from_multiplicative(f: BettingFunction, log_k_prev: LogCapital) -> np.ndarray:
    """Convert a unit-mean payoff to the additive increment (f - 1) * K."""
    if log_k_prev.indefinite or math.isinf(log_k_prev.log_value):
        raise NonfiniteCapitalError("additive form needs a finite positive capital")
    k = math.exp(log_k_prev.log_value)
    pay = f.payoff
    g = np.empty_like(pay)
    for i, v in enumerate(pay):
        g[i] = ext_mul(v - 1.0, k) if not math.isinf(v) else INF
    return g


def _xi_mean(xi: np.ndarray, p: Distribution) -> float:
    live = p.probs > 0.0
    if np.any(np.isinf(xi[live])):
        raise InvalidXiError("test function is infinite on a charged outcome")
    return float(xi[live] @ p.probs[live])


def _validate_additive(g: np.ndarray, p: Distribution, capital: float) -> None:
    """Zero mean under p, bounded below by -capital; inf only off the support."""
    live = p.probs > 0.0
    if np.any(np.isinf(g[live]) & (g[live] > 0)):
        raise InvalidBetError("Sceptic", "additive bet infinite on a charged outcome")
    mean = float(g[live] @ p.probs[live])
    scale = float(np.max(np.abs(g[np.isfinite(g)]), initial=1.0))
    if abs(mean) > ADDITIVE_MEAN_TOL * scale:
        raise InvalidBetError("Sceptic", f"additive bet has mean {mean!r}, not 0")
    if np.any(g < -capital * (1.0 + 1e-12) - 1e-12):
        raise InvalidBetError("Sceptic", "additive bet risks bankruptcy")


def run_semimartingale(variant: str, representation: str, forecaster, xi_source,
                       sceptic: ScepticStrategy, reality, horizon: int) -> Transcript:
    """Run the semimartingale protocol.

    variant: "martingale" | "submartingale" | "supermartingale" constrains
    the sign of Reality's announced test-function mean.  representation:
    "multiplicative" | "additive" selects the capital update; the two are
    algebraically equivalent through g = (f - 1) * K.
    """
    if variant not in ("martingale", "submartingale", "supermartingale"):
        raise EngineError(f"unknown variant {variant!r}")
    if representation not in ("multiplicative", "additive"):
        raise EngineError(f"unknown representation {representation!r}")
    if horizon < 1:
        raise EngineError(f"horizon must be >= 1, got {horizon}")

    t = Transcript(kind=f"semimartingale/{variant}/{representation}")
    capital = 1.0
    log_k = LogCapital()
    for n in range(1, horizon + 1):
        p = forecaster.forecast(n, t)
        xi = np.asarray(xi_source.xi(n, p, t), dtype=float)
        if xi.shape != (p.m,):
            raise InvalidXiError(f"round {n}: test function has wrong shape")
        mean = _xi_mean(xi, p)
        if variant == "martingale" and abs(mean) > XI_MEAN_TOL:
            raise InvalidXiError(f"round {n}: martingale variant needs zero mean, got {mean!r}")
        if variant == "submartingale" and mean < -XI_MEAN_TOL:
            raise InvalidXiError(f"round {n}: submartingale variant needs mean >= 0, got {mean!r}")
        if variant == "supermartingale" and mean > XI_MEAN_TOL:
            raise InvalidXiError(f"round {n}: supermartingale variant needs mean <= 0, got {mean!r}")

        ctx = BetContext(n=n, p=p, xi=xi, history=t)
        g = sceptic.additive_bet(ctx)
        f: Optional[BettingFunction] = None
        if g is not None:
            g = np.asarray(g, dtype=float)
            _validate_additive(g, p, capital)
            if capital > 0.0 and math.isfinite(capital):
                f = BettingFunction(np.maximum(1.0 + g / capital, 0.0))
        else:
            f = _checked_bet(sceptic, ctx, "Sceptic")
            if not log_k.indefinite and math.isfinite(log_k.log_value):
                g = additive_from_multiplicative(f, log_k)

        rctx = RealityContext(n=n, p_i=p, p_ii=p, dp=mixture_densities(p, p), xi=xi, history=t)
        omega = int(reality.choose(rctx))
        if not 0 <= omega < p.m:
            raise EngineError(f"round {n}: Reality chose outcome {omega} outside the space")

        if representation == "additive":
            if g is None:
                raise NonfiniteCapitalError(f"round {n}: no additive form at capital {capital!r}")
            capital = max(capital + float(g[omega]), 0.0)
            log_k = LogCapital(ext_log(capital))
        else:
            if f is not None:
                payoff = f[omega]
            else:
                payoff = 1.0  # additive-native strategy with exhausted capital
            log_k = log_k.times_payoff(payoff)
            capital = log_k.value

        t.rounds.append(
            SemimartingaleRound(index=n, p=p, xi=xi, g=g, f=f, outcome=omega,
                                capital=capital, log_capital=log_k)
        )
        sceptic.observe(ctx, omega)
    return t
