"""Checkers that evaluate both sides of every capital identity and bound.

Each check walks a transcript (or a batch of distribution pairs), computes
the left and right side of the claimed relation, and reports the worst
violation against the stated tolerance.  Identities use 1e-9 relative
tolerance, closed-form cross-checks 1e-12, and inequalities get 1e-9
additive slack.  Rounds where both sides are +inf, or where the left side
is an indefinite inf - inf combination, pass by convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .divergence import (
    alpha_divergence,
    chi2_divergence,
    kl_divergence,
    log_alpha_divergence,
)
from .engine import BetContext, Transcript
from .extmath import INF, ext_log, truncate_one
from .measures import DensityPair, is_c_timid
from .strategies import alpha_pair

IDENTITY_REL_TOL = 1e-9
INEQ_SLACK = 1e-9
CROSS_CHECK_TOL = 1e-12
MONOTONE_SLACK = 1e-10

GROWTH_VARIANTS = ("fixed_lower", "fixed_upper", "anytime_intermediate")


@dataclass
class CheckReport:
    """Outcome of one verification: pass iff max violation <= tolerance."""

    name: str
    passed: bool
    max_violation: float
    tolerance: float
    rounds: list = field(default_factory=list)  # per-round (left, right) pairs
    skipped: bool = False
    note: str = ""

    def __str__(self) -> str:
        status = "SKIPPED" if self.skipped else ("PASS" if self.passed else "FAIL")
        out = f"{self.name}: {status} (max violation {self.max_violation:.3e}, tol {self.tolerance:.0e})"
        if self.note:
            out += f" [{self.note}]"
        return out


def _capital_terms(rec, coeff_i: float, coeff_ii: float):
    """The two weighted log-capital terms; None marks an indefinite capital."""
    if rec.log_k_i.indefinite or rec.log_k_ii.indefinite:
        return None
    a = coeff_i * rec.log_k_i.log_value
    b = coeff_ii * rec.log_k_ii.log_value
    return a, b


def check_small_alpha_identity(t: Transcript, alpha: float,
                               rel_tol: float = IDENTITY_REL_TOL) -> CheckReport:
    """Weighted log capitals vs cumulative log-form alpha-divergence, per round.

    Checks 2/(1+a) ln K_I + 2/(1-a) ln K_II = sum of log-form divergences
    after every round of a transcript played by the coupled alpha-pair.
    """
    coeff_i = 2.0 / (1.0 + alpha)
    coeff_ii = 2.0 / (1.0 - alpha)
    cum = 0.0
    worst = 0.0
    rounds = []
    for rec in t.rounds:
        d = log_alpha_divergence(rec.dp, alpha)
        cum = cum + d if not (math.isinf(cum) or math.isinf(d)) else INF
        terms = _capital_terms(rec, coeff_i, coeff_ii)
        if terms is None:
            rounds.append((math.nan, cum))
            continue  # indefinite capital: true by convention
        a, b = terms
        if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
            rounds.append((math.nan, cum))
            continue  # inf - inf: true by convention
        lhs = a + b
        rounds.append((lhs, cum))
        if math.isinf(lhs) or math.isinf(cum):
            if not (lhs == INF and cum == INF):
                worst = INF
            continue
        worst = max(worst, abs(lhs - cum) / max(1.0, abs(cum)))
    return CheckReport("small_alpha_identity", worst <= rel_tol, worst, rel_tol, rounds)


def check_big_alpha_bound(t: Transcript, alpha: float,
                          slack: float = INEQ_SLACK) -> CheckReport:
    """One-sided version for alpha < -1: the weighted sum never exceeds the
    cumulative divergence, whatever Sceptic II does."""
    if not alpha < -1.0:
        raise ValueError(f"the bound is for alpha < -1, got {alpha}")
    coeff_i = 2.0 / (1.0 + alpha)
    coeff_ii = 2.0 / (1.0 - alpha)
    cum = 0.0
    worst = 0.0
    rounds = []
    for rec in t.rounds:
        d = log_alpha_divergence(rec.dp, alpha)
        cum = cum + d if not (math.isinf(cum) or math.isinf(d)) else INF
        terms = _capital_terms(rec, coeff_i, coeff_ii)
        if terms is None:
            rounds.append((math.nan, cum))
            continue
        a, b = terms
        if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
            rounds.append((math.nan, cum))
            continue
        lhs = a + b
        rounds.append((lhs, cum))
        if cum == INF or lhs == -INF:
            continue
        if lhs == INF:
            worst = INF
            continue
        worst = max(worst, lhs - cum)
    return CheckReport("big_alpha_bound", worst <= slack, worst, slack, rounds)


def replay_alpha_pair(t: Transcript, alpha: float) -> tuple[float, float]:
    """Log capitals the coupled alpha-pair would have earned on this play.

    Re-derives both Sceptics' bets round by round from the recorded forecasts
    and outcomes, independently of whatever strategies actually played.
    """
    s_i, s_ii = alpha_pair(alpha)
    lk_i = 0.0
    lk_ii = 0.0
    for rec in t.rounds:
        ctx = BetContext(n=rec.index, p=rec.p_i, dp=rec.dp)
        f_i = s_i.bet(ctx)
        f_ii = s_ii.bet(ctx)
        lk_i += ext_log(f_i[rec.outcome])
        lk_ii += ext_log(f_ii[rec.outcome])
        s_i.observe(ctx, rec.outcome)
        s_ii.observe(ctx, rec.outcome)
    return lk_i, lk_ii


def check_growth_bounds(t: Transcript, c: float, variant: str, *,
                        epsilon: Optional[float] = None,
                        mixture_penalty: float = 0.0,
                        capitals: Optional[tuple[float, float]] = None,
                        horizon: Optional[int] = None,
                        slack: float = INEQ_SLACK) -> CheckReport:
    """Kullback-Leibler growth bounds on c-timid plays, evaluated once.

    fixed_lower (horizon-tuned joint pair):
        ln K_II >= sum KL - (sqrt(N)-1) (ln K_I + 2 c ln^2 c)
    fixed_upper (horizon-tuned Sceptic I, any Sceptic II):
        ln K_II <= sum KL + (sqrt(N)+1) (ln K_I + c ln^2 c)
    anytime_intermediate (per tuning epsilon, with a mixture penalty for the
    anytime construction):
        ln K_II + pen >= sum KL - N eps c^eps ln^2(c)/2 - ((1-eps)/eps) (ln K_I + pen)

    N is the horizon the strategies were tuned for; it defaults to the
    transcript length and can be passed explicitly when a play stopped early
    (the penalty coefficients come from the tuning, not the rounds played).
    Rounds that are not c-timid make the report SKIPPED (note NOT_TIMID).
    """
    if variant not in GROWTH_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {GROWTH_VARIANTS}")
    name = f"growth_{variant}"
    for rec in t.rounds:
        if not is_c_timid(rec.dp, c):
            return CheckReport(name, False, INF, slack, skipped=True,
                               note=f"NOT_TIMID at round {rec.index}")
    n = horizon if horizon is not None else len(t.rounds)
    cum_kl = sum(kl_divergence(rec.dp) for rec in t.rounds)
    if capitals is not None:
        lk_i, lk_ii = capitals
    else:
        lk_i = t.final_log_k_i.log_value
        lk_ii = t.final_log_k_ii.log_value
    ln2c = math.log(c) ** 2

    if variant == "fixed_lower":
        bound = cum_kl - (math.sqrt(n) - 1.0) * (lk_i + 2.0 * c * ln2c)
        violation = bound - lk_ii
        rounds = [(lk_ii, bound)]
    elif variant == "fixed_upper":
        bound = cum_kl + (math.sqrt(n) + 1.0) * (lk_i + c * ln2c)
        violation = lk_ii - bound
        rounds = [(lk_ii, bound)]
    else:
        if epsilon is None or not 0.0 < epsilon < 1.0:
            raise ValueError("anytime_intermediate needs the strategy's epsilon in (0, 1)")
        if horizon is not None:
            raise ValueError("the intermediate bound accumulates per round; "
                             "it takes no horizon override")
        bound = (cum_kl
                 - 0.5 * n * epsilon * (c ** epsilon) * ln2c
                 - ((1.0 - epsilon) / epsilon) * (lk_i + mixture_penalty))
        violation = bound - (lk_ii + mixture_penalty)
        rounds = [(lk_ii + mixture_penalty, bound)]
    violation = max(violation, 0.0)
    return CheckReport(name, violation <= slack, violation, slack, rounds)


def density_ratio_tail_constant(alpha: float) -> float:
    """Constant C(a) with P_I{beta_i > e beta_ii} <= C(a) * alpha_divergence.

    C(a) = (1-a^2)/4 / ((1-a)/2 + (1+a)/(2e) - e^(-(1+a)/2)); finite and
    positive exactly for a in (-1, 1), blowing up at both ends.
    """
    if not -1.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (-1, 1), got {alpha}")
    denom = (1.0 - alpha) / 2.0 + (1.0 + alpha) / (2.0 * math.e) - math.exp(-(1.0 + alpha) / 2.0)
    return (1.0 - alpha * alpha) / 4.0 / denom


def check_density_ratio_tail(dp: DensityPair, alpha: float,
                             tol: float = CROSS_CHECK_TOL) -> CheckReport:
    """Mass of {beta_i > e beta_ii} under forecast I vs the divergence bound."""
    lhs = float(dp.p_i[dp.beta_i > math.e * dp.beta_ii].sum())
    rhs = density_ratio_tail_constant(alpha) * alpha_divergence(dp, alpha)
    violation = max(0.0, lhs - rhs) if rhs != INF else 0.0
    return CheckReport("density_ratio_tail", violation <= tol, violation, tol,
                       rounds=[(lhs, rhs)])


def truncated_log_bound_constant(gamma: float) -> float:
    """Smallest B > 1 used to dominate x U(ln x) + x U^2(ln x) for x > 0.

    B(g) = max(5 e^(1-g)/(1-g) + 1, (2e - e^g)/(e - e^g)); finite for
    g in (0, 1), diverging as g -> 1.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    first = 5.0 * math.exp(1.0 - gamma) / (1.0 - gamma) + 1.0
    second = (2.0 * math.e - math.exp(gamma)) / (math.e - math.exp(gamma))
    return max(first, second)


def check_truncated_log_bound(gamma: float, x_grid: Sequence[float],
                              slack: float = INEQ_SLACK) -> CheckReport:
    """x U(ln x) + x U^2(ln x) <= B(x-1) + ((B-1)/g)(1 - x^g) on the grid."""
    b = truncated_log_bound_constant(gamma)
    worst = 0.0
    for x in x_grid:
        if not x > 0.0:
            raise ValueError(f"grid points must be positive, got {x}")
        u = truncate_one(math.log(x))
        lhs = x * u + x * u * u
        rhs = b * (x - 1.0) + (b - 1.0) / gamma * (1.0 - x ** gamma)
        worst = max(worst, lhs - rhs)
    return CheckReport("truncated_log_bound", worst <= slack, worst, slack)


def check_density_ratio_tail_many(pairs: Sequence[DensityPair], alpha: float,
                                  tol: float = CROSS_CHECK_TOL) -> CheckReport:
    """Worst tail-vs-divergence violation over a batch of pairs."""
    worst = 0.0
    for dp in pairs:
        r = check_density_ratio_tail(dp, alpha, tol)
        worst = max(worst, r.max_violation)
    return CheckReport(f"density_ratio_tail[alpha={alpha}]", worst <= tol, worst, tol)


def check_divergence_relations(pairs: Sequence[DensityPair],
                               alpha_grid: Sequence[float]) -> CheckReport:
    """Nonnegativity, linear-vs-log ordering, closed-form special cases and
    the order-monotonicity of the alpha-divergence family.

    Each class of relation carries its own tolerance (closed-form anchors
    1e-12, inequalities 1e-9, monotonicity 1e-10); the reported violation is
    the worst one measured in units of its tolerance, so pass means <= 1.
    """
    worst = 0.0
    note = ""

    def bump(violation: float, tol: float, what: str) -> None:
        nonlocal worst, note
        scaled = violation / tol
        if scaled > worst:
            worst = scaled
            note = what

    fuji_grid = np.linspace(-0.99, 0.99, 23)
    for dp in pairs:
        for a in alpha_grid:
            lin = alpha_divergence(dp, a)
            logf = log_alpha_divergence(dp, a)
            bump(-min(lin, 0.0), INEQ_SLACK, f"negative value at alpha={a}")
            bump(-min(logf, 0.0), INEQ_SLACK, f"negative value at alpha={a}")
            if not (math.isinf(lin) or math.isinf(logf)):
                if abs(a) < 1.0:
                    bump(lin - logf, INEQ_SLACK, f"ordering at alpha={a}")
                else:
                    bump(logf - lin, INEQ_SLACK, f"ordering at alpha={a}")

        chi2 = chi2_divergence(dp)
        at_m3 = alpha_divergence(dp, -3.0)
        if not (math.isinf(chi2) or math.isinf(at_m3)):
            bump(abs(chi2 - at_m3) / max(1.0, abs(chi2)), CROSS_CHECK_TOL,
                 "chi-square anchor")
        live = dp.support
        hell = 2.0 * float(np.sum(
            (np.sqrt(dp.beta_i[live]) - np.sqrt(dp.beta_ii[live])) ** 2 * dp.q.probs[live]))
        at_0 = alpha_divergence(dp, 0.0)
        bump(abs(hell - at_0) / max(1.0, abs(hell)), CROSS_CHECK_TOL, "Hellinger anchor")

        # (1-a) D^(a) decreasing and (1+a) D^(a) increasing over (-1, 1)
        vals = [alpha_divergence(dp, a) for a in fuji_grid]
        if all(math.isfinite(v) for v in vals):
            dec = [(1.0 - a) * v for a, v in zip(fuji_grid, vals)]
            inc = [(1.0 + a) * v for a, v in zip(fuji_grid, vals)]
            for u, v in zip(dec, dec[1:]):
                bump(v - u, MONOTONE_SLACK, "monotone decreasing form")
            for u, v in zip(inc, inc[1:]):
                bump(u - v, MONOTONE_SLACK, "monotone increasing form")

    return CheckReport("divergence_relations", worst <= 1.0, worst, 1.0, note=note)


# -- deterministic verification suites ---------------------------------------

SUITES = ("all", "divergence", "identity", "bounds", "growth")

_SUITE_ALPHAS = (-3.0, -0.5, 0.0, 0.5, 3.0)
_TAIL_ALPHAS = (-0.9, -0.5, 0.0, 0.5, 0.9)
_TRUNC_GAMMAS = (0.1, 0.3, 0.5, 0.7, 0.9)


def suite_divergence(seed: int) -> list[CheckReport]:
    from .scenarios import gen_random_pairs

    pairs = gen_random_pairs(seed, 1000)
    return [check_divergence_relations(pairs, _SUITE_ALPHAS)]


def suite_identity(seed: int) -> list[CheckReport]:
    """The capital identity on a grid of regimes, orders and Reality styles."""
    from .engine import run_competitive
    from .scenarios import (gen_forecast_pair, gen_timid_pair,
                            reality_adversarial, reality_from)
    from .strategies import alpha_pair

    reports = []
    for alpha in _SUITE_ALPHAS:
        for regime in ("agree", "drift", "timid"):
            for adversarial in (False, True):
                if regime == "timid":
                    f_i, f_ii = gen_timid_pair(seed, 3, 2.0)
                else:
                    f_i, f_ii = gen_forecast_pair(seed, 3, regime)
                reality = (reality_adversarial("max_ratio") if adversarial
                           else reality_from("I", seed + 1))
                s_i, s_ii = alpha_pair(alpha)
                t = run_competitive(f_i, f_ii, s_i, s_ii, reality, 150)
                r = check_small_alpha_identity(t, alpha)
                style = "adversarial" if adversarial else "sampling"
                r.name = f"small_alpha_identity[alpha={alpha},{regime},{style}]"
                reports.append(r)
    return reports


def suite_bounds(seed: int) -> list[CheckReport]:
    """Tail-vs-divergence bound on random pairs and the truncated-log bound."""
    from .scenarios import gen_random_pairs

    pairs = gen_random_pairs(seed, 1000)
    reports = [check_density_ratio_tail_many(pairs, a) for a in _TAIL_ALPHAS]
    x_grid = np.geomspace(1e-6, 1e3, 10_000)
    for g in _TRUNC_GAMMAS:
        r = check_truncated_log_bound(g, x_grid)
        r.name = f"truncated_log_bound[gamma={g}]"
        reports.append(r)
    return reports


def suite_growth(seed: int) -> list[CheckReport]:
    from .engine import run_competitive
    from .scenarios import gen_timid_pair, reality_adversarial, reality_from
    from .strategies import (RandomValidSceptic, epsilon_anytime,
                             growth_joint_anytime, growth_joint_fixed,
                             growth_sceptic_i_fixed)

    c = 2.0
    reports = []
    for n in (4, 25, 100):
        f_i, f_ii = gen_timid_pair(seed, 3, c)
        s_i, s_ii = growth_joint_fixed(n)
        t = run_competitive(f_i, f_ii, s_i, s_ii, reality_from("I", seed + 1), n)
        r = check_growth_bounds(t, c, "fixed_lower")
        r.name = f"growth_fixed_lower[N={n}]"
        reports.append(r)

        f_i, f_ii = gen_timid_pair(seed + 1, 3, c)
        t = run_competitive(f_i, f_ii, growth_sceptic_i_fixed(n),
                            RandomValidSceptic(seed + 2),
                            reality_adversarial("min_ratio"), n)
        r = check_growth_bounds(t, c, "fixed_upper")
        r.name = f"growth_fixed_upper[N={n}]"
        reports.append(r)

    k_max = 8
    f_i, f_ii = gen_timid_pair(seed + 3, 2, c)
    s_i, s_ii = growth_joint_anytime(k_max)
    t = run_competitive(f_i, f_ii, s_i, s_ii, reality_from("I", seed + 4), 200)
    for k in range(2, k_max + 1):
        eps = epsilon_anytime(k)
        lk = replay_alpha_pair(t, -1.0 + 2.0 * eps)
        r = check_growth_bounds(t, c, "anytime_intermediate", epsilon=eps, capitals=lk)
        r.name = f"growth_intermediate_sub[k={k}]"
        reports.append(r)
        r = check_growth_bounds(t, c, "anytime_intermediate", epsilon=eps,
                                mixture_penalty=2.0 * math.log(k))
        r.name = f"growth_intermediate_mix[k={k}]"
        reports.append(r)
    return reports


def run_suite(name: str, seed: int) -> list[CheckReport]:
    """Run one named verification suite (or all of them)."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    if name == "all":
        out = []
        for part in ("divergence", "identity", "bounds", "growth"):
            out.extend(run_suite(part, seed))
        return out
    return {
        "divergence": suite_divergence,
        "identity": suite_identity,
        "bounds": suite_bounds,
        "growth": suite_growth,
    }[name](seed)
