"""Command-line front end: run protocols, verify guarantees, print divergences.

    opinion-merge run CONFIG.toml [--output transcript.csv]
    opinion-merge verify [--suite all] [--seed 0] [--report report.txt]
    opinion-merge divergence 0.5,0.5 0.9,0.1 --alpha 0,-3

Exit codes are the machine contract: 0 success, 1 failed verification check,
2 configuration error, 3 engine error (invalid bet or announcement).  The
environment variable OPINION_MERGE_SEED overrides the configured seed.
Config files are TOML; the full schema is documented in the README and every
unknown key is rejected.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .divergence import (
    alpha_divergence,
    chi2_divergence,
    hellinger_integral,
    kl_divergence,
    log_alpha_divergence,
)
from .engine import EngineError, RoundRecord, Transcript, run_competitive, run_modified
from .extmath import INF, LogCapital
from .measures import BettingFunction, Distribution, MeasureError, mixture_densities
from .scenarios import (
    REGIMES,
    gen_forecast_pair,
    gen_timid_pair,
    reality_adversarial,
    reality_from,
)
from .strategies import (
    ConstantSceptic,
    RandomValidSceptic,
    RatioTrackerSceptic,
    alpha_pair,
    big_alpha_sceptic_i,
    criterion_sceptic_i,
    growth_joint_anytime,
    growth_joint_fixed,
    growth_sceptic_i_anytime,
    growth_sceptic_i_fixed,
)
from .verify import SUITES, check_big_alpha_bound, check_growth_bounds, check_small_alpha_identity, run_suite

SEED_ENV = "OPINION_MERGE_SEED"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_ENGINE = 3

REALITIES = ("sample_I", "sample_II", "max_ratio", "min_ratio", "fixed")
JOINT_NAMES = ("alpha_pair", "growth_joint_fixed", "growth_joint_anytime")
SCEPTIC_I_NAMES = ("constant", "alpha_pair", "big_alpha", "ratio_tracker",
                   "criterion", "growth_fixed", "growth_anytime", "random")
SCEPTIC_II_NAMES = ("constant", "alpha_pair", "random")
CHECK_NAMES = ("small_alpha", "big_alpha", "growth_lower", "growth_upper")


class ConfigError(ValueError):
    pass


# -- config loading -----------------------------------------------------------

_SCHEMA = {
    "run": {"protocol", "horizon", "outcomes", "seed", "report_alpha", "output"},
    "scenario": {"regime", "c", "reality", "fixed_outcome"},
    "sceptics": {"joint", "alpha", "k_max"},
    "sceptic_I": {"name", "alpha", "c_max", "k_max", "seed"},
    "sceptic_II": {"name", "alpha", "seed"},
    "checks": {"names", "alpha", "c"},
}


def _reject_unknown(config: dict) -> None:
    for section, body in config.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key in body:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")


def _need(config: dict, section: str, key: str):
    try:
        return config[section][key]
    except KeyError:
        raise ConfigError(f"missing required key {section}.{key}") from None


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            config = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    _reject_unknown(config)

    protocol = _need(config, "run", "protocol")
    if protocol not in ("competitive", "modified"):
        raise ConfigError(f"run.protocol must be competitive or modified, got {protocol!r}")
    horizon = _need(config, "run", "horizon")
    if not isinstance(horizon, int) or horizon < 1:
        raise ConfigError(f"run.horizon must be an integer >= 1, got {horizon!r}")
    outcomes = _need(config, "run", "outcomes")
    if not isinstance(outcomes, int) or outcomes < 2:
        raise ConfigError(f"run.outcomes must be an integer >= 2, got {outcomes!r}")
    seed = _need(config, "run", "seed")
    if not isinstance(seed, int):
        raise ConfigError(f"run.seed must be an integer, got {seed!r}")
    if os.environ.get(SEED_ENV):
        try:
            config["run"]["seed"] = int(os.environ[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer") from None

    regime = _need(config, "scenario", "regime")
    if regime not in REGIMES + ("timid",):
        raise ConfigError(f"scenario.regime must be one of {REGIMES + ('timid',)}, got {regime!r}")
    if regime == "timid":
        c = _need(config, "scenario", "c")
        if not c > 1:
            raise ConfigError(f"scenario.c must exceed 1 for the timid regime, got {c!r}")
    elif "c" in config["scenario"]:
        raise ConfigError("scenario.c is only valid for the timid regime")
    reality = _need(config, "scenario", "reality")
    if reality not in REALITIES:
        raise ConfigError(f"scenario.reality must be one of {REALITIES}, got {reality!r}")
    if reality == "fixed":
        fixed = _need(config, "scenario", "fixed_outcome")
        if not isinstance(fixed, int) or not 0 <= fixed < outcomes:
            raise ConfigError(f"scenario.fixed_outcome must name an outcome, got {fixed!r}")
    elif "fixed_outcome" in config["scenario"]:
        raise ConfigError("scenario.fixed_outcome is only valid for reality = 'fixed'")

    has_joint = "sceptics" in config
    has_sides = "sceptic_I" in config or "sceptic_II" in config
    if has_joint and has_sides:
        raise ConfigError("give either [sceptics] joint or per-side sections, not both")
    if not has_joint and not has_sides:
        raise ConfigError("no Sceptics configured: add [sceptics] or [sceptic_I]/[sceptic_II]")
    if has_joint:
        _validate_joint(config, horizon)
    else:
        _validate_side(config, "sceptic_I", SCEPTIC_I_NAMES, horizon)
        _validate_side(config, "sceptic_II", SCEPTIC_II_NAMES, horizon)

    if "checks" in config:
        names = config["checks"].get("names", [])
        if not isinstance(names, list) or any(n not in CHECK_NAMES for n in names):
            raise ConfigError(f"checks.names must be a list drawn from {CHECK_NAMES}")
    return config


def _validate_alpha(alpha, where: str, *, below_minus_one=False, open_unit=False) -> float:
    if not isinstance(alpha, (int, float)):
        raise ConfigError(f"{where} must be a number, got {alpha!r}")
    alpha = float(alpha)
    if alpha in (-1.0, 1.0):
        raise ConfigError(f"violated precondition: alpha must differ from -1 and 1 ({where} = {alpha})")
    if below_minus_one and not alpha < -1.0:
        raise ConfigError(f"violated precondition: alpha must be < -1 ({where} = {alpha})")
    if open_unit and not -1.0 < alpha < 1.0:
        raise ConfigError(f"violated precondition: alpha must lie in (-1, 1) ({where} = {alpha})")
    return alpha


def _validate_joint(config: dict, horizon: int) -> None:
    joint = _need(config, "sceptics", "joint")
    if joint not in JOINT_NAMES:
        raise ConfigError(f"sceptics.joint must be one of {JOINT_NAMES}, got {joint!r}")
    if joint == "alpha_pair":
        _validate_alpha(_need(config, "sceptics", "alpha"), "sceptics.alpha")
    if joint == "growth_joint_fixed" and horizon < 2:
        raise ConfigError("violated precondition: growth_joint_fixed needs run.horizon >= 2")
    if joint == "growth_joint_anytime":
        k_max = _need(config, "sceptics", "k_max")
        if not isinstance(k_max, int) or k_max < 2:
            raise ConfigError(f"sceptics.k_max must be an integer >= 2, got {k_max!r}")


def _validate_side(config: dict, section: str, allowed, horizon: int) -> None:
    name = _need(config, section, "name")
    if name not in allowed:
        raise ConfigError(f"{section}.name must be one of {allowed}, got {name!r}")
    if name == "alpha_pair":
        _validate_alpha(_need(config, section, "alpha"), f"{section}.alpha")
    elif name == "big_alpha":
        _validate_alpha(_need(config, section, "alpha"), f"{section}.alpha", below_minus_one=True)
    elif name == "criterion":
        _validate_alpha(_need(config, section, "alpha"), f"{section}.alpha", open_unit=True)
    elif name == "growth_anytime":
        k_max = _need(config, section, "k_max")
        if not isinstance(k_max, int) or k_max < 2:
            raise ConfigError(f"{section}.k_max must be an integer >= 2, got {k_max!r}")
    elif name == "growth_fixed" and horizon < 1:
        raise ConfigError("violated precondition: growth_fixed needs run.horizon >= 1")


# -- player construction ------------------------------------------------------

def _build_forecasters(config: dict):
    sc = config["scenario"]
    seed = config["run"]["seed"]
    m = config["run"]["outcomes"]
    if sc["regime"] == "timid":
        return gen_timid_pair(seed, m, float(sc["c"]))
    return gen_forecast_pair(seed, m, sc["regime"])


def _build_reality(config: dict):
    sc = config["scenario"]
    kind = sc["reality"]
    if kind == "sample_I":
        return reality_from("I", config["run"]["seed"] + 1)
    if kind == "sample_II":
        return reality_from("II", config["run"]["seed"] + 1)
    if kind == "fixed":
        return reality_adversarial("fixed", outcome=sc["fixed_outcome"])
    return reality_adversarial(kind)


def _build_sceptics(config: dict):
    horizon = config["run"]["horizon"]
    if "sceptics" in config:
        body = config["sceptics"]
        joint = body["joint"]
        if joint == "alpha_pair":
            return alpha_pair(float(body["alpha"]))
        if joint == "growth_joint_fixed":
            return growth_joint_fixed(horizon)
        return growth_joint_anytime(body["k_max"])

    seed = config["run"]["seed"]
    body = config["sceptic_I"]
    name = body["name"]
    if name == "constant":
        s_i = ConstantSceptic()
    elif name == "alpha_pair":
        s_i = alpha_pair(float(body["alpha"]))[0]
    elif name == "big_alpha":
        s_i = big_alpha_sceptic_i(float(body["alpha"]))
    elif name == "ratio_tracker":
        s_i = RatioTrackerSceptic()
    elif name == "criterion":
        s_i = criterion_sceptic_i(float(body["alpha"]), body.get("c_max", 64))
    elif name == "growth_fixed":
        s_i = growth_sceptic_i_fixed(horizon)
    elif name == "growth_anytime":
        s_i = growth_sceptic_i_anytime(body["k_max"])
    else:
        s_i = RandomValidSceptic(body.get("seed", seed + 7))

    body = config["sceptic_II"]
    name = body["name"]
    if name == "constant":
        s_ii = ConstantSceptic()
    elif name == "alpha_pair":
        s_ii = alpha_pair(float(body["alpha"]))[1]
    else:
        s_ii = RandomValidSceptic(body.get("seed", seed + 8))
    return s_i, s_ii


def _report_alpha(config: dict) -> float:
    run = config["run"]
    if "report_alpha" in run:
        return _validate_alpha(run["report_alpha"], "run.report_alpha")
    for section in ("sceptics", "sceptic_I", "sceptic_II"):
        if section in config and "alpha" in config[section]:
            return float(config[section]["alpha"])
    return 0.0


# -- transcript CSV -----------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, LogCapital):
        if x.indefinite:
            return "indefinite"
        x = x.log_value
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return format(x, ".17g")


def _parse_value(tok: str) -> float:
    if tok == "inf":
        return INF
    if tok == "-inf":
        return -INF
    return float(tok)


def _parse_log_capital(tok: str) -> LogCapital:
    if tok == "indefinite":
        return LogCapital(0.0, indefinite=True)
    return LogCapital(_parse_value(tok))


def _parse_distribution_exact(vals: list[float]) -> Distribution:
    """Validate a stored probability vector without renormalizing it.

    Exported vectors already sum to 1 to float precision; dividing by the
    sum again would shift entries by an ulp and break exact round-trips.
    """
    if any(not 0.0 <= x < INF for x in vals):
        raise MeasureError(f"probabilities must be finite and >= 0, got {vals}")
    if abs(sum(vals) - 1.0) > 1e-9:
        raise MeasureError(f"probabilities sum to {sum(vals)!r}, not 1")
    return Distribution._trusted(vals)


def transcript_header(m: int) -> list[str]:
    cols = ["n"]
    for tag in ("p_I", "p_II", "f_I", "f_II"):
        cols.extend(f"{tag}_{w}" for w in range(m))
    cols.extend(["omega", "logK_I", "logK_II", "D_bracket_alpha_cum", "D_kl_cum"])
    return cols


def write_transcript_csv(t: Transcript, path: str, report_alpha: float = 0.0) -> None:
    """One row per round; floats carry 17 significant digits, so reading the
    file back reproduces the run bit for bit."""
    if not t.rounds:
        raise ValueError("cannot export an empty transcript")
    m = t.rounds[0].p_i.m
    cum_d = 0.0
    cum_kl = 0.0
    lines = [",".join(transcript_header(m))]
    for rec in t.rounds:
        d = log_alpha_divergence(rec.dp, report_alpha)
        kl = kl_divergence(rec.dp)
        cum_d = cum_d + d if not (math.isinf(cum_d) or math.isinf(d)) else INF
        cum_kl = cum_kl + kl if not (math.isinf(cum_kl) or math.isinf(kl)) else INF
        row = [str(rec.index)]
        for vec in (rec.p_i.tolist(), rec.p_ii.tolist(), rec.f_i.tolist(), rec.f_ii.tolist()):
            row.extend(_fmt(v) for v in vec)
        row.append(str(rec.outcome))
        row.extend((_fmt(rec.log_k_i), _fmt(rec.log_k_ii), _fmt(cum_d), _fmt(cum_kl)))
        lines.append(",".join(row))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_transcript_csv(path: str, kind: str = "competitive") -> Transcript:
    """Rebuild a transcript from its CSV export.

    Density pairs are recomputed from the forecasts; the cumulative
    divergence columns are derived data and not stored on the records.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = lines[0].split(",")
    m = sum(1 for col in header if col.startswith("p_I_"))
    if m < 2:
        raise ValueError(f"malformed transcript header in {path}")
    t = Transcript(kind=kind)
    for ln in lines[1:]:
        toks = ln.split(",")
        idx = 1
        vecs = []
        for _ in range(4):
            vecs.append([_parse_value(tok) for tok in toks[idx:idx + m]])
            idx += m
        p_i = _parse_distribution_exact(vecs[0])
        p_ii = _parse_distribution_exact(vecs[1])
        t.rounds.append(RoundRecord(
            index=int(toks[0]),
            p_i=p_i,
            p_ii=p_ii,
            dp=mixture_densities(p_i, p_ii),
            f_i=BettingFunction(vecs[2]),
            f_ii=BettingFunction(vecs[3]),
            outcome=int(toks[idx]),
            log_k_i=_parse_log_capital(toks[idx + 1]),
            log_k_ii=_parse_log_capital(toks[idx + 2]),
        ))
    return t


def write_report(reports, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for r in reports:
            line = (f"check={r.name} pass={'true' if r.passed else 'false'}"
                    f" max_violation={_fmt(r.max_violation)} tolerance={_fmt(r.tolerance)}")
            if r.skipped:
                line += " skipped=true"
            if r.note:
                line += f" note={r.note.replace(' ', '_')}"
            fh.write(line + "\n")


# -- subcommands --------------------------------------------------------------

def _run_checks(config: dict, t: Transcript) -> list:
    if "checks" not in config:
        return []
    body = config["checks"]
    alpha = float(body.get("alpha", _report_alpha(config)))
    c = float(body.get("c", 2.0))
    reports = []
    for name in body.get("names", []):
        if name == "small_alpha":
            reports.append(check_small_alpha_identity(t, alpha))
        elif name == "big_alpha":
            reports.append(check_big_alpha_bound(t, alpha))
        elif name == "growth_lower":
            reports.append(check_growth_bounds(t, c, "fixed_lower"))
        else:
            reports.append(check_growth_bounds(t, c, "fixed_upper"))
    return reports


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
        forecaster_i, forecaster_ii = _build_forecasters(config)
        sceptic_i, sceptic_ii = _build_sceptics(config)
        reality = _build_reality(config)
    except (ConfigError, MeasureError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        run = run_modified if config["run"]["protocol"] == "modified" else run_competitive
        t = run(forecaster_i, forecaster_ii, sceptic_i, sceptic_ii, reality,
                config["run"]["horizon"])
    except EngineError as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    out = args.output or config["run"].get("output", "transcript.csv")
    write_transcript_csv(t, out, _report_alpha(config))
    print(f"wrote {len(t.rounds)} rounds to {out}")
    for r in _run_checks(config, t):
        print(r)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV, "0") or "0")
    try:
        reports = run_suite(args.suite, seed)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for r in reports:
        print(r)
    if args.report:
        write_report(reports, args.report)
    failed = sum(1 for r in reports if not r.passed and not r.skipped)
    print(f"{len(reports) - failed}/{len(reports)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def _parse_distribution(text: str) -> Distribution:
    try:
        return Distribution([float(tok) for tok in text.split(",")])
    except (ValueError, MeasureError) as exc:
        raise ConfigError(f"malformed probability vector {text!r}: {exc}") from None


def cmd_divergence(args) -> int:
    try:
        p_i = _parse_distribution(args.p_i)
        p_ii = _parse_distribution(args.p_ii)
        if p_i.m != p_ii.m:
            raise ConfigError("the two vectors must have the same length")
        alphas = [_validate_alpha(float(tok), "alpha")
                  for tok in args.alpha.split(",")]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    dp = mixture_densities(p_i, p_ii)

    def cell(v: float) -> str:
        return f"{v:.7f}" if math.isfinite(v) else ("inf" if v > 0 else "-inf")

    print(f"{'alpha':>8} {'hellinger':>12} {'alpha_div':>12} {'log_alpha_div':>14} {'kl':>12} {'chi2':>12}")
    kl = kl_divergence(dp)
    chi2 = chi2_divergence(dp)
    for a in alphas:
        print(f"{a:>8g} {cell(hellinger_integral(dp, a)):>12} {cell(alpha_divergence(dp, a)):>12} "
              f"{cell(log_alpha_divergence(dp, a)):>14} {cell(kl):>12} {cell(chi2):>12}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="opinion-merge",
        description="Game-theoretic testing of competing probability forecasters.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured protocol and export the transcript")
    p_run.add_argument("config", help="TOML run configuration")
    p_run.add_argument("--output", help="transcript CSV path (overrides config)")
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("--suite", default="all", choices=SUITES)
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--report", help="write a structured report file")
    p_ver.set_defaults(func=cmd_verify)

    p_div = sub.add_parser("divergence", help="print divergences between two forecasts")
    p_div.add_argument("p_i", help="comma-separated probabilities for forecast I")
    p_div.add_argument("p_ii", help="comma-separated probabilities for forecast II")
    p_div.add_argument("--alpha", default="0", help="comma-separated orders")
    p_div.set_defaults(func=cmd_divergence)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
