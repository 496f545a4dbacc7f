"""Game-theoretic testing of competing probability forecasters.

Two Forecasters announce per-round distributions over a finite outcome
space; two Sceptics bet fair (unit-mean) payoff profiles against them and
their capitals measure how discredited each forecast stream is.  The
strategies in :mod:`opinion_merge.strategies` make the weighted log capitals
track cumulative alpha-divergences exactly, and :mod:`opinion_merge.verify`
re-checks every identity and bound on recorded transcripts.
"""

from .extmath import INF, LogCapital, ext_exp, ext_log, ext_mul, ext_pow, pos_part, safe_ratio, truncate_one
from .measures import (
    BettingFunction,
    DensityPair,
    Distribution,
    ExceptionalPair,
    MeasureError,
    OutcomeSpace,
    betting_mean,
    exceptional_pair,
    is_absolutely_continuous,
    is_c_timid,
    mixture_densities,
    validate_betting,
)
from .divergence import (
    AlphaParam,
    alpha_divergence,
    chi2_divergence,
    hellinger_integral,
    kl_divergence,
    log_alpha_divergence,
    renyi_info_gain,
)
from .engine import (
    BetContext,
    EngineError,
    InvalidBetError,
    InvalidExceptionalError,
    InvalidXiError,
    NonfiniteCapitalError,
    RoundRecord,
    ScepticStrategy,
    SemimartingaleRound,
    Transcript,
    additive_from_multiplicative,
    run_competitive,
    run_modified,
    run_semimartingale,
)
from .strategies import (
    ConstantSceptic,
    MixtureSceptic,
    RandomValidSceptic,
    RatioTrackerSceptic,
    WeightSumError,
    alpha_pair,
    big_alpha_sceptic_i,
    borel_cantelli_forcer,
    criterion_sceptic_i,
    growth_joint_anytime,
    growth_joint_fixed,
    growth_sceptic_i_anytime,
    growth_sceptic_i_fixed,
    mix_strategies,
    quadratic_forcer,
    set_aside_transform,
    submartingale_center,
)
from .verify import (
    CheckReport,
    check_big_alpha_bound,
    check_density_ratio_tail,
    check_divergence_relations,
    check_growth_bounds,
    check_small_alpha_identity,
    check_truncated_log_bound,
    density_ratio_tail_constant,
    truncated_log_bound_constant,
)
from .scenarios import (
    GenerationFailedError,
    gen_forecast_pair,
    gen_timid_pair,
    reality_adversarial,
    reality_from,
)

__version__ = "0.1.0"
