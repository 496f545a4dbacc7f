"""One-sided bounds: what Sceptic I can enforce single-handedly.

For orders below -1 the coupled identity weakens to an inequality that
Sceptic I can guarantee alone, whatever Sceptic II does: he splits his
capital between the pair strategy and a tracker that shadows Sceptic II's
bets through the likelihood ratio.  Tuning the order to the horizon
(a = -1 -+ 2/sqrt(N)) turns this into two-sided Kullback-Leibler growth
bounds for Sceptic II's capital on c-timid plays.

Run:  python demos/growth_bounds.py
"""

import math

from opinion_merge import (
    check_big_alpha_bound,
    check_growth_bounds,
    kl_divergence,
    run_competitive,
)
from opinion_merge.scenarios import gen_timid_pair, reality_adversarial, reality_from
from opinion_merge.strategies import (
    RandomValidSceptic,
    big_alpha_sceptic_i,
    growth_joint_fixed,
    growth_sceptic_i_fixed,
)

# The one-sided bound holds against a hostile, randomizing Sceptic II.
ALPHA = -2.0
f_i, f_ii = gen_timid_pair(seed=3, m=3, c=2.0)
t = run_competitive(f_i, f_ii, big_alpha_sceptic_i(ALPHA), RandomValidSceptic(99),
                    reality_adversarial("min_ratio"), horizon=200)
print(check_big_alpha_bound(t, ALPHA))

# Fixed-horizon tuning: the joint pair guarantees a LOWER bound on Sceptic
# II's log capital in terms of cumulative Kullback-Leibler divergence...
c = 2.0
n = 100
f_i, f_ii = gen_timid_pair(seed=4, m=3, c=c)
s_i, s_ii = growth_joint_fixed(n)
t = run_competitive(f_i, f_ii, s_i, s_ii, reality_from("I", 5), n)
cum_kl = sum(kl_divergence(rec.dp) for rec in t.rounds)
lk_i = t.final_log_k_i.log_value
lk_ii = t.final_log_k_ii.log_value
floor = cum_kl - (math.sqrt(n) - 1) * (lk_i + 2 * c * math.log(c) ** 2)
print(f"\nln K_II = {lk_ii:9.4f} >= {floor:9.4f}"
      f"   (cumulative KL = {cum_kl:.4f}, ln K_I = {lk_i:.4f})")
print(check_growth_bounds(t, c, "fixed_lower"))

# ...while Sceptic I alone can cap it from above, even against an adversary.
f_i, f_ii = gen_timid_pair(seed=6, m=3, c=c)
t = run_competitive(f_i, f_ii, growth_sceptic_i_fixed(n), RandomValidSceptic(7),
                    reality_adversarial("max_ratio"), n)
cum_kl = sum(kl_divergence(rec.dp) for rec in t.rounds)
ceiling = cum_kl + (math.sqrt(n) + 1) * (t.final_log_k_i.log_value + c * math.log(c) ** 2)
print(f"\nln K_II = {t.final_log_k_ii.log_value:9.4f} <= {ceiling:9.4f}")
print(check_growth_bounds(t, c, "fixed_upper"))
