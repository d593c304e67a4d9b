"""Seeded, worker-count-invariant Monte Carlo for the trading policies.

Stream discipline
-----------------
The generator is numpy's Philox (counter-based).  Each trial owns a fixed
window of the counter space: trial k consumes draws [k*S, (k+1)*S) where
the stride S is n+2 rounded up to a multiple of 4 (n+1 per-agent arrival
uniforms, one coin slot, padding).  Trials are processed in fixed blocks
of ``BLOCK`` trials; a block's draws come from one ``Philox(key=seed)``
generator advanced to the block's first window.  Workers receive whole
blocks and the per-block partial sums are reduced in block order with
compensated addition, so the report is byte-identical for any worker
count.

Policy evaluation is vectorized over a block: per-agent arrival times are
ranked against the canonical strength order, best-so-far flags come from
prefix minima along that order, and second-best-so-far flags from a
running (min, second-min) scan.  The state machines in
:mod:`sectrade.policies` stay the behavioural reference; the kernels here
are cross-checked against them trial by trial in the test suite.

Competitive ratios divide the mean benchmark by the mean policy welfare
(never per-trial ratios), matching the expectation-based definitions.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .benchmarks import strong_opt
from .model import Instance, RankedInstance, Thresholds, canonicalize
from .policies import SELL_CUTOFF, SKIP_CUTOFF

BLOCK = 1 << 14
_BLOCK_BUDGET = 1 << 22  # max doubles drawn per block

POLICY_IDS = ("alg1", "alg2", "alg3", "secretary-baseline")


@dataclass(frozen=True)
class _Market:
    """Instance facts the kernels need, in array form."""

    n: int
    mu: int
    prices: np.ndarray          # price by holder id 0..n+1 (0 = intermediary)
    strength_cols: np.ndarray   # agent time-columns, strongest first
    seller_strength_pos: int    # seller's index within strength_cols
    seller_price: float


def _market(instance: Instance | RankedInstance) -> _Market:
    ranked = canonicalize(instance)
    inst = ranked.instance
    n = ranked.n
    prices = np.zeros(n + 2)
    prices[1:n + 1] = [float(p) for p in inst.buyer_prices]
    prices[n + 1] = float(inst.seller_price)
    buyer_cols = [b - 1 for b in ranked.original_index_of_rank]
    strength_cols = np.array(buyer_cols[:ranked.mu] + [n] + buyer_cols[ranked.mu:],
                             dtype=np.int64)
    return _Market(n=n, mu=ranked.mu, prices=prices,
                   strength_cols=strength_cols,
                   seller_strength_pos=ranked.mu,
                   seller_price=float(inst.seller_price))


def _stride(n: int) -> int:
    return 4 * ((n + 2 + 3) // 4)


def _block_size(n: int) -> int:
    """Trials per block: BLOCK, shrunk so a block stays within the draw
    budget for large n (a deterministic function of n alone)."""
    return max(256, min(BLOCK, _BLOCK_BUDGET // _stride(n)))


def block_draws(seed: int, n: int, start: int, count: int) -> np.ndarray:
    """Uniform draws for trials [start, start+count), shape (count, stride).

    Column a < n holds buyer (a+1)'s arrival time, column n the seller's,
    column n+1 the coin; the rest is padding that keeps windows 4-aligned
    for Philox counter jumps.
    """
    stride = _stride(n)
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start * (stride // 4))
    gen = np.random.Generator(bitgen)
    return gen.random(count * stride).reshape(count, stride)


def _prefix_min(ts: np.ndarray) -> np.ndarray:
    """prefix[:, k] = min of columns < k (inf at k = 0)."""
    out = np.empty_like(ts)
    out[:, 0] = np.inf
    np.minimum.accumulate(ts[:, :-1], axis=1, out=out[:, 1:])
    return out


def _earliest(qualify: np.ndarray, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    masked = np.where(qualify, ts, np.inf)
    idx = np.argmin(masked, axis=1)
    found = masked[np.arange(ts.shape[0]), idx] < np.inf
    return idx, found


def _holders(policy_id: str, mk: _Market, u: np.ndarray,
             th: Thresholds | None) -> np.ndarray:
    """Final holder id (0 = intermediary) per trial for one block."""
    n = mk.n
    times = u[:, :n + 1]
    seller_t = times[:, n]
    by_strength = times[:, mk.strength_cols]
    stronger_before = _prefix_min(by_strength)
    record = by_strength < stronger_before  # best-so-far over all agents
    pos = mk.seller_strength_pos

    if policy_id in ("alg1", "alg2"):
        seller_record = record[:, pos]
        if policy_id == "alg1":
            no_buy = (seller_t > SKIP_CUTOFF) & seller_record
            cutoff = np.maximum(seller_t, SELL_CUTOFF)
        else:
            coin = u[:, n + 1]
            no_buy = seller_record & (coin >= 0.5)
            cutoff = seller_t
        qualify = record & (by_strength > cutoff[:, None])
        qualify[:, pos] = False
        idx, sold = _earliest(qualify, by_strength)
        buyer_id = mk.strength_cols[idx] + 1
        holders = np.where(no_buy, n + 1, np.where(sold, buyer_id, 0))
        return holders

    # zero-seller policies: the seller is the weakest agent, so the buyer
    # strength order is simply the first n strength columns
    buyer_ts = by_strength[:, :n] if pos == n else np.delete(by_strength, pos, axis=1)
    first_min = np.full(u.shape[0], np.inf)
    second_min = np.full(u.shape[0], np.inf)
    best_flag = np.empty((u.shape[0], n), dtype=bool)
    second_flag = np.empty((u.shape[0], n), dtype=bool)
    for k in range(n):
        tk = buyer_ts[:, k]
        best_flag[:, k] = tk < first_min
        second_flag[:, k] = (first_min < tk) & (tk < second_min)
        newly_second = np.minimum(np.maximum(first_min, tk), second_min)
        first_min = np.minimum(first_min, tk)
        second_min = newly_second

    held = buyer_ts > seller_t[:, None]
    if policy_id == "alg3":
        qualify = held & ((best_flag & (buyer_ts > th.t1))
                          | (second_flag & (buyer_ts > th.t2)))
    elif policy_id == "secretary-baseline":
        qualify = held & best_flag & (buyer_ts > SELL_CUTOFF)
    else:
        raise ValueError(f"unknown policy id {policy_id!r}")
    idx, sold = _earliest(qualify, buyer_ts)
    buyer_cols = mk.strength_cols[mk.strength_cols != n]
    buyer_id = buyer_cols[idx] + 1
    return np.where(sold, buyer_id, 0)


def _block_partials(policy_id: str, mk: _Market, seed: int, start: int,
                    count: int, th: Thresholds | None) -> dict:
    u = block_draws(seed, mk.n, start, count)
    holders = _holders(policy_id, mk, u, th)
    n = mk.n
    welfare = mk.prices[holders]
    times = u[:, :n + 1]
    after_seller = times[:, :n] > times[:, n][:, None]
    buyer_prices = mk.prices[1:n + 1]
    weak = np.max(np.where(after_seller, buyer_prices[None, :], -np.inf), axis=1)
    weak = np.maximum(weak, mk.seller_price)
    return {
        "counts": np.bincount(holders, minlength=n + 2),
        "sum_w": float(welfare.sum()),
        "sum_w2": float((welfare * welfare).sum()),
        "sum_o": float(weak.sum()),
        "sum_o2": float((weak * weak).sum()),
        "sum_wo": float((welfare * weak).sum()),
    }


def _kahan_total(values) -> float:
    total = 0.0
    carry = 0.0
    for v in values:
        y = v - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total


@dataclass(frozen=True)
class SimulationReport:
    policy: str
    instance_digest: str
    trials: int
    seed: int
    holder_freq: dict
    mean_alg_welfare: float
    se_alg: float
    mean_weak_opt: float
    se_weak: float
    strong_opt: float
    ratio_strong: float
    ratio_weak: float
    ratio_weak_se: float

    def to_json_dict(self) -> dict:
        return {
            "policy": self.policy,
            "instance_digest": self.instance_digest,
            "trials": self.trials,
            "seed": self.seed,
            "holder_freq": {str(k): v for k, v in self.holder_freq.items()},
            "mean_alg_welfare": self.mean_alg_welfare,
            "se_alg": self.se_alg,
            "mean_weak_opt": self.mean_weak_opt,
            "se_weak": self.se_weak,
            "strong_opt": self.strong_opt,
            "ratio_strong": self.ratio_strong,
            "ratio_weak": self.ratio_weak,
            "ratio_weak_se": self.ratio_weak_se,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)


def simulate(policy_id: str, instance: Instance | RankedInstance, trials: int,
             seed: int, workers: int = 1,
             thresholds: Thresholds | None = None) -> SimulationReport:
    """Estimate holder frequencies, welfare, and competitive ratios.

    Deterministic given (seed, trials): the block layout and per-trial
    draw windows depend only on those, and per-block partials are reduced
    in block order, so ``workers`` cannot change any output bit.
    """
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"need workers >= 1, got {workers}")
    if policy_id not in POLICY_IDS:
        raise ValueError(f"unknown policy id {policy_id!r}")
    if policy_id == "alg3" and thresholds is None:
        raise ValueError("alg3 needs thresholds")
    ranked = canonicalize(instance)
    if policy_id == "alg3" and ranked.seller_price != 0:
        raise ValueError("alg3 requires seller price 0")
    mk = _market(ranked)

    block = _block_size(mk.n)
    starts = list(range(0, trials, block))
    blocks = [(s, min(block, trials - s)) for s in starts]

    def work(args):
        start, count = args
        return _block_partials(policy_id, mk, seed, start, count, thresholds)

    if workers == 1:
        partials = [work(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(work, blocks))

    counts = np.zeros(mk.n + 2, dtype=np.int64)
    for p in partials:
        counts += p["counts"]
    sums = {key: _kahan_total(p[key] for p in partials)
            for key in ("sum_w", "sum_w2", "sum_o", "sum_o2", "sum_wo")}

    n_t = float(trials)
    mean_w = sums["sum_w"] / n_t
    mean_o = sums["sum_o"] / n_t
    ddof = n_t - 1.0 if trials > 1 else 1.0
    var_w = max((sums["sum_w2"] - n_t * mean_w ** 2) / ddof, 0.0)
    var_o = max((sums["sum_o2"] - n_t * mean_o ** 2) / ddof, 0.0)
    cov = (sums["sum_wo"] - n_t * mean_w * mean_o) / ddof
    se_w = math.sqrt(var_w / n_t)
    se_o = math.sqrt(var_o / n_t)
    s_opt = float(strong_opt(ranked))
    if mean_w > 0:
        ratio_weak = mean_o / mean_w
        ratio_strong = s_opt / mean_w
        # delta method for the ratio of two correlated means
        ratio_var = (var_o / mean_w ** 2
                     + mean_o ** 2 * var_w / mean_w ** 4
                     - 2.0 * mean_o * cov / mean_w ** 3)
        ratio_weak_se = math.sqrt(max(ratio_var, 0.0) / n_t)
    else:
        ratio_weak = ratio_strong = ratio_weak_se = math.inf

    return SimulationReport(
        policy=policy_id,
        instance_digest=ranked.instance.digest(),
        trials=trials,
        seed=seed,
        holder_freq={int(h): c / n_t for h, c in enumerate(counts) if c},
        mean_alg_welfare=mean_w,
        se_alg=se_w,
        mean_weak_opt=mean_o,
        se_weak=se_o,
        strong_opt=s_opt,
        ratio_strong=ratio_strong,
        ratio_weak=ratio_weak,
        ratio_weak_se=ratio_weak_se,
    )


@dataclass(frozen=True)
class CurveRow:
    family: str
    param: object
    report: SimulationReport


def estimate_ratio_curve(policy_id: str, family: str, param_name: str,
                         values, fixed_params: dict, trials: int, seed: int,
                         workers: int = 1,
                         thresholds: Thresholds | None = None) -> list:
    """One SimulationReport per value of a swept family parameter."""
    from .model import gen_instance

    rows = []
    for value in values:
        params = dict(fixed_params)
        params[param_name] = value
        inst = gen_instance(family, **params)
        rows.append(CurveRow(
            family=family, param=value,
            report=simulate(policy_id, inst, trials, seed, workers=workers,
                            thresholds=thresholds)))
    return rows


def curve_to_csv(rows, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["policy", "family", "param", "trials", "mean_alg",
                         "se_alg", "mean_opt_weak", "opt_strong",
                         "ratio_weak", "ratio_strong"])
        for row in rows:
            r = row.report
            writer.writerow([r.policy, row.family, row.param, r.trials,
                             repr(r.mean_alg_welfare), repr(r.se_alg),
                             repr(r.mean_weak_opt), repr(r.strong_opt),
                             repr(r.ratio_weak), repr(r.ratio_strong)])
