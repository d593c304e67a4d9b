"""Exhaustive exact ground truth for small markets, in rational arithmetic.

Two policies are fully determined by the arrival order alone (the weak
offline optimum, and the coin-flip policy up to its single coin), so for
small n we can enumerate all (n+1)! orders with ``fractions.Fraction``
prices and obtain exact expectations.  These enumerations are the
reference oracles for the closed forms elsewhere in the package.

The time-threshold policies are excluded on purpose: their outcomes depend
on the continuous arrival times beyond the order, so their ground truth is
the quadrature engine, not enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .errors import SizeCapError
from .model import ArrivalSample, Instance, RankedInstance, canonicalize
from .policies import make_policy, run_episode

WEAK_OPT_CAP = 7
ALG2_CAP = 6


def _as_fraction(p) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, float):
        if not p.is_integer():
            raise ValueError(
                f"exact enumeration needs rational prices, got float {p}; "
                "pass Fraction values instead")
        return Fraction(int(p))
    raise ValueError(f"unsupported price type {type(p)}")


def _exact_instance(instance: Instance | RankedInstance) -> Instance:
    inst = canonicalize(instance).instance
    return Instance(tuple(_as_fraction(p) for p in inst.buyer_prices),
                    _as_fraction(inst.seller_price))


def enumerate_weak_opt_exact(instance: Instance | RankedInstance) -> Fraction:
    """Exact expected weak optimum: average the per-order optimum over all
    (n+1)! arrival orders."""
    inst = _exact_instance(instance)
    n = inst.n
    if n > WEAK_OPT_CAP:
        raise SizeCapError(f"weak-opt enumeration capped at n={WEAK_OPT_CAP}")
    total = Fraction(0)
    count = 0
    for order in permutations(range(1, n + 2)):
        seller_pos = order.index(inst.seller_id)
        best = inst.seller_price
        for agent in order[seller_pos + 1:]:
            price = inst.buyer_prices[agent - 1]
            if price > best:
                best = price
        total += best
        count += 1
    return total / count


@dataclass(frozen=True)
class Alg2Distribution:
    """Exact outcome law of the coin-flip policy on one instance.

    ``holder_prob`` maps holder id (0 = intermediary, buyers 1..n, seller
    n+1) to its exact probability; ``expected_welfare`` is the exact mean
    social welfare.
    """

    instance: Instance
    holder_prob: dict
    expected_welfare: Fraction

    def prob_of_rank(self, rank: int) -> Fraction:
        """Holder probability of the canonically ranked rank-th buyer."""
        ranked = canonicalize(self.instance)
        agent = ranked.original_index_of_rank[rank - 1]
        return self.holder_prob.get(agent, Fraction(0))


class _FixedCoin:
    """Stub rng returning a preset uniform; counts how often it is drawn."""

    def __init__(self, value: float):
        self.value = value
        self.calls = 0

    def random(self) -> float:
        self.calls += 1
        return self.value


def enumerate_alg2_exact(instance: Instance | RankedInstance) -> Alg2Distribution:
    """Replay the coin-flip policy on every order, branching on the coin.

    Each order flips at most one coin (the seller arrives once); orders
    where the seller is best-so-far at arrival contribute both coin
    branches with weight 1/2 each.
    """
    inst = _exact_instance(instance)
    n = inst.n
    if n > ALG2_CAP:
        raise SizeCapError(f"coin-flip enumeration capped at n={ALG2_CAP}")
    policy = make_policy("alg2")
    times = tuple((k + 1) / (n + 2) for k in range(n + 1))
    holder_prob: dict[int, Fraction] = {}
    welfare = Fraction(0)
    n_orders = 0
    for order in permutations(range(1, n + 2)):
        n_orders += 1
        sample = ArrivalSample(order=order, times=times)
        buy_coin = _FixedCoin(0.0)   # coin says buy
        outcome_buy = run_episode(policy, inst, sample, rng=buy_coin)
        if buy_coin.calls == 0:
            branches = ((outcome_buy, Fraction(1)),)
        else:
            skip_coin = _FixedCoin(1.0)  # coin says skip
            outcome_skip = run_episode(policy, inst, sample, rng=skip_coin)
            branches = ((outcome_buy, Fraction(1, 2)),
                        (outcome_skip, Fraction(1, 2)))
        for outcome, weight in branches:
            holder_prob[outcome.holder] = holder_prob.get(
                outcome.holder, Fraction(0)) + weight
            welfare += weight * outcome.welfare
    total = Fraction(1, n_orders)
    return Alg2Distribution(
        instance=inst,
        holder_prob={h: p * total for h, p in sorted(holder_prob.items())},
        expected_welfare=welfare * total)
