"""Online trading policies as resettable state machines over arrival events.

Each policy sees only the online information set: arrival time, a seller
flag, the offered price, and the position in the arrival sequence.  Price
comparisons use the universal tie-break key, so the policies inherit the
strict total order from :func:`sectrade.model.canonicalize` without ever
observing offline information.

The three main policies:

* ``alg1`` (random transaction).  Buy from the seller unless the seller
  arrives after time (e-1)/e while holding the best price seen so far, in
  which case skip and stop.  After buying, sell to the earliest buyer whose
  arrival time exceeds 1/e and whose price beats every agent seen before it
  (the inventory rule already forces the sale after the seller's arrival,
  so the effective cutoff is max(seller time, 1/e)).

* ``alg2`` (simple random transaction).  Buy from the seller outright when
  the seller is not the best offer so far; buy with probability 1/2 when it
  is (one fair coin per episode).  Sell to the first buyer whose price
  beats every agent seen so far, the seller included.

* ``alg3`` (double threshold, zero-price seller only).  Always buy.  Sell
  to the earliest buyer that either arrives after t1 as the best-so-far
  buyer, or arrives after t2 as the second-best-so-far buyer.

``secretary-baseline`` runs the classical observe-until-1/e stopping rule
on the buyers after always buying; it exists purely as a comparison curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ProtocolError
from .model import (ArrivalSample, Instance, RankedInstance, Thresholds,
                    TradeOutcome, canonicalize, tiebreak_key)

#: Observation cutoff 1/e and the seller skip cutoff (e-1)/e, full precision.
SELL_CUTOFF = 1.0 / math.e
SKIP_CUTOFF = (math.e - 1.0) / math.e

NONE, HELD, SOLD = "none", "held", "sold"


@dataclass
class PolicyEvent:
    """One arrival as seen by a policy."""

    time: float
    is_seller: bool
    price: object
    position: int
    sort_key: tuple  # tie-break key of the arriving agent


@dataclass
class PolicyState:
    """Sufficient statistics carried between events of one episode."""

    inventory: str = NONE
    best_buyer_key: tuple | None = None
    second_best_buyer_key: tuple | None = None
    best_agent_key: tuple | None = None
    seller_seen: bool = False
    stopped: bool = False
    rng: object = None  # coin source, algorithm 2 only
    last_position: int = 0
    last_time: float = -1.0


def _ingest(state: PolicyState, event: PolicyEvent) -> None:
    """Validate event order, then fold the event into the trackers."""
    if event.position != state.last_position + 1 or event.time <= state.last_time:
        raise ProtocolError(
            f"event out of order: position {event.position} after "
            f"{state.last_position}, time {event.time} after {state.last_time}")
    state.last_position = event.position
    state.last_time = event.time
    key = event.sort_key
    if state.best_agent_key is None or key > state.best_agent_key:
        state.best_agent_key = key
    if event.is_seller:
        state.seller_seen = True
    else:
        if state.best_buyer_key is None or key > state.best_buyer_key:
            state.second_best_buyer_key = state.best_buyer_key
            state.best_buyer_key = key
        elif (state.second_best_buyer_key is None
              or key > state.second_best_buyer_key):
            state.second_best_buyer_key = key


def _beats_all_agents(state: PolicyState, key: tuple) -> bool:
    return state.best_agent_key is None or key > state.best_agent_key


def alg1_step(state: PolicyState, event: PolicyEvent) -> str:
    """Random-transaction step; returns "deal" or "pass"."""
    decision = "pass"
    if not state.stopped:
        if event.is_seller:
            if event.time > SKIP_CUTOFF and _beats_all_agents(state, event.sort_key):
                state.stopped = True
            else:
                state.inventory = HELD
                decision = "deal"
        elif (state.inventory == HELD and event.time > SELL_CUTOFF
              and _beats_all_agents(state, event.sort_key)):
            state.inventory = SOLD
            state.stopped = True
            decision = "deal"
    _ingest(state, event)
    return decision


def alg2_step(state: PolicyState, event: PolicyEvent) -> str:
    """Simple-random-transaction step; flips at most one coin per episode."""
    decision = "pass"
    if not state.stopped:
        if event.is_seller:
            if _beats_all_agents(state, event.sort_key):
                if state.rng.random() < 0.5:
                    state.inventory = HELD
                    decision = "deal"
                else:
                    state.stopped = True
            else:
                state.inventory = HELD
                decision = "deal"
        elif state.inventory == HELD and _beats_all_agents(state, event.sort_key):
            state.inventory = SOLD
            state.stopped = True
            decision = "deal"
    _ingest(state, event)
    return decision


def _is_best_so_far_buyer(state: PolicyState, key: tuple) -> bool:
    return state.best_buyer_key is None or key > state.best_buyer_key


def _is_second_best_so_far_buyer(state: PolicyState, key: tuple) -> bool:
    # Exactly one earlier buyer ranks above the arriving one.
    return (state.best_buyer_key is not None and key < state.best_buyer_key
            and (state.second_best_buyer_key is None
                 or key > state.second_best_buyer_key))


def alg3_step(state: PolicyState, event: PolicyEvent, th: Thresholds) -> str:
    """Double-threshold step for a zero-price seller."""
    decision = "pass"
    if not state.stopped:
        if event.is_seller:
            if event.price != 0:
                raise ValueError("double-threshold policy requires seller price 0")
            state.inventory = HELD
            decision = "deal"
        elif state.inventory == HELD:
            qualifies = (
                (event.time > th.t1 and _is_best_so_far_buyer(state, event.sort_key))
                or (event.time > th.t2
                    and _is_second_best_so_far_buyer(state, event.sort_key)))
            if qualifies:
                state.inventory = SOLD
                state.stopped = True
                decision = "deal"
    _ingest(state, event)
    return decision


def secretary_baseline_step(state: PolicyState, event: PolicyEvent) -> str:
    """Always buy; then run the classical 1/e rule over the buyers."""
    decision = "pass"
    if not state.stopped:
        if event.is_seller:
            state.inventory = HELD
            decision = "deal"
        elif (state.inventory == HELD and event.time > SELL_CUTOFF
              and _is_best_so_far_buyer(state, event.sort_key)):
            state.inventory = SOLD
            state.stopped = True
            decision = "deal"
    _ingest(state, event)
    return decision


class Policy:
    """Wraps a step function with a fresh-state constructor."""

    def __init__(self, policy_id: str, step, needs_rng: bool = False,
                 zero_seller_only: bool = False):
        self.policy_id = policy_id
        self._step = step
        self.needs_rng = needs_rng
        self.zero_seller_only = zero_seller_only

    def fresh_state(self, rng=None) -> PolicyState:
        return PolicyState(rng=rng)

    def step(self, state: PolicyState, event: PolicyEvent) -> str:
        return self._step(state, event)


def make_policy(policy_id: str, thresholds: Thresholds | None = None) -> Policy:
    """Policy registry keyed by string id.

    Ids: "alg1" | "alg2" | "alg3" | "secretary-baseline".  "alg3" requires
    thresholds.
    """
    if policy_id == "alg1":
        return Policy("alg1", alg1_step)
    if policy_id == "alg2":
        return Policy("alg2", alg2_step, needs_rng=True)
    if policy_id == "alg3":
        if thresholds is None:
            raise ValueError("alg3 needs thresholds")
        return Policy("alg3", lambda s, e: alg3_step(s, e, thresholds),
                      zero_seller_only=True)
    if policy_id == "secretary-baseline":
        return Policy("secretary-baseline", secretary_baseline_step)
    raise ValueError(f"unknown policy id {policy_id!r}")


def run_episode(policy: Policy | str, instance: Instance | RankedInstance,
                sample: ArrivalSample, rng=None,
                thresholds: Thresholds | None = None) -> TradeOutcome:
    """Replay one arrival sample through a policy and score the outcome.

    Enforces inventory feasibility (a sale needs a held item, a purchase
    needs an empty inventory) and returns the final holder: the seller if
    the intermediary never bought, 0 if it bought and never resold, else
    the buyer it sold to.  Deterministic given (policy, instance, sample,
    rng state).
    """
    if isinstance(policy, str):
        policy = make_policy(policy, thresholds)
    ranked = canonicalize(instance)
    inst = ranked.instance
    n = ranked.n
    if sample.size != n + 1:
        raise ValueError(f"sample has {sample.size} arrivals, instance needs {n + 1}")
    if policy.zero_seller_only and inst.seller_price != 0:
        raise ValueError(f"policy {policy.policy_id!r} requires seller price 0")
    if policy.needs_rng and rng is None:
        raise ValueError(f"policy {policy.policy_id!r} needs an rng")

    state = policy.fresh_state(rng=rng)
    bought = False
    sold_to = 0
    decisions = []
    for pos in range(n + 1):
        agent = sample.order[pos]
        is_seller = agent == inst.seller_id
        price = inst.price_of(agent)
        event = PolicyEvent(time=sample.times[pos], is_seller=is_seller,
                            price=price, position=pos + 1,
                            sort_key=tiebreak_key(price, agent))
        decision = policy.step(state, event)
        deal = decision == "deal"
        decisions.append(deal)
        if deal:
            if is_seller:
                if bought:
                    raise ProtocolError("second purchase in one episode")
                bought = True
            else:
                if not bought or sold_to:
                    raise ProtocolError("sale without a held item")
                sold_to = agent

    if not bought:
        holder = inst.seller_id
        welfare = inst.seller_price
    elif sold_to:
        holder = sold_to
        welfare = inst.price_of(sold_to)
    else:
        holder = 0
        welfare = 0
    return TradeOutcome(holder=holder, welfare=welfare, decisions=tuple(decisions))
