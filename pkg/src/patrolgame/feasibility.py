"""Consistency checks: can a fixed allocation on one target be completed?

Given a candidate attacked target and fixed resources on it, decide whether
the remaining rangers and villagers can cover every other target well enough
that the candidate stays an attacker best response, and produce a witness
profile when they can. Villagers are placed greedily (whole multiples of
their coverage first, leftovers dumped on the largest residuals); rangers
fill whatever coverage remains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .model import (
    BUDGET_TOL,
    GameDefinitionError,
    Instance,
    StrategyProfile,
)

# Slack on coverage-sum comparisons and attacker-floor checks; binary-search
# callers probe exactly at the feasibility boundary.
FEAS_TOL = 1e-9

# Nudge before flooring c_min / e_v so exact multiples don't round down.
_COUNT_EPS = 1e-9


@dataclass(frozen=True)
class FeasibilityQuery:
    """Fixed allocation on a candidate attacked target."""

    i_star: int
    p_star: float = 0.0
    v_star: int = 0


@dataclass(frozen=True)
class FeasibilityAnswer:
    feasible: bool
    witness: Optional[StrategyProfile]


@dataclass(frozen=True)
class TargetSpecificInstance:
    """Instance variant whose villager effectiveness varies per target."""

    base: Instance
    e_v: np.ndarray

    def __post_init__(self):
        e_v = np.array(self.e_v, dtype=float)
        if e_v.ndim != 1 or e_v.shape[0] != self.base.n:
            raise GameDefinitionError("per-target e_v must have one entry per target")
        if np.any(e_v <= 0) or np.any(e_v > 1):
            raise GameDefinitionError("villager effectiveness must lie in (0, 1]")
        e_v.setflags(write=False)
        object.__setattr__(self, "e_v", e_v)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def ranger_budget(self) -> float:
        return self.base.ranger_budget

    @property
    def villager_budget(self) -> int:
        return self.base.villager_budget

    @property
    def e_p(self) -> float:
        return self.base.e_p

    @property
    def reward_def(self) -> np.ndarray:
        return self.base.reward_def

    @property
    def penalty_def(self) -> np.ndarray:
        return self.base.penalty_def

    @property
    def reward_att(self) -> np.ndarray:
        return self.base.reward_att

    @property
    def penalty_att(self) -> np.ndarray:
        return self.base.penalty_att

    @property
    def spread_att(self) -> np.ndarray:
        return self.base.spread_att


def _min_coverage_vec(
    reward_att: np.ndarray, penalty_att: np.ndarray, u: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-target minimum coverage forcing attacker utility down to <= u.

    Returns (c_min, achievable). Where the payoff spread is zero (reward and
    penalty both zero by the sign constraints) the utility is 0 at any
    coverage, so c_min is 0 and u < 0 is unachievable.
    """
    spread = reward_att - penalty_att
    positive = spread > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = (reward_att - u) / spread
    c_min = np.where(positive, np.clip(raw, 0.0, 1.0), 0.0)
    achievable = np.where(positive, u >= penalty_att - FEAS_TOL, u >= -FEAS_TOL)
    return c_min, achievable


def min_valid_coverage(instance, i: int, u: float) -> Optional[float]:
    """Smallest coverage on target ``i`` with attacker utility <= ``u``.

    None when no coverage achieves it (u below the attacker's penalty floor).
    """
    c_min, achievable = _min_coverage_vec(instance.reward_att, instance.penalty_att, u)
    if not achievable[i]:
        return None
    return float(c_min[i])


def total_wasted_coverage(instance, v: np.ndarray, u: float, i_star: int) -> float:
    """Villager coverage in excess of the needed minimum, summed over i != i_star."""
    v = np.asarray(v)
    c_min, achievable = _min_coverage_vec(instance.reward_att, instance.penalty_att, u)
    others = np.arange(instance.n) != i_star
    if not achievable[others].all():
        raise GameDefinitionError("utility %r is unachievable on some target" % (u,))
    waste = np.maximum(v * np.asarray(instance.e_v) - c_min, 0.0)
    return float(waste[others].sum())


def _validate_query(instance, query: FeasibilityQuery) -> None:
    if not 0 <= query.i_star < instance.n:
        raise GameDefinitionError("target index %d out of range" % query.i_star)
    if not (0.0 <= query.p_star <= instance.ranger_budget + BUDGET_TOL):
        raise GameDefinitionError("p_star %r outside the ranger budget" % (query.p_star,))
    if not (0 <= query.v_star <= instance.villager_budget):
        raise GameDefinitionError("v_star %r outside the villager budget" % (query.v_star,))


def _fixed_target_utility(instance, query: FeasibilityQuery, e_v_star: float) -> float:
    c_star = min(instance.e_p * query.p_star + e_v_star * query.v_star, 1.0)
    i = query.i_star
    return float(instance.reward_att[i] * (1.0 - c_star) + instance.penalty_att[i] * c_star)


def _witness(instance, query, coverage_remaining, villagers) -> StrategyProfile:
    """Assemble the profile built by the greedy fill, trimming tolerance slack."""
    p = coverage_remaining / instance.e_p
    p[query.i_star] = 0.0
    remaining_budget = max(instance.ranger_budget - query.p_star, 0.0)
    total = float(p.sum())
    if total > remaining_budget and total > 0.0:
        p *= remaining_budget / total
    p[query.i_star] = query.p_star
    v = villagers.copy()
    v[query.i_star] = query.v_star
    return StrategyProfile(p, v)


def check_consistent(instance: Instance, query: FeasibilityQuery) -> FeasibilityAnswer:
    """Decide whether ``query`` extends to a full profile keeping ``i_star`` attacked.

    Greedy fill: each other target first receives as many whole villagers as
    fit under its minimum coverage, leftover villagers then erase the largest
    residuals (ties to the lowest index), and rangers must cover the rest.
    """
    _validate_query(instance, query)
    u = _fixed_target_utility(instance, query, instance.e_v)
    c_min, achievable = _min_coverage_vec(instance.reward_att, instance.penalty_att, u)
    achievable[query.i_star] = True
    if not achievable.all():
        return FeasibilityAnswer(False, None)
    c_min = c_min.copy()
    c_min[query.i_star] = 0.0

    spare = instance.villager_budget - query.v_star
    want = np.minimum(np.floor(c_min / instance.e_v + _COUNT_EPS), float(spare))
    before = np.concatenate(([0.0], np.cumsum(want)[:-1]))
    alloc = np.clip(spare - before, 0.0, want).astype(np.int64)
    residual = np.maximum(c_min - alloc * instance.e_v, 0.0)

    leftover = spare - int(alloc.sum())
    if leftover > 0:
        order = np.argsort(-residual, kind="stable")
        for j in order[: min(instance.n, leftover)]:
            if residual[j] <= 0.0:
                break  # zero-residual dumps would be pure waste; leave unassigned
            residual[j] = 0.0
            alloc[j] += 1

    ranger_coverage = max(instance.ranger_budget - query.p_star, 0.0) * instance.e_p
    if float(residual.sum()) > ranger_coverage + FEAS_TOL:
        return FeasibilityAnswer(False, None)
    return FeasibilityAnswer(True, _witness(instance, query, residual, alloc))


def check_consistent_ts(
    ts: TargetSpecificInstance, query: FeasibilityQuery
) -> FeasibilityAnswer:
    """Consistency check when villager effectiveness varies per target.

    Villagers are placed one at a time on the target where the next villager
    covers the most still-needed coverage, until none helps or none remain.
    """
    _validate_query(ts, query)
    u = _fixed_target_utility(ts, query, float(ts.e_v[query.i_star]))
    c_remaining, achievable = _min_coverage_vec(ts.reward_att, ts.penalty_att, u)
    achievable[query.i_star] = True
    if not achievable.all():
        return FeasibilityAnswer(False, None)
    c_remaining = c_remaining.copy()
    c_remaining[query.i_star] = 0.0

    gain = np.minimum(c_remaining, ts.e_v)
    counts = np.zeros(ts.n, dtype=np.int64)
    for _ in range(ts.villager_budget - query.v_star):
        j = int(np.argmax(gain))
        if gain[j] <= 0.0:
            break
        counts[j] += 1
        c_remaining[j] -= gain[j]
        gain[j] = min(c_remaining[j], ts.e_v[j])

    ranger_coverage = max(ts.ranger_budget - query.p_star, 0.0) * ts.e_p
    if float(c_remaining.sum()) > ranger_coverage + FEAS_TOL:
        return FeasibilityAnswer(False, None)
    return FeasibilityAnswer(True, _witness(ts, query, c_remaining, counts))


def consistency_check_for(instance) -> Callable[[object, FeasibilityQuery], FeasibilityAnswer]:
    """The consistency check matching the instance flavour."""
    if isinstance(instance, TargetSpecificInstance):
        return check_consistent_ts
    return check_consistent


def max_feasible_villagers(
    instance, i_star: int, check: Optional[Callable] = None
) -> Tuple[Optional[int], Optional[StrategyProfile], int]:
    """Largest v with check(i_star, 0, v) feasible, via binary search.

    Monotone by the resource-reduction property: lowering the count on the
    attacked target never breaks consistency. Returns (count, witness, calls);
    count is None when even v = 0 is infeasible.
    """
    if check is None:
        check = consistency_check_for(instance)
    lo, hi = 0, instance.villager_budget
    best: Optional[int] = None
    witness: Optional[StrategyProfile] = None
    calls = 0
    while lo <= hi:
        mid = (lo + hi) // 2
        answer = check(instance, FeasibilityQuery(i_star, 0.0, mid))
        calls += 1
        if answer.feasible:
            best, witness = mid, answer.witness
            lo = mid + 1
        else:
            hi = mid - 1
    return best, witness, calls
