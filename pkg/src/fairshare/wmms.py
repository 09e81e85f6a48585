"""Weighted-maximin-share allocators.

* :func:`wmms_round_robin` - a 1/n-WMMS allocation for XOS valuations, given
  each agent's WMMS partition.
* :func:`wmms_partition_binadd` - a WMMS partition for a binary additive agent.
* :func:`wmms_allocate_binadd` - an exact WMMS allocation for binary additive
  valuations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from fairshare.model import (
    Allocation,
    Instance,
    PartitionHint,
    WmmsPartitionWitness,
    complete_with_leftovers,
    json_number,
    leftover_recipient,
    partition_floor,
    partition_violations,
)
from fairshare.shares import OracleLimits, exact_wmms
from fairshare.valuations import BinaryAdditive, ValuationClassError, require_kind


class InvalidPartitionError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    """An algorithm invariant failed at runtime (a bug or an invalid input partition)."""


def entitlement_order(entitlements: Sequence[Fraction]) -> list[int]:
    """Agents by descending entitlement, ties by ascending id."""
    return sorted(range(len(entitlements)), key=lambda i: (-entitlements[i], i))


def _as_witness(instance: Instance, agent: int, raw) -> WmmsPartitionWitness:
    if isinstance(raw, WmmsPartitionWitness):
        bundles, claimed = raw.partition, raw.value
    elif isinstance(raw, PartitionHint):
        bundles, claimed = raw.partition, raw.value
    else:
        bundles, claimed = tuple(frozenset(b) for b in raw), None
    problems = partition_violations(instance.n_goods, instance.n_agents, bundles)
    if problems:
        raise InvalidPartitionError(f"partition of agent {agent}: " + "; ".join(problems))
    floor = partition_floor(instance, agent, bundles)
    if claimed is not None and floor != claimed:
        raise InvalidPartitionError(
            f"partition of agent {agent} has floor value {floor}, but {claimed} was claimed"
        )
    return WmmsPartitionWitness(tuple(frozenset(b) for b in bundles), floor)


@dataclass
class RoundRobinResult:
    allocation: Allocation
    achieved: list
    partitions: list[WmmsPartitionWitness]
    targets: list[frozenset[int]]
    target_labels: list[int]
    guiding_clauses: list[int]
    picks: list[frozenset[int]]
    rounds: int
    supplied: bool = False

    def guiding_weight(self, instance: Instance, agent: int, bundle) -> Fraction:
        clause = instance.valuations[agent].clause_weights()[self.guiding_clauses[agent]]
        return sum((Fraction(clause.get(g, 0)) for g in bundle), Fraction(0))

    def to_dict(self) -> dict:
        out = {
            "allocation": self.allocation.to_dict(),
            "achieved": [json_number(a) for a in self.achieved],
            "rounds": self.rounds,
        }
        if self.supplied:
            out["wmmsPartitionsUsed"] = [w.to_dict() for w in self.partitions]
        return out


def wmms_round_robin(
    instance: Instance,
    partitions: Sequence | None = None,
    limits: OracleLimits | None = None,
) -> RoundRobinResult:
    """Round-robin-like 1/n-WMMS allocation for XOS valuations.

    ``partitions[i]`` is agent ``i``'s WMMS partition (bundle ``j`` meant for
    agent ``j``). When omitted, partitions stored in the instance are used,
    and failing that they are computed with the exact oracle.

    In the first round each agent, in descending-entitlement order, fixes a
    target bundle among those meant for agents at least as entitled as itself
    that nobody has touched yet, plus the clause maximizing its value on that
    target. Then every agent repeatedly takes the heaviest remaining good of
    its target under that clause until the target is exhausted.
    """
    n = instance.n_agents
    supplied = partitions is not None or instance.wmms_partitions is not None
    if partitions is None:
        partitions = instance.wmms_partitions
    if partitions is None:
        witnesses = [exact_wmms(instance, i, limits).witness for i in range(n)]
    else:
        if len(partitions) != n:
            raise InvalidPartitionError(f"expected {n} partitions, got {len(partitions)}")
        witnesses = [_as_witness(instance, i, p) for i, p in enumerate(partitions)]

    clauses = [v.clause_weights() for v in instance.valuations]
    order = entitlement_order(instance.entitlements)
    pool = set(instance.goods)
    remaining: list[set[int]] = [set() for _ in range(n)]
    targets: list[frozenset[int]] = [frozenset()] * n
    labels = [-1] * n
    guides = [0] * n
    picks: list[set[int]] = [set() for _ in range(n)]
    active = set(range(n))

    rounds = 0
    while active:
        rounds += 1
        for rank, i in enumerate(order):
            if rounds == 1:
                taken = instance.n_goods - len(pool)
                if taken > rank:
                    raise InvariantViolation(f"{taken} goods gone before agent {i}'s first pick")
                for j in order[: rank + 1]:
                    bundle = witnesses[i].partition[j]
                    if bundle <= pool:
                        break
                else:
                    raise InvariantViolation(f"agent {i} has no untouched candidate bundle")
                targets[i], labels[i] = bundle, j
                remaining[i] = set(bundle)
                sums = [sum((c.get(g, 0) for g in bundle), Fraction(0)) for c in clauses[i]]
                guides[i] = max(range(len(sums)), key=lambda t: (sums[t], -t))
            if i not in active:
                continue
            remaining[i] &= pool
            if not remaining[i]:
                active.discard(i)
                continue
            weights = clauses[i][guides[i]]
            g = max(remaining[i], key=lambda e: (weights.get(e, 0), -e))
            picks[i].add(g)
            pool.discard(g)
            remaining[i].discard(g)

    for i in range(n):
        w = clauses[i][guides[i]]
        got = sum((w.get(g, 0) for g in picks[i]), Fraction(0))
        full = sum((w.get(g, 0) for g in targets[i]), Fraction(0))
        if got * n < full:
            raise InvariantViolation(f"agent {i}: clause weight {got} of picks < {full}/{n}")

    allocation = complete_with_leftovers(instance, picks)
    achieved = [v.value(b) for v, b in zip(instance.valuations, allocation.bundles)]
    return RoundRobinResult(
        allocation=allocation,
        achieved=achieved,
        partitions=witnesses,
        targets=targets,
        target_labels=labels,
        guiding_clauses=guides,
        picks=[frozenset(p) for p in picks],
        rounds=rounds,
        supplied=supplied,
    )


def _desired(instance: Instance, agent: int) -> frozenset[int]:
    v = instance.valuations[agent]
    if not isinstance(v, BinaryAdditive):
        raise ValuationClassError(f"agent {agent}: {v.kind} valuation, expected binary_additive")
    return v.desired


def wmms_partition_binadd(
    instance: Instance, agent: int, trace: list | None = None
) -> WmmsPartitionWitness:
    """WMMS partition for a binary additive agent.

    Desired goods go one by one (ascending id) to the bundle ``j`` with the
    smallest ``|S_j| / b_j`` (lowest ``j`` on ties); the rest follow the
    leftover rule. After every step, ``(|S_j| - 1) / b_j <= min_k |S_k| / b_k``
    is checked for every bundle. If ``trace`` is a list, the bundle sizes after
    each step are appended to it.
    """
    desired = _desired(instance, agent)
    b = instance.entitlements
    n = instance.n_agents
    sizes = [0] * n
    bundles: list[set[int]] = [set() for _ in range(n)]
    for g in sorted(desired):
        j = min(range(n), key=lambda k: (Fraction(sizes[k]) / b[k], k))
        bundles[j].add(g)
        sizes[j] += 1
        low = min(Fraction(s) / bk for s, bk in zip(sizes, b))
        for k in range(n):
            if Fraction(sizes[k] - 1) / b[k] > low:
                raise InvariantViolation(f"balance broken at bundle {k} after good {g}")
        if trace is not None:
            trace.append(tuple(sizes))
    bundles[leftover_recipient(b)] |= set(instance.goods) - desired
    value = b[agent] * min(Fraction(s) / bk for s, bk in zip(sizes, b))
    return WmmsPartitionWitness(tuple(frozenset(s) for s in bundles), value)


@dataclass
class BinaryAdditiveResult:
    allocation: Allocation
    achieved: list
    steps: list[tuple[int, int | None]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "allocation": self.allocation.to_dict(),
            "achieved": [json_number(a) for a in self.achieved],
        }


def wmms_allocate_binadd(instance: Instance) -> BinaryAdditiveResult:
    """Exact WMMS allocation for binary additive valuations.

    While some agent is active, the active agent with the smallest
    ``|A_i| / b_i`` (lowest id on ties) takes its lowest-id remaining desired
    good, or becomes inactive when none is left.
    """
    require_kind(instance.valuations, BinaryAdditive)
    n = instance.n_agents
    b = instance.entitlements
    wanted = [set(_desired(instance, i)) for i in range(n)]
    bundles: list[set[int]] = [set() for _ in range(n)]
    active = set(range(n))
    steps: list[tuple[int, int | None]] = []
    while active:
        i = min(active, key=lambda k: (Fraction(len(bundles[k])) / b[k], k))
        if not wanted[i]:
            active.discard(i)
            steps.append((i, None))
            continue
        g = min(wanted[i])
        bundles[i].add(g)
        for d in wanted:
            d.discard(g)
        steps.append((i, g))
    allocation = complete_with_leftovers(instance, bundles)
    achieved = [v.value(a) for v, a in zip(instance.valuations, allocation.bundles)]
    return BinaryAdditiveResult(allocation, achieved, steps)
