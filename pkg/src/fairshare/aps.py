"""Half-APS allocation for binary XOS valuations with arbitrary entitlements.

The existence pass serves agents in ascending ``ceil(s_i / 2) / b_i`` order,
handing each a non-wasteful bundle of exactly ``ceil(s_i / 2)`` goods. The
polynomial-time wrapper starts from the trivial upper bounds
``s_i = floor(b_i * m)`` and decrements the guess of whichever agent a pass
fails to satisfy, until a pass succeeds.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from fairshare.model import (
    Allocation,
    Instance,
    ceil_half,
    complete_with_leftovers,
    json_number,
)
from fairshare.valuations import Valuation, extract_non_wasteful, trim_non_wasteful

# Oracle calls per solve stay below ORACLE_CALL_CONSTANT * n * m**2 (m >= 1):
# at most m + 1 passes, each making <= n * (m + 2) value queries.
ORACLE_CALL_CONSTANT = 6


@dataclass(frozen=True)
class UnsatisfiedAgent:
    agent: int


@dataclass
class _Counter:
    calls: int = 0


def initial_guesses(instance: Instance) -> list[int]:
    m = instance.n_goods
    return [int(b * m) for b in instance.entitlements]


def sorted_agent_order(guesses: Sequence[int], entitlements: Sequence[Fraction]) -> list[int]:
    """Agents ascending by ``ceil(s_i / 2) / b_i``, ties by agent id."""
    return sorted(
        range(len(guesses)),
        key=lambda i: (Fraction(ceil_half(guesses[i])) / Fraction(entitlements[i]), i),
    )


def _query(v: Valuation, bundle, counter: _Counter | None):
    if counter is not None:
        counter.calls += 1
    return v.value(bundle)


def _existence_pass(instance, guesses, order, extraction, counter):
    pool = set(instance.goods)
    bundles: list[frozenset[int]] = [frozenset()] * instance.n_agents
    for i in order:
        v = instance.valuations[i]
        need = ceil_half(guesses[i])
        if need == 0:
            continue
        if _query(v, pool, counter) < need:
            return bundles, i
        if counter is not None:
            # the clause fast path is one evaluation; the generic path scans the pool
            counter.calls += 1 if extraction == "auto" and v.binary else len(pool) + 1
        witness = extract_non_wasteful(v, pool, method=extraction)
        bundle = trim_non_wasteful(witness, need)
        bundles[i] = bundle
        pool -= bundle
    return bundles, None


def aps_existence_pass(
    instance: Instance,
    guesses: Sequence[int],
    order: Sequence[int] | None = None,
    extraction: str = "auto",
) -> Allocation | UnsatisfiedAgent:
    """One existence pass for fixed guesses.

    Returns the completed allocation, or the first agent (in ``order``) whose
    target ``ceil(s_i / 2)`` exceeds that agent's value for the remaining pool.
    """
    if order is None:
        order = sorted_agent_order(guesses, instance.entitlements)
    bundles, failed = _existence_pass(instance, guesses, order, extraction, None)
    if failed is not None:
        return UnsatisfiedAgent(failed)
    return complete_with_leftovers(instance, bundles)


@dataclass
class HalfAPSResult:
    allocation: Allocation
    achieved: list
    final_guesses: list[int]
    passes: int
    oracle_calls: int
    decrements: list[int] = field(default_factory=list)
    # guesses in force at each decrement, as (agent, pre-decrement guess)
    decrement_points: list[tuple[int, int]] = field(default_factory=list)
    # serving order and bundles (before leftovers) of the successful pass
    final_order: list[int] = field(default_factory=list)
    assigned: list[frozenset[int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "allocation": self.allocation.to_dict(),
            "achieved": [json_number(a) for a in self.achieved],
            "finalGuesses": list(self.final_guesses),
            "passes": self.passes,
            "oracleCalls": self.oracle_calls,
            "decrements": list(self.decrements),
        }


def solve_half_aps(instance: Instance, extraction: str = "auto") -> HalfAPSResult:
    """Guess-and-decrease loop around :func:`aps_existence_pass`."""
    guesses = initial_guesses(instance)
    counter = _Counter()
    passes = 0
    decrements: list[int] = []
    points: list[tuple[int, int]] = []
    while True:
        order = sorted_agent_order(guesses, instance.entitlements)
        passes += 1
        assigned, i = _existence_pass(instance, guesses, order, extraction, counter)
        if i is None:
            break
        points.append((i, guesses[i]))
        decrements.append(i)
        guesses[i] -= 1

    allocation = complete_with_leftovers(instance, assigned)
    achieved = [v.value(b) for v, b in zip(instance.valuations, allocation.bundles)]
    return HalfAPSResult(
        allocation=allocation,
        achieved=achieved,
        final_guesses=guesses,
        passes=passes,
        oracle_calls=counter.calls,
        decrements=decrements,
        decrement_points=points,
        final_order=order,
        assigned=assigned,
    )


def solve_half_mms(instance: Instance, extraction: str = "auto") -> HalfAPSResult:
    """Half-MMS: run the APS solver with every entitlement set to ``1/n``."""
    return solve_half_aps(instance.equalized(), extraction)
