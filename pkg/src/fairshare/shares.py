"""Exact brute-force share oracles (MMS, WMMS, APS) for desk-scale instances.

These are the ground truth the allocators are checked against, so they share
no code with the allocators beyond the valuation tables.

WMMS/MMS enumerate every labeled partition as a base-``n`` counter over the
goods (good 0 is the most significant digit, so counter order is
lexicographic order of the partition encoding). Objectives are compared as
exact integers after scaling by a common denominator.

APS scans the distinct values of the agent's valuation from the top and asks
an exact LP whether some price vector makes every bundle of at least that
value unaffordable.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from fairshare.model import (
    Instance,
    PriceVector,
    ShareValue,
    WmmsPartitionWitness,
)
from fairshare.simplex import maximize
from fairshare.valuations import from_mask

DEFAULT_PARTITION_CAP = 2_000_000
DEFAULT_SUBSET_CAP = 1 << 14
CAP_ENV_VAR = "FAIRSHARE_ORACLE_CAP"
_CHUNK = 1 << 17


class OracleCapExceeded(RuntimeError):
    def __init__(self, cap_name: str, needed: int, cap: int):
        self.cap_name = cap_name
        self.needed = needed
        self.cap = cap
        super().__init__(f"{cap_name}: instance needs {needed} enumerations, cap is {cap}")


@dataclass(frozen=True)
class OracleLimits:
    partitions: int = DEFAULT_PARTITION_CAP
    subsets: int = DEFAULT_SUBSET_CAP

    @classmethod
    def from_env(cls) -> "OracleLimits":
        raw = os.environ.get(CAP_ENV_VAR)
        if not raw:
            return cls()
        cap = int(raw)
        return cls(partitions=cap, subsets=cap)


def _limits(limits: OracleLimits | None) -> OracleLimits:
    return OracleLimits.from_env() if limits is None else limits


def _integerize(factors: Sequence[Fraction]) -> tuple[list[int], int]:
    """Scale rationals to integers: returns ``(ints, L)`` with ``ints[k] == factors[k] * L``."""
    L = 1
    for f in factors:
        L = lcm(L, Fraction(f).denominator)
    return [int(Fraction(f) * L) for f in factors], L


def _digit_chunks(n: int, m: int, symmetric: bool):
    """Yield ``(codes, digits)`` blocks of the base-``n`` counter over ``m`` goods."""
    total = n**m
    powers = [n ** (m - 1 - g) for g in range(m)]
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        digits = np.empty((m, codes.size), dtype=np.int64)
        for g in range(m):
            digits[g] = (codes // powers[g]) % n
        if symmetric and m:
            # restricted growth strings: the canonical labeling of an unlabeled partition
            keep = digits[0] == 0
            running = digits[0].copy()
            for g in range(1, m):
                keep &= digits[g] <= running + 1
                np.maximum(running, digits[g], out=running)
            codes, digits = codes[keep], digits[:, keep]
        yield codes, digits


def _bundle_masks(digits: np.ndarray, n: int) -> np.ndarray:
    m = digits.shape[0]
    masks = np.zeros((n, digits.shape[1]), dtype=np.int64)
    for g in range(m):
        bit = np.int64(1 << g)
        for j in range(n):
            masks[j] |= np.where(digits[g] == j, bit, 0)
    return masks


def _decode(code: int, n: int, m: int) -> tuple[frozenset[int], ...]:
    bundles: list[set[int]] = [set() for _ in range(n)]
    for g in range(m - 1, -1, -1):
        bundles[code % n].add(g)
        code //= n
    return tuple(frozenset(b) for b in bundles)


def _max_min_partition(
    tables: Sequence[np.ndarray], coefs: Sequence[int], n: int, m: int, symmetric: bool
) -> tuple[int, int]:
    """Maximize ``min_j tables[j][mask_j] * coefs[j]`` over labeled partitions.

    Returns ``(best objective, smallest code attaining it)``.
    """
    big = max(int(np.max(t)) if t.size else 0 for t in tables) * max(coefs, default=1)
    exact_int64 = big < 2**62 and all(t.dtype != object for t in tables)
    best_val, best_code = None, None
    for codes, digits in _digit_chunks(n, m, symmetric):
        if codes.size == 0:
            continue
        masks = _bundle_masks(digits, n)
        obj = None
        for j in range(n):
            col = tables[j][masks[j]]
            col = col * coefs[j] if exact_int64 else np.array([int(x) * coefs[j] for x in col], dtype=object)
            obj = col if obj is None else np.minimum(obj, col)
        k = int(np.argmax(obj))
        val = int(obj[k])
        if best_val is None or val > best_val:
            best_val, best_code = val, int(codes[k])
    return best_val, best_code


def check_partition_cap(n: int, m: int, limits: OracleLimits | None = None) -> None:
    lim = _limits(limits)
    if n**m > lim.partitions:
        raise OracleCapExceeded("partition cap (n^m)", n**m, lim.partitions)


def _wmms(instance: Instance, agent: int, entitlements, limits, symmetric) -> ShareValue:
    n, m = instance.n_agents, instance.n_goods
    check_partition_cap(n, m, limits)
    v = instance.valuations[agent]
    table, scale = v.value_table(m)
    b = [Fraction(x) for x in entitlements]
    # objective = min_j table[mask_j] * b_i / (b_j * scale)
    coefs, L = _integerize([b[agent] / (b[j] * scale) for j in range(n)])
    best, code = _max_min_partition([table] * n, coefs, n, m, symmetric)
    value = Fraction(best, L)
    partition = _decode(code, n, m)
    notion = "MMS" if symmetric else "WMMS"
    return ShareValue(notion, agent, value, WmmsPartitionWitness(partition, value))


def exact_wmms(instance: Instance, agent: int, limits: OracleLimits | None = None) -> ShareValue:
    """Weighted maximin share of ``agent`` with its lexicographically smallest optimal partition."""
    return _wmms(instance, agent, instance.entitlements, limits, symmetric=False)


def exact_mms(instance: Instance, agent: int, limits: OracleLimits | None = None) -> ShareValue:
    """Maximin share: WMMS at equal entitlements, enumerating unlabeled partitions only."""
    n = instance.n_agents
    return _wmms(instance, agent, [Fraction(1, n)] * n, limits, symmetric=True)


def best_allocation_ratio(
    instance: Instance,
    notion: str = "WMMS",
    limits: OracleLimits | None = None,
    shares: Sequence[Fraction] | None = None,
) -> Fraction:
    """Largest ``min_i v_i(A_i) / WMMS_i`` over all complete allocations.

    Agents with a zero share are satisfied by anything and drop out of the
    minimum; if every share is zero the ratio is 1.
    """
    if notion != "WMMS":
        raise ValueError("only the WMMS notion is supported")
    n, m = instance.n_agents, instance.n_goods
    check_partition_cap(n, m, limits)
    if shares is None:
        shares = [exact_wmms(instance, i, limits).value for i in range(n)]
    active = [i for i in range(n) if shares[i] > 0]
    if not active:
        return Fraction(1)

    tables, factors = [], []
    for i in active:
        table, scale = instance.valuations[i].value_table(m)
        tables.append(table)
        factors.append(Fraction(1) / (scale * Fraction(shares[i])))
    coefs, L = _integerize(factors)

    # reuse the max-min enumeration: bundle i of the counter goes to agent i
    best_val = None
    big = max(int(np.max(t)) for t in tables) * max(coefs)
    exact_int64 = big < 2**62 and all(t.dtype != object for t in tables)
    for _, digits in _digit_chunks(n, m, symmetric=False):
        masks = _bundle_masks(digits, n)
        obj = None
        for t, i in enumerate(active):
            col = tables[t][masks[i]]
            col = col * coefs[t] if exact_int64 else np.array([int(x) * coefs[t] for x in col], dtype=object)
            obj = col if obj is None else np.minimum(obj, col)
        val = int(np.max(obj))
        if best_val is None or val > best_val:
            best_val = val
    return Fraction(best_val, L)


def minimal_sets(table: np.ndarray, threshold, n_goods: int) -> np.ndarray:
    """Masks ``S`` with ``table[S] >= threshold`` whose every one-good removal drops below it."""
    idx = np.arange(1 << n_goods, dtype=np.int64)
    ge = table >= threshold
    minimal = ge.copy()
    for g in range(n_goods):
        bit = 1 << g
        has = (idx & bit) != 0
        minimal &= ~(has & ge[idx ^ bit])
    return np.flatnonzero(minimal)


def blocking_price(masks: Sequence[int], budget: Fraction, n_goods: int) -> PriceVector | None:
    """A price vector under which every bundle in ``masks`` costs more than ``budget``.

    Solves ``max t  s.t.  t <= p(S) for S in masks, sum(p) <= 1, p >= 0`` exactly.
    Relaxing ``sum(p) = 1`` to ``<=`` is harmless: scaling prices up only raises
    every ``p(S)``. The bundles are blocked iff the optimum exceeds ``budget``.
    """
    goods = sorted({g for s in masks for g in from_mask(int(s))})
    col = {g: k for k, g in enumerate(goods)}
    k = len(goods)
    # variables: p_0..p_{k-1}, t
    A, rhs = [], []
    for s in masks:
        row = [0] * (k + 1)
        for g in from_mask(int(s)):
            row[col[g]] = -1
        row[k] = 1
        A.append(row)
        rhs.append(0)
    A.append([1] * k + [0])
    rhs.append(1)
    sol = maximize([0] * k + [1], A, rhs)
    if sol.objective <= budget:
        return None
    p = sol.x[:k]
    total = sum(p)
    prices = [Fraction(0)] * n_goods
    for g in goods:
        prices[g] = p[col[g]] / total
    return PriceVector(tuple(prices))


def check_subset_cap(m: int, limits: OracleLimits | None = None) -> None:
    lim = _limits(limits)
    if (1 << m) > lim.subsets:
        raise OracleCapExceeded("subset cap (2^m)", 1 << m, lim.subsets)


def aps_value(
    instance: Instance,
    agent: int,
    budget: Fraction | None = None,
    limits: OracleLimits | None = None,
) -> ShareValue:
    m = instance.n_goods
    check_subset_cap(m, limits)
    b = instance.entitlements[agent] if budget is None else Fraction(budget)
    table, scale = instance.valuations[agent].value_table(m)
    candidates = sorted({int(x) for x in np.unique(table)}, reverse=True)
    witness = None
    for z in candidates:
        if z == 0:
            break
        price = blocking_price(minimal_sets(table, z, m), b, m)
        if price is None:
            return ShareValue("APS", agent, Fraction(z, scale), witness)
        witness = price
    return ShareValue("APS", agent, Fraction(0), witness)


def exact_aps(instance: Instance, agent: int, limits: OracleLimits | None = None) -> ShareValue:
    """AnyPrice share of ``agent``.

    The witness, when present, is a price vector blocking the smallest
    valuation level above the returned share, certifying that the share is
    not larger.
    """
    return aps_value(instance, agent, limits=limits)


def all_shares(instance: Instance, notion: str, limits: OracleLimits | None = None) -> list[ShareValue]:
    oracle = {"APS": exact_aps, "MMS": exact_mms, "WMMS": exact_wmms}[notion.upper()]
    return [oracle(instance, i, limits) for i in range(instance.n_agents)]
