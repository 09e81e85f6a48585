"""Instances, allocations, share records and their canonical JSON form.

All numbers that enter share computations are :class:`fractions.Fraction`
(or plain ints for binary valuations); nothing here touches floating point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Sequence

from fairshare.valuations import Valuation, valuation_from_dict


class InstanceError(ValueError):
    """Invalid instance or allocation input, tagged with the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


def parse_rational(raw, path: str = "value") -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise InstanceError(path, f"expected a rational string 'p/q', got {raw!r}")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise InstanceError(path, f"malformed rational {raw!r}") from None


def format_rational(x) -> str:
    return str(Fraction(x))


def json_number(x):
    """Integers stay JSON ints; other rationals become ``"p/q"`` strings."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def floor_rational(x) -> int:
    return floor(Fraction(x))


def ceil_rational(x) -> int:
    return ceil(Fraction(x))


def ceil_half(k: int) -> int:
    return -(-k // 2)


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, compact separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class Agent:
    entitlement: Fraction
    valuation: Valuation


@dataclass(frozen=True)
class PartitionHint:
    """A WMMS partition supplied with an instance (bundle ``j`` is meant for agent ``j``)."""

    partition: tuple[frozenset[int], ...]
    value: Fraction | None = None


@dataclass(frozen=True)
class Instance:
    n_goods: int
    agents: tuple[Agent, ...]
    wmms_partitions: tuple[PartitionHint, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if self.wmms_partitions is not None:
            object.__setattr__(self, "wmms_partitions", tuple(self.wmms_partitions))
        validate_instance(self)

    @property
    def goods(self) -> range:
        return range(self.n_goods)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def entitlements(self) -> tuple[Fraction, ...]:
        return tuple(a.entitlement for a in self.agents)

    @property
    def valuations(self) -> tuple[Valuation, ...]:
        return tuple(a.valuation for a in self.agents)

    @classmethod
    def from_parts(cls, n_goods, entitlements, valuations, wmms_partitions=None) -> "Instance":
        if len(entitlements) != len(valuations):
            raise InstanceError("agents", "entitlement and valuation counts differ")
        agents = tuple(Agent(Fraction(b), v) for b, v in zip(entitlements, valuations))
        return cls(n_goods, agents, wmms_partitions)

    def with_entitlements(self, entitlements: Sequence) -> "Instance":
        return Instance.from_parts(self.n_goods, entitlements, self.valuations)

    def equalized(self) -> "Instance":
        n = self.n_agents
        return self.with_entitlements([Fraction(1, n)] * n)

    def to_dict(self) -> dict:
        out = {
            "goods": self.n_goods,
            "agents": [
                {"entitlement": format_rational(a.entitlement), "valuation": a.valuation.to_dict()}
                for a in self.agents
            ],
        }
        if self.wmms_partitions is not None:
            hints = []
            for h in self.wmms_partitions:
                entry = {"partition": [sorted(b) for b in h.partition]}
                if h.value is not None:
                    entry["value"] = format_rational(h.value)
                hints.append(entry)
            out["wmmsPartitions"] = hints
        return out


def validate_instance(instance: Instance) -> None:
    m = instance.n_goods
    if isinstance(m, bool) or not isinstance(m, int) or m < 0:
        raise InstanceError("goods", f"goods must be a non-negative integer, got {m!r}")
    if not instance.agents:
        raise InstanceError("agents", "at least one agent is required")
    total = Fraction(0)
    for i, agent in enumerate(instance.agents):
        b = agent.entitlement
        if b <= 0:
            raise InstanceError(f"agents[{i}].entitlement", f"entitlement {b} must be positive")
        total += b
        for g in sorted(agent.valuation.goods_referenced()):
            if not 0 <= g < m:
                raise InstanceError(
                    f"agents[{i}].valuation", f"dangling reference to good {g} (goods are 0..{m - 1})"
                )
        if agent.valuation.value(()) != 0:
            raise InstanceError(f"agents[{i}].valuation", "value of the empty bundle is not 0")
    if total != 1:
        raise InstanceError("agents", f"entitlements sum {total} ≠ 1")

    hints = instance.wmms_partitions
    if hints is not None:
        if len(hints) != instance.n_agents:
            raise InstanceError("wmmsPartitions", "need exactly one partition per agent")
        for i, hint in enumerate(hints):
            problems = partition_violations(m, instance.n_agents, hint.partition)
            if problems:
                raise InstanceError(f"wmmsPartitions[{i}].partition", "; ".join(problems))


def partition_violations(n_goods: int, n_bundles: int, bundles: Sequence[Iterable[int]]) -> list[str]:
    if len(bundles) != n_bundles:
        return [f"expected {n_bundles} bundles, got {len(bundles)}"]
    return validate_bundles(n_goods, bundles, complete=True)


def _parse_int(raw, path: str, minimum: int = 0) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < minimum:
        raise InstanceError(path, f"expected an integer >= {minimum}, got {raw!r}")
    return raw


def _parse_good_list(raw, path: str) -> frozenset[int]:
    if not isinstance(raw, list):
        raise InstanceError(path, "expected a list of good ids")
    return frozenset(_parse_int(g, f"{path}[{k}]") for k, g in enumerate(raw))


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("$", "instance must be a JSON object")
    m = _parse_int(data.get("goods"), "goods")
    raw_agents = data.get("agents")
    if not isinstance(raw_agents, list) or not raw_agents:
        raise InstanceError("agents", "expected a non-empty list of agents")
    agents = []
    for i, raw in enumerate(raw_agents):
        if not isinstance(raw, dict):
            raise InstanceError(f"agents[{i}]", "agent must be an object")
        b = parse_rational(raw.get("entitlement"), f"agents[{i}].entitlement")
        v = valuation_from_dict(raw.get("valuation"), f"agents[{i}].valuation")
        agents.append(Agent(b, v))

    hints = None
    if "wmmsPartitions" in data:
        raw_hints = data["wmmsPartitions"]
        if not isinstance(raw_hints, list):
            raise InstanceError("wmmsPartitions", "expected a list")
        hints = []
        for i, raw in enumerate(raw_hints):
            if isinstance(raw, list):
                raw = {"partition": raw}
            if not isinstance(raw, dict) or not isinstance(raw.get("partition"), list):
                raise InstanceError(f"wmmsPartitions[{i}]", "expected {'partition': [[...], ...]}")
            bundles = tuple(
                _parse_good_list(b, f"wmmsPartitions[{i}].partition[{j}]")
                for j, b in enumerate(raw["partition"])
            )
            val = raw.get("value")
            val = None if val is None else parse_rational(val, f"wmmsPartitions[{i}].value")
            hints.append(PartitionHint(bundles, val))
    return Instance(m, tuple(agents), None if hints is None else tuple(hints))


def load_instance(data: bytes | str) -> Instance:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceError("$", f"invalid JSON: {exc}") from None
    return instance_from_dict(parsed)


def save_instance(instance: Instance) -> bytes:
    return dumps(instance.to_dict()).encode("utf-8")


@dataclass(frozen=True)
class Allocation:
    bundles: tuple[frozenset[int], ...]
    complete: bool = True

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))

    def __getitem__(self, agent: int) -> frozenset[int]:
        return self.bundles[agent]

    def __len__(self) -> int:
        return len(self.bundles)

    def owners(self, n_goods: int) -> list[int | None]:
        """Owner agent of every good (``None`` when unassigned)."""
        out: list[int | None] = [None] * n_goods
        for i, bundle in enumerate(self.bundles):
            for g in bundle:
                out[g] = i
        return out

    def to_dict(self) -> dict:
        return {"bundles": [sorted(b) for b in self.bundles], "complete": self.complete}


def allocation_from_dict(data) -> Allocation:
    if isinstance(data, dict) and "allocation" in data:
        data = data["allocation"]
    if not isinstance(data, dict) or not isinstance(data.get("bundles"), list):
        raise InstanceError("bundles", "expected an allocation object with a 'bundles' list")
    complete = data.get("complete", True)
    if not isinstance(complete, bool):
        raise InstanceError("complete", "expected a boolean")
    bundles = tuple(_parse_good_list(b, f"bundles[{i}]") for i, b in enumerate(data["bundles"]))
    return Allocation(bundles, complete)


def load_allocation(data: bytes | str) -> Allocation:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceError("$", f"invalid JSON: {exc}") from None
    return allocation_from_dict(parsed)


def validate_bundles(n_goods: int, bundles: Sequence[Iterable[int]], complete: bool) -> list[str]:
    problems = []
    seen: dict[int, int] = {}
    for i, bundle in enumerate(bundles):
        for g in sorted(bundle):
            if not 0 <= g < n_goods:
                problems.append(f"good {g} in bundle {i} does not exist")
            elif g in seen:
                problems.append(f"good {g} assigned twice")
            else:
                seen[g] = i
    if complete:
        problems.extend(f"good {g} unassigned" for g in range(n_goods) if g not in seen)
    return problems


def validate_allocation(instance: Instance, allocation: Allocation) -> list[str]:
    problems = []
    if len(allocation.bundles) != instance.n_agents:
        problems.append(f"expected {instance.n_agents} bundles, got {len(allocation.bundles)}")
    problems.extend(validate_bundles(instance.n_goods, allocation.bundles, allocation.complete))
    return problems


def leftover_recipient(entitlements: Sequence[Fraction]) -> int:
    """Agent that receives unallocated goods: largest entitlement, lowest id on ties."""
    best = 0
    for i, b in enumerate(entitlements):
        if b > entitlements[best]:
            best = i
    return best


def complete_with_leftovers(instance: Instance, bundles: Sequence[Iterable[int]]) -> Allocation:
    bundles = [set(b) for b in bundles]
    taken = set().union(*bundles) if bundles else set()
    rest = set(instance.goods) - taken
    bundles[leftover_recipient(instance.entitlements)] |= rest
    return Allocation(tuple(frozenset(b) for b in bundles), complete=True)


def achieved_values(instance: Instance, allocation: Allocation) -> list:
    return [v.value(b) for v, b in zip(instance.valuations, allocation.bundles)]


@dataclass(frozen=True)
class PriceVector:
    prices: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "prices", tuple(Fraction(p) for p in self.prices))
        if any(p < 0 for p in self.prices):
            raise ValueError("prices must be non-negative")
        if sum(self.prices) != 1:
            raise ValueError(f"prices sum to {sum(self.prices)}, not 1")

    def price(self, bundle: Iterable[int]) -> Fraction:
        return sum((self.prices[g] for g in bundle), Fraction(0))

    def to_dict(self) -> dict:
        return {"prices": [format_rational(p) for p in self.prices]}


@dataclass(frozen=True)
class WmmsPartitionWitness:
    """Labeled partition of all goods; bundle ``j`` is the one intended for agent ``j``."""

    partition: tuple[frozenset[int], ...]
    value: Fraction

    def to_dict(self) -> dict:
        return {"partition": [sorted(b) for b in self.partition], "value": format_rational(self.value)}


def partition_floor(instance: Instance, agent: int, partition: Sequence[Iterable[int]]) -> Fraction:
    """``min_j v_i(S_j) * b_i / b_j`` for agent ``i`` and a labeled partition."""
    v = instance.valuations[agent]
    b = instance.entitlements
    return min(Fraction(v.value(s)) * b[agent] / b[j] for j, s in enumerate(partition))


NOTIONS = ("APS", "MMS", "WMMS")


@dataclass(frozen=True)
class ShareValue:
    notion: str
    agent: int
    value: Fraction
    witness: WmmsPartitionWitness | PriceVector | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.notion not in NOTIONS:
            raise ValueError(f"unknown share notion {self.notion!r}")
        object.__setattr__(self, "value", Fraction(self.value))

    def to_dict(self, witness: bool = True) -> dict:
        return {
            "notion": self.notion,
            "agent": self.agent,
            "value": format_rational(self.value),
            "witness": self.witness.to_dict() if witness and self.witness is not None else None,
        }
