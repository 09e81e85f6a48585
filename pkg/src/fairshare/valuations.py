"""Valuation oracles for XOS, additive and their binary-marginal special cases.

Every valuation is an immutable value object exposing ``value(bundle)``. XOS
valuations are stored as explicit clause lists (a pointwise maximum of additive
functions); additive valuations are the one-clause case.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import ClassVar, Iterable

import numpy as np


class NonBinaryMarginalError(ValueError):
    """Raised when a marginal outside {0, 1} is observed."""


def to_mask(goods: Iterable[int]) -> int:
    mask = 0
    for g in goods:
        mask |= 1 << g
    return mask


def from_mask(mask: int) -> frozenset[int]:
    goods = []
    g = 0
    while mask:
        if mask & 1:
            goods.append(g)
        mask >>= 1
        g += 1
    return frozenset(goods)


def _parse_weight(raw, path: str) -> Fraction:
    # imported lazily to keep this module free of the model layer
    from fairshare.model import InstanceError, parse_rational

    w = parse_rational(raw, path)
    if w < 0:
        raise InstanceError(path, f"negative weight {w}")
    return w


def _parse_good(raw, path: str) -> int:
    from fairshare.model import InstanceError

    try:
        g = int(raw)
    except (TypeError, ValueError):
        raise InstanceError(path, f"good id {raw!r} is not an integer") from None
    if isinstance(raw, bool) or g < 0 or str(g) != str(raw).strip():
        raise InstanceError(path, f"invalid good id {raw!r}")
    return g


class Valuation:
    """Base class. Subclasses are frozen dataclasses."""

    kind: ClassVar[str]
    binary: ClassVar[bool] = False

    def value(self, bundle: Iterable[int]):
        raise NotImplementedError

    def clause_weights(self) -> list[dict[int, Fraction]]:
        """The additive clauses whose pointwise max is this valuation."""
        raise NotImplementedError

    def goods_referenced(self) -> set[int]:
        out: set[int] = set()
        for clause in self.clause_weights():
            out.update(clause)
        return out

    def to_dict(self) -> dict:
        raise NotImplementedError

    def value_table(self, n_goods: int) -> tuple[np.ndarray, int]:
        """Values of all ``2**n_goods`` bundles, indexed by bitmask.

        Returns ``(table, scale)`` with ``value(mask) == Fraction(table[mask], scale)``.
        Entries are exact integers (int64 when they fit, Python ints otherwise).
        """
        clauses = self.clause_weights()
        scale = 1
        for clause in clauses:
            for w in clause.values():
                scale = lcm(scale, Fraction(w).denominator)
        int_clauses = [
            [int(Fraction(clause.get(g, 0)) * scale) for g in range(n_goods)]
            for clause in clauses
        ]
        biggest = max((sum(c) for c in int_clauses), default=0)
        dtype = np.int64 if biggest < 2**62 else object
        size = 1 << n_goods
        table = np.zeros(size, dtype=dtype)
        for weights in int_clauses:
            t = np.zeros(size, dtype=dtype)
            for g, w in enumerate(weights):
                lo = 1 << g
                t[lo : 2 * lo] = t[:lo] + w
            np.maximum(table, t, out=table)
        return table, scale


@dataclass(frozen=True)
class BinaryXOS(Valuation):
    """``v(S) = max_t |S & T_t|`` over unit-weight clause sets ``T_t``."""

    clauses: tuple[frozenset[int], ...]

    kind: ClassVar[str] = "binary_xos"
    binary: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(frozenset(c) for c in self.clauses))
        if not self.clauses:
            raise ValueError("binary XOS valuation needs at least one clause")

    def value(self, bundle: Iterable[int]) -> int:
        bundle = bundle if isinstance(bundle, (set, frozenset)) else set(bundle)
        return max(len(bundle & c) for c in self.clauses)

    def best_clause(self, bundle: Iterable[int]) -> int:
        """Index of the clause with the largest overlap (lowest index on ties)."""
        bundle = set(bundle)
        best, best_t = -1, 0
        for t, c in enumerate(self.clauses):
            k = len(bundle & c)
            if k > best:
                best, best_t = k, t
        return best_t

    def clause_weights(self) -> list[dict[int, Fraction]]:
        return [{g: Fraction(1) for g in c} for c in self.clauses]

    def to_dict(self) -> dict:
        return {"type": self.kind, "clauses": [sorted(c) for c in self.clauses]}


@dataclass(frozen=True)
class XOS(Valuation):
    """``v(S) = max_t sum_{g in S} w_t(g)``; clauses stored as sorted (good, weight) pairs."""

    clauses: tuple[tuple[tuple[int, Fraction], ...], ...]

    kind: ClassVar[str] = "xos"

    def __post_init__(self):
        canon = []
        for clause in self.clauses:
            items = clause.items() if isinstance(clause, dict) else clause
            canon.append(tuple(sorted((int(g), Fraction(w)) for g, w in items)))
        object.__setattr__(self, "clauses", tuple(canon))
        if not self.clauses:
            raise ValueError("XOS valuation needs at least one clause")
        for clause in self.clauses:
            if any(w < 0 for _, w in clause):
                raise ValueError("XOS weights must be non-negative")

    def value(self, bundle: Iterable[int]) -> Fraction:
        bundle = bundle if isinstance(bundle, (set, frozenset)) else set(bundle)
        return max(sum((w for g, w in c if g in bundle), Fraction(0)) for c in self.clauses)

    def clause_weights(self) -> list[dict[int, Fraction]]:
        return [dict(c) for c in self.clauses]

    def to_dict(self) -> dict:
        return {
            "type": self.kind,
            "clauses": [{str(g): str(w) for g, w in c} for c in self.clauses],
        }


@dataclass(frozen=True)
class Additive(Valuation):
    weights: tuple[tuple[int, Fraction], ...]

    kind: ClassVar[str] = "additive"

    def __post_init__(self):
        items = self.weights.items() if isinstance(self.weights, dict) else self.weights
        canon = tuple(sorted((int(g), Fraction(w)) for g, w in items))
        if any(w < 0 for _, w in canon):
            raise ValueError("additive weights must be non-negative")
        object.__setattr__(self, "weights", canon)

    def value(self, bundle: Iterable[int]) -> Fraction:
        bundle = bundle if isinstance(bundle, (set, frozenset)) else set(bundle)
        return sum((w for g, w in self.weights if g in bundle), Fraction(0))

    def clause_weights(self) -> list[dict[int, Fraction]]:
        return [dict(self.weights)]

    def to_dict(self) -> dict:
        return {"type": self.kind, "weights": {str(g): str(w) for g, w in self.weights}}


@dataclass(frozen=True)
class BinaryAdditive(Valuation):
    """``v(S) = |S & D|`` for the desired set ``D``."""

    desired: frozenset[int]

    kind: ClassVar[str] = "binary_additive"
    binary: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "desired", frozenset(self.desired))

    def value(self, bundle: Iterable[int]) -> int:
        bundle = bundle if isinstance(bundle, (set, frozenset)) else set(bundle)
        return len(bundle & self.desired)

    def clause_weights(self) -> list[dict[int, Fraction]]:
        return [{g: Fraction(1) for g in self.desired}]

    def to_dict(self) -> dict:
        return {"type": self.kind, "desired": sorted(self.desired)}


VALUATION_TYPES = {cls.kind: cls for cls in (BinaryXOS, XOS, Additive, BinaryAdditive)}


def valuation_from_dict(data, path: str = "valuation") -> Valuation:
    from fairshare.model import InstanceError

    if not isinstance(data, dict):
        raise InstanceError(path, "valuation must be an object")
    kind = data.get("type")
    if kind not in VALUATION_TYPES:
        raise InstanceError(f"{path}.type", f"unknown valuation type {kind!r}")

    if kind == "binary_xos":
        clauses = data.get("clauses")
        if not isinstance(clauses, list) or not clauses:
            raise InstanceError(f"{path}.clauses", "expected a non-empty list of clauses")
        parsed = []
        for t, clause in enumerate(clauses):
            if not isinstance(clause, list):
                raise InstanceError(f"{path}.clauses[{t}]", "clause must be a list of good ids")
            parsed.append(
                frozenset(_parse_good(g, f"{path}.clauses[{t}][{k}]") for k, g in enumerate(clause))
            )
        return BinaryXOS(tuple(parsed))

    if kind == "xos":
        clauses = data.get("clauses")
        if not isinstance(clauses, list) or not clauses:
            raise InstanceError(f"{path}.clauses", "expected a non-empty list of clauses")
        parsed = []
        for t, clause in enumerate(clauses):
            if not isinstance(clause, dict):
                raise InstanceError(f"{path}.clauses[{t}]", "clause must map good ids to weights")
            parsed.append(
                {
                    _parse_good(g, f"{path}.clauses[{t}].{g}"): _parse_weight(
                        w, f"{path}.clauses[{t}].{g}"
                    )
                    for g, w in clause.items()
                }
            )
        return XOS(tuple(parsed))

    if kind == "additive":
        weights = data.get("weights")
        if not isinstance(weights, dict):
            raise InstanceError(f"{path}.weights", "expected an object of good id -> weight")
        return Additive(
            {
                _parse_good(g, f"{path}.weights.{g}"): _parse_weight(w, f"{path}.weights.{g}")
                for g, w in weights.items()
            }
        )

    desired = data.get("desired")
    if not isinstance(desired, list):
        raise InstanceError(f"{path}.desired", "expected a list of good ids")
    return BinaryAdditive(
        frozenset(_parse_good(g, f"{path}.desired[{k}]") for k, g in enumerate(desired))
    )


def value(valuation: Valuation, bundle: Iterable[int]):
    return valuation.value(bundle)


def check_binary_marginals(
    valuation: Valuation, n_goods: int, trials: int = 2000, seed: int = 0
) -> bool:
    """Test ``v(S + g) - v(S) in {0, 1}``.

    Exhaustive over all (S, g) when ``2**n_goods <= 4096``, otherwise ``trials``
    random pairs drawn with ``seed``.
    """
    if n_goods <= 12:
        table, scale = valuation.value_table(n_goods)
        idx = np.arange(1 << n_goods)
        for g in range(n_goods):
            bit = 1 << g
            without = idx[(idx & bit) == 0]
            diff = table[without | bit] - table[without]
            if np.any((diff != 0) & (diff != scale)):
                return False
        return True

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        members = rng.random(n_goods) < rng.random()
        g = int(rng.integers(n_goods))
        members[g] = False
        bundle = set(np.flatnonzero(members).tolist())
        delta = valuation.value(bundle | {g}) - valuation.value(bundle)
        if delta not in (0, 1):
            return False
    return True


@dataclass(frozen=True)
class NonWastefulWitness:
    source: frozenset[int]
    extracted: frozenset[int]
    value: int


def _as_int_value(v, where: str) -> int:
    if Fraction(v).denominator != 1:
        raise NonBinaryMarginalError(f"non-integer value {v} on {where}")
    return int(v)


def extract_non_wasteful(
    valuation: Valuation, bundle: Iterable[int], method: str = "auto"
) -> NonWastefulWitness:
    """Find ``X`` inside ``bundle`` with ``v(X) == |X| == v(bundle)``.

    ``method="auto"`` uses the clause structure of binary XOS / binary additive
    valuations; ``method="generic"`` only queries the value oracle, dropping
    redundant goods in ascending id order.
    """
    source = frozenset(bundle)
    if method not in ("auto", "generic"):
        raise ValueError(f"unknown extraction method {method!r}")

    if method == "auto" and isinstance(valuation, BinaryXOS):
        t = valuation.best_clause(source)
        x = source & valuation.clauses[t]
        return NonWastefulWitness(source, x, len(x))
    if method == "auto" and isinstance(valuation, BinaryAdditive):
        x = source & valuation.desired
        return NonWastefulWitness(source, x, len(x))

    target = _as_int_value(valuation.value(source), "source bundle")
    current = set(source)
    for g in sorted(source):
        current.discard(g)
        reduced = valuation.value(current)
        delta = target - reduced
        if delta == 0:
            continue
        if delta != 1:
            raise NonBinaryMarginalError(f"marginal of good {g} is {delta}")
        current.add(g)
    if len(current) != target:
        raise NonBinaryMarginalError(
            f"no non-wasteful subset found: value {target}, {len(current)} goods left"
        )
    return NonWastefulWitness(source, frozenset(current), target)


def trim_non_wasteful(witness: NonWastefulWitness, k: int) -> frozenset[int]:
    """The ``k`` lowest-id goods of an extracted non-wasteful set."""
    if not 0 <= k <= len(witness.extracted):
        raise ValueError(f"k={k} outside [0, {len(witness.extracted)}]")
    return frozenset(sorted(witness.extracted)[:k])


def non_wasteful_subsets_ok(valuation: Valuation, x: Iterable[int]) -> bool:
    """Exhaustively check that every subset of ``x`` is non-wasteful."""
    x = sorted(x)
    for r in range(len(x) + 1):
        for sub in combinations(x, r):
            if valuation.value(sub) != r:
                return False
    return True


class ValuationClassError(TypeError):
    """An algorithm was handed a valuation class it does not support."""


def require_binary_marginals(valuations: Iterable[Valuation], n_goods: int) -> None:
    for i, v in enumerate(valuations):
        if v.binary:
            continue
        if not check_binary_marginals(v, n_goods):
            raise ValuationClassError(f"agent {i}: {v.kind} valuation without binary marginals")


def require_kind(valuations: Iterable[Valuation], *classes: type) -> None:
    for i, v in enumerate(valuations):
        if not isinstance(v, classes):
            names = ", ".join(c.kind for c in classes)
            raise ValuationClassError(f"agent {i}: {v.kind} valuation, expected one of {names}")
