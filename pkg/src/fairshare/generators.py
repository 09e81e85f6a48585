"""Tight-instance families and seeded random instances."""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from fairshare.model import Instance
from fairshare.valuations import XOS, Additive, BinaryAdditive, BinaryXOS

FAMILIES = (
    "thm43",
    "prop41",
    "random_binary_xos",
    "random_binary_additive",
    "random_xos",
    "random_additive",
)

# CLI spellings
FAMILY_ALIASES = {
    "wmms-tight": "thm43",
    "aps-gap": "prop41",
    "random-bxos": "random_binary_xos",
    "random-badd": "random_binary_additive",
    "random-xos": "random_xos",
    "random-add": "random_additive",
}


class GeneratorError(ValueError):
    pass


def gen_wmms_tight(n: int) -> Instance:
    """``2n - 1`` goods; no allocation beats 1/n-WMMS on this instance.

    Agents ``0..n-2`` value any one of goods ``0..n-1``; agent ``n-1`` values
    the block ``{0..n-1}`` or any single good of ``{n..2n-2}``, and holds
    ``n`` times the entitlement of each other agent.
    """
    if n < 2:
        raise GeneratorError(f"thm43 needs n >= 2, got {n}")
    m = 2 * n - 1
    light = BinaryXOS(tuple(frozenset({g}) for g in range(n)))
    heavy = BinaryXOS((frozenset(range(n)),) + tuple(frozenset({g}) for g in range(n, m)))
    b = [Fraction(1, m)] * (n - 1) + [Fraction(n, m)]
    return Instance.from_parts(m, b, [light] * (n - 1) + [heavy])


def epsilon_for_delta(n: int, delta: Fraction) -> Fraction:
    """Half the largest epsilon that still pushes the APS/WMMS ratio below ``delta``."""
    delta = Fraction(delta)
    if delta <= 0:
        raise GeneratorError("delta must be positive")
    return Fraction(1, n - 1) * delta / (delta + 1) / 2


def gen_aps_gap(n: int, epsilon: Fraction | None = None, delta: Fraction | None = None) -> Instance:
    """``n`` identical additive agents whose last agent has APS far below WMMS.

    Goods ``0..n-2`` and agents ``0..n-2`` get weight/entitlement ``epsilon``;
    the last good and agent get ``1 - (n-1) * epsilon``.
    """
    if n < 2:
        raise GeneratorError(f"prop41 needs n >= 2, got {n}")
    if epsilon is None:
        if delta is None:
            raise GeneratorError("prop41 needs epsilon or delta")
        epsilon = epsilon_for_delta(n, delta)
    eps = Fraction(epsilon)
    if not 0 < eps < Fraction(1, n - 1):
        raise GeneratorError(f"prop41 needs 0 < epsilon < 1/(n-1), got {eps}")
    big = 1 - (n - 1) * eps
    weights = {g: eps for g in range(n - 1)}
    weights[n - 1] = big
    v = Additive(weights)
    return Instance.from_parts(n, [eps] * (n - 1) + [big], [v] * n)


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    m: int | None = None
    epsilon: Fraction | None = None
    delta: Fraction | None = None
    clause_count: int = 4
    clause_size: int | None = None
    seed: int = 0
    max_denominator: int = 1000
    max_weight: int = 6
    max_weight_denominator: int = 4
    binary_weights: bool = False

    def __post_init__(self):
        family = FAMILY_ALIASES.get(self.family, self.family)
        object.__setattr__(self, "family", family)
        if family not in FAMILIES:
            raise GeneratorError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise GeneratorError("n must be at least 1")
        if family.startswith("random"):
            if self.m is None or self.m < 0:
                raise GeneratorError(f"{family} needs m >= 0")
            if self.clause_count < 1:
                raise GeneratorError("clause_count must be at least 1")
            if self.clause_size is not None and self.clause_size < 1:
                raise GeneratorError("clause_size must be at least 1")
            if self.max_denominator < self.n:
                raise GeneratorError("max_denominator must be at least n")
        if family == "thm43" and self.m is not None and self.m != 2 * self.n - 1:
            raise GeneratorError(f"thm43 forces m = 2n - 1 = {2 * self.n - 1}")
        if family == "prop41" and self.m is not None and self.m != self.n:
            raise GeneratorError(f"prop41 forces m = n = {self.n}")


def _random_entitlements(rng: np.random.Generator, n: int, max_den: int) -> list[Fraction]:
    total = int(rng.integers(n, max_den + 1))
    cuts = sorted(rng.choice(np.arange(1, total), size=n - 1, replace=False).tolist()) if n > 1 else []
    edges = [0] + cuts + [total]
    return [Fraction(edges[k + 1] - edges[k], total) for k in range(n)]


def _random_subset(rng: np.random.Generator, m: int, lo: int, hi: int) -> frozenset[int]:
    size = int(rng.integers(lo, hi + 1))
    return frozenset(rng.choice(m, size=size, replace=False).tolist())


def _random_weight(rng: np.random.Generator, spec: GeneratorSpec) -> Fraction:
    if spec.binary_weights:
        return Fraction(int(rng.integers(0, 2)))
    return Fraction(
        int(rng.integers(0, spec.max_weight + 1)),
        int(rng.integers(1, spec.max_weight_denominator + 1)),
    )


def _random_valuation(rng: np.random.Generator, spec: GeneratorSpec):
    m = spec.m
    size_cap = m if spec.clause_size is None else min(spec.clause_size, m)
    n_clauses = int(rng.integers(1, spec.clause_count + 1))
    if spec.family == "random_binary_xos":
        lo = 1 if size_cap else 0
        return BinaryXOS(tuple(_random_subset(rng, m, lo, size_cap) for _ in range(n_clauses)))
    if spec.family == "random_binary_additive":
        return BinaryAdditive(_random_subset(rng, m, 0, m))
    if spec.family == "random_xos":
        clauses = []
        for _ in range(n_clauses):
            support = _random_subset(rng, m, 0, size_cap)
            clauses.append({g: _random_weight(rng, spec) for g in sorted(support)})
        return XOS(tuple(clauses))
    return Additive({g: _random_weight(rng, spec) for g in range(m)})


def gen_random(spec: GeneratorSpec) -> Instance:
    """Seeded instance of a random family; equal specs give identical instances."""
    if spec.family == "thm43":
        return gen_wmms_tight(spec.n)
    if spec.family == "prop41":
        return gen_aps_gap(spec.n, spec.epsilon, spec.delta)
    rng = np.random.default_rng(spec.seed)
    b = _random_entitlements(rng, spec.n, spec.max_denominator)
    vals = [_random_valuation(rng, spec) for _ in range(spec.n)]
    return Instance.from_parts(spec.m, b, vals)


def generate(spec: GeneratorSpec) -> Instance:
    return gen_random(spec)


def random_corpus(
    family: str,
    count: int,
    n_max: int,
    m_max: int,
    seed: int = 0,
    n_min: int = 1,
    m_min: int = 1,
    **overrides,
) -> list[Instance]:
    """``count`` seeded instances with ``n`` and ``m`` drawn uniformly from the given ranges."""
    rng = np.random.default_rng(seed)
    base = GeneratorSpec(family=family, n=1, m=0, **overrides)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        m = int(rng.integers(m_min, m_max + 1))
        spec = replace(base, n=n, m=m, seed=int(rng.integers(2**63)), max_denominator=max(base.max_denominator, n))
        out.append(gen_random(spec))
    return out
