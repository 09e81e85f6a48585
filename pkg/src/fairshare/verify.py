"""Check an allocation against a fairness guarantee using the exact share oracles."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from fairshare.model import Allocation, Instance, format_rational, validate_allocation
from fairshare.shares import OracleLimits, exact_aps, exact_mms, exact_wmms

GUARANTEES = ("aps-half", "mms-half", "wmms-over-n", "wmms-exact")


@dataclass(frozen=True)
class AgentCheck:
    achieved: Fraction
    bound: Fraction
    passed: bool


@dataclass(frozen=True)
class VerifyReport:
    guarantee: str
    per_agent: tuple[AgentCheck, ...]
    shares: tuple[Fraction, ...]
    problems: tuple[str, ...] = ()

    @property
    def overall(self) -> bool:
        return not self.problems and all(c.passed for c in self.per_agent)

    def to_dict(self) -> dict:
        return {
            "guarantee": self.guarantee,
            "overall": self.overall,
            "problems": list(self.problems),
            "perAgent": [
                {
                    "achieved": format_rational(c.achieved),
                    "bound": format_rational(c.bound),
                    "share": format_rational(s),
                    "pass": c.passed,
                }
                for c, s in zip(self.per_agent, self.shares)
            ],
        }

    def table(self) -> str:
        lines = [f"guarantee: {self.guarantee}", "agent  share  bound  achieved  pass"]
        for i, (c, s) in enumerate(zip(self.per_agent, self.shares)):
            lines.append(f"{i:>5}  {str(s):>5}  {str(c.bound):>5}  {str(c.achieved):>8}  {'yes' if c.passed else 'NO'}")
        lines.extend(f"problem: {p}" for p in self.problems)
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines) + "\n"


def guarantee_bounds(
    instance: Instance, guarantee: str, limits: OracleLimits | None = None
) -> tuple[list[Fraction], list[Fraction]]:
    """Per-agent ``(shares, bounds)`` for a guarantee, always recomputed by the oracles."""
    n = instance.n_agents
    if guarantee == "aps-half":
        shares = [exact_aps(instance, i, limits).value for i in range(n)]
        bounds = [Fraction(ceil(s / 2)) for s in shares]
    elif guarantee == "mms-half":
        shares = [exact_mms(instance, i, limits).value for i in range(n)]
        bounds = [Fraction(ceil(s / 2)) for s in shares]
    elif guarantee == "wmms-over-n":
        shares = [exact_wmms(instance, i, limits).value for i in range(n)]
        bounds = [s / n for s in shares]
    elif guarantee == "wmms-exact":
        shares = [exact_wmms(instance, i, limits).value for i in range(n)]
        bounds = list(shares)
    else:
        raise ValueError(f"unknown guarantee {guarantee!r}; choose from {', '.join(GUARANTEES)}")
    return shares, bounds


def verify_allocation(
    instance: Instance,
    allocation: Allocation,
    guarantee: str,
    limits: OracleLimits | None = None,
) -> VerifyReport:
    problems = validate_allocation(instance, allocation)
    shares, bounds = guarantee_bounds(instance, guarantee, limits)
    checks = []
    for i, v in enumerate(instance.valuations):
        bundle = allocation.bundles[i] if i < len(allocation.bundles) else frozenset()
        got = Fraction(v.value(bundle))
        checks.append(AgentCheck(got, bounds[i], got >= bounds[i]))
    return VerifyReport(guarantee, tuple(checks), tuple(shares), tuple(problems))
