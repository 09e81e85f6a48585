"""scikit-learn style front-ends for the allocators and share oracles.

Each allocator is configured through ``__init__`` keyword arguments (so
``get_params`` / ``set_params`` / ``clone`` work), learns nothing until
``fit(instance)``, and exposes its results as trailing-underscore attributes.
``fit_predict`` returns the allocation, mirroring clusterers that return labels.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from fairshare.aps import ORACLE_CALL_CONSTANT, solve_half_aps
from fairshare.model import Allocation, Instance, InstanceError
from fairshare.shares import OracleLimits, all_shares
from fairshare.valuations import (
    XOS,
    Additive,
    BinaryAdditive,
    BinaryXOS,
    require_binary_marginals,
    require_kind,
)
from fairshare.verify import verify_allocation
from fairshare.wmms import wmms_allocate_binadd, wmms_round_robin


def check_instance(instance, kinds: tuple[type, ...] | None = None, binary: bool = False) -> Instance:
    """Validate estimator input: an :class:`Instance` whose valuations fit the algorithm."""
    if not isinstance(instance, Instance):
        raise InstanceError("$", f"expected an Instance, got {type(instance).__name__}")
    if kinds is not None:
        require_kind(instance.valuations, *kinds)
    if binary:
        require_binary_marginals(instance.valuations, instance.n_goods)
    return instance


class BaseAllocator(BaseEstimator):
    def fit(self, instance: Instance, y=None):
        raise NotImplementedError

    def fit_predict(self, instance: Instance, y=None) -> Allocation:
        return self.fit(instance).allocation_

    def score(self, instance: Instance, guarantee: str | None = None) -> bool:
        """Whether the fitted allocation meets the allocator's guarantee (oracle-checked)."""
        check_is_fitted(self, "allocation_")
        report = verify_allocation(instance, self.allocation_, guarantee or self.guarantee)
        return report.overall


class HalfAPSAllocator(BaseAllocator):
    """Half-APS allocation for binary XOS valuations.

    Parameters
    ----------
    equal_entitlements : bool
        Replace all entitlements by ``1/n`` first, which yields a half-MMS
        allocation.
    extraction : {"auto", "generic"}
        Non-wasteful extraction route; ``"generic"`` uses only value queries.

    Attributes
    ----------
    allocation_, achieved_, guesses_, n_passes_, oracle_calls_, decrements_
    """

    def __init__(self, equal_entitlements: bool = False, extraction: str = "auto"):
        self.equal_entitlements = equal_entitlements
        self.extraction = extraction

    @property
    def guarantee(self) -> str:
        return "mms-half" if self.equal_entitlements else "aps-half"

    def fit(self, instance: Instance, y=None):
        check_instance(instance, binary=True)
        if self.equal_entitlements:
            instance = instance.equalized()
        result = solve_half_aps(instance, extraction=self.extraction)
        self.result_ = result
        self.allocation_ = result.allocation
        self.achieved_ = result.achieved
        self.guesses_ = result.final_guesses
        self.n_passes_ = result.passes
        self.oracle_calls_ = result.oracle_calls
        self.decrements_ = result.decrements
        self.oracle_call_bound_ = ORACLE_CALL_CONSTANT * instance.n_agents * max(instance.n_goods, 1) ** 2
        return self


class WMMSRoundRobinAllocator(BaseAllocator):
    """1/n-WMMS allocation for XOS valuations.

    ``partitions`` fixes the per-agent WMMS partitions; by default they are
    read from the instance or computed by the exact oracle (subject to
    ``partition_cap``).
    """

    guarantee = "wmms-over-n"

    def __init__(self, partitions=None, partition_cap: int | None = None):
        self.partitions = partitions
        self.partition_cap = partition_cap

    def fit(self, instance: Instance, y=None):
        check_instance(instance, kinds=(XOS, Additive, BinaryXOS, BinaryAdditive))
        limits = None if self.partition_cap is None else OracleLimits(partitions=self.partition_cap)
        result = wmms_round_robin(instance, self.partitions, limits)
        self.result_ = result
        self.allocation_ = result.allocation
        self.achieved_ = result.achieved
        self.partitions_ = result.partitions
        self.targets_ = result.targets
        return self


class BinaryAdditiveWMMSAllocator(BaseAllocator):
    """Exact WMMS allocation for binary additive valuations."""

    guarantee = "wmms-exact"

    def fit(self, instance: Instance, y=None):
        check_instance(instance, kinds=(BinaryAdditive,))
        result = wmms_allocate_binadd(instance)
        self.result_ = result
        self.allocation_ = result.allocation
        self.achieved_ = result.achieved
        return self


class ShareOracle(BaseEstimator):
    """Exact per-agent shares of one notion (``"aps"``, ``"mms"`` or ``"wmms"``).

    ``fit`` stores ``shares_`` (records with witnesses) and ``values_``.
    """

    def __init__(self, notion: str = "aps", cap: int | None = None):
        self.notion = notion
        self.cap = cap

    def fit(self, instance: Instance, y=None):
        check_instance(instance)
        limits = None if self.cap is None else OracleLimits(self.cap, self.cap)
        self.shares_ = all_shares(instance, self.notion, limits)
        self.values_ = [s.value for s in self.shares_]
        return self

    def fit_transform(self, instance: Instance, y=None):
        return self.fit(instance).values_
