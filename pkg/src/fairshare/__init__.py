"""Fair division of indivisible goods under (binary) XOS valuations with entitlements.

Allocators for half-APS / half-MMS (binary XOS), 1/n-WMMS (XOS) and exact WMMS
(binary additive), exact brute-force share oracles, and generators for the
tight instance families.
"""
from fairshare.aps import aps_existence_pass, solve_half_aps, solve_half_mms
from fairshare.estimators import (
    BinaryAdditiveWMMSAllocator,
    HalfAPSAllocator,
    ShareOracle,
    WMMSRoundRobinAllocator,
)
from fairshare.generators import GeneratorSpec, gen_aps_gap, gen_random, gen_wmms_tight
from fairshare.model import (
    Allocation,
    Instance,
    InstanceError,
    ShareValue,
    load_instance,
    save_instance,
    validate_allocation,
)
from fairshare.shares import (
    OracleCapExceeded,
    OracleLimits,
    best_allocation_ratio,
    exact_aps,
    exact_mms,
    exact_wmms,
)
from fairshare.valuations import (
    XOS,
    Additive,
    BinaryAdditive,
    BinaryXOS,
    check_binary_marginals,
    extract_non_wasteful,
    trim_non_wasteful,
)
from fairshare.wmms import wmms_allocate_binadd, wmms_partition_binadd, wmms_round_robin

__version__ = "0.1.0"

__all__ = [
    "Additive",
    "Allocation",
    "BinaryAdditive",
    "BinaryAdditiveWMMSAllocator",
    "BinaryXOS",
    "GeneratorSpec",
    "HalfAPSAllocator",
    "Instance",
    "InstanceError",
    "OracleCapExceeded",
    "OracleLimits",
    "ShareOracle",
    "ShareValue",
    "WMMSRoundRobinAllocator",
    "XOS",
    "aps_existence_pass",
    "best_allocation_ratio",
    "check_binary_marginals",
    "exact_aps",
    "exact_mms",
    "exact_wmms",
    "extract_non_wasteful",
    "gen_aps_gap",
    "gen_random",
    "gen_wmms_tight",
    "load_instance",
    "save_instance",
    "solve_half_aps",
    "solve_half_mms",
    "trim_non_wasteful",
    "validate_allocation",
    "wmms_allocate_binadd",
    "wmms_partition_binadd",
    "wmms_round_robin",
]
