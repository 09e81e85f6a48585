from fractions import Fraction

import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fairshare.estimators import (
    BinaryAdditiveWMMSAllocator,
    HalfAPSAllocator,
    ShareOracle,
    WMMSRoundRobinAllocator,
)
from fairshare.generators import gen_aps_gap, gen_wmms_tight, random_corpus
from fairshare.model import Instance, InstanceError
from fairshare.valuations import BinaryAdditive, NonBinaryMarginalError, ValuationClassError


def test_params_and_clone():
    est = HalfAPSAllocator(equal_entitlements=True)
    assert est.get_params() == {"equal_entitlements": True, "extraction": "auto"}
    est.set_params(extraction="generic")
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert twin is not est


def test_half_aps_allocator():
    inst = random_corpus("random_binary_xos", 1, 3, 6, seed=5)[0]
    est = HalfAPSAllocator()
    alloc = est.fit_predict(inst)
    assert alloc == est.allocation_
    assert est.n_passes_ <= inst.n_goods + 1
    assert est.oracle_calls_ <= est.oracle_call_bound_
    assert est.score(inst)
    assert HalfAPSAllocator(equal_entitlements=True).fit(inst).score(inst)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        HalfAPSAllocator().score(gen_wmms_tight(2))


def test_input_checks():
    with pytest.raises(InstanceError):
        HalfAPSAllocator().fit({"goods": 2})
    with pytest.raises((ValuationClassError, NonBinaryMarginalError)):
        HalfAPSAllocator().fit(gen_aps_gap(2, Fraction(1, 10)))
    with pytest.raises(ValuationClassError):
        BinaryAdditiveWMMSAllocator().fit(gen_wmms_tight(2))


def test_round_robin_allocator():
    inst = gen_wmms_tight(2)
    est = WMMSRoundRobinAllocator().fit(inst)
    assert est.achieved_ == [1, 1]
    assert est.score(inst)


def test_binary_additive_allocator():
    inst = Instance.from_parts(3, [Fraction(1, 3), Fraction(2, 3)], [BinaryAdditive({0, 1, 2})] * 2)
    est = BinaryAdditiveWMMSAllocator()
    assert est.fit_predict(inst).bundles == (frozenset({0}), frozenset({1, 2}))
    assert est.score(inst)


def test_share_oracle():
    assert ShareOracle("wmms").fit_transform(gen_wmms_tight(2)) == [Fraction(1, 2), 2]
    oracle = ShareOracle(notion="aps").fit(gen_aps_gap(2, Fraction(1, 10)))
    assert oracle.values_[1] == Fraction(1, 10)
    assert oracle.shares_[1].witness is not None
