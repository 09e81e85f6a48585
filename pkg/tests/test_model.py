import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairshare.generators import GeneratorSpec, gen_random
from fairshare.model import (
    Allocation,
    Instance,
    InstanceError,
    PriceVector,
    ShareValue,
    ceil_half,
    complete_with_leftovers,
    floor_rational,
    leftover_recipient,
    load_allocation,
    load_instance,
    save_instance,
    validate_allocation,
)
from fairshare.valuations import BinaryXOS

SMALL = {
    "goods": 3,
    "agents": [
        {"entitlement": "1/3", "valuation": {"type": "binary_xos", "clauses": [[0], [1, 2]]}},
        {"entitlement": "2/3", "valuation": {"type": "binary_xos", "clauses": [[2, 0]]}},
    ],
}


def _load(d):
    return load_instance(json.dumps(d))


def test_load_declared_content():
    inst = _load(SMALL)
    assert inst.n_goods == 3
    assert inst.entitlements == (Fraction(1, 3), Fraction(2, 3))
    assert inst.valuations[0] == BinaryXOS((frozenset({0}), frozenset({1, 2})))
    assert inst.valuations[1].clauses == (frozenset({0, 2}),)


def test_entitlement_sum_error():
    bad = json.loads(json.dumps(SMALL))
    bad["agents"][1]["entitlement"] = "1/2"
    with pytest.raises(InstanceError, match="entitlements sum 5/6 ≠ 1"):
        _load(bad)


def test_dangling_good_reference():
    bad = json.loads(json.dumps(SMALL))
    bad["agents"][0]["valuation"]["clauses"] = [[7]]
    with pytest.raises(InstanceError, match="dangling") as err:
        _load(bad)
    assert err.value.path == "agents[0].valuation"


def test_negative_weight_reports_path():
    bad = {
        "goods": 2,
        "agents": [{"entitlement": "1", "valuation": {"type": "additive", "weights": {"1": "-1/2"}}}],
    }
    with pytest.raises(InstanceError, match="negative weight") as err:
        _load(bad)
    assert err.value.path == "agents[0].valuation.weights.1"


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("goods"),
        lambda d: d.update(goods=-1),
        lambda d: d.update(goods="3"),
        lambda d: d.update(agents=[]),
        lambda d: d["agents"][0].update(entitlement="0"),
        lambda d: d["agents"][0].update(entitlement="-1/3"),
        lambda d: d["agents"][0].update(entitlement="abc"),
        lambda d: d["agents"][0].update(entitlement=0.5),
        lambda d: d["agents"][0]["valuation"].update(type="submodular"),
        lambda d: d["agents"][0]["valuation"].update(clauses=[]),
        lambda d: d["agents"][0]["valuation"].update(clauses=[[0, "x"]]),
        lambda d: d["agents"][0]["valuation"].update(clauses=[[3]]),
        lambda d: d["agents"][1].pop("valuation"),
        lambda d: d.update(wmmsPartitions=[[[0, 1, 2], []]]),
        lambda d: d.update(wmmsPartitions=[[[0, 1], []], [[0], [1, 2]]]),
    ],
)
def test_every_mutation_is_rejected(mutate):
    bad = json.loads(json.dumps(SMALL))
    mutate(bad)
    with pytest.raises(InstanceError):
        _load(bad)


def test_rationals_normalized_and_sets_sorted():
    d = json.loads(json.dumps(SMALL))
    d["agents"][0]["entitlement"] = "2/6"
    d["agents"][1]["entitlement"] = "4/6"
    out = json.loads(save_instance(_load(d)))
    assert out["agents"][0]["entitlement"] == "1/3"
    assert out["agents"][1]["valuation"]["clauses"] == [[0, 2]]


@pytest.mark.parametrize("family", ["random_binary_xos", "random_xos", "random_additive", "random_binary_additive"])
@pytest.mark.parametrize("seed", range(5))
def test_round_trip_generated(family, seed):
    inst = gen_random(GeneratorSpec(family=family, n=3, m=5, seed=seed))
    again = load_instance(save_instance(inst))
    assert again == inst
    assert save_instance(again) == save_instance(inst)


def test_save_of_load_is_canonicalization():
    raw = json.dumps(SMALL, indent=4).encode()
    canon = save_instance(load_instance(raw))
    assert canon != raw
    assert save_instance(load_instance(canon)) == canon


def test_partition_hints_round_trip():
    d = dict(SMALL, wmmsPartitions=[{"partition": [[0], [1, 2]], "value": "1/2"}, [[2], [0, 1]]])
    inst = _load(d)
    assert inst.wmms_partitions[0].value == Fraction(1, 2)
    assert inst.wmms_partitions[1].value is None
    assert load_instance(save_instance(inst)) == inst


def test_validate_allocation_examples():
    inst = _load(SMALL)
    assert validate_allocation(inst, Allocation(({0}, {1, 2}))) == []
    assert "good 1 assigned twice" in validate_allocation(inst, Allocation(({0, 1}, {1}), complete=False))
    assert "good 2 unassigned" in validate_allocation(inst, Allocation(({0}, {1})))
    assert validate_allocation(inst, Allocation(({0}, {1}), complete=False)) == []


def test_allocation_json_accepts_solve_results():
    a = load_allocation('{"allocation": {"bundles": [[1], [0, 2]], "complete": true}, "passes": 1}')
    assert a.bundles == (frozenset({1}), frozenset({0, 2}))


def test_leftover_rule():
    assert leftover_recipient([Fraction(1, 4), Fraction(3, 8), Fraction(3, 8)]) == 1
    inst = _load(SMALL)
    alloc = complete_with_leftovers(inst, [set(), {1}])
    assert alloc.bundles == (frozenset(), frozenset({0, 1, 2}))


def test_price_vector_invariants():
    PriceVector((Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(ValueError):
        PriceVector((Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(ValueError):
        PriceVector((Fraction(3, 2), Fraction(-1, 2)))


def test_share_value_serialization():
    s = ShareValue("WMMS", 1, Fraction(4, 2))
    assert s.to_dict() == {"notion": "WMMS", "agent": 1, "value": "2", "witness": None}


@given(st.integers(1, 50), st.integers(1, 50), st.integers(0, 200))
def test_floor_of_entitlement_times_count_matches_integer_arithmetic(p, q, k):
    b = Fraction(p, p + q)
    assert floor_rational(b * k) == (p * k) // (p + q)


@given(st.integers(0, 10**6))
def test_ceil_half(q):
    assert ceil_half(q) == (q + 1) // 2
    assert ceil_half(q) == -((-Fraction(q) / 2).__floor__())


@settings(max_examples=50)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=5))
def test_instance_accepts_any_normalized_entitlements(parts):
    total = sum(parts)
    b = [Fraction(p, total) for p in parts]
    inst = Instance.from_parts(2, b, [BinaryXOS([{0}])] * len(b))
    assert sum(inst.entitlements) == 1
