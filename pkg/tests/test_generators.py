from fractions import Fraction
from pathlib import Path

import pytest

from fairshare.generators import (
    GeneratorError,
    GeneratorSpec,
    epsilon_for_delta,
    gen_aps_gap,
    gen_random,
    gen_wmms_tight,
    random_corpus,
)
from fairshare.model import load_instance, save_instance
from fairshare.shares import exact_aps, exact_wmms
from fairshare.valuations import Additive, BinaryAdditive, check_binary_marginals, from_mask

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize(
    "name, inst",
    [
        ("wmms_tight_n2", gen_wmms_tight(2)),
        ("wmms_tight_n3", gen_wmms_tight(3)),
        ("aps_gap_n2_eps1_10", gen_aps_gap(2, Fraction(1, 10))),
    ],
)
def test_golden_files(name, inst):
    assert load_instance((GOLDEN / f"{name}.json").read_bytes()) == inst


def test_wmms_tight_shape():
    for n in range(2, 6):
        inst = gen_wmms_tight(n)
        assert inst.n_goods == 2 * n - 1
        assert inst.entitlements[-1] == n * inst.entitlements[0]


def test_aps_gap_values():
    inst = gen_aps_gap(2, Fraction(1, 10))
    assert exact_aps(inst, 1).value <= Fraction(1, 10)
    assert exact_wmms(inst, 1).value == Fraction(9, 10)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("delta", [Fraction(1, 4), Fraction(1, 8)])
def test_delta_targeting(n, delta):
    eps = epsilon_for_delta(n, delta)
    assert eps < Fraction(1, n - 1) * delta / (delta + 1)
    inst = gen_aps_gap(n, delta=delta)
    last = n - 1
    assert exact_aps(inst, last).value / exact_wmms(inst, last).value < delta


@pytest.mark.parametrize(
    "call",
    [
        lambda: gen_wmms_tight(1),
        lambda: gen_aps_gap(1, Fraction(1, 2)),
        lambda: gen_aps_gap(3, Fraction(1, 2)),
        lambda: gen_aps_gap(2, Fraction(0)),
        lambda: gen_aps_gap(2),
        lambda: GeneratorSpec(family="nope", n=2, m=2),
        lambda: GeneratorSpec(family="random_xos", n=2),
        lambda: GeneratorSpec(family="random_xos", n=2, m=3, clause_count=0),
        lambda: GeneratorSpec(family="random_xos", n=5, m=3, max_denominator=4),
        lambda: GeneratorSpec(family="thm43", n=2, m=4),
        lambda: GeneratorSpec(family="prop41", n=2, m=3),
    ],
)
def test_parameter_errors(call):
    with pytest.raises(GeneratorError):
        call()


@pytest.mark.parametrize("family", ["random_binary_xos", "random_xos", "random_additive", "random_binary_additive"])
def test_seeded_determinism(family):
    spec = GeneratorSpec(family=family, n=3, m=8, seed=7)
    assert save_instance(gen_random(spec)) == save_instance(gen_random(spec))
    other = GeneratorSpec(family=family, n=3, m=8, seed=8)
    assert save_instance(gen_random(other)) != save_instance(gen_random(spec))


def test_aliases():
    assert GeneratorSpec(family="random-bxos", n=2, m=3).family == "random_binary_xos"


def test_random_binary_xos_has_binary_marginals():
    for inst in random_corpus("random_binary_xos", 30, 4, 9, seed=1):
        assert all(check_binary_marginals(v, inst.n_goods) for v in inst.valuations)


def test_zero_one_additive_equals_binary_additive():
    for seed in range(10):
        inst = gen_random(GeneratorSpec(family="random_additive", n=2, m=8, seed=seed, binary_weights=True))
        for v in inst.valuations:
            assert isinstance(v, Additive)
            same = BinaryAdditive({g for g, w in v.weights if w == 1})
            assert all(v.value(from_mask(s)) == same.value(from_mask(s)) for s in range(1 << 8))


def test_entitlements_bounded_denominators_and_round_trip():
    for inst in random_corpus("random_xos", 30, 4, 6, seed=2):
        assert sum(inst.entitlements) == 1
        assert all(b.denominator <= 1000 and b > 0 for b in inst.entitlements)
        assert load_instance(save_instance(inst)) == inst


def test_clause_size_cap():
    inst = gen_random(GeneratorSpec(family="random_binary_xos", n=3, m=9, clause_size=2, clause_count=5, seed=4))
    assert all(len(c) <= 2 for v in inst.valuations for c in v.clauses)
