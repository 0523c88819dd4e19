import dataclasses

import pytest

from semiact.attacks import exhaustive
from semiact.core import ProblemInstance, make_rng, random_instance
from semiact.instances import build_cyclic_exp, build_flat_semilattice
from semiact.numtheory import FactorizationError, crt, factorize
from semiact.reductions import (
    automorphism_reduction,
    check_homomorphism,
    check_reduction,
    nonunit_reduction,
    parallel_reduce,
    ph_cyclic_solve,
    ph_reduction,
    recursive_nonunit_solve,
    right_ideal,
)


def test_factorize_and_crt():
    assert factorize(60060) == {2: 2, 3: 1, 5: 1, 7: 1, 11: 1, 13: 1}
    assert factorize(15120) == {2: 4, 3: 3, 5: 1, 7: 1}
    assert crt([2, 1], [4, 7]) == (22, 28)
    assert 22 % 4 == 2 and 22 % 7 == 1
    with pytest.raises(ValueError):
        crt([1, 1], [4, 6])
    with pytest.raises(FactorizationError):
        factorize(1000003 * 1000033, limit=1000)


@pytest.mark.parametrize("make", [
    lambda z28, zn28, flat: nonunit_reduction(zn28, 7),
    lambda z28, zn28, flat: nonunit_reduction(z28, 7),
    lambda z28, zn28, flat: nonunit_reduction(flat, 1),
    lambda z28, zn28, flat: ph_reduction(z28, 7),
    lambda z28, zn28, flat: ph_reduction(z28, 4),
    lambda z28, zn28, flat: automorphism_reduction(build_cyclic_exp(59, 29, 4), [7]),
])
def test_reductions_commute(make, z28, zn28, flat4):
    red = make(z28, zn28, flat4)
    rc = check_reduction(red)
    assert rc.passed and rc.exhaustive and rc.counterexample is None


def test_corrupted_f_is_caught(z28):
    red = ph_reduction(z28, 7)
    f = red.f
    bad = dataclasses.replace(red, f=lambda s: (f(s) + 1) % 4 if s == 5 else f(s))
    rc = check_reduction(bad)
    assert not rc.passed and rc.counterexample[0] == 5


def test_nonunit_ideal_zn28(zn28):
    red = nonunit_reduction(zn28, 7)
    assert sorted(red.target.semigroup.elements()) == [0, 7, 14, 21]
    assert red.effective and not red.invertible and not red.left_absorbing


def test_nonunit_with_unit_not_effective(zn28):
    red = nonunit_reduction(zn28, 1)
    assert red.invertible and not red.effective


def test_nonunit_flat_is_small(flat4):
    red = nonunit_reduction(flat4, 2)
    assert sorted(red.target.semigroup.elements()) == [0, 2]
    assert red.effective
    assert nonunit_reduction(flat4, 0).left_absorbing


def test_right_ideal_within(zn28):
    sg = zn28.semigroup
    inner = right_ideal(sg, 2, right_ideal(sg, 7).members)
    assert sorted(inner.elements()) == [0, 14]


def test_ph_example(z28):
    assert pow(2, 22, 29) == 5
    res = ph_cyclic_solve(ProblemInstance(z28, 2, 5))
    assert res.success and res.solution == 22
    assert res.info["moduli"] == [4, 7] and res.info["residues"] == [2, 1]


def test_ph_prime_order_is_single_solve(z29):
    res = ph_cyclic_solve(ProblemInstance(z29, 4, 5))
    assert res.solution == 3 and res.info["moduli"] == [29]


def test_ph_matches_exhaustive_small(z28):
    for seed in range(40):
        inst = random_instance(z28, 2, make_rng(seed))
        assert ph_cyclic_solve(inst, seed=seed).solution == exhaustive(inst).solution
        assert ph_cyclic_solve(inst, solver="exhaustive").solution == exhaustive(inst).solution


def test_ph_homomorphism(z28):
    for m in (4, 7, 14):
        assert check_homomorphism(ph_reduction(z28, m)).passed


def test_recursive_chain(z28):
    for seed in range(20):
        inst = random_instance(z28, 2, make_rng(seed))
        res = recursive_nonunit_solve(inst, [7, 2])
        assert res.success and res.solution % 28 == inst.witness % 28
        assert res.info["stage_sizes"] == [28, 4, 2]


def test_recursive_empty_chain_is_exhaustive(z28):
    inst = random_instance(z28, 2, make_rng(4))
    assert recursive_nonunit_solve(inst, []).solution == exhaustive(inst).solution


def test_flat_chain_preimages_dominate():
    m = 50
    flat = build_flat_semilattice(m, seed=2)
    inst = ProblemInstance(flat, flat.e, flat.phi(m), witness=m)
    # reduced solution under s_1 is 0, whose preimages are 0 and s_2..s_m
    res = recursive_nonunit_solve(inst, [1])
    assert res.success and res.solution == m
    assert res.info["inner_solutions"] == 1 and res.info["preimages_found"] == [m]
    starved = recursive_nonunit_solve(inst, [1], preimage_budget=m // 2)
    assert not starved.success and "error" in starved.info


def test_parallel_reduce_ph(z28):
    inst = ProblemInstance(z28, 2, 5)
    reds = [ph_reduction(z28, 7), ph_reduction(z28, 4)]
    cands = parallel_reduce(inst, reds)
    assert cands.elements == [22]
    single = parallel_reduce(inst, reds[:1])
    assert single.elements == [s for s in range(28) if s % 4 == 2]


def test_automorphism_reduction(z29):
    red = automorphism_reduction(z29, [7])
    assert red.target.set_size == 5 and red.F is red.G
    assert check_homomorphism(red).passed
    assert not automorphism_reduction(z29, [1]).effective
