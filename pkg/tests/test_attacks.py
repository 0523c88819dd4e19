import math

import pytest
from hypothesis import given, settings, strategies as st

from semiact.attacks import (
    AttackResult,
    InconclusiveError,
    WalkConfig,
    balanced_bsgs_sizes,
    binary_search_min,
    bsgs,
    collision_probe_search,
    exhaustive,
    oracle_check,
    pollard_rho,
    solution_set,
    symmetric_fixedpoint_search,
    unit_filter,
    with_retries,
)
from semiact.core import ProblemInstance, make_rng, random_instance, verify_solution
from semiact.instances import (
    build_cyclic_exp,
    build_flat_semilattice,
    build_min_chain,
    build_symmetric,
    build_zn_mult,
)


def _dlog_oracle(x, y, p, n):
    return [s for s in range(n) if pow(x, s, p) == y]


def test_dlog_oracle_value():
    assert _dlog_oracle(4, 5, 59, 29) == [3]


def test_exhaustive_examples(z29, flat4):
    res = exhaustive(ProblemInstance(z29, 4, 5))
    assert res.success and res.solution == 3
    for i in range(1, 5):
        inst = ProblemInstance(flat4, flat4.e, flat4.phi(i))
        assert exhaustive(inst).solution == i
        assert len(solution_set(inst)) == 1


@given(st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_exhaustive_solves_witnessed_instances(seed):
    system = build_zn_mult(28)
    inst = random_instance(system, system.sample_point(make_rng(seed, 1)), make_rng(seed))
    assert exhaustive(inst).success


def test_bsgs_example(z29):
    inst = ProblemInstance(z29, 4, 5)
    for seed in range(20):
        res = bsgs(inst, 8, 8, seed=seed)
        if res.success:
            assert res.solution % 29 == 3
    assert any(bsgs(inst, 8, 8, seed=s).success for s in range(20))


def test_bsgs_y_equals_x_with_unit_in_table(z29):
    res = bsgs(ProblemInstance(z29, 4, 4), 1, 1, table_elements=[1], probe_elements=[1])
    assert res.success and res.solution == 1


def test_bsgs_counters(z29):
    res = bsgs(ProblemInstance(z29, 4, 5), 8, 8, seed=1)
    assert res.table_entries <= 8 and res.wall_steps <= 8
    assert res.table_entries + res.wall_steps <= res.action_queries <= 16
    assert 0 < res.info["unit_acceptance"] <= 1


def test_balanced_sizes():
    for n in (29, 1000, 10007, 2**16):
        k, l = balanced_bsgs_sizes(n)
        assert k == l and k * l >= math.ceil(n * math.log(2)) > (k - 1) ** 2


def test_rho_example_over_200_seeds(z29):
    inst = ProblemInstance(z29, 4, 5)
    wins = 0
    for seed in range(200):
        res = pollard_rho(inst, seed=seed)
        if res.success:
            wins += 1
            assert res.solution % 29 == 3
    assert wins > 0


def test_rho_immediate_collision(z29):
    walk = WalkConfig((1,) * 4, b"k")
    res = pollard_rho(ProblemInstance(z29, 4, 4), walk=walk, start_a=1, start_b=1)
    assert res.success and res.info["k"] == res.info["l"] == 1
    assert z29.act(res.solution, 4) == 4


def test_rho_retries_accumulate(z28):
    inst = ProblemInstance(z28, 2, 5)
    res = with_retries(pollard_rho, inst, retries=10, seed=3)
    assert res.info["attempts"] >= 1
    if res.success:
        assert res.solution % 28 == 22 or pow(2, res.solution, 29) == 5


def test_walk_is_deterministic(z29):
    w = WalkConfig.random(z29.semigroup, make_rng(1))
    assert w.r == 16 and w(b"\x05") == w(b"\x05")
    assert WalkConfig.random(z29.semigroup, make_rng(1)) == w


def test_binary_search_examples():
    system = build_min_chain(8, seed=2)
    for s in range(1, 9):
        inst = system.instance(s, a=8)
        res = binary_search_min(inst)
        # linear-scan oracle: the minimal solution is s itself
        scan = [t for t in range(1, 9) if system.act(t, inst.x) == inst.y]
        assert res.solution == min(scan) == s
        assert res.action_queries <= 8
    inst = system.instance(5, a=5)
    assert binary_search_min(inst).solution == 5


def test_binary_search_1024():
    system = build_min_chain(1024, seed=4)
    rng = make_rng(9)
    for _ in range(50):
        s = int(rng.integers(1, 1025))
        res = binary_search_min(system.instance(s))
        assert res.solution == s and res.action_queries <= 22


def test_symmetric_small_cases():
    system = build_symmetric(8)
    rng = make_rng(0)
    for _ in range(20):
        inst = random_instance(system, 3, rng)
        res = symmetric_fixedpoint_search(inst)
        assert res.success and verify_solution(inst, res.solution).verified
        assert res.info["rounds"] <= 3
    two = build_symmetric(2)
    for s in two.semigroup.elements():
        inst = ProblemInstance(two, 0, two.act(s, 0))
        res = symmetric_fixedpoint_search(inst)
        assert verify_solution(inst, res.solution).verified and res.info["rounds"] == 1


def test_symmetric_event_law_1024():
    system = build_symmetric(1024)
    rng = make_rng(11)
    hits = expected = var = 0.0
    for _ in range(100):
        inst = random_instance(system, int(rng.integers(1024)), rng)
        res = symmetric_fixedpoint_search(inst)
        assert verify_solution(inst, res.solution).verified and res.info["rounds"] <= 10
        for fixed, size, hit in res.info["events"]:
            p = fixed / size
            hits += hit
            expected += p
            var += p * (1 - p)
    assert abs(hits - expected) <= 3 * math.sqrt(var)


def test_collision_probe_flat(flat4):
    inst = ProblemInstance(flat4, flat4.e, flat4.phi(3), witness=3)
    res = collision_probe_search(inst, seed=1)
    assert res.success and res.solution == 3
    assert res.info["probes"] <= flat4.semigroup.carrier_size


def test_unit_filter_cases(z29, zn28, flat4):
    sym = build_symmetric(4)
    assert unit_filter(ProblemInstance(sym, 0, 2)).status == "unchanged"
    # (Z_29, .) has the non-unit 0; y = 4^3 is reached by the unit 3
    assert unit_filter(ProblemInstance(z29, 4, 5)).status == "restricted"
    # zn28 acting on itself: 5 is a unit, 7*5 = 35 = 7 mod 28 is outside the unit orbit
    x = 5
    y = zn28.act(7, x)
    assert {zn28.act(u, x) for u in range(28) if math.gcd(u, 28) == 1}.isdisjoint({y})
    assert unit_filter(ProblemInstance(zn28, x, y)).status == "not-in-unit-orbit"
    res = unit_filter(ProblemInstance(zn28, x, zn28.act(3, x)))
    assert res.status == "restricted" and res.instance.system.semigroup.carrier_size == 12
    assert zn28.act(res.unit_solution, x) == zn28.act(3, x)
    assert unit_filter(ProblemInstance(flat4, flat4.e, flat4.phi(2))).status == "not-in-unit-orbit"
    same = unit_filter(ProblemInstance(flat4, flat4.e, flat4.e))
    assert same.status == "restricted" and same.unit_solution == flat4.semigroup.one


def test_unit_filter_sampled_inconclusive():
    big = build_zn_mult(10**6)
    with pytest.raises(InconclusiveError):
        unit_filter(ProblemInstance(big, 1, 2), budget=100)


def test_oracle_check_rejects_bad_solution(z29):
    inst = ProblemInstance(z29, 4, 5)
    assert oracle_check(inst, AttackResult(solution=3, success=True))
    assert not oracle_check(inst, AttackResult(solution=2, success=True))
    assert oracle_check(inst, AttackResult())


def test_bsgs_and_rho_agree_with_oracle_small():
    system = build_cyclic_exp(59, 29, 4)
    for seed in range(30):
        inst = random_instance(system, 4, make_rng(seed))
        k, l = balanced_bsgs_sizes(29)
        for res in (with_retries(bsgs, inst, seed=seed, k=k, l=l), with_retries(pollard_rho, inst, seed=seed)):
            assert oracle_check(inst, res)


def test_attacks_replay_identically(z29):
    inst = random_instance(z29, 4, make_rng(3))
    assert pollard_rho(inst, seed=8).counters() == pollard_rho(inst, seed=8).counters()
    assert bsgs(inst, 5, 5, seed=8).solution == bsgs(inst, 5, 5, seed=8).solution
