import math

import pytest

from semiact.core import SemigroupError
from semiact.generic_model import (
    INFORMATIVE,
    KNOWN,
    STABILIZER,
    V1,
    V2,
    BlindGuess,
    CollisionAdversary,
    FixedPointAdversary,
    bound_experiment,
    representation_soundness,
    run_adversary,
    sqrt_ln2_budget,
    stabilizer,
    stabilizer_conjugation_check,
    theorem_bound,
)
from semiact.instances import build_symmetric, cyclic_shift_for_order


def _rate(system, adversary, trials, seed=0, **kw):
    return sum(run_adversary(system, adversary, seed, stream=(t,), **kw).success for t in range(trials)) / trials


def _within(rate, p, trials):
    return abs(rate - p) <= 3 * math.sqrt(p * (1 - p) / trials)


def test_blind_guess_is_one_over_n():
    system = cyclic_shift_for_order(8)
    rate = _rate(system, BlindGuess(), 4000)
    assert _within(rate, 1 / 8, 4000)
    assert run_adversary(system, BlindGuess()).m == 0


def test_collision_adversary_rate():
    n, trials = 1024, 3000
    system = cyclic_shift_for_order(n)
    adv = CollisionAdversary(16, 16)
    # 256 distinct candidates, then one guess among the remaining n - 256
    assert _within(_rate(system, adv, trials), (16 * 16 + 1) / n, trials)


def test_collision_adversary_reaches_half_at_sqrt_budget():
    n, trials = 1024, 2000
    system = cyclic_shift_for_order(n)
    m = sqrt_ln2_budget(n)
    assert m == 54
    rate = _rate(system, CollisionAdversary.balanced(m), trials)
    assert rate >= 0.5 - 3 * math.sqrt(0.25 / trials)


def test_initial_variables_push_success_above_the_bound():
    # Also comparing the untouched V1 and V2 adds candidates the operation
    # count does not pay for; at small m that beats m^2/(4n).
    n, trials, m = 64, 4000, 4
    u = v = m // 2
    system = cyclic_shift_for_order(n)
    rate = _rate(system, CollisionAdversary.balanced(m, use_initial=True), trials)
    # candidates a - b with a = 0..u and b = 0, -u, ..., -v*u; plus one blind guess
    candidates = {(i + u * j) % n for i in range(u + 1) for j in range(v + 1)}
    expected = (len(candidates) + 1) / n
    assert expected == 8 / 64
    assert _within(rate, expected, trials)
    assert rate > theorem_bound(m, n) + 3 * math.sqrt(expected * (1 - expected) / trials)


def test_ceiling_counts_as_failure():
    system = cyclic_shift_for_order(64)
    out = run_adversary(system, CollisionAdversary(10, 10), ceiling=5)
    assert not out.success and out.m == 5


def test_extract_once_and_group_only(z29):
    system = cyclic_shift_for_order(16)

    def twice(model, rng):
        model.extract(0)
        model.extract(1)

    with pytest.raises(SemigroupError):
        run_adversary(system, twice)
    with pytest.raises(SemigroupError):
        run_adversary(z29, BlindGuess())


def test_fixed_point_adversary_breaks_symmetric():
    n = 64
    system = build_symmetric(n)
    outs = [run_adversary(system, FixedPointAdversary(), 0, x=0, stream=(t,)) for t in range(100)]
    assert all(o.success for o in outs)
    assert max(o.m for o in outs) <= 2 * math.ceil(math.log2(n))


def test_collision_taxonomy():
    system = build_symmetric(4)
    sg = system.semigroup

    def probe(model, rng):
        a = model.apply(sg.transposition(2, 3), V1)
        b = model.apply(sg.unit, V1)
        model.query_equal(a, b)  # (2 3) fixes the base point 0: known collision
        c = model.apply(sg.unit, V2)
        model.query_equal(c, V2)  # stabilizer collision on the s side
        model.query_equal(V2, V2)  # same handle: not a collision
        model.extract(sg.unit)

    out = run_adversary(system, probe, x=0)
    assert out.collisions == [KNOWN, STABILIZER]
    assert out.m == 3 and out.equality_queries == 3

    def informative(model, rng):
        model.query_equal(V1, V2)
        model.extract(sg.unit)

    hits = [run_adversary(system, informative, x=0, stream=(t,)) for t in range(40)]
    assert any(h.collisions == [INFORMATIVE] for h in hits)
    assert all(h.collisions in ([], [INFORMATIVE]) for h in hits)


def test_bound_experiment_aggregates():
    system = cyclic_shift_for_order(256)
    rep = bound_experiment(system, CollisionAdversary.balanced, [0, 8, 16], 400, seed=1)
    agg = rep.aggregates
    assert agg["m=16.bound"] == theorem_bound(16, 256) == 0.25
    assert agg["m=0.max_operations"] == 0 and agg["m=16.max_operations"] == 16
    assert all(agg[f"m={m}.within_bound"] for m in (8, 16))
    assert _within(agg["m=0.success"], 1 / 256, 400)


def test_stabilizer_checks():
    sym3 = build_symmetric(3)
    sg = sym3.semigroup
    stab = stabilizer(sym3, 0)
    assert sorted(sg.encode(h) for h in stab) == sorted(sg.encode(h) for h in (sg.unit, sg.transposition(1, 2)))
    s = sg.transposition(0, 1)
    conj = {sg.encode(sg.compose(sg.compose(s, h), sg.invert(s))) for h in stab}
    assert conj == {sg.encode(sg.unit), sg.encode(sg.transposition(0, 2))}
    assert not stabilizer_conjugation_check(sym3, 0).stable
    free = cyclic_shift_for_order(12)
    rep = stabilizer_conjugation_check(free, free.g)
    assert rep.stable and rep.stabilizer_size == 1


def test_representation_soundness():
    assert representation_soundness(cyclic_shift_for_order(12), cyclic_shift_for_order(12).g)
    assert representation_soundness(build_symmetric(4), 0)
