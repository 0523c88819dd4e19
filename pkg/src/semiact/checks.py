"""Property suites: algebra laws, action laws, key agreement, reductions,
rho collision propagation and replay determinism.

A law over ``k`` variables is checked on every tuple when the tuple space has
at most ``EXHAUSTIVE_TUPLES`` members and on ``samples`` random tuples
otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .attacks import WalkConfig, bsgs, pollard_rho
from .core import ActionSystem, EnumerationError, Semigroup, dh_simulate, make_rng, random_instance
from .experiments import lemma_intersect_experiment, theorem_experiment
from .instances import (
    build_cyclic_exp,
    build_cyclic_shift,
    build_flat_semilattice,
    build_min_chain,
    build_quotient,
    build_symmetric,
    build_zn_mult,
    CyclicExpSystem,
    find_subgroup,
)
from .reductions import automorphism_reduction, check_homomorphism, check_reduction, nonunit_reduction, ph_reduction

EXHAUSTIVE_TUPLES = 2**16
SAMPLES = 1000


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int
    exhaustive: bool
    detail: str = ""

    def line(self) -> str:
        mode = "exhaustive" if self.exhaustive else "sampled"
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name} ({self.checked} {mode}) {self.detail}".rstrip()


def _elements(sg: Semigroup):
    try:
        sg._require_enumerable(EXHAUSTIVE_TUPLES)
    except EnumerationError:
        return None
    return list(sg.elements())


def _points(system: ActionSystem):
    if system.set_size > EXHAUSTIVE_TUPLES:
        return None
    return list(system.points())


def _tuples(pools, draws, arity, samples, rng):
    """All tuples over ``pools`` if small enough, else ``samples`` random ones."""
    if all(p is not None for p in pools):
        size = 1
        for p in pools:
            size *= len(p)
        if size <= EXHAUSTIVE_TUPLES:
            return list(itertools.product(*pools)), True
    return [tuple(d(rng) for d in draws) for _ in range(samples)], False


def check_semigroup_laws(sg: Semigroup, samples: int = SAMPLES, seed: int = 0) -> list[CheckResult]:
    rng = make_rng(seed, 0xA1)
    elems = _elements(sg)
    enc = sg.encode
    out = []
    triples, ex = _tuples([elems] * 3, [sg.sample] * 3, 3, samples, rng)
    bad = next((t for t in triples
                if enc(sg.compose(sg.compose(t[0], t[1]), t[2])) != enc(sg.compose(t[0], sg.compose(t[1], t[2])))),
               None)
    out.append(CheckResult(f"{sg.name}: associativity", bad is None, len(triples), ex))
    if sg.unit is not None:
        singles, ex = _tuples([elems], [sg.sample], 1, samples, rng)
        u = sg.unit
        bad = next((s for (s,) in singles
                    if not enc(sg.compose(u, s)) == enc(sg.compose(s, u)) == enc(s)), None)
        out.append(CheckResult(f"{sg.name}: identity", bad is None, len(singles), ex))
        bad = None
        for (s,) in singles:
            if sg.is_unit(s):
                inv = sg.invert(s)
                if not enc(sg.compose(s, inv)) == enc(sg.compose(inv, s)) == enc(u):
                    bad = s
                    break
            else:
                try:
                    sg.invert(s)
                    bad = s
                    break
                except Exception:
                    pass
        out.append(CheckResult(f"{sg.name}: inverses", bad is None, len(singles), ex))
    if sg.commutative:
        pairs, ex = _tuples([elems] * 2, [sg.sample] * 2, 2, samples, rng)
        bad = next((p for p in pairs if enc(sg.compose(*p)) != enc(sg.compose(p[1], p[0]))), None)
        out.append(CheckResult(f"{sg.name}: commutativity", bad is None, len(pairs), ex))
    return out


def check_action_law(system: ActionSystem, samples: int = SAMPLES, seed: int = 0) -> CheckResult:
    sg = system.semigroup
    rng = make_rng(seed, 0xA2)
    elems = _elements(sg)
    triples, ex = _tuples([elems, elems, _points(system)], [sg.sample, sg.sample, system.sample_point],
                          3, samples, rng)
    ep = system.encode_point
    bad = next((t for t in triples
                if ep(system.act(sg.compose(t[0], t[1]), t[2])) != ep(system.act(t[0], system.act(t[1], t[2])))),
               None)
    return CheckResult(f"{system.name}: action compatibility", bad is None, len(triples), ex)


def check_dh(system: ActionSystem, samples: int = SAMPLES, seed: int = 0) -> CheckResult:
    """Equal keys for every secret pair (all pairs when ``|S| <= 64``)."""
    sg = system.semigroup
    rng = make_rng(seed, 0xA3)
    x = system.sample_point(rng)
    if sg.carrier_size <= 64:
        pairs = list(itertools.product(list(sg.elements()), repeat=2))
        ex = True
    else:
        pairs = [(sg.sample(rng), sg.sample(rng)) for _ in range(samples)]
        ex = False
    bad = None
    for a, b in pairs:
        ka, kb = dh_simulate(system, x, seed, a=a, b=b)
        if not system.same_point(ka, kb):
            bad = (a, b)
            break
    return CheckResult(f"{system.name}: key agreement", bad is None, len(pairs), ex)


def check_rho_propagation(system: ActionSystem, length: int = 200, seed: int = 0, r_max: int = 50
                          ) -> CheckResult:
    """If ``a_i.x == b_j.y`` then ``a_{i+r}.x == b_{j+r}.y`` along the walks.

    The b-walk starts at ``a_{j0} u^{-1}`` (with ``y = u.x``) so that at least
    one coincidence exists and the check is never vacuous.
    """
    sg = system.semigroup
    rng = make_rng(seed, 0xA4)
    walk = WalkConfig.random(sg, rng)
    x = system.sample_point(rng)
    u = sg.sample_unit(rng)
    y = system.act(u, x)

    def trail(start, base):
        pts, elems, elem = [], [], start
        for _ in range(length):
            p = system.act(elem, base)
            elems.append(elem)
            pts.append(system.encode_point(p))
            elem = sg.compose(walk(pts[-1]), elem)
        return pts, elems

    A, a_elems = trail(sg.sample_unit(rng), x)
    j0 = int(rng.integers(length // 2))
    B, _ = trail(sg.compose(a_elems[j0], sg.invert(u)), y)
    where = {}
    for j, e in enumerate(B):
        where.setdefault(e, []).append(j)
    checked, ok = 0, True
    for i, e in enumerate(A):
        for j in where.get(e, ()):
            for r in range(min(r_max, length - max(i, j))):
                checked += 1
                ok &= A[i + r] == B[j + r]
    return CheckResult(f"{system.name}: rho collision propagation", ok and checked > 0, checked, False)


def check_replay(seed: int = 0) -> CheckResult:
    """Same seed, same transcript: attack counters and report CSVs match."""
    system = build_cyclic_exp(59, 29, 4)
    inst = random_instance(system, 4, make_rng(seed))
    runs = [(pollard_rho(inst, seed=seed), bsgs(inst, 6, 6, seed=seed)) for _ in range(2)]
    same = all(a.counters() == b.counters() and a.solution == b.solution and a.info == b.info
               for a, b in zip(*runs))
    csvs = [lemma_intersect_experiment(100, 10, 10, 200, seed).to_csv() for _ in range(2)]
    return CheckResult("replay determinism", same and csvs[0] == csvs[1], 2, True)


def check_monte_carlo_bounds(seed: int = 0, trials: int = 2000) -> list[CheckResult]:
    """Empirical rates of the intersection and generic-bound experiments
    against their theoretical bounds, with 3-sigma slack."""
    lemma = lemma_intersect_experiment(100, 10, 10, trials, seed).aggregates
    ms = [4, 8, 16]
    bound = theorem_experiment(256, ms, trials // 2, seed).aggregates
    return [
        CheckResult("intersection bounds (n=100, k=l=10)", bool(lemma["within_bounds"]), trials, False,
                    f"rate={lemma['disjoint_rate']:.4f}"),
        CheckResult("generic bound m^2/(4n) (n=256)", all(bound[f"m={m}.within_bound"] for m in ms),
                    len(ms) * (trials // 2), False),
    ]


def registered_systems(seed: int = 0) -> list[ActionSystem]:
    """Desk-scale systems covered by the default suite."""
    small = build_cyclic_exp(59, 29, 4)
    return [
        small,
        build_cyclic_exp(29, 28, 2),
        build_cyclic_exp(65537, 65536, 3),
        build_cyclic_shift(*find_subgroup(1024)),
        build_zn_mult(28),
        build_min_chain(16, seed),
        build_min_chain(2**20, seed),
        build_flat_semilattice(6, seed),
        build_flat_semilattice(1000, seed),
        build_symmetric(4),
        build_symmetric(64),
        build_quotient(small, [7]),
    ]


def reductions_for_suite():
    z29 = build_cyclic_exp(59, 29, 4)
    z28 = build_cyclic_exp(29, 28, 2)
    flat = build_flat_semilattice(6)
    return [
        nonunit_reduction(build_zn_mult(28), 7),
        nonunit_reduction(z28, 7),
        nonunit_reduction(flat, 1),
        ph_reduction(z28, 7),
        ph_reduction(z28, 4),
        automorphism_reduction(z29, [7]),
        automorphism_reduction(z29, [12]),
        automorphism_reduction(z29, [28]),
    ]


def run_suite(seed: int = 0, samples: int = SAMPLES) -> list[CheckResult]:
    results = []
    for system in registered_systems(seed):
        results.extend(check_semigroup_laws(system.semigroup, samples, seed))
        results.append(check_action_law(system, samples, seed))
        if system.commutative:
            results.append(check_dh(system, samples, seed))
        if system.semigroup.is_group or isinstance(system, CyclicExpSystem):
            results.append(check_rho_propagation(system, seed=seed))
    for red in reductions_for_suite():
        rc = check_reduction(red, samples, seed)
        results.append(CheckResult(f"{red.name} on {red.source.name}: commuting square",
                                   rc.passed, rc.checked, rc.exhaustive))
        if red.F is red.G:
            hc = check_homomorphism(red, samples, seed)
            results.append(CheckResult(f"{red.name}: f homomorphism", hc.passed, hc.checked, False))
    results.extend(check_monte_carlo_bounds(seed))
    results.append(check_replay(seed))
    return results
