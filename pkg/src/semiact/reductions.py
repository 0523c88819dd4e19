"""Reductions ``(f, F, G)`` between action systems.

A reduction from ``S`` acting on ``X`` to ``T`` acting on ``Y`` satisfies
``f(s).G(x) == F(s.x)``; it turns the instance ``(x, y)`` into
``(G(x), F(y))`` and confines the search to preimages under ``f``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .attacks import AttackResult, Oracle, balanced_bsgs_sizes, bsgs, exhaustive, with_retries
from .core import (
    ENUMERATION_LIMIT,
    ActionSystem,
    EnumerationError,
    ProblemInstance,
    Semigroup,
    SemigroupError,
    encoding_key,
    make_rng,
)
from .instances import CyclicExpSystem, MATERIALIZE_WARN, build_quotient
from .numtheory import crt, factorize

PREIMAGE_BUDGET = 10**5
EXHAUSTIVE_PAIRS = 2**16
PH_BSGS_RETRIES = 32


class LiftError(SemigroupError):
    pass


class BudgetExceeded(SemigroupError):
    pass


class SubSemigroup(Semigroup):
    """A materialized subsemigroup (e.g. a right ideal ``mS``) of ``base``."""

    def __init__(self, base: Semigroup, members, name=None):
        self.base = base
        by_key = {base.encode(s): s for s in members}
        self.members = [by_key[k] for k in sorted(by_key, key=encoding_key)]
        self._keys = set(by_key)
        self.carrier_size = len(self.members)
        self.commutative = base.commutative
        self.name = name or f"sub({base.name})"
        if base.unit is not None and base.encode(base.unit) in self._keys:
            self.unit = base.unit
        if self.carrier_size > MATERIALIZE_WARN:
            warnings.warn(f"{self.name}: materialized {self.carrier_size} elements", stacklevel=2)

    def __contains__(self, s):
        return self.base.encode(s) in self._keys

    def compose(self, a, b):
        return self.base.compose(a, b)

    def encode(self, s):
        return self.base.encode(s)

    def sample(self, rng):
        return self.members[int(rng.integers(self.carrier_size))]

    def elements(self):
        return iter(self.members)

    def is_unit(self, s):
        return self.unit is not None and self.base.is_unit(s) and self.base.invert(s) in self

    def invert(self, s):
        if not self.is_unit(s):
            return super().invert(s)
        return self.base.invert(s)


class RestrictedAction(ActionSystem):
    """``base`` restricted to a subsemigroup, acting on the same set."""

    def __init__(self, base: ActionSystem, semigroup: Semigroup):
        self.base = base
        self.semigroup = semigroup
        self.set_size = base.set_size
        self.name = f"{base.name}|{semigroup.name}"

    def act(self, s, x):
        return self.base.act(s, x)

    def encode_point(self, x):
        return self.base.encode_point(x)

    def sample_point(self, rng):
        return self.base.sample_point(rng)

    def points(self):
        return self.base.points()


@dataclass
class Reduction:
    source: ActionSystem
    target: ActionSystem
    f: Callable
    F: Callable
    G: Callable
    name: str = "reduction"
    computable: bool = True

    @property
    def effective(self) -> bool:
        """Computable and ``1 < |T| < |S|``."""
        return self.computable and 1 < self.target.semigroup.carrier_size < self.source.semigroup.carrier_size

    def reduce(self, inst: ProblemInstance, preimage_budget: int = PREIMAGE_BUDGET) -> "ReducedInstance":
        witness = None if inst.witness is None else self.f(inst.witness)
        reduced = ProblemInstance(self.target, self.G(inst.x), self.F(inst.y), witness)
        return ReducedInstance(inst, reduced, preimage_budget)


@dataclass(frozen=True)
class ReducedInstance:
    original: ProblemInstance
    reduced: ProblemInstance
    preimage_budget: int = PREIMAGE_BUDGET


@dataclass
class ReductionCheck:
    passed: bool
    checked: int
    exhaustive: bool
    counterexample: Optional[tuple] = None


def _pairs(source: ActionSystem, trials: int, seed: int, limit: int):
    sg = source.semigroup
    try:
        if sg.carrier_size * source.set_size <= limit:
            return itertools.product(list(sg.elements()), list(source.points())), True
    except EnumerationError:
        pass
    rng = make_rng(seed, 0x5E)
    return ((sg.sample(rng), source.sample_point(rng)) for _ in range(trials)), False


def check_reduction(red: Reduction, trials: int = 1000, seed: int = 0,
                    exhaustive_limit: int = EXHAUSTIVE_PAIRS) -> ReductionCheck:
    """Test ``f(s).G(x) == F(s.x)``, exhaustively when ``|S|*|X|`` is small."""
    src, tgt = red.source, red.target
    pairs, exhaustive_run = _pairs(src, trials, seed, exhaustive_limit)
    checked = 0
    for s, x in pairs:
        checked += 1
        lhs = tgt.act(red.f(s), red.G(x))
        rhs = red.F(src.act(s, x))
        if tgt.encode_point(lhs) != tgt.encode_point(rhs):
            return ReductionCheck(False, checked, exhaustive_run, (s, x))
    return ReductionCheck(True, checked, exhaustive_run)


def check_homomorphism(red: Reduction, trials: int = 1000, seed: int = 0) -> ReductionCheck:
    """Test ``f(st) == f(s) f(t)`` on sampled pairs."""
    S, T = red.source.semigroup, red.target.semigroup
    rng = make_rng(seed, 0x40)
    for i in range(trials):
        s, t = S.sample(rng), S.sample(rng)
        if T.encode(red.f(S.compose(s, t))) != T.encode(T.compose(red.f(s), red.f(t))):
            return ReductionCheck(False, i + 1, False, (s, t))
    return ReductionCheck(True, trials, False)


# -- constructions ------------------------------------------------------------------------

def right_ideal(sg: Semigroup, m, within=None) -> SubSemigroup:
    """``m * within`` (default ``mS``), materialized by enumeration."""
    members = within if within is not None else sg.elements()
    return SubSemigroup(sg, (sg.compose(m, s) for s in members), name=f"{m!r}S")


def nonunit_reduction(system: ActionSystem, m) -> Reduction:
    """``(lambda_m, Phi_m, id)``: ``s -> ms`` onto the right ideal ``mS``.

    Effective exactly when ``m`` is neither left-absorbing nor a unit.
    """
    sg = system.semigroup
    if not sg.is_monoid:
        raise SemigroupError("non-unit reductions need a monoid")
    ideal = right_ideal(sg, m)
    target = RestrictedAction(system, ideal)
    red = Reduction(
        system, target,
        f=lambda s: sg.compose(m, s),
        F=lambda x: system.act(m, x),
        G=lambda x: x,
        name=f"nonunit(m={m!r})",
    )
    red.m = m
    red.left_absorbing = ideal.carrier_size == 1
    red.invertible = sg.is_unit(m)
    return red


def ph_reduction(system: CyclicExpSystem, m: int) -> Reduction:
    """``(pi, Phi_m, Phi_m)`` from order ``n = k*m`` down to order ``k``."""
    if system.n % m:
        raise SemigroupError(f"{m} does not divide {system.n}")
    k = system.n // m
    target = CyclicExpSystem(system.p, k, pow(system.g, m, system.p))
    phi_m = lambda h: pow(h, m, system.p)
    return Reduction(system, target, f=lambda s: s % k, F=phi_m, G=phi_m, name=f"ph(m={m})")


def automorphism_reduction(system: ActionSystem, H) -> Reduction:
    """``(f, F, F)`` onto ``S/H`` acting on the ``H``-orbits ``X/~``."""
    quotient = build_quotient(system, H)
    canon = quotient.canon_point
    return Reduction(
        system, quotient,
        f=quotient.semigroup.canon,
        F=canon,
        G=canon,
        name=f"automorphism(|H|={len(quotient.H)})",
    )


# -- solving through reductions ----------------------------------------------------------

def _solve_small_cyclic(inst: ProblemInstance, seed: int):
    n = inst.system.semigroup.carrier_size
    k, l = balanced_bsgs_sizes(n)
    res = with_retries(bsgs, inst, retries=PH_BSGS_RETRIES, seed=seed, k=k, l=l)
    if not res.success:
        res = res.plus(exhaustive(inst))
        res.info["fallback"] = "exhaustive"
    return res


def ph_cyclic_solve(inst: ProblemInstance, solver: str = "bsgs", seed: int = 0) -> AttackResult:
    """Pohlig-Hellman on a cyclic-exp instance.

    For each prime power ``q^e || n`` the instance is pushed through
    ``(pi, Phi_m, Phi_m)`` with ``m = n/q^e``, solved in the order-``q^e``
    subgroup, and the residues are joined by Chinese remaindering.
    Counters include the ``2`` action queries per reduction.
    """
    sys = inst.system
    if not isinstance(sys, CyclicExpSystem):
        raise SemigroupError("ph_cyclic_solve needs a cyclic-exp system")
    n = sys.n
    oracle = Oracle(sys)
    sub = AttackResult()
    residues, moduli = [], []
    factors = factorize(n)
    for i, (q, e) in enumerate(sorted(factors.items())):
        qe = q**e
        m = n // qe
        red = ph_reduction(sys, m)
        if m == 1:
            reduced = inst
        else:
            gx, fy = oracle.act(m, inst.x), oracle.act(m, inst.y)
            reduced = ProblemInstance(red.target, gx, fy)
        if solver == "exhaustive":
            res = exhaustive(reduced)
        else:
            res = _solve_small_cyclic(reduced, seed * 1009 + i)
        sub = sub.plus(res)
        if not res.success:
            return _merge(oracle, sub, None, info={"failed_modulus": qe})
        residues.append(res.solution % qe)
        moduli.append(qe)
    s, _ = crt(residues, moduli)
    return _merge(oracle, sub, s, info={"residues": residues, "moduli": moduli})


def _merge(oracle: Oracle, sub: AttackResult, solution, info) -> AttackResult:
    own = oracle.result(solution)
    out = sub.plus(own)
    out.solution, out.success = solution, solution is not None
    out.info = info
    return out


def recursive_nonunit_solve(inst: ProblemInstance, chain, preimage_budget: int = PREIMAGE_BUDGET
                            ) -> AttackResult:
    """Peel non-units ``m_1, m_2, ...`` off ``y = s.x``.

    Stage ``i`` works in ``T_i = m_i T_{i-1}`` (``T_0 = S``) with
    ``y_i = m_i . y_{i-1}``. The innermost stage is solved exhaustively; each
    solution is lifted back through ``lambda_{m_i}`` by scanning ``T_{i-1}``,
    and only lifts that satisfy their own stage instance survive, so any
    returned ``s`` solves the original instance.
    """
    sys = inst.system
    sg = sys.semigroup
    oracle = Oracle(sys)
    chain = list(chain)
    levels = [list(sg.elements())]
    ys = [inst.y]
    for m in chain:
        ideal = right_ideal(sg, m, levels[-1])
        levels.append(ideal.members)
        ys.append(oracle.act(m, ys[-1]))
    r = len(chain)
    inner = [t for t in levels[r] if oracle.same(oracle.act(t, inst.x), ys[r])]
    stats = {"stage_sizes": [len(L) for L in levels], "preimage_evaluations": 0,
             "preimages_found": [0] * r, "lift_failures": [0] * r, "inner_solutions": len(inner)}

    def lift(t, stage):
        # preimages of t under lambda_{m_stage} inside T_{stage-1} that solve stage-1
        if stage == 0:
            return t
        m = chain[stage - 1]
        target = sg.encode(t)
        found_any = False
        for u in levels[stage - 1]:
            stats["preimage_evaluations"] += 1
            if stats["preimage_evaluations"] > preimage_budget:
                raise BudgetExceeded(f"preimage budget {preimage_budget} exhausted")
            if sg.encode(oracle.compose(m, u)) != target:
                continue
            stats["preimages_found"][stage - 1] += 1
            if oracle.same(oracle.act(u, inst.x), ys[stage - 1]):
                found_any = True
                s = lift(u, stage - 1)
                if s is not None:
                    return s
        if not found_any:
            stats["lift_failures"][stage - 1] += 1
        return None

    solution = None
    try:
        for t in inner:
            solution = lift(t, r)
            if solution is not None:
                break
    except BudgetExceeded as exc:
        stats["error"] = str(exc)
    steps = stats["preimage_evaluations"] + len(levels[r])
    return oracle.result(solution, wall_steps=steps, info=stats)


@dataclass
class CandidateSet:
    """``s`` restricted to the intersection of ``f_i^{-1}(solutions_i)``."""

    predicate: Callable[[Any], bool]
    elements: list
    reduced_solutions: list = field(default_factory=list)

    def __len__(self):
        return len(self.elements)


def parallel_reduce(inst: ProblemInstance, reductions, limit: int = ENUMERATION_LIMIT) -> CandidateSet:
    """Apply reductions side by side and intersect their preimage constraints."""
    sols = []
    for red in reductions:
        if red.source is not inst.system:
            raise SemigroupError("all reductions must share the instance's system")
        reduced = red.reduce(inst).reduced
        tgt = red.target
        want = tgt.encode_point(reduced.y)
        good = {tgt.semigroup.encode(t) for t in tgt.semigroup.elements()
                if tgt.encode_point(tgt.act(t, reduced.x)) == want}
        if not good:
            raise LiftError(f"{red.name}: reduced instance has no solution")
        sols.append(good)

    def predicate(s) -> bool:
        return all(red.target.semigroup.encode(red.f(s)) in good
                   for red, good in zip(reductions, sols))

    sg = inst.system.semigroup
    sg._require_enumerable(limit)
    return CandidateSet(predicate, [s for s in sg.elements() if predicate(s)], sols)
