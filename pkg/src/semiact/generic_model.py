"""Maurer-style generic model for group action problems.

The ground set is ``M = S/~x`` where ``s ~x t`` iff ``s.x == t.x``; the class
``[s]`` is stored as the point ``s.x``. The adversary holds opaque handles to
state variables, may apply ``Phi_a : [s] -> [as]`` (counted) and ask
equality queries (free by default), and finishes with one extraction guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import ActionSystem, SemigroupError, make_rng
from .instances import SymmetricGroup, ZnAdd
from .report import ExperimentReport, binomial_sigma

V1, V2 = 0, 1

KNOWN = "known"  # [a] = [a'], independent of s
STABILIZER = "stabilizer"  # b.[s] = b'.[s]
INFORMATIVE = "informative"  # a.[1] = b.[s]


class QueryCeilingExceeded(SemigroupError):
    pass


class ModelState:
    """Hidden state of one run. Adversaries only see a :class:`ModelInterface`."""

    def __init__(self, system: ActionSystem, x, s, ceiling: Optional[int] = None):
        self.system = system
        self.sg = system.semigroup
        self.x = x
        self._s = s
        self._target = system.encode_point(system.act(s, x))
        # (point, root variable, element a with value a.[root])
        self.vars = [(x, V1, self.sg.unit), (system.act(s, x), V2, self.sg.unit)]
        self.m = 0
        self.equality_queries = 0
        self.ceiling = ceiling
        self.log: list = []
        self.collisions: list[str] = []
        self.extracted: Optional[bool] = None

    def apply(self, a, handle: int) -> int:
        if self.extracted is not None:
            raise SemigroupError("run already finished")
        if self.ceiling is not None and self.m >= self.ceiling:
            raise QueryCeilingExceeded(f"more than {self.ceiling} operations")
        self.m += 1
        point, root, elem = self.vars[handle]
        self.vars.append((self.system.act(a, point), root, self.sg.compose(a, elem)))
        self.log.append(("apply", handle))
        return len(self.vars) - 1

    def query_equal(self, h1: int, h2: int) -> bool:
        self.equality_queries += 1
        p1, r1, _ = self.vars[h1]
        p2, r2, _ = self.vars[h2]
        equal = self.system.encode_point(p1) == self.system.encode_point(p2)
        if equal and h1 != h2:
            kind = INFORMATIVE if r1 != r2 else (KNOWN if r1 == V1 else STABILIZER)
            self.collisions.append(kind)
        self.log.append(("eq", h1, h2, equal))
        return equal

    def extract(self, guess) -> bool:
        if self.extracted is not None:
            raise SemigroupError("extract may be called once")
        self.extracted = self.system.encode_point(self.system.act(guess, self.x)) == self._target
        return self.extracted


class ModelInterface:
    """What an adversary may touch: the public semigroup, ``|X|``, the fixed
    base point and the three oracles."""

    V1, V2 = V1, V2

    def __init__(self, state: ModelState):
        self._state = state
        self.semigroup = state.sg
        self.set_size = state.system.set_size
        self.base_point = state.x

    def apply(self, a, handle: int) -> int:
        return self._state.apply(a, handle)

    def query_equal(self, h1: int, h2: int) -> bool:
        return self._state.query_equal(h1, h2)

    def extract(self, guess) -> bool:
        return self._state.extract(guess)

    @property
    def operations(self) -> int:
        return self._state.m


@dataclass
class ModelOutcome:
    success: bool
    m: int
    equality_queries: int
    collisions: list = field(default_factory=list)

    @property
    def total_queries(self) -> int:
        return self.m + self.equality_queries


def run_adversary(system: ActionSystem, adversary: Callable, seed: int = 0, x=None,
                  ceiling: Optional[int] = None, stream: tuple = ()) -> ModelOutcome:
    """One run: hidden ``s`` uniform over ``S``, adversary called as
    ``adversary(interface, rng)``. Going over ``ceiling`` counts as failure."""
    sg = system.semigroup
    if not sg.is_group:
        raise SemigroupError("the generic model here needs a group action")
    rng = make_rng(seed, *stream)
    if x is None:
        x = getattr(system, "g", None)
        if x is None:
            x = system.sample_point(rng)
    s = sg.sample(rng)
    state = ModelState(system, x, s, ceiling)
    try:
        adversary(ModelInterface(state), make_rng(seed, *stream, 0xAD))
    except QueryCeilingExceeded:
        state.extracted = False
    return ModelOutcome(bool(state.extracted), state.m, state.equality_queries, state.collisions)


# -- adversaries ---------------------------------------------------------------------

class BlindGuess:
    """No operations; extracts a uniformly random element."""

    def __call__(self, model: ModelInterface, rng):
        model.extract(model.semigroup.sample(rng))


class CollisionAdversary:
    """``u`` applications to ``V1`` and ``v`` to ``V2``, then all ``u*v``
    cross equality queries. A collision ``a.[1] = b.[s]`` yields ``b^{-1} a``.

    On ``(Z_n, +)`` the steps are baby/giant (``a_i = i``, ``b_j = -j*u``), so
    all ``u*v`` candidates ``b^{-1} a`` are distinct; elsewhere they are
    random distinct elements. Without a collision the adversary guesses
    outside the excluded candidates when ``guess_on_failure`` is set.
    ``use_initial`` also compares against the free initial variables.
    """

    def __init__(self, u: int, v: int, guess_on_failure: bool = True, use_initial: bool = False):
        self.u, self.v = u, v
        self.guess_on_failure = guess_on_failure
        self.use_initial = use_initial

    @classmethod
    def balanced(cls, m: int, **kw):
        return cls(m // 2, m - m // 2, **kw)

    def _steps(self, sg, rng):
        if isinstance(sg, ZnAdd):
            n = sg.n
            return [i % n for i in range(1, self.u + 1)], [(-j * self.u) % n for j in range(1, self.v + 1)]
        return [sg.sample(rng) for _ in range(self.u)], [sg.sample(rng) for _ in range(self.v)]

    def __call__(self, model: ModelInterface, rng):
        sg = model.semigroup
        a_elems, b_elems = self._steps(sg, rng)
        left = [(model.apply(a, V1), a) for a in a_elems]
        right = [(model.apply(b, V2), b) for b in b_elems]
        if self.use_initial:
            left.append((V1, sg.unit))
            right.append((V2, sg.unit))
        excluded = set()
        for hb, b in right:
            b_inv = sg.invert(b)
            for ha, a in left:
                cand = sg.compose(b_inv, a)
                if model.query_equal(ha, hb):
                    model.extract(cand)
                    return
                excluded.add(sg.encode(cand))
        if self.guess_on_failure:
            for _ in range(1000):
                g = sg.sample(rng)
                if sg.encode(g) not in excluded:
                    break
            model.extract(g)
        else:
            model.extract(sg.unit if sg.encode(sg.unit) not in excluded else sg.sample(rng))


class FixedPointAdversary:
    """For ``Sym(X)``: halve the candidates for ``s.x`` with queries
    ``c.[s] == [s]`` where ``c`` fixes exactly half of them."""

    def __call__(self, model: ModelInterface, rng):
        sg = model.semigroup
        if not isinstance(sg, SymmetricGroup):
            raise SemigroupError("fixed-point adversary needs Sym(X)")
        from .attacks import _split_query

        x = model.base_point
        cand = list(range(model.set_size))
        while len(cand) > 1:
            split = _split_query(sg, cand, model.set_size)
            if split is None:
                z = cand[0]
                a = sg.unit if z == x else sg.transposition(x, z)
                h = model.apply(a, V1)
                cand = [z] if model.query_equal(h, V2) else cand[1:]
                continue
            c, half = split
            h = model.apply(c, V2)
            cand = half if model.query_equal(h, V2) else cand[len(half):]
        z = cand[0]
        model.extract(sg.unit if z == x else sg.transposition(x, z))


ADVERSARIES = {
    "blind": lambda m: BlindGuess(),
    "collision": lambda m: CollisionAdversary.balanced(m),
    "fixed-point": lambda m: FixedPointAdversary(),
}


def theorem_bound(m: int, n: int) -> float:
    """``m^2 / (4n)``: success ceiling for ``m`` operations on ``|X| = n``."""
    return m * m / (4 * n)


def bound_experiment(system: ActionSystem, family: Callable[[int], Callable], m_grid, trials: int,
                     seed: int = 0, x=None, count_equalities: bool = False) -> ExperimentReport:
    """Empirical success per ``m`` against ``m^2/(4n)``, with 3-sigma margins."""
    n = system.set_size
    report = ExperimentReport("theorem-bound", {"n": n, "trials": trials, "seed": seed})
    for gi, m in enumerate(m_grid):
        adv = family(m)
        wins = 0
        ops = []
        for t in range(trials):
            out = run_adversary(system, adv, seed, x=x, stream=(gi, t))
            wins += out.success
            ops.append(out.m)
            row = dict(m=m, trial=t, success=out.success, operations=out.m)
            if count_equalities:
                row["total_queries"] = out.total_queries
            report.add_row(**row)
        rate = wins / trials
        sigma = binomial_sigma(rate, trials)
        bound = theorem_bound(m, n)
        report.aggregates.update({
            f"m={m}.success": rate,
            f"m={m}.sigma": sigma,
            f"m={m}.ci_low": max(0.0, rate - 3 * sigma),
            f"m={m}.ci_high": min(1.0, rate + 3 * sigma),
            f"m={m}.bound": bound,
            f"m={m}.max_operations": max(ops) if ops else 0,
            f"m={m}.within_bound": rate <= bound + 3 * sigma,
        })
    return report


# -- structural checks ---------------------------------------------------------------

@dataclass
class StabilizerReport:
    stable: bool
    stabilizer_size: int
    checked: int
    violation: Optional[tuple] = None


def stabilizer(system: ActionSystem, x) -> list:
    sg = system.semigroup
    sg._require_enumerable()
    return [h for h in sg.elements() if system.same_point(system.act(h, x), x)]


def stabilizer_conjugation_check(system: ActionSystem, x, trials: int = 1000, seed: int = 0
                                 ) -> StabilizerReport:
    """Search for ``s`` with ``s S_x s^{-1} != S_x``.

    All of ``S`` is tried when ``|S| <= trials``, otherwise ``trials`` samples.
    """
    sg = system.semigroup
    if not sg.is_group:
        raise SemigroupError("stabilizer conjugation needs a group action")
    stab = stabilizer(system, x)
    keys = {sg.encode(h) for h in stab}
    if sg.carrier_size <= trials:
        conjugators = list(sg.elements())
    else:
        rng = make_rng(seed, 0x57)
        conjugators = [sg.sample(rng) for _ in range(trials)]
    for i, s in enumerate(conjugators, 1):
        s_inv = sg.invert(s)
        conj = {sg.encode(sg.compose(sg.compose(s, h), s_inv)) for h in stab}
        if conj != keys:
            return StabilizerReport(False, len(stab), i, (s, conj, keys))
    return StabilizerReport(True, len(stab), len(conjugators))


def representation_soundness(system: ActionSystem, x, limit: int = 2**12) -> bool:
    """``[s] = [t]`` implies ``[as] = [at]`` for every ``a`` (exhaustive)."""
    sg = system.semigroup
    sg._require_enumerable(limit)
    elems = list(sg.elements())
    classes: dict[bytes, list] = {}
    for s in elems:
        classes.setdefault(system.encode_point(system.act(s, x)), []).append(s)
    for members in classes.values():
        rep = members[0]
        for t in members[1:]:
            for a in elems:
                if not system.same_point(system.act(sg.compose(a, rep), x),
                                         system.act(sg.compose(a, t), x)):
                    return False
    return True


def sqrt_ln2_budget(n: int) -> int:
    """``2 * ceil(sqrt(n ln 2))`` operations, the balanced BSGS budget."""
    return 2 * math.ceil(math.sqrt(n * math.log(2)))
