"""Generic solvers for the (semi)group action problem ``y = s.x``.

Every solver works through an :class:`Oracle` that counts action
evaluations, compositions, inversions and equality tests at the call site,
and returns an :class:`AttackResult`.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from .core import (
    ENUMERATION_LIMIT,
    ActionSystem,
    EnumerationError,
    ProblemInstance,
    Semigroup,
    SemigroupError,
    encoding_key,
    make_rng,
    verify_solution,
)
from .instances import MinChainSystem, SymmetricActionSystem

RHO_PARTITIONS = 16
RHO_RETRIES = 10


class InconclusiveError(SemigroupError):
    pass


@dataclass
class AttackResult:
    solution: Any = None
    success: bool = False
    action_queries: int = 0
    compositions: int = 0
    inversions: int = 0
    equality_tests: int = 0
    table_entries: int = 0
    wall_steps: int = 0
    info: dict = field(default_factory=dict)

    COUNTERS = ("action_queries", "compositions", "inversions", "equality_tests",
                "table_entries", "wall_steps")

    def counters(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in self.COUNTERS}

    def plus(self, other: "AttackResult") -> "AttackResult":
        """``other``'s outcome with both runs' counters summed."""
        summed = {k: getattr(self, k) + getattr(other, k) for k in self.COUNTERS}
        return replace(other, **summed)


class Oracle:
    """Counting front-end to a system; attacks only touch the system through it."""

    def __init__(self, system: ActionSystem):
        self.system = system
        self.sg: Semigroup = system.semigroup
        self.action_queries = 0
        self.compositions = 0
        self.inversions = 0
        self.equality_tests = 0

    def act(self, s, x):
        self.action_queries += 1
        return self.system.act(s, x)

    def compose(self, a, b):
        self.compositions += 1
        return self.sg.compose(a, b)

    def invert(self, s):
        self.inversions += 1
        return self.sg.invert(s)

    def same(self, p, q) -> bool:
        self.equality_tests += 1
        return self.system.encode_point(p) == self.system.encode_point(q)

    def same_encoding(self, e1: bytes, e2: bytes) -> bool:
        self.equality_tests += 1
        return e1 == e2

    def result(self, solution=None, success=None, **kw) -> AttackResult:
        if success is None:
            success = solution is not None
        return AttackResult(
            solution=solution,
            success=success,
            action_queries=self.action_queries,
            compositions=self.compositions,
            inversions=self.inversions,
            equality_tests=self.equality_tests,
            **kw,
        )


def _bucket(encoding: bytes) -> bytes:
    return hashlib.blake2b(encoding, digest_size=4).digest()


# -- exhaustive oracle ----------------------------------------------------------

def exhaustive(inst: ProblemInstance, limit: int = ENUMERATION_LIMIT) -> AttackResult:
    """First ``s`` in encoding order with ``s.x == y``."""
    sg = inst.system.semigroup
    if sg.carrier_size > limit:
        raise EnumerationError(f"carrier {sg.carrier_size} exceeds {limit}")
    oracle = Oracle(inst.system)
    steps = 0
    for s in sg.elements():
        steps += 1
        if oracle.same(oracle.act(s, inst.x), inst.y):
            return oracle.result(s, wall_steps=steps)
    return oracle.result(None, wall_steps=steps)


def solution_set(inst: ProblemInstance) -> set[bytes]:
    """Encodings of every solution (uncounted ground truth)."""
    sys = inst.system
    target = sys.encode_point(inst.y)
    return {sys.semigroup.encode(s) for s in sys.semigroup.elements()
            if sys.encode_point(sys.act(s, inst.x)) == target}


# -- baby-step giant-step ------------------------------------------------------------

def _distinct_draws(sg: Semigroup, rng, count: int, draw, max_tries: int):
    """Up to ``count`` draws with distinct encodings; returns (items, tries)."""
    if sg.carrier_size <= count and sg.carrier_size <= ENUMERATION_LIMIT:
        pool = list(sg.elements())
        order = rng.permutation(len(pool))
        return [pool[i] for i in order], len(pool)
    seen, out, tries = set(), [], 0
    while len(out) < count and tries < max_tries:
        tries += 1
        s = draw()
        key = sg.encode(s)
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out, tries


def bsgs(inst: ProblemInstance, k: int, l: int, seed: int = 0, attempt: int = 0,
         table_elements=None, probe_elements=None) -> AttackResult:
    """Time-memory trade-off: table of ``b_j.y`` for random units ``b_j``,
    then ``k`` random probes ``a.x``; a hit gives ``s = b_j^{-1} a``.

    ``table_elements`` / ``probe_elements`` replace the random choices.
    Failure after ``k`` probes is reported, not raised.
    """
    sys = inst.system
    sg = sys.semigroup
    if not sg.is_monoid:
        raise SemigroupError("bsgs needs a monoid")
    rng = make_rng(seed, attempt)
    oracle = Oracle(sys)
    info = {}

    if table_elements is None:
        draws = 0

        def draw_unit():
            nonlocal draws
            while True:
                draws += 1
                s = sg.sample(rng)
                if sg.is_unit(s):
                    return s
                if draws > 50 * l + 1000:
                    raise InconclusiveError("unit rejection sampling exhausted")

        if sg.carrier_size <= l and sg.carrier_size <= ENUMERATION_LIMIT:
            table_elements = [s for s in _distinct_draws(sg, rng, l, None, 0)[0] if sg.is_unit(s)]
            draws = sg.carrier_size
        else:
            try:
                table_elements, _ = _distinct_draws(sg, rng, l, draw_unit, 20 * l + 100)
            except InconclusiveError:
                table_elements = []
        info["unit_acceptance"] = len(table_elements) / draws if draws else 1.0
    table: dict[bytes, list] = {}
    entries = 0
    for b in table_elements[:l]:
        p = oracle.act(b, inst.y)
        enc = sys.encode_point(p)
        bucket = table.setdefault(_bucket(enc), [])
        if any(e == enc for e, _ in bucket):
            continue
        bucket.append((enc, b))
        entries += 1

    if probe_elements is None:
        probe_elements, _ = _distinct_draws(sg, rng, k, lambda: sg.sample(rng), 20 * k + 100)
    steps = 0
    for a in probe_elements[:k]:
        steps += 1
        enc = sys.encode_point(oracle.act(a, inst.x))
        for stored, b in table.get(_bucket(enc), ()):
            if oracle.same_encoding(enc, stored):
                s = oracle.compose(oracle.invert(b), a)
                return oracle.result(s, table_entries=entries, wall_steps=steps, info=info)
    return oracle.result(None, table_entries=entries, wall_steps=steps, info=info)


def balanced_bsgs_sizes(n: int) -> tuple[int, int]:
    """``k = l`` with ``k*l >= ceil(n ln 2)``."""
    target = math.ceil(n * math.log(2))
    k = math.isqrt(target)
    if k * k < target:
        k += 1
    return k, k


# -- Pollard rho ----------------------------------------------------------------------

@dataclass(frozen=True)
class WalkConfig:
    """Pseudorandom map ``f: X -> G``: a keyed hash of the point encoding
    selects one of ``r`` precomputed step elements."""

    multipliers: tuple
    key: bytes = b""

    @property
    def r(self) -> int:
        return len(self.multipliers)

    @classmethod
    def random(cls, sg: Semigroup, rng: np.random.Generator, r: int = RHO_PARTITIONS):
        mults = tuple(sg.sample_unit(rng) for _ in range(r))
        return cls(mults, rng.bytes(16))

    def index(self, encoding: bytes) -> int:
        digest = hashlib.blake2b(encoding, digest_size=8, key=self.key).digest()
        return int.from_bytes(digest, "little") % self.r

    def __call__(self, encoding: bytes):
        return self.multipliers[self.index(encoding)]


def pollard_rho(inst: ProblemInstance, walk: Optional[WalkConfig] = None, seed: int = 0,
                attempt: int = 0, start_a=None, start_b=None, max_iter: Optional[int] = None
                ) -> AttackResult:
    """Low-memory collision search for group actions.

    Walks ``a_{i+1} = f(a_i.x) a_i`` and ``b_{j+1} = f(b_j.y) b_j``. Floyd's
    tortoise and hare give the first ``k`` with ``a_k.x == a_{2k}.x`` (and
    ``l`` for the b-walk); then ``b_{l+s}.y`` is compared to ``a_k.x`` for
    ``s < l``. A hit yields ``g = b_{l+s}^{-1} a_k``.
    """
    sys = inst.system
    sg = sys.semigroup
    rng = make_rng(seed, attempt)
    if walk is None:
        walk = WalkConfig.random(sg, rng)
    oracle = Oracle(sys)
    if max_iter is None:
        max_iter = 4 * sys.set_size + 16
    enc = sys.encode_point

    def step(elem, pt):
        m = walk(enc(pt))
        return oracle.compose(m, elem), oracle.act(m, pt)

    def floyd(start, base):
        pt = oracle.act(start, base)
        tort = (start, pt)
        hare = step(*tort)
        k = 1
        while not oracle.same(tort[1], hare[1]):
            if k >= max_iter:
                return None, k
            tort = step(*tort)
            hare = step(*step(*hare))
            k += 1
        return tort, k

    a = sg.sample_unit(rng) if start_a is None else start_a
    b = sg.sample_unit(rng) if start_b is None else start_b
    a_k, k = floyd(a, inst.x)
    b_l, l = floyd(b, inst.y)
    info = {"k": k, "l": l}
    steps = k + l
    if a_k is None or b_l is None:
        return oracle.result(None, wall_steps=steps, info=info)

    cur = b_l
    for s in range(l):
        steps += 1
        if oracle.same(a_k[1], cur[1]):
            g = oracle.compose(oracle.invert(cur[0]), a_k[0])
            info["scan"] = s
            return oracle.result(g, wall_steps=steps, info=info)
        cur = step(*cur)
    info["scan"] = l
    return oracle.result(None, wall_steps=steps, info=info)


def with_retries(attack, inst: ProblemInstance, retries: int = RHO_RETRIES, seed: int = 0, **kw):
    """Rerun ``attack`` with fresh attempt streams until it succeeds.

    Counters accumulate over attempts; ``info["attempts"]`` records how many ran.
    """
    total = None
    for attempt in range(retries + 1):
        res = attack(inst, seed=seed, attempt=attempt, **kw)
        total = res if total is None else total.plus(res)
        if res.success:
            break
    total.info = dict(total.info, attempts=attempt + 1)
    return total


# -- structured attacks ------------------------------------------------------------

def binary_search_min(inst: ProblemInstance) -> AttackResult:
    """Min-chain solver: for ``t <= a``, ``t.x == t.y`` iff ``t <= s``.

    Needs the published chain position ``a`` of ``x`` (``inst.known["a"]``).
    """
    if not isinstance(inst.system, MinChainSystem):
        raise SemigroupError("binary_search_min needs a min-chain system")
    oracle = Oracle(inst.system)
    a = inst.known["a"]
    lo, hi, steps = 1, a, 0
    while lo < hi:
        steps += 1
        mid = (lo + hi + 1) // 2
        if oracle.same(oracle.act(mid, inst.x), oracle.act(mid, inst.y)):
            lo = mid
        else:
            hi = mid - 1
    return oracle.result(lo, wall_steps=steps)


def _split_query(sg, candidates: list, n: int):
    """A permutation whose fixed points inside ``candidates`` are exactly the
    first half. Returns ``(c, half)`` or ``None`` when no such ``c`` exists."""
    half = candidates[: len(candidates) // 2]
    rest = candidates[len(candidates) // 2:]
    mapping = {}
    if len(rest) >= 2:
        # cyclic shift of the second half moves all of it
        for i, p in enumerate(rest):
            mapping[p] = rest[(i + 1) % len(rest)]
    else:
        inside = set(candidates)
        outside = next((q for q in range(n) if q not in inside), None)
        if outside is None:
            return None
        mapping = {rest[0]: outside, outside: rest[0]}
    return sg.from_mapping(mapping), half


def symmetric_fixedpoint_search(inst: ProblemInstance) -> AttackResult:
    """Locate ``s.x`` in ``Sym(X)`` by halving with fixed-point queries.

    Each round asks whether ``c.y == y`` for a permutation ``c`` fixing
    exactly half of the candidate set, which happens iff ``s.x`` lies in that
    half. Returns the transposition taking ``x`` to the located point.
    """
    sys = inst.system
    if not isinstance(sys, SymmetricActionSystem):
        raise SemigroupError("symmetric_fixedpoint_search needs a symmetric system")
    sg = sys.semigroup
    oracle = Oracle(sys)
    candidates = list(range(sys.set_size))
    events = []
    while len(candidates) > 1:
        split = _split_query(sg, candidates, sys.set_size)
        if split is None:
            # |X| = 2: compare y against a known point instead
            z = candidates[0]
            a = sg.unit if z == inst.x else sg.transposition(inst.x, z)
            hit = oracle.same(oracle.act(a, inst.x), inst.y)
            events.append((1, len(candidates), hit))
            candidates = [z] if hit else candidates[1:]
            continue
        c, half = split
        hit = oracle.same(oracle.act(c, inst.y), inst.y)
        events.append((len(half), len(candidates), hit))
        candidates = half if hit else candidates[len(half):]
    z = candidates[0]
    s = sg.unit if z == inst.x else sg.transposition(inst.x, z)
    return oracle.result(s, wall_steps=len(events), info={"rounds": len(events), "events": events})


def collision_probe_search(inst: ProblemInstance, seed: int = 0, budget: Optional[int] = None
                           ) -> AttackResult:
    """Probe distinct random ``t`` and compare ``t.x`` with ``t.y``.

    A collision is informative when ``t`` itself solves the instance
    (``t.x == y``); collisions from absorbing ``t`` are logged and skipped.
    ``info["probes"]`` is the number of distinct ``t`` tried.
    """
    sys = inst.system
    sg = sys.semigroup
    rng = make_rng(seed)
    oracle = Oracle(sys)
    order, _ = _distinct_draws(sg, rng, sg.carrier_size if budget is None else budget,
                               lambda: sg.sample(rng), 50 * (budget or 0) + 100)
    uninformative = 0
    for probes, t in enumerate(order, 1):
        tx = oracle.act(t, inst.x)
        if oracle.same(tx, oracle.act(t, inst.y)):
            if oracle.same(tx, inst.y):
                return oracle.result(t, wall_steps=probes,
                                     info={"probes": probes, "uninformative": uninformative})
            uninformative += 1
    return oracle.result(None, wall_steps=len(order),
                         info={"probes": len(order), "uninformative": uninformative})


# -- unit filter --------------------------------------------------------------------------

class UnitGroup(Semigroup):
    """The group of units ``S*`` of a finite monoid."""

    def __init__(self, base: Semigroup):
        self.base = base
        self.name = f"{base.name}*"
        self.unit = base.unit
        self.commutative = base.commutative
        self._size = None

    @property
    def is_group(self):
        return True

    @property
    def carrier_size(self):
        if self._size is None:
            self._size = sum(1 for _ in self.elements())
        return self._size

    def compose(self, a, b):
        return self.base.compose(a, b)

    def encode(self, s):
        return self.base.encode(s)

    def sample(self, rng):
        return self.base.sample_unit(rng)

    def elements(self):
        return self.base.units()

    def is_unit(self, s):
        return self.base.is_unit(s)

    def invert(self, s):
        return self.base.invert(s)

    def sample_unit(self, rng, max_tries=10_000):
        return self.base.sample_unit(rng, max_tries)


class UnitRestriction(ActionSystem):
    """The action of ``S*`` obtained by discarding the non-units of ``S``."""

    def __init__(self, base: ActionSystem):
        self.base = base
        self.semigroup = UnitGroup(base.semigroup)
        self.set_size = base.set_size
        self.name = f"{base.name}|units"

    def act(self, s, x):
        return self.base.act(s, x)

    def encode_point(self, x):
        return self.base.encode_point(x)

    def sample_point(self, rng):
        return self.base.sample_point(rng)

    def points(self):
        return self.base.points()


@dataclass
class UnitFilterResult:
    status: str  # "unchanged", "restricted" or "not-in-unit-orbit"
    instance: Optional[ProblemInstance]
    unit_solution: Any = None
    units_checked: int = 0


def unit_filter(inst: ProblemInstance, budget: int = 10**5, seed: int = 0) -> UnitFilterResult:
    """Restrict a monoid instance to the unit group when ``y`` is in ``S*.x``.

    Membership is decided by enumerating units when ``|S| <= budget`` and by
    sampling ``budget`` units otherwise; a sampled search that finds nothing
    raises :class:`InconclusiveError`.
    """
    sys = inst.system
    sg = sys.semigroup
    if sg.is_group:
        return UnitFilterResult("unchanged", inst)
    if not sg.is_monoid:
        raise SemigroupError("unit_filter needs a monoid")
    exhaustive_search = sg.carrier_size <= budget
    if exhaustive_search:
        candidates = sg.units()
    else:
        rng = make_rng(seed)
        candidates = (sg.sample_unit(rng) for _ in range(budget))
    target = sys.encode_point(inst.y)
    checked = 0
    for u in candidates:
        checked += 1
        if sys.encode_point(sys.act(u, inst.x)) == target:
            witness = inst.witness if inst.witness is not None and sg.is_unit(inst.witness) else None
            restricted = ProblemInstance(UnitRestriction(sys), inst.x, inst.y, witness, dict(inst.known))
            return UnitFilterResult("restricted", restricted, u, checked)
    if exhaustive_search:
        return UnitFilterResult("not-in-unit-orbit", None, None, checked)
    raise InconclusiveError(f"no unit maps x to y among {checked} samples")


def oracle_check(inst: ProblemInstance, result: AttackResult) -> bool:
    """A successful result verifies and lies in the exhaustive solution set."""
    if not result.success:
        return True
    sg = inst.system.semigroup
    return (verify_solution(inst, result.solution).verified
            and sg.encode(result.solution) in solution_set(inst))


__all__ = [
    "AttackResult", "Oracle", "WalkConfig", "UnitFilterResult", "UnitRestriction", "UnitGroup",
    "InconclusiveError", "exhaustive", "solution_set", "bsgs", "balanced_bsgs_sizes",
    "pollard_rho", "with_retries", "binary_search_min", "symmetric_fixedpoint_search",
    "collision_probe_search", "unit_filter", "oracle_check",
]
