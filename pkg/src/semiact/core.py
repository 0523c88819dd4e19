"""Finite semigroups, their actions on finite sets, and problem instances.

Elements and points are opaque Python objects. Every semigroup and action
system pairs them with a canonical byte encoding (unsigned little-endian,
fixed width per system), and all equality is equality of encodings.

Randomness: every random choice comes from a :class:`numpy.random.Generator`
backed by PCG64 and seeded from ``SeedSequence(seed, spawn_key=stream)``.
A run seed plus a stream tuple such as ``(trial_index,)`` reproduces the same
draws bit-for-bit on any machine.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

import numpy as np

Element = Any
Point = Any

COMMUTATIVITY_SPOT_CHECKS = 1000
ENUMERATION_LIMIT = 10**6


class SemigroupError(Exception):
    """Base class for errors raised by this package."""


class NotInvertibleError(SemigroupError):
    pass


class NotCommutativeError(SemigroupError):
    pass


class EnumerationError(SemigroupError):
    """A carrier or orbit is too large to enumerate."""


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for run ``seed`` and sub-stream ``stream``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def byte_width(size: int) -> int:
    """Bytes needed to encode the integers ``0 .. size-1``."""
    return max(1, (max(size - 1, 0).bit_length() + 7) // 8)


def encode_int(value: int, width: int) -> bytes:
    return int(value).to_bytes(width, "little")


def encoding_key(encoding: bytes) -> int:
    """Sort key defining "encoding order": the encoded unsigned integer."""
    return int.from_bytes(encoding, "little")


class Semigroup(abc.ABC):
    """A finite semigroup with canonical element encodings.

    Subclasses set ``carrier_size``, ``unit`` (``None`` when there is no
    neutral element) and ``commutative``, and implement :meth:`compose`,
    :meth:`encode`, :meth:`sample` and :meth:`elements`.
    """

    name: str = "semigroup"
    carrier_size: int
    unit: Optional[Element] = None
    commutative: bool = False
    adjoined_unit: bool = False

    @abc.abstractmethod
    def compose(self, a: Element, b: Element) -> Element: ...

    @abc.abstractmethod
    def encode(self, s: Element) -> bytes: ...

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator) -> Element: ...

    @abc.abstractmethod
    def elements(self) -> Iterator[Element]:
        """All elements, in encoding order."""

    @property
    def is_monoid(self) -> bool:
        return self.unit is not None

    @property
    def is_group(self) -> bool:
        """True when every element is a unit."""
        return False

    def equal(self, a: Element, b: Element) -> bool:
        return self.encode(a) == self.encode(b)

    def is_unit(self, s: Element) -> bool:
        # generic fallback: search for a two-sided inverse
        if self.unit is None:
            return False
        if self.equal(s, self.unit):
            return True
        return self._search_inverse(s) is not None

    def invert(self, s: Element) -> Element:
        if self.unit is not None and self.equal(s, self.unit):
            return self.unit
        inv = self._search_inverse(s) if self.unit is not None else None
        if inv is None:
            raise NotInvertibleError(f"{self.name}: element is not a unit")
        return inv

    def _search_inverse(self, s):
        self._require_enumerable()
        one = self.encode(self.unit)
        for t in self.elements():
            if self.encode(self.compose(s, t)) == one and self.encode(self.compose(t, s)) == one:
                return t
        return None

    def sample_unit(self, rng: np.random.Generator, max_tries: int = 10_000) -> Element:
        """Rejection-sample a unit. Raises if ``max_tries`` draws yield none."""
        if self.unit is None:
            raise NotInvertibleError(f"{self.name} has no unit")
        for _ in range(max_tries):
            s = self.sample(rng)
            if self.is_unit(s):
                return s
        raise NotInvertibleError(f"{self.name}: no unit found in {max_tries} draws")

    def units(self) -> Iterator[Element]:
        return (s for s in self.elements() if self.is_unit(s))

    def _require_enumerable(self, limit: int = ENUMERATION_LIMIT) -> None:
        if self.carrier_size > limit:
            raise EnumerationError(f"{self.name}: carrier of size {self.carrier_size} exceeds {limit}")


class ActionSystem(abc.ABC):
    """A semigroup acting on a finite set: ``act(st, x) == act(s, act(t, x))``."""

    name: str = "action"
    semigroup: Semigroup
    set_size: int
    # declared properties of the action, used by attacks and the generic model
    free: bool = False
    transitive: bool = False

    @abc.abstractmethod
    def act(self, s: Element, x: Point) -> Point: ...

    @abc.abstractmethod
    def encode_point(self, x: Point) -> bytes: ...

    @abc.abstractmethod
    def sample_point(self, rng: np.random.Generator) -> Point: ...

    @abc.abstractmethod
    def points(self) -> Iterator[Point]:
        """All points, in encoding order."""

    @property
    def commutative(self) -> bool:
        return self.semigroup.commutative

    @property
    def abelian(self) -> bool:
        return self.semigroup.is_group and self.semigroup.commutative

    def same_point(self, x: Point, y: Point) -> bool:
        return self.encode_point(x) == self.encode_point(y)

    def orbit(self, x: Point, limit: int = ENUMERATION_LIMIT) -> dict[bytes, Point]:
        """The orbit ``S.x`` keyed by point encoding."""
        self.semigroup._require_enumerable(limit)
        out = {}
        for s in self.semigroup.elements():
            p = self.act(s, x)
            out.setdefault(self.encode_point(p), p)
        return out


@dataclass(frozen=True)
class ProblemInstance:
    """Find ``s`` with ``y == s.x``.

    ``witness`` is the hidden answer kept for test harnesses; attacks never
    read it. ``known`` carries public side information an attack is allowed
    to use (for example the chain position of ``x`` in a min-chain system).
    """

    system: ActionSystem
    x: Point
    y: Point
    witness: Optional[Element] = None
    known: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.witness is not None:
            if not self.system.same_point(self.system.act(self.witness, self.x), self.y):
                raise ValueError("witness does not map x to y")


@dataclass(frozen=True)
class Solution:
    s: Element
    verified: bool


def verify_solution(inst: ProblemInstance, s: Element) -> Solution:
    sys = inst.system
    return Solution(s, sys.same_point(sys.act(s, inst.x), inst.y))


def random_instance(system: ActionSystem, x: Point, rng: np.random.Generator, units_only=False):
    """Instance ``(x, s.x)`` for a random ``s``, with ``s`` as witness."""
    sg = system.semigroup
    s = sg.sample_unit(rng) if units_only else sg.sample(rng)
    return ProblemInstance(system, x, system.act(s, x), witness=s)


def dh_simulate(system: ActionSystem, x: Point, seed: int, a=None, b=None):
    """Run the commutative key agreement on public point ``x``.

    Alice and Bob draw secrets ``a`` and ``b`` from the seed unless given, and
    the pair of derived keys ``(a.(b.x), b.(a.x))`` is returned.
    """
    if not system.commutative:
        raise NotCommutativeError(f"{system.name} is not declared commutative")
    rng = make_rng(seed)
    sg = system.semigroup
    if a is None:
        a = sg.sample(rng)
    if b is None:
        b = sg.sample(rng)
    pub_a = system.act(a, x)
    pub_b = system.act(b, x)
    return system.act(a, pub_b), system.act(b, pub_a)


def spot_check_commutative(sg: Semigroup, rng: np.random.Generator, pairs=COMMUTATIVITY_SPOT_CHECKS):
    for _ in range(pairs):
        a, b = sg.sample(rng), sg.sample(rng)
        if sg.encode(sg.compose(a, b)) != sg.encode(sg.compose(b, a)):
            raise NotCommutativeError(f"{sg.name} declared commutative but ab != ba")


# -- adjoining a unit -------------------------------------------------------

class _AdjoinedOne:
    __slots__ = ()

    def __repr__(self):
        return "1*"


ADJOINED_ONE = _AdjoinedOne()


class WithUnit(Semigroup):
    """``S`` with a fresh neutral element adjoined (flagged ``adjoined_unit``).

    The adjoined unit is encoded as the integer ``carrier_size`` of the base.
    """

    adjoined_unit = True

    def __init__(self, base: Semigroup):
        self.base = base
        self.name = f"{base.name}+1"
        self.carrier_size = base.carrier_size + 1
        self.commutative = base.commutative
        self.unit = ADJOINED_ONE
        self.width = byte_width(self.carrier_size)

    def compose(self, a, b):
        if a is ADJOINED_ONE:
            return b
        if b is ADJOINED_ONE:
            return a
        return self.base.compose(a, b)

    def encode(self, s):
        if s is ADJOINED_ONE:
            return encode_int(self.base.carrier_size, self.width)
        raw = encoding_key(self.base.encode(s))
        return encode_int(raw, self.width)

    def sample(self, rng):
        if rng.integers(self.carrier_size) == 0:
            return ADJOINED_ONE
        return self.base.sample(rng)

    def elements(self):
        yield from self.base.elements()
        yield ADJOINED_ONE

    def is_unit(self, s):
        return s is ADJOINED_ONE

    def invert(self, s):
        if s is ADJOINED_ONE:
            return s
        raise NotInvertibleError("only the adjoined unit is invertible")


class WithUnitAction(ActionSystem):
    def __init__(self, base: ActionSystem):
        self.base = base
        self.name = base.name
        self.semigroup = WithUnit(base.semigroup)
        self.set_size = base.set_size

    def act(self, s, x):
        return x if s is ADJOINED_ONE else self.base.act(s, x)

    def encode_point(self, x):
        return self.base.encode_point(x)

    def sample_point(self, rng):
        return self.base.sample_point(rng)

    def points(self):
        return self.base.points()


def register(system: ActionSystem, seed: int = 0) -> ActionSystem:
    """Validate a freshly built system and adjoin a unit when it lacks one.

    Declared commutativity is spot-checked on random pairs, not proven.
    """
    if system.semigroup.commutative:
        spot_check_commutative(system.semigroup, make_rng(seed, 0xC0))
    if system.semigroup.unit is None:
        system = WithUnitAction(system)
    return system
