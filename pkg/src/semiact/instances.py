"""Concrete action systems: modular exponentiation, min-chains, the flat
semilattice, symmetric groups and quotients by unit subgroups."""

from __future__ import annotations

import itertools
import math
from typing import Iterable

import numpy as np
from sympy import isprime

from .core import (
    ENUMERATION_LIMIT,
    ActionSystem,
    EnumerationError,
    NotInvertibleError,
    ProblemInstance,
    Semigroup,
    SemigroupError,
    byte_width,
    encode_int,
    encoding_key,
    make_rng,
    register,
)
from .numtheory import factorize

SUBGROUP_LIMIT = 10**4
MATERIALIZE_WARN = 10**5


class InstanceError(SemigroupError, ValueError):
    """Invalid parameters for a system builder."""


# -- integer semigroups -------------------------------------------------------

class ZnMul(Semigroup):
    """``(Z_n, *)``: commutative monoid, units are residues coprime to ``n``."""

    commutative = True

    def __init__(self, n: int):
        if n < 1:
            raise InstanceError("n must be positive")
        self.n = n
        self.name = f"(Z_{n},*)"
        self.carrier_size = n
        self.unit = 1 % n
        self.width = byte_width(n)

    def compose(self, a, b):
        return (a * b) % self.n

    def encode(self, s):
        return encode_int(s, self.width)

    def sample(self, rng):
        return int(rng.integers(self.n))

    def elements(self):
        return iter(range(self.n))

    def is_unit(self, s):
        return math.gcd(s, self.n) == 1

    def invert(self, s):
        if not self.is_unit(s):
            raise NotInvertibleError(f"{s} is not a unit mod {self.n}")
        return pow(s, -1, self.n) if self.n > 1 else 0

    def sample_unit(self, rng, max_tries=10_000):
        for _ in range(max_tries):
            s = int(rng.integers(self.n))
            if math.gcd(s, self.n) == 1:
                return s
        raise NotInvertibleError("no unit sampled")


class ZnAdd(Semigroup):
    """``(Z_n, +)``, the cyclic group of order ``n``."""

    commutative = True

    def __init__(self, n: int):
        if n < 1:
            raise InstanceError("n must be positive")
        self.n = n
        self.name = f"(Z_{n},+)"
        self.carrier_size = n
        self.unit = 0
        self.width = byte_width(n)

    @property
    def is_group(self):
        return True

    def compose(self, a, b):
        return (a + b) % self.n

    def encode(self, s):
        return encode_int(s, self.width)

    def sample(self, rng):
        return int(rng.integers(self.n))

    def elements(self):
        return iter(range(self.n))

    def is_unit(self, s):
        return True

    def invert(self, s):
        return (-s) % self.n

    def sample_unit(self, rng, max_tries=10_000):
        return self.sample(rng)


def _check_generator(p: int, n: int, g: int) -> None:
    if not isprime(p):
        raise InstanceError(f"{p} is not prime")
    if n < 1 or (p - 1) % n:
        raise InstanceError(f"{n} does not divide {p}-1")
    if pow(g, n, p) != 1:
        raise InstanceError(f"{g}^{n} != 1 mod {p}")
    for q in factorize(n):
        if pow(g, n // q, p) == 1:
            raise InstanceError(f"{g} has order dividing {n // q} mod {p}, not {n}")


class _SubgroupPoints(ActionSystem):
    """Shared point handling for actions on ``<g>`` inside ``Z_p^*``."""

    def __init__(self, p: int, n: int, g: int):
        self.p, self.n, self.g = p, n, g
        self.set_size = n
        self.point_width = byte_width(p)

    def encode_point(self, x):
        return encode_int(x, self.point_width)

    def sample_point(self, rng):
        return pow(self.g, int(rng.integers(self.n)), self.p)

    def points(self):
        if self.n > ENUMERATION_LIMIT:
            raise EnumerationError("subgroup too large to enumerate")
        return iter(sorted(pow(self.g, i, self.p) for i in range(self.n)))

    def dlog(self, h: int) -> int:
        """Brute-force discrete log of ``h`` to base ``g`` (harness use)."""
        cur = 1
        for i in range(self.n):
            if cur == h:
                return i
            cur = cur * self.g % self.p
        raise ValueError(f"{h} not in <{self.g}>")


class CyclicExpSystem(_SubgroupPoints):
    """``(Z_n, *)`` acting on the order-``n`` subgroup ``<g>`` of ``Z_p^*``
    by ``s.h = h^s``; the action problem from ``x = g`` is the DLP."""

    def __init__(self, p, n, g):
        super().__init__(p, n, g)
        self.semigroup = ZnMul(n)
        self.name = f"cyclic-exp:p={p},n={n},g={g}"

    def act(self, s, x):
        return pow(x, s, self.p)


class CyclicShiftSystem(_SubgroupPoints):
    """``(Z_n, +)`` acting on ``<g>`` by ``s.h = h * g^s``.

    Free, transitive and abelian: the regular action behind the classical
    generic model for the DLP.
    """

    free = True
    transitive = True

    def __init__(self, p, n, g):
        super().__init__(p, n, g)
        self.semigroup = ZnAdd(n)
        self.name = f"cyclic-shift:p={p},n={n},g={g}"

    def act(self, s, x):
        return x * pow(self.g, s, self.p) % self.p


class ZnSelfSystem(ActionSystem):
    """``(Z_n, *)`` acting on ``Z_n`` by multiplication."""

    def __init__(self, n: int):
        self.n = n
        self.semigroup = ZnMul(n)
        self.set_size = n
        self.name = f"zn-mult:n={n}"

    def act(self, s, x):
        return (s * x) % self.n

    def encode_point(self, x):
        return self.semigroup.encode(x)

    def sample_point(self, rng):
        return int(rng.integers(self.n))

    def points(self):
        return iter(range(self.n))


def build_cyclic_exp(p: int, n: int, g: int) -> CyclicExpSystem:
    _check_generator(p, n, g)
    return register(CyclicExpSystem(p, n, g))


def build_cyclic_shift(p: int, n: int, g: int) -> CyclicShiftSystem:
    _check_generator(p, n, g)
    return register(CyclicShiftSystem(p, n, g))


def build_zn_mult(n: int) -> ZnSelfSystem:
    if n < 1:
        raise InstanceError("n must be positive")
    return register(ZnSelfSystem(n))


def find_subgroup(n: int, max_k: int = 10**4) -> tuple[int, int, int]:
    """Smallest prime ``p = k*n + 1`` and an element ``g`` of order ``n``."""
    for k in range(1, max_k):
        p = k * n + 1
        if not isprime(p):
            continue
        for h in range(2, p):
            g = pow(h, k, p)
            try:
                _check_generator(p, n, g)
            except InstanceError:
                continue
            return p, n, g
    raise InstanceError(f"no prime p = k*{n}+1 with k < {max_k}")


def cyclic_exp_for_order(n: int) -> CyclicExpSystem:
    return build_cyclic_exp(*find_subgroup(n))


def cyclic_shift_for_order(n: int) -> CyclicShiftSystem:
    return build_cyclic_shift(*find_subgroup(n))


# -- hidden-bijection systems ----------------------------------------------------

class _HiddenBijection(ActionSystem):
    """Points are labels ``phi(t)``; ``phi`` is a seeded permutation that
    attacks never see. Actions: ``s . phi(t) = phi(s t)``."""

    def __init__(self, size: int, seed: int):
        self.set_size = size
        self._phi = make_rng(seed, 0xF1).permutation(size)
        self._phi_inv = np.argsort(self._phi)
        self.point_width = byte_width(size)

    def phi(self, index: int) -> int:
        return int(self._phi[index])

    def phi_inv(self, x: int) -> int:
        return int(self._phi_inv[x])

    def encode_point(self, x):
        return encode_int(x, self.point_width)

    def sample_point(self, rng):
        return int(rng.integers(self.set_size))

    def points(self):
        return iter(range(self.set_size))


class MinChain(Semigroup):
    """``({1..n}, min)``; ``n`` is the unit."""

    commutative = True

    def __init__(self, n):
        self.n = n
        self.name = f"({{1..{n}}},min)"
        self.carrier_size = n
        self.unit = n
        self.width = byte_width(n)

    def compose(self, a, b):
        return a if a < b else b

    def encode(self, s):
        return encode_int(s - 1, self.width)

    def sample(self, rng):
        return int(rng.integers(1, self.n + 1))

    def elements(self):
        return iter(range(1, self.n + 1))

    def is_unit(self, s):
        return s == self.n

    def invert(self, s):
        if s != self.n:
            raise NotInvertibleError(f"{s} is not the unit")
        return s


class MinChainSystem(_HiddenBijection):
    def __init__(self, n, seed):
        super().__init__(n, seed)
        self.semigroup = MinChain(n)
        self.name = f"min-chain:n={n}"

    def act(self, s, x):
        t = int(self._phi_inv[x]) + 1
        return int(self._phi[min(s, t) - 1])

    def chain_point(self, t: int) -> int:
        """``phi(t)`` for chain element ``t``."""
        return int(self._phi[t - 1])

    def instance(self, s: int, a: int | None = None) -> ProblemInstance:
        """Instance ``x = phi(a)``, ``y = s.x`` with ``a`` published."""
        a = self.semigroup.n if a is None else a
        x = self.chain_point(a)
        return ProblemInstance(self, x, self.act(s, x), witness=s, known={"a": a})


class FlatSemilattice(Semigroup):
    """``{0, s_1..s_m, 1}`` under meet, with ``s_i ^ s_j = 0`` for ``i != j``.

    Encoded as integers: ``0`` is zero, ``i`` is ``s_i``, ``m+1`` is one.
    """

    commutative = True

    def __init__(self, m):
        self.m = m
        self.zero, self.one = 0, m + 1
        self.name = f"flat-semilattice:m={m}"
        self.carrier_size = m + 2
        self.unit = self.one
        self.width = byte_width(m + 2)

    def compose(self, a, b):
        if a == b or b == self.one:
            return a
        if a == self.one:
            return b
        return self.zero

    def encode(self, s):
        return encode_int(s, self.width)

    def sample(self, rng):
        return int(rng.integers(self.m + 2))

    def elements(self):
        return iter(range(self.m + 2))

    def is_unit(self, s):
        return s == self.one

    def invert(self, s):
        if s != self.one:
            raise NotInvertibleError("only 1 is invertible in a flat semilattice")
        return s


class FlatSemilatticeSystem(_HiddenBijection):
    def __init__(self, m, seed):
        super().__init__(m + 2, seed)
        self.semigroup = FlatSemilattice(m)
        self.name = f"flat-semilattice:m={m}"
        self.o = self.phi(0)
        self.e = self.phi(m + 1)

    def act(self, s, x):
        return self.phi(self.semigroup.compose(s, self.phi_inv(x)))


def build_min_chain(n: int, seed: int = 0) -> MinChainSystem:
    if n < 2:
        raise InstanceError("min-chain needs n >= 2")
    return register(MinChainSystem(n, seed), seed)


def build_flat_semilattice(m: int, seed: int = 0) -> FlatSemilatticeSystem:
    if m < 1:
        raise InstanceError("flat semilattice needs m >= 1")
    return register(FlatSemilatticeSystem(m, seed), seed)


# -- symmetric group ----------------------------------------------------------------

SYMMETRIC_MAX_N = 10**6


class SymmetricGroup(Semigroup):
    """``Sym({0..n-1})`` with permutations as read-only index arrays.

    ``compose(a, b)`` is ``a`` after ``b``, so ``(ab).x = a.(b.x)``.
    """

    def __init__(self, n):
        self.n = n
        self.name = f"Sym({n})"
        self.carrier_size = math.factorial(n)
        self.dtype = np.dtype("<u1") if n <= 2**8 else np.dtype("<u2") if n <= 2**16 else np.dtype("<u4")
        self.unit = self.perm(np.arange(n))
        self.commutative = n <= 2

    @property
    def is_group(self):
        return True

    def perm(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def compose(self, a, b):
        return self.perm(a[b])

    def encode(self, s):
        return s.astype(self.dtype).tobytes()

    def sample(self, rng):
        return self.perm(rng.permutation(self.n))

    def elements(self):
        self._require_enumerable(40320)
        perms = (self.perm(p) for p in itertools.permutations(range(self.n)))
        return iter(sorted(perms, key=lambda p: encoding_key(self.encode(p))))

    def is_unit(self, s):
        return True

    def invert(self, s):
        return self.perm(np.argsort(s))

    def sample_unit(self, rng, max_tries=10_000):
        return self.sample(rng)

    def transposition(self, i, j):
        arr = np.arange(self.n)
        arr[i], arr[j] = j, i
        return self.perm(arr)

    def from_mapping(self, mapping: dict[int, int]):
        """Permutation that is ``mapping`` on its keys and the identity elsewhere."""
        arr = np.arange(self.n)
        for k, v in mapping.items():
            arr[k] = v
        if len(set(arr.tolist())) != self.n:
            raise InstanceError("mapping is not a bijection")
        return self.perm(arr)


class SymmetricActionSystem(ActionSystem):
    transitive = True

    def __init__(self, n):
        self.semigroup = SymmetricGroup(n)
        self.set_size = n
        self.name = f"symmetric:n={n}"
        self.free = n <= 2
        self.point_width = byte_width(n)

    def act(self, s, x):
        return int(s[x])

    def encode_point(self, x):
        return encode_int(x, self.point_width)

    def sample_point(self, rng):
        return int(rng.integers(self.set_size))

    def points(self):
        return iter(range(self.set_size))


def build_symmetric(n: int) -> SymmetricActionSystem:
    if n < 1:
        raise InstanceError("symmetric group needs n >= 1")
    if n > SYMMETRIC_MAX_N:
        raise InstanceError(f"n > {SYMMETRIC_MAX_N}")
    return register(SymmetricActionSystem(n))


# -- quotients by subgroups of units ------------------------------------------

def generate_subgroup(sg: Semigroup, gens: Iterable, limit: int = SUBGROUP_LIMIT) -> list:
    """Elements of ``<gens>`` by closure from the unit, in encoding order."""
    gens = list(gens)
    seen = {sg.encode(sg.unit): sg.unit}
    frontier = [sg.unit]
    while frontier:
        nxt = []
        for a in frontier:
            for h in gens:
                b = sg.compose(a, h)
                key = sg.encode(b)
                if key not in seen:
                    seen[key] = b
                    nxt.append(b)
                    if len(seen) > limit:
                        raise EnumerationError(f"subgroup exceeds {limit} elements")
        frontier = nxt
    return [seen[k] for k in sorted(seen, key=encoding_key)]


class QuotientSemigroup(Semigroup):
    """``S/H``: classes ``sH`` represented by their minimum-encoding member."""

    def __init__(self, base: Semigroup, H: list):
        self.base = base
        self.H = H
        self.name = f"{base.name}/H"
        self.commutative = base.commutative
        self.unit = self.canon(base.unit)
        self._carrier = None

    @property
    def is_group(self):
        return self.base.is_group

    @property
    def carrier_size(self):
        if self._carrier is None:
            self._carrier = sum(1 for _ in self.elements())
        return self._carrier

    def coset(self, s) -> list:
        return [self.base.compose(s, h) for h in self.H]

    def canon(self, s):
        return min(self.coset(s), key=lambda t: encoding_key(self.base.encode(t)))

    def compose(self, a, b):
        return self.canon(self.base.compose(a, b))

    def encode(self, s):
        return self.base.encode(self.canon(s))

    def sample(self, rng):
        return self.canon(self.base.sample(rng))

    def elements(self):
        self.base._require_enumerable()
        reps = {}
        for s in self.base.elements():
            c = self.canon(s)
            reps.setdefault(self.base.encode(c), c)
        return iter([reps[k] for k in sorted(reps, key=encoding_key)])

    def is_unit(self, s):
        return self.base.is_unit(s)

    def invert(self, s):
        return self.canon(self.base.invert(s))

    def sample_unit(self, rng, max_tries=10_000):
        return self.canon(self.base.sample_unit(rng, max_tries))


class QuotientActionSystem(ActionSystem):
    """``S/H`` acting on the ``H``-orbits ``X/~`` by ``[s].[x] = [s.x]``.

    Each orbit is represented by its minimum-encoding point, found by
    enumerating ``{h.x : h in H}``.
    """

    def __init__(self, base: ActionSystem, H: list):
        self.base = base
        self.H = H
        self.semigroup = QuotientSemigroup(base.semigroup, H)
        self.name = f"{base.name}/<{len(H)}>"
        self.transitive = base.transitive
        self._set_size = None

    @property
    def set_size(self):
        if self._set_size is None:
            self._set_size = sum(1 for _ in self.points())
        return self._set_size

    def orbit_of(self, x) -> list:
        """The ``H``-orbit of ``x`` in the order of ``H``'s elements."""
        out, seen = [], set()
        for h in self.H:
            p = self.base.act(h, x)
            key = self.base.encode_point(p)
            if key not in seen:
                seen.add(key)
                out.append(p)
        return out

    def canon_point(self, x):
        return min(self.orbit_of(x), key=lambda p: encoding_key(self.base.encode_point(p)))

    def act(self, s, x):
        return self.canon_point(self.base.act(s, x))

    def encode_point(self, x):
        return self.base.encode_point(self.canon_point(x))

    def sample_point(self, rng):
        return self.canon_point(self.base.sample_point(rng))

    def points(self):
        reps = {}
        for x in self.base.points():
            c = self.canon_point(x)
            reps.setdefault(self.base.encode_point(c), c)
        return iter([reps[k] for k in sorted(reps, key=encoding_key)])


def build_quotient(base: ActionSystem, H: Iterable) -> QuotientActionSystem:
    sg = base.semigroup
    if not (sg.commutative and sg.is_monoid):
        raise InstanceError("quotients need a commutative monoid")
    gens = list(H)
    for h in gens:
        if not sg.is_unit(h):
            raise NotInvertibleError(f"generator {h!r} is not a unit")
    return QuotientActionSystem(base, generate_subgroup(sg, gens))


# -- descriptors ------------------------------------------------------------------

BUILDERS = {
    "cyclic-exp": (build_cyclic_exp, ("p", "n", "g")),
    "cyclic-shift": (build_cyclic_shift, ("p", "n", "g")),
    "zn-mult": (build_zn_mult, ("n",)),
    "min-chain": (build_min_chain, ("n", "seed")),
    "flat-semilattice": (build_flat_semilattice, ("m", "seed")),
    "symmetric": (build_symmetric, ("n",)),
}


def parse_descriptor(text: str) -> tuple[str, dict[str, int]]:
    """``"cyclic-exp:p=59,n=29,g=4"`` -> ``("cyclic-exp", {"p": 59, ...})``."""
    name, _, rest = text.strip().partition(":")
    params = {}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, value = part.partition("=")
        if not eq:
            raise InstanceError(f"malformed parameter {part!r}")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise InstanceError(f"parameter {key!r} must be an integer") from None
    return name, params


def build_from_descriptor(text: str) -> ActionSystem:
    name, params = parse_descriptor(text)
    if name not in BUILDERS:
        raise InstanceError(f"unknown system {name!r}; known: {', '.join(BUILDERS)}")
    builder, allowed = BUILDERS[name]
    unknown = set(params) - set(allowed)
    if unknown:
        raise InstanceError(f"{name}: unexpected parameters {sorted(unknown)}")
    try:
        return builder(**params)
    except TypeError as exc:
        raise InstanceError(f"{name}: {exc}") from None
