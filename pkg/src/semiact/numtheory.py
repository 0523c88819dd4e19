"""Small integer helpers: trial-division factoring and Chinese remaindering."""

from __future__ import annotations

from math import gcd

TRIAL_DIVISION_LIMIT = 10**6


class FactorizationError(ValueError):
    pass


def factorize(n: int, limit: int = TRIAL_DIVISION_LIMIT) -> dict[int, int]:
    """Prime factorization of ``n`` by trial division up to ``limit``.

    Raises :class:`FactorizationError` when a cofactor larger than ``limit**2``
    remains, since it might not be prime.
    """
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        if d > limit:
            raise FactorizationError(f"trial division budget exceeded for {n}")
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def crt(residues, moduli) -> tuple[int, int]:
    """Combine ``s = r_i mod m_i`` for pairwise-coprime moduli.

    Returns ``(s, M)`` with ``0 <= s < M = prod(m_i)``.
    """
    s, M = 0, 1
    for r, m in zip(residues, moduli):
        if gcd(M, m) != 1:
            raise ValueError(f"moduli not coprime: {M}, {m}")
        # lift s mod M to s' mod M*m with s' = r mod m
        t = ((r - s) * pow(M, -1, m)) % m
        s, M = s + M * t, M * m
    return s % M, M
