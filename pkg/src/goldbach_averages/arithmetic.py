"""Sieve-based arithmetic primitives.

Provides the von Mangoldt table Lambda(n) up to a capacity bound, exact
Chebyshev psi evaluation from prime-power breakpoints, Euler's totient, and
integer factorization.  Everything downstream (convolutions, twisted sums,
series) reads Lambda values out of one shared table, so the sieve stores each
prime's logarithm once and reuses the identical binary64 value for all powers
of that prime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Largest n_max the sieve accepts.  The sieve working set is roughly
#: 10 bytes per integer, so this cap keeps peak usage near 2 GB.
SIEVE_CAPACITY = 200_000_000


class CapacityError(RuntimeError):
    """A requested table or transform exceeds the documented size limit."""


def _have_wide_longdouble() -> bool:
    # x86-64 exposes the 80-bit extended type; on platforms where longdouble
    # aliases binary64 the compensated fallback below is used instead.
    return np.finfo(np.longdouble).eps < np.finfo(np.float64).eps / 8


def compensated_cumsum(values: np.ndarray) -> np.ndarray:
    """Running sums accumulated with extra precision, returned as binary64.

    For a table of 1e7 von Mangoldt values the plain float64 cumsum drifts by
    about 1e-9 relative near the end, which is too close to the 1e-9
    tolerance used by the partition identity checks.  Accumulating in 80-bit
    extended precision pushes the drift below 1e-15 relative.  On platforms
    whose ``np.longdouble`` is not actually wider than binary64 a Kahan
    compensated loop is used instead.
    """
    a = np.asarray(values)
    is_complex = np.iscomplexobj(a)
    if _have_wide_longdouble():
        wide = np.clongdouble if is_complex else np.longdouble
        narrow = np.complex128 if is_complex else np.float64
        return np.cumsum(a, dtype=wide).astype(narrow)
    out = np.empty(a.shape, dtype=complex if is_complex else float)
    s = 0.0 + 0.0j if is_complex else 0.0
    c = 0.0 + 0.0j if is_complex else 0.0
    for i, x in enumerate(a):
        y = x - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out


def exact_sum(values) -> float:
    """Exactly rounded sum of binary64 values (thin wrapper over math.fsum)."""
    return math.fsum(np.asarray(values, dtype=np.float64))


@dataclass(frozen=True)
class VonMangoldtTable:
    """Lambda(n) for 0 <= n <= n_max plus breakpoint structure.

    Attributes
    ----------
    n_max : int
        Largest index covered.
    values : np.ndarray
        Length n_max + 1 float64 array with values[n] = Lambda(n); zero off
        prime powers, and values[0] = values[1] = 0.
    breakpoints : np.ndarray
        Ascending int64 array of exactly the n with Lambda(n) > 0.
    psi_prefix : np.ndarray
        Length len(breakpoints) + 1; psi_prefix[k] is the sum of Lambda over
        the first k breakpoints, so psi(x) = psi_prefix[#breakpoints <= x].
    """

    n_max: int
    values: np.ndarray
    breakpoints: np.ndarray
    psi_prefix: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.n_max + 1,):
            raise ValueError("values length must be n_max + 1")

    def lambda_at(self, n: int) -> float:
        """Lambda(n) by table lookup."""
        if not 0 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range [0, {self.n_max}]")
        return float(self.values[n])


def sieve_von_mangoldt(n_max: int) -> VonMangoldtTable:
    """Sieve Lambda(n) for n <= n_max.

    Runs a vectorized sieve of Eratosthenes for the primes, writes
    log(float(p)) at each prime p, then backfills every power p^k <= n_max
    with the *same* stored binary64 logarithm, so Lambda(p) == Lambda(p^k)
    bit for bit.

    Raises
    ------
    ValueError
        If n_max < 1.
    CapacityError
        If n_max exceeds SIEVE_CAPACITY.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if n_max > SIEVE_CAPACITY:
        raise CapacityError(
            f"n_max={n_max} exceeds sieve capacity {SIEVE_CAPACITY}"
        )
    values = np.zeros(n_max + 1, dtype=np.float64)
    if n_max >= 2:
        is_prime = np.ones(n_max + 1, dtype=bool)
        is_prime[:2] = False
        for p in range(2, math.isqrt(n_max) + 1):
            if is_prime[p]:
                is_prime[p * p :: p] = False
        primes = np.nonzero(is_prime)[0]
        values[primes] = np.log(primes.astype(np.float64))
        for p in primes[primes <= math.isqrt(n_max)]:
            p = int(p)
            log_p = values[p]
            pk = p * p
            while pk <= n_max:
                values[pk] = log_p
                pk *= p
    breakpoints = np.nonzero(values)[0].astype(np.int64)
    prefix = np.zeros(len(breakpoints) + 1, dtype=np.float64)
    if len(breakpoints):
        prefix[1:] = compensated_cumsum(values[breakpoints])
    return VonMangoldtTable(
        n_max=n_max, values=values, breakpoints=breakpoints, psi_prefix=prefix
    )


def chebyshev_psi(table: VonMangoldtTable, x: float) -> float:
    """psi(x) = sum of Lambda(n) for n <= x, exact from the breakpoint prefix.

    x may be any real in [0, n_max]; values between breakpoints reuse the
    prefix at the last breakpoint <= x.
    """
    if x < 0 or x > table.n_max:
        raise ValueError(f"x={x} outside covered range [0, {table.n_max}]")
    k = int(np.searchsorted(table.breakpoints, math.floor(x), side="right"))
    return float(table.psi_prefix[k])


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as ascending (prime, exponent) pairs."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


def euler_phi(n: int) -> int:
    """Euler's totient of n >= 1, multiplicative over the factorization."""
    phi = 1
    for p, e in factorize(n):
        phi *= (p - 1) * p ** (e - 1)
    return phi
