"""Goldbach representation counts and their cumulative averages.

psi2(n) is the autocorrelation sum_{m + m' = n} Lambda(m) Lambda(m') over
ordered pairs of positive integers; G(N) = sum_{n <= N} psi2(n) is its
cumulative average and G_q(N) the same sum restricted to multiples of q.
The error term E_q(N) = G_q(N) - G(N)/phi(q) is the quantity whose growth
the rest of the package measures.

Two independent routes compute psi2: a quadratic direct pair enumeration
(reference, capped at DIRECT_LIMIT) and an FFT autoconvolution (production,
used for large N).  Tests compare the two; library code never mixes them.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .arithmetic import (
    CapacityError,
    VonMangoldtTable,
    compensated_cumsum,
    euler_phi,
    exact_sum,
)

#: psi2_direct refuses budgets above this (quadratic work in the number of
#: prime powers; ~5e6 pair operations at the cap).
DIRECT_LIMIT = 20_000

#: psi2_fast refuses transforms above this length.
FAST_LIMIT = 100_000_000

_CACHE_MAGIC = b"GBA2"
_CACHE_VERSION = 1


@dataclass(frozen=True)
class Psi2Series:
    """psi2 values and prefix sums up to n_max.

    Attributes
    ----------
    n_max : int
        Largest n covered.
    psi2 : np.ndarray
        Length n_max + 1 float64; psi2[n] for each n, with psi2[0..3] = 0
        except psi2[4] onward (the smallest pair is 2 + 2 = 4).
    prefix : np.ndarray
        Length n_max + 1 float64; prefix[N] = G(N) = sum_{n <= N} psi2[n].
    """

    n_max: int
    psi2: np.ndarray
    prefix: np.ndarray

    def __post_init__(self):
        if self.psi2.shape != (self.n_max + 1,):
            raise ValueError("psi2 length must be n_max + 1")
        if self.prefix.shape != (self.n_max + 1,):
            raise ValueError("prefix length must be n_max + 1")


def _series_from_values(n_max: int, psi2: np.ndarray) -> Psi2Series:
    prefix = compensated_cumsum(psi2)
    return Psi2Series(n_max=n_max, psi2=psi2, prefix=prefix)


def psi2_direct(table: VonMangoldtTable, n_max: int) -> Psi2Series:
    """psi2 up to n_max by direct enumeration of prime-power pairs.

    Reference path.  Work grows quadratically with the number of prime
    powers, so n_max is capped at DIRECT_LIMIT; use psi2_fast beyond that.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    if n_max > DIRECT_LIMIT:
        raise ValueError(
            f"psi2_direct is capped at n_max={DIRECT_LIMIT}; "
            f"use psi2_fast for n_max={n_max}"
        )
    if n_max > table.n_max:
        raise ValueError(
            f"n_max={n_max} exceeds table coverage {table.n_max}"
        )
    bp = table.breakpoints[table.breakpoints <= n_max - 2]
    psi2 = np.zeros(n_max + 1, dtype=np.float64)
    lam = table.values
    for m in bp:
        m = int(m)
        partners = bp[bp <= n_max - m]
        np.add.at(psi2, m + partners, lam[m] * lam[partners])
    return _series_from_values(n_max, psi2)


def psi2_entry(table: VonMangoldtTable, n: int) -> float:
    """psi2(n) alone, by exactly rounded summation over ordered pairs.

    Independent of both psi2_direct and psi2_fast (fsum accumulation, no
    shared convolution code); used as the spot-check oracle.
    """
    if not 0 <= n <= table.n_max:
        raise ValueError(f"n={n} outside table range [0, {table.n_max}]")
    bp = table.breakpoints[table.breakpoints <= n - 2]
    if len(bp) == 0:
        return 0.0
    terms = table.values[bp] * table.values[n - bp]
    return math.fsum(terms)


def psi2_fast(table: VonMangoldtTable, n_max: int) -> Psi2Series:
    """psi2 up to n_max by FFT autoconvolution of the Lambda table.

    Uses a real-to-complex transform at a padded length with small prime
    factors.  The rounding error of the convolution is about
    eps * log2(L) * sum(Lambda(n)^2), which stays below 1e-7 absolute for
    n_max = 1e7 — two orders under the tolerances used by callers.  Exact
    zeros below n = 4 are restored and tiny negative round-off is clamped.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    if n_max > table.n_max:
        raise ValueError(
            f"n_max={n_max} exceeds table coverage {table.n_max}"
        )
    if 2 * n_max + 1 > FAST_LIMIT:
        raise CapacityError(
            f"transform length {2 * n_max + 1} exceeds cap {FAST_LIMIT}"
        )
    a = table.values[: n_max + 1]
    length = scipy.fft.next_fast_len(2 * n_max + 1, real=True)
    spectrum = scipy.fft.rfft(a, length)
    conv = scipy.fft.irfft(spectrum * spectrum, length)[: n_max + 1]
    conv[:4] = 0.0
    np.maximum(conv, 0.0, out=conv)
    return _series_from_values(n_max, conv)


def goldbach_average(series: Psi2Series, n: int) -> float:
    """G(N) = sum_{n' <= N} psi2(n') for integer N >= 4."""
    if n < 4:
        raise ValueError(f"N must be >= 4 (first pair is 2+2), got {n}")
    if n > series.n_max:
        raise ValueError(f"N={n} exceeds series coverage {series.n_max}")
    return float(series.prefix[n])


def _restricted_sum(series: Psi2Series, q: int, a: int, n: int) -> float:
    # psi2 vanishes below n = 4, so starting the stride at a is exact.
    if a > n:
        return 0.0
    return exact_sum(series.psi2[a : n + 1 : q])


def goldbach_average_multiples(series: Psi2Series, q: int, n: int) -> float:
    """G_q(N) = sum of psi2(n') over multiples of q up to N.

    q = 1 reduces to G(N) and is served from the same prefix array.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if n < 4:
        raise ValueError(f"N must be >= 4, got {n}")
    if n > series.n_max:
        raise ValueError(f"N={n} exceeds series coverage {series.n_max}")
    if q == 1:
        return float(series.prefix[n])
    return _restricted_sum(series, q, q, n)


def congruence_average(series: Psi2Series, q: int, a: int, n: int) -> float:
    """Sum of psi2 over n' <= N with n' congruent to a modulo q.

    The residue a is taken in [1, q]; a = q selects the multiples of q, so
    summing over a = 1..q recovers G(N) exactly (partition identity).
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if not 1 <= a <= q:
        raise ValueError(f"residue a must lie in [1, q], got a={a}")
    if n < 4:
        raise ValueError(f"N must be >= 4, got {n}")
    if n > series.n_max:
        raise ValueError(f"N={n} exceeds series coverage {series.n_max}")
    return _restricted_sum(series, q, a, n)


def error_term(series: Psi2Series, q: int, n: int) -> tuple[float, float]:
    """E_q(N) = G_q(N) - G(N)/phi(q) and its normalized magnitude.

    Returns (raw, normalized) where normalized = |raw| / (N log^3 N), the
    scaling against which E_q(N) is expected to stay bounded.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    raw = goldbach_average_multiples(series, q, n) - goldbach_average(
        series, n
    ) / euler_phi(q)
    normalized = abs(raw) / (n * math.log(n) ** 3)
    return raw, normalized


def save_psi2_cache(series: Psi2Series, path) -> None:
    """Write a Psi2Series to a little-endian binary cache file.

    Layout: 4-byte magic, uint32 version, uint64 n_max, then n_max + 1
    float64 psi2 values.  The prefix array is recomputed on load.
    """
    header = struct.pack("<4sIQ", _CACHE_MAGIC, _CACHE_VERSION, series.n_max)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(series.psi2.astype("<f8").tobytes())


def load_psi2_cache(path) -> Psi2Series:
    """Read a cache written by save_psi2_cache; rejects foreign files."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise ValueError(f"{path}: truncated header")
        magic, version, n_max = struct.unpack("<4sIQ", header)
        if magic != _CACHE_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != _CACHE_VERSION:
            raise ValueError(
                f"{path}: unsupported cache version {version}"
            )
        payload = fh.read()
    expected = 8 * (n_max + 1)
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload has {len(payload)} bytes, expected {expected}"
        )
    psi2 = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return _series_from_values(int(n_max), psi2)
