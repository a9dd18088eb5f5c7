#!/usr/bin/env python3
"""Generate a table of ordinates of nontrivial Riemann zeta zeros.

Writes a plain-text file (one ascending ordinate per line, '#' comments)
suitable for goldbach_averages.zeros.load_zero_table.  Zeros are located by
sign changes of the Riemann-Siegel Z function:

  1. coarse scan + bisection with a vectorized numpy Z (main sum plus the
     leading correction term; theta evaluated exactly via loggamma),
  2. every zero polished with mpmath's double-precision siegelz (observed
     accurate to ~1e-13 against published ordinates),
  3. block-exact count audit against mpmath.mp.nzeros, so missed or
     spurious zeros in any block trigger a fine mpmath rescan.

Single-core runtime for 100000 zeros is roughly 15 minutes, dominated by
the mpmath polish stage.

Usage:
    python scripts/generate_zero_table.py --count 100000 --out data/zeta_zeros_100k.txt
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np
from scipy.optimize import brentq
from scipy.special import loggamma

import mpmath
from mpmath import fp, mp

TWO_PI = 2.0 * math.pi

# First ten ordinates, published to 9+ decimals; used as a hard self-check.
KNOWN_FIRST_10 = [
    14.134725141734693,
    21.022039638771555,
    25.010857580145688,
    30.424876125859513,
    32.935061587739190,
    37.586178158825671,
    40.918719012147495,
    43.327073280914999,
    48.005150881167159,
    49.773832477672302,
]


def theta(t: np.ndarray) -> np.ndarray:
    """Riemann-Siegel theta, exact via the log-gamma function."""
    t = np.asarray(t, dtype=float)
    return np.imag(loggamma(0.25 + 0.5j * t)) - 0.5 * t * math.log(math.pi)


def rs_z(t: np.ndarray) -> np.ndarray:
    """Riemann-Siegel Z(t), main sum plus leading correction term.

    Good to ~1e-4 absolute near t ~ 1e5 and much better at small t; only
    used for bracketing, every zero is later polished with mpmath.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tau = np.sqrt(t / TWO_PI)
    nu = np.floor(tau).astype(np.int64)
    th = theta(t)
    z = np.zeros_like(t)
    nmax = int(nu.max())
    for n in range(1, nmax + 1):
        mask = nu >= n
        if not mask.any():
            break
        z[mask] += np.cos(th[mask] - t[mask] * math.log(n)) / math.sqrt(n)
    z *= 2.0
    # leading remainder term; nudge p off the removable singularities of C0
    p = tau - nu
    c = np.cos(TWO_PI * p)
    bad = np.abs(c) < 1e-6
    p = np.where(bad, p + 1e-6, p)
    c = np.where(bad, np.cos(TWO_PI * p), c)
    c0 = np.cos(TWO_PI * (p * p - p - 0.0625)) / c
    z += np.where(nu % 2 == 1, 1.0, -1.0) * (t / TWO_PI) ** -0.25 * c0
    return z


def mean_gap(t: float) -> float:
    return TWO_PI / math.log(max(t, 20.0) / TWO_PI)


def coarse_zeros(target: int) -> list[float]:
    """Scan upward from t=14 until `target` sign changes are bracketed.

    Each chunk covers a bounded t-span and its grid step is an eighth of
    the mean zero gap at the chunk *end*, so the step is always finer than
    the local mean gap everywhere inside the chunk.
    """
    zeros: list[float] = []
    t0 = 14.0
    span = 2000.0
    while len(zeros) < target:
        t1 = t0 + span
        step = mean_gap(t1) / 8.0
        npts = int(math.ceil((t1 - t0) / step)) + 1
        grid = np.linspace(t0, t1, npts)
        z = rs_z(grid)
        sign = np.sign(z)
        idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
        lo = grid[idx].copy()
        hi = grid[idx + 1].copy()
        # vectorized bisection on the numpy Z
        zlo = rs_z(lo)
        for _ in range(22):
            mid = 0.5 * (lo + hi)
            zm = rs_z(mid)
            left = zlo * zm <= 0
            hi = np.where(left, mid, hi)
            lo = np.where(left, lo, mid)
            zlo = np.where(left, zlo, zm)
        zeros.extend((0.5 * (lo + hi)).tolist())
        t0 = t1
        print(f"  scanned to t={t0:.1f}, {len(zeros)} zeros bracketed", file=sys.stderr)
    return zeros


def fp_z(t: float) -> float:
    return float(fp.siegelz(t))


def polish(zeros: list[float]) -> list[float]:
    """Refine each bracketed zero with mpmath's siegelz via brentq."""
    out = []
    n = len(zeros)
    t_start = time.time()
    for i, c in enumerate(zeros):
        left = 0.5 * (zeros[i - 1] + c) if i > 0 else c - 0.5
        right = 0.5 * (c + zeros[i + 1]) if i < n - 1 else c + 0.5
        w = 2e-3
        a, b = max(c - w, left), min(c + w, right)
        fa, fb = fp_z(a), fp_z(b)
        while fa * fb > 0 and (a > left or b < right):
            w *= 4.0
            a, b = max(c - w, left), min(c + w, right)
            fa, fb = fp_z(a), fp_z(b)
        if fa * fb > 0:
            raise RuntimeError(f"lost sign change near t={c}")
        out.append(brentq(fp_z, a, b, xtol=1e-11, rtol=8.9e-16))
        if (i + 1) % 10000 == 0:
            rate = (i + 1) / (time.time() - t_start)
            print(f"  polished {i + 1}/{n} ({rate:.0f}/s)", file=sys.stderr)
    return out


_NZEROS_CACHE: dict[float, int] = {}


def nzeros_cached(t: float) -> int:
    if t not in _NZEROS_CACHE:
        _NZEROS_CACHE[t] = int(mp.nzeros(t))
    return _NZEROS_CACHE[t]


def fp_scan(a: float, b: float, npts: int) -> list[float]:
    """Exhaustive mpmath sign-change scan of [a, b] on npts grid points."""
    grid = np.linspace(a, b, npts)
    vals = np.array([fp_z(t) for t in grid])
    found = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        found.append(brentq(fp_z, grid[i], grid[i + 1], xtol=1e-11, rtol=8.9e-16))
    return found


def recover_missing(a: float, b: float, have: list[float]) -> list[float]:
    """Zeros in (a, b] absent from the sorted list `have`.

    Close pairs sit below the numpy Z error floor, so they are localized
    by exact-count bisection (mp.nzeros) and only the final sub-unit
    windows pay for a dense mpmath scan.
    """
    expected = nzeros_cached(b) - nzeros_cached(a)
    lo_i = np.searchsorted(have, a, side="right")
    hi_i = np.searchsorted(have, b, side="right")
    known = int(hi_i - lo_i)
    if known == expected:
        return []
    if known > expected:
        raise RuntimeError(
            f"({a:.6f}, {b:.6f}]: found {known} zeros but nzeros says {expected}"
        )
    if b - a <= 0.75:
        found = fp_scan(a, b, 1500)
        fresh = [
            z
            for z in found
            if a < z <= b
            and (
                lo_i == hi_i
                or min(abs(z - have[i]) for i in range(lo_i, hi_i)) > 1e-7
            )
        ]
        if known + len(fresh) != expected:
            raise RuntimeError(
                f"dense scan of ({a:.6f}, {b:.6f}] found {known}+{len(fresh)}"
                f" zeros, expected {expected}"
            )
        return fresh
    mid = 0.5 * (a + b)
    return recover_missing(a, mid, have) + recover_missing(mid, b, have)


def audit_blocks(zeros: list[float], block: int = 2000) -> list[float]:
    """Check the exact zero count in each block against mp.nzeros.

    Blocks that come up short are repaired by count-guided bisection, so
    only narrow windows around genuinely missed zeros are rescanned.
    """
    zeros = sorted(zeros)
    result: list[float] = []
    prev_t = 14.0
    prev_count = nzeros_cached(prev_t)
    for start in range(0, len(zeros), block):
        chunk = zeros[start : start + block]
        hi_t = chunk[-1] + 1e-6
        count = nzeros_cached(hi_t)
        expected = prev_count + len(chunk)
        if count != expected:
            print(
                f"  block ending {hi_t:.3f}: found {expected}, nzeros says {count}; recovering",
                file=sys.stderr,
            )
            extra = recover_missing(prev_t, hi_t, chunk)
            chunk = sorted(chunk + extra)
        result.extend(chunk)
        prev_t = hi_t
        prev_count = count
    return result


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100_000)
    ap.add_argument("--out", default="data/zeta_zeros_100k.txt")
    args = ap.parse_args()

    checkpoint = "/tmp/zeros_polished.npy"
    if os.path.exists(checkpoint):
        zeros = np.load(checkpoint).tolist()
        print(f"loaded {len(zeros)} polished zeros from checkpoint", file=sys.stderr)
    else:
        print("coarse scan...", file=sys.stderr)
        zeros = coarse_zeros(args.count + 8)
        print("mpmath polish...", file=sys.stderr)
        zeros = polish(zeros)
        np.save(checkpoint, np.array(zeros))

    print("block count audit...", file=sys.stderr)
    zeros = audit_blocks(zeros)
    zeros = sorted(zeros)[: args.count]

    errs = [abs(zeros[i] - KNOWN_FIRST_10[i]) for i in range(10)]
    if max(errs) > 2e-9:
        raise RuntimeError(f"first-10 ordinate check failed: max err {max(errs):.3g}")
    gaps = np.diff(np.array(zeros))
    if gaps.min() <= 1e-6:
        raise RuntimeError(f"suspicious minimum gap {gaps.min():.3g}")
    height = zeros[-1]
    total = int(mp.nzeros(height + 1e-6))
    if total != len(zeros):
        raise RuntimeError(f"final count {len(zeros)} != nzeros {total}")

    with open(args.out, "w", encoding="ascii") as f:
        f.write("# ordinates of nontrivial Riemann zeta zeros (critical line, gamma > 0)\n")
        f.write("# generated by scripts/generate_zero_table.py (Riemann-Siegel sign scan,\n")
        f.write("# polished with mpmath siegelz; per-block counts audited with mpmath nzeros)\n")
        f.write(f"# count={len(zeros)} height={height:.9f}\n")
        for g in zeros:
            f.write(f"{g:.9f}\n")
    print(f"wrote {len(zeros)} ordinates up to {height:.3f} -> {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
