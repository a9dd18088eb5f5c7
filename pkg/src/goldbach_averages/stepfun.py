"""Exact integration of squared piecewise-constant step functions.

The moment integrals in this package all have integrands of the form
|f(x)|^2 where f is a finite sum of jump events: f(x) = sum of deltas whose
position is <= x.  Between consecutive event positions f is constant, so
the integral over any window is an exact finite sum of |value|^2 * length
terms; the only rounding is in the complex cumulative sums and the final
exactly rounded accumulation.
"""

from __future__ import annotations

import math

import numpy as np

from .arithmetic import compensated_cumsum


def step_square_integral(
    positions: np.ndarray,
    deltas: np.ndarray,
    x_lo: float,
    x_hi: float,
    initial: complex = 0j,
) -> float:
    """Integral of |f|^2 over [x_lo, x_hi] for a jump function f.

    f(x) = initial + sum of deltas[i] over positions[i] <= x.  Events at or
    below x_lo fold into the starting value; events at or beyond x_hi
    cannot affect the integral and are dropped.  Coincident events produce
    zero-length segments, so their ordering never changes the result.
    """
    if x_hi <= x_lo:
        return 0.0
    positions = np.asarray(positions, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.complex128)
    if positions.shape != deltas.shape:
        raise ValueError("positions and deltas must have matching shapes")

    start = complex(initial)
    before = positions <= x_lo
    if before.any():
        start += complex(np.sum(deltas[before]))
    keep = ~before & (positions < x_hi)
    pos = positions[keep]
    del_ = deltas[keep]
    if len(pos) == 0:
        return abs(start) ** 2 * (x_hi - x_lo)

    order = np.argsort(pos, kind="stable")
    pos = pos[order]
    del_ = del_[order]
    values = start + compensated_cumsum(del_)
    boundaries = np.concatenate(([x_lo], pos, [x_hi]))
    lengths = np.diff(boundaries)
    sq = np.empty(len(lengths), dtype=np.float64)
    sq[0] = abs(start) ** 2
    sq[1:] = values.real**2 + values.imag**2
    return math.fsum(sq * lengths)


def prefix_square_integral(
    positions: np.ndarray, deltas: np.ndarray, x_hi: float
) -> float:
    """Integral over [0, x_hi] of the squared running prefix sum."""
    return step_square_integral(positions, deltas, 0.0, x_hi)


def window_square_integral(
    positions: np.ndarray,
    deltas: np.ndarray,
    h: float,
    x_lo: float,
    x_hi: float,
) -> float:
    """Integral of |sum over x < n <= x + h of weights|^2 over [x_lo, x_hi].

    Each event n with weight w contributes w while x is in [n - h, n), so
    it enters at position n - h and exits (cancels) at n.
    """
    if h < 0:
        raise ValueError(f"window width h must be >= 0, got {h}")
    positions = np.asarray(positions, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.complex128)
    events = np.concatenate((positions - h, positions))
    signed = np.concatenate((deltas, -deltas))
    return step_square_integral(events, signed, x_lo, x_hi)
