"""Exact integrals of squared step functions."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldbach_averages.stepfun import (
    prefix_square_integral,
    step_square_integral,
    window_square_integral,
)


def test_single_jump():
    # f = 0 on [0,3), 2 on [3,10): integral of |f|^2 is 4*7.
    assert step_square_integral([3.0], [2.0], 0.0, 10.0) == 28.0


def test_two_jumps_cancel():
    got = step_square_integral([1.0, 4.0], [1 + 1j, -(1 + 1j)], 0.0, 10.0)
    assert got == pytest.approx(2.0 * 3.0, abs=1e-14)


def test_initial_value_and_folding():
    # Events at or below x_lo fold into the start value.
    got = step_square_integral([0.5, 2.0], [3.0, -1.0], 1.0, 4.0, initial=1.0)
    # value is 4 on [1,2), 3 on [2,4): 16*1 + 9*2
    assert got == pytest.approx(34.0, abs=1e-12)


def test_events_beyond_range_ignored():
    a = step_square_integral([2.0, 99.0], [1.0, 5.0], 0.0, 3.0)
    b = step_square_integral([2.0], [1.0], 0.0, 3.0)
    assert a == b == 1.0


def test_empty_and_degenerate():
    assert step_square_integral([], [], 0.0, 5.0) == 0.0
    assert step_square_integral([1.0], [1.0], 3.0, 3.0) == 0.0
    assert step_square_integral([1.0], [1.0], 5.0, 3.0) == 0.0


def test_shape_mismatch():
    with pytest.raises(ValueError):
        step_square_integral([1.0, 2.0], [1.0], 0.0, 5.0)


def test_prefix_is_zero_based():
    assert prefix_square_integral([2.0], [1.0], 5.0) == 3.0


def test_window_single_event():
    # One unit weight at n=10, width h=4: active on [6, 10).
    assert window_square_integral([10.0], [1.0], 4.0, 0.0, 20.0) == pytest.approx(
        4.0, abs=1e-14
    )


def test_window_negative_width_rejected():
    with pytest.raises(ValueError):
        window_square_integral([1.0], [1.0], -1.0, 0.0, 5.0)


def _brute_square_integral(positions, deltas, x_lo, x_hi, initial=0j):
    """O(n^2) reference: evaluate f at each midpoint of the breakpoint mesh."""
    cuts = sorted({x_lo, x_hi, *[p for p in positions if x_lo < p < x_hi]})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        val = complex(initial) + sum(
            d for p, d in zip(positions, deltas) if p <= mid
        )
        total += abs(val) ** 2 * (b - a)
    return total


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.integers(min_value=0, max_value=160),  # position in eighths
            st.floats(min_value=-4, max_value=4, allow_nan=False),
            st.floats(min_value=-4, max_value=4, allow_nan=False),
        ),
        min_size=0,
        max_size=25,
    ),
    st.integers(min_value=0, max_value=80),
    st.integers(min_value=81, max_value=170),
)
def test_matches_brute_force(events, lo8, hi8):
    positions = np.array([e[0] / 8 for e in events])
    deltas = np.array([complex(e[1], e[2]) for e in events])
    x_lo, x_hi = lo8 / 8, hi8 / 8
    got = step_square_integral(positions, deltas, x_lo, x_hi, initial=1 - 1j)
    want = _brute_square_integral(positions, deltas, x_lo, x_hi, initial=1 - 1j)
    assert got == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_window_matches_brute_force():
    rng = np.random.default_rng(17)
    positions = rng.integers(1, 200, size=30) / 4.0
    deltas = rng.normal(size=30) + 1j * rng.normal(size=30)
    for h in (0.25, 1.5, 7.0):
        got = window_square_integral(positions, deltas, h, 0.0, 60.0)
        events = np.concatenate((positions - h, positions))
        signed = np.concatenate((deltas, -deltas))
        want = _brute_square_integral(events, signed, 0.0, 60.0)
        assert got == pytest.approx(want, rel=1e-11, abs=1e-11)


def test_coincident_events_order_independent():
    # Enter/exit at identical positions: zero-length segments contribute 0.
    got = step_square_integral(
        [2.0, 2.0, 2.0], [5.0, -5.0, 1.0], 0.0, 4.0
    )
    assert got == pytest.approx(1.0 * 2.0, abs=1e-14)
