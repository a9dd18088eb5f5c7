"""Zero-table parsing and the truncated explicit-formula sum."""

from __future__ import annotations

import cmath
import io
import math

import numpy as np
import pytest

from goldbach_averages import (
    ZeroTable,
    ZeroTableParseError,
    explicit_formula_residual,
    explicit_formula_residual_multiples,
    explicit_formula_sum,
    goldbach_average,
    load_zero_table,
    truncation_tail_bound,
)


def _table(*ordinates):
    return ZeroTable(
        ordinates=np.asarray(ordinates, dtype=np.float64), source_id="synthetic"
    )


def test_load_with_comments_and_blanks(tmp_path):
    path = tmp_path / "zeros.txt"
    path.write_text("# header\n\n14.134725\n21.022040  # second\n\n25.010858\n")
    table = load_zero_table(path)
    assert len(table) == 3
    assert table.height == pytest.approx(25.010858)
    assert table.source_id == str(path)


def test_load_from_file_object():
    table = load_zero_table(io.StringIO("15.5\n16.5\n"), source_id="mem")
    assert table.source_id == "mem"
    assert list(table.ordinates) == [15.5, 16.5]


def test_parse_error_reports_line_number(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("14.2\n15.0\nnot-a-zero\n")
    with pytest.raises(ZeroTableParseError, match=":3:"):
        load_zero_table(path)


def test_rejects_low_ordinates():
    with pytest.raises(ZeroTableParseError, match=":1:"):
        load_zero_table(io.StringIO("13.9\n"))


def test_rejects_descending_and_duplicates():
    with pytest.raises(ZeroTableParseError, match="ascending"):
        load_zero_table(io.StringIO("20.0\n19.0\n"))
    with pytest.raises(ZeroTableParseError, match="ascending"):
        load_zero_table(io.StringIO("20.0\n20.0\n"))


def test_rejects_empty():
    with pytest.raises(ZeroTableParseError, match="no ordinates"):
        load_zero_table(io.StringIO("# only comments\n"))


def test_rejects_non_finite():
    with pytest.raises(ZeroTableParseError):
        load_zero_table(io.StringIO("inf\n"))


def _complex_route(ordinates, n):
    """Independent oracle: sum conjugate zero pairs in full complex arithmetic.

    Each ordinate contributes 2 * (w + w_bar) with
    w = N^{rho+1} / (rho (rho+1)) at rho = 1/2 + i*gamma, evaluated with
    cmath.exp and explicit complex division; w_bar comes from the
    conjugate zero computed separately rather than by symmetry.
    """
    log_n = math.log(n)
    total = 0.0
    for g in ordinates:
        rho = 0.5 + 1j * g
        w = cmath.exp((rho + 1) * log_n) / (rho * (rho + 1))
        rho_bar = 0.5 - 1j * g
        w_bar = cmath.exp((rho_bar + 1) * log_n) / (rho_bar * (rho_bar + 1))
        pair = w + w_bar
        # Conjugate pairing cancels the imaginary part to rounding error.
        assert abs(pair.imag) <= 1e-12 * max(1.0, abs(pair))
        total += 2.0 * pair.real
    return total


def test_sum_matches_complex_route():
    zeros = _table(15.0, 20.0, 27.25)
    for n in (10, 100, 12345):
        got = explicit_formula_sum(zeros, n, 27.25)
        want = _complex_route(zeros.ordinates, n)
        assert got == pytest.approx(want, rel=1e-12)


def test_sum_respects_cutoff():
    zeros = _table(15.0, 20.0, 27.25)
    partial = explicit_formula_sum(zeros, 50, 20.0)
    want = _complex_route([15.0, 20.0], 50)
    assert partial == pytest.approx(want, rel=1e-12)
    assert explicit_formula_sum(zeros, 50, 14.9) == 0.0


def test_sum_rejects_cutoff_above_height():
    zeros = _table(15.0, 20.0)
    with pytest.raises(ValueError, match="height"):
        explicit_formula_sum(zeros, 50, 21.0)
    with pytest.raises(ValueError):
        explicit_formula_sum(zeros, 3, 20.0)


def test_tail_bound_formula():
    zeros = _table(15.0, 20.0, 30.0)
    n = 100.0
    got = truncation_tail_bound(zeros, n, 18.0)
    in_table = math.fsum(
        1.0 / math.sqrt((0.25 + g * g) * (2.25 + g * g)) for g in (20.0, 30.0)
    )
    beyond = (math.log(30.0 / (2 * math.pi)) + 1.0) / (2 * math.pi * 30.0)
    assert got == pytest.approx(4.0 * n**1.5 * (in_table + beyond), rel=1e-14)


def test_tail_bound_monotone_in_cutoff():
    zeros = _table(15.0, 20.0, 25.0, 30.0, 44.0)
    bounds = [truncation_tail_bound(zeros, 1000, t) for t in (15, 21, 26, 44)]
    assert all(a > b for a, b in zip(bounds, bounds[1:]))


def test_tail_bound_rejects_low_cutoff():
    zeros = _table(15.0, 20.0)
    with pytest.raises(ValueError, match="first ordinate"):
        truncation_tail_bound(zeros, 100, 14.5)


def test_truncation_error_within_tail_bound(zeros_path):
    # Dropping zeros between T and the table height changes the sum by at
    # most the claimed tail bound.
    table = load_zero_table(zeros_path)
    for n in (1000, 50_000):
        full = explicit_formula_sum(table, n, table.height)
        for t_cut in (100.0, 1000.0, 10_000.0):
            partial = explicit_formula_sum(table, n, t_cut)
            assert abs(full - partial) <= truncation_tail_bound(table, n, t_cut)


def test_residual_definitions(series2k, zeros_path):
    table = load_zero_table(zeros_path)
    n, t_cut = 1500, 5000.0
    r = explicit_formula_residual(series2k, table, n, t_cut)
    s = explicit_formula_sum(table, n, t_cut)
    assert r == pytest.approx(
        goldbach_average(series2k, n) - 0.5 * n * n + s, abs=1e-9
    )
    r1 = explicit_formula_residual_multiples(series2k, table, 1, n, t_cut)
    assert r1 == pytest.approx(r, abs=1e-9)


def test_zero_sum_shrinks_residual_in_aggregate(series100k, zeros_path):
    # Pointwise the zero sum can lose (|G - N^2/2| is accidentally tiny at
    # some N), but in RMS over a geometric grid it must win, and the
    # scaled residual |R|/N^{3/2} must decay across the grid.
    import numpy as np

    table = load_zero_table(zeros_path)
    grid = [int(n) for n in np.geomspace(1000, 100_000, 16)]
    plains, residuals = [], []
    for n in grid:
        g = goldbach_average(series100k, n)
        plains.append(abs(g - 0.5 * n * n))
        residuals.append(
            abs(explicit_formula_residual(series100k, table, n, table.height))
        )
    rms = lambda xs: math.sqrt(sum(x * x for x in xs) / len(xs))  # noqa: E731
    assert rms(residuals) < rms(plains)
    scaled = [r / n**1.5 for r, n in zip(residuals, grid)]
    assert max(scaled[-4:]) < min(scaled[:4])
