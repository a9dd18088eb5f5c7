"""Circle-method series, kernels, quadrature, and window transfer checks."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from goldbach_averages import (
    CirclePoint,
    SeriesCutoff,
    build_character_group,
    character_average_defect,
    character_pair_average,
    coprime_pair_series,
    default_cutoff,
    dyadic_window_widths,
    fq_series,
    kernel_inverse,
    kernel_inverse_direct,
    kernel_l1,
    principal_series_defect,
    psi_series,
    psi_series_tail_bound,
    psi_series_twisted,
    quadrature_identity,
    split_moments,
    window_l2_ratio,
)

E = math.e


def test_point_alpha_normalization():
    assert CirclePoint(8, 0.75).alpha == -0.25
    assert CirclePoint(8, -0.5).alpha == 0.5
    assert CirclePoint(8, 0.5).alpha == 0.5
    assert CirclePoint(8, 1.0).alpha == 0.0
    assert CirclePoint(8, -1.25).alpha == -0.25


def test_point_geometry():
    p = CirclePoint(20, 0.3)
    assert p.r == math.exp(-1.0 / 20)
    assert p.z == pytest.approx(cmath.exp(p.log_z), abs=0)
    assert abs(p.z) == pytest.approx(p.r, rel=1e-15)
    with pytest.raises(ValueError):
        CirclePoint(0, 0.1)


def test_default_cutoff():
    c = default_cutoff(16)
    assert c.n_cut == math.ceil(16 * math.log(1e18))
    c.validate(16)
    with pytest.raises(ValueError):
        c.validate(17)
    with pytest.raises(ValueError):
        default_cutoff(0)


def _brute_psi_series(table, point, cutoff, chi=None):
    log_z = point.log_z
    total = 0j
    for n in range(2, cutoff.n_cut + 1):
        lam = table.values[n]
        if lam == 0.0:
            continue
        w = chi(n) if chi else 1.0
        total += w * lam * cmath.exp(n * log_z)
    return total


def test_psi_series_brute_force(table20k):
    cutoff = default_cutoff(16)
    for alpha in (0.0, 0.3, -0.45):
        point = CirclePoint(16, alpha)
        got = psi_series(table20k, point, cutoff)
        want = _brute_psi_series(table20k, point, cutoff)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_twisted_series_brute_force(table20k):
    group = build_character_group(5)
    cutoff = default_cutoff(12)
    point = CirclePoint(12, 0.27)
    got = psi_series_twisted(table20k, group, 2, point, cutoff)
    want = _brute_psi_series(
        table20k, point, cutoff, chi=lambda n: group.evaluate(2, n)
    )
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_twisted_series_trivial_modulus_is_plain(table20k):
    group = build_character_group(1)
    cutoff = default_cutoff(10)
    point = CirclePoint(10, 0.41)
    assert psi_series_twisted(table20k, group, 0, point, cutoff) == psi_series(
        table20k, point, cutoff
    )


def test_series_tail_bound_dominates_actual_tail(table20k):
    n = 12
    cutoff = SeriesCutoff(n_cut=300, epsilon_tail=math.exp(-300 / n))
    point = CirclePoint(n, 0.0)
    bound = psi_series_tail_bound(point, cutoff)
    actual = sum(
        table20k.values[m] * point.r**m for m in range(301, 20_001)
    )
    assert actual <= bound
    # Default cutoff leaves mass far below round-off.
    assert psi_series_tail_bound(CirclePoint(64, 0.0), default_cutoff(64)) < 1e-10


def test_cutoff_validation_enforced(table20k):
    with pytest.raises(ValueError, match="tail weight"):
        psi_series(table20k, CirclePoint(400, 0.1), SeriesCutoff(n_cut=100))


def test_kernel_two_path():
    for n in (5, 50, 333):
        for alpha in (0.0, 0.5, 0.123, -0.499, 1.0 / 3.0):
            point = CirclePoint(n, alpha)
            a = kernel_inverse(point)
            b = kernel_inverse_direct(point)
            assert a == pytest.approx(b, rel=1e-10, abs=1e-10)


def test_kernel_at_center_is_exponential_sum():
    n = 24
    want = math.fsum(math.exp(k / n) for k in range(1, n + 1))
    got = kernel_inverse(CirclePoint(n, 0.0))
    assert got.imag == pytest.approx(0.0, abs=1e-12)
    assert got.real == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_kernel_pointwise_bound(n):
    alphas = (np.arange(2001) + 0.5) / 2001 - 0.5
    for alpha in alphas[::40]:
        point = CirclePoint(n, float(alpha))
        bound = E * min(n, 1.0 / abs(point.alpha)) if point.alpha else E * n
        assert abs(kernel_inverse(point)) <= bound * (1 + 1e-12)


def test_kernel_l1_budget():
    for n in (16, 256):
        budget = 2 * E * (1 + math.log(n / 2))
        assert kernel_l1(n) <= budget
    with pytest.raises(ValueError):
        kernel_l1(0)


def test_quadrature_identity_exact(table20k):
    for n in (8, 16, 32):
        for q in (1, 2, 3, n):
            assert quadrature_identity(table20k, q, n) <= 1e-8


def test_quadrature_domain(table20k):
    with pytest.raises(ValueError):
        quadrature_identity(table20k, 0, 16)
    with pytest.raises(ValueError):
        quadrature_identity(table20k, 17, 16)
    with pytest.raises(ValueError, match="direct-route cap"):
        quadrature_identity(table20k, 1, 500)


def test_orthogonality_regrouping(table20k):
    # Character average and residue-pair sum are the same finite sum.
    for q in (3, 8, 12):
        group = build_character_group(q)
        cutoff = default_cutoff(16)
        for alpha in (0.0, 0.37, -1.0 / 3.0):
            point = CirclePoint(16, alpha)
            avg = character_pair_average(table20k, group, point, cutoff)
            pairs = coprime_pair_series(table20k, q, point, cutoff)
            assert abs(avg - pairs) <= 1e-11


def test_character_average_defect_runs_audit(table20k, series2k):
    group = build_character_group(6)
    point = CirclePoint(16, 0.21)
    defect, budget = character_average_defect(
        table20k, group, point, default_cutoff(16), series=series2k
    )
    assert defect >= 0.0
    assert budget == pytest.approx((math.log(16) * math.log(6)) ** 2)
    with pytest.raises(ValueError):
        character_average_defect(
            table20k, build_character_group(1), point, default_cutoff(16)
        )


def test_principal_defect_is_shared_factor_subseries(table20k):
    q, n = 6, 16
    group = build_character_group(q)
    cutoff = default_cutoff(n)
    point = CirclePoint(n, 0.21)
    defect, budget = principal_series_defect(table20k, group, point, cutoff)
    want = abs(
        sum(
            table20k.values[m] * cmath.exp(m * point.log_z)
            for m in range(2, cutoff.n_cut + 1)
            if math.gcd(m, q) > 1 and table20k.values[m]
        )
    )
    assert defect == pytest.approx(want, rel=1e-10, abs=1e-12)
    assert budget == pytest.approx(math.log(n) * math.log(q))


def test_fq_series_brute_force(table20k, series2k):
    q, n = 3, 8
    cutoff = default_cutoff(n)
    point = CirclePoint(n, 0.13)
    got = fq_series(table20k, q, point, cutoff, series=series2k)
    want = sum(
        float(series2k.psi2[m]) * cmath.exp(m * point.log_z)
        for m in range(q, cutoff.n_cut + 1, q)
    )
    assert got == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_fq_series_coverage(table20k, series2k):
    with pytest.raises(ValueError, match="covers"):
        fq_series(table20k, 3, CirclePoint(64, 0.1), default_cutoff(64),
                  series=series2k)


def test_window_ratio_single_spike_is_one():
    ratio = window_l2_ratio(np.array([5]), np.array([2 + 1j]), 3.0)
    assert ratio == pytest.approx(1.0, abs=1e-9)


def test_window_ratio_edge_cases():
    assert window_l2_ratio(np.array([], dtype=int), np.array([]), 2.0) == 0.0
    assert window_l2_ratio(np.array([3]), np.array([0.0]), 2.0) == 0.0
    with pytest.raises(ValueError):
        window_l2_ratio(np.array([1]), np.array([1.0]), 0.0)
    with pytest.raises(ValueError):
        window_l2_ratio(np.array([1, 2]), np.array([1.0]), 1.0)


def test_window_ratio_stable_under_refinement():
    rng = np.random.default_rng(23)
    support = np.arange(64)
    coeffs = rng.normal(size=64) + 1j * rng.normal(size=64)
    r1 = window_l2_ratio(support, coeffs, 4.0, nodes=4096)
    r2 = window_l2_ratio(support, coeffs, 4.0, nodes=8192)
    assert r2 != 0.0
    assert abs(r1 - r2) <= 0.05 * abs(r2)


def test_dyadic_widths():
    assert dyadic_window_widths(128) == [32.0, 16.0, 8.0, 4.0, 2.0, 1.0]
    assert dyadic_window_widths(4) == [1.0]
    assert dyadic_window_widths(6) == [1.5]
    with pytest.raises(ValueError):
        dyadic_window_widths(3)


def test_split_moments_head_budget(table20k):
    group = build_character_group(3)
    for h in dyadic_window_widths(64):
        sm = split_moments(table20k, group, 1, 64, h)
        assert sm.head <= sm.head_budget * (1 + 1e-12)
        assert sm.window >= 0.0
        assert sm.tail_bound >= 0.0
        assert sm.window_budget > 0.0


def test_split_moments_head_brute(table20k):
    group = build_character_group(3)
    n, h = 64, 16.0
    sm = split_moments(table20k, group, 1, n, h)
    width = 0.5
    total = 0.0
    for k in range(int(h / width)):
        mid = (k + 0.5) * width
        val = sum(
            group.evaluate(1, m) * table20k.values[m] * math.exp(-m / n)
            for m in range(2, int(mid) + 1)
        )
        total += abs(val) ** 2 * width
    assert sm.head == pytest.approx(total, rel=1e-12, abs=1e-12)


def test_split_moments_domain(table20k):
    group = build_character_group(3)
    with pytest.raises(ValueError):
        split_moments(table20k, group, 1, 64, 0.0)
    with pytest.raises(ValueError):
        split_moments(table20k, group, 1, 64, 65.0)
    with pytest.raises(ValueError, match="covers"):
        split_moments(table20k, group, 1, 2000, 8.0)
