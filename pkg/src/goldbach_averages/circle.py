"""Circle-method generating functions on the shrinking circle |z| = e^{-1/N}.

Everything here lives at z = e^{-1/N} e(alpha): the weighted series
Psi(z) = sum Lambda(n) z^n, its twists by Dirichlet characters, the
multiples-of-q Goldbach series F_q(z) = sum_{q | n} psi2(n) z^n, and the
finite geometric kernel I_N(1/z) whose quadrature against F_q recovers the
cumulative average G_q(N) exactly.  Series are truncated at an explicit
cutoff with |z|^n_cut <= epsilon_tail, so truncation is an accounted-for
design quantity rather than silent error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arithmetic import VonMangoldtTable, compensated_cumsum
from .characters import (
    CharacterGroup,
    increment_second_moment,
    psi_second_moment,
)
from .counts import (
    DIRECT_LIMIT,
    Psi2Series,
    goldbach_average_multiples,
    psi2_direct,
    psi2_fast,
)
from .stepfun import step_square_integral, window_square_integral


@dataclass(frozen=True)
class CirclePoint:
    """A point z = r e(alpha) with r = e^{-1/N} tied to the average length N.

    alpha is normalized into (-1/2, 1/2]; the radius never varies
    independently of N.
    """

    n: int
    alpha: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"N must be >= 1, got {self.n}")
        a = math.fmod(self.alpha, 1.0)
        if a > 0.5:
            a -= 1.0
        elif a <= -0.5:
            a += 1.0
        object.__setattr__(self, "alpha", a)

    @property
    def r(self) -> float:
        return math.exp(-1.0 / self.n)

    @property
    def log_z(self) -> complex:
        """log z = -1/N + 2 pi i alpha, the exact exponent used everywhere."""
        return complex(-1.0 / self.n, 2.0 * math.pi * self.alpha)

    @property
    def z(self) -> complex:
        return _cexp(self.log_z)


@dataclass(frozen=True)
class SeriesCutoff:
    """Truncation point n_cut with guaranteed tail weight epsilon_tail."""

    n_cut: int
    epsilon_tail: float = 1e-18

    def validate(self, n: int) -> None:
        """Check e^{-n_cut/N} <= epsilon_tail for circle parameter N."""
        if self.n_cut < n * math.log(1.0 / self.epsilon_tail):
            raise ValueError(
                f"n_cut={self.n_cut} leaves tail weight above "
                f"{self.epsilon_tail} at N={n}"
            )


def default_cutoff(n: int, epsilon_tail: float = 1e-18) -> SeriesCutoff:
    """Smallest cutoff with r^n_cut <= epsilon_tail at N = n (~41.4 N)."""
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    return SeriesCutoff(
        n_cut=math.ceil(n * math.log(1.0 / epsilon_tail)),
        epsilon_tail=epsilon_tail,
    )


def _cexp(w: complex) -> complex:
    return complex(
        math.exp(w.real) * math.cos(w.imag),
        math.exp(w.real) * math.sin(w.imag),
    )


def _cexpm1(w: complex) -> complex:
    """e^w - 1 without cancellation for small |w|."""
    x, y = w.real, w.imag
    s = math.sin(0.5 * y)
    return complex(
        math.expm1(x) * math.cos(y) - 2.0 * s * s,
        math.exp(x) * math.sin(y),
    )


def _powers(log_z: complex, exponents: np.ndarray) -> np.ndarray:
    """z^n for an integer exponent array, via exp(n log z)."""
    return np.exp(exponents.astype(np.float64) * log_z)


def _series_breakpoints(
    table: VonMangoldtTable, cutoff: SeriesCutoff
) -> np.ndarray:
    if cutoff.n_cut > table.n_max:
        raise ValueError(
            f"cutoff n_cut={cutoff.n_cut} exceeds table coverage "
            f"{table.n_max}"
        )
    return table.breakpoints[
        : int(np.searchsorted(table.breakpoints, cutoff.n_cut, side="right"))
    ]


def psi_series(
    table: VonMangoldtTable, point: CirclePoint, cutoff: SeriesCutoff
) -> complex:
    """Psi(z) = sum_{n <= n_cut} Lambda(n) z^n."""
    cutoff.validate(point.n)
    bp = _series_breakpoints(table, cutoff)
    terms = table.values[bp] * _powers(point.log_z, bp)
    return complex(compensated_cumsum(terms)[-1]) if len(terms) else 0j


def psi_series_tail_bound(point: CirclePoint, cutoff: SeriesCutoff) -> float:
    """Absolute bound on the discarded tail sum_{n > n_cut} Lambda(n) r^n.

    Uses Lambda(n) <= log n <= n and the closed form of sum n r^n; with the
    default cutoff this is ~1e-17 N^2, far below evaluation round-off.
    """
    r = point.r
    m = cutoff.n_cut
    one_minus_r = -math.expm1(-1.0 / point.n)
    return r ** (m + 1) * ((m + 1) * one_minus_r + r) / one_minus_r**2


def psi_series_twisted(
    table: VonMangoldtTable,
    group: CharacterGroup,
    j: int,
    point: CirclePoint,
    cutoff: SeriesCutoff,
) -> complex:
    """Psi(z, chi) = sum_{n <= n_cut} chi(n) Lambda(n) z^n."""
    cutoff.validate(point.n)
    bp = _series_breakpoints(table, cutoff)
    chi = group.value_table(j)[bp % group.q]
    terms = chi * table.values[bp] * _powers(point.log_z, bp)
    return complex(compensated_cumsum(terms)[-1]) if len(terms) else 0j


def fq_series(
    table: VonMangoldtTable,
    q: int,
    point: CirclePoint,
    cutoff: SeriesCutoff,
    series: Psi2Series | None = None,
) -> complex:
    """F_q(z) = sum over multiples n of q, n <= n_cut, of psi2(n) z^n.

    psi2 values come from `series` when supplied (it must cover n_cut);
    otherwise they are computed on the fly with the FFT route.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    cutoff.validate(point.n)
    if series is None:
        series = psi2_fast(table, cutoff.n_cut)
    elif series.n_max < cutoff.n_cut:
        raise ValueError(
            f"series covers {series.n_max} < cutoff {cutoff.n_cut}"
        )
    n = np.arange(q, cutoff.n_cut + 1, q, dtype=np.int64)
    if len(n) == 0:
        return 0j
    terms = series.psi2[n] * _powers(point.log_z, n)
    return complex(compensated_cumsum(terms)[-1])


def kernel_inverse(point: CirclePoint) -> complex:
    """I_N(1/z) = (1 - z^{-N}) / (z - 1), the finite geometric kernel.

    Magnitude facts used downstream: |I_N(1/z)| <= e N always, < e/|alpha|
    off the spike, hence <= e min(N, 1/|alpha|).
    """
    log_z = point.log_z
    z_minus_1 = _cexpm1(log_z)
    w = _cexp(-point.n * log_z)
    return (1.0 - w) / z_minus_1


def kernel_inverse_direct(point: CirclePoint) -> complex:
    """Reference evaluation of I_N(1/z) as the literal sum of z^{-n}."""
    n = np.arange(1, point.n + 1, dtype=np.int64)
    return complex(compensated_cumsum(_powers(-point.log_z, n))[-1])


def kernel_l1(
    n: int, rel_tol: float = 1e-3, max_nodes: int = 1 << 24
) -> float:
    """int_{-1/2}^{1/2} |I_N(1/z(alpha))| d alpha by refining midpoint rule.

    Doubles the node count until successive estimates agree to rel_tol.
    The integral is bounded by 2e(1 + log(N/2)) for N >= 4; callers check
    that budget, this routine just integrates.
    """
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    m = max(4 * n, 4096)
    prev = _kernel_l1_midpoint(n, m)
    while m <= max_nodes:
        m *= 2
        cur = _kernel_l1_midpoint(n, m)
        if abs(cur - prev) <= rel_tol * abs(cur):
            return cur
        prev = cur
    raise ArithmeticError(
        f"kernel L1 integral did not stabilize within {max_nodes} nodes"
    )


def _kernel_l1_midpoint(n: int, m: int) -> float:
    alphas = (np.arange(m) + 0.5) / m - 0.5
    log_z = -1.0 / n + 2j * math.pi * alphas
    z_minus_1 = np.expm1(log_z.real) * np.cos(log_z.imag) - 2.0 * np.sin(
        0.5 * log_z.imag
    ) ** 2 + 1j * np.exp(log_z.real) * np.sin(log_z.imag)
    w = np.exp(-n * log_z)
    vals = np.abs((1.0 - w) / z_minus_1)
    return float(np.mean(vals))


def quadrature_identity(
    table: VonMangoldtTable, q: int, n: int
) -> float:
    """Residual of the exact circle quadrature recovering G_q(N).

    Evaluates (1/M) sum_k F_q(z_k) I_N(1/z_k) over the M equispaced points
    z_k = r e(k/M) with M = 2(n_cut + N) + 1 and compares with G_q(N)
    computed from psi2 prefix sums.  With M beyond the bandwidth of the
    integrand the equispaced rule is exact, so the residual is pure
    floating-point noise.  Reference path: psi2 comes from the direct
    quadratic enumeration, so N is capped accordingly.
    """
    if n < 4:
        raise ValueError(f"N must be >= 4, got {n}")
    if not 1 <= q <= n:
        raise ValueError(f"q must lie in [1, N], got q={q}, N={n}")
    cutoff = default_cutoff(n)
    if cutoff.n_cut > DIRECT_LIMIT:
        raise ValueError(
            f"N={n} needs n_cut={cutoff.n_cut} beyond the direct-route cap "
            f"{DIRECT_LIMIT}; this identity check is a small-N reference"
        )
    series = psi2_direct(table, cutoff.n_cut)
    m_nodes = 2 * (cutoff.n_cut + n) + 1
    r = math.exp(-1.0 / n)

    idx = np.arange(q, cutoff.n_cut + 1, q, dtype=np.int64)
    coeff = np.zeros(m_nodes, dtype=np.complex128)
    coeff[idx] = series.psi2[idx] * r ** idx.astype(np.float64)
    f_vals = m_nodes * np.fft.ifft(coeff)

    k = np.arange(m_nodes)
    log_z = -1.0 / n + 2j * math.pi * (k / m_nodes)
    z_minus_1 = np.expm1(log_z.real) * np.cos(log_z.imag) - 2.0 * np.sin(
        0.5 * log_z.imag
    ) ** 2 + 1j * np.exp(log_z.real) * np.sin(log_z.imag)
    kernel = (1.0 - np.exp(-n * log_z)) / z_minus_1

    prod = f_vals * kernel
    integral = complex(
        math.fsum(prod.real) / m_nodes, math.fsum(prod.imag) / m_nodes
    )
    return abs(integral - goldbach_average_multiples(series, q, n))


def coprime_pair_series(
    table: VonMangoldtTable, q: int, point: CirclePoint, cutoff: SeriesCutoff
) -> complex:
    """sum over pairs m, m' <= n_cut with gcd(mm', q) = 1 and q | m + m'
    of Lambda(m) Lambda(m') z^{m+m'}.

    Evaluated by partitioning prime powers into residue classes mod q and
    pairing class a with class -a; no character machinery is involved, so
    this is the independent side of the orthogonality identity.
    """
    cutoff.validate(point.n)
    bp = _series_breakpoints(table, cutoff)
    coprime = np.gcd(bp, q) == 1
    bp = bp[coprime]
    terms = table.values[bp] * _powers(point.log_z, bp)
    residues = bp % q
    class_sums: dict[int, complex] = {}
    for a in np.unique(residues):
        sel = residues == a
        class_sums[int(a)] = complex(compensated_cumsum(terms[sel])[-1])
    total = 0j
    for a, p_a in class_sums.items():
        partner = class_sums.get((q - a) % q)
        if partner is not None:
            total += p_a * partner
    return total


def character_pair_average(
    table: VonMangoldtTable,
    group: CharacterGroup,
    point: CirclePoint,
    cutoff: SeriesCutoff,
) -> complex:
    """(1/phi(q)) sum over chi of chi(-1) Psi(z, chi) Psi(z, conj chi)."""
    q = group.q
    psi_values = [
        psi_series_twisted(table, group, j, point, cutoff)
        for j in range(group.n_characters)
    ]
    acc = 0j
    for j in range(group.n_characters):
        acc += (
            group.parity(j)
            * psi_values[j]
            * psi_values[group.conjugate_index(j)]
        )
    return acc / group.n_characters


#: Orthogonality identity tolerance: the character average and the
#: residue-class pair sum are the same finite sum regrouped, so they must
#: agree to accumulated round-off.
ORTHOGONALITY_TOL = 1e-10


def character_average_defect(
    table: VonMangoldtTable,
    group: CharacterGroup,
    point: CirclePoint,
    cutoff: SeriesCutoff,
    series: Psi2Series | None = None,
) -> tuple[float, float]:
    """|F_q(z) - character-average of twisted series products| and budget.

    The character average equals the coprime-pair double series exactly
    (orthogonality); both are evaluated and must agree to
    ORTHOGONALITY_TOL, else ArithmeticError.  The returned defect against
    F_q(z) collects exactly the pairs with gcd(mm', q) > 1 and is reported
    against the budget (log N log q)^2; the defect is recorded, not
    asserted.
    """
    q = group.q
    if q < 2:
        raise ValueError("character averaging needs q >= 2")
    average = character_pair_average(table, group, point, cutoff)
    pairs = coprime_pair_series(table, q, point, cutoff)
    if abs(average - pairs) > ORTHOGONALITY_TOL:
        raise ArithmeticError(
            f"orthogonality core violated at q={q}, N={point.n}, "
            f"alpha={point.alpha}: |avg - pairs| = {abs(average - pairs):.3e}"
        )
    f_q = fq_series(table, q, point, cutoff, series=series)
    budget = (math.log(point.n) * math.log(q)) ** 2
    return abs(f_q - average), budget


def principal_series_defect(
    table: VonMangoldtTable,
    group: CharacterGroup,
    point: CirclePoint,
    cutoff: SeriesCutoff,
) -> tuple[float, float]:
    """|Psi(z, chi_0) - Psi(z)| and its budget log N log q.

    The two series differ exactly on prime powers sharing a factor with q,
    so the defect is a short subseries; it is evaluated here as the
    literal difference of the two full series.
    """
    q = group.q
    principal = 0
    if not group.is_principal(principal):
        raise AssertionError("index 0 is always principal")
    defect = abs(
        psi_series_twisted(table, group, principal, point, cutoff)
        - psi_series(table, point, cutoff)
    )
    budget = math.log(max(point.n, 2)) * math.log(max(q, 2))
    return defect, budget


def window_l2_ratio(
    support: np.ndarray,
    coeffs: np.ndarray,
    h: float,
    nodes: int | None = None,
) -> float:
    """Ratio of a trigonometric L2 mass to its sliding-window counterpart.

    LHS = int_{-1/(2h)}^{1/(2h)} |S(alpha)|^2 d alpha for
    S(alpha) = sum c_n e(n alpha); RHS = (1/h^2) int_R
    |sum_{x < n <= x+h} c_n|^2 dx.  The transfer LHS <= C * RHS is the
    window inequality used to pass from circle integrals to moment
    integrals; this routine returns LHS/RHS so the constant is observable.
    Returns 0.0 when the coefficient mass vanishes.  A single spike gives
    exactly 1.  The RHS is an exact step-function integral; the LHS uses a
    midpoint rule with `nodes` points (default scales with the window
    oscillation count).
    """
    if h <= 0:
        raise ValueError(f"window width h must be > 0, got {h}")
    support = np.asarray(support, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if support.shape != coeffs.shape:
        raise ValueError("support and coeffs must have matching shapes")
    if len(support) == 0 or not np.any(coeffs):
        return 0.0

    lo, hi = float(support.min()), float(support.max())
    rhs = window_square_integral(
        support.astype(np.float64), coeffs, h, lo - h, hi
    ) / (h * h)
    if rhs == 0.0:
        return 0.0

    if nodes is None:
        oscillations = max(1.0, (hi - lo) / h)
        nodes = int(max(4096, math.ceil(32 * oscillations)))
    half = 0.5 / h
    alphas = -half + (np.arange(nodes) + 0.5) * (2.0 * half / nodes)
    phases = np.exp(2j * math.pi * np.outer(alphas, support.astype(np.float64)))
    s_vals = phases @ coeffs
    lhs = float(
        np.mean(s_vals.real**2 + s_vals.imag**2) * (2.0 * half)
    )
    return lhs / rhs


def dyadic_window_widths(n: int) -> list[float]:
    """All widths h = N / 2^{k+2} with k >= 0 and h >= 1."""
    if n < 4:
        raise ValueError(f"N must be >= 4, got {n}")
    out = []
    h = n / 4.0
    while h >= 1.0:
        out.append(h)
        h /= 2.0
    return out


@dataclass(frozen=True)
class SplitMoments:
    """Head/window decomposition of the weighted sliding-window L2 mass.

    head = int_0^h |sum_{n <= u} chi(n) Lambda(n) e^{-n/N}|^2 du
    window = int_0^tail_cut |sum_{x < n <= x+h} same weights|^2 dx

    head_budget = 3 J1(h) is a proven bound (head <= head_budget up to
    round-off whenever h <= N); window_budget is the dyadic-block
    comparison series whose ratio to `window` is recorded, not asserted.
    tail_bound estimates the window mass discarded beyond tail_cut.
    """

    q: int
    char_index: int
    n: int
    h: float
    head: float
    window: float
    head_budget: float
    window_budget: float
    tail_cut: float
    tail_bound: float


def split_moments(
    table: VonMangoldtTable,
    group: CharacterGroup,
    j: int,
    n: int,
    h: float,
) -> SplitMoments:
    """Exact head/window moments of the e^{-n/N}-weighted twisted sums.

    Requires 0 < h <= N and table coverage ~19N (the window integral is
    truncated where the weight makes further mass negligible; the discard
    is reported as tail_bound).
    """
    if n < 4:
        raise ValueError(f"N must be >= 4, got {n}")
    if not 0 < h <= n:
        raise ValueError(f"h must lie in (0, N], got h={h}")
    tail_cut = 18.5 * n
    if table.n_max < tail_cut + h:
        raise ValueError(
            f"table covers {table.n_max} < {tail_cut + h:.0f} needed for N={n}"
        )

    limit = math.floor(tail_cut + h)
    bp = table.breakpoints[
        : int(np.searchsorted(table.breakpoints, limit, side="right"))
    ]
    chi = group.value_table(j)[bp % group.q]
    weights = chi * table.values[bp] * np.exp(-bp.astype(np.float64) / n)
    positions = bp.astype(np.float64)

    head = step_square_integral(positions, weights, 0.0, float(h))
    window = window_square_integral(positions, weights, float(h), 0.0, tail_cut)

    head_budget = 3.0 * psi_second_moment(table, group, j, float(h))

    acc = 0.0
    block = 1
    while block * n + h <= table.n_max and block <= 64:
        j1_term = (h * h) / (n * n) * psi_second_moment(
            table, group, j, float(block * n)
        )
        j2_term = increment_second_moment(
            table, group, j, float(block * n), float(h)
        )
        term = 2.0**-block * (j1_term + j2_term)
        acc += term
        if block >= 2 and term < 1e-12 * acc:
            break
        block += 1

    count_bound = (h + 1.0) * math.log(tail_cut + h + 2.0)
    tail_bound = count_bound**2 * n * math.exp(-2.0 * tail_cut / n)

    return SplitMoments(
        q=group.q,
        char_index=j,
        n=n,
        h=float(h),
        head=head,
        window=window,
        head_budget=head_budget,
        window_budget=acc,
        tail_cut=tail_cut,
        tail_bound=tail_bound,
    )
