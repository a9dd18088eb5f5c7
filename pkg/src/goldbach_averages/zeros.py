"""Zeta-zero tables and explicit-formula evaluation.

The library never computes zeros itself; it ingests a plain-text table of
ordinates (imaginary parts gamma of zeros 1/2 + i*gamma on the critical
line, ascending) and evaluates the truncated explicit-formula sum

    S(N, T) = 4 N^{3/2} * sum_{0 < gamma <= T} Re[ e^{i gamma ln N}
                                                   / (rho (rho + 1)) ]

with rho = 1/2 + i*gamma, which is the oscillating correction to the main
term N^2/2 of the cumulative Goldbach average G(N).  Both conjugate zeros
are accounted for by taking twice the real part; the table stores gamma > 0
only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .counts import Psi2Series, goldbach_average, goldbach_average_multiples
from .arithmetic import euler_phi

TWO_PI = 2.0 * math.pi

#: Ordinate of the first nontrivial zero, rounded down; every valid table
#: entry must exceed this.
FIRST_ORDINATE_FLOOR = 14.0

#: Entries closer together than this are rejected as duplicates.
MIN_GAP = 1e-9


class ZeroTableParseError(ValueError):
    """A zero table failed validation; the message names the line."""


@dataclass(frozen=True)
class ZeroTable:
    """Ascending ordinates of critical-line zeros, gamma > 0 only."""

    ordinates: np.ndarray
    source_id: str

    @property
    def height(self) -> float:
        """Largest ordinate covered by the table."""
        return float(self.ordinates[-1])

    def __len__(self) -> int:
        return len(self.ordinates)


def load_zero_table(source, source_id: str | None = None) -> ZeroTable:
    """Parse a text table of zero ordinates.

    Accepts a path or an open text-file object.  Lines are one positive
    float each; blank lines and '#' comments are ignored.  Raises
    ZeroTableParseError (with the 1-based line number) for unparseable
    lines, ordinates <= 14, non-ascending order, near-duplicates, or an
    empty table.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
        name = source_id or getattr(source, "name", "<stream>")
    else:
        path = Path(source)
        lines = path.read_text(encoding="ascii").splitlines()
        name = source_id or str(path)

    ordinates: list[float] = []
    prev = -math.inf
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            gamma = float(text)
        except ValueError:
            raise ZeroTableParseError(
                f"{name}:{lineno}: not a number: {text!r}"
            ) from None
        if not math.isfinite(gamma) or gamma <= FIRST_ORDINATE_FLOOR:
            raise ZeroTableParseError(
                f"{name}:{lineno}: ordinate {gamma!r} must be finite and "
                f"> {FIRST_ORDINATE_FLOOR}"
            )
        if gamma <= prev + MIN_GAP:
            raise ZeroTableParseError(
                f"{name}:{lineno}: ordinate {gamma!r} not ascending past "
                f"{prev!r} (min gap {MIN_GAP})"
            )
        ordinates.append(gamma)
        prev = gamma
    if not ordinates:
        raise ZeroTableParseError(f"{name}: table contains no ordinates")
    return ZeroTable(
        ordinates=np.asarray(ordinates, dtype=np.float64), source_id=name
    )


def explicit_formula_sum(zeros: ZeroTable, n: float, t_cut: float) -> float:
    """Truncated zero sum S(N, T) over ordinates gamma <= T.

    Each zero rho = 1/2 + i*gamma contributes
    4 N^{3/2} (a cos(gamma ln N) + b sin(gamma ln N)) / (a^2 + b^2) with
    a = 3/4 - gamma^2 and b = 2 gamma, i.e. twice the real part of
    2 N^{rho+1} / (rho (rho + 1)) so that the conjugate zero is included.
    Summation is exactly rounded (fsum).  Raises if T exceeds the table
    height, since the truncation would otherwise silently misreport.
    """
    if n < 4:
        raise ValueError(f"N must be >= 4, got {n}")
    if t_cut > zeros.height:
        raise ValueError(
            f"T={t_cut} exceeds table height {zeros.height}; "
            "a taller table is required"
        )
    g = zeros.ordinates[zeros.ordinates <= t_cut]
    if len(g) == 0:
        return 0.0
    log_n = math.log(n)
    a = 0.75 - g * g
    b = 2.0 * g
    theta = g * log_n
    terms = (a * np.cos(theta) + b * np.sin(theta)) / (a * a + b * b)
    return 4.0 * n**1.5 * math.fsum(terms)


def truncation_tail_bound(zeros: ZeroTable, n: float, t_cut: float) -> float:
    """Rigorous bound on the zero sum discarded above T.

    In-table zeros above T contribute their exact magnitudes
    1/|rho(rho+1)| = 1/sqrt((1/4 + gamma^2)(9/4 + gamma^2)); beyond the
    table height the zero-counting density log(gamma/2pi)/2pi gives the
    integral bound (log(H/2pi) + 1)/(2pi H).  Requires T at or above the
    first ordinate so the bound covers a genuine truncation point.
    """
    if n < 4:
        raise ValueError(f"N must be >= 4, got {n}")
    first = float(zeros.ordinates[0])
    if t_cut < first:
        raise ValueError(
            f"T={t_cut} is below the first ordinate {first}; "
            "the tail bound assumes T is a truncation point"
        )
    g = zeros.ordinates[zeros.ordinates > t_cut]
    if len(g):
        mags = np.sqrt((0.25 + g * g) * (2.25 + g * g))
        in_table = math.fsum(1.0 / mags)
    else:
        in_table = 0.0
    height = zeros.height
    beyond = (math.log(height / TWO_PI) + 1.0) / (TWO_PI * height)
    return 4.0 * n**1.5 * (in_table + beyond)


def explicit_formula_residual(
    series: Psi2Series, zeros: ZeroTable, n: int, t_cut: float
) -> float:
    """R(N, T) = G(N) - N^2/2 + S(N, T).

    Under the Riemann hypothesis R(N, T) with T at full table height grows
    like N log^3 N, two powers of N below the main term.
    """
    g_n = goldbach_average(series, n)
    return g_n - 0.5 * n * n + explicit_formula_sum(zeros, n, t_cut)


def explicit_formula_residual_multiples(
    series: Psi2Series, zeros: ZeroTable, q: int, n: int, t_cut: float
) -> float:
    """R_q(N, T) = G_q(N) - (N^2/2 - S(N, T)) / phi(q).

    The multiples-of-q average inherits the full explicit formula scaled
    by 1/phi(q); this residual measures the error in that transfer.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    g_q = goldbach_average_multiples(series, q, n)
    main = 0.5 * n * n - explicit_formula_sum(zeros, n, t_cut)
    return g_q - main / euler_phi(q)
