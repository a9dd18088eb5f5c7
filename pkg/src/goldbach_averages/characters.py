"""Dirichlet characters mod q and twisted Chebyshev moment integrals.

Characters are built from the cyclic decomposition of the unit group
(Z/qZ)^* — one primitive-root component per odd prime power, and the
{-1, 5} pair for powers of two — and every character value is stored as an
exact root-of-unity exponent t with chi(n) = exp(2*pi*i*t/e), where e is
the group exponent.  Exact exponents make orthogonality, conjugation,
conductor search, and primitive-character matching integer computations;
complex values are materialized only at evaluation time.

The moment integrals J1(X) = int_0^X |psi(x, chi)|^2 dx and
J2(X, h) = int_0^X |psi(x+h, chi) - psi(x, chi)|^2 dx are exact
piecewise-constant integrals of the twisted Chebyshev function
psi(x, chi) = sum_{n <= x} chi(n) Lambda(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arithmetic import VonMangoldtTable, compensated_cumsum, euler_phi, factorize
from .stepfun import step_square_integral, window_square_integral


def _primitive_root_mod_pk(p: int, k: int) -> int:
    """A generator of (Z/p^k Z)^* for odd prime p."""
    phi_p = p - 1
    factors = [f for f, _ in factorize(phi_p)]
    g = None
    for cand in range(2, p):
        if all(pow(cand, phi_p // f, p) != 1 for f in factors):
            g = cand
            break
    if g is None:  # p prime guarantees a root exists
        raise ArithmeticError(f"no primitive root found mod {p}")
    if k == 1:
        return g
    # lift to p^k: g works unless g^(p-1) == 1 mod p^2, then g + p does
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _unit_group_components(q: int) -> list[tuple[int, int]]:
    """CRT generators of (Z/qZ)^* as (generator mod q, order) pairs."""
    components: list[tuple[int, int]] = []
    for p, k in factorize(q):
        pk = p**k
        rest = q // pk
        if p == 2:
            if k == 1:
                continue
            local = [(pk - 1, 2)]
            if k >= 3:
                local.append((5, 2 ** (k - 2)))
        else:
            local = [(_primitive_root_mod_pk(p, k), (p - 1) * p ** (k - 1))]
        for g_local, order in local:
            if rest == 1:
                components.append((g_local % q, order))
            else:
                # x = g_local mod p^k, x = 1 mod rest
                inv = pow(pk, -1, rest)
                x = (g_local + pk * ((1 - g_local) * inv % rest)) % q
                components.append((x, order))
    return components


@dataclass(frozen=True)
class CharacterInfo:
    """Summary facts about one character."""

    index: int
    order: int
    parity: int
    conductor: int
    principal: bool
    primitive: bool


@dataclass
class CharacterGroup:
    """All phi(q) Dirichlet characters mod q with exact values.

    Characters are indexed 0 .. phi(q)-1 in row-major order over the
    component exponent tuples; index 0 is the principal character.
    chi_j(n) = exp(2*pi*i * t / exponent) where t = value_exponent(j, n).
    """

    q: int
    orders: tuple[int, ...]
    generators: tuple[int, ...]
    exponent: int
    dlog: np.ndarray  # shape (q, c); row n = component exponents, -1 rows non-units
    unit_mask: np.ndarray  # shape (q,); True where gcd(n, q) == 1
    _tuples: list[tuple[int, ...]]
    _tuple_index: dict[tuple[int, ...], int]
    _exp_cache: dict[int, np.ndarray] = field(default_factory=dict)
    _value_cache: dict[int, np.ndarray] = field(default_factory=dict)
    _conductor_cache: dict[int, int] = field(default_factory=dict)

    @property
    def n_characters(self) -> int:
        return len(self._tuples)

    def _check_index(self, j: int) -> None:
        if not 0 <= j < self.n_characters:
            raise ValueError(
                f"character index {j} outside [0, {self.n_characters})"
            )

    def exponent_table(self, j: int) -> np.ndarray:
        """t(n) with chi_j(n) = exp(2*pi*i*t(n)/exponent); -1 marks non-units."""
        self._check_index(j)
        if j not in self._exp_cache:
            tup = self._tuples[j]
            weights = [
                a * (self.exponent // d) for a, d in zip(tup, self.orders)
            ]
            t = np.full(self.q, -1, dtype=np.int64)
            units = np.nonzero(self.unit_mask)[0]
            acc = np.zeros(len(units), dtype=np.int64)
            for c, w in enumerate(weights):
                acc += w * self.dlog[units, c]
            t[units] = acc % self.exponent
            self._exp_cache[j] = t
        return self._exp_cache[j]

    def value_table(self, j: int) -> np.ndarray:
        """chi_j(n) for 0 <= n < q as complex128 (0 on non-units)."""
        self._check_index(j)
        if j not in self._value_cache:
            t = self.exponent_table(j)
            values = np.zeros(self.q, dtype=np.complex128)
            units = t >= 0
            values[units] = np.exp(
                2j * math.pi * t[units] / self.exponent
            )
            self._value_cache[j] = values
        return self._value_cache[j]

    def evaluate(self, j: int, n: int) -> complex:
        """chi_j(n) for any integer n (periodic; 0 on non-units)."""
        return complex(self.value_table(j)[n % self.q])

    def is_principal(self, j: int) -> bool:
        self._check_index(j)
        return all(a == 0 for a in self._tuples[j])

    def conjugate_index(self, j: int) -> int:
        """Index of the complex-conjugate character."""
        self._check_index(j)
        tup = self._tuples[j]
        conj = tuple((-a) % d for a, d in zip(tup, self.orders))
        return self._tuple_index[conj]

    def character_order(self, j: int) -> int:
        """Multiplicative order of chi_j in the dual group."""
        self._check_index(j)
        tup = self._tuples[j]
        order = 1
        for a, d in zip(tup, self.orders):
            if a:
                order = math.lcm(order, d // math.gcd(a, d))
        return order

    def parity(self, j: int) -> int:
        """chi_j(-1), always +1 or -1."""
        if self.q <= 2:
            return 1
        t = int(self.exponent_table(j)[self.q - 1])
        if t == 0:
            return 1
        if 2 * t == self.exponent:
            return -1
        raise ArithmeticError(f"chi({self.q - 1}) is not a sign: t={t}")

    def conductor(self, j: int) -> int:
        """Smallest modulus d | q whose residues determine chi_j.

        chi is induced from a character mod d exactly when chi(n) = 1 for
        every unit n with n = 1 (mod d); the conductor is the least such
        divisor.
        """
        self._check_index(j)
        if j not in self._conductor_cache:
            t = self.exponent_table(j)
            units = np.nonzero(self.unit_mask)[0]
            t_units = t[units]
            found = None
            for d in _divisors(self.q):
                trivial = t_units[units % d == 1 % d]
                if not trivial.any():
                    found = d
                    break
            assert found is not None  # d = q always qualifies
            self._conductor_cache[j] = found
        return self._conductor_cache[j]

    def is_primitive(self, j: int) -> bool:
        return self.conductor(j) == self.q

    def inducing_primitive(self, j: int) -> tuple[int, int]:
        """(q*, j*): the primitive character mod the conductor inducing chi_j.

        Matches exact root-of-unity exponents on every unit of q, so the
        identification is rational arithmetic, not float comparison.
        """
        self._check_index(j)
        q_star = self.conductor(j)
        if q_star == self.q:
            return self.q, j
        star = build_character_group(q_star)
        units = np.nonzero(self.unit_mask)[0]
        t_self = self.exponent_table(j)[units]
        for j_star in range(star.n_characters):
            if star.conductor(j_star) != q_star:
                continue
            t_star = star.exponent_table(j_star)[units % q_star]
            if np.array_equal(
                t_self * star.exponent, t_star * self.exponent
            ):
                return q_star, j_star
        raise ArithmeticError(
            f"no primitive character mod {q_star} induces index {j} mod {self.q}"
        )

    def info(self, j: int) -> CharacterInfo:
        return CharacterInfo(
            index=j,
            order=self.character_order(j),
            parity=self.parity(j),
            conductor=self.conductor(j),
            principal=self.is_principal(j),
            primitive=self.is_primitive(j),
        )


def _divisors(q: int) -> list[int]:
    divs = [1]
    for p, e in factorize(q):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


@lru_cache(maxsize=None)
def build_character_group(q: int) -> CharacterGroup:
    """Construct the full character group mod q (cached per q).

    Raises ValueError for q < 1.  q = 1 yields the single trivial
    character, which takes the value 1 everywhere (including n = 0).
    """
    if q < 1:
        raise ValueError(f"modulus q must be >= 1, got {q}")
    components = _unit_group_components(q)
    orders = tuple(d for _, d in components)
    generators = tuple(g for g, _ in components)
    exponent = math.lcm(*orders) if orders else 1

    c = len(components)
    dlog = np.full((q, c), -1, dtype=np.int64)
    if q == 1:
        unit_mask = np.ones(1, dtype=bool)
        dlog = np.zeros((1, 0), dtype=np.int64)
    else:
        unit_mask = np.zeros(q, dtype=bool)
        reps: dict[int, tuple[int, ...]] = {1 % q: ()}
        for g, d in components:
            new: dict[int, tuple[int, ...]] = {}
            for r, tup in reps.items():
                x = r
                for e in range(d):
                    new[x] = tup + (e,)
                    x = (x * g) % q
            reps = new
        if len(reps) != euler_phi(q):
            raise ArithmeticError(
                f"unit group enumeration mod {q} found {len(reps)} units, "
                f"expected {euler_phi(q)}"
            )
        for r, tup in reps.items():
            unit_mask[r] = True
            dlog[r] = tup

    tuples = [tuple(idx) for idx in np.ndindex(*orders)] if orders else [()]
    tuple_index = {tup: i for i, tup in enumerate(tuples)}
    return CharacterGroup(
        q=q,
        orders=orders,
        generators=generators,
        exponent=exponent,
        dlog=dlog,
        unit_mask=unit_mask,
        _tuples=tuples,
        _tuple_index=tuple_index,
    )


@dataclass(frozen=True)
class TwistedPsiPath:
    """Cumulative twisted Chebyshev sums at every prime-power breakpoint.

    cumulative[i] = psi(breakpoints[i], chi); between breakpoints the path
    is constant, so any psi(x, chi) with x <= x_max reads off by bisection.
    """

    q: int
    char_index: int
    x_max: float
    breakpoints: np.ndarray
    cumulative: np.ndarray

    def value_at(self, x: float) -> complex:
        if x < 0 or x > self.x_max:
            raise ValueError(f"x={x} outside [0, {self.x_max}]")
        k = int(np.searchsorted(self.breakpoints, math.floor(x), side="right"))
        return complex(self.cumulative[k - 1]) if k else 0j


def _twisted_deltas(
    table: VonMangoldtTable, group: CharacterGroup, j: int, x_max: float
) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints n <= x_max and their weights chi(n) Lambda(n)."""
    if x_max < 0 or x_max > table.n_max:
        raise ValueError(
            f"x={x_max} outside table coverage [0, {table.n_max}]"
        )
    limit = math.floor(x_max)
    bp = table.breakpoints[
        : int(np.searchsorted(table.breakpoints, limit, side="right"))
    ]
    chi = group.value_table(j)[bp % group.q]
    return bp, chi * table.values[bp]


def build_twisted_path(
    table: VonMangoldtTable, group: CharacterGroup, j: int, x_max: float
) -> TwistedPsiPath:
    """Cumulative psi(x, chi) at every breakpoint up to x_max."""
    bp, deltas = _twisted_deltas(table, group, j, x_max)
    return TwistedPsiPath(
        q=group.q,
        char_index=j,
        x_max=float(x_max),
        breakpoints=bp,
        cumulative=compensated_cumsum(deltas),
    )


def twisted_psi(
    table: VonMangoldtTable, group: CharacterGroup, j: int, x: float
) -> complex:
    """psi(x, chi) = sum_{n <= x} chi(n) Lambda(n)."""
    _, deltas = _twisted_deltas(table, group, j, x)
    if len(deltas) == 0:
        return 0j
    return complex(compensated_cumsum(deltas)[-1])


def psi_second_moment(
    table: VonMangoldtTable, group: CharacterGroup, j: int, x_max: float
) -> float:
    """J1(X) = int_0^X |psi(x, chi)|^2 dx, exact over step segments."""
    bp, deltas = _twisted_deltas(table, group, j, x_max)
    return step_square_integral(
        bp.astype(np.float64), deltas, 0.0, float(x_max)
    )


def increment_second_moment(
    table: VonMangoldtTable,
    group: CharacterGroup,
    j: int,
    x_max: float,
    h: float,
) -> float:
    """J2(X, h) = int_0^X |psi(x + h, chi) - psi(x, chi)|^2 dx.

    The increment over (x, x + h] collects Lambda weights that enter at
    n - h and leave at n; the squared modulus integrates exactly over the
    resulting step segments.  Requires X + h within table coverage.
    """
    if h < 0:
        raise ValueError(f"h must be >= 0, got {h}")
    if x_max < 0 or x_max + h > table.n_max:
        raise ValueError(
            f"X + h = {x_max + h} outside table coverage [0, {table.n_max}]"
        )
    bp, deltas = _twisted_deltas(table, group, j, x_max + h)
    return window_square_integral(
        bp.astype(np.float64), deltas, float(h), 0.0, float(x_max)
    )


def imprimitivity_defect(
    table: VonMangoldtTable, group: CharacterGroup, j: int, x: float
) -> float:
    """|psi(x, chi) - psi(x, chi*)| for the inducing primitive chi*.

    Identically zero for primitive characters.  For imprimitive chi the
    two twisted sums differ only at prime powers sharing a factor with q,
    so the defect is bounded by sum_{n <= x, gcd(n, q) > 1} Lambda(n).
    """
    q_star, j_star = group.inducing_primitive(j)
    if q_star == group.q:
        return 0.0
    star = build_character_group(q_star)
    return abs(
        twisted_psi(table, group, j, x) - twisted_psi(table, star, j_star, x)
    )


def imprimitivity_budget(
    table: VonMangoldtTable, q: int, x: float
) -> float:
    """sum of Lambda(n) over n <= x with gcd(n, q) > 1."""
    if x < 0 or x > table.n_max:
        raise ValueError(f"x={x} outside table coverage [0, {table.n_max}]")
    limit = math.floor(x)
    bp = table.breakpoints[
        : int(np.searchsorted(table.breakpoints, limit, side="right"))
    ]
    shared = np.gcd(bp, q) > 1
    return math.fsum(table.values[bp[shared]])


@dataclass(frozen=True)
class MomentBoundRow:
    """One (X, h) evaluation of the J1/J2 bound ratios for a character."""

    q: int
    char_index: int
    conductor: int
    x: float
    h: float
    j1: float
    j2: float
    ratio1: float
    ratio2: float


def moment_bound_ratios(
    table: VonMangoldtTable,
    group: CharacterGroup,
    j: int,
    pairs: list[tuple[float, float]],
) -> list[MomentBoundRow]:
    """J1 and J2 against their square-root-cancellation budgets.

    For each (X, h): ratio1 = J1(X) / (X^2 log^2(2q)) and
    ratio2 = J2(X, h) / ((h + 1) X log^2(3 q X / (h + 1))).  Bounded
    ratios across a geometric X range are the observable form of the
    conjectural moment estimates; the ratios themselves are reported, not
    asserted.
    """
    conductor = group.conductor(j)
    j1_cache: dict[float, float] = {}
    rows = []
    for x, h in pairs:
        if x not in j1_cache:
            j1_cache[x] = psi_second_moment(table, group, j, x)
        j1 = j1_cache[x]
        j2 = increment_second_moment(table, group, j, x, h)
        budget1 = x * x * math.log(2 * group.q) ** 2
        budget2 = (h + 1.0) * x * math.log(3 * group.q * x / (h + 1.0)) ** 2
        rows.append(
            MomentBoundRow(
                q=group.q,
                char_index=j,
                conductor=conductor,
                x=float(x),
                h=float(h),
                j1=j1,
                j2=j2,
                ratio1=j1 / budget1,
                ratio2=j2 / budget2,
            )
        )
    return rows
