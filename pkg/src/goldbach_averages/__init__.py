"""Computational toolkit for average Goldbach representation counts.

Builds the von Mangoldt convolution psi2(n) = sum_{m+m'=n} Lambda(m)Lambda(m'),
its cumulative averages G(N) and G_q(N) over multiples of q, explicit-formula
evaluations over tables of Riemann zeta zeros, Dirichlet character moment
integrals, and circle-method identity checks, together with a CLI that runs
reproducible experiment suites and writes CSV/TSV reports.
"""

__version__ = "0.1.0"

from .arithmetic import (
    CapacityError,
    VonMangoldtTable,
    chebyshev_psi,
    compensated_cumsum,
    euler_phi,
    exact_sum,
    factorize,
    sieve_von_mangoldt,
)
from .counts import (
    Psi2Series,
    congruence_average,
    error_term,
    goldbach_average,
    goldbach_average_multiples,
    load_psi2_cache,
    psi2_direct,
    psi2_entry,
    psi2_fast,
    save_psi2_cache,
)
from .zeros import (
    ZeroTable,
    ZeroTableParseError,
    explicit_formula_residual,
    explicit_formula_residual_multiples,
    explicit_formula_sum,
    load_zero_table,
    truncation_tail_bound,
)
from .characters import (
    CharacterGroup,
    TwistedPsiPath,
    build_character_group,
    build_twisted_path,
    imprimitivity_budget,
    imprimitivity_defect,
    increment_second_moment,
    moment_bound_ratios,
    psi_second_moment,
    twisted_psi,
)
from .circle import (
    CirclePoint,
    SeriesCutoff,
    SplitMoments,
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
