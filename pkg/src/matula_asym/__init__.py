"""Exact counting and asymptotics for integers built from the primes p_{m^k}."""
from .asymptotics import (
    ExpansionCoefficients,
    corollary1_logP,
    derive_saddle,
    hardy_ramanujan_logp,
    ingham_logP,
    laplace_f,
    lemma31_residual,
    lemma44_coeffs,
    lemma44_residual,
    sigma_saddle,
    theorem1_logM,
    weak_logM,
)
from .constants import (
    C2m,
    ConstantReport,
    Dm,
    Dprime,
    Km,
    euler_gamma,
    finite_part_constants,
    gamma_fn,
    stieltjes_gamma1,
    zeta,
)
from .counting import (
    CountResult,
    IntegerLambdaSystem,
    PrimeLambdaSystem,
    avg_integral_exact,
    count_M2m,
    enumerate_Am,
    N_of_u,
    partition_sum_exact,
)
from .errors import CapacityError, ContractError, DomainError, MatulaAsymError, ParseError
from .matula import (
    RootedTree,
    count_height_le2,
    decode,
    encode,
    format_tree,
    height_of_code,
    is_in_Am,
    parse_tree,
    rooted_trees,
)
from .primes import (
    PrimeTable,
    build_prime_table,
    cipolla_log_prime,
    factorize,
    loglog_prime_expansion,
    nth_prime,
    prime_pi,
)

__version__ = "0.1.0"
