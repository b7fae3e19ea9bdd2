from .window import PrimeWindow, sieve_window, primes_up_to, simple_sieve
from .arith import (
    FactorSignature,
    factorize,
    is_almost_prime,
    totient,
    moebius,
    tau,
    gcd,
    lcm,
    divisor_sum,
    voronoi_residual,
    mertens_log_sum,
    moebius_table,
    totient_table,
    tau_table,
)
from .cache import PrimeCache, prime_cache
