"""Kummer confluent hypergeometric function M(a, b, z) by ascending series.

Only the regime used by the solver is supported: real parameters, b > 0
and z >= 0 of moderate size (z is the dimensionless barrier height v0 or
(x/x0)^2 inside the well).
"""

from __future__ import annotations

REL_TOL = 1e-16
N_SMALL_TERMS = 3
MAX_TERMS = 1000
NEAR_ZERO = 1e-10
MIN_ABS_M = 1e-300


class KummerError(ArithmeticError):
    """Series evaluation failed; carries the offending arguments."""

    def __init__(self, message: str, a: float, b: float, z: float):
        super().__init__(f"{message} (a={a!r}, b={b!r}, z={z!r})")
        self.a = a
        self.b = b
        self.z = z


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = 1.0
    for j in range(n):
        out *= a + j
    return out


def _check_b(a: float, b: float, z: float) -> None:
    if b <= 0 and float(b).is_integer():
        raise KummerError("b is a non-positive integer", a, b, z)


def _converged(term: float, total: float, n: int, a: float, b: float, z: float) -> bool:
    # Only trust a small term once the term ratio has started to shrink for good.
    if abs(term) > REL_TOL * abs(total):
        return False
    return abs((a + n) * z) < abs((b + n) * (n + 1))


def kummer_m(a: float, b: float, z: float, max_terms: int = MAX_TERMS) -> float:
    """M(a, b, z) = sum_n (a)_n / (b)_n z^n / n!.

    Exact when the series terminates (a a non-positive integer). Raises
    KummerError if the running term has not died out after ``max_terms``.
    """
    _check_b(a, b, z)
    if z == 0.0:
        return 1.0
    term = 1.0
    total = 1.0
    small = 0
    for n in range(max_terms):
        term *= (a + n) * z / ((b + n) * (n + 1))
        total += term
        if term == 0.0:
            return total
        if _converged(term, total, n + 1, a, b, z):
            small += 1
            if small >= N_SMALL_TERMS:
                return total
        else:
            small = 0
    raise KummerError(f"series not converged after {max_terms} terms", a, b, z)


def kummer_m_dz(a: float, b: float, z: float, max_terms: int = MAX_TERMS) -> float:
    """dM/dz via the identity dM(a,b,z)/dz = (a/b) M(a+1, b+1, z)."""
    if a == 0.0:
        return 0.0
    return a / b * kummer_m(a + 1.0, b + 1.0, z, max_terms)


def kummer_dm_da(a: float, b: float, z: float, max_terms: int = MAX_TERMS) -> float:
    """dM/da by term-wise differentiation of the series.

    The usual form multiplies each term by the harmonic sum
    sum_{j<n} 1/(a+j). When some a+j is within NEAR_ZERO of zero that form
    is 0*inf, so the Pochhammer derivative is carried by the product rule
    instead: d(a)_{n+1} = d(a)_n (a+n) + (a)_n.
    """
    _check_b(a, b, z)
    if z == 0.0:
        return 0.0
    if _hits_zero_factor(a, max_terms):
        return _dm_da_product_rule(a, b, z, max_terms)

    term = 1.0
    harmonic = 0.0
    total = 0.0
    small = 0
    for n in range(max_terms):
        harmonic += 1.0 / (a + n)
        term *= (a + n) * z / ((b + n) * (n + 1))
        dterm = term * harmonic
        total += dterm
        if _converged(dterm, total, n + 1, a, b, z):
            small += 1
            if small >= N_SMALL_TERMS:
                return total
        else:
            small = 0
    raise KummerError(f"a-derivative not converged after {max_terms} terms", a, b, z)


def _hits_zero_factor(a: float, max_terms: int) -> bool:
    nearest = round(a)
    return nearest <= 0 and -nearest < max_terms and abs(a - nearest) < NEAR_ZERO


def _dm_da_product_rule(a: float, b: float, z: float, max_terms: int) -> float:
    poch = 1.0  # (a)_n
    dpoch = 0.0  # d/da (a)_n
    scale = 1.0  # z^n / ((b)_n n!)
    total = 0.0
    small = 0
    for n in range(max_terms):
        dpoch = dpoch * (a + n) + poch
        poch *= a + n
        scale *= z / ((b + n) * (n + 1))
        dterm = dpoch * scale
        total += dterm
        if _converged(dterm, total, n + 1, a, b, z):
            small += 1
            if small >= N_SMALL_TERMS:
                return total
        else:
            small = 0
    raise KummerError(f"a-derivative not converged after {max_terms} terms", a, b, z)


def kummer_log_deriv_a(a: float, b: float, z: float, max_terms: int = MAX_TERMS) -> float:
    """(1/M) dM/da, the logarithmic derivative in the first parameter."""
    m = kummer_m(a, b, z, max_terms)
    if abs(m) < MIN_ABS_M:
        raise KummerError("M(a, b, z) vanishes; log-derivative undefined", a, b, z)
    return kummer_dm_da(a, b, z, max_terms) / m
