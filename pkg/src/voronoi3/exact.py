"""Exact arithmetic for the symmetric-square lift of the discriminant form.

Everything in this module is integer/rational and exact:

  * tau(n), the coefficients of Delta = q prod (1-q^n)^24,
  * the analytically normalised lift coefficients
        a_p = tau(p)^2 / p^11 - 1,
    extended to prime powers by the degree-3 Hecke recursion
        h_k = a_p h_{k-1} - a_p h_{k-2} + h_{k-3},
    and to all n multiplicatively,
  * the two-index coefficients
        A(m,n) = sum_{d | gcd(m,n)} mu(d) A(m/d,1) A(1,n/d),
  * Kloosterman sums S(a,b;c), modular inverses, divisor/Moebius
    utilities and the additive character e(u) = exp(2 pi i u).

Rationals are `fractions.Fraction` (always reduced, positive
denominator); integers are plain Python ints.  The only floating-point
outputs are `kloosterman` and `additive_character`, which evaluate
trigonometry through an explicit `PrecisionContext`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

ExactInteger = int
ExactRational = Fraction

__all__ = [
    "CoefficientTable",
    "TwistParams",
    "additive_character",
    "coeff_table",
    "divisors",
    "integrality_witness",
    "is_prime",
    "kloosterman",
    "mod_inverse",
    "moebius",
    "ramanujan_sum",
    "sym2_prime",
    "sym2_prime_power",
    "tau_table",
]


class IntegralityError(ValueError):
    """Raised when a value that must be an integer fails to be one."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation [(p, k), ...] by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            out.append((d, k))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"divisors requires n >= 1, got {n}")
    divs = [1]
    for p, k in _factorize(n):
        divs = [d * p**j for d in divs for j in range(k + 1)]
    return sorted(divs)


def moebius(n: int) -> int:
    if n < 1:
        raise ValueError(f"moebius requires n >= 1, got {n}")
    if n == 1:
        return 1
    fac = _factorize(n)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def mod_inverse(a: int, c: int) -> int:
    """x in [0, c) with a*x = 1 (mod c); 0 by convention when c = 1."""
    if c < 1:
        raise ValueError(f"modulus must be positive, got {c}")
    if c == 1:
        return 0
    if math.gcd(a, c) != 1:
        raise ValueError(f"{a} is not invertible mod {c}")
    return pow(a, -1, c)


# ----------------------------------------------------------------------
# tau(n) via the eta product
# ----------------------------------------------------------------------

_CRT_PRIMES = (2097143, 2097133, 2097131, 2097097, 2097091, 2097083, 2097047)


def _euler_series(N: int) -> list[int]:
    """prod_{n>=1} (1-q^n) to O(q^{N+1}) by the pentagonal number theorem."""
    out = [0] * (N + 1)
    k = 0
    while k * (3 * k - 1) // 2 <= N:
        if k == 0:
            out[0] = 1
        else:
            for idx in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
                if idx <= N:
                    out[idx] = (-1) ** k
        k += 1
    return out


def _jacobi_cube(N: int) -> list[int]:
    """prod (1-q^n)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2} to O(q^{N+1})."""
    out = [0] * (N + 1)
    k = 0
    while k * (k + 1) // 2 <= N:
        out[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return out


def _poly_sqr_exact(a: list[int], N: int) -> list[int]:
    c = [0] * (N + 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        if 2 * i <= N:
            c[2 * i] += ai * ai
        for j in range(i + 1, min(len(a), N - i + 1)):
            if a[j]:
                c[i + j] += 2 * ai * a[j]
    return c


def _poly_sqr_crt(a: list[int], N: int) -> list[int]:
    """Exact truncated square of an integer series via CRT over int64 primes.

    Residue convolutions run in numpy int64; products of residues
    (< 2^42) summed over <= N+1 terms stay below 2^63 for N < 2^20.
    """
    prod = 1
    bound = 2 * max(abs(x) for x in a) ** 2 * (N + 1)
    residues = []
    for p in _CRT_PRIMES:
        arr = np.array([x % p for x in a], dtype=np.int64)
        conv = np.convolve(arr, arr)[: N + 1] % p
        residues.append((p, conv))
        prod *= p
        if prod > bound:
            break
    else:
        raise ValueError("CRT modulus pool exhausted; series too large")
    out = [0] * (N + 1)
    for n in range(N + 1):
        x, mod = 0, 1
        for p, conv in residues:
            r = int(conv[n])
            # incremental CRT
            t = ((r - x) * pow(mod, -1, p)) % p
            x += mod * t
            mod *= p
        if x > mod // 2:
            x -= mod
        out[n] = x
    return out


def _poly_sqr(a: list[int], N: int) -> list[int]:
    if N <= 1500:
        return _poly_sqr_exact(a, N)
    return _poly_sqr_crt(a, N)


@lru_cache(maxsize=4)
def _tau_cached(N: int) -> tuple[int, ...]:
    eta3 = _jacobi_cube(N)
    eta6 = _poly_sqr(eta3, N)
    eta12 = _poly_sqr(eta6, N)
    eta24 = _poly_sqr(eta12, N)
    return tuple(eta24[: N + 1])


def tau_table(N: int) -> list[int]:
    """Exact tau(1..N): Delta = q (eta-product)^24, cube-squared thrice."""
    if N < 1:
        raise ValueError(f"tau_table requires N >= 1, got {N}")
    # round the cached length up so that growing requests reuse one table
    M = 16
    while M < N:
        M *= 2
    e24 = _tau_cached(M - 1)
    return [e24[n - 1] for n in range(1, N + 1)]


# ----------------------------------------------------------------------
# lift coefficients
# ----------------------------------------------------------------------

def sym2_prime(p: int) -> Fraction:
    """a_p = tau(p)^2 / p^11 - 1 for the analytically normalised lift."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    t = tau_table(p)[p - 1]
    return Fraction(t * t, p**11) - 1


def sym2_prime_power(p: int, k: int) -> Fraction:
    """A(1, p^k) by the recursion h_j = a_p(h_{j-1} - h_{j-2}) + h_{j-3}."""
    if k < 0:
        raise ValueError(f"exponent must be nonnegative, got {k}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return _h_values(p, k)[k]


def _h_values(p: int, kmax: int) -> list[Fraction]:
    ap = sym2_prime(p)
    h = [Fraction(1)]
    for j in range(1, kmax + 1):
        val = ap * h[j - 1]
        if j >= 2:
            val -= ap * h[j - 2]
        if j >= 3:
            val += h[j - 3]
        h.append(val)
    return h


@dataclass(frozen=True)
class TwistParams:
    """Additive twist a/c in lowest terms plus the first Fourier index q."""

    a: int
    c: int
    q: int = 1
    abar: int = field(init=False)

    def __post_init__(self):
        if self.c < 1:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.q < 1:
            raise ValueError(f"q must be positive, got {self.q}")
        if math.gcd(self.a, self.c) != 1 and self.c > 1:
            raise ValueError(f"gcd({self.a}, {self.c}) != 1")
        object.__setattr__(self, "abar", mod_inverse(self.a, self.c))


class CoefficientTable:
    """Exact A(m,n) for all m*n <= N, with the view a_n = A(1,n).

    Single-index values come from the multiplicative extension of the
    prime-power recursion; two-index values from the mu-twisted
    convolution.  The form is self-dual, so A(m,n) = A(n,m) and all
    values are real rationals.
    """

    def __init__(self, N: int):
        if N < 1:
            raise ValueError(f"table size must be >= 1, got {N}")
        self.N = N
        tau = tau_table(max(N, 2))
        self._h = {}
        for p in range(2, N + 1):
            if is_prime(p):
                kmax = int(math.log(N) / math.log(p)) + 1
                ap = Fraction(tau[p - 1] ** 2, p**11) - 1
                h = [Fraction(1)]
                for j in range(1, kmax + 1):
                    val = ap * h[j - 1]
                    if j >= 2:
                        val -= ap * h[j - 2]
                    if j >= 3:
                        val += h[j - 3]
                    h.append(val)
                self._h[p] = h
        self._a1 = [None, Fraction(1)]
        for n in range(2, N + 1):
            val = Fraction(1)
            for p, k in _factorize(n):
                val *= self._h[p][k]
            self._a1.append(val)
        self._pairs: dict[tuple[int, int], Fraction] = {}

    def a(self, n: int) -> Fraction:
        """a_n = A(1, n)."""
        if not 1 <= n <= self.N:
            raise IndexError(f"n={n} outside table range [1, {self.N}]")
        return self._a1[n]

    def A(self, m: int, n: int) -> Fraction:
        if m < 1 or n < 1 or m * n > self.N:
            raise IndexError(f"A({m},{n}) outside table bound m*n <= {self.N}")
        if m > n:
            m, n = n, m
        if m == 1:
            return self._a1[n]
        key = (m, n)
        val = self._pairs.get(key)
        if val is None:
            val = Fraction(0)
            for d in divisors(math.gcd(m, n)):
                mu = moebius(d)
                if mu:
                    val += mu * self._a1[m // d] * self._a1[n // d]
            self._pairs[key] = val
        return val

    def pairs(self) -> list[tuple[int, int, Fraction]]:
        """All (m, n, A(m,n)) with m <= n and m*n <= N."""
        out = []
        for m in range(1, int(math.isqrt(self.N)) + 1):
            for n in range(m, self.N // m + 1):
                out.append((m, n, self.A(m, n)))
        return out

    def to_records(self) -> list[dict]:
        """JSON layout: records with decimal-string numerator/denominator."""
        return [
            {
                "m": m,
                "n": n,
                "numerator": str(v.numerator),
                "denominator": str(v.denominator),
            }
            for m, n, v in self.pairs()
        ]

    @staticmethod
    def from_records(records: list[dict]) -> dict[tuple[int, int], Fraction]:
        return {
            (r["m"], r["n"]): Fraction(int(r["numerator"]), int(r["denominator"]))
            for r in records
        }


def coeff_table(N: int) -> CoefficientTable:
    return CoefficientTable(N)


def integrality_witness(n: int, table: CoefficientTable) -> int:
    """a_n * n^11, which must be an integer for the correct coefficients."""
    value = table.a(n) * n**11
    if value.denominator != 1:
        raise IntegralityError(f"a_{n} * {n}^11 = {value} is not an integer")
    return value.numerator


# ----------------------------------------------------------------------
# character sums
# ----------------------------------------------------------------------

def additive_character(u: Fraction, ctx):
    """e(u) = exp(2 pi i u) with the argument reduced exactly mod 1."""
    u = Fraction(u)
    u -= u.numerator // u.denominator  # now 0 <= u < 1
    mp = ctx.mp
    theta = 2 * mp.pi * mp.mpf(u.numerator) / u.denominator
    return mp.mpc(mp.cos(theta), mp.sin(theta))


def kloosterman(a: int, b: int, c: int, ctx):
    """S(a,b;c) = sum over units x mod c of e((a x + b xbar)/c); real.

    Direct O(c) summation; the imaginary part (which vanishes exactly,
    since x -> -x pairs terms into conjugates) is checked against the
    working precision and discarded.
    """
    if c < 1:
        raise ValueError(f"modulus must be positive, got {c}")
    mp = ctx.mp
    if c == 1:
        return mp.mpf(1)
    total = mp.mpc(0)
    for x in range(1, c):
        if math.gcd(x, c) == 1:
            xbar = pow(x, -1, c)
            total += additive_character(Fraction(a * x + b * xbar, c), ctx)
    scale = max(abs(total), mp.mpf(1))
    if abs(total.imag) > scale * mp.mpf(2) ** (-(ctx.prec - 10)):
        raise ArithmeticError(
            f"S({a},{b};{c}) imaginary part {total.imag} above noise floor"
        )
    return total.real


def ramanujan_sum(a: int, c: int) -> int:
    """c_c(a) = S(a, 0; c) = sum_{d | gcd(a,c)} d mu(c/d), exact."""
    if c < 1:
        raise ValueError(f"modulus must be positive, got {c}")
    g = math.gcd(a, c) if a != 0 else c
    return sum(d * moebius(c // d) for d in divisors(g))
