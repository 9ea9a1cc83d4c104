"""Configurable extended-precision arithmetic and special functions.

A `PrecisionContext` owns an independent mpmath context pinned to a
binary precision P; every numerical routine in the package receives one
explicitly, so there is no hidden global precision state and runs are
bit-reproducible for fixed (inputs, P).

`log_gamma` and `digamma` are computed here by the argument-shifted
Stirling series

    log Gamma(w) = (w - 1/2) log w - w + log(2 pi)/2
                   + sum_k B_{2k} / (2k(2k-1) w^{2k-1}),

with w = z + n shifted until Re w is large enough that the asymptotic
floor exp(-2 pi Re w) sits below 2^-(P+guard), then the shift is
unwound by principal logarithms.  mpmath's own implementations are used
only as independent oracles in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath.ctx_mp import MPContext

__all__ = [
    "PoleError",
    "PrecisionContext",
    "TestFunction",
    "digamma",
    "eval_test_function",
    "log_gamma",
    "mellin_of_test_function",
]

DEFAULT_PRECISION_BITS = 160
GUARD_BITS = 32


class PoleError(ArithmeticError):
    """Evaluation requested at (or within one ulp of) a pole."""


class PrecisionContext:
    """An isolated mpmath real/complex context at P bits of precision."""

    def __init__(self, prec_bits: int = DEFAULT_PRECISION_BITS):
        if prec_bits < 64:
            raise ValueError(f"precision must be at least 64 bits, got {prec_bits}")
        self.prec = int(prec_bits)
        self.mp = MPContext()
        self.mp.prec = self.prec

    def __repr__(self):
        return f"PrecisionContext(prec_bits={self.prec})"

    def with_guard(self, extra_bits: int = GUARD_BITS) -> "PrecisionContext":
        return PrecisionContext(self.prec + extra_bits)

    # conversion helpers -------------------------------------------------
    def mpf(self, x):
        if isinstance(x, Fraction):
            return self.mp.mpf(x.numerator) / x.denominator
        return self.mp.mpf(x)

    def mpc(self, re, im=0):
        return self.mp.mpc(self.mpf(re), self.mpf(im))

    @property
    def pi(self):
        return self.mp.pi

    @property
    def eps(self):
        return self.mp.mpf(2) ** (-self.prec)

    def nstr(self, x, dps: int | None = None):
        return self.mp.nstr(x, dps or int(self.prec / 3.32) + 3)

    def to_decimal(self, x) -> str:
        """Decimal string carrying the full precision of x."""
        return self.mp.nstr(x, int(self.prec / 3.32) + 5)


def _is_nonpositive_integer(ctx: PrecisionContext, z) -> bool:
    z = ctx.mp.mpc(z)
    if z.imag != 0:
        return False
    re = z.real
    return re <= 0 and re == ctx.mp.floor(re)


def _stirling_shift(prec: int) -> int:
    # asymptotic floor of the Stirling series is exp(-2 pi Re w); put it
    # below 2^-(prec+16) with margin
    import math as _m

    return max(12, int(0.1104 * (prec + 16)) + 6)


def log_gamma(ctx: PrecisionContext, z):
    """Principal-continuation log Gamma(z) by shifted Stirling series.

    Accurate to a few ulps at the context precision; the branch agrees
    with exp(log_gamma) == Gamma everywhere, which is the only property
    downstream code relies on (quotients are exponentiated once).
    """
    mp = ctx.mp
    z = mp.mpc(z)
    if _is_nonpositive_integer(ctx, z):
        raise PoleError(f"log_gamma pole at z={z}")
    beta = _stirling_shift(ctx.prec)
    nshift = max(0, int(beta - z.real) + 1)
    w = z + nshift
    # Stirling at w
    lnw = mp.log(w)
    acc = (w - mp.mpf(1) / 2) * lnw - w + mp.log(2 * mp.pi) / 2
    w2 = w * w
    invw = 1 / w
    term = invw
    tol = abs(acc) * ctx.eps / 4 + mp.mpf(2) ** (-(ctx.prec + 16))
    k = 1
    while True:
        b = mp.bernoulli(2 * k)
        contrib = b / ((2 * k) * (2 * k - 1)) * term
        acc += contrib
        if abs(contrib) < tol:
            break
        k += 1
        term = term / w2
        if k > 4 * beta:  # unreachable for the shifts chosen above
            raise ArithmeticError("Stirling series failed to converge")
    # unwind log Gamma(z) = log Gamma(z + n) - sum log(z + j)
    for j in range(nshift):
        acc -= mp.log(z + j)
    return acc


def digamma(ctx: PrecisionContext, z):
    """psi(z) by the shifted asymptotic series psi(w) ~ log w - 1/2w - ..."""
    mp = ctx.mp
    z = mp.mpc(z)
    if _is_nonpositive_integer(ctx, z):
        raise PoleError(f"digamma pole at z={z}")
    beta = _stirling_shift(ctx.prec)
    nshift = max(0, int(beta - z.real) + 1)
    w = z + nshift
    acc = mp.log(w) - 1 / (2 * w)
    w2 = w * w
    term = 1 / w2
    tol = abs(acc) * ctx.eps / 4 + mp.mpf(2) ** (-(ctx.prec + 16))
    k = 1
    while True:
        contrib = -mp.bernoulli(2 * k) / (2 * k) * term
        acc += contrib
        if abs(contrib) < tol:
            break
        k += 1
        term = term / w2
        if k > 4 * beta:
            raise ArithmeticError("digamma series failed to converge")
    for j in range(nshift):
        acc -= 1 / (z + j)
    return acc


@dataclass(frozen=True)
class TestFunction:
    """f(x) = x^degree * exp(-pi x^2 / scale^2) on x > 0.

    degree is even and nonnegative so f extends smoothly through 0; the
    scale is kept as an exact rational so a test function means the
    same thing at every working precision.

    Mellin transform: Mf(s) = (scale^2/pi)^{(s+degree)/2}
                              * Gamma((s+degree)/2) / 2,  Re(s) > -degree.
    """

    degree: int
    scale: Fraction

    def __init__(self, degree: int, scale):
        if degree < 0 or degree % 2:
            raise ValueError(f"degree must be even and >= 0, got {degree}")
        scale = Fraction(scale) if not isinstance(scale, Fraction) else scale
        if scale <= 0:
            raise ValueError(f"scale must be positive, got {scale}")
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "scale", scale)

    def label(self) -> str:
        return f"x^{self.degree}*exp(-pi x^2/{self.scale}^2)"

    def key(self) -> tuple:
        return (self.degree, self.scale.numerator, self.scale.denominator)


def eval_test_function(ctx: PrecisionContext, f: TestFunction, x):
    x = ctx.mpf(x)
    if x <= 0:
        raise ValueError(f"test functions are evaluated on x > 0, got {x}")
    X = ctx.mpf(f.scale)
    val = ctx.mp.exp(-ctx.pi * x * x / (X * X))
    if f.degree:
        val *= x ** f.degree
    return val


def mellin_of_test_function(ctx: PrecisionContext, f: TestFunction, s):
    """Mf(s) = (X^2/pi)^{(s+m)/2} Gamma((s+m)/2) / 2."""
    mp = ctx.mp
    s = mp.mpc(s)
    arg = (s + f.degree) / 2
    if _is_nonpositive_integer(ctx, arg):
        raise PoleError(f"Mellin transform pole at s={s} (degree {f.degree})")
    X = ctx.mpf(f.scale)
    return mp.exp(arg * mp.log(X * X / mp.pi) + log_gamma(ctx, arg)) / 2
