"""The Voronoi transform F of a test function, from the functional equation.

For the completed L-function

    Lambda(s) = G(s) L(s),   G(s) = pi^{-d s/2} prod_i Gamma((s+mu_i)/2),
    Lambda(s) = sign * Lambda(1-s),

the transform F of f is defined through its Mellin transform

    MF(s) = sign * [G(s)/G(1-s)] * Mf(1-s),

and evaluated as a partial sum of residues of MF(s) x^{-s} over the
poles s0 = -e, e in {mu_i + 2j}.  A simple pole contributes
x^e * c; a double pole (colliding shift progressions) contributes
x^e * (c + l log x).  Laurent data is extracted by trapezoid quadrature
of MF over small circles |s - s0| = 1/4:

    A = (1/2 pi i) oint MF(s) (s-s0) ds   (order-2 part),
    B = (1/2 pi i) oint MF(s) ds          (order-1 part),

giving c = B and l = -A.

Performance: the circle nodes are shared by every pole, and along a
parity class of poles each gamma factor steps by Gamma(z-1) = Gamma(z)/(z-1)
or Gamma(z+1) = z Gamma(z).  So log-gamma is evaluated only at the first
pole of each class ("ladder bases") and the remaining ~10^5 gamma values
come from one multiplication each.  When the test-function degree m has a
gamma shift mu_j <= m of the same parity, the quotient
Gamma((1-s+m)/2) / Gamma((1-s+mu_j)/2) collapses to a finite Pochhammer
product, which both removes the spurious right-half-plane pole/zero pair
and drops one ladder.

An independent oracle, `quadrature_F`, evaluates the inverse Mellin
integral by trapezoid sums on a vertical line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .precision import (
    PoleError,
    PrecisionContext,
    TestFunction,
    log_gamma,
    mellin_of_test_function,
)

__all__ = [
    "ConvergenceError",
    "GammaFactorSystem",
    "QuadratureSpec",
    "TransformSeries",
    "decay_bound",
    "evaluate_F",
    "gamma_quotient",
    "mf_transform",
    "quadrature_F",
    "residue_series",
    "residue_series_family",
    "series_plan",
]

CIRCLE_RADIUS = Fraction(1, 4)


class ConvergenceError(ArithmeticError):
    """A truncated series or quadrature did not meet its tolerance."""


@dataclass(frozen=True)
class GammaFactorSystem:
    """Archimedean data of the functional equation.

    The defaults are the weight-12 level-1 symmetric-square parameters;
    they are configuration, not constants, and are validated end to end
    by the untwisted identity residual (wrong shifts or sign produce
    O(1) residuals there).
    """

    shifts: tuple[int, ...] = (1, 11, 12)
    sign: int = 1

    def __post_init__(self):
        if not self.shifts:
            raise ValueError("at least one gamma shift is required")
        if any(int(m) != m for m in self.shifts):
            raise ValueError(f"integer shifts required, got {self.shifts}")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +-1, got {self.sign}")
        object.__setattr__(self, "shifts", tuple(int(m) for m in self.shifts))

    @property
    def degree(self) -> int:
        return len(self.shifts)

    def pole_exponents(self, K: int) -> list[tuple[int, int]]:
        """(exponent e, pole order) for all poles with e <= max(shifts)+2K."""
        emax = max(self.shifts) + 2 * K
        hits: dict[int, int] = {}
        for mu in self.shifts:
            e = mu
            while e <= emax:
                hits[e] = hits.get(e, 0) + 1
                e += 2
        out = sorted(hits.items())
        if any(order > 2 for _, order in out):
            raise NotImplementedError("pole collisions of order > 2 are unsupported")
        return out

    def paired_shift(self, degree: int) -> int | None:
        """Largest shift mu_j <= degree with mu_j = degree (mod 2), if any."""
        candidates = [m for m in self.shifts if m <= degree and (degree - m) % 2 == 0]
        return max(candidates) if candidates else None

    def key(self) -> tuple:
        return (self.shifts, self.sign)


@dataclass(frozen=True)
class QuadratureSpec:
    """Vertical-line inverse-Mellin quadrature parameters."""

    sigma0: Fraction = Fraction(1, 2)
    T: int = 90
    steps: int = 4000

    def __post_init__(self):
        s = Fraction(self.sigma0)
        if not 0 < s < 1:
            raise ValueError(f"sigma0 must lie in (0,1), got {s}")
        if self.T <= 0 or self.steps < 8 or self.steps % 2:
            raise ValueError("need T > 0 and an even step count >= 8")
        object.__setattr__(self, "sigma0", s)


@dataclass
class TransformSeries:
    """Residue expansion F(x) ~ sum_k x^{e_k} (c_k + l_k log x)."""

    shifts: tuple[int, ...]
    sign: int
    precision_bits: int
    K: int
    test_function: TestFunction
    terms: list[tuple[int, object, object]] = field(default_factory=list)

    def exponents(self) -> list[int]:
        return [e for e, _, _ in self.terms]

    def to_json_dict(self, ctx: PrecisionContext) -> dict:
        return {
            "shifts": list(self.shifts),
            "sign": self.sign,
            "precision_bits": self.precision_bits,
            "K": self.K,
            "test_function": {
                "degree": self.test_function.degree,
                "scale": str(self.test_function.scale),
            },
            "terms": [
                {
                    "exponent": e,
                    "coeff": ctx.to_decimal(c),
                    "logcoeff": ctx.to_decimal(l),
                }
                for e, c, l in self.terms
            ],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "TransformSeries":
        ctx = PrecisionContext(data["precision_bits"])
        f = TestFunction(
            data["test_function"]["degree"], Fraction(data["test_function"]["scale"])
        )
        series = TransformSeries(
            shifts=tuple(data["shifts"]),
            sign=data["sign"],
            precision_bits=data["precision_bits"],
            K=data["K"],
            test_function=f,
        )
        series.terms = [
            (t["exponent"], ctx.mpf(t["coeff"]), ctx.mpf(t["logcoeff"]))
            for t in data["terms"]
        ]
        return series


# ----------------------------------------------------------------------
# pointwise Mellin-side evaluation
# ----------------------------------------------------------------------

def gamma_quotient(ctx: PrecisionContext, sys: GammaFactorSystem, s):
    """sign * G(s)/G(1-s), via log-gamma differences exponentiated once.

    Raises PoleError at poles of G(s); returns exact 0 at the zeros
    coming from poles of G(1-s).
    """
    mp = ctx.mp
    s = mp.mpc(s)
    d = sys.degree
    acc = mp.mpf(d) * (1 - 2 * s) / 2 * mp.log(mp.pi)
    for mu in sys.shifts:
        acc += log_gamma(ctx, (s + mu) / 2)  # PoleError propagates
    for mu in sys.shifts:
        try:
            acc -= log_gamma(ctx, (1 - s + mu) / 2)
        except PoleError:
            return mp.mpc(0)
    return sys.sign * mp.exp(acc)


def mf_transform(ctx: PrecisionContext, sys: GammaFactorSystem, f: TestFunction, s):
    """MF(s) = sign [G(s)/G(1-s)] Mf(1-s).

    When a gamma shift pairs with the test-function degree the singular
    quotient Gamma((1-s+m)/2)/Gamma((1-s+mu_j)/2) is replaced by its
    Pochhammer closed form, so only the genuine poles of MF raise.
    """
    mp = ctx.mp
    s = mp.mpc(s)
    m = f.degree
    j = sys.paired_shift(m)
    if j is None:
        q = gamma_quotient(ctx, sys, s)
        if q == 0:
            return mp.mpc(0)
        return q * mellin_of_test_function(ctx, f, 1 - s)
    d = sys.degree
    X = ctx.mpf(f.scale)
    acc = mp.mpf(d) * (1 - 2 * s) / 2 * mp.log(mp.pi)
    for mu in sys.shifts:
        acc += log_gamma(ctx, (s + mu) / 2)
    zero = False
    for mu in sys.shifts:
        if mu == j:
            continue
        try:
            acc -= log_gamma(ctx, (1 - s + mu) / 2)
        except PoleError:
            zero = True
    if zero:
        return mp.mpc(0)
    acc += (1 + m - s) / 2 * mp.log(X * X / mp.pi)
    poch = mp.mpc(1)
    base = (1 - s + j) / 2
    for i in range((m - j) // 2):
        poch *= base + i
    return sys.sign * mp.exp(acc) * poch / 2


# ----------------------------------------------------------------------
# residue extraction (ladder engine)
# ----------------------------------------------------------------------

def _circle_nodes(ctx: PrecisionContext, M: int):
    """Upper-half circle nodes delta_k = r e^{2 pi i k/M}, k = 0..M/2,
    with trapezoid fold weights (full circle = conjugate mirror)."""
    mp = ctx.mp
    r = ctx.mpf(CIRCLE_RADIUS)
    nodes = []
    for k in range(M // 2 + 1):
        theta = 2 * mp.pi * k / M
        delta = mp.mpc(r * mp.cos(theta), r * mp.sin(theta))
        w = 1 if k in (0, M // 2) else 2
        nodes.append((delta, w))
    return nodes


def residue_series_family(
    ctx: PrecisionContext,
    sys: GammaFactorSystem,
    family: list[TestFunction],
    K: int,
    circle_nodes: int | None = None,
) -> list[TransformSeries]:
    """Residue series for every test function of a family in one pass.

    All per-(pole, node) gamma data is family-independent and computed
    once; each atom then costs two real multiply-accumulates per node.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    wctx = ctx.with_guard(64)
    mp = wctx.mp
    M = circle_nodes or 64 * math.ceil(ctx.prec / 50)
    if M % 2:
        M += 1
    nodes = _circle_nodes(wctx, M)
    poles = sys.pole_exponents(K)
    degrees = sorted({f.degree for f in family})
    d = sys.degree
    lnpi = mp.log(mp.pi)
    pi2d = mp.pi ** (2 * d)

    # per-atom node factors E_k = (X^2/pi)^{-delta_k/2} and constants
    atom_data = []
    for f in family:
        X = wctx.mpf(f.scale)
        lnXX = mp.log(X * X / mp.pi)
        Ek = [mp.exp(-delta / 2 * lnXX) for delta, _ in nodes]
        atom_data.append((f, lnXX, Ek))

    # parity classes of poles
    classes: dict[int, list[tuple[int, int]]] = {}
    for e, order in poles:
        classes.setdefault(e % 2, []).append((e, order))

    acc: dict[tuple[int, int], tuple] = {}  # (atom_index, e) -> (A, B)
    for parity, plist in sorted(classes.items()):
        plist.sort()
        e0 = plist[0][0]
        # ladder state per node: numerator gammas at (delta - e + mu)/2,
        # denominator gammas at (1 + e - delta + mu)/2 (skipping shifts
        # paired away for every degree they pair with is NOT possible
        # globally, so denominators keep all shifts and the paired
        # degree contribution is handled through T-ladders below).
        num_args = [[(delta - e0 + mu) / 2 for delta, _ in nodes] for mu in sys.shifts]
        den_args = [[(1 + e0 - delta + mu) / 2 for delta, _ in nodes] for mu in sys.shifts]
        numg = [[mp.exp(log_gamma(wctx, a)) for a in args] for args in num_args]
        deng = [[mp.exp(log_gamma(wctx, a)) for a in args] for args in den_args]
        # per degree: T = Gamma((1 + e - delta + m)/2), laddered as well
        t_args = {m: [(1 + e0 - delta + m) / 2 for delta, _ in nodes] for m in degrees}
        tg = {
            m: [mp.exp(log_gamma(wctx, a)) for a in args]
            for m, args in t_args.items()
        }

        prev_e = e0
        for e, order in plist:
            steps = (e - prev_e) // 2
            for _ in range(steps):
                for i in range(len(sys.shifts)):
                    argsN, gN = num_args[i], numg[i]
                    argsD, gD = den_args[i], deng[i]
                    for k in range(len(nodes)):
                        a = argsN[k]
                        gN[k] = gN[k] / (a - 1)
                        argsN[k] = a - 1
                        b = argsD[k]
                        gD[k] = gD[k] * b
                        argsD[k] = b + 1
                for m in degrees:
                    argsT, gT = t_args[m], tg[m]
                    for k in range(len(nodes)):
                        b = argsT[k]
                        gT[k] = gT[k] * b
                        argsT[k] = b + 1
            prev_e = e

            # pole-level scalars: pi^{d/2 + d e}
            piscal = mp.exp((mp.mpf(d) / 2 + d * e) * lnpi)
            # complex per (node, m): V = prod numg / prod deng * T_m * pi^{-d delta}
            base_nodes = []
            for k, (delta, w) in enumerate(nodes):
                u = numg[0][k]
                for i in range(1, len(sys.shifts)):
                    u *= numg[i][k]
                den = deng[0][k]
                for i in range(1, len(sys.shifts)):
                    den *= deng[i][k]
                u = u / den * mp.exp(-d * delta * lnpi)
                base_nodes.append((u, delta, w))
            for ai, (f, lnXX, Ek) in enumerate(atom_data):
                m = f.degree
                consts = sys.sign * piscal * mp.exp(mp.mpf(1 + m + e) / 2 * lnXX) / 2
                accA = mp.mpf(0)
                accB = mp.mpf(0)
                for k, (u, delta, w) in enumerate(base_nodes):
                    v = u * tg[m][k] * Ek[k]
                    vb = v * delta
                    va = vb * delta
                    accA += w * va.real
                    accB += w * vb.real
                A = consts * accA / M
                B = consts * accB / M
                acc[(ai, e)] = (A, B, order)

    out = []
    noise_tol = mp.mpf(2) ** (-(ctx.prec // 3))
    for ai, (f, _, _) in enumerate(atom_data):
        terms = []
        for e, order in poles:
            A, B, _ = acc[(ai, e)]
            if order == 1:
                scale = max(abs(B), mp.mpf(2) ** (-ctx.prec * 8))
                if abs(A) > noise_tol * scale:
                    raise ArithmeticError(
                        f"unexpected log term at simple pole e={e}: |A|/|B|="
                        f"{wctx.nstr(abs(A) / scale, 5)}"
                    )
                A = mp.mpf(0)
            terms.append((e, B, -A))
        series = TransformSeries(
            shifts=sys.shifts,
            sign=sys.sign,
            precision_bits=ctx.prec,
            K=K,
            test_function=f,
            terms=terms,
        )
        out.append(series)
    return out


def residue_series(
    ctx: PrecisionContext,
    sys: GammaFactorSystem,
    f: TestFunction,
    K: int,
    circle_nodes: int | None = None,
) -> TransformSeries:
    return residue_series_family(ctx, sys, [f], K, circle_nodes)[0]


def _reference_laurent(ctx: PrecisionContext, sys, f, e: int, circle_nodes: int = 64):
    """Slow direct contour extraction at one pole (test oracle)."""
    mp = ctx.mp
    A = mp.mpc(0)
    B = mp.mpc(0)
    r = ctx.mpf(CIRCLE_RADIUS)
    for k in range(circle_nodes):
        theta = 2 * mp.pi * k / circle_nodes
        delta = r * mp.exp(1j * theta)
        v = mf_transform(ctx, sys, f, -e + delta)
        A += v * delta * delta
        B += v * delta
    return A / circle_nodes, B / circle_nodes


# ----------------------------------------------------------------------
# series evaluation
# ----------------------------------------------------------------------

def evaluate_F(ctx: PrecisionContext, series: TransformSeries, x, tol_abs=None):
    """Sum the residue series at x in fixed ascending-exponent order.

    Returns (value, tail_bound) with tail_bound = 10 * |last term|.
    Raises ConvergenceError unless the term magnitudes have decayed
    monotonically past their peak and the last term is below the
    tolerance (default: summation noise floor).
    """
    mp = ctx.mp
    x = ctx.mpf(x)
    if x <= 0:
        raise ValueError(f"F is evaluated on x > 0, got {x}")
    if not series.terms:
        raise ValueError("empty series")
    lx = mp.log(x)
    total = mp.mpf(0)
    peak = mp.mpf(0)
    mags = []
    prev_e = 0
    xpow = mp.mpf(1)
    for e, c, l in series.terms:
        xpow *= x ** (e - prev_e)
        prev_e = e
        term = xpow * (c + l * lx) if l else xpow * c
        total += term
        mag = abs(term)
        mags.append(mag)
        if mag > peak:
            peak = mag
    last = mags[-1]
    tail_bound = 10 * last
    if tol_abs is None:
        tol = 100 * peak * ctx.eps * len(mags)
    else:
        tol = ctx.mpf(tol_abs) / 10
    if last > tol:
        raise ConvergenceError(
            f"residue series unconverged at x={ctx.nstr(x, 8)}: "
            f"last term {ctx.nstr(last, 3)} > tolerance {ctx.nstr(tol, 3)}"
        )
    # monotone decay past the empirical peak
    ipeak = mags.index(peak)
    run = mags[ipeak:]
    bad = sum(1 for a, b in zip(run, run[1:]) if b > a)
    if len(run) > 3 and bad > len(run) // 3:
        raise ConvergenceError(
            f"residue series terms not decaying past peak at x={ctx.nstr(x, 8)}"
        )
    return total, tail_bound


# ----------------------------------------------------------------------
# quadrature oracle and decay bounds
# ----------------------------------------------------------------------

_line_cache: dict[tuple, list] = {}


def _line_values(ctx, sys, f, spec: QuadratureSpec):
    """MF(sigma0 + i t_k) on the nonnegative half line (cached)."""
    key = (sys.key(), f.key(), spec.sigma0, spec.T, spec.steps, ctx.prec)
    vals = _line_cache.get(key)
    if vals is None:
        mp = ctx.mp
        sigma0 = ctx.mpf(spec.sigma0)
        M = spec.steps
        h = mp.mpf(2 * spec.T) / M
        vals = []
        for k in range(M // 2 + 1):
            t = k * h
            s = mp.mpc(sigma0, t)
            w = 1 if k in (0, M // 2) else 2
            vals.append((t, w, mf_transform(ctx, sys, f, s)))
        if len(_line_cache) > 64:
            _line_cache.clear()
        _line_cache[key] = vals
    return vals


@dataclass
class QuadratureResult:
    value: object
    truncation_estimate: object
    step_estimate: object


def quadrature_F(
    ctx: PrecisionContext,
    sys: GammaFactorSystem,
    f: TestFunction,
    x,
    spec: QuadratureSpec = QuadratureSpec(),
) -> QuadratureResult:
    """F(x) = (1/2 pi i) int_(sigma0) MF(s) x^{-s} ds by trapezoid sums.

    The integrand is Hermitian-symmetric in t, so nodes with t >= 0 are
    evaluated and mirrored; the assembled integral is real by
    construction.  Truncation is monitored through the last integrand
    magnitude; the step estimate compares with the half-resolution sum.
    """
    mp = ctx.mp
    x = ctx.mpf(x)
    if x <= 0:
        raise ValueError("x must be positive")
    vals = _line_values(ctx, sys, f, spec)
    h = mp.mpf(2 * spec.T) / spec.steps
    lx = mp.log(x)
    sigma0 = ctx.mpf(spec.sigma0)
    xs = x ** (-sigma0)
    total = mp.mpf(0)
    half = mp.mpf(0)
    for idx, (t, w, mf) in enumerate(vals):
        osc = mp.exp(mp.mpc(0, -t * lx))
        term = (mf * osc).real * w
        total += term
        if idx % 2 == 0:
            half += term * (1 if idx in (0, len(vals) - 1) else 2) / 2
    value = xs * total * h / (2 * mp.pi)
    value_half = xs * half * (2 * h) / (2 * mp.pi)
    tail_mag = abs(vals[-1][2]) * xs
    # |MF| decays at least like exp(-pi t/4); bound the omitted tail
    trunc = tail_mag * 4 / mp.pi / (2 * mp.pi) * 2
    step = abs(value - value_half)
    if tail_mag > abs(value) * mp.mpf('1e-6') + mp.mpf(10) ** 10 * ctx.eps:
        # non-decaying integrand indicates a mis-set contour
        mid_mag = abs(vals[len(vals) // 2][2])
        if tail_mag > mid_mag:
            raise ConvergenceError(
                "integrand not decaying along the contour; check sigma0/T"
            )
    return QuadratureResult(value, trunc, step)


_bound_cache: dict[tuple, object] = {}


def decay_bound(ctx: PrecisionContext, sys, f: TestFunction, x, sigmas=None):
    """Upper bound for |F(x)|: min over sigma of x^{-sigma} C(sigma),

    C(sigma) = (1/2 pi) int |MF(sigma+it)| dt, valid whenever MF is
    analytic on [sigma0, sigma].  Coarse trapezoid with an exponential
    tail allowance; this is an estimate used to skip negligible F
    evaluations, and is reported as such.
    """
    mp = ctx.mp
    x = ctx.mpf(x)
    m = f.degree
    j = sys.paired_shift(m)
    if j is None:
        # right-half poles of Mf(1-s) survive at s = m+1, m+3, ...
        sigma_cap = m + Fraction(1, 2)
    else:
        sigma_cap = Fraction(10**6)
    if sigmas is None:
        sigmas = []
        s = Fraction(3, 2)
        while s <= sigma_cap and len(sigmas) < 12:
            sigmas.append(s)
            s *= 2
    best = None
    for sigma in sigmas:
        if sigma > sigma_cap:
            continue
        key = (sys.key(), f.key(), sigma, ctx.prec)
        C = _bound_cache.get(key)
        if C is None:
            T, M = 60, 240
            h = mp.mpf(T) / M
            tot = mp.mpf(0)
            for k in range(M + 1):
                s = mp.mpc(ctx.mpf(sigma), k * h)
                w = mp.mpf(1) if 0 < k < M else mp.mpf(1) / 2
                tot += w * abs(mf_transform(ctx, sys, f, s))
            # factor 2 for t<0, tail allowance via exp(-pi t/4) decay
            C = (2 * tot * h + abs(mf_transform(ctx, sys, f, mp.mpc(ctx.mpf(sigma), T)))
                 * 16 / mp.pi) / (2 * mp.pi)
            if len(_bound_cache) > 512:
                _bound_cache.clear()
            _bound_cache[key] = C
        val = x ** (-ctx.mpf(sigma)) * C
        if best is None or val < best:
            best = val
    return best


# ----------------------------------------------------------------------
# float-precision planning of (precision, K)
# ----------------------------------------------------------------------

def _ln_abs_gamma_half(z2: int) -> float:
    """ln |Gamma(z2/2)| for integer z2 (possibly <= 0 -> reflection)."""
    z = z2 / 2.0
    if z > 0:
        return math.lgamma(z)
    if z2 % 2 == 0:
        raise ValueError("gamma pole")
    # reflection: |Gamma(-nu)| = pi / (Gamma(1+nu) |sin(pi nu)|), half-int nu
    nu = -z
    return math.log(math.pi) - math.lgamma(1 + nu)


def _ln_coeff_bound(sys: GammaFactorSystem, f: TestFunction, e: int, order: int) -> float:
    """Float estimate of ln |residue coefficient| at pole exponent e."""
    d = sys.degree
    m = f.degree
    lnX2pi = 2 * math.log(float(f.scale)) - math.log(math.pi)
    ln = math.log(2.0)  # residue of Gamma(u/2)-type pole in s
    sing = 0
    for mu in sys.shifts:
        z2 = mu - e
        if z2 <= 0 and z2 % 2 == 0:
            j = (e - mu) // 2
            ln += math.log(2.0) - math.lgamma(j + 1)
            sing += 1
            if sing == order:
                # remaining shifts evaluate as ordinary gammas
                continue
        else:
            ln += _ln_abs_gamma_half(z2)
    ln += (d / 2 + d * e) * math.log(math.pi)
    ln += (1 + m + e) / 2 * lnX2pi - math.log(2.0)
    ln += math.lgamma((1 + e + m) / 2)
    for mu in sys.shifts:
        ln -= math.lgamma((1 + e + mu) / 2)
    if order == 2:
        ln += math.log(4.0 * math.log(e + 3.0) + 8.0)  # psi-term slack
    return ln


def series_plan(
    sys: GammaFactorSystem,
    family: list[TestFunction],
    x_max: float,
    ln_tol_abs: float,
    guard_bits: int = 64,
) -> tuple[int, int]:
    """(precision_bits, K) so every series of the family is evaluable at
    x <= x_max with absolute truncation/roundoff below exp(ln_tol_abs).

    Uses float log-magnitude scans of the residue coefficients; the
    resulting precision covers the peak-term cancellation and K covers
    term decay at x_max.
    """
    lnx = math.log(x_max)
    peak = -1e30
    e_needed = max(sys.shifts)
    for f in family:
        for e, order in sys.pole_exponents(4000):
            lt = _ln_coeff_bound(sys, f, e, order) + e * lnx
            if lt > peak:
                peak = lt
            if lt < ln_tol_abs - 3 * 2.302585:
                e_needed = max(e_needed, e)
                break
        else:
            raise ConvergenceError(
                f"series for {f.label()} does not decay below tolerance by e=8012"
            )
    prec = int((peak - ln_tol_abs) / math.log(2)) + guard_bits
    prec = max(prec, 96)
    K = max(1, (e_needed - min(sys.shifts)) // 2 + 2)
    return prec, K
