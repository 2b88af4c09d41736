"""Nonnegative separable approximations of binomial coefficients.

Pipeline: a binomial ratio near a fixed column is written as gamma^t times a
low-degree polynomial (exact rational coefficients, built from power-sum
polynomials); the polynomial in x+y is split into a sum of products Q(x)R(y)
that are individually nonnegative on the window; windows are tiled over a
large grid of (x, y) offsets; finally the factors are quantized to integers.
Every inequality the downstream encoder relies on is certified here by exact
rational comparison on the full integer grid — no floating point anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .model import CapError, CertificationError, ConfigError, ParameterError

_F0 = Fraction(0)
_F1 = Fraction(1)


def approx_repr(value):
    """Reporting-only rendering of an exact rational (may be astronomically
    precise); all certification comparisons happen on the exact values."""
    if value is None:
        return None
    try:
        return float(value)
    except OverflowError:
        num, den = value.numerator, value.denominator
        return "~2^%d" % (num.bit_length() - den.bit_length())


class WindowBudgetError(CertificationError):
    """Constant term cannot absorb the negative monomials; shrink the window."""


# ---------------------------------------------------------------------------
# exact polynomials
#
# Coefficients are kept as integer numerators over one shared denominator;
# this keeps the gcd work out of the hot multiply loops.


class RationalPoly:
    __slots__ = ("nums", "den")

    def __init__(self, nums, den=1, normalize=True):
        nums = list(nums)
        while nums and nums[-1] == 0:
            nums.pop()
        if den < 0:
            den = -den
            nums = [-c for c in nums]
        if den == 0:
            raise ZeroDivisionError("polynomial denominator")
        if normalize and nums:
            g = den
            for c in nums:
                g = math.gcd(g, c)
                if g == 1:
                    break
            if g > 1:
                nums = [c // g for c in nums]
                den //= g
        self.nums = nums
        self.den = den

    @classmethod
    def from_fractions(cls, coeffs):
        coeffs = [Fraction(c) for c in coeffs]
        den = 1
        for c in coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls([int(c * den) for c in coeffs], den)

    @property
    def coefficients(self):
        return tuple(Fraction(c, self.den) for c in self.nums)

    @property
    def degree(self):
        return len(self.nums) - 1

    def __eq__(self, other):
        return (
            isinstance(other, RationalPoly)
            and self.coefficients == other.coefficients
        )

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return "RationalPoly(%r)" % (self.coefficients,)

    def __add__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly.from_fractions([Fraction(other)])
        den = self.den * other.den // math.gcd(self.den, other.den)
        fa = den // self.den
        fb = den // other.den
        n = max(len(self.nums), len(other.nums))
        nums = [0] * n
        for i, c in enumerate(self.nums):
            nums[i] += c * fa
        for i, c in enumerate(other.nums):
            nums[i] += c * fb
        return RationalPoly(nums, den)

    def __mul__(self, other):
        if isinstance(other, RationalPoly):
            if not self.nums or not other.nums:
                return RationalPoly([], 1)
            out = [0] * (len(self.nums) + len(other.nums) - 1)
            for i, a in enumerate(self.nums):
                if a:
                    for j, b in enumerate(other.nums):
                        out[i + j] += a * b
            return RationalPoly(out, self.den * other.den)
        other = Fraction(other)
        return RationalPoly(
            [c * other.numerator for c in self.nums], self.den * other.denominator
        )

    __rmul__ = __mul__

    def shift(self, delta):
        """Substitute t -> t + delta (integer delta)."""
        n = len(self.nums)
        out = [0] * n
        for i, c in enumerate(self.nums):
            if c:
                p = 1
                for k in range(i, -1, -1):
                    out[k] += c * math.comb(i, k) * p
                    p *= delta
        return RationalPoly(out, self.den)

    def eval(self, t):
        t = Fraction(t)
        acc = _F0
        for c in reversed(self.nums):
            acc = acc * t + c
        return acc / self.den

    def eval_int(self, t):
        """Exact value at an integer point (Horner over ints)."""
        acc = 0
        for c in reversed(self.nums):
            acc = acc * t + c
        return Fraction(acc, self.den)

    def abs_eval(self, z):
        """Sum of |coefficient| * z^i — the coefficient-mass functional."""
        z = Fraction(z)
        acc = _F0
        p = _F1
        for c in self.nums:
            acc += abs(c) * p
            p *= z
        return acc / self.den


def bernoulli(k):
    """Exact Bernoulli number with the positive convention (index 1 -> +1/2)."""
    return _bernoulli_row(k)[k]


def _bernoulli_row(k):
    # Akiyama–Tanigawa transform; yields B_n with B_1 = +1/2 directly
    if k < 0:
        raise ParameterError("negative index")
    out = []
    row = []
    for m in range(k + 1):
        row.append(Fraction(1, m + 1))
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        out.append(row[0])
    return out


def faulhaber_poly(j):
    """Polynomial S with S(t) = 1^j + 2^j + ... + t^j, degree j+1."""
    if j < 1:
        raise ParameterError("power-sum exponent must be >= 1")
    bern = _bernoulli_row(j)
    coeffs = [_F0] * (j + 2)
    for k in range(j + 1):
        coeffs[j - k + 1] = Fraction(math.comb(j + 1, k), j + 1) * bern[k]
    return RationalPoly.from_fractions(coeffs)


# ---------------------------------------------------------------------------
# local window approximation


@dataclass(frozen=True)
class ApproxConfig:
    window_scale: Fraction = Fraction(1, 2)
    retries: int = 4
    r_factor: int = 16
    eps_scale: Fraction = Fraction(1, 2)  # cell-mode slack reserved for quantization
    max_grid: int = 1 << 22
    max_terms: int = 1 << 20
    rect_mode: str = "poly"  # poly | cells
    relax_geometry: bool = False


def _exp_truncated(p1, d):
    """sum_{i=0..d} p1^i / i!  via Horner: 1 + p1/1 (1 + p1/2 (...))."""
    acc = RationalPoly([1], 1)
    for i in range(d, 0, -1):
        acc = acc * p1 * Fraction(1, i) + 1
    return acc


@dataclass(frozen=True)
class LocalApprox:
    """Certified window approximation around one binomial column.

    ratio(t) := C(l, alpha*l + t) / C(l, alpha*l) is approximated by
    gamma^t * P(t) on t in [0, 2*window_M], with the guarantee
    (1 - epsilon) * ratio <= gamma^t * P(t) <= ratio.  P(x+y) further splits
    into products Q(x)R(y), each nonnegative on [0, window_M]^2.
    """

    l: int
    alpha: Fraction
    d: int
    window_scale: Fraction
    window_M: int
    gamma: Fraction
    poly: RationalPoly  # P
    poly2: RationalPoly  # P before the (1 - eps/2) damping
    epsilon: Fraction
    budget_lhs: Fraction
    budget_rhs: Fraction

    @property
    def anchor(self):
        return int(self.alpha * self.l)

    @property
    def scale(self):
        """C(l, anchor) * 2^-l."""
        return Fraction(math.comb(self.l, self.anchor), 1 << self.l)

    def value(self, t):
        """gamma^t * P(t): the certified approximation of ratio(t)."""
        return self.gamma**t * self.poly.eval_int(t)

    def product_count(self):
        n = 1
        coeffs = self.poly.coefficients
        for t in range(1, len(coeffs)):
            if coeffs[t] != 0:
                n += (t + 1) * (1 if coeffs[t] > 0 else 2)
        return n

    def iter_products(self):
        """Yield (Q, R) factor pairs; sum of Q(x)R(y) == P(x+y) identically."""
        coeffs = self.poly.coefficients
        M = self.window_M
        residue = coeffs[0]
        for t in range(1, len(coeffs)):
            p = coeffs[t]
            if p < 0:
                residue -= abs(p) * Fraction((2 * M) ** t)
        yield _Factor.const(residue), _Factor.const(_F1)
        for t in range(1, len(coeffs)):
            p = coeffs[t]
            if p == 0:
                continue
            for a in range(t + 1):
                b = t - a
                beta = p * math.comb(t, a)
                if p > 0:
                    yield _Factor.power(beta, a), _Factor.power(_F1, b)
                else:
                    hb = abs(beta) / 2
                    yield _Factor.mixed(hb, a, -1, M), _Factor.mixed(_F1, b, +1, M)
                    yield _Factor.mixed(hb, a, +1, M), _Factor.mixed(_F1, b, -1, M)


@dataclass(frozen=True)
class _Factor:
    """One side of a separable product: c, c*v^e, or c*(M^e + s*v^e)."""

    coeff: Fraction
    exp: int = 0
    sign: int = 0  # 0: plain power (or constant when exp==0); else mixed form
    M: int = 0

    @classmethod
    def const(cls, c):
        return cls(Fraction(c))

    @classmethod
    def power(cls, c, e):
        return cls(Fraction(c), e)

    @classmethod
    def mixed(cls, c, e, sign, M):
        return cls(Fraction(c), e, sign, M)

    def value(self, v):
        if self.sign == 0:
            return self.coeff * v**self.exp if self.exp else self.coeff
        return self.coeff * (Fraction(self.M) ** self.exp + self.sign * v**self.exp)


def _window_from_scale(scale, alpha, l):
    inner = Fraction(scale) ** 2 * alpha * l
    return math.isqrt(inner.numerator // inner.denominator)


def local_approx(l, alpha, d, window_scale=Fraction(1, 4), window_M=None):
    """Build and budget-check the window approximation at one anchor."""
    alpha = Fraction(alpha)
    if not 0 < alpha <= Fraction(1, 2):
        raise ParameterError("alpha must be in (0, 1/2]")
    if (alpha * l).denominator != 1:
        raise ParameterError("alpha*l must be an integer anchor")
    if d < 2:
        raise ParameterError("expansion depth must be at least 2")
    if window_M is None:
        window_M = _window_from_scale(window_scale, alpha, l)
    if window_M < 1:
        raise ParameterError("window too small; increase window_scale or l")
    if int(alpha * l) + 2 * window_M > l:
        raise ParameterError("window pokes past the end of the row")

    al = alpha * l
    bl = (1 - alpha) * l
    p1 = RationalPoly([], 1)
    for j in range(1, d):
        s_j = faulhaber_poly(j)
        term = s_j.shift(-1) * (-Fraction(1, j) * bl**-j)
        term = term + s_j * (Fraction(1, j) * (-al) ** -j)
        p1 = p1 + term
    p2 = _exp_truncated(p1, d)

    epsilon = Fraction(1 << 8, 1 << d) if d >= 8 else Fraction(1 << (8 - d))
    poly = p2 * (1 - epsilon / 2)

    coeffs2 = p2.coefficients
    lhs = coeffs2[0]
    rhs = _F0
    two_m = Fraction(2 * window_M)
    p = two_m
    for t in range(1, len(coeffs2)):
        rhs += abs(coeffs2[t]) * p
        p *= two_m
    approx = LocalApprox(
        l=l,
        alpha=alpha,
        d=d,
        window_scale=Fraction(window_scale),
        window_M=window_M,
        gamma=(1 - alpha) / alpha,
        poly=poly,
        poly2=p2,
        epsilon=epsilon,
        budget_lhs=lhs,
        budget_rhs=rhs,
    )
    if lhs < rhs:
        raise WindowBudgetError(
            "constant term cannot pay for the negative monomials; "
            "shrink the window scale",
            witness={
                "l": l,
                "alpha": str(alpha),
                "d": d,
                "window_M": window_M,
                "lhs": str(lhs),
                "rhs": str(rhs),
            },
        )
    return approx


def check_sandwich(approx, exhaustive=True):
    """Exact two-sided check of the approximation over its window.

    Returns (ok, witness, max_rel_deviation) where deviation measures how far
    inside the corridor the approximation sits.
    """
    l, anchor = approx.l, approx.anchor
    base = math.comb(l, anchor)
    worst = _F0
    for t in range(0, 2 * approx.window_M + 1):
        ratio = Fraction(math.comb(l, anchor + t), base)
        got = approx.value(t)
        if not (1 - approx.epsilon) * ratio <= got <= ratio:
            return False, {"t": t, "ratio": approx_repr(ratio), "approx": approx_repr(got)}, None
        dev = (ratio - got) / ratio
        if dev > worst:
            worst = dev
    return True, None, worst


# ---------------------------------------------------------------------------
# tiling the large grid


@dataclass(frozen=True)
class _Rect:
    ax: int
    bx: int
    ay: int
    by: int
    flipped: bool  # anchored at the upper corner via column symmetry
    approx: LocalApprox = None  # None in cell mode
    cell_value: Fraction = None  # cell mode: the single scaled product value

    def offsets(self, x, y):
        if self.flipped:
            return self.bx - x, self.by - y
        return x - self.ax, y - self.ay

    def w_value(self, x, y):
        """Sum of this tile's products at (x, y) — zero outside the tile."""
        if not (self.ax <= x <= self.bx and self.ay <= y <= self.by):
            return _F0
        if self.approx is None:
            return self.cell_value if (x, y) == (self.ax, self.ay) else _F0
        dx, dy = self.offsets(x, y)
        return self.approx.scale * self.approx.value(dx + dy)


@dataclass(frozen=True)
class RectDecomp:
    """Grid-wide nonnegative separable approximation of C(l, l/2+x+y)*2^-l."""

    l: int
    M_x: int
    M_y: int
    eps: Fraction
    mode: str
    rectangles: tuple
    r: int
    config: ApproxConfig = field(repr=False, default_factory=ApproxConfig)

    def rect_at(self, x, y):
        for rect in self.rectangles:
            if rect.ax <= x <= rect.bx and rect.ay <= y <= rect.by:
                return rect
        raise ParameterError("point (%d, %d) outside the grid" % (x, y))

    def w_value(self, x, y):
        return self.rect_at(x, y).w_value(x, y)

    def exact_value(self, x, y):
        return Fraction(math.comb(self.l, self.l // 2 + x + y), 1 << self.l)

    def residual(self, x, y):
        return self.exact_value(x, y) - self.w_value(x, y)

    def iter_factor_tables(self):
        """Yield (q_table, r_table) per product: exact factor values over the
        tile sides, already scaled so every entry lies in [0, 1]."""
        for rect in self.rectangles:
            xs = range(rect.ax, rect.bx + 1)
            ys = range(rect.ay, rect.by + 1)
            if rect.approx is None:
                yield (
                    {rect.ax: rect.cell_value},
                    {rect.ay: _F1},
                )
                continue
            ap = rect.approx
            gamma, scale = ap.gamma, ap.scale
            for qf, rf in ap.iter_products():
                r_vals = {}
                c_max = _F0
                for y in ys:
                    _, dy = rect.offsets(rect.ax, y)
                    v = gamma**dy * rf.value(dy)
                    r_vals[y] = v
                    if v > c_max:
                        c_max = v
                if c_max == 0:
                    continue
                q_vals = {}
                for x in xs:
                    dx, _ = rect.offsets(x, rect.ay)
                    q_vals[x] = c_max * scale * gamma**dx * qf.value(dx)
                yield q_vals, {y: v / c_max for y, v in r_vals.items()}


def _grid_cells(m):
    return 2 * m + 1


def rect_decompose(l, M_x, M_y, eps, config=None):
    """Tile [-M_x,M_x] x [-M_y,M_y] with certified window approximations."""
    config = config or ApproxConfig()
    eps = Fraction(eps)
    if l % 2:
        raise ParameterError("row length must be even")
    if M_x < 0 or M_y < 0:
        raise ParameterError("grid radii must be nonnegative")
    if eps <= 0:
        raise ParameterError("eps must be positive")
    if not config.relax_geometry and (l <= 8 * M_x or l <= 8 * M_y):
        raise ParameterError("grid too wide for the row length (need l > 8*M)")
    if _grid_cells(M_x) * _grid_cells(M_y) > config.max_grid:
        raise CapError("max_grid", _grid_cells(M_x) * _grid_cells(M_y), config.max_grid)

    if config.rect_mode == "cells":
        rects = _decompose_cells(l, M_x, M_y, eps, config)
    elif config.rect_mode == "poly":
        rects = _decompose_poly(l, M_x, M_y, eps, config)
    else:
        raise ConfigError("unknown rect_mode %r" % config.rect_mode)

    r = 0
    for rect in rects:
        r += 1 if rect.approx is None else rect.approx.product_count()
    rd = RectDecomp(
        l=l,
        M_x=M_x,
        M_y=M_y,
        eps=eps,
        mode=config.rect_mode,
        rectangles=tuple(rects),
        r=r,
        config=config,
    )
    report = certify_rect(rd)
    if not report["pass"]:
        raise CertificationError(
            "grid approximation failed certification", witness=report
        )
    return rd


def _decompose_cells(l, M_x, M_y, eps, config):
    """One tile per grid point; the product is the exact value, damped."""
    damp = 1 - eps * config.eps_scale
    if damp <= 0:
        raise ParameterError("eps too large for cell mode")
    rects = []
    for x in range(-M_x, M_x + 1):
        for y in range(-M_y, M_y + 1):
            v = damp * Fraction(math.comb(l, l // 2 + x + y), 1 << l)
            rects.append(_Rect(ax=x, bx=x, ay=y, by=y, flipped=False, cell_value=v))
    return rects


def _decompose_poly(l, M_x, M_y, eps, config):
    d = max(9, 8 + max(1, (Fraction(1) / eps).numerator.bit_length() - 1))
    # epsilon of the window lemma must not exceed the requested eps
    while Fraction(1 << 8, 1 << d) > eps:
        d += 1
    scale = Fraction(config.window_scale)
    last_err = None
    for _ in range(max(1, config.retries)):
        side = _window_from_scale(scale, Fraction(1, 4), l)
        if side < 1:
            break
        try:
            return _tile_with_side(l, M_x, M_y, d, side)
        except WindowBudgetError as exc:
            last_err = exc
            scale /= 2
    raise WindowBudgetError(
        "no window scale in the retry budget certifies this grid",
        witness=getattr(last_err, "witness", None),
    )


def _tile_with_side(l, M_x, M_y, d, side):
    cache = {}

    def anchored(anchor):
        if anchor not in cache:
            cache[anchor] = local_approx(
                l, Fraction(anchor, l), d, window_M=side
            )
        return cache[anchor]

    rects = []
    step = side + 1
    for ax in range(-M_x, M_x + 1, step):
        bx = min(ax + side, M_x)
        for ay in range(-M_y, M_y + 1, step):
            by = min(ay + side, M_y)
            if ax + ay <= 0:
                approx = anchored(l // 2 + ax + ay)
                rects.append(_Rect(ax, bx, ay, by, flipped=False, approx=approx))
            else:
                approx = anchored(l // 2 - bx - by)
                rects.append(_Rect(ax, bx, ay, by, flipped=True, approx=approx))
    return rects


def certify_rect(rd):
    """Exact full-grid certification of the tiling invariants."""
    checks = []
    witness = None
    max_row = _F0
    neg_ok = True
    combs = {}
    for u in range(-rd.M_x - rd.M_y, rd.M_x + rd.M_y + 1):
        combs[u] = Fraction(math.comb(rd.l, rd.l // 2 + u), 1 << rd.l)

    for x in range(-rd.M_x, rd.M_x + 1):
        row = _F0
        for y in range(-rd.M_y, rd.M_y + 1):
            e = combs[x + y] - rd.w_value(x, y)
            if e < 0:
                neg_ok = False
                witness = witness or {"x": x, "y": y, "E": approx_repr(e)}
                break
            row += e
        if not neg_ok:
            break
        if row > max_row:
            max_row = row
    checks.append({"name": "residual_nonnegative", "pass": neg_ok, "witness": witness})
    row_ok = neg_ok and max_row <= rd.eps
    checks.append(
        {
            "name": "row_mass",
            "pass": row_ok,
            "max_row": approx_repr(max_row),
            "bound": approx_repr(rd.eps),
        }
    )
    geom = max(1, 2 * rd.M_x + 1) * max(1, 2 * rd.M_y + 1)
    # expansion depth that realizes this eps drives the per-tile product count
    logeps = 8 + max(1, (Fraction(1) / rd.eps).numerator.bit_length() - 1)
    r_bound = rd.config.r_factor * -(-geom * logeps**4 // rd.l)
    checks.append(
        {"name": "term_count", "pass": rd.r <= r_bound, "r": rd.r, "bound": r_bound}
    )
    return {
        "lemma": "grid_tiling",
        "params": {"l": rd.l, "M_x": rd.M_x, "M_y": rd.M_y, "eps": str(rd.eps)},
        "pass": all(c["pass"] for c in checks),
        "checks": checks,
        "r": rd.r,
    }


# ---------------------------------------------------------------------------
# integer quantization


@dataclass(frozen=True)
class IntegerDecomp:
    """Integer-weighted indicator terms approximating C(l,l/2+x+y)*2^{-l+w}."""

    l: int
    w: int
    mode: str  # dyadic | direct
    M_x: int
    M_y: int
    eps: Fraction
    terms: tuple  # (weight, frozenset X, frozenset Y)
    r: int
    r_source: int  # product count of the tiling it was quantized from

    def term_sum(self, x, y):
        acc = 0
        for weight, xs, ys in self.terms:
            if x in xs and y in ys:
                acc += weight
        return acc

    def exact_value(self, x, y):
        return Fraction(
            math.comb(self.l, self.l // 2 + x + y) << self.w, 1 << self.l
        )

    def row_bound(self):
        return self.eps * (1 << self.w) + 4 * self.r_source * self.M_y * (
            1 << (self.w // 2)
        )


def integer_terms(rd, w, mode="dyadic", config=None):
    """Quantize a grid tiling into integer-weighted indicator terms."""
    config = config or rd.config
    if w % 2 or w < 2:
        raise ParameterError("word size must be even and at least 2")
    half = w // 2
    if mode not in ("dyadic", "direct"):
        raise ConfigError("unknown integer-term mode %r" % mode)
    est = rd.r * (half * half if mode == "dyadic" else 1)
    if est > config.max_terms:
        raise CapError("max_terms", est, config.max_terms)

    terms = []
    top = (1 << half) - 1
    # Normalized factors peak at exactly 1, whose floor would need bit
    # position w/2; saturating at 2^{w/2}-1 keeps the bitwise expansion
    # inside w/2 positions and can only shrink terms (residual stays >= 0).
    for q_vals, r_vals in rd.iter_factor_tables():
        qa = {x: min(int(v * (1 << half)), top) for x, v in q_vals.items()}
        ra = {y: min(int(v * (1 << half)), top) for y, v in r_vals.items()}
        if mode == "direct":
            for qv in sorted(set(qa.values())):
                if qv == 0:
                    continue
                xs = frozenset(x for x, v in qa.items() if v == qv)
                for rv in sorted(set(ra.values())):
                    if rv == 0:
                        continue
                    ys = frozenset(y for y, v in ra.items() if v == rv)
                    terms.append((qv * rv, xs, ys))
        else:
            for j1 in range(half):
                xs = frozenset(x for x, v in qa.items() if (v >> j1) & 1)
                if not xs:
                    continue
                for j2 in range(half):
                    ys = frozenset(y for y, v in ra.items() if (v >> j2) & 1)
                    if not ys:
                        continue
                    terms.append((1 << (j1 + j2), xs, ys))

    dec = IntegerDecomp(
        l=rd.l,
        w=w,
        mode=mode,
        M_x=rd.M_x,
        M_y=rd.M_y,
        eps=rd.eps,
        terms=tuple(terms),
        r=len(terms),
        r_source=rd.r,
    )
    report = certify_integer(dec)
    if not report["pass"]:
        raise CertificationError("integer quantization failed", witness=report)
    return dec


def certify_integer(dec):
    checks = []
    witness = None
    neg_ok = True
    max_row = _F0
    grid_sums = {}
    for weight, xs, ys in dec.terms:
        for x in xs:
            for y in ys:
                grid_sums[(x, y)] = grid_sums.get((x, y), 0) + weight
    for x in range(-dec.M_x, dec.M_x + 1):
        row = _F0
        for y in range(-dec.M_y, dec.M_y + 1):
            e = dec.exact_value(x, y) - grid_sums.get((x, y), 0)
            if e < 0:
                neg_ok = False
                witness = witness or {"x": x, "y": y, "E": approx_repr(e)}
                break
            row += e
        if not neg_ok:
            break
        if row > max_row:
            max_row = row
    checks.append({"name": "residual_nonnegative", "pass": neg_ok, "witness": witness})
    bound = dec.row_bound()
    row_ok = neg_ok and max_row <= bound
    checks.append(
        {"name": "row_mass", "pass": row_ok, "max_row": approx_repr(max_row), "bound": approx_repr(bound)}
    )
    weights_ok = all(
        weight > 0 and not isinstance(weight, Fraction) for weight, _, _ in dec.terms
    )
    checks.append({"name": "integer_weights", "pass": weights_ok})
    if dec.mode == "dyadic":
        cap = dec.r_source * (dec.w // 2) ** 2
        checks.append({"name": "dyadic_count", "pass": dec.r <= cap, "r": dec.r, "bound": cap})
    return {
        "lemma": "integer_terms",
        "params": {"l": dec.l, "w": dec.w, "mode": dec.mode},
        "pass": all(c["pass"] for c in checks),
        "checks": checks,
        "r": dec.r,
    }


def verify_decomp(obj):
    """Uniform certification entry point; returns a JSON-ready report."""
    if isinstance(obj, LocalApprox):
        ok, witness, worst = check_sandwich(obj)
        checks = [
            {"name": "sandwich", "pass": ok, "witness": witness,
             "max_rel_deviation": None if worst is None else approx_repr(worst)},
            {"name": "budget", "pass": obj.budget_lhs >= obj.budget_rhs,
             "lhs": approx_repr(obj.budget_lhs), "rhs": approx_repr(obj.budget_rhs)},
            {"name": "product_count",
             "pass": obj.product_count() <= obj.d**4 + obj.d**2 + 1,
             "r": obj.product_count(), "bound": obj.d**4 + obj.d**2 + 1},
        ]
        return {
            "lemma": "window_approx",
            "params": {"l": obj.l, "alpha": str(obj.alpha), "d": obj.d,
                       "window_M": obj.window_M},
            "pass": all(c["pass"] for c in checks),
            "checks": checks,
            "r": obj.product_count(),
        }
    if isinstance(obj, RectDecomp):
        return certify_rect(obj)
    if isinstance(obj, IntegerDecomp):
        return certify_integer(obj)
    raise ParameterError("unknown decomposition object %r" % type(obj).__name__)
