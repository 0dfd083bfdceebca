"""Tate parameter, Tate-curve parametrization, and the formal-group
logarithm of the minimal model.

Series are computed exactly over Z (or Q) and evaluated at capped-precision
p-adics, so precision loss only enters through the final evaluations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .curves import EllipticCurveData
from .padics import LogBranch, PadicScalar, QuadExtContext, QuadExtScalar


# ---------------------------------------------------------------- Z-series

@lru_cache(maxsize=None)
def _sigma_series(k: int, length: int):
    """[0, sigma_k(1), ..., sigma_k(length)]"""
    out = [0] * (length + 1)
    for d in range(1, length + 1):
        dk = d ** k
        for m in range(d, length + 1, d):
            out[m] += dk
    return tuple(out)


@lru_cache(maxsize=None)
def eisenstein_e4(length: int):
    s3 = _sigma_series(3, length)
    return tuple([1] + [240 * s3[n] for n in range(1, length + 1)])


@lru_cache(maxsize=None)
def eisenstein_e6(length: int):
    s5 = _sigma_series(5, length)
    return tuple([1] + [-504 * s5[n] for n in range(1, length + 1)])


def _poly_mul(a, b, length):
    out = [0] * (length + 1)
    for i, ai in enumerate(a):
        if ai == 0 or i > length:
            continue
        for j, bj in enumerate(b):
            if i + j > length:
                break
            if bj:
                out[i + j] += ai * bj
    return out


@lru_cache(maxsize=None)
def discriminant_series(length: int):
    """q * prod (1-q^n)^24, exactly, to the given length."""
    # eta product via repeated squaring of prod(1-q^n)
    base = [0] * (length + 1)
    base[0] = 1
    for n in range(1, length + 1):
        nxt = base[:]
        for i in range(length + 1 - n):
            if base[i]:
                nxt[i + n] -= base[i]
        base = nxt
    pw = base
    out = [1] + [0] * length
    for _ in range(24):
        out = _poly_mul(out, base, length)
    return tuple([0] + out[:length])


def _eval_series(coeffs, x: PadicScalar) -> PadicScalar:
    """Horner evaluation of an integer/Fraction coefficient series."""
    p, N = x.p, x.N
    acc = PadicScalar.zero(p, N + 8)
    for c in reversed(coeffs):
        acc = acc * x
        if c:
            acc = acc + PadicScalar.from_fraction(p, c, N + 8)
    return acc


# ------------------------------------------------------------ Tate parameter

def tate_parameter(E: EllipticCurveData, prec: int) -> PadicScalar:
    """The Tate period q with j(q) = j(E), by Newton iteration on the exact
    q-expansion E4^3 - j*Delta."""
    p = E.p
    vq = 0
    d = E.disc
    while d % p == 0:
        d //= p
        vq += 1
    if vq == 0:
        raise ValueError("good reduction at p; no Tate parameter")
    j = Fraction(E.c4 ** 3, E.disc)
    work = prec + 3 * vq + 6
    length = work // vq + 3
    e4 = eisenstein_e4(length)
    e43 = _poly_mul(_poly_mul(list(e4), list(e4), length), list(e4), length)
    delta = list(discriminant_series(length))
    coeffs = [Fraction(a) - j * b for a, b in zip(e43, delta)]
    dcoeffs = [n * coeffs[n] for n in range(1, len(coeffs))]
    q = PadicScalar.from_fraction(p, 1 / j, work)
    for _ in range(64):
        fval = _eval_series(coeffs, q)
        if fval.is_zero() or fval.valuation() >= prec + 2 * vq:
            break
        q = q - fval / _eval_series(dcoeffs, q)
    assert q.valuation() == vq
    return q.with_precision(min(q.N, prec + vq))


# ------------------------------------------------------- formal group series

@lru_cache(maxsize=None)
def formal_log_series(curve_key, length: int):
    """Coefficients [l_1, l_2, ...] of the formal logarithm of the minimal
    model, l_1 = 1, as exact Fractions.  curve_key = (a1, a2, a3, a4, a6)."""
    a1, a2, a3, a4, a6 = curve_key
    L = length + 4
    # w(z) = z^3 (1 + ...), solved by iteration
    w = [0, 0, 0, 1] + [0] * (L - 3)
    for _ in range(L):
        w2 = _poly_mul(w, w, L)
        w3 = _poly_mul(w2, w, L)
        new = [0] * (L + 1)
        new[3] = 1
        for i in range(L + 1):
            acc = new[i]
            if i >= 1:
                acc += a1 * w[i - 1]
            if i >= 2:
                acc += a2 * w[i - 2]
            acc += a3 * w2[i]
            if i >= 1:
                acc += a4 * w2[i - 1]
            acc += a6 * w3[i]
            new[i] = acc
        if new == w:
            break
        w = new
    # x = z/w, y = -1/w as Laurent series: z*w^{-1} and -w^{-1}
    # w = z^3*(1 + u(z)); invert 1 + u
    u = [Fraction(w[i + 3]) for i in range(L - 2)]
    u[0] = Fraction(0)
    inv = [Fraction(1)] + [Fraction(0)] * (L - 3)  # (1+u)^{-1}
    for n in range(1, L - 2):
        s = Fraction(0)
        for k in range(1, n + 1):
            if k < len(u) and u[k]:
                s -= u[k] * inv[n - k]
        inv[n] = s
    # omega = dx/(2y + a1 x + a3); compute via series in z
    # x(z) = z^{-2} * inv(z), y(z) = -z^{-3} * inv(z)
    # denominator: 2y + a1 x + a3 = z^{-3} * (-2*inv + a1 z inv + a3 z^3)
    den = [Fraction(-2) * c for c in inv]
    for i in range(len(inv) - 1):
        den[i + 1] += a1 * inv[i]
    if len(den) > 3:
        den[3] += a3
    # numerator: dx/dz = d/dz (z^{-2} inv) = z^{-3} * (-2*inv + z*inv')
    num = [Fraction(-2) * c for c in inv]
    for i in range(1, len(inv)):
        num[i] += i * inv[i]
    # omega/dz = num/den  (the z^{-3} factors cancel)
    series = _series_div(num, den, length)
    assert series[0] == 1
    return tuple(Fraction(series[n - 1], n) for n in range(1, length + 1))


def _series_div(num, den, length):
    assert den[0] != 0
    inv0 = Fraction(1, 1) / den[0]
    out = []
    rem = list(num) + [Fraction(0)] * max(0, length + 1 - len(num))
    for n in range(length + 1):
        c = rem[n] * inv0
        out.append(c)
        for k in range(1, len(den)):
            if n + k <= length:
                rem[n + k] -= c * den[k]
    return out


# ----------------------------------------------------- points over F_p / Q_p

def curve_add(E: EllipticCurveData, P, Q):
    """Chord-tangent addition on the minimal model; None encodes infinity."""
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    a1, a2, a3, a4, a6 = E.a1, E.a2, E.a3, E.a4, E.a6
    if (x1 - x2).is_zero():
        if (y1 + y2 + a1 * x1 + a3).is_zero():
            return None
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = lam * (x1 - x3) - y1 - a1 * x3 - a3
    return (x3, y3)


def curve_mul(E: EllipticCurveData, n: int, P):
    out, base = None, P
    while n:
        if n & 1:
            out = curve_add(E, out, base)
        base = curve_add(E, base, base)
        n >>= 1
    return out


def on_curve(E: EllipticCurveData, P) -> bool:
    if P is None:
        return True
    x, y = P
    lhs = y * y + E.a1 * x * y + E.a3 * y
    rhs = (x * x + E.a2 * x + E.a4) * x + E.a6
    return (lhs - rhs).is_zero()


def formal_log(E: EllipticCurveData, P, prec: int, ctx: QuadExtContext | None = None):
    """Formal-group logarithm on E(F_p): lambda([m]P)/m for the least m >= 1
    pushing P into the formal group.  P = None (the origin) gives 0."""
    if P is None:
        if ctx is None:
            raise ValueError("need a context to build the zero value")
        return ctx.one(prec) - ctx.one(prec)
    ctx = _ctx_of(P)
    vdisc = 0
    d = E.disc
    while d % E.p == 0:
        d //= E.p
        vdisc += 1
    mbound = 4 * (E.p ** 2 + 2 * E.p + 2) * max(1, vdisc)
    cur = P
    for m in range(1, mbound + 1):
        if cur is None:
            return ctx.one(prec) - ctx.one(prec)  # torsion maps to 0
        xc, yc = cur
        if (not xc.is_zero()) and xc.valuation() < 0 and yc.valuation() < 0:
            z = -xc / yc
            if z.valuation() >= 1:
                length = prec + prec // max(E.p - 1, 1) + 4
                lam = _eval_log_series(E, z, length)
                return lam * Fraction(1, m)
        cur = curve_add(E, cur, P)
    raise RuntimeError("no multiple landed in the formal group")


def _ctx_of(P):
    x, _ = P
    if isinstance(x, QuadExtScalar):
        return x.ctx
    raise TypeError("points must have QuadExtScalar coordinates")


def _eval_log_series(E: EllipticCurveData, z: QuadExtScalar, length: int):
    key = (E.a1, E.a2, E.a3, E.a4, E.a6)
    coeffs = formal_log_series(key, length)
    ctx = z.ctx
    N = z.precision()
    acc = ctx.one(N + 6) - ctx.one(N + 6)
    for c in reversed(coeffs):
        acc = acc * z
        if c:
            acc = acc + ctx.embed(PadicScalar.from_fraction(ctx.p, c, N + 6))
    return acc * z


# --------------------------------------------------------- Tate curve series

def _tate_a4_a6(q: PadicScalar, depth: int):
    s3 = _sigma_series(3, depth)
    s5 = _sigma_series(5, depth)
    p, N = q.p, q.N
    s3v = _eval_series([0] + [s3[n] for n in range(1, depth + 1)], q)
    s5v = _eval_series([0] + [s5[n] for n in range(1, depth + 1)], q)
    a4 = -5 * s3v
    a6 = (-5 * s3v - 7 * s5v) * Fraction(1, 12)
    return a4, a6


def tate_curve_invariants(q: PadicScalar, depth: int):
    """c4, c6 of the Tate curve y^2 + xy = x^3 + a4(q) x + a6(q): the
    Eisenstein series E4(q), -E6(q)."""
    e4 = eisenstein_e4(depth)
    e6 = eisenstein_e6(depth)
    c4 = _eval_series(list(e4), q)
    c6 = -_eval_series(list(e6), q)
    return c4, c6


def tate_point(q, u: QuadExtScalar, depth: int):
    """(X, Y) on the Tate curve for the parameter u (not a power of q)."""
    ctx = u.ctx
    one = ctx.one(u.precision() + 6)
    qe = ctx.embed(q)
    s1 = _sigma_series(1, depth)
    s1v = ctx.embed(_eval_series([0] + [s1[n] for n in range(1, depth + 1)],
                                 q))
    X = u / ((one - u) * (one - u))
    Y = (u * u) / ((one - u) ** 3)
    qn = one
    for _ in range(1, depth + 1):
        qn = qn * qe
        t1 = qn * u
        t2 = qn / u
        X = X + t1 / ((one - t1) * (one - t1)) + t2 / ((one - t2) * (one - t2))
        Y = Y + t1 * t1 / ((one - t1) ** 3) - t2 / ((one - t2) ** 3)
    X = X - 2 * s1v
    Y = Y + s1v
    return X, Y


def iso_tate_to_curve(E: EllipticCurveData, q: PadicScalar, ctx: QuadExtContext,
                      depth: int):
    """The Weierstrass transformation (u, r, s, t) carrying Tate-curve
    coordinates to the minimal model of E."""
    c4q, c6q = tate_curve_invariants(q, depth)
    lam2 = (PadicScalar.from_int(E.p, E.c6, q.N) * c4q) / \
           (PadicScalar.from_int(E.p, E.c4, q.N) * c6q)
    lam = _quad_sqrt(ctx, lam2)
    # (x, y) = (lam^2 x' + r, lam^3 y' + s lam^2 x' + t) maps Tate -> E with
    # lam*1 = a1 + 2s, 0 = a2 - s a1 + 3r - s^2, 0 = a3 + r a1 + 2t
    s = (lam - E.a1) * Fraction(1, 2)
    r = (ctx.embed(PadicScalar.from_int(E.p, -E.a2, q.N)) + s * E.a1 + s * s) \
        * Fraction(1, 3)
    t = (-r * E.a1 - E.a3) * Fraction(1, 2)
    return lam, r, s, t


def _quad_sqrt(ctx: QuadExtContext, a: PadicScalar) -> QuadExtScalar:
    """Square root of a scalar inside F_p (unit, possibly non-residue)."""
    v = a.valuation()
    if v % 2 != 0:
        raise ValueError("odd valuation has no square root in F_p")
    unit = a * PadicScalar(a.p, -v, 1, a.N + abs(v) + 2) if v else a
    rel = unit.N
    root = ctx.sqrt_of_int(unit.residue(rel), rel)
    if v:
        root = root * PadicScalar(a.p, v // 2, 1, a.N + abs(v) + 2)
    return root


def tate_to_curve_point(E, transform, XY):
    lam, r, s, t = transform
    X, Y = XY
    x = lam * lam * X + r
    y = lam ** 3 * Y + s * (lam * lam) * X + t
    return (x, y)


def log_conversion_constant(E: EllipticCurveData, q: PadicScalar,
                            ctx: QuadExtContext, prec: int):
    """kappa with formal_log(Phi_Tate(u)) = kappa * log_q(u): converts
    Tate-side logarithms into minimal-model formal-group units."""
    depth = prec // q.v + 2
    transform = iso_tate_to_curve(E, q, ctx, depth)
    branch = LogBranch(q)
    u0 = ctx.embed(PadicScalar.from_int(E.p, 1 + E.p, q.N))
    P = tate_to_curve_point(E, transform, tate_point(q, u0, depth))
    assert on_curve(E, P), "Tate parametrization image is off the curve"
    kappa = formal_log(E, P, prec) / branch.log(u0)
    u1 = ctx.embed(PadicScalar.from_fraction(E.p, Fraction(1 + E.p) ** 2, q.N))
    P1 = tate_to_curve_point(E, transform, tate_point(q, u1, depth))
    kappa1 = formal_log(E, P1, prec) / branch.log(u1)
    assert (kappa - kappa1).valuation() >= prec - 2, "conversion unstable"
    return kappa


# ----------------------------------------------------------- localization

def localize_short_point(E: EllipticCurveData, pt, ctx: QuadExtContext, prec: int):
    """Embed a GlobalPoint on the short model into E(F_p), in minimal-model
    coordinates."""
    p = E.p
    root = ctx.sqrt_of_int(pt.delta, prec) if pt.delta != 1 else ctx.one(prec)

    def emb(qr):
        a = ctx.embed(PadicScalar.from_fraction(p, qr.a, prec))
        b = ctx.embed(PadicScalar.from_fraction(p, qr.b, prec))
        return a + b * root

    X, Y = emb(pt.x), emb(pt.y)
    x = (X - 3 * E.b2) * Fraction(1, 36)
    y = (Y * Fraction(1, 108) - E.a1 * x - E.a3) * Fraction(1, 2)
    assert on_curve(E, (x, y)), "localized point is off the curve"
    return (x, y)
