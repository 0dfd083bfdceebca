from fractions import Fraction

import pytest

from starkheegner.curves import EllipticCurveData
from starkheegner.padics import LogBranch, PadicScalar, QuadExtContext
from starkheegner.tate import (
    curve_add,
    curve_mul,
    discriminant_series,
    eisenstein_e4,
    formal_log,
    formal_log_series,
    iso_tate_to_curve,
    log_conversion_constant,
    on_curve,
    tate_curve_invariants,
    tate_parameter,
    tate_point,
    tate_to_curve_point,
    _tate_a4_a6,
)


def E15():
    return EllipticCurveData(1, 1, 1, -10, -10, conductor=15, p=5, label="15x")


def E21():
    return EllipticCurveData(1, 0, 0, -4, -1, conductor=21, p=7, label="21x")


PREC = 9


# ------------------------------------------------------------- Tate period

def test_tate_parameter_valuation():
    E = E15()
    q = tate_parameter(E, PREC)
    v = 0
    d = E.disc
    while d % 5 == 0:
        d //= 5
        v += 1
    assert q.valuation() == v  # v(q) = -v(j) = v(disc)


def test_tate_parameter_j_contract():
    E = E15()
    q = tate_parameter(E, PREC)
    length = q.N // q.v + 6  # longer series than the solver used
    from starkheegner.tate import _eval_series, _poly_mul
    e4 = list(eisenstein_e4(length))
    e43 = _poly_mul(_poly_mul(e4, e4, length), e4, length)
    delta = list(discriminant_series(length))
    j = Fraction(E.c4 ** 3, E.disc)
    num = _eval_series(e43, q)
    den = _eval_series(delta, q)
    diff = num - den * PadicScalar.from_fraction(5, j, q.N + 8)
    assert diff.is_zero() or diff.valuation() >= PREC


def test_tate_parameter_good_reduction_rejected():
    E = EllipticCurveData(0, 0, 1, -1, 0, conductor=37, p=37)
    q = tate_parameter(E, 6)  # 37 is the multiplicative prime here
    assert q.valuation() == 1
    E2 = EllipticCurveData(1, 0, 0, -4, -1, conductor=21, p=7)
    E2.disc = 25  # simulate good reduction at p
    with pytest.raises(ValueError):
        tate_parameter(E2, 4)


# ------------------------------------------------------------ formal group

def test_formal_log_series_leading_terms():
    # for y^2 = x^3 + ... the log starts z + a1/2 z^2 + ...
    key = (0, 0, 0, -1, 0)  # y^2 = x^3 - x
    coeffs = formal_log_series(key, 8)
    assert coeffs[0] == 1
    assert coeffs[1] == 0
    # lambda'(z) = 1 + c1 z + ...: for y^2 = x^3 - x the z^4 coefficient of
    # omega is 2*a4... known expansion: omega = (1 - 2 a4 z^4 + ...) hmm just
    # pin down oddness: odd curve => even coefficients vanish
    assert coeffs[1] == 0 and coeffs[3] == 0


def test_formal_log_homomorphism():
    E = E15()
    ctx = QuadExtContext(5, 14)
    # a point in the formal group: x of valuation -2
    # pick z with v(z) = 1 and solve on the formal curve via series x=z/w...
    # easier: take a random point over F_p by solving for y via sqrt
    P = _find_point(E, ctx)
    lp = formal_log(E, P, PREC)
    for n in (2, 3, 5):
        Q = curve_mul(E, n, P)
        lq = formal_log(E, Q, PREC)
        diff = lq - n * lp
        assert diff.is_zero() or diff.valuation() >= PREC - 1, n


def _find_point(E, ctx):
    # solve y^2 + (a1x+a3) y = rhs(x) over F_p for successive x
    p = ctx.p
    for xi in range(2, 40):
        x = ctx.embed(PadicScalar.from_int(p, xi, ctx.N))
        lin = E.a1 * x + E.a3
        rhs = (x * x + E.a2 * x + E.a4) * x + E.a6
        disc = lin * lin + 4 * rhs
        if disc.is_zero():
            continue
        d0 = disc.a.residue(1) if disc.is_scalar() else None
        if d0 is None or d0 == 0:
            continue
        if pow(d0, (p - 1) // 2, p) == 1:
            root = ctx.sqrt_of_int(disc.a.residue(disc.a.N), ctx.N)
            y = (root - lin) * Fraction(1, 2)
            if on_curve(E, (x, y)):
                return (x, y)
    raise RuntimeError("no point found")


def test_formal_log_kills_torsion():
    # (0,0) is 2-torsion on y^2 = x^3 - x... use a curve in our list:
    # E15 has rational torsion; find a small torsion point over Q
    E = E15()
    ctx = QuadExtContext(5, 12)
    # (x, y) = (-2, 3val?) search small rational torsion by brute force
    from fractions import Fraction as F
    tors = None
    for xi in range(-10, 11):
        rhs = 4 * (xi ** 3 + E.a2 * xi * xi + E.a4 * xi + E.a6) + \
            (E.a1 * xi + E.a3) ** 2
        if rhs >= 0:
            import math
            r = math.isqrt(rhs)
            if r * r == rhs and (r - E.a1 * xi - E.a3) % 2 == 0:
                y = (r - E.a1 * xi - E.a3) // 2
                P = (F(xi), F(y))
                # torsion iff [2520]P = O (Mazur)
                from starkheegner.curves import point_order_divides
                # transfer to short model to reuse the exact helper
                A, B = E.short_model()
                Xs = F(36 * xi + 3 * E.b2)
                Ys = F(108 * (2 * y + E.a1 * xi + E.a3))
                if point_order_divides(A, B, (Xs, Ys), 2520):
                    tors = (xi, y)
                    break
    assert tors is not None
    x = ctx.embed(PadicScalar.from_int(5, tors[0], ctx.N))
    y = ctx.embed(PadicScalar.from_int(5, tors[1], ctx.N))
    val = formal_log(E, (x, y), 8)
    assert val.is_zero() or val.valuation() >= 8


# --------------------------------------------------------------- Tate curve

def test_tate_point_on_tate_curve():
    E = E15()
    q = tate_parameter(E, PREC)
    ctx = QuadExtContext(5, q.N)
    depth = PREC // q.v + 3
    u = ctx.embed(PadicScalar.from_int(5, 1 + 5, q.N))
    X, Y = tate_point(q, u, depth)
    a4, a6 = _tate_a4_a6(q, depth)
    lhs = Y * Y + X * Y
    rhs = X * X * X + X * ctx.embed(a4) + ctx.embed(a6)
    diff = lhs - rhs
    assert diff.is_zero() or diff.valuation() >= PREC - 1


def test_iso_lands_on_curve():
    for E in (E15(), E21()):
        p = E.p
        q = tate_parameter(E, PREC)
        ctx = QuadExtContext(p, q.N)
        depth = PREC // q.v + 3
        transform = iso_tate_to_curve(E, q, ctx, depth)
        for u0 in (1 + p, 1 + 2 * p, 1 + p * p):
            u = ctx.embed(PadicScalar.from_int(p, u0, q.N))
            P = tate_to_curve_point(E, transform, tate_point(q, u, depth))
            assert on_curve(E, P), (E.label, u0)


def test_log_conversion_constant_matches_formal_log():
    # the spec invariant: formal_log = kappa * log_q on the Tate side
    for E in (E15(), E21()):
        p = E.p
        q = tate_parameter(E, PREC + 2)
        ctx = QuadExtContext(p, q.N)
        kappa = log_conversion_constant(E, q, ctx, PREC)
        assert kappa.valuation() == 0  # unit conversion factor
        branch = LogBranch(q)
        depth = (PREC + 2) // q.v + 3
        transform = iso_tate_to_curve(E, q, ctx, depth)
        u = ctx.embed(PadicScalar.from_fraction(p, Fraction(1 + 3 * p), q.N))
        P = tate_to_curve_point(E, transform, tate_point(q, u, depth))
        lhs = formal_log(E, P, PREC)
        rhs = kappa * branch.log(u)
        diff = lhs - rhs
        assert diff.is_zero() or diff.valuation() >= PREC - 2


def test_split_vs_nonsplit_conversion_field():
    # kappa is rational iff the reduction is split (lambda^2 a square)
    for E in (E15(), E21()):
        q = tate_parameter(E, 8)
        ctx = QuadExtContext(E.p, q.N)
        kappa = log_conversion_constant(E, q, ctx, 6)
        if E.a_p == 1:      # split multiplicative
            assert kappa.is_scalar()
        else:               # nonsplit: conversion involves omega
            assert not kappa.is_scalar()
