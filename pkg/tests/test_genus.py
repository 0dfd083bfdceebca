import math

import pytest

from starkheegner.arith import kronecker
from starkheegner.genus import (
    QuadDirichletChar,
    attach_genus_data,
    char_sign,
    character_conductor,
    enumerate_quadratic_chars,
    frobenius_class,
    gauss_sum,
    gauss_sum_numeric,
    genus_decompose,
    is_primitive,
    kernel_of_pushforward,
    kronecker_eval,
    order_by_sign,
    pushforward_class,
    split_primes,
)
from starkheegner.quadforms import NarrowClassGroup


def G(D, c=1):
    return NarrowClassGroup(D, c)


# ------------------------------------------------------------- enumeration

def test_char_counts():
    assert len(enumerate_quadratic_chars(G(13))) == 1       # trivial group
    assert len(enumerate_quadratic_chars(G(40))) == 2       # Z/2
    assert len(enumerate_quadratic_chars(G(13, 3))) == 2
    # rank-2 example: disc 480 = 4*120, h+ = ... pick one with (2,2) quotient
    g = G(60, 7)
    n2 = sum(1 for i in range(g.order) if g.compose(i, i) == g.identity)
    assert len(enumerate_quadratic_chars(g)) == n2  # duality with 2-torsion


def test_chars_are_homomorphisms():
    for D, c in ((40, 1), (13, 3), (5, 7), (60, 7)):
        g = G(D, c)
        for chi in enumerate_quadratic_chars(g):
            assert chi(g.identity) == 1
            for i in range(g.order):
                for j in range(g.order):
                    assert chi(g.compose(i, j)) == chi(i) * chi(j)


# ------------------------------------------------------------- kronecker

def test_kronecker_examples():
    assert kronecker_eval(5, 1) == 1
    assert kronecker_eval(13, 5) == -1
    assert kronecker_eval(40, 3) == 1
    with pytest.raises(ValueError):
        kronecker_eval(7, 3)  # 7 = 3 mod 4 is not a discriminant


def test_kronecker_multiplicative_and_periodic():
    for delta in (5, -3, 13, -39, 40, 65):
        psi = QuadDirichletChar(delta) if delta % 4 in (0, 1) else None
        for m in range(1, 40):
            for n in range(1, 40):
                assert kronecker(delta, m * n) == kronecker(delta, m) * kronecker(delta, n)
            assert kronecker(delta, m) == kronecker(delta, m + abs(delta) * 4)


# ------------------------------------------------------------ pushforwards

def test_pushforward_is_group_hom():
    gc, gf = G(13, 3), G(13, 1)
    for i in range(gc.order):
        for j in range(gc.order):
            a = pushforward_class(gc, gf, gc.compose(i, j))
            b = gf.compose(pushforward_class(gc, gf, i),
                           pushforward_class(gc, gf, j))
            assert a == b


def test_pushforward_respects_frobenius():
    for D, c in ((13, 3), (5, 7), (40, 3)):
        gc, gf = G(D, c), G(D, 1)
        for ell in split_primes(gc, 2 * D * c, 8):
            assert pushforward_class(gc, gf, frobenius_class(gc, ell)) == \
                frobenius_class(gf, ell)


def test_kernel_size():
    gc, gf = G(13, 3), G(13, 1)
    ker = kernel_of_pushforward(gc, gf)
    assert len(ker) == gc.order // gf.order  # surjectivity


# ------------------------------------------------------------- primitivity

def test_primitivity_c1():
    for chi in enumerate_quadratic_chars(G(40)):
        assert is_primitive(chi)


def test_primitivity_d13_c3():
    chars = enumerate_quadratic_chars(G(13, 3))
    # trivial character factors through c=1 (h(13)=1); the other does not
    ker = kernel_of_pushforward(G(13, 3), G(13, 1))
    for chi in chars:
        if chi.is_trivial():
            assert not is_primitive(chi) or G(13, 3).order == 1
            assert character_conductor(chi) == 1
        else:
            assert is_primitive(chi) == any(chi(i) == -1 for i in ker)


def test_lifted_character_not_primitive():
    # lift a character of Pic+(O_1) for D=40 to conductor 3 and check
    gc, gf = G(40, 3), G(40, 1)
    lift_values = []
    chi_f = enumerate_quadratic_chars(gf)[1]
    assert not chi_f.is_trivial()
    for i in range(gc.order):
        lift_values.append(chi_f(pushforward_class(gc, gf, i)))
    import starkheegner.genus as genus_mod
    lifted = genus_mod.RingClassCharacter(gc, tuple(lift_values))
    assert not is_primitive(lifted)


# ---------------------------------------------------------------- genus pair

def test_genus_trivial_char_c1():
    chi = enumerate_quadratic_chars(G(13))[0]
    pair = genus_decompose(chi)
    assert sorted(pair) == [1, 13]


def test_genus_d40_nontrivial():
    chars = enumerate_quadratic_chars(G(40))
    chi = next(ch for ch in chars if not ch.is_trivial())
    pair = genus_decompose(chi)
    assert sorted(pair) == [5, 8]


def test_genus_d13_c3_primitive():
    chars = enumerate_quadratic_chars(G(13, 3))
    chi = next(ch for ch in chars if not ch.is_trivial())
    assert is_primitive(chi)
    pair = genus_decompose(chi)
    assert sorted(pair) == [-39, -3]


def test_genus_resample_consistency():
    for D, c in ((13, 3), (40, 1), (5, 7)):
        for chi in enumerate_quadratic_chars(G(D, c)):
            attach_genus_data(chi)
            d1, d2 = chi.genus_pair
            f = chi.conductor
            avoid = 2 * D * c * max(f, 1)
            fresh = split_primes(chi.group, avoid, 25, skip=25)
            for ell in fresh:
                got = chi(frobenius_class(chi.group, ell))
                assert got == kronecker(d1, ell) == kronecker(d2, ell)


def test_characters_identity_on_prime_sample():
    for D, c in ((13, 3), (40, 1)):
        for chi in enumerate_quadratic_chars(G(D, c)):
            attach_genus_data(chi)
            d1, d2 = chi.genus_pair
            for ell in range(3, 1000):
                if not all(ell % q for q in range(2, ell)):
                    continue
                if c % ell == 0 or D % ell == 0 or abs(d1) % ell == 0:
                    continue
                assert kronecker(D, ell) == kronecker(d1, ell) * kronecker(d2, ell)


# ------------------------------------------------------------------- sign

def test_sign_trivial_char():
    chi = enumerate_quadratic_chars(G(13))[0]
    assert char_sign(chi) == 1


def test_sign_matches_genus_positivity():
    for D, c in ((13, 3), (40, 1), (5, 7), (21, 1)):
        for chi in enumerate_quadratic_chars(G(D, c)):
            attach_genus_data(chi)
            d1, d2 = chi.genus_pair
            assert (chi.sign == 1) == (d1 > 0 and d2 > 0)


# ------------------------------------------------------------- Gauss sums

def test_gauss_sum_exact_and_numeric():
    for delta in (5, -3, 40, -39, 13):
        psi = QuadDirichletChar(delta)
        kind, mag = gauss_sum(psi)
        want = math.sqrt(mag) * (1 if kind == "real" else 1j)
        got = gauss_sum_numeric(psi)
        assert abs(got - want) < 1e-10
    with pytest.raises(ValueError):
        QuadDirichletChar(45)


# ------------------------------------------------------------ sign ordering

def test_order_by_sign():
    # product of the two Kronecker values at -N is -1, so exactly one order
    N = 15
    pair = (-7, -259)  # genus pair of the primitive character for D=37, c=7
    for w_n in (1, -1):
        d1, d2 = order_by_sign(w_n, N, pair)
        assert -w_n * kronecker(d1, -N) == -1
        assert -w_n * kronecker(d2, -N) == +1
        assert kronecker(d1, -N) * kronecker(d2, -N) == -1
