"""Test-only oracle: ideal arithmetic in a real quadratic order.

Proper O-ideals are stored by a Z-basis in coordinates against (1, w) with
w = (b0 + sqrt(disc))/2.  Multiplication is lattice multiplication followed
by 2x2 Hermite reduction; the oriented-basis dictionary converts back to a
form.  Used to cross-check Dirichlet composition.
"""

import math
from fractions import Fraction


def _hnf_2d(rows):
    """Hermite normal form of the lattice spanned by integer coordinate rows."""
    rows = [list(r) for r in rows if any(r)]
    # eliminate second coordinate down to one generator by gcd
    while True:
        rows.sort(key=lambda r: (r[1] == 0, abs(r[1])))
        nz = [r for r in rows if r[1] != 0]
        if len(nz) <= 1:
            break
        a, b = nz[0], nz[1]
        q = b[1] // a[1]
        b[0] -= q * a[0]
        b[1] -= q * a[1]
        rows = [r for r in rows if any(r)]
    top = next(r for r in rows if r[1] != 0)
    g = 0
    for r in rows:
        if r[1] == 0:
            g = math.gcd(g, r[0])
    assert g != 0
    top[0] %= g
    return (g, 0), tuple(top)


class QuadOrderIdeal:
    def __init__(self, disc, basis):
        self.disc = disc
        self.b0 = disc % 2
        self.basis = basis  # two (x, y) coordinate pairs against (1, w)

    @classmethod
    def from_form(cls, disc, A, B):
        # lattice [A, (-B + sqrt(disc))/2]; needs A > 0
        assert A > 0
        return cls(disc, ((A, 0), ((-B - disc % 2) // 2, 1)))

    def multiply(self, other):
        assert self.disc == other.disc
        b0 = self.b0
        w2_lin, w2_const = b0, (self.disc - b0 * b0) // 4  # w^2 = b0*w + const
        prods = []
        for x1, y1 in self.basis:
            for x2, y2 in other.basis:
                const = x1 * x2 + y1 * y2 * w2_const
                lin = x1 * y2 + y1 * x2 + y1 * y2 * w2_lin
                prods.append((const, lin))
        return QuadOrderIdeal(self.disc, _hnf_2d(prods))

    def to_form(self):
        """Oriented-basis dictionary: Q(x,y) = N(x*alpha + y*beta)/N(ideal),
        basis ordered so (alpha*conj(beta) - conj(alpha)*beta)/sqrt(disc) > 0."""
        (x1, y1), (x2, y2) = self.basis
        m = y1 * x2 - x1 * y2
        if m < 0:
            (x1, y1), (x2, y2) = (x2, y2), (x1, y1)
            m = -m
        b0 = self.b0
        nw = (b0 * b0 - self.disc) // 4  # N(w)

        def norm(x, y):
            return x * x + x * y * b0 + y * y * nw

        A = Fraction(norm(x1, y1), m)
        C = Fraction(norm(x2, y2), m)
        B = Fraction(norm(x1 + x2, y1 + y2), m) - A - C
        assert A.denominator == B.denominator == C.denominator == 1
        return int(A), int(B), int(C)
