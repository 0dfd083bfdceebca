"""Integral binary quadratic forms of positive discriminant and the narrow
class group of a real quadratic order.

Everything here is exact integer arithmetic: indefinite reduction cycles
decide SL2(Z)-equivalence, Dirichlet composition gives the group law, and the
continued-fraction expansion of (b + sqrt(D))/2 produces fundamental units.
Real-embedding comparisons go through surd_sign, never floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import (
    MAT_ID,
    divisors,
    factorize,
    is_fundamental_discriminant,
    is_square,
    kronecker,
    mat_inv,
    mat_mul,
    prime_divisors,
    surd_sign,
    xgcd,
)


class BQF:
    """Primitive integral form A x^2 + B xy + C y^2 of positive non-square
    discriminant."""

    __slots__ = ("A", "B", "C", "disc")

    def __init__(self, A: int, B: int, C: int):
        d = B * B - 4 * A * C
        if d <= 0 or is_square(d):
            raise ValueError("discriminant must be positive and non-square")
        if math.gcd(math.gcd(A, B), C) != 1:
            raise ValueError("form is not primitive")
        self.A, self.B, self.C = A, B, C
        self.disc = d

    def tuple(self):
        return (self.A, self.B, self.C)

    def __eq__(self, other):
        return isinstance(other, BQF) and self.tuple() == other.tuple()

    def __hash__(self):
        return hash(self.tuple())

    def __repr__(self):
        return "BQF(%d, %d, %d)" % self.tuple()

    def __call__(self, x: int, y: int) -> int:
        return self.A * x * x + self.B * x * y + self.C * y * y

    def apply(self, g) -> "BQF":
        """Right action (Q|g)(x, y) = Q(ax+by, cx+dy) for g = (a, b, c, d)."""
        a, b, c, d = g
        A2 = self(a, c)
        C2 = self(b, d)
        B2 = 2 * (self.A * a * b + self.C * c * d) + self.B * (a * d + b * c)
        return BQF(A2, B2, C2)

    def inverse_form(self) -> "BQF":
        return BQF(self.A, -self.B, self.C)

    def is_reduced(self) -> bool:
        f = math.isqrt(self.disc)
        B, absA = self.B, abs(self.A)
        return 0 < B <= f and 2 * absA + B >= f + 1 and 2 * absA - B <= f

    def reduction_step(self):
        """One step of the Gauss rho operator; returns (form, witness)."""
        f = math.isqrt(self.disc)
        C = self.C
        twoC = 2 * abs(C)
        Bn = f - ((f + self.B) % twoC)
        s = (self.B + Bn) // (2 * C)
        Cn = (Bn * Bn - self.disc) // (4 * C)
        return BQF(C, Bn, Cn), (0, -1, 1, s)

    def reduce(self):
        """Reduce to a form on its cycle; returns (reduced, witness)."""
        form, g = self, MAT_ID
        for _ in range(10 ** 6):
            if form.is_reduced():
                return form, g
            form, step = form.reduction_step()
            g = mat_mul(g, step)
        raise RuntimeError("reduction did not terminate")  # pragma: no cover

    def cycle(self):
        """The full rho-cycle of reduced forms equivalent to this one."""
        start, _ = self.reduce()
        out = [start]
        cur, _ = start.reduction_step()
        while cur != start:
            out.append(cur)
            cur, _ = cur.reduction_step()
        return out

    def content_root(self) -> tuple:
        """Exact surd data of tau = (-B + sqrt(disc)) / (2A)."""
        return (-self.B, 1, self.disc, 2 * self.A)


def principal_form(disc: int) -> BQF:
    b = disc % 2
    return BQF(1, b, (b * b - disc) // 4)


def compose_forms(Q1: BQF, Q2: BQF) -> BQF:
    """Dirichlet composition of primitive forms of equal discriminant."""
    if Q1.disc != Q2.disc:
        raise ValueError("discriminant mismatch")
    a1, b1, c1 = Q1.tuple()
    a2, b2, c2 = Q2.tuple()
    disc = Q1.disc
    s = (b1 + b2) // 2
    g1, u1, v1 = xgcd(a1, a2)
    m, u2, w = xgcd(g1, s)
    u, v = u2 * u1, u2 * v1
    A3 = a1 * a2 // (m * m)
    num = u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + disc) // 2
    B3 = (num // m) % (2 * A3)
    C3 = (B3 * B3 - disc) // (4 * A3)
    return BQF(A3, B3, C3)


def sl2_witness(Q1: BQF, Q2: BQF):
    """A matrix g in SL2(Z) with Q1|g = Q2, or None."""
    if Q1.disc != Q2.disc:
        raise ValueError("discriminant mismatch")
    r1, g1 = Q1.reduce()
    r2, g2 = Q2.reduce()
    cur, h = r1, MAT_ID
    while True:
        if cur == r2:
            g = mat_mul(mat_mul(g1, h), mat_inv(g2))
            assert Q1.apply(g) == Q2
            return g
        cur, step = cur.reduction_step()
        h = mat_mul(h, step)
        if cur == r1:
            return None


def fundamental_automorph(Q: BQF):
    """Generator (up to sign) of the proper automorphs of Q, from the
    fundamental norm-(+1) Pell solution of t^2 - disc*u^2 = 4."""
    t, u = plus_unit(Q.disc)
    g = ((t - Q.B * u) // 2, -Q.C * u, Q.A * u, (t + Q.B * u) // 2)
    assert Q.apply(g) == Q
    return g


def forms_equivalent(Q1: BQF, Q2: BQF, level_m: int | None = None):
    """Equivalence test; witness returned.  level_m=None means SL2(Z),
    otherwise Gamma0(level_m)."""
    g0 = sl2_witness(Q1, Q2)
    if g0 is None:
        return False, None
    if level_m is None or level_m == 1:
        return True, g0
    M = level_m
    aut = fundamental_automorph(Q2)
    pow_exact = MAT_ID
    seen = set()
    while True:
        cur = mat_mul(g0, pow_exact)
        if cur[2] % M == 0:
            assert Q1.apply(cur) == Q2
            return True, cur
        state = tuple(x % M for x in pow_exact)
        if state in seen:
            return False, None
        seen.add(state)
        pow_exact = mat_mul(pow_exact, aut)


# ------------------------------------------------------------- units / Pell

def fundamental_unit(disc: int):
    """Fundamental unit > 1 of the order of discriminant disc, as (x, y)
    with unit = (x + y*sqrt(disc))/2 and x^2 - disc*y^2 = +-4."""
    b0 = disc % 2
    f = math.isqrt(disc)
    P, Q = b0, 2
    states = {}
    hist = []
    i = 0
    while (P, Q) not in states:
        states[(P, Q)] = i
        a = (P + f) // Q
        hist.append(a)
        P = a * Q - P
        Q = (disc - P * P) // Q
        i += 1
    j = states[(P, Q)]
    # matrix of the purely periodic tail, conjugated back to the start
    g_pre = MAT_ID
    for a in hist[:j]:
        g_pre = mat_mul(g_pre, (a, 1, 1, 0))
    n_mat = MAT_ID
    for a in hist[j:]:
        n_mat = mat_mul(n_mat, (a, 1, 1, 0))
    m = mat_mul(mat_mul(g_pre, n_mat), _gl2_inv(g_pre))
    c, d = m[2], m[3]
    x, y = c * b0 + 2 * d, c
    if surd_sign(x, y, disc) < 0:
        x, y = -x, -y
    norm4 = x * x - disc * y * y
    assert norm4 in (4, -4)
    # unit > 1 is automatic for the cycle matrix; check anyway
    assert surd_sign(x - 2, y, disc) > 0
    return x, y


def _gl2_inv(g):
    a, b, c, d = g
    det = a * d - b * c
    assert det in (1, -1)
    return (d * det, -b * det, -c * det, a * det)


def unit_norm(disc: int, xy) -> int:
    x, y = xy
    return (x * x - disc * y * y) // 4


def _unit_square(disc: int, xy):
    x, y = xy
    return ((x * x + disc * y * y) // 2, x * y)


def plus_unit(disc: int):
    """Fundamental solution of t^2 - disc*u^2 = +4 with t, u > 0 (the
    totally positive fundamental unit of the order)."""
    xy = fundamental_unit(disc)
    if unit_norm(disc, xy) == -1:
        xy = _unit_square(disc, xy)
    return xy


def totally_positive_unit(D: int, c: int):
    """Smallest totally positive unit > 1 of O_c, as (x, y) against sqrt(Dc^2)."""
    if not is_fundamental_discriminant(D) or D <= 1:
        raise ValueError("D must be a fundamental discriminant > 1")
    return plus_unit(D * c * c)


def unit_index(D: int, c: int) -> int:
    """[O_F^x : O_c^x] = least k with eps_F^k in O_c (exact power test)."""
    if c == 1:
        return 1
    x, y = fundamental_unit(D)
    xk, yk = x, y
    k = 1
    while yk % c != 0:
        # multiply by (x + y sqrt(D))/2
        xk, yk = (xk * x + yk * y * D) // 2, (xk * y + yk * x) // 2
        k += 1
        if k > 6 * c * c:  # pragma: no cover
            raise RuntimeError("unit index search exceeded bound")
    return k


# --------------------------------------------------------- narrow class group

def reduced_forms(disc: int):
    """All reduced primitive forms of the given positive discriminant."""
    f = math.isqrt(disc)
    out = []
    B = 2 - (disc % 2)  # smallest positive B with right parity
    while B <= f:
        n = (disc - B * B) // 4
        for absA in divisors(n):
            if 2 * absA + B >= f + 1 and 2 * absA - B <= f:
                absC = n // absA
                for A, C in ((absA, -absC), (-absA, absC)):
                    if math.gcd(math.gcd(A, B), C) == 1:
                        out.append(BQF(A, B, C))
        B += 2
    return out


class NarrowClassGroup:
    """SL2(Z)-classes of primitive forms of discriminant D*c^2 with the
    Gauss composition group law (a model of Pic^+(O_c))."""

    def __init__(self, D: int, c: int):
        if not is_fundamental_discriminant(D) or D <= 1:
            raise ValueError("D must be a fundamental discriminant > 1")
        if c < 1 or math.gcd(c, D) != 1:
            raise ValueError("need c >= 1 coprime to D")
        self.D, self.c = D, c
        self.disc = D * c * c
        forms = reduced_forms(self.disc)
        seen = set()
        cycles = []
        for q in forms:
            if q.tuple() in seen:
                continue
            cyc = q.cycle()
            cycles.append(cyc)
            seen.update(f.tuple() for f in cyc)
        reps = [min(cyc, key=BQF.tuple) for cyc in cycles]
        order = sorted(range(len(reps)), key=lambda i: reps[i].tuple())
        self.cycles = [cycles[i] for i in order]
        self.reps = [reps[i] for i in order]
        self._where = {}
        for idx, cyc in enumerate(self.cycles):
            for q in cyc:
                self._where[q.tuple()] = idx
        self.order = len(self.reps)
        self.identity = self.class_of(principal_form(self.disc))
        self.table = [[self.class_of(compose_forms(self.reps[i], self.reps[j]))
                       for j in range(self.order)] for i in range(self.order)]
        self.inverse = [self.class_of(self.reps[i].inverse_form())
                        for i in range(self.order)]

    def class_of(self, Q: BQF) -> int:
        if Q.disc != self.disc:
            raise ValueError("wrong discriminant")
        red, _ = Q.reduce()
        return self._where[red.tuple()]

    def compose(self, i: int, j: int) -> int:
        return self.table[i][j]

    def power(self, i: int, n: int) -> int:
        if n < 0:
            return self.power(self.inverse[i], -n)
        out = self.identity
        for _ in range(n):
            out = self.compose(out, i)
        return out

    def element_order(self, i: int) -> int:
        n, cur = 1, i
        while cur != self.identity:
            cur = self.compose(cur, i)
            n += 1
        return n

    def check_group_axioms(self) -> bool:
        """Exhaustive closure/associativity/identity/inverse check."""
        h = self.order
        for i in range(h):
            if self.compose(self.identity, i) != i or self.compose(i, self.identity) != i:
                return False
            if self.compose(i, self.inverse[i]) != self.identity:
                return False
            for j in range(h):
                if not 0 <= self.table[i][j] < h:
                    return False
                if self.table[i][j] != self.table[j][i]:
                    return False
                for k in range(h):
                    if (self.compose(self.compose(i, j), k)
                            != self.compose(i, self.compose(j, k))):
                        return False
        return True

    def to_json_dict(self):
        return {
            "version": 1,
            "D": self.D,
            "c": self.c,
            "delta": None,
            "M": None,
            "reps": [list(q.tuple()) for q in self.reps],
            "table": self.table,
        }


def narrow_class_number_oracle(D: int, c: int) -> int:
    """Independent class-number-formula evaluation of h_c^+.

    h(D) comes from the analytic class number formula (character sum against
    log sin), the conductor-c correction from the standard index formula, and
    the narrow factor from the norm of the fundamental unit of O_c.
    """
    x, y = fundamental_unit(D)
    log_eps = math.log((x + y * math.sqrt(D)) / 2)
    total = math.fsum(-kronecker(D, a) * math.log(2 * math.sin(math.pi * a / D))
                      for a in range(1, D) if math.gcd(a, D) == 1)
    h_f = round(total / (2 * log_eps))
    ratio = Fraction(c)
    for ell in prime_divisors(c):
        ratio *= Fraction(ell - kronecker(D, ell), ell)
    h_c = Fraction(h_f) * ratio / unit_index(D, c)
    assert h_c.denominator == 1
    h_c = int(h_c)
    eps_c = fundamental_unit(D * c * c)
    return h_c if unit_norm(D * c * c, eps_c) == -1 else 2 * h_c


# ------------------------------------------------------------- Heegner forms

def choose_delta(D: int, c: int, M: int) -> int:
    """Smallest delta >= 0 with delta^2 = D mod 4M (Heegner hypothesis)."""
    for ell in prime_divisors(M):
        if kronecker(D, ell) != 1:
            raise ValueError("Heegner hypothesis fails at M: %d not split" % ell)
    if M % 2 == 0 and D % 8 != 1:
        raise ValueError("Heegner hypothesis fails at M: 2 requires D = 1 mod 8")
    for delta in range(2 * M):
        if (delta * delta - D) % (4 * M) == 0:
            return delta
    raise ValueError("Heegner hypothesis fails at M")


@dataclass(frozen=True)
class HeegnerForm:
    form: BQF
    level: int
    delta_c: int  # working residue: B = delta_c mod 2M, delta_c = c*delta

    def __post_init__(self):
        M = self.level
        if self.form.A % M != 0 or (self.form.B - self.delta_c) % (2 * M) != 0:
            raise ValueError("not a Heegner form for this level")


def heegner_representatives(group: NarrowClassGroup, M: int, delta: int):
    """One Heegner form per narrow class (the GKZ bijection), as a dict
    class-index -> HeegnerForm."""
    delta_c = (group.c * delta) % (2 * M)
    disc = group.disc
    if (delta_c * delta_c - disc) % (4 * M) != 0:
        raise ValueError("delta residue incompatible with discriminant")
    found = {}
    if M == 1:
        for idx, rep in enumerate(group.reps):
            found[idx] = HeegnerForm(rep, 1, rep.B % 2)
        return found
    height = 0
    while len(found) < group.order:
        height += 1
        if height > 64:  # pragma: no cover
            raise RuntimeError("Heegner search exhausted (bug: GKZ bijection)")
        bs = {delta_c + 2 * M * t for t in range(-height, height + 1)}
        for B in sorted(bs, key=abs):
            t = (B * B - disc) // (4 * M)
            if t == 0:
                continue
            for a1 in divisors(t):
                for A1 in (a1, -a1):
                    A = M * A1
                    C = t // A1
                    if math.gcd(math.gcd(A, B), C) != 1:
                        continue
                    q = BQF(A, B, C)
                    idx = group.class_of(q)
                    if idx not in found:
                        found[idx] = HeegnerForm(q, M, delta_c)
    return found


class HeegnerSystem:
    """A narrow class group with level structure: delta, one Heegner form per
    class, and the Galois (=composition) action on them."""

    def __init__(self, D: int, c: int, M: int):
        self.group = NarrowClassGroup(D, c)
        self.M = M
        self.delta = choose_delta(D, c, M)
        self.delta_c = (c * self.delta) % (2 * M)
        self.forms = heegner_representatives(self.group, M, self.delta)

    def translate(self, sigma: int, Q: HeegnerForm) -> HeegnerForm:
        """Q^sigma: the Heegner representative of sigma * class(Q)."""
        idx = self.group.class_of(Q.form)
        return self.forms[self.group.compose(sigma, idx)]

    def to_json_dict(self):
        doc = self.group.to_json_dict()
        doc["M"] = self.M
        doc["delta"] = self.delta
        doc["heegner"] = {str(i): list(q.form.tuple()) for i, q in self.forms.items()}
        return doc


# ------------------------------------------------------------- stabilizers

@dataclass
class StabilizerData:
    form: BQF
    unit: tuple          # (x, y): eps_c = (x + y*sqrt(Dc^2))/2
    gamma: tuple         # SL2(Z) matrix fixing tau_Q, in Gamma0(M)
    level: int

    @property
    def tau_surd(self):
        return self.form.content_root()


def stabilizer_gamma(Q: HeegnerForm, unit_xy) -> StabilizerData:
    """gamma_tau = image of eps_c under the optimal embedding attached to Q.

    The matrix is ((x - yB)/2, -yC, yA, (x + yB)/2); it fixes tau_Q, lies in
    Gamma0(M), and has c*tau + d = eps_c > 1 under the fixed real embedding.
    """
    x, y = unit_xy
    A, B, C = Q.form.tuple()
    disc = Q.form.disc
    assert (x * x - disc * y * y) == 4, "unit must have norm +1"
    g = ((x - y * B) // 2, -y * C, y * A, (x + y * B) // 2)
    assert g[0] * g[3] - g[1] * g[2] == 1
    if Q.form.apply(g) != Q.form:
        raise RuntimeError("embedding does not stabilize the form")
    if g[2] % Q.level != 0:
        raise RuntimeError("stabilizer escaped Gamma0(M)")
    # c*tau + d = (x + y sqrt(disc))/2 > 1, i.e. (x - 2) + y sqrt(disc) > 0
    if surd_sign(x - 2, y, disc) <= 0:
        g = mat_inv(g)
    return StabilizerData(Q.form, (x, y), g, Q.level)


def sqrtD_class(group: NarrowClassGroup) -> int:
    """Narrow class of the principal ideal (sqrt(D)) of O_c.

    Trivial exactly when O_c has a unit of norm -1; otherwise it is the
    nontrivial element of ker(Pic^+ -> Pic), located through the oriented
    ideal-to-form dictionary.
    """
    disc = group.disc
    if unit_norm(disc, fundamental_unit(disc)) == -1:
        idx = group.identity
    else:
        b = disc % 2
        q = BQF(-1, -b, (disc - b * b) // 4)
        idx = group.class_of(q)
        assert idx != group.identity
    assert group.compose(idx, idx) == group.identity
    return idx
