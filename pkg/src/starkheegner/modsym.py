"""Exact weight-2 modular symbols for Gamma0(N).

A symbol is stored as its vector of values on unimodular paths, indexed by
P^1(Z/N) (Manin's presentation); the two- and three-term relations cut out
the space, Hecke operators act through cusp-path formulas and the Manin
trick, and the eigensymbols of a curve are found by exact kernel
intersections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import mat_inv, mat_mul
from .curves import EllipticCurveData
from .linalg import kernel_basis, rref
from .quadforms import HeegnerSystem, stabilizer_gamma, totally_positive_unit


INF = None  # the cusp at infinity


def apply_moebius(g, cusp):
    a, b, c, d = g
    if cusp is INF:
        num, den = a, c
    else:
        num, den = a * cusp.numerator + b * cusp.denominator, \
            c * cusp.numerator + d * cusp.denominator
    if den == 0:
        return INF
    return Fraction(num, den)


def segments_to_cusp(x):
    """Decompose {oo -> x} into unimodular paths g{0 -> oo}.

    Returns a list of (g, sign) with g in SL2(Z); the path equals the signed
    concatenation of the g{0 -> oo}.
    """
    if x is INF:
        return []
    a, b = x.numerator, x.denominator
    # continued fraction digits of a/b
    digits = []
    num, den = a, b
    while den:
        q = num // den
        digits.append(q)
        num, den = den, num - q * den
    # convergents p_k/q_k with p_{-1}/q_{-1} = 1/0
    segs = []
    pk1, qk1 = 1, 0
    pk, qk = digits[0], 1
    segs.append(((pk, -pk1, qk, -qk1), 1))
    for k in range(1, len(digits)):
        pk1, pk = pk, digits[k] * pk + pk1
        qk1, qk = qk, digits[k] * qk + qk1
        s = (-1) ** (k - 1)
        segs.append(((pk, s * pk1, qk, s * qk1), 1))
    assert Fraction(pk, qk) == x
    return segs


def segments_between(r, s):
    """Signed unimodular decomposition of the path {r -> s}."""
    out = [(g, sg) for g, sg in segments_to_cusp(s)]
    out += [(g, -sg) for g, sg in segments_to_cusp(r)]
    return out


class P1List:
    """P^1(Z/N): canonical representatives and index lookup."""

    def __init__(self, N: int):
        self.N = N
        units = [u for u in range(1, N) if math.gcd(u, N) == 1]
        seen = {}
        reps = []
        for c in range(N):
            for d in range(N):
                if math.gcd(math.gcd(c, d), N) != 1:
                    continue
                if (c, d) in seen:
                    continue
                orbit = sorted(((c * u) % N, (d * u) % N) for u in units)
                rep = orbit[0]
                idx = seen.get(rep)
                if idx is None:
                    idx = len(reps)
                    reps.append(rep)
                for pt in orbit:
                    seen[pt] = idx
        self.reps = reps
        self._index = seen

    def __len__(self):
        return len(self.reps)

    def index(self, c: int, d: int) -> int:
        return self._index[(c % self.N, d % self.N)]

    def index_of_matrix(self, g) -> int:
        return self.index(g[2], g[3])

    def lift(self, i: int):
        """A matrix in SL2(Z) whose bottom row reduces to representative i."""
        c, d = self.reps[i]
        # adjust (c, d) to a coprime pair lifting the class
        if math.gcd(c, d) != 1:
            for t in range(1, self.N + 1):
                if math.gcd(c, d + t * self.N) == 1:
                    d += t * self.N
                    break
        from .arith import xgcd
        g, u, v = xgcd(c, d)
        assert g == 1
        return (v, -u, c, d)


class ManinSymbolSpace:
    """The Q-vector space of weight-2 modular symbols of level N, presented
    by values on P^1(Z/N)."""

    S = (0, -1, 1, 0)
    T = (0, -1, 1, -1)

    def __init__(self, N: int):
        self.N = N
        self.p1 = P1List(N)
        n = len(self.p1)
        rows = []
        for i, (c, d) in enumerate(self.p1.reps):
            js = self.p1.index(d, -c)                  # (c,d)*S
            row = [Fraction(0)] * n
            row[i] += 1
            row[js] += 1
            rows.append(row)
            jt = self.p1.index(d, -c - d)              # (c,d)*T
            jt2 = self.p1.index(-c - d, c)             # (c,d)*T^2
            row = [Fraction(0)] * n
            row[i] += 1
            row[jt] += 1
            row[jt2] += 1
            rows.append(row)
        self.basis, self.pivots = rref(kernel_basis(rows, n))
        self.dim = len(self.basis)

    # ------------------------------------------------------------ evaluation

    def value(self, vec, r, s) -> Fraction:
        """Value of the symbol with coordinate vector vec on {r -> s}."""
        total = Fraction(0)
        for g, sign in segments_between(r, s):
            total += sign * vec[self.p1.index_of_matrix(g)]
        return total

    def coordinates(self, full_vector):
        """Coordinates in the rref basis (values at the pivot indices)."""
        return [full_vector[c] for c in self.pivots]

    def from_coordinates(self, coords):
        n = len(self.p1)
        out = [Fraction(0)] * n
        for x, b in zip(coords, self.basis):
            if x:
                for k in range(n):
                    if b[k]:
                        out[k] += x * b[k]
        return out

    # ------------------------------------------------------------- operators

    def _op_full(self, vec, paths_for):
        """Apply a path-defined operator: paths_for(r, s) yields (r', s', w)."""
        n = len(self.p1)
        out = []
        for i in range(n):
            g = self.p1.lift(i)
            r, s = apply_moebius(g, Fraction(0)), apply_moebius(g, INF)
            acc = Fraction(0)
            for r2, s2, w in paths_for(r, s):
                acc += w * self.value(vec, r2, s2)
            out.append(acc)
        return out

    def hecke_paths(self, ell: int):
        good = self.N % ell != 0

        def paths(r, s):
            out = []
            if good:
                rr = INF if r is INF else ell * r
                ss = INF if s is INF else ell * s
                out.append((rr, ss, 1))
            for j in range(ell):
                rr = INF if r is INF else Fraction(r + j, ell)
                ss = INF if s is INF else Fraction(s + j, ell)
                out.append((rr, ss, 1))
            return out

        return paths

    def hecke_matrix(self, ell: int):
        """Matrix of T_ell (or U_ell for ell | N) on the space, acting on
        rref coordinates."""
        cols = []
        for b in self.basis:
            img = self._op_full(b, self.hecke_paths(ell))
            cols.append(self.coordinates(img))
        return [list(row) for row in zip(*cols)]

    def atkin_lehner_infinity_matrix(self):
        def paths(r, s):
            rr = INF if r is INF else -r
            ss = INF if s is INF else -s
            return [(rr, ss, 1)]

        cols = []
        for b in self.basis:
            img = self._op_full(b, paths)
            cols.append(self.coordinates(img))
        return [list(row) for row in zip(*cols)]

    def cuspidal_dimension(self) -> int:
        """Rank of T_ell - (ell + 1) for the first good ell: the Eisenstein
        part is exactly the (ell + 1)-eigenspace (Hasse bound)."""
        ell = 2
        while self.N % ell == 0:
            ell += 1
        m = self.hecke_matrix(ell)
        for i in range(self.dim):
            m[i][i] -= ell + 1
        _, piv = rref(m)
        return len(piv)


@dataclass
class RationalModularSymbol:
    space: ManinSymbolSpace
    vector: list            # full P^1-indexed value vector, content 1
    sign: int               # omega_infinity eigenvalue

    def value(self, r, s) -> Fraction:
        return self.space.value(self.vector, r, s)


def build_eigensymbol(E: EllipticCurveData, sign: int,
                      space: ManinSymbolSpace | None = None,
                      max_ell: int = 60) -> RationalModularSymbol:
    """The normalized eigensymbol of E with the given sign at infinity."""
    if space is None:
        space = ManinSymbolSpace(E.conductor)
    # current subspace, as coordinate-column basis (identity at the start)
    dim = space.dim
    sub = [[Fraction(1 if i == j else 0) for j in range(dim)]
           for i in range(dim)]  # columns spanning rows? store as list of vecs
    sub = [list(col) for col in zip(*sub)]
    ell = 1
    while len(sub) > 2:
        ell += 1
        if ell > max_ell:
            raise RuntimeError("eigenspace did not shrink to dimension 2")
        if E.conductor % ell == 0 or not _is_prime(ell):
            continue
        a = E.ap(ell)
        m = space.hecke_matrix(ell)
        # restrict m to the span of sub and take kernel of (m - a)
        rows = []
        for v in sub:
            w = _matvec(m, v)
            rows.append([w[k] - a * v[k] for k in range(dim)])
        ker = kernel_basis([list(r) for r in zip(*rows)], len(sub))
        sub = [_lincomb(ker_vec, sub) for ker_vec in ker]
    if len(sub) != 2:
        raise RuntimeError("multiplicity-one failure: dim %d" % len(sub))
    # check U_q eigenvalue for q | N on the 2-dim space (consistency)
    for q in _prime_divisors(E.conductor):
        m = space.hecke_matrix(q)
        aq = E.ap(q)
        for v in sub:
            w = _matvec(m, v)
            assert all(w[k] == aq * v[k] for k in range(dim)), \
                "U_%d eigenvalue mismatch" % q
    w = space.atkin_lehner_infinity_matrix()
    eig = []
    for v in sub:
        img = _matvec(w, v)
        cand = [img[k] + sign * v[k] for k in range(dim)]  # (W + sign) v
        if any(cand):
            eig.append(cand)
    red, _ = rref(eig)
    assert len(red) == 1, "sign eigenspace has dimension %d" % len(red)
    full = space.from_coordinates(red[0])
    return RationalModularSymbol(space, _normalize_content(full), sign)


def _is_prime(n):
    return n > 1 and all(n % d for d in range(2, int(math.isqrt(n)) + 1))


def _prime_divisors(n):
    return [q for q in range(2, n + 1) if n % q == 0 and _is_prime(q)]


def _matvec(m, v):
    return [sum(a * b for a, b in zip(row, v) if a) for row in m]


def _lincomb(coeffs, vecs):
    out = [Fraction(0)] * len(vecs[0])
    for c, v in zip(coeffs, vecs):
        if c:
            for k in range(len(out)):
                out[k] += c * v[k]
    return out


def _normalize_content(vec):
    nums = [x for x in vec if x != 0]
    if not nums:
        raise ValueError("zero symbol")
    den = 1
    for x in nums:
        den = den * x.denominator // math.gcd(den, x.denominator)
    scaled = [x * den for x in vec]
    g = 0
    for x in scaled:
        g = math.gcd(g, int(x))
    scaled = [x / g for x in scaled]
    lead = next(x for x in scaled if x != 0)
    if lead < 0:
        scaled = [-x for x in scaled]
    return scaled


# -------------------------------------------------------------- Birch sums

def birch_sum(symbol: RationalModularSymbol, delta: int) -> Fraction:
    """sum_a (delta|a) I{oo -> a/m}, m = |delta|; the twisted-L rational."""
    from .arith import kronecker
    m = abs(delta)
    if math.gcd(m, symbol.space.N) != 1:
        raise ValueError("twist modulus must be coprime to the level")
    parity = 1 if delta > 0 else -1
    if parity != symbol.sign:
        raise ValueError("sign mismatch: the sum vanishes on this component")
    total = Fraction(0)
    for a in range(1, m + 1):
        chi = kronecker(delta, a)
        if chi:
            total += chi * symbol.value(INF, Fraction(a, m))
    return total


def geodesic_period_sum(symbol: RationalModularSymbol, chi,
                        heegner: HeegnerSystem, base=INF) -> Fraction:
    """sum over classes of chi(sigma) * I{r -> gamma_sigma(r)}: the rational
    geodesic period combination (weight 2, so the polynomial factor is 1)."""
    unit = totally_positive_unit(heegner.group.D, heegner.group.c)
    total = Fraction(0)
    for idx in range(heegner.group.order):
        q = heegner.forms[idx]
        st = stabilizer_gamma(q, unit)
        r2 = apply_moebius(st.gamma, base)
        total += chi(idx) * symbol.value(base, r2)
    return total
