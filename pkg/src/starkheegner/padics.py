"""Capped-precision arithmetic in Q_p and its unramified quadratic extension.

Elements carry an exact valuation and an absolute precision N ("known mod
p^N").  Precision bookkeeping is pessimistic by construction: a sum is known
to the coarser of the two absolute precisions, a product to
min(v1+N2, v2+N1).  The quadratic extension is realized on the basis (1, w)
with w^2 a Teichmueller lift of the smallest quadratic non-residue mod p, so
that Frobenius is the sign flip b -> -b.
"""

from __future__ import annotations

import math
from fractions import Fraction


class PrecisionError(ArithmeticError):
    """Requested digits exceed what the inputs can justify."""

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable


def _val_of_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("exact zero has no finite valuation")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicScalar:
    """An element of Q_p known modulo p^N.

    Internal form: value = p^v * unit with unit a unit mod p^(N-v).
    ``v == N`` encodes "zero to precision N" (O(p^N)); exact zeros are the
    same thing with whatever N the context supplies.
    """

    __slots__ = ("p", "v", "unit", "N")

    def __init__(self, p: int, v: int, unit: int, N: int):
        if v >= N:
            v, unit = N, 0
        else:
            unit %= p ** (N - v)
            if unit % p == 0:
                raise ValueError("unit part divisible by p")
        self.p = p
        self.v = v
        self.unit = unit
        self.N = N

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p: int, N: int) -> "PadicScalar":
        return cls(p, N, 0, N)

    @classmethod
    def from_int(cls, p: int, n: int, N: int) -> "PadicScalar":
        n_mod = n % p ** N
        if n_mod == 0:
            return cls.zero(p, N)
        v = _val_of_int(n_mod, p)
        return cls(p, v, n_mod // p ** v, N)

    @classmethod
    def from_fraction(cls, p: int, q, N: int) -> "PadicScalar":
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, N)
        vn = _val_of_int(q.numerator, p) if q.numerator else 0
        vd = _val_of_int(q.denominator, p)
        v = vn - vd
        if v >= N:
            return cls.zero(p, N)
        m = p ** (N - v)
        num = q.numerator // p ** vn
        den = q.denominator // p ** vd
        unit = num * pow(den, -1, m) % m
        return cls(p, v, unit, N)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.v >= self.N

    def valuation(self) -> int:
        """Exact valuation; for (in)exact zeros this is the precision floor."""
        return self.v

    def precision(self) -> int:
        return self.N

    def residue(self, k: int | None = None) -> int:
        """The value as an integer mod p^k (requires v >= 0 and k <= N)."""
        if k is None:
            k = self.N
        if k > self.N:
            raise PrecisionError("only %d digits known" % self.N, self.N)
        if self.is_zero():
            return 0
        if self.v < 0:
            raise ValueError("negative valuation, not a p-adic integer")
        return (self.unit * self.p ** self.v) % self.p ** k

    def with_precision(self, N: int) -> "PadicScalar":
        if N > self.N:
            raise PrecisionError("cannot raise precision from %d to %d"
                                 % (self.N, N), self.N)
        if self.is_zero() or self.v >= N:
            return PadicScalar.zero(self.p, N)
        return PadicScalar(self.p, self.v, self.unit % self.p ** (N - self.v), N)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("prime mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicScalar.from_fraction(self.p, other, self.N)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        N = min(self.N, other.N)
        if self.is_zero() and other.is_zero():
            return PadicScalar.zero(self.p, N)
        v0 = min(self.v, other.v)
        if v0 >= N:
            return PadicScalar.zero(self.p, N)
        m = self.p ** (N - v0)
        a = 0 if self.is_zero() else self.unit * self.p ** (self.v - v0)
        b = 0 if other.is_zero() else other.unit * other.p ** (other.v - v0)
        s = (a + b) % m
        if s == 0:
            return PadicScalar.zero(self.p, N)
        w = _val_of_int(s, self.p)
        return PadicScalar(self.p, v0 + w, s // self.p ** w, N)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicScalar(self.p, self.v, -self.unit, self.N)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # relative precision of a product = min of relative precisions
        N = min(self.v + other.N, other.v + self.N)
        if self.is_zero() or other.is_zero():
            return PadicScalar.zero(self.p, N)
        v = self.v + other.v
        if v >= N:
            return PadicScalar.zero(self.p, N)
        return PadicScalar(self.p, v, self.unit * other.unit, N)

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverting a p-adic zero")
        r = self.N - self.v  # relative precision
        m = self.p ** r
        return PadicScalar(self.p, -self.v, pow(self.unit, -1, m), r - self.v)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n == 0:
            return PadicScalar.from_int(self.p, 1, self.N)
        if n < 0:
            return self.inverse() ** (-n)
        out = None
        base = self
        while n:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("capped-precision values are unhashable")

    def __repr__(self):
        if self.is_zero():
            return "O(%d^%d)" % (self.p, self.N)
        return "%d*%d^%d + O(%d^%d)" % (self.unit % self.p ** min(self.N - self.v, 6),
                                        self.p, self.v, self.p, self.N)


class QuadExtScalar:
    """Element a + b*w of the unramified quadratic extension F_p of Q_p.

    w^2 = eps, the Teichmueller lift of a non-residue, so conj(w) = -w and
    Frobenius is (a, b) -> (a, -b).
    """

    __slots__ = ("ctx", "a", "b")

    def __init__(self, ctx: "QuadExtContext", a: PadicScalar, b: PadicScalar):
        self.ctx = ctx
        self.a = a
        self.b = b

    @property
    def p(self):
        return self.ctx.p

    def is_scalar(self) -> bool:
        return self.b.is_zero()

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def valuation(self) -> int:
        # (1, w) is a basis of the residue field, so v = min componentwise
        return min(self.a.v, self.b.v)

    def precision(self) -> int:
        return min(self.a.N, self.b.N)

    def _coerce(self, other):
        if isinstance(other, QuadExtScalar):
            return other
        if isinstance(other, PadicScalar):
            return self.ctx.embed(other)
        if isinstance(other, (int, Fraction)):
            return self.ctx.embed(PadicScalar.from_fraction(self.p, other, self.precision()))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadExtScalar(self.ctx, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtScalar(self.ctx, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        eps = self.ctx.eps_scalar
        a = self.a * other.a + eps * (self.b * other.b)
        b = self.a * other.b + self.b * other.a
        return QuadExtScalar(self.ctx, a, b)

    __rmul__ = __mul__

    def frobenius(self) -> "QuadExtScalar":
        return QuadExtScalar(self.ctx, self.a, -self.b)

    def norm(self) -> PadicScalar:
        return self.a * self.a - self.ctx.eps_scalar * (self.b * self.b)

    def trace(self) -> PadicScalar:
        return self.a + self.a

    def inverse(self) -> "QuadExtScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverting zero in F_p")
        n_inv = self.norm().inverse()
        return QuadExtScalar(self.ctx, self.a * n_inv, -self.b * n_inv)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ctx.one(self.precision())
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("capped-precision values are unhashable")

    def __repr__(self):
        return "(%r) + (%r)*w" % (self.a, self.b)


class QuadExtContext:
    """Fixed prime, working precision, and the basis constant eps = w^2."""

    _cache: dict = {}

    def __new__(cls, p: int, N: int):
        key = (p, N)
        if key in cls._cache:
            return cls._cache[key]
        obj = super().__new__(cls)
        cls._cache[key] = obj
        return obj

    def __init__(self, p: int, N: int):
        if getattr(self, "_ready", False):
            return
        if p == 2:
            raise ValueError("p = 2 not supported")
        self.p = p
        self.N = N
        r = next(r for r in range(2, p) if pow(r, (p - 1) // 2, p) == p - 1)
        self.nonresidue = r
        self.eps = _teichmuller_int(r, p, N)
        self.eps_scalar = PadicScalar.from_int(p, self.eps, N)
        self._ready = True

    def embed(self, a: PadicScalar) -> QuadExtScalar:
        return QuadExtScalar(self, a, PadicScalar.zero(self.p, a.N))

    def from_ints(self, a: int, b: int, N: int | None = None) -> QuadExtScalar:
        N = self.N if N is None else N
        return QuadExtScalar(self, PadicScalar.from_int(self.p, a, N),
                             PadicScalar.from_int(self.p, b, N))

    def one(self, N: int | None = None) -> QuadExtScalar:
        return self.from_ints(1, 0, N)

    def omega(self, N: int | None = None) -> QuadExtScalar:
        return self.from_ints(0, 1, N)

    def sqrt_of_int(self, n: int, N: int | None = None) -> QuadExtScalar:
        """A square root of the integer n in F_p (n a p-adic unit)."""
        N = self.N if N is None else N
        p = self.p
        if n % p == 0:
            raise ValueError("only unit square roots supported")
        if pow(n % p, (p - 1) // 2, p) == 1:
            return self.embed(PadicScalar.from_int(p, _sqrt_int(n, p, N), N))
        t = _sqrt_int(n * pow(self.eps, -1, p ** N), p, N)
        return self.from_ints(0, t, N)


# -- integer-level kernels --------------------------------------------------

def _teichmuller_int(u: int, p: int, N: int) -> int:
    m = p ** N
    x = u % m
    for _ in range(N + 1):
        y = pow(x, p, m)
        if y == x:
            break
        x = y
    assert pow(x, p, m) == x
    return x


def _sqrt_int(n: int, p: int, N: int) -> int:
    """Hensel-lifted square root of a quadratic-residue unit mod p^N."""
    m = p ** N
    n %= m
    x = pow(n, (p + 1) // 4, p) if p % 4 == 3 else _tonelli(n % p, p)
    if (x * x - n) % p != 0:
        raise ValueError("not a quadratic residue")
    inv2 = pow(2, -1, m)
    k = 1
    while k < N:
        x = (x + n * pow(x, -1, m)) * inv2 % m
        k *= 2
    assert (x * x - n) % m == 0
    return x


def _tonelli(n: int, p: int) -> int:
    if pow(n, (p - 1) // 2, p) != 1:
        raise ValueError("not a quadratic residue")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = next(z for z in range(2, p) if pow(z, (p - 1) // 2, p) == p - 1)
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


# -- Teichmueller / exp / log ------------------------------------------------

def teichmuller(x):
    """Teichmueller lift: the root of unity congruent to the given unit."""
    if isinstance(x, PadicScalar):
        if x.is_zero() or x.v != 0:
            raise ValueError("not a unit")
        return PadicScalar.from_int(x.p, _teichmuller_int(x.unit, x.p, x.N), x.N)
    if isinstance(x, QuadExtScalar):
        if x.valuation() != 0:
            raise ValueError("not a unit")
        # iterate x -> x^(p^2); contraction on units of F_p
        out = x
        for _ in range(x.precision() + 1):
            nxt = out ** (x.p ** 2)
            if nxt == out:
                break
            out = nxt
        return out
    raise TypeError("unsupported type")


def _log_one_plus(y):
    """log(1+y) for v(y) >= 1, scalar or quadratic input."""
    if isinstance(y, PadicScalar):
        w, N, one = y.v, y.N, PadicScalar.from_int(y.p, 1, y.N)
    else:
        w, N = y.valuation(), y.precision()
        one = y.ctx.one(N)
    if y.is_zero():
        return y
    if w < 1:
        raise ValueError("log series needs v >= 1")
    p = y.p if isinstance(y, PadicScalar) else y.ctx.p
    nmax = 1
    while nmax * w - int(math.log(nmax, p)) < N:
        nmax += 1
    total = None
    power = one
    for k in range(1, nmax + 1):
        power = power * y
        term = power * Fraction((-1) ** (k + 1), k)
        total = term if total is None else total + term
    return total


def iwasawa_log(x):
    """The branch with log(p) = 0, on all of the unit group times p^Z."""
    if isinstance(x, QuadExtScalar) and x.is_scalar():
        return x.ctx.embed(iwasawa_log(x.a))
    if isinstance(x, PadicScalar):
        if x.is_zero():
            raise ValueError("log of zero")
        u = PadicScalar(x.p, 0, x.unit, x.N - x.v)
        zeta = teichmuller(u)
        return _log_one_plus(u / zeta - 1)
    if isinstance(x, QuadExtScalar):
        if x.is_zero():
            raise ValueError("log of zero")
        v = x.valuation()
        if v:
            # multiply by the exact constant p^(-v); give it slack precision
            pv = PadicScalar(x.ctx.p, -v, 1, x.precision() + abs(v) + 2)
            x = x * pv
        zeta = teichmuller(x)
        return _log_one_plus(x / zeta - 1)
    raise TypeError("unsupported type")


def exp_p(x: PadicScalar) -> PadicScalar:
    """p-adic exponential, domain v(x) >= 1 (p odd)."""
    if isinstance(x, QuadExtScalar):
        if x.is_scalar():
            return x.ctx.embed(exp_p(x.a))
        raise TypeError("quadratic exp not needed; pass components")
    if x.is_zero():
        return PadicScalar.from_int(x.p, 1, x.N)
    if x.v < 1:
        raise ValueError("exp_p needs v >= 1")
    p, w, N = x.p, x.v, x.N
    nmax = 1
    while nmax * w - (nmax - _digit_sum(nmax, p)) // (p - 1) < N:
        nmax += 1
    total = PadicScalar.from_int(p, 1, N)
    term = PadicScalar.from_int(p, 1, N)
    for k in range(1, nmax + 1):
        term = term * x * Fraction(1, k)
        total = total + term
    return total


def _digit_sum(n: int, p: int) -> int:
    s = 0
    while n:
        s += n % p
        n //= p
    return s


class LogBranch:
    """The branch log_q of the p-adic logarithm with log_q(q) = 0."""

    def __init__(self, q: PadicScalar):
        if q.is_zero() or q.v < 1:
            raise ValueError("Tate period must have positive valuation")
        self.q = q
        self.p = q.p
        self.ord_q = q.v
        self._l0q = iwasawa_log(q)

    def log(self, x):
        """log_q(x) = L0(x) - (ord(x)/ord(q)) * L0(q)."""
        if isinstance(x, PadicScalar):
            if x.is_zero():
                raise ValueError("log of zero")
            v = x.v
        else:
            if x.is_zero():
                raise ValueError("log of zero")
            v = x.valuation()
        base = iwasawa_log(x)
        corr = self._l0q * Fraction(v, self.ord_q)
        if isinstance(base, QuadExtScalar) and isinstance(corr, PadicScalar):
            corr = base.ctx.embed(corr)
        return base - corr

    def log_principal(self, x):
        """log_q of the principal-unit part <x>.

        Since L0 already kills p-powers and Teichmueller torsion this is just
        the Iwasawa logarithm; kept separate so callers state their intent.
        """
        return iwasawa_log(x)


def rational_reconstruct(x: int, modulus: int, bound: int):
    """Recover (a, b) coprime, |a|,|b| <= bound, b > 0, a = x*b mod modulus.

    Requires 2*bound^2 <= modulus for uniqueness; returns None when no such
    pair exists.
    """
    if 2 * bound * bound > modulus:
        raise PrecisionError("insufficient precision for bound %d" % bound)
    x %= modulus
    r0, r1 = modulus, x
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    a, b = r1, t1
    if b == 0 or abs(b) > bound:
        return None
    if b < 0:
        a, b = -a, -b
    if math.gcd(a, b) != 1:
        return None
    if (a - x * b) % modulus != 0:
        return None
    return a, b


def reconstruct_scalar(x: PadicScalar, bound: int):
    """Rational reconstruction of a capped-precision scalar, valuation folded in."""
    if x.is_zero():
        return Fraction(0)
    rel = x.N - x.v
    got = rational_reconstruct(x.unit, x.p ** rel, bound)
    if got is None:
        return None
    a, b = got
    return Fraction(a, b) * Fraction(x.p) ** x.v
