"""Fixed-precision arithmetic in Q_p and its unramified quadratic extension.

Elements are stored as p^v * (u0 + u1*w) with w^2 = r for a fixed quadratic
non-residue r mod p.  The unit part is tracked modulo p^N; division by p is a
valuation shift and loses nothing, so the only precision loss comes from
cancellation in addition (tracked per element as `slack`) and a flat charge on
each log/exp call.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sympy import isprime


def _vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicContext:
    """Parameters (p, N) plus the derived non-residue r defining Q_{p^2}."""

    p: int
    prec: int

    def __post_init__(self):
        if self.p < 5 or not isprime(self.p):
            raise ValueError(f"p must be a prime >= 5, got {self.p}")
        if self.prec < 1:
            raise ValueError("precision must be >= 1")

    @property
    def r(self) -> int:
        # smallest positive quadratic non-residue mod p
        p = self.p
        for r in range(2, p):
            if pow(r, (p - 1) // 2, p) == p - 1:
                return r
        raise AssertionError("unreachable for prime p")

    @property
    def modulus(self) -> int:
        return self.p ** self.prec

    # -- constructors -------------------------------------------------------

    def zero(self) -> "PadicScalar":
        return PadicScalar(self, None, 0, 0)

    def one(self) -> "PadicScalar":
        return self.from_int(1)

    def omega(self) -> "PadicScalar":
        return PadicScalar(self, 0, 0, 1)

    def from_int(self, n: int) -> "PadicScalar":
        if n == 0:
            return self.zero()
        v = _vp(n, self.p)
        return PadicScalar(self, v, (n // self.p ** v) % self.modulus, 0)

    def from_rational(self, q) -> "PadicScalar":
        q = Fraction(q)
        if q == 0:
            return self.zero()
        return self.from_int(q.numerator) / self.from_int(q.denominator)

    def from_coords(self, a0: int, a1: int, val: int = 0) -> "PadicScalar":
        """p^val * (a0 + a1*w) with integer coordinates."""
        if a0 == 0 and a1 == 0:
            return self.zero()
        k = min(_vp(a0, self.p) if a0 else self.prec,
                _vp(a1, self.p) if a1 else self.prec)
        pk = self.p ** k
        return PadicScalar(self, val + k,
                           (a0 // pk) % self.modulus,
                           (a1 // pk) % self.modulus)

    def sqrt_zp(self, a: int) -> int:
        """A square root of a in Z_p (unit a, (a|p) = 1), as int mod p^N."""
        p, N = self.p, self.prec
        if a % p == 0 or pow(a % p, (p - 1) // 2, p) != 1:
            raise ValueError("not a unit square in Z_p")
        # Tonelli–Shanks is overkill mod p; p = 4k+3 shortcut else search
        if p % 4 == 3:
            x = pow(a % p, (p + 1) // 4, p)
        else:
            x = next(x for x in range(1, p) if x * x % p == a % p)
        k, pk = 1, p
        while k < N:  # Hensel with modulus doubling
            k = min(2 * k, N)
            pk = p ** k
            x = (x - (x * x - a) * pow(2 * x, -1, pk)) % pk
        return x % self.modulus


class PadicScalar:
    """Immutable element of Q_{p^2} at fixed working precision.

    v is None exactly for the zero marker.  (u0, u1) is the unit part on the
    basis {1, w}, each held mod p^N, not both divisible by p.
    """

    __slots__ = ("ctx", "v", "u0", "u1", "slack")

    def __init__(self, ctx: PadicContext, v, u0: int, u1: int, slack: int = 0):
        self.ctx = ctx
        self.v = v
        self.u0 = u0
        self.u1 = u1
        self.slack = slack
        if v is not None and u0 % ctx.p == 0 and u1 % ctx.p == 0:
            raise AssertionError("non-normalized unit part")

    # -- predicates ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.v is None

    def valuation(self):
        """Exact valuation, or None for the zero marker."""
        return self.v

    def is_rational_coord(self) -> bool:
        """True if the w-coordinate vanishes at stored precision."""
        return self.is_zero or self.u1 == 0

    # -- helpers ------------------------------------------------------------

    def _with_slack(self, s: int) -> "PadicScalar":
        if self.is_zero:
            return self
        return PadicScalar(self.ctx, self.v, self.u0, self.u1,
                           max(self.slack, s))

    def _norm_unit(self) -> int:
        """Norm of the unit part to Z_p: u0^2 - r*u1^2 mod p^N."""
        M = self.ctx.modulus
        return (self.u0 * self.u0 - self.ctx.r * self.u1 * self.u1) % M

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return other

    def __add__(self, other: "PadicScalar") -> "PadicScalar":
        ctx = self.ctx
        other = self._coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        v = min(self.v, other.v)
        M = ctx.modulus
        a0 = self.u0 * ctx.p ** (self.v - v) + other.u0 * ctx.p ** (other.v - v)
        a1 = self.u1 * ctx.p ** (self.v - v) + other.u1 * ctx.p ** (other.v - v)
        a0 %= M
        a1 %= M
        # absolute precision: each operand is known mod p^(v + prec - slack);
        # the sum is known mod the min of those, whatever its valuation
        abs_prec = min(self.v + ctx.prec - self.slack,
                       other.v + ctx.prec - other.slack)
        if a0 == 0 and a1 == 0:
            return ctx.zero()
        k = min(_vp(a0, ctx.p) if a0 else ctx.prec,
                _vp(a1, ctx.p) if a1 else ctx.prec)
        if k:
            pk = ctx.p ** k
            a0 = (a0 // pk) % M
            a1 = (a1 // pk) % M
            v += k
        return PadicScalar(ctx, v, a0, a1, max(0, v + ctx.prec - abs_prec))

    def __neg__(self) -> "PadicScalar":
        if self.is_zero:
            return self
        M = self.ctx.modulus
        return PadicScalar(self.ctx, self.v, (-self.u0) % M, (-self.u1) % M,
                           self.slack)

    def __sub__(self, other: "PadicScalar") -> "PadicScalar":
        return self + (-other)

    def __radd__(self, other):
        return self + other

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other: "PadicScalar") -> "PadicScalar":
        ctx = self.ctx
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return ctx.zero()
        M, r = ctx.modulus, ctx.r
        c0 = (self.u0 * other.u0 + r * self.u1 * other.u1) % M
        c1 = (self.u0 * other.u1 + self.u1 * other.u0) % M
        slack = max(self.slack, other.slack)
        if c0 == 0 and c1 == 0:  # can only happen via slack-laden inputs
            return ctx.zero()
        return PadicScalar(ctx, self.v + other.v, c0, c1, slack)

    def inverse(self) -> "PadicScalar":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        ctx = self.ctx
        M = ctx.modulus
        n = self._norm_unit()  # a unit of Z_p
        ninv = pow(n, -1, M)
        return PadicScalar(ctx, -self.v, self.u0 * ninv % M,
                           (-self.u1) * ninv % M, self.slack)

    def __truediv__(self, other: "PadicScalar") -> "PadicScalar":
        return self * other.inverse()

    def __pow__(self, e: int) -> "PadicScalar":
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ctx.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    __rmul__ = __mul__

    def scale_int(self, n: int) -> "PadicScalar":
        return self.ctx.from_int(n) * self if n else self.ctx.zero()

    # -- Galois -------------------------------------------------------------

    def frobenius(self) -> "PadicScalar":
        """The nontrivial automorphism of Q_{p^2}/Q_p: w -> -w."""
        if self.is_zero:
            return self
        M = self.ctx.modulus
        return PadicScalar(self.ctx, self.v, self.u0, (-self.u1) % M,
                           self.slack)

    def norm(self) -> "PadicScalar":
        return self * self.frobenius()

    def trace(self) -> "PadicScalar":
        return self + self.frobenius()

    # -- comparison ---------------------------------------------------------

    def effective_prec(self) -> int:
        return self.ctx.prec - self.slack

    def equals(self, other: "PadicScalar", digits: int | None = None) -> bool:
        """Agreement of v and unit digits to `digits` (default: joint
        effective precision)."""
        d = self - other
        if digits is None:
            digits = min(self.effective_prec(), other.effective_prec())
        if d.is_zero:
            return True
        base = min(x.v for x in (self, other) if not x.is_zero) \
            if not (self.is_zero and other.is_zero) else 0
        return d.v >= base + digits

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return self.equals(other)

    def __hash__(self):
        raise TypeError("PadicScalar equality is at-precision; not hashable")

    def __repr__(self):
        if self.is_zero:
            return f"O(p^inf; p={self.ctx.p})"
        return (f"{self.ctx.p}^{self.v}*({self.u0} + {self.u1}*w)"
                f" mod {self.ctx.p}^{self.ctx.prec}"
                + (f" [slack {self.slack}]" if self.slack else ""))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        def digits(u: int):
            out, p = [], self.ctx.p
            for _ in range(self.ctx.prec):
                out.append(u % p)
                u //= p
            return out

        return {
            "p": self.ctx.p,
            "N": self.ctx.prec,
            "v": self.v,
            "unit": None if self.is_zero else [digits(self.u0),
                                               digits(self.u1)],
            "slack": self.slack,
        }

    @staticmethod
    def from_json(obj: dict) -> "PadicScalar":
        ctx = PadicContext(obj["p"], obj["N"])
        if obj["v"] is None:
            return ctx.zero()
        p = obj["p"]
        u0 = sum(d * p ** i for i, d in enumerate(obj["unit"][0]))
        u1 = sum(d * p ** i for i, d in enumerate(obj["unit"][1]))
        return PadicScalar(ctx, obj["v"], u0, u1, obj.get("slack", 0))


# -- transcendental maps ----------------------------------------------------

def _series_slack(ctx: PadicContext, nterms: int) -> int:
    s, k = 1, ctx.p
    while k <= nterms:
        s += 1
        k *= ctx.p
    return s


def _log_one_plus(t: PadicScalar) -> PadicScalar:
    """Log(1 + t) for v(t) >= 1, standard series."""
    ctx = t.ctx
    if t.is_zero:
        return ctx.zero()
    assert t.v >= 1
    # term k has valuation >= k*v(t) - log_p k; stop when beyond precision+1
    kmax = 1
    while kmax * t.v - _series_slack(ctx, kmax) <= ctx.prec + 1:
        kmax += 1
    acc = ctx.zero()
    power = ctx.one()
    for k in range(1, kmax + 1):
        power = power * t
        term = power / ctx.from_int(k)
        acc = acc + (term if k % 2 else -term)
    return acc


def iwasawa_log(x: PadicScalar) -> PadicScalar:
    """p-adic log with log(p) = 0 and log(teichmuller) = 0."""
    if x.is_zero:
        raise ZeroDivisionError("log of zero")
    ctx = x.ctx
    e = ctx.p ** 2 - 1
    u = PadicScalar(ctx, 0, x.u0, x.u1, x.slack)  # drop p-power part
    t = u ** e - ctx.one()
    val = _log_one_plus(t) / ctx.from_int(e)
    return val._with_slack(x.slack + _series_slack(ctx, ctx.prec + 2))


def padic_exp(x: PadicScalar) -> PadicScalar:
    """exp on valuation >= 1 (convergent for p >= 5 in fact on v >= 1)."""
    ctx = x.ctx
    if x.is_zero:
        return ctx.one()
    if x.v < 1:
        raise ValueError("exp needs valuation >= 1")
    # v(x^k / k!) >= k - (k-1)/(p-1) grows linearly for p >= 5
    kmax = 1
    while kmax * x.v - (kmax - 1) // (ctx.p - 1) <= ctx.prec + 1:
        kmax += 1
    acc = ctx.one()
    power = ctx.one()
    fact = 1
    for k in range(1, kmax + 1):
        power = power * x
        fact *= k
        acc = acc + power / ctx.from_int(fact)
    return acc._with_slack(x.slack + _series_slack(ctx, kmax))


def teichmuller(x: PadicScalar) -> PadicScalar:
    """The (p^2-1)-st root of unity congruent to x mod p; needs v(x) = 0."""
    if x.is_zero or x.v != 0:
        raise ValueError("teichmuller needs a unit")
    ctx = x.ctx
    z = PadicScalar(ctx, 0, x.u0, x.u1, x.slack)
    for _ in range(ctx.prec + 1):
        nxt = z ** (ctx.p ** 2)
        if nxt.equals(z, ctx.prec - z.slack):
            return nxt
        z = nxt
    return z


# -- dual numbers ------------------------------------------------------------

class DualScalar:
    """a + b*eps with eps^2 = 0 over PadicScalar."""

    __slots__ = ("a", "b")

    def __init__(self, a: PadicScalar, b: PadicScalar):
        self.a = a
        self.b = b

    @staticmethod
    def constant(a: PadicScalar) -> "DualScalar":
        return DualScalar(a, a.ctx.zero())

    def __add__(self, other):
        return DualScalar(self.a + other.a, self.b + other.b)

    def __neg__(self):
        return DualScalar(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return DualScalar(self.a * other.a,
                          self.a * other.b + self.b * other.a)

    def scale(self, c: PadicScalar) -> "DualScalar":
        return DualScalar(self.a * c, self.b * c)

    def equals(self, other, digits=None) -> bool:
        return self.a.equals(other.a, digits) and self.b.equals(other.b,
                                                                digits)

    def __repr__(self):
        return f"({self.a!r}) + ({self.b!r})*eps"

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json()}
