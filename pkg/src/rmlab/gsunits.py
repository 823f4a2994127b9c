"""The p-adic generating series at an RM point and the unit it encodes.

Pipeline: stabilized coefficients a_n = log_p(T_n J_w[tau]) via Shanks
extrapolation of the diagonal-restriction route, an exact fit to the
weight-2 Eisenstein line on Gamma_0(p), exponentiation of the constant term
back to a unit candidate, and recognition of its minimal polynomial by
p-adic lattice reduction, cross-checked against partial-zeta valuation
predictions, a reciprocity symmetry, and splitting behaviour modulo
auxiliary primes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from sympy import Poly, Symbol, factorint

from .eisenstein import (LogCache, diag_coefficient,
                         accelerated_ordinary_projection)
from .lattice import AlgdepResult, algdep_padic
from .modforms import QSeries, FitResult, basis_for_level, fit_to_basis
from .padic import (PadicContext, PadicScalar, iwasawa_log, padic_exp,
                    teichmuller)
from .quadfield import (IdealDivisorEngine, NarrowClassGroup, RMPoint,
                        next_prime, partial_zeta_zero, splitting_type)


# --------------------------------------------------------------------------
# the generating series
# --------------------------------------------------------------------------

@dataclass
class GSeriesResult:
    series: QSeries             # a_0 unknown; a_n for n >= 1
    certificates: dict          # n (coprime to p) -> AccelerationCertificate
    fit: FitResult
    a0: PadicScalar             # inferred constant term = log_p(u_tau)
    trivial: bool               # True when the series vanishes identically


def _series_sign(group: NarrowClassGroup, chi: tuple, tau: RMPoint) -> int:
    """The diagonal-restriction coefficient carries the character-weighted
    class sum; with two classes summing to zero, the value at tau is
    -chi(class of tau) times it."""
    return -chi[group.class_of_rm_point(tau)]


def generating_series(tau: RMPoint, p: int, n_max: int, ctx: PadicContext,
                      m_max: int = 4,
                      group: NarrowClassGroup | None = None,
                      engine: IdealDivisorEngine | None = None,
                      logs: LogCache | None = None) -> GSeriesResult:
    """G_tau up to q^{n_max}: coefficients a_n = log_p(T_n J_w[tau]) as the
    Shanks-accelerated ordinary projection of the diagonal restriction
    derivative, fitted exactly to the basis of M_2(Gamma_0(p)).

    Coefficients at p | n reuse the stabilized value at n / p^{v_p(n)}: the
    ordinary limit lies in the U_p = 1 eigenspace.  Fields whose narrow
    class group has no odd quadratic character (equivalently, with a unit of
    norm -1) give the zero series."""
    D = tau.disc
    if splitting_type(D, p) != "inert":
        raise ValueError(f"p = {p} is not inert in Q(sqrt({D}))")
    group = group or NarrowClassGroup(D)
    odd = group.odd_characters()
    if not odd:
        zero = QSeries((None,) + (ctx.zero(),) * n_max, p)
        fit = fit_to_basis(zero, basis_for_level(p, n_max), ctx)
        return GSeriesResult(zero, {}, fit, fit.a0, True)
    if group.h != 2:
        raise ValueError("only narrow class number 1 or 2 supported")
    chi = odd[0]
    engine = engine or IdealDivisorEngine(group, p)
    logs = logs or LogCache(ctx)
    sign = _series_sign(group, chi, tau)

    def producer(k):
        return diag_coefficient(k, chi, engine, ctx, logs)

    stabilized, certs = {}, {}
    for n0 in range(1, n_max + 1):
        if n0 % p == 0:
            continue
        val, cert = accelerated_ordinary_projection(producer, n0, p,
                                                    m_max, ctx)
        stabilized[n0] = val * sign
        certs[n0] = cert
    coeffs = [None] * (n_max + 1)
    for n in range(1, n_max + 1):
        n0 = n
        while n0 % p == 0:
            n0 //= p
        coeffs[n] = stabilized[n0]
    series = QSeries(tuple(coeffs), p)
    fit = fit_to_basis(series, basis_for_level(p, n_max), ctx)
    return GSeriesResult(series, certs, fit, fit.a0, False)


# --------------------------------------------------------------------------
# valuation predictions and unit candidates
# --------------------------------------------------------------------------

def valuation_predictions(group: NarrowClassGroup, tau_class: int) -> dict:
    """sigma -> predicted p-order of the sigma-conjugate of u_tau, as the
    partial zeta value -zeta(0, C_tau * sigma); classes index their own
    conjugates.  The predictions sum to zero."""
    preds = {s: -partial_zeta_zero(group, group.compose(tau_class, s))
             for s in range(group.h)}
    assert sum(preds.values()) == 0
    return preds


def _teichmuller_generator(ctx: PadicContext) -> PadicScalar:
    """A Teichmuller representative generating the full (p^2 - 1)-torsion."""
    p = ctx.p
    order = p * p - 1
    primes = list(factorint(order))
    for c in range(p):
        g = teichmuller(ctx.omega() + ctx.from_int(c))
        if all(not (g ** (order // ell)).equals(ctx.one())
               for ell in primes):
            return g
    raise ArithmeticError("no torsion generator found")  # pragma: no cover


@dataclass
class UnitCandidate:
    value: PadicScalar
    twist: int                  # Teichmuller-generator exponent
    pinned_valuation: int       # p-order forced by the zeta prediction


def unit_from_constant_term(a0: PadicScalar, group: NarrowClassGroup,
                            tau_class: int, ctx: PadicContext) -> list:
    """All (p^2 - 1) torsion twists of p^pinned * exp(12 a0), where pinned is
    twelve times the zeta prediction for tau's own class.

    Raises on a constant term outside the exponential's domain (valuation
    must be >= 1); a zero constant term is the degenerate (trivial-unit)
    case and is rejected here."""
    if a0.is_zero:
        raise ArithmeticError("zero constant term: trivial unit")
    if a0.v < 1:
        raise ArithmeticError("constant term outside exponential domain")
    pinned = 12 * valuation_predictions(group, tau_class)[group.identity]
    if pinned.denominator != 1:
        raise ArithmeticError("non-integral pinned valuation")
    pinned = int(pinned)
    p = ctx.p
    base = padic_exp(a0 * 12) * ctx.from_rational(Fraction(p) ** pinned)
    gen = _teichmuller_generator(ctx)
    out = []
    cur = base
    for t in range(p * p - 1):
        out.append(UnitCandidate(cur, t, pinned))
        cur = cur * gen
    return out


# --------------------------------------------------------------------------
# recognition
# --------------------------------------------------------------------------

def newton_slopes(coeffs, p: int) -> list:
    """Root valuations of an integer polynomial (coefficients low to high)
    from its p-adic Newton polygon, with multiplicity."""

    def vp(n):
        v = 0
        n = abs(n)
        while n % p == 0:
            n //= p
            v += 1
        return v

    pts = [(i, vp(c)) for i, c in enumerate(coeffs) if c != 0]
    if len(pts) < 2:
        raise ValueError("polynomial has at most one term")
    # lower convex hull, left to right
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y2 - y1, x2 - x1)
        slopes.extend([-s] * (x2 - x1))
    return sorted(slopes)


def is_reciprocal_up_to_p_power(coeffs, p: int) -> bool:
    """True when x^d f(p^s / x) is proportional to f(x) for some integer s:
    the root multiset is stable under r -> p^s / r."""
    d = len(coeffs) - 1
    slopes = newton_slopes(coeffs, p)
    total = sum(slopes)
    if (2 * total) % d != 0:
        return False
    s = Fraction(2 * total, d)
    if s.denominator != 1:
        return False
    s = int(s)
    # x^d f(p^s / x) has coefficients c_{d-i} p^{s (d-i)}
    lhs = [coeffs[d - i] * Fraction(p) ** (s * (d - i))
           for i in range(d + 1)]
    pivot = next(i for i, c in enumerate(coeffs) if c != 0)
    if lhs[pivot] == 0:
        return False
    lam = Fraction(lhs[pivot], coeffs[pivot])
    return all(l == lam * c for l, c in zip(lhs, coeffs))


def splitting_fraction(coeffs, residues, modulus: int,
                       num_primes: int = 50, start: int = 2) -> float:
    """Fraction of the first `num_primes` primes q = residues (mod modulus)
    modulo which the polynomial factors completely into linear pieces."""
    x = Symbol("x")
    poly = sum(c * x ** i for i, c in enumerate(coeffs))
    lead = coeffs[-1]
    hits = tried = 0
    q = start
    while tried < num_primes:
        q = next_prime(q)
        if q % modulus not in residues or lead % q == 0:
            continue
        tried += 1
        factors = Poly(poly, x, modulus=q).factor_list()[1]
        if all(f.degree() <= 1 for f, _ in factors):
            hits += 1
    return hits / num_primes


@dataclass
class RecognitionResult:
    polynomial: tuple | None    # integer coefficients, low to high
    twist: int | None           # accepted candidate's torsion twist
    algdep: AlgdepResult | None
    newton_ok: bool
    reciprocal_ok: bool
    split_fraction: float
    matches: list               # all (twist, coefficients) that algdep found

    @property
    def recognized(self) -> bool:
        return (self.polynomial is not None and self.newton_ok
                and self.reciprocal_ok)


def recognize(candidates: list, group: NarrowClassGroup, tau_class: int,
              ctx: PadicContext, degree: int = 4, budget: int = 20,
              height_bound: int = 10 ** 6,
              split_modulus: int = 12, split_residues=(1,),
              num_split_primes: int = 50) -> RecognitionResult:
    """Search the torsion twists for one whose value satisfies an integer
    polynomial of bounded degree, then validate it: the Newton polygon must
    reproduce twelve times the partial-zeta multiset, the polynomial must be
    reciprocal up to a p-power, and it must split completely modulo (most)
    primes in the given residue classes."""
    p = ctx.p
    expected = sorted(12 * v for v in
                      valuation_predictions(group, tau_class).values())
    matches = []
    best = None
    for cand in candidates:
        # a candidate of negative p-order is recognized through its integral
        # rescaling p^s * u; the polynomial pulls back by x -> x / p^s
        s = max(0, -cand.value.v)
        value = cand.value * ctx.from_int(p ** s) if s else cand.value
        # ascending degrees: the smallest-degree relation is canonical and
        # keeps the lattice margin meaningful (padding the true degree
        # plants x * f(x) as an equally short vector)
        for d in range(1, degree + 1):
            res = algdep_padic(value, d, budget, height_bound)
            if not res.found:
                continue
            coeffs = list(res.coefficients)
            if s:
                coeffs = [c * p ** (s * i) for i, c in enumerate(coeffs)]
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
            if sum(1 for c in coeffs if c) < 2:
                continue        # degenerate lattice artifact, not a relation
            g = 0
            for c in coeffs:
                g = gcd(g, abs(c))
            coeffs = tuple(c // g for c in coeffs)
            # a wrong torsion twist can still satisfy a cyclotomic-scaled
            # relation; the Newton polygon gives it away
            matches.append((cand.twist, coeffs))
            # several torsion twists can pass every check (a root of unity
            # in the field times the unit is again such a unit); take the
            # first matching twist for determinism.  A spurious low-degree
            # relation (possible at small budgets) fails the polygon test,
            # so keep ascending past it
            if newton_slopes(coeffs, p) == expected:
                if best is None:
                    best = (cand.twist, coeffs, res)
                break
    if best is None:
        return RecognitionResult(None, None, None, False, False, 0.0,
                                 matches)
    twist, coeffs, res = best
    reciprocal = is_reciprocal_up_to_p_power(coeffs, p)
    frac = splitting_fraction(coeffs, split_residues, split_modulus,
                              num_split_primes)
    return RecognitionResult(coeffs, twist, res, True, reciprocal, frac,
                             matches)


# --------------------------------------------------------------------------
# L-invariants from the recognized unit
# --------------------------------------------------------------------------

def _sqrt_rational(ctx: PadicContext, q: Fraction) -> PadicScalar:
    """Square root of a nonzero rational in Q_{p^2} (valuation must be
    even; a nonresidue unit part picks up the omega direction)."""
    q = Fraction(q)
    if q == 0:
        return ctx.zero()
    p = ctx.p
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    if v % 2:
        raise ValueError("odd valuation: square root leaves the field")
    unit = num * pow(den, -1, ctx.modulus) % ctx.modulus
    if pow(unit % p, (p - 1) // 2, p) == 1:
        out = ctx.from_int(ctx.sqrt_zp(unit))
    else:
        # divide by the nonresidue r = omega^2, take sqrt, restore omega
        unit = unit * pow(ctx.r, -1, ctx.modulus) % ctx.modulus
        out = ctx.omega() * ctx.from_int(ctx.sqrt_zp(unit))
    return out * ctx.from_rational(Fraction(p) ** (v // 2))


def quadratic_roots(coeffs, ctx: PadicContext) -> tuple:
    """Both roots in Q_{p^2} of an integer quadratic c0 + c1 x + c2 x^2."""
    c0, c1, c2 = coeffs
    disc = Fraction(c1 * c1 - 4 * c0 * c2)
    sq = _sqrt_rational(ctx, disc)
    inv2a = ctx.from_rational(Fraction(1, 2 * c2))
    b = ctx.from_int(-c1)
    return ((b + sq) * inv2a, (b - sq) * inv2a)


def l_invariants_from_unit(coeffs, ctx: PadicContext) -> tuple:
    """(L_1, L_2) from the two embeddings of the recognized unit:
    L_j = -log_p(root_j) / ord_p(root_j).  Quadratic units only."""
    if len(coeffs) != 3:
        raise ValueError("need a quadratic minimal polynomial")
    r1, r2 = quadratic_roots(coeffs, ctx)
    out = []
    for r in sorted((r1, r2), key=lambda x: x.v):
        if r.v == 0:
            raise ArithmeticError("unit root has zero p-order")
        out.append(iwasawa_log(r) * ctx.from_rational(Fraction(-1, r.v)))
    return tuple(out)
