"""RM values of the winding cocycle.

Two independent routes to the same weighted multisets of RM points:

* the ideal-pair route: pairs (I, nu) with Tr(nu) = n, p coprime to I, I
  dividing (nu) * (different), and I in the ideal class of the lattice
  (1, tau), mapped to w = nu_0 * sqrt(D) / Nm(I);
* the double-coset route: representatives delta of determinant-n matrices
  modulo SL2(Z) on the left and the stabilizer of tau on the right, with the
  crossing points of each orbit SL2(Z) * delta(tau) enumerated exactly via
  the finitely many forms (A, B, C) with A*C < 0 in the right class.

Both feed the weighted p-adic log sum log_Tn_Jw.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .padic import PadicContext, PadicScalar, iwasawa_log
from .quadfield import (IdealDivisorEngine, NarrowClassGroup, QuadNum,
                        RMPoint, automorph, embed_quadnum, enumerate_trace,
                        is_primitive, reduce_cycle, reduce_form,
                        splitting_type)


@dataclass(frozen=True)
class WeightedRMPoint:
    """An RM point w with opposite-sign real embeddings, its intersection
    weight, and the witness that produced it."""

    w: QuadNum
    weight: int          # +1 iff w > 0 > w', -1 iff w < 0 < w'
    provenance: tuple    # ("ideal", norm_I, s) or ("coset", delta, form)

    def __post_init__(self):
        assert self.w.sign() * self.w.conj().sign() < 0
        assert self.weight == (1 if self.w.sign() > 0 else -1)


def _check_instance(D: int, n: int, p: int):
    if splitting_type(D, p) != "inert":
        raise ValueError(f"p = {p} is not inert in Q(sqrt({D}))")
    if gcd(n, p) != 1:
        raise ValueError("n must be coprime to p")


def lattice_class(group: NarrowClassGroup, tau: RMPoint) -> int:
    """Narrow class of the lattice Z + Z*tau."""
    return group.class_of_rm_point(tau)


def rm_plus_set(tau: RMPoint, n: int, p: int,
                group: NarrowClassGroup | None = None,
                engine: IdealDivisorEngine | None = None) -> list:
    """RM_n^+(tau) via the ideal-pair parametrization; weight +1 points."""
    D = tau.disc
    _check_instance(D, n, p)
    group = group or NarrowClassGroup(D)
    engine = engine or IdealDivisorEngine(group, p)
    required = lattice_class(group, tau)
    out = []
    for elt in enumerate_trace(n, D):
        assert elt.vp(p) == 0  # inert p with p coprime to n
        alpha = elt.alpha  # nu * sqrt(D), generates (nu) * different
        for div in engine.divisors(alpha):
            if div.class_idx != required:
                continue
            w = alpha * Fraction(1, div.norm)
            out.append(WeightedRMPoint(w, 1, ("ideal", div.norm, elt.s)))
    return out


def rm_minus_set(tau: RMPoint, n: int, p: int,
                 group: NarrowClassGroup | None = None,
                 engine: IdealDivisorEngine | None = None) -> list:
    """RM_n^-(tau) = -RM_n^+(-tau); weight -1 points."""
    plus = rm_plus_set(tau.negate(), n, p, group, engine)
    return [WeightedRMPoint(-pt.w, -1, pt.provenance) for pt in plus]


def log_Tn_Jw(tau: RMPoint, n: int, p: int, ctx: PadicContext,
              group: NarrowClassGroup | None = None,
              engine: IdealDivisorEngine | None = None) -> PadicScalar:
    """Weighted p-adic log sum over RM_n^+(tau) and RM_n^-(tau)."""
    D = tau.disc
    group = group or NarrowClassGroup(D)
    engine = engine or IdealDivisorEngine(group, p)
    total = ctx.zero()
    for pt in rm_plus_set(tau, n, p, group, engine):
        total = total + iwasawa_log(embed_quadnum(pt.w, ctx))
    for pt in rm_minus_set(tau, n, p, group, engine):
        total = total - iwasawa_log(embed_quadnum(pt.w, ctx))
    return total


# --------------------------------------------------------------------------
# double-coset oracle
# --------------------------------------------------------------------------

def _ext_gcd(a: int, b: int):
    if b == 0:
        return abs(a), (1 if a >= 0 else -1), 0
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _hnf2(M):
    """Left-SL2(Z) Hermite normal form [[a, b], [0, d]], a, d > 0, 0 <= b < d
    of an integer matrix with positive determinant."""
    (a, b), (c, d) = M
    if c:
        g, x, y = _ext_gcd(a, c)
        # [[x, y], [-c/g, a/g]] is in SL2(Z) and kills the lower-left entry
        a, b, c, d = g, x * b + y * d, 0, (-c // g) * b + (a // g) * d
    if a < 0:
        a, b, d = -a, -b, -d  # multiply by -identity
    assert a > 0 and d > 0
    b %= d
    return ((a, b), (0, d))


def _matmul(M, N):
    return ((M[0][0] * N[0][0] + M[0][1] * N[1][0],
             M[0][0] * N[0][1] + M[0][1] * N[1][1]),
            (M[1][0] * N[0][0] + M[1][1] * N[1][0],
             M[1][0] * N[0][1] + M[1][1] * N[1][1]))


def double_coset_reps(tau: RMPoint, n: int, height_bound: int = 10000):
    """Representatives of SL2(Z) \\ M2(Z)_n / Stab(tau), as HNF matrices."""
    f = tau.form
    g = automorph(f)
    ginv = ((g[1][1], -g[0][1]), (-g[1][0], g[0][0]))
    hnfs = [((a, b), (0, n // a))
            for a in range(1, n + 1) if n % a == 0
            for b in range(n // a)]
    remaining = set(hnfs)
    reps = []
    while remaining:
        start = min(remaining)
        orbit = {start}
        frontier = [start]
        steps = 0
        while frontier:
            steps += 1
            if steps > height_bound:
                raise ArithmeticError("automorph orbit failed to close")
            cur = frontier.pop()
            for m in (g, ginv):
                nxt = _hnf2(_matmul(cur, m))
                if nxt not in orbit:
                    orbit.add(nxt)
                    frontier.append(nxt)
        reps.append(start)
        remaining -= orbit
    return reps


def _crossing_points(point: RMPoint, D: int):
    """All RM points w in the SL2(Z)-orbit of `point` whose geodesic (w', w)
    separates 0 from infinity: exactly the roots of equivalent forms with
    A*C < 0.  Finite, enumerated exactly; values returned over sqrt(D)."""
    Dp = point.disc
    k = isqrt(Dp // D)
    assert k * k * D == Dp
    cycle = set(reduce_cycle(point.form))
    s = isqrt(Dp)
    out = []
    for B in range(-s, s + 1):
        if (B * B - Dp) % 4:
            continue
        AC = (B * B - Dp) // 4  # negative since B^2 < Dp
        if AC == 0:
            continue
        for A in range(1, -AC + 1):
            if AC % A:
                continue
            for Asigned in (A, -A):
                fcand = (Asigned, B, AC // Asigned)
                if not is_primitive(fcand):
                    continue
                if reduce_form(fcand) not in cycle:
                    continue
                # (-B + k*sqrt(D)) / (2A), expressed over sqrt(D)
                w = QuadNum(D, Fraction(-B, 2 * Asigned),
                            Fraction(k, 2 * Asigned))
                out.append(w)
    return out


def _strip_p(w: QuadNum, p: int) -> QuadNum:
    """Divide out the p-power content of an RM point (inert p, so
    v_p(w) = v_p(Nm w) / 2)."""
    nm = w.norm()
    vp = 0
    num, den = abs(nm.numerator), nm.denominator
    while num % (p * p) == 0:
        num //= p * p
        vp += 1
    while den % (p * p) == 0:
        den //= p * p
        vp -= 1
    return w * Fraction(1, p) ** vp if vp else w


def rm_set_by_cosets(tau: RMPoint, n: int, p: int,
                     height_bound: int = 10000) -> list:
    """Oracle route: weighted RM points from the double-coset formula."""
    D = tau.disc
    _check_instance(D, n, p)
    out = []
    for delta in double_coset_reps(tau, n, height_bound):
        (a, b), (_, d) = delta
        val = (tau.value() * a + QuadNum(D, b, 0)) * Fraction(1, d)
        pt = RMPoint.from_value(val)
        for w in _crossing_points(pt, D):
            w0 = _strip_p(w, p)
            weight = 1 if w0.sign() > 0 else -1
            out.append(WeightedRMPoint(w0, weight, ("coset", delta, pt.form)))
    return out


def log_Tn_Jw_by_cosets(tau: RMPoint, n: int, p: int,
                        ctx: PadicContext,
                        height_bound: int = 10000) -> PadicScalar:
    total = ctx.zero()
    for pt in rm_set_by_cosets(tau, n, p, height_bound):
        term = iwasawa_log(embed_quadnum(pt.w, ctx))
        total = total + (term if pt.weight > 0 else -term)
    return total
