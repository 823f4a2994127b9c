"""Fourier coefficients of weight-one Eisenstein and cuspidal families over a
real quadratic field, their diagonal restrictions, and ordinary projection.

The diagonal restriction derivative produces a q-series whose coefficients
are p-adic log sums over ideal divisors; the ordinary projection is realized
as the stabilized limit of coefficients at indices n * p^{2m}.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .modforms import QSeries
from .padic import (DualScalar, PadicContext, PadicScalar, iwasawa_log)
from .quadfield import (IdealDivisorEngine, NarrowClassGroup,
                        TotallyPositiveElement, embed_quadnum,
                        enumerate_trace, factor_alpha, principal_ideal,
                        splitting_type)


class LogCache:
    """Memoized Iwasawa logs of rational integers in a fixed context."""

    def __init__(self, ctx: PadicContext):
        self.ctx = ctx
        self._cache = {}

    def log_int(self, n: int) -> PadicScalar:
        if n not in self._cache:
            self._cache[n] = iwasawa_log(self.ctx.from_int(n))
        return self._cache[n]


def _alpha_class(group: NarrowClassGroup, engine: IdealDivisorEngine,
                 nu: TotallyPositiveElement) -> int:
    """Narrow class of (nu) * different = (nu * sqrt(D))."""
    return group.narrow_class_of_ideal(
        principal_ideal(group.D, nu.alpha))


def sigma_psi(nu: TotallyPositiveElement, chi: tuple,
              engine: IdealDivisorEngine) -> int:
    """Sum of psi(I) over p-coprime divisors I of (nu) * different."""
    return sum(chi[d.class_idx] for d in engine.divisors(nu.alpha))


def eis_family_coeff(pair: str, nu: TotallyPositiveElement, chi: tuple,
                     engine: IdealDivisorEngine, ctx: PadicContext,
                     logs: LogCache | None = None) -> DualScalar:
    """Coefficient of the first-order Eisenstein family, pair in
    {"1,psi", "psi,1"}: sum over p-coprime I | (nu)*different of
    eta(cofactor) * phi(I) * (1 + eps * log Nm(I))."""
    if pair not in ("1,psi", "psi,1"):
        raise ValueError("unsupported character pair")
    logs = logs or LogCache(ctx)
    group = engine.group
    total_class = group.narrow_class_of_ideal(
        principal_ideal(group.D, nu.alpha))
    a = ctx.zero()
    b = ctx.zero()
    for d in engine.divisors(nu.alpha):
        cof_class = group.compose(total_class, group.inverse[d.class_idx])
        if pair == "1,psi":
            weight = chi[d.class_idx]           # eta = 1, phi = psi
        else:
            weight = chi[cof_class]             # eta = psi, phi = 1
        a = a + weight
        b = b + weight * logs.log_int(d.norm)
    return DualScalar(a, b)


def antiparallel_coeff(nu: TotallyPositiveElement, chi: tuple,
                       engine: IdealDivisorEngine, ctx: PadicContext,
                       L1: PadicScalar, L2: PadicScalar,
                       logs: LogCache | None = None) -> DualScalar:
    """Coefficient of the anti-parallel cuspidal family:
    sum over I | (nu)*different of
    psi(I)(1 + eps(-log nu + (L1/L) log Nm I + (L2/L) log Nm(cofactor))),
    extended to p | nu by p-stability."""
    Ltot = L1 + L2
    if Ltot.is_zero:
        raise ArithmeticError("degenerate total L-invariant")
    logs = logs or LogCache(ctx)
    group = engine.group
    p = engine.p
    nu0 = nu.deprived(p)
    total_norm = nu0.ideal_norm
    r1 = L1 * Ltot.inverse()
    r2 = L2 * Ltot.inverse()
    log_nu = iwasawa_log(embed_quadnum(nu0.nu, ctx))
    a = ctx.zero()
    b = ctx.zero()
    for d in engine.divisors(nu0.alpha):
        w = chi[d.class_idx]
        term = (-log_nu + r1 * logs.log_int(d.norm)
                + r2 * logs.log_int(total_norm // d.norm))
        a = a + w
        b = b + w * term
    return DualScalar(a, b)


def eis_combination_coeff(nu: TotallyPositiveElement, chi: tuple,
                          engine: IdealDivisorEngine, ctx: PadicContext,
                          L1: PadicScalar, L2: PadicScalar,
                          logs: LogCache | None = None) -> DualScalar:
    """(L2/L) * (E(1,psi) - E(psi,1)) coefficient at nu."""
    Ltot = L1 + L2
    if Ltot.is_zero:
        raise ArithmeticError("degenerate total L-invariant")
    logs = logs or LogCache(ctx)
    e1 = eis_family_coeff("1,psi", nu, chi, engine, ctx, logs)
    e2 = eis_family_coeff("psi,1", nu, chi, engine, ctx, logs)
    r2 = L2 * Ltot.inverse()
    return (e1 - e2).scale(r2)


def dual_coeff_Fplus(nu: TotallyPositiveElement, chi: tuple,
                     engine: IdealDivisorEngine, ctx: PadicContext,
                     logs: LogCache | None = None) -> DualScalar:
    """Coefficient of the combined family, free of L-invariants:
    sum over I | (nu_0)*different of psi(I)(1 - eps log(nu_0 / Nm I))."""
    logs = logs or LogCache(ctx)
    p = engine.p
    nu0 = nu.deprived(p)
    log_nu = iwasawa_log(embed_quadnum(nu0.nu, ctx))
    a = ctx.zero()
    b = ctx.zero()
    for d in engine.divisors(nu0.alpha):
        w = chi[d.class_idx]
        a = a + w
        b = b - w * (log_nu - logs.log_int(d.norm))
    return DualScalar(a, b)


def diag_coefficient(n: int, chi: tuple, engine: IdealDivisorEngine,
                     ctx: PadicContext,
                     logs: LogCache | None = None) -> PadicScalar:
    """n-th coefficient of the diagonal restriction derivative:
    -sum over Tr(nu)=n, p-coprime I | (nu_0)*different, of
    psi(I) log_p(nu_0 sqrt(D) / Nm(I)).

    The divisor sum factors over the prime factorization of (nu_0)*different:
    with x_i = psi(prime_i) and e ranging to the multiplicity, the character
    mass is prod_i A_i (A_i = sum_e x_i^e) and the psi-weighted log-norm sum
    is sum_i (prod_{j != i} A_j) C_i log(q_i) with C_i = sum_e e x_i^e.  This
    avoids materializing divisor lists and skips the (often unneeded) log of
    nu_0 when the character mass vanishes."""
    logs = logs or LogCache(ctx)
    D = engine.D
    p = engine.p
    total = ctx.zero()
    for elt in enumerate_trace(n, D):
        elt0 = elt.deprived(p)
        data = []
        for fac in factor_alpha(D, elt0.alpha):
            if fac[0] == p:
                continue
            emax, pnorm = fac[3], fac[4]
            x = chi[engine.prime_class(fac)]
            A = sum(x ** e for e in range(emax + 1))
            C = sum(e * x ** e for e in range(1, emax + 1))
            data.append((A, C, pnorm))
        zeros = [i for i, (A, _, _) in enumerate(data) if A == 0]
        if len(zeros) <= 1:
            for i, (A, C, q) in enumerate(data):
                if not C:
                    continue
                cof = 1
                for j, (Aj, _, _) in enumerate(data):
                    if j != i:
                        cof *= Aj
                if cof:
                    total = total + logs.log_int(q) * (cof * C)
        if not zeros:
            mass = 1
            for A, _, _ in data:
                mass *= A
            total = total - \
                iwasawa_log(embed_quadnum(elt0.alpha, ctx)) * mass
    return total


def diag_restrict_derivative(chi: tuple, group: NarrowClassGroup, p: int,
                             n_max: int, ctx: PadicContext,
                             engine: IdealDivisorEngine | None = None,
                             logs: LogCache | None = None) -> QSeries:
    """q-series of the diagonal restriction derivative up to q^{n_max};
    constant term left unknown."""
    if splitting_type(group.D, p) != "inert":
        raise ValueError(f"p = {p} is not inert in Q(sqrt({group.D}))")
    engine = engine or IdealDivisorEngine(group, p)
    logs = logs or LogCache(ctx)
    coeffs = [None] + [diag_coefficient(n, chi, engine, ctx, logs)
                       for n in range(1, n_max + 1)]
    return QSeries(tuple(coeffs), p)


@dataclass
class StabilizationCertificate:
    values: list               # a_{n p^{2m}} for m = 0..m_max
    agreement: list            # valuation of consecutive differences
    stabilized_at: int         # digits of agreement of the last two terms


def shanks_step(seq: list) -> list:
    """One column of the Shanks table: eliminates the dominant geometric
    transient from a convergent sequence."""
    out = []
    for a0, a1, a2 in zip(seq, seq[1:], seq[2:]):
        d0, d1 = a1 - a0, a2 - a1
        dd = d1 - d0
        out.append(a2 if dd.is_zero else a2 - d1 * d1 / dd)
    return out


@dataclass
class AccelerationCertificate:
    depth: int                 # number of Shanks columns applied
    agreements: list           # per column, valuations of consecutive diffs
    stabilized_at: int         # agreement of the last two deepest entries


def accelerated_ordinary_projection(producer, n: int, p: int, m_max: int,
                                    ctx: PadicContext):
    """Ordinary projection as the limit of producer(n * p^m), m = 0..m_max,
    extrapolated by the iterated Shanks transform.

    The non-ordinary transient is a sum of geometric terms (one per
    finite-slope U_p eigenvalue); each Shanks column removes the dominant
    one, so the deepest table entry converges far beyond the raw sequence.
    Returns (value, certificate)."""
    if gcd(n, p) != 1:
        raise ValueError("n must be coprime to p")
    if m_max < 2:
        raise ValueError("need at least three terms to extrapolate")
    seq = [producer(n * p ** m) for m in range(m_max + 1)]
    agreements = []

    def profile(s):
        return [None if (x - y).is_zero else (x - y).v
                for x, y in zip(s, s[1:])]

    agreements.append(profile(seq))
    depth = 0
    while len(seq) >= 3:
        seq = shanks_step(seq)
        depth += 1
        agreements.append(profile(seq))
    # conservative certificate: the deepest column with two entries to
    # compare (a single-entry column certifies nothing by itself)
    last = next((prof[-1] for prof in reversed(agreements) if prof), None)
    stabilized = ctx.prec if last is None else last
    return seq[-1], AccelerationCertificate(depth, agreements, stabilized)


def ordinary_projection(producer, n: int, p: int, m_max: int,
                        ctx: PadicContext,
                        threshold: int | None = None):
    """Stabilized limit of producer(n * p^{2m}) for m = 0..m_max.

    Returns (value, certificate); raises if the last two terms do not agree
    to the threshold (default: half the working precision)."""
    if gcd(n, p) != 1:
        raise ValueError("n must be coprime to p")
    if threshold is None:
        threshold = ctx.prec // 2
    values = [producer(n * p ** (2 * m)) for m in range(m_max + 1)]
    agreement = []
    for x, y in zip(values, values[1:]):
        d = x - y
        agreement.append(None if d.is_zero else d.v)
    last = agreement[-1] if agreement else None
    digits = ctx.prec if last is None else last
    if digits < threshold:
        raise ArithmeticError(
            f"no stabilization: last agreement at valuation {digits}, "
            f"needed {threshold}; profile {agreement}")
    cert = StabilizationCertificate(values, agreement, digits)
    return values[-1], cert
