"""Exact integer lattice reduction and p-adic algebraic-dependence
recognition.

The LLL reduction here runs entirely over exact rationals (no floating-point
Gram-Schmidt): the lattices arising from minimal-polynomial recognition have
dimension at most a dozen, where exactness is affordable and makes runs
reproducible bit-for-bit.

`algdep_padic` recognizes an integer polynomial vanishing at a given element
of Q_{p^2} to a prescribed p-adic precision budget, by reducing the lattice
of coefficient vectors (c_0, ..., c_d) joined to the two residue coordinates
of sum c_i x^i on the basis {1, w}.  Splitting into two Z_p coordinates lets
the same lattice recognize rational-coefficient polynomials even when x
generates the quadratic extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, sqrt

from .padic import PadicScalar


# --------------------------------------------------------------------------
# exact LLL
# --------------------------------------------------------------------------

def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _gram_schmidt(basis):
    """Exact Gram-Schmidt over Q: returns (mu, norms2) where norms2[i] is the
    squared length of the i-th orthogonalized vector as a Fraction."""
    n = len(basis)
    mu = [[Fraction(0)] * n for _ in range(n)]
    star = [[Fraction(x) for x in row] for row in basis]
    norms2 = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = Fraction(_dot(basis[i], star[j])) / norms2[j] \
                if norms2[j] else Fraction(0)
            star[i] = [si - mu[i][j] * sj
                       for si, sj in zip(star[i], star[j])]
        norms2[i] = _dot(star[i], star[i])
        if norms2[i] == 0:
            raise ValueError("basis rows are linearly dependent")
        mu[i][i] = Fraction(1)
    return mu, norms2


def gram_det(basis) -> int:
    """Determinant of the Gram matrix (squared covolume); reduction
    invariant."""
    _, norms2 = _gram_schmidt(basis)
    d = Fraction(1)
    for n2 in norms2:
        d *= n2
    assert d.denominator == 1
    return d.numerator


def lll_reduce(basis, delta: Fraction = Fraction(99, 100)):
    """LLL-reduce a list of integer rows; exact arithmetic throughout.

    Returns a new list of rows spanning the same lattice, satisfying the
    size-reduction and Lovasz conditions at parameter delta."""
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    b = [list(row) for row in basis]
    n = len(b)
    mu, B = _gram_schmidt(b)

    def size_reduce(k, j):
        if abs(mu[k][j]) > Fraction(1, 2):
            q = round(mu[k][j])
            b[k] = [x - q * y for x, y in zip(b[k], b[j])]
            for i in range(j + 1):
                mu[k][i] -= q * mu[j][i]

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            size_reduce(k, j)
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            b[k - 1], b[k] = b[k], b[k - 1]
            mu, B = _gram_schmidt(b)
            k = max(k - 1, 1)
    return b


def is_lll_reduced(basis, delta: Fraction = Fraction(99, 100)) -> bool:
    mu, B = _gram_schmidt(basis)
    n = len(basis)
    for k in range(1, n):
        if any(abs(mu[k][j]) > Fraction(1, 2) for j in range(k)):
            return False
        if B[k] < (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            return False
    return True


# --------------------------------------------------------------------------
# p-adic algebraic dependence
# --------------------------------------------------------------------------

@dataclass
class AlgdepResult:
    coefficients: tuple | None   # c_0, ..., c_d (low to high), or None
    degree: int                  # requested degree bound
    budget: int                  # p-adic congruence precision
    height: int | None           # max |c_i| of the accepted polynomial
    margin: float                # second-shortest / shortest row length

    @property
    def found(self) -> bool:
        return self.coefficients is not None


def _residue_pair(x: PadicScalar, budget: int):
    """(a, b) with x = a + b*w mod p^budget; requires that much certified
    precision."""
    ctx = x.ctx
    if x.is_zero:
        return 0, 0
    if x.v < 0:
        raise ValueError("element must be p-integral")
    if x.v + x.effective_prec() < budget:
        raise ValueError(
            f"precision budget {budget} exceeds certified precision "
            f"{x.v + x.effective_prec()}")
    m = ctx.p ** budget
    pv = ctx.p ** x.v
    return (x.u0 * pv) % m, (x.u1 * pv) % m


def eval_poly(coeffs, x: PadicScalar) -> PadicScalar:
    """Evaluate an integer polynomial (coefficients low to high) at x."""
    acc = x.ctx.zero()
    for c in reversed(coeffs):
        acc = acc * x + x.ctx.from_int(c)
    return acc


def _normalize(coeffs):
    g = 0
    for c in coeffs:
        g = gcd(g, abs(c))
    coeffs = [c // g for c in coeffs]
    lead = next(c for c in reversed(coeffs) if c)
    if lead < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


def algdep_padic(x: PadicScalar, degree: int, budget: int,
                 height_bound: int = 10 ** 6,
                 delta: Fraction = Fraction(99, 100)) -> AlgdepResult:
    """Smallest integer polynomial of degree <= `degree` vanishing at x
    modulo p^budget, found by LLL on the coefficient-congruence lattice.

    A failed search (no candidate below the height bound) is a legitimate
    outcome, reported with coefficients None."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    ctx = x.ctx
    m = ctx.p ** budget
    # residue coordinates of 1, x, ..., x^degree
    coords = []
    power = ctx.one()
    for i in range(degree + 1):
        coords.append(_residue_pair(power, budget))
        if i < degree:
            power = power * x
    d1 = degree + 1
    # scale the residue columns so that any vector with a nonzero residue
    # outweighs every plausible coefficient vector; the shortest reduced row
    # is then an exact congruence when one exists below the height bound
    W = m
    rows = []
    for i, (a, b) in enumerate(coords):
        row = [0] * d1 + [a * W, b * W]
        row[i] = 1
        rows.append(row)
    rows.append([0] * d1 + [m * W, 0])
    rows.append([0] * d1 + [0, m * W])

    reduced = lll_reduce(rows, delta)
    order = sorted(reduced, key=lambda r: _dot(r, r))
    norms = [sqrt(_dot(r, r)) for r in order]
    margin = norms[1] / norms[0] if norms[0] else float("inf")

    for row in order:
        c = row[:d1]
        if all(v == 0 for v in c):
            continue
        if sum(ci * a for ci, (a, _) in zip(c, coords)) % m:
            continue
        if sum(ci * b for ci, (_, b) in zip(c, coords)) % m:
            continue
        c = _normalize(c)
        height = max(abs(v) for v in c)
        if height > height_bound:
            continue
        return AlgdepResult(c, degree, budget, height, margin)
    return AlgdepResult(None, degree, budget, None, margin)
