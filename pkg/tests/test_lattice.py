import random
from fractions import Fraction

import pytest

from rmlab.lattice import (algdep_padic, eval_poly, gram_det, is_lll_reduced,
                           lll_reduce)
from rmlab.padic import PadicContext
from rmlab.quadfield import sqrtD_padic


def test_lll_rejects_bad_delta_and_dependent_rows():
    with pytest.raises(ValueError):
        lll_reduce([[1, 0], [0, 1]], Fraction(1, 5))
    with pytest.raises(ValueError):
        lll_reduce([[1, 2], [2, 4]])


def test_lll_orthogonal_basis_unchanged_up_to_sign():
    basis = [[2, 0, 0], [0, 3, 0], [0, 0, 5]]
    out = lll_reduce(basis)
    assert sorted(tuple(map(abs, r)) for r in out) == \
        sorted(tuple(map(abs, r)) for r in basis)


def test_lll_output_is_reduced_and_preserves_gram_det():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randrange(2, 6)
        while True:
            basis = [[rng.randrange(-30, 31) for _ in range(n)]
                     for _ in range(n)]
            try:
                det = gram_det(basis)
                break
            except ValueError:
                continue
        out = lll_reduce(basis)
        assert is_lll_reduced(out)
        assert gram_det(out) == det


def test_lll_recovers_planted_short_vector():
    rng = random.Random(11)
    for _ in range(15):
        short = [rng.randrange(-3, 4) for _ in range(4)]
        if all(v == 0 for v in short):
            short[0] = 1
        rows = [short[:]] + [[rng.randrange(-500, 501) for _ in range(4)]
                             for _ in range(3)]
        try:
            gram_det(rows)
        except ValueError:
            continue
        # scramble by random elementary row operations (unimodular)
        for _ in range(20):
            i, j = rng.randrange(4), rng.randrange(4)
            if i != j:
                c = rng.randrange(-2, 3)
                rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
        out = lll_reduce(rows)
        best = min(out, key=lambda r: sum(v * v for v in r))
        assert sum(v * v for v in best) <= sum(v * v for v in short)


# --------------------------------------------------------------------------
# algdep
# --------------------------------------------------------------------------

CTX = PadicContext(5, 40)


def hensel_root(coeffs, ctx, a0, a1):
    """Newton-lift a simple root of the integer polynomial from its residue
    a0 + a1*w mod p."""
    x = ctx.from_coords(a0, a1)
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    for _ in range(12):
        fx = eval_poly(coeffs, x)
        if fx.is_zero:
            break
        x = x - fx / eval_poly(deriv, x)
    assert eval_poly(coeffs, x).is_zero or \
        eval_poly(coeffs, x).v >= ctx.prec - 5
    return x


def find_simple_residue_root(coeffs, p):
    for a0 in range(p):
        for a1 in range(p):
            ctx1 = PadicContext(p, 1)
            x = ctx1.from_coords(a0, a1)
            fx = eval_poly(coeffs, x)
            if not (fx.is_zero or fx.v >= 1):
                continue
            deriv = [i * c for i, c in enumerate(coeffs)][1:]
            dfx = eval_poly(deriv, x)
            if dfx.is_zero or dfx.v >= 1:
                continue
            return a0, a1
    return None


def test_algdep_degree_one():
    res = algdep_padic(CTX.from_int(3), 1, 30)
    assert res.found and res.coefficients == (-3, 1)
    assert res.height == 3 and res.margin > 10


def test_algdep_sqrt_d():
    for D in (12, 17, 33):
        x = sqrtD_padic(CTX, D)
        res = algdep_padic(x, 2, 30)
        assert res.coefficients == (-D, 0, 1)


def test_algdep_rejects_bad_inputs():
    with pytest.raises(ValueError):
        algdep_padic(CTX.from_int(3), 0, 10)
    with pytest.raises(ValueError):
        algdep_padic(CTX.from_int(3), 1, 45)  # beyond working precision
    with pytest.raises(ValueError):
        algdep_padic(CTX.from_rational(Fraction(1, 5)), 1, 30)


def test_algdep_not_found_is_reported():
    # a generic p-adic number admits no small-height low-degree relation
    rng = random.Random(2)
    x = CTX.from_coords(rng.randrange(5 ** 40), rng.randrange(5 ** 40))
    res = algdep_padic(x, 3, 35, height_bound=10 ** 4)
    assert not res.found and res.coefficients is None and res.height is None


def test_algdep_plant_and_recover():
    rng = random.Random(5)
    recovered = 0
    total = 60
    done = 0
    while done < total:
        d = rng.randrange(2, 5)
        coeffs = [rng.randrange(-50, 51) for _ in range(d)] + \
            [rng.randrange(1, 51)]
        root = find_simple_residue_root(coeffs, 5)
        if root is None:
            continue
        done += 1
        x = hensel_root(coeffs, CTX, *root)
        res = algdep_padic(x, d, 30, height_bound=200)
        if not res.found:
            continue
        # the recovered polynomial must vanish at the planted root and
        # divide into the planted one's height class
        val = eval_poly(res.coefficients, x)
        assert val.is_zero or val.v >= 30 - 3
        recovered += 1
    assert recovered >= int(0.99 * total)


def test_algdep_margin_grows_with_budget():
    x = sqrtD_padic(CTX, 12)
    m1 = algdep_padic(x, 2, 16).margin
    m2 = algdep_padic(x, 2, 32).margin
    assert m2 > m1
