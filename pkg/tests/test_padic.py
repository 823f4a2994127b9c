import random

import pytest
from hypothesis import given, settings, strategies as st

from rmlab.padic import (DualScalar, PadicContext, PadicScalar, iwasawa_log,
                         padic_exp, teichmuller)

CTX = PadicContext(5, 20)
CTX7 = PadicContext(7, 15)


def rand_scalar(ctx, rng, nonzero=False, unit=False):
    while True:
        a0 = rng.randrange(ctx.modulus)
        a1 = rng.randrange(ctx.modulus)
        if a0 == 0 and a1 == 0:
            continue
        v = 0 if unit else rng.randrange(-4, 5)
        x = ctx.from_coords(a0, a1, v)
        if unit and x.v != 0:
            continue
        if not (nonzero and x.is_zero):
            return x


def test_context_nonresidue():
    assert CTX.r == 2  # 2 is a non-residue mod 5
    assert CTX7.r == 3
    assert pow(CTX.r, (5 - 1) // 2, 5) == 4


def test_context_rejects_small_p():
    with pytest.raises(ValueError):
        PadicContext(3, 10)
    with pytest.raises(ValueError):
        PadicContext(9, 10)


def test_omega_squared_is_r():
    w = CTX.omega()
    assert (w * w).equals(CTX.from_int(CTX.r))


def test_from_rational_roundtrip():
    x = CTX.from_rational("7/3")
    assert (x * CTX.from_int(3)).equals(CTX.from_int(7))
    y = CTX.from_rational("50/4")  # valuation 2 - 1... vp(50)=2, vp(4)=0
    assert y.v == 2


def test_valuation_bookkeeping():
    assert CTX.from_int(250).v == 3
    assert CTX.from_int(250).u0 == 2
    assert (CTX.from_int(5) * CTX.from_int(25)).v == 3
    assert (CTX.from_int(6) - CTX.from_int(1)).v == 1


def test_cancellation_tracks_slack():
    a = CTX.from_int(1 + 5 ** 6)
    b = CTX.from_int(1)
    d = a - b
    assert d.v == 6
    assert d.slack == 6  # six digits renormalized away


def test_zero_marker():
    z = CTX.zero()
    assert z.is_zero
    x = CTX.from_int(42)
    assert (x - x).is_zero
    assert (z + x).equals(x)
    with pytest.raises(ZeroDivisionError):
        z.inverse()


# --- randomized ring axioms (criterion: 1e4 cases across the suites) -------

@settings(max_examples=400, deadline=None)
@given(st.integers(0, 2 ** 64), st.integers(0, 2 ** 64), st.integers(0, 2 ** 64),
       st.integers(min_value=0, max_value=2 ** 32))
def test_ring_axioms(sa, sb, sc, sd):
    rng = random.Random(sa ^ (sb << 1) ^ (sc << 2) ^ sd)
    x = rand_scalar(CTX, rng)
    y = rand_scalar(CTX, rng)
    z = rand_scalar(CTX, rng)
    assert ((x + y) + z).equals(x + (y + z))
    assert ((x * y) * z).equals(x * (y * z))
    assert (x * (y + z)).equals(x * y + x * z)
    assert (x + y).equals(y + x)
    assert (x * y).equals(y * x)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 64))
def test_inverse_and_pow(seed):
    rng = random.Random(seed)
    x = rand_scalar(CTX, rng, nonzero=True)
    assert (x * x.inverse()).equals(CTX.one())
    assert (x ** 3).equals(x * x * x)
    assert (x ** -2).equals((x * x).inverse())


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 64))
def test_frobenius_automorphism(seed):
    rng = random.Random(seed)
    x = rand_scalar(CTX, rng)
    y = rand_scalar(CTX, rng)
    assert (x * y).frobenius().equals(x.frobenius() * y.frobenius())
    assert (x + y).frobenius().equals(x.frobenius() + y.frobenius())
    assert x.frobenius().frobenius().equals(x)
    assert x.norm().is_rational_coord()
    assert x.trace().is_rational_coord()


def test_frobenius_fixes_qp_and_flips_omega():
    c = CTX.from_int(17)
    assert c.frobenius().equals(c)
    w = CTX.omega()
    assert w.frobenius().equals(-w)
    assert w.norm().equals(CTX.from_int(-CTX.r))


# --- log / exp / teichmuller ------------------------------------------------

def test_log_one_and_p():
    assert iwasawa_log(CTX.one()).is_zero
    assert iwasawa_log(CTX.from_int(5)).is_zero


def test_log_one_plus_p_partial_sums():
    # oracle: partial sums of log(1+x) at x = p, as exact rationals
    from fractions import Fraction
    p, N = 5, 20
    acc = Fraction(0)
    for k in range(1, 40):
        acc += Fraction((-1) ** (k + 1) * p ** k, k)
    expected = CTX.from_rational(acc)
    got = iwasawa_log(CTX.from_int(1 + p))
    assert got.equals(expected, 15)


def test_log_homomorphism():
    rng = random.Random(7)
    for _ in range(25):
        x = rand_scalar(CTX, rng, nonzero=True)
        y = rand_scalar(CTX, rng, nonzero=True)
        lhs = iwasawa_log(x * y)
        rhs = iwasawa_log(x) + iwasawa_log(y)
        assert lhs.equals(rhs, CTX.prec - 2)


def test_exp_log_roundtrip():
    x = CTX.from_int(1 + 5)
    assert padic_exp(iwasawa_log(x)).equals(x, 15)
    rng = random.Random(11)
    for _ in range(20):
        a = rand_scalar(CTX, rng, nonzero=True)
        if a.v < 1:
            a = a * CTX.from_int(5 ** (1 - a.v))
        e = padic_exp(a)
        assert (e * padic_exp(-a)).equals(CTX.one(), 14)
        assert iwasawa_log(e).equals(a, 14)


def test_exp_rejects_low_valuation():
    with pytest.raises(ValueError):
        padic_exp(CTX.from_int(2))


def test_exp_homomorphism():
    rng = random.Random(13)
    for _ in range(20):
        x = rand_scalar(CTX, rng, nonzero=True, unit=True) * CTX.from_int(5)
        y = rand_scalar(CTX, rng, nonzero=True, unit=True) * CTX.from_int(25)
        assert padic_exp(x + y).equals(padic_exp(x) * padic_exp(y), 14)


def test_teichmuller_properties():
    assert teichmuller(CTX.one()).equals(CTX.one())
    rng = random.Random(17)
    for _ in range(20):
        x = rand_scalar(CTX, rng, unit=True)
        z = teichmuller(x)
        assert (z ** (5 ** 2 - 1)).equals(CTX.one(), 18)
        assert (z - x).is_zero or (z - x).v >= 1  # z = x mod p
        assert iwasawa_log(z).is_zero or iwasawa_log(z).v >= 14


def test_log_kills_torsion_times_p_power():
    rng = random.Random(19)
    x = rand_scalar(CTX, rng, unit=True)
    z = teichmuller(x)
    val = iwasawa_log(z * CTX.from_int(125))
    assert val.is_zero or val.v >= 14


# --- dual numbers -----------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 64))
def test_dual_product_rule(seed):
    rng = random.Random(seed)
    x = DualScalar(rand_scalar(CTX, rng), rand_scalar(CTX, rng))
    y = DualScalar(rand_scalar(CTX, rng), rand_scalar(CTX, rng))
    xy = x * y
    assert xy.b.equals(x.a * y.b + x.b * y.a)
    assert xy.a.equals(x.a * y.a)
    # eps^2 = 0: (eps)*(eps)
    eps = DualScalar(CTX.zero(), CTX.one())
    assert (eps * eps).a.is_zero and (eps * eps).b.is_zero


# --- serialization ----------------------------------------------------------

def test_json_roundtrip():
    rng = random.Random(23)
    for _ in range(10):
        x = rand_scalar(CTX, rng)
        y = PadicScalar.from_json(x.to_json())
        assert y.equals(x) and y.v == x.v
    z = PadicScalar.from_json(CTX.zero().to_json())
    assert z.is_zero
