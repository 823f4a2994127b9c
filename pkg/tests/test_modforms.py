import pytest

from rmlab.modforms import (QSeries, basis_for_level, e2p_series,
                            eta_cusp_series, extract_logJDR, fit_to_basis,
                            hecke_Tn, sigma_p)
from rmlab.padic import PadicContext

CTX = PadicContext(5, 20)


def _padic_series(s, ctx):
    return QSeries(tuple(None if a is None else ctx.from_int(a)
                         for a in s.coeffs), s.level, s.weight)


def test_e2p_pinned_values():
    s = e2p_series(5, 10)
    assert s[0] == 4 and s[1] == 24 and s[5] == 24
    assert s[2] == 24 * 3 and s[3] == 24 * 4 and s[10] == 24 * (1 + 2)
    t = e2p_series(7, 7)
    assert t[0] == 6 and t[7] == 24


def test_e2p_sigma_for_coprime_n():
    for p in (5, 7):
        s = e2p_series(p, 30)
        for n in range(1, 31):
            if n % p:
                sigma1 = sum(d for d in range(1, n + 1) if n % d == 0)
                assert s[n] == 24 * sigma1


def test_e2p_up_invariance():
    for p in (5, 7):
        for n in range(1, 20):
            assert sigma_p(n * p, p) == sigma_p(n, p)


def test_e2p_rejects_small_level():
    with pytest.raises(ValueError):
        e2p_series(3, 5)


def test_eta_cusp_pinned_coefficients():
    s = eta_cusp_series(11, 13)
    assert s[0] == 0 and s[1] == 1
    assert s[2] == -2 and s[3] == -1 and s[4] == 2 and s[5] == 1
    assert s[6] == 2 and s[7] == -2 and s[9] == -2 and s[11] == 1
    assert s[13] == 4
    # Hecke multiplicativity of the eigenform coefficients
    assert s[6] == s[2] * s[3]
    assert s[10] == s[2] * s[5]
    assert s[4] == s[2] ** 2 - 2  # a_{l^2} = a_l^2 - l^{k-1}


def test_eta_cusp_unsupported_level():
    with pytest.raises(ValueError):
        eta_cusp_series(7, 5)


def test_hecke_eisenstein_eigenvalues():
    for p in (5, 7):
        s = e2p_series(p, 60)
        for ell in (2, 3):
            ts = hecke_Tn(s, ell)
            expect = e2p_series(p, ts.n_max).scale(1 + ell)
            assert ts.coeffs == expect.coeffs
        us = hecke_Tn(s, p)
        assert us.coeffs == e2p_series(p, us.n_max).coeffs


def test_hecke_eta_eigenvalue():
    s = eta_cusp_series(11, 40)
    ts = hecke_Tn(s, 2)
    expect = eta_cusp_series(11, ts.n_max).scale(-2)
    assert ts.coeffs == expect.coeffs


def test_hecke_on_zero():
    z = QSeries((0,) * 21, 5)
    assert all(a == 0 for a in hecke_Tn(z, 3).coeffs)


def test_hecke_truncation_guard():
    with pytest.raises(ValueError):
        hecke_Tn(QSeries((1, 2), 5), 3)


# --- fitting -----------------------------------------------------------------

def test_fit_planted_eisenstein():
    s = _padic_series(e2p_series(5, 20).scale(3), CTX)
    s = QSeries((None,) + s.coeffs[1:], 5)  # hide the constant term
    fit = fit_to_basis(s, [e2p_series(5, 20)], CTX)
    assert fit.coefficients[0].equals(CTX.from_int(3))
    assert fit.a0.equals(CTX.from_int(12))
    assert fit.certified
    assert all(v is None for v in fit.residuals.values())


def test_fit_planted_two_dimensional():
    n_max = 25
    s = e2p_series(11, n_max).add(eta_cusp_series(11, n_max).scale(7))
    sp = _padic_series(s, CTX)
    sp = QSeries((None,) + sp.coeffs[1:], 11)
    fit = fit_to_basis(sp, basis_for_level(11, n_max), CTX)
    assert fit.coefficients[0].equals(CTX.one())
    assert fit.coefficients[1].equals(CTX.from_int(7))
    assert fit.a0.equals(CTX.from_int(10))
    assert fit.certified


def test_fit_skips_unknown_coefficients():
    coeffs = [None if n % 5 == 0 else 24 * sigma_p(n, 5) * 2
              for n in range(21)]
    s = QSeries(tuple(coeffs), 5)
    fit = fit_to_basis(s, [e2p_series(5, 20)], CTX)
    assert fit.coefficients[0].equals(CTX.from_int(2))
    assert fit.certified


def test_fit_negative_control_flags_perturbation():
    base = _padic_series(e2p_series(5, 20), CTX)
    coeffs = list(base.coeffs)
    coeffs[0] = None
    coeffs[13] = coeffs[13] + CTX.from_int(5 ** 3)
    fit = fit_to_basis(QSeries(tuple(coeffs), 5), [e2p_series(5, 20)], CTX)
    assert not fit.certified
    bad = [n for n, v in fit.residuals.items() if v is not None]
    assert bad == [13]
    assert fit.residuals[13] == 3


def test_fit_underdetermined_basis_fails_certification():
    # a cusp component at level 11 cannot be absorbed by E2 alone
    n_max = 25
    s = e2p_series(11, n_max).add(eta_cusp_series(11, n_max).scale(3))
    sp = QSeries((None,) + _padic_series(s, CTX).coeffs[1:], 11)
    fit = fit_to_basis(sp, [e2p_series(11, n_max)], CTX)
    assert not fit.certified


def test_fit_requires_overdetermination():
    s = QSeries((None, CTX.from_int(24)), 5)
    with pytest.raises(ValueError):
        fit_to_basis(s, [e2p_series(5, 1)], CTX)


def test_extract_logJDR():
    for c in (2, -3):
        s = _padic_series(e2p_series(5, 20).scale(c), CTX)
        s = QSeries((None,) + s.coeffs[1:], 5)
        fit = fit_to_basis(s, [e2p_series(5, 20)], CTX)
        out = extract_logJDR(fit, 5)
        assert out.equals(CTX.from_int(12 * 4 * c))


def test_extract_logJDR_consistency_guard():
    s = _padic_series(e2p_series(5, 20).scale(2), CTX)
    s = QSeries((None,) + s.coeffs[1:], 5)
    fit = fit_to_basis(s, [e2p_series(5, 20)], CTX)
    fit.a0 = CTX.from_int(9)  # corrupt the inferred constant term
    with pytest.raises(ArithmeticError):
        extract_logJDR(fit, 5)
