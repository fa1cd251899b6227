import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvdv.outcomes import DomainError
from cvdv.spectrum import (
    SchmidtSpectrum,
    TmsvParams,
    auto_truncation,
    db_to_lambda,
    entanglement_entropy,
    geometric_tail_entropy,
    lambda_to_db,
    tmsv_entropy,
    tmsv_spectrum,
)

from .conftest import SQRT_HALF

lambdas = st.floats(0.0, 0.995)


@pytest.mark.parametrize(
    "lam, n, coeffs, tail",
    [
        (0.0, 4, [1, 0, 0, 0], 0.0),
        (SQRT_HALF, 3, [0.5, 0.25, 0.125], 0.125),
        (0.8, 2, [0.36, 0.2304], 0.4096),
    ],
)
def test_spectrum_examples(lam, n, coeffs, tail):
    s = tmsv_spectrum(lam, n)
    np.testing.assert_allclose(s.coeffs, coeffs, rtol=0, atol=1e-15)
    assert s.tail_mass == pytest.approx(tail, abs=1e-15)
    assert s.n == n


@pytest.mark.parametrize("lam", [-0.1, 1.0, 1.5, float("nan")])
def test_lambda_domain(lam):
    with pytest.raises(DomainError):
        tmsv_spectrum(lam, 3)


@pytest.mark.parametrize("n", [0, -2, 2.5])
def test_truncation_domain(n):
    with pytest.raises(DomainError):
        tmsv_spectrum(0.5, n)


def test_params_object_accepted():
    p = TmsvParams.from_db(5.0)
    np.testing.assert_array_equal(tmsv_spectrum(p, 6).coeffs, tmsv_spectrum(p.lam, 6).coeffs)


@given(lam=lambdas, n=st.integers(1, 400))
def test_normalization_and_order(lam, n):
    s = tmsv_spectrum(lam, n)
    assert abs(s.coeffs.sum() + s.tail_mass - 1.0) <= 1e-12
    assert np.all(np.diff(s.coeffs) <= 0)
    assert np.all(s.coeffs >= 0)


def test_suffix_sums_include_tail():
    s = tmsv_spectrum(0.6, 5)
    brute = [sum(s.coeffs[l:]) + s.tail_mass for l in range(5)]
    np.testing.assert_allclose(s.suffix_sums(), brute, rtol=1e-14)
    # for a TMSV, the suffix from l is exactly lam^(2l)
    np.testing.assert_allclose(s.suffix_sums(), 0.36 ** np.arange(5), rtol=1e-13)


def test_spectrum_validation():
    with pytest.raises(DomainError):
        SchmidtSpectrum([0.3, 0.7])
    with pytest.raises(DomainError):
        SchmidtSpectrum([0.5, 0.4])
    with pytest.raises(DomainError):
        SchmidtSpectrum([1.2, -0.2])


def test_renormalized_drops_tail():
    r = tmsv_spectrum(0.8, 4).renormalized()
    assert r.tail_mass == 0.0
    assert r.coeffs.sum() == pytest.approx(1.0, abs=1e-15)


def test_json_round_trip():
    s = tmsv_spectrum(0.7, 9)
    d = json.loads(s.to_json())
    assert set(d) == {"lambda", "N", "coeffs", "tail_mass"}
    assert d["N"] == 9
    back = SchmidtSpectrum.from_json(s.to_json())
    np.testing.assert_array_equal(back.coeffs, s.coeffs)
    assert back.tail_mass == s.tail_mass
    assert back.lam == s.lam


@given(lam=st.floats(1e-3, 0.99), tol=st.sampled_from([1e-6, 1e-9, 1e-12, 1e-14]))
def test_auto_truncation_is_minimal(lam, tol):
    n = auto_truncation(lam, tol)
    assert lam ** (2 * n) < tol
    assert n == 1 or lam ** (2 * (n - 1)) >= tol


def test_auto_truncation_vacuum():
    assert auto_truncation(0.0) == 1


# ---------------------------------------------------------------- entropy

def test_entropy_vacuum():
    assert entanglement_entropy(tmsv_spectrum(0.0, 5)) == (0.0, 0.0)
    assert tmsv_entropy(0.0) == 0.0


def test_entropy_at_threshold_is_two_ebits():
    s, err = entanglement_entropy(tmsv_spectrum(SQRT_HALF))
    assert abs(s - 2.0) <= 1e-9
    assert err < 1e-9
    assert tmsv_entropy(SQRT_HALF) == pytest.approx(2.0, abs=1e-14)


def test_entropy_matches_closed_form():
    x = 0.25
    terms = [0.75 * x**n for n in range(200)]
    brute = -math.fsum(t * math.log2(t) for t in terms)
    closed = -math.log2(1 - x) - x / (1 - x) * math.log2(x)
    s, err = entanglement_entropy(tmsv_spectrum(0.5))
    assert s <= brute
    assert s + err == pytest.approx(brute, abs=1e-13)
    assert tmsv_entropy(0.5) == pytest.approx(closed, abs=1e-14)


@given(lam=st.floats(0.05, 0.95), n=st.integers(2, 60))
def test_truncation_error_is_exact_tail_entropy(lam, n):
    s, err = entanglement_entropy(tmsv_spectrum(lam, n))
    assert s + err == pytest.approx(tmsv_entropy(lam), rel=1e-10, abs=1e-12)


def test_entropy_error_for_generic_spectrum():
    s = SchmidtSpectrum([0.5, 0.25, 0.125], 0.125)
    entropy, err = entanglement_entropy(s)
    assert entropy == pytest.approx(0.5 + 0.5 + 0.375)
    # geometric continuation with ratio 1/2 reproduces the dyadic tail exactly
    assert err == pytest.approx(sum(-(0.5**k) * math.log2(0.5**k) for k in range(4, 200)))


def test_geometric_tail_entropy_brute_force():
    a, r = 0.03, 0.7
    brute = -math.fsum(a * r**j * math.log2(a * r**j) for j in range(2000))
    assert geometric_tail_entropy(a, r) == pytest.approx(brute, rel=1e-12)


# -------------------------------------------------------------- dB units

def test_db_examples():
    assert db_to_lambda(0.0) == 0.0
    assert lambda_to_db(SQRT_HALF) == pytest.approx(7.66, abs=0.005)
    assert db_to_lambda(7.6555) == pytest.approx(SQRT_HALF, abs=1e-4)


@pytest.mark.parametrize("db", [-1.0, float("nan"), 400.0])
def test_db_domain(db):
    with pytest.raises(DomainError):
        db_to_lambda(db)


@given(db=st.floats(0.0, 30.0))
def test_db_round_trip(db):
    assert lambda_to_db(db_to_lambda(db)) == pytest.approx(db, abs=1e-10)


@given(r=st.floats(0.0, 8.0))
@settings(max_examples=50)
def test_params_consistency(r):
    p = TmsvParams.from_r(r)
    assert p.lam == pytest.approx(math.tanh(r), abs=1e-12)
    assert p.squeezing_db == pytest.approx(-10 * math.log10(math.exp(-2 * r)), abs=1e-12)
    q = TmsvParams.from_lambda(p.lam)
    assert q.squeezing_db == pytest.approx(p.squeezing_db, abs=1e-8)


def test_params_domain():
    with pytest.raises(DomainError):
        TmsvParams.from_r(-0.5)
