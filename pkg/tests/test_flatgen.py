import math

import numpy as np
import pytest
from conftest import sieve
from hypothesis import given
from hypothesis import strategies as st

from approxh.errors import CertificationFailure, FlatnessFailure, InvalidArgument
from approxh.flatgen import (
    C_FLAT,
    certify_gram,
    circulant_matrix,
    delta_target,
    dft_magnitudes,
    flatness,
    gram_deviation,
    legendre_vector,
    sample_flat_vector,
)
from approxh.hadamard import sylvester
from approxh.spectral import singular_values

PRIMES = sieve(3000)
ODD_PRIMES = [p for p in range(3, 3000) if PRIMES[p]]


def test_legendre_vector_examples():
    assert legendre_vector(3).tolist() == [0, 1, -1]
    assert legendre_vector(7).tolist() == [0, 1, 1, -1, 1, -1, -1]
    assert all(legendre_vector(q)[0] == 0 for q in ODD_PRIMES[:30])


def test_dft_examples():
    q = 11
    np.testing.assert_allclose(dft_magnitudes(np.ones(q)), [q] + [0] * (q - 1), atol=1e-9)
    np.testing.assert_allclose(dft_magnitudes(np.eye(q)[0]), np.ones(q), atol=1e-12)
    np.testing.assert_allclose(dft_magnitudes(legendre_vector(7)), [0] + [math.sqrt(7)] * 6, rtol=1e-9, atol=1e-9)


@given(st.integers(1, 200), st.integers(0, 2**32))
def test_dft_matches_fft(q, seed):
    v = np.random.default_rng(seed).standard_normal(q)
    np.testing.assert_allclose(dft_magnitudes(v), np.abs(np.fft.fft(v)), atol=1e-8 * max(1, q))


@pytest.mark.parametrize("q", [p for p in ODD_PRIMES if p <= 200])
def test_gauss_sum_flat(q):
    mags = dft_magnitudes(legendre_vector(q))
    assert mags[0] == pytest.approx(0, abs=1e-9 * math.sqrt(q))
    np.testing.assert_allclose(mags[1:], math.sqrt(q), rtol=1e-9)


def test_circulant_examples():
    assert circulant_matrix([1]).tolist() == [[1]]
    C = circulant_matrix([1, -1, -1])
    assert C.tolist() == [[1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
    with pytest.raises(InvalidArgument):
        circulant_matrix([1, 0, -1])


@given(st.integers(1, 40), st.integers(0, 2**32))
def test_circulant_definition(q, seed):
    u = np.random.default_rng(seed).choice([-1, 1], q)
    C = circulant_matrix(u)
    for i in range(q):
        assert C[i].tolist() == np.roll(u, i).tolist()


@pytest.mark.parametrize("seed", range(100))
def test_circulant_singular_values_are_dft_magnitudes(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.choice([p for p in ODD_PRIMES if p <= 101]))
    u = rng.choice([-1, 1], q)
    np.testing.assert_allclose(
        np.sort(singular_values(circulant_matrix(u))), np.sort(dft_magnitudes(u)), atol=1e-8 * q
    )


def test_sample_small_prime():
    fv = sample_flat_vector(3, np.random.default_rng(0), c_flat=10.0)
    assert set(fv.entries.tolist()) <= {-1, 1}
    assert fv.attempts <= 50


def test_sample_rejects_composite():
    with pytest.raises(InvalidArgument):
        sample_flat_vector(4, np.random.default_rng(0))


def test_sample_fails_when_target_unreachable():
    with pytest.raises(FlatnessFailure):
        sample_flat_vector(101, np.random.default_rng(0), c_flat=1e-3, max_retries=5)


def test_sample_q101():
    fv = sample_flat_vector(101, np.random.default_rng(7))
    assert fv.delta_observed <= delta_target(101, C_FLAT)
    assert fv.attempts <= 10
    # entry 0 and the non-residues are -1; residues are ±1
    leg = legendre_vector(101)
    assert fv.entries[0] == -1
    assert np.all(fv.entries[leg == -1] == -1)
    assert fv.delta_observed == pytest.approx(flatness(np.abs(np.fft.fft(fv.entries)), 101), rel=1e-9)


@given(st.sampled_from([p for p in ODD_PRIMES if p <= 300]), st.integers(0, 2**32))
def test_sampler_deterministic(q, seed):
    a = sample_flat_vector(q, np.random.default_rng(seed))
    b = sample_flat_vector(q, np.random.default_rng(seed))
    assert np.array_equal(a.entries, b.entries) and a.attempts == b.attempts


def test_certify_gram_q7():
    fv = sample_flat_vector(7, np.random.default_rng(1))
    cert = certify_gram(circulant_matrix(fv.entries), fv.delta_target)
    assert cert.gram_deviation <= 3 * fv.delta_target * 7


def test_certify_gram_exact_isometry():
    H = sylvester(4).entries
    assert gram_deviation(H) == 0
    assert certify_gram(H, 0.01).gram_deviation == 0


def test_certify_gram_failure_path():
    # all-ones circulant has Gram q J, so the deviation is q (q - 1)
    U = circulant_matrix(np.ones(11, dtype=int))
    assert gram_deviation(U) == pytest.approx(110)
    with pytest.raises(CertificationFailure):
        certify_gram(U, 0.1)


@pytest.mark.parametrize("q", [11, 53, 101, 211, 401])
def test_flat_certificate_implies_singular_band(q):
    fv = sample_flat_vector(q, np.random.default_rng(q))
    U = circulant_matrix(fv.entries)
    s = singular_values(U)
    d = fv.delta_target
    assert math.sqrt(q) * (1 - d) <= s.min() and s.max() <= math.sqrt(q) * (1 + d)
    certify_gram(U, d)
