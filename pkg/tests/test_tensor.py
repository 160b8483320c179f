import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wcprox.tensor import (
    ConvKernel,
    DimensionError,
    adjoint_mismatch,
    blur_decimation_norm,
    circ_conv,
    circ_conv_adjoint,
    downsample,
    spectral_norm,
    upsample_adjoint,
    upsample_replicate,
)
from oracles import brute_conv, dense_conv_matrix, dense_downsample_matrix, gaussian_taps


def test_kernel_rejects_even_and_nonfinite():
    with pytest.raises(ValueError):
        ConvKernel(np.ones((2, 3)))
    with pytest.raises(ValueError):
        ConvKernel(np.array([[np.nan]]))


def test_normalized_kernel_sums_to_one():
    k = ConvKernel.normalized(np.arange(1.0, 10.0).reshape(3, 3))
    assert k.taps.sum() == pytest.approx(1.0, abs=1e-15)
    assert k.center == (1, 1)


def test_identity_kernel_is_identity():
    x = np.random.default_rng(0).random((5, 7))
    np.testing.assert_array_equal(circ_conv(x, ConvKernel.identity()), x)


def test_delta_response_places_kernel_at_origin():
    taps = np.arange(15.0).reshape(3, 5)
    delta = np.zeros((8, 8))
    delta[0, 0] = 1.0
    out = circ_conv(delta, ConvKernel(taps))
    # offset (u, v) from the center lands at pixel (u % 8, v % 8)
    for a in range(3):
        for b in range(5):
            assert out[(a - 1) % 8, (b - 2) % 8] == taps[a, b]


@pytest.mark.parametrize("method", ["spatial", "fft"])
def test_conv_matches_brute_force(method):
    rng = np.random.default_rng(1)
    x = rng.standard_normal((9, 11))
    taps = rng.standard_normal((3, 5))
    np.testing.assert_allclose(circ_conv(x, ConvKernel(taps), method), brute_conv(x, taps),
                               atol=1e-12)


def test_conv_adjoint_matches_transpose_of_dense_matrix():
    rng = np.random.default_rng(2)
    taps = rng.standard_normal((5, 3))
    y = rng.standard_normal((7, 6))
    A = dense_conv_matrix(taps, 7, 6)
    for method in ("spatial", "fft"):
        got = circ_conv_adjoint(y, ConvKernel(taps), method)
        np.testing.assert_allclose(got.ravel(), A.T @ y.ravel(), atol=1e-12)


def test_kernel_larger_than_image_is_rejected():
    with pytest.raises(DimensionError):
        circ_conv(np.zeros((4, 4)), ConvKernel(np.ones((5, 5))))
    with pytest.raises(DimensionError):
        circ_conv(np.zeros((4, 4)), ConvKernel(np.ones((5, 5))), method="fft")


def test_multiplane_acts_per_plane():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((3, 8, 8))
    k = ConvKernel(rng.standard_normal((3, 3)))
    out = circ_conv(x, k, "fft")
    for p in range(3):
        np.testing.assert_allclose(out[p], circ_conv(x[p], k), atol=1e-12)


def test_downsample_and_adjoint_shapes():
    x = np.arange(36.0).reshape(6, 6)
    d = downsample(x, 3)
    np.testing.assert_array_equal(d, [[0, 3], [18, 21]])
    u = upsample_adjoint(d, 3)
    assert u.shape == (6, 6) and u.sum() == d.sum()
    with pytest.raises(DimensionError):
        downsample(np.zeros((5, 6)), 2)


def test_replicate_upsample():
    r = upsample_replicate(np.array([[1.0, 2.0]]), 2)
    np.testing.assert_array_equal(r, [[1, 1, 2, 2], [1, 1, 2, 2]])


@settings(max_examples=40, deadline=None)
@given(h=st.integers(3, 12), w=st.integers(3, 12), kh=st.sampled_from([1, 3]),
       kw=st.sampled_from([1, 3]), seed=st.integers(0, 10_000))
def test_conv_adjoint_identity_property(h, w, kh, kw, seed):
    rng = np.random.default_rng(seed)
    k = ConvKernel(rng.standard_normal((kh, kw)))
    x, y = rng.standard_normal((2, h, w))
    for method in ("spatial", "fft"):
        gap = adjoint_mismatch(lambda v: circ_conv(v, k, method),
                               lambda v: circ_conv_adjoint(v, k, method), x, y)
        assert gap <= 1e-10


@settings(max_examples=40, deadline=None)
@given(s=st.integers(1, 4), bh=st.integers(1, 5), bw=st.integers(1, 5),
       seed=st.integers(0, 10_000))
def test_downsample_adjoint_identity_property(s, bh, bw, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((bh * s, bw * s))
    y = rng.standard_normal((bh, bw))
    assert adjoint_mismatch(lambda v: downsample(v, s), lambda v: upsample_adjoint(v, s),
                            x, y) <= 1e-10


def test_spectral_norm_of_normalized_blur_is_one():
    k = ConvKernel(gaussian_taps(1.6, 25))
    L = spectral_norm(lambda v: circ_conv(v, k, "fft"), lambda v: circ_conv_adjoint(v, k, "fft"),
                      (64, 64))
    assert abs(L - 1.0) <= 1e-6


def test_spectral_norm_matches_dense_svd():
    taps = gaussian_taps(1.0, 5)
    k = ConvKernel(taps)
    A = dense_downsample_matrix(16, 16, 2) @ dense_conv_matrix(taps, 16, 16)
    oracle = np.linalg.svd(A, compute_uv=False)[0] ** 2
    fwd = lambda v: downsample(circ_conv(v, k), 2)
    adj = lambda v: circ_conv_adjoint(upsample_adjoint(v, 2), k)
    assert abs(spectral_norm(fwd, adj, (16, 16), iters=2000) - oracle) <= 1e-6 * oracle


@pytest.mark.parametrize("s", [1, 2, 3])
def test_blur_decimation_norm_matches_dense_svd(s):
    taps = np.random.default_rng(s).random((5, 3))
    A = dense_downsample_matrix(12, 12, s) @ dense_conv_matrix(taps, 12, 12)
    oracle = np.linalg.svd(A, compute_uv=False)[0] ** 2
    assert blur_decimation_norm(ConvKernel(taps), (12, 12), s) == pytest.approx(oracle, rel=1e-12)


def test_power_iteration_is_slow_on_narrow_blur():
    # second eigenvalue ~0.99: 500 iterations undershoot, the exact symbol does not
    k = ConvKernel(gaussian_taps(0.7, 25))
    ests = [spectral_norm(lambda v: circ_conv(v, k, "fft"),
                          lambda v: circ_conv_adjoint(v, k, "fft"), (64, 64), iters=n)
            for n in (100, 500, 2000)]
    assert ests[0] <= ests[1] <= ests[2] <= 1.0 + 1e-12
    assert 1.0 - ests[1] > 1e-6
    assert 1.0 - ests[2] < 1e-9
    assert blur_decimation_norm(k, (64, 64)) == pytest.approx(1.0, abs=1e-12)


def test_spectral_norm_zero_operator():
    zero = lambda v: np.zeros_like(v)
    assert spectral_norm(zero, zero, (4, 4)) == 0.0


def test_power_iteration_rayleigh_quotient_is_monotone():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((12, 9))
    vals = [spectral_norm(lambda v: A @ v, lambda r: A.T @ r, (9,), iters=n)
            for n in (1, 2, 5, 20, 200)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(np.linalg.norm(A, 2) ** 2, rel=1e-9)
