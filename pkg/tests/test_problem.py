import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wcprox.problem import (
    SR_KERNEL_SIGMAS,
    CompositeProblem,
    QuadraticFidelity,
    QuadraticRegularizer,
    ZeroRegularizer,
    degrade,
    gaussian_kernel,
    make_kernel,
    parse_kernel_spec,
    psnr,
    synthetic_image,
    uniform_kernel,
)
from wcprox.tensor import DimensionError
from oracles import gaussian_taps


def test_gaussian_matches_formula():
    np.testing.assert_allclose(gaussian_kernel(0.7, 7).taps, gaussian_taps(0.7, 7), atol=1e-14)
    np.testing.assert_allclose(gaussian_kernel(1.6, 25).taps, gaussian_taps(1.6, 25), atol=1e-14)


def test_sr_kernel_family():
    assert SR_KERNEL_SIGMAS == (0.7, 1.2, 1.6, 2.0)
    for s in SR_KERNEL_SIGMAS:
        assert make_kernel("gaussian", 25, s).taps.sum() == pytest.approx(1.0, abs=1e-14)


def test_uniform_kernel():
    np.testing.assert_array_equal(uniform_kernel(3).taps, np.full((3, 3), 1 / 9))


@pytest.mark.parametrize("spec,shape", [("gaussian:1.6,25", (25, 25)), ("gaussian:1.0", (25, 25)),
                                        ("uniform:5", (5, 5)), ("identity", (1, 1))])
def test_parse_kernel_spec(spec, shape):
    assert parse_kernel_spec(spec).shape == shape


@pytest.mark.parametrize("spec", ["gaussian", "gaussian:-1", "uniform:4", "box:3", "gaussian:1,6"])
def test_parse_kernel_spec_rejects(spec):
    with pytest.raises(ValueError):
        parse_kernel_spec(spec)


def test_matrix_fidelity_value_grad_and_lipschitz():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((6, 4))
    y = rng.standard_normal(6)
    f = QuadraticFidelity.from_matrix(A, y)
    x = rng.standard_normal(4)
    assert f.value(x) == pytest.approx(0.5 * np.sum((A @ x - y) ** 2), rel=1e-14)
    np.testing.assert_allclose(f.grad(x), A.T @ (A @ x - y), atol=1e-13)
    assert f.lipschitz == pytest.approx(np.linalg.norm(A, 2) ** 2, rel=1e-9)
    v, g = f.value_and_grad(x)
    assert v == f.value(x)
    np.testing.assert_array_equal(g, f.grad(x))


def test_operator_fidelity_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    y = rng.random((4, 4))
    f = QuadraticFidelity.from_operator(y, gaussian_kernel(1.0, 3), scale=2)
    assert f.x_shape == (8, 8)
    x = rng.random((8, 8))
    g = f.grad(x)
    h = 1e-6
    for idx in [(0, 0), (3, 5), (7, 7)]:
        e = np.zeros_like(x)
        e[idx] = h
        fd = (f.value(x + e) - f.value(x - e)) / (2 * h)
        assert fd == pytest.approx(g[idx], abs=1e-7)
    with pytest.raises(DimensionError):
        f.value(np.zeros((4, 4)))


def test_lipschitz_override():
    A = np.diag([2.0, 1.0])
    f = QuadraticFidelity.from_matrix(A, [0, 0], lipschitz=5.0)
    assert f.lipschitz == 5.0 and f.estimated_lipschitz == pytest.approx(4.0)
    with pytest.raises(ValueError):
        QuadraticFidelity.from_matrix(A, [0, 0], lipschitz=3.0)


def test_denoising_fidelity():
    f = QuadraticFidelity.denoising(np.ones((3, 3)))
    assert f.lipschitz == pytest.approx(1.0)
    np.testing.assert_array_equal(f.grad(np.zeros((3, 3))), -np.ones((3, 3)))


@settings(max_examples=50, deadline=None)
@given(c=st.floats(-0.9, 5.0), tau=st.floats(0.01, 1.0), z=st.floats(-10, 10),
       center=st.floats(-2, 2))
def test_quadratic_prox_is_argmin(c, tau, z, center):
    reg = QuadraticRegularizer(c, center)
    p = float(reg.prox(np.array([z]), tau)[0])
    # stationarity of tau*phi(x) + (x - z)^2 / 2
    assert tau * c * (p - center) + (p - z) == pytest.approx(0.0, abs=1e-9)


def test_quadratic_prox_undefined_when_not_strongly_convex():
    with pytest.raises(ValueError):
        QuadraticRegularizer(-2.0).prox(np.zeros(1), 0.5)
    assert QuadraticRegularizer(-0.5).weak_convexity == 0.5
    assert QuadraticRegularizer(0.5).weak_convexity == 0.0


def test_zero_regularizer():
    z = np.arange(3.0)
    x, v = ZeroRegularizer().prox_eval(z, 0.3)
    np.testing.assert_array_equal(x, z)
    assert v == 0.0


def test_composite_problem_validation():
    f = QuadraticFidelity.from_matrix(np.eye(2), [1, 1])
    assert CompositeProblem(f, QuadraticRegularizer(-0.5), 2.0).M == 0.5
    with pytest.raises(ValueError):
        CompositeProblem(f, QuadraticRegularizer(-1.0), 1.0)
    with pytest.raises(ValueError):
        CompositeProblem(f, ZeroRegularizer(), 0.0)
    p = CompositeProblem(f, QuadraticRegularizer(1.0), 2.0)
    assert p.value(np.zeros(2)) == pytest.approx(2.0)


def test_degrade_shapes_and_determinism():
    x = synthetic_image("cartoon", 64)
    y = degrade(x, gaussian_kernel(0.7), 2, 0.01, seed=3)
    assert y.shape == (32, 32)
    np.testing.assert_array_equal(y, degrade(x, gaussian_kernel(0.7), 2, 0.01, seed=3))
    assert not np.array_equal(y, degrade(x, gaussian_kernel(0.7), 2, 0.01, seed=4))
    clean = degrade(x, gaussian_kernel(0.7), 2, 0.0)
    assert np.std(y - clean) == pytest.approx(0.01, rel=0.1)
    with pytest.raises(ValueError):
        degrade(x, None, 1, -1.0)


def test_psnr_values():
    ref = np.zeros((10, 10))
    assert psnr(ref, ref) == math.inf
    assert psnr(ref + 0.1, ref) == pytest.approx(20.0)
    assert psnr(ref - 0.5, ref, clip=True) == math.inf
    with pytest.raises(DimensionError):
        psnr(np.zeros(3), np.zeros(4))


@pytest.mark.parametrize("name", ["checkerboard", "bump", "cartoon"])
def test_synthetic_images(name):
    a = synthetic_image(name, 64)
    assert a.shape == (64, 64) and a.min() >= 0 and a.max() <= 1
    np.testing.assert_array_equal(a, synthetic_image(name, 64))


def test_unknown_synthetic_image():
    with pytest.raises(ValueError):
        synthetic_image("lena")
