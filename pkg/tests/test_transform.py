import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cakelift.transform import (
    GroupElement,
    OrientationScore,
    TrainedKernelModel,
    disk_limit,
    equivalence_residual,
    expand_trained_kernel,
    lift,
    lift_trained,
    reconstruct_fast,
    shift_twist,
)
from cakelift.wavelets import RadialProfileSpec, build_stack, m_psi, spatial_kernel


@pytest.fixture(scope="module")
def stack64():
    return build_stack(64, 64, 8, 3)


@pytest.fixture(scope="module")
def stack32():
    return build_stack(32, 32, 8, 3)


def _correlate(f, psi):
    """Brute-force circular correlation sum_x conj(psi(x - y)) f(x)."""
    h, w = f.shape
    out = np.zeros((h, w), dtype=complex)
    for y in range(h):
        for x in range(w):
            out[y, x] = np.sum(np.conj(np.roll(psi, (y, x), axis=(0, 1))) * f)
    return out


def _rot90(f):
    # f'(x, y) = f(R^-1 (x, y)) = f(y, -x) about pixel (0, 0) on the torus
    h, w = f.shape
    i, j = np.indices((h, w))
    return f[(-j) % w, i]


# disk limiting


def test_disk_limit_constant_and_checkerboard():
    c = np.full((32, 32), 3.5)
    out, frac = disk_limit(c)
    np.testing.assert_allclose(out, c, atol=1e-14)
    assert frac == 0.0
    board = (-1.0) ** np.add.outer(np.arange(32), np.arange(32))
    out, frac = disk_limit(board, 0.8)
    assert np.max(np.abs(out)) < 1e-15
    assert frac == 1.0


def test_disk_limit_white_noise_fraction(rng):
    expected = 1 - math.pi * 0.8**2 / 4
    fracs = [disk_limit(rng.standard_normal((128, 128)))[1] for _ in range(20)]
    assert abs(np.mean(fracs) - expected) < 0.1 * expected


def test_disk_limit_idempotent(rng):
    once, _ = disk_limit(rng.standard_normal((40, 40)))
    twice, frac = disk_limit(once)
    np.testing.assert_allclose(twice, once, atol=1e-14)
    assert frac < 1e-28


# lifting


def test_lift_matches_brute_force(stack32, rng):
    f = rng.standard_normal((32, 32))
    score = lift(f, stack32)
    for m in (0, 3):
        psi = np.fft.ifft2(stack32.fourier_slices[m])
        np.testing.assert_allclose(score.data[m], _correlate(f, psi), atol=1e-12)


def test_matched_filter(stack32):
    for m in (0, 1, 6):
        f = spatial_kernel(stack32, m)
        mod = np.abs(lift(f, stack32).data[m])
        assert np.unravel_index(np.argmax(mod), mod.shape) == (16, 16)


def test_lift_linear(stack32, rng):
    f, g = rng.standard_normal((2, 32, 32))
    lhs = lift(2.0 * f - 0.5 * g, stack32).data
    rhs = 2.0 * lift(f, stack32).data - 0.5 * lift(g, stack32).data
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_lift_shape_mismatch(stack32):
    with pytest.raises(ValueError):
        lift(np.zeros((16, 32)), stack32)


def _line_response(stack, horizontal):
    f = np.zeros(stack.shape)
    if horizontal:
        f[stack.height // 2, :] = 1.0
    else:
        f[:, stack.width // 2] = 1.0
    f, _ = disk_limit(f, stack.radial)
    energy = np.sum(np.abs(lift(f, stack).data) ** 2, axis=(1, 2))
    return energy


def test_line_orientation(stack64):
    # horizontal structures peak on theta in {0, pi}, vertical on {pi/2, 3pi/2}
    e = _line_response(stack64, horizontal=True)
    assert set(np.flatnonzero(np.isclose(e, e.max(), rtol=1e-12))) == {0, 4}
    e = _line_response(stack64, horizontal=False)
    assert set(np.flatnonzero(np.isclose(e, e.max(), rtol=1e-12))) == {2, 6}


def test_line_orientation_base_angle_flag():
    s = build_stack(64, 64, 8, 3, base_angle=0.0)
    e = _line_response(s, horizontal=True)
    assert set(np.flatnonzero(np.isclose(e, e.max(), rtol=1e-12))) == {2, 6}


@settings(max_examples=10, deadline=None)
@given(st.integers(-40, 40), st.integers(-40, 40))
def test_shift_equivariance(dy, dx):
    stack = build_stack(32, 32, 4, 2)
    f = np.random.default_rng(3).standard_normal((32, 32))
    lhs = lift(np.roll(f, (dy, dx), axis=(0, 1)), stack).data
    rhs = np.roll(lift(f, stack).data, (dy, dx), axis=(1, 2))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_rotation_equivariance(stack64, rng):
    f = rng.standard_normal((64, 64))
    lhs = lift(_rot90(f), stack64).data
    rotated = np.stack([_rot90(s) for s in lift(f, stack64).data])
    rhs = np.roll(rotated, 2, axis=0)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_parseval(stack64, rng):
    f = rng.standard_normal((64, 64))
    lhs = np.sum(np.abs(lift(f, stack64).data) ** 2)
    rhs = np.sum(m_psi(stack64) * np.abs(np.fft.fft2(f)) ** 2) / f.size
    assert lhs == pytest.approx(rhs, rel=1e-10)


# reconstruction


def test_reconstruction_exact(stack64, rng):
    for _ in range(5):
        fd, _ = disk_limit(rng.standard_normal((64, 64)), stack64.radial)
        score = lift(fd, stack64)
        assert np.max(np.abs(reconstruct_fast(score, keep_complex=True).imag)) < 1e-12
        err = np.linalg.norm(reconstruct_fast(score) - fd) / np.linalg.norm(fd)
        assert err < 1e-12


def test_reconstruction_error_is_discarded_energy(stack64, rng):
    f = rng.standard_normal((64, 64))
    _, frac = disk_limit(f, stack64.radial)
    err = np.linalg.norm(reconstruct_fast(lift(f, stack64)) - f) / np.linalg.norm(f)
    assert err**2 == pytest.approx(frac, rel=1e-10)


def test_reconstruct_zero():
    score = OrientationScore(np.zeros((4, 8, 8), dtype=complex))
    assert np.all(reconstruct_fast(score) == 0)


# group action


def test_group_element_basics():
    g = GroupElement((1, 2), 11, 8)
    assert g.m == 3 and g.x == (1.0, 2.0)
    assert g.theta == pytest.approx(3 * math.pi / 4)
    with pytest.raises(ValueError):
        GroupElement((0, 0), 0, 0)
    with pytest.raises(ValueError):
        g * GroupElement((0, 0), 0, 4)
    e = GroupElement.identity(8)
    assert e * g == g and g * e == g


def test_shift_twist_identity_bit_exact(stack32, rng):
    score = lift(rng.standard_normal((32, 32)), stack32)
    out = shift_twist(score, GroupElement.identity(8))
    assert np.array_equal(out.data, score.data)
    assert out.data is not score.data


def test_shift_twist_integer_shift_is_roll(stack32, rng):
    score = lift(rng.standard_normal((32, 32)), stack32)
    out = shift_twist(score, GroupElement((3, -2), 0, 8))
    # slice 0: out(y) = in(y + (3, -2)); x runs along columns
    np.testing.assert_allclose(out.data[0], np.roll(score.data[0], (2, -3), axis=(0, 1)), atol=1e-13)


def test_shift_twist_orientation_roll(stack32, rng):
    score = lift(rng.standard_normal((32, 32)), stack32)
    out = shift_twist(score, GroupElement((0, 0), 3, 8))
    for j in range(8):
        assert np.array_equal(out.data[j], score.data[(j + 3) % 8])
    with pytest.raises(ValueError):
        shift_twist(score, GroupElement((0, 0), 1, 4))


@settings(max_examples=15, deadline=None)
@given(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), st.integers(0, 7),
       st.tuples(st.floats(-5, 5), st.floats(-5, 5)), st.integers(0, 7))
def test_composition_law(xg, mg, xh, mh):
    stack = build_stack(16, 16, 8, 2)
    score = lift(np.random.default_rng(1).standard_normal((16, 16)), stack)
    g, h = GroupElement(xg, mg, 8), GroupElement(xh, mh, 8)
    lhs = shift_twist(shift_twist(score, g), h).data
    rhs = shift_twist(score, h * g).data
    assert np.max(np.abs(lhs - rhs)) < 1e-12


# trained kernels


def test_trained_isotropic_atom(rng):
    f = rng.standard_normal((24, 24))
    score = lift_trained(f, TrainedKernelModel(((1.0, (0, 0)),)), 6)
    fd, _ = disk_limit(f)
    for m in range(6):
        np.testing.assert_allclose(score.data[m], fd, atol=1e-13)


def test_trained_shifted_atom_brute_force(rng):
    f = rng.standard_normal((16, 16))
    radial = RadialProfileSpec(0.8)
    score = lift_trained(f, TrainedKernelModel(((1.0, (1, 0)),)), 4, radial)
    mask = build_stack(16, 16, 1, 0, radial).fourier_slices[0]
    kern = np.roll(np.fft.ifft2(mask), (0, 1), axis=(0, 1))
    np.testing.assert_allclose(score.data[0], _correlate(f, kern), atol=1e-12)
    fd, _ = disk_limit(f, radial)
    np.testing.assert_allclose(score.data[0], np.roll(fd, -1, axis=1), atol=1e-12)


def test_trained_linear_in_coefficients(rng):
    f = rng.standard_normal((16, 16))
    a = TrainedKernelModel(((1.0, (2, 1)),))
    b = TrainedKernelModel(((1.0, (-3, 0)),))
    ab = TrainedKernelModel(((2.0, (2, 1)), (-1.5, (-3, 0))))
    lhs = lift_trained(f, ab, 4).data
    rhs = 2.0 * lift_trained(f, a, 4).data - 1.5 * lift_trained(f, b, 4).data
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_trained_model_validation():
    with pytest.raises(ValueError):
        lift_trained(np.zeros((16, 16)), TrainedKernelModel(()), 4)
    with pytest.raises(ValueError):
        TrainedKernelModel(((1.0, (8, 0)),)).validate((16, 16))
    TrainedKernelModel(((1.0, (-8, 7)),)).validate((16, 16))
    TrainedKernelModel(((1.0, (-7, 7)),)).validate((15, 15))
    with pytest.raises(ValueError):
        TrainedKernelModel(((1.0, (-8, 0)),)).validate((15, 15))


def test_expand_trained_kernel():
    model = TrainedKernelModel(((0.7, (1, 2)),))
    terms = expand_trained_kernel(model, 4)
    assert len(terms) == 4 and all(c == 0.7 for c, _ in terms)
    two = TrainedKernelModel(((0.7, (1, 2)), (-1.0, (0, 3))))
    swapped = TrainedKernelModel(two.atoms[::-1])
    assert len(expand_trained_kernel(two, 8)) == 16
    assert set(expand_trained_kernel(two, 8)) == set(expand_trained_kernel(swapped, 8))


def test_equivalence(stack64, rng):
    model = TrainedKernelModel.random(rng, 5, (64, 64))
    f, _ = disk_limit(rng.standard_normal((64, 64)), stack64.radial)
    res = equivalence_residual(f, model, stack64)
    assert res < 1e-10
    assert equivalence_residual(3.0 * f, model, stack64) == pytest.approx(3.0 * res, abs=1e-12)


def test_equivalence_edge_cases(stack32):
    f = np.zeros((32, 32))
    assert equivalence_residual(f, TrainedKernelModel(()), stack32) == 0.0
    with pytest.raises(ValueError):
        equivalence_residual(f, TrainedKernelModel(((1.0, (0, 0)),), rho0=0.5), stack32)
