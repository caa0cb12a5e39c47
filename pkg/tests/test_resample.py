from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from corpus import compact_blobs
from fastxform import resample as rs
from fastxform import transforms as tr
from fastxform.adaptive import WindowSpec

RNG = np.random.default_rng(21)


def cosine(n, f=3, phase=0.2, shift=0.0):
    k = np.arange(n) + shift
    return np.cos(2 * np.pi * f * k / n + phase)


# -- sincd ----------------------------------------------------------------

def test_sincd_values():
    n = 9
    t = np.arange(-20, 21)
    got = rs.sincd(np.pi * t, n)
    assert got[20] == 1.0
    nonzero = t % n == 0
    assert np.all(np.abs(got[~nonzero]) < 1e-12)
    np.testing.assert_allclose(rs.sincd(np.pi * (t + 0.3), n), oracles.sincd_closed(t + 0.3, n), atol=1e-12)


def test_sincd_is_periodic_interpolator():
    k = rs.Sincd(8)
    x = RNG.normal(size=8)
    t = 2.37
    interp = sum(x[j] * k.sampled(t - j) for j in range(8))
    assert abs(interp - oracles.trig_poly_eval(tr.dft(x), t).real) < 1e-12


# -- zero padding ----------------------------------------------------------

@pytest.mark.parametrize("domain", ["dft", "dct"])
def test_zero_pad_identity_and_samples(domain):
    x = RNG.normal(size=20)
    assert np.max(np.abs(rs.zero_pad_interpolate(x, 1, domain) - x)) < 1e-12
    up = rs.zero_pad_interpolate(x, 5, domain)
    assert up.shape == (100,)
    assert np.max(np.abs(up[::5] - x)) < 1e-10
    img = RNG.normal(size=(6, 10))
    up2 = rs.zero_pad_interpolate(img, 3, domain)
    assert up2.shape == (18, 30) and np.max(np.abs(up2[::3, ::3] - img)) < 1e-10


@pytest.mark.parametrize("L", [0, -1, 1.5])
def test_zero_pad_rejects_L(L):
    with pytest.raises(ValueError):
        rs.zero_pad_interpolate(np.ones(4), L)


def test_zero_pad_analytic_cosine():
    n, L = 32, 4
    up = rs.zero_pad_interpolate(cosine(n), L, "dft")
    ref = np.cos(2 * np.pi * 3 * (np.arange(n * L) / L) / n + 0.2)
    assert np.max(np.abs(up - ref)) < 1e-10


@pytest.mark.parametrize("n", [15, 16])
def test_zero_pad_impulse_is_sincd(n):
    L = 4
    x = np.zeros(n)
    x[0] = 1
    up = rs.zero_pad_interpolate(x, L, "dft")
    t = np.arange(n * L) / L
    assert np.max(np.abs(up - rs.Sincd(n).sampled(t))) < 1e-12


def test_zero_pad_dct_equals_interleaved_shifts():
    x = RNG.normal(size=24)
    up = rs.zero_pad_interpolate(x, 3, "dct")
    for m in range(3):
        assert np.max(np.abs(up[m::3] - rs.fractional_shift(x, m / 3, "dct"))) < 1e-12


# -- fractional shifts -----------------------------------------------------

@pytest.mark.parametrize("domain", ["dft", "dct"])
def test_shift_zero_identity(domain):
    x = RNG.normal(size=33)
    assert np.max(np.abs(rs.fractional_shift(x, 0.0, domain) - x)) < 1e-12


@pytest.mark.parametrize("n", [16, 17])
def test_shift_integer_dft_is_cyclic(n):
    x = RNG.normal(size=n)
    for d in (1, -3, 5):
        assert np.max(np.abs(rs.fractional_shift(x, d, "dft") - np.roll(x, -d))) < 1e-12


def test_shift_half_cosine_analytic_and_round_trip():
    n = 64
    x = cosine(n)
    y = rs.fractional_shift(x, 0.5, "dft")
    assert np.max(np.abs(y - cosine(n, shift=0.5))) < 1e-10
    assert np.max(np.abs(rs.fractional_shift(y, -0.5, "dft") - x)) < 1e-10


def test_shift_dct_round_trip_interior():
    # smooth signal that is flat at both borders (the mirror extension stays smooth)
    n = 64
    k = np.arange(n)
    x = np.exp(-((k - 30.0) / 7.0) ** 2)
    back = rs.fractional_shift(rs.fractional_shift(x, 0.5, "dct"), -0.5, "dct")
    assert np.max(np.abs(back - x)[4:-4]) < 1e-6


def test_shift_dct_boundary_safety_on_ramp():
    n = 64
    ramp = np.arange(n, dtype=float)
    ref = ramp + 0.5
    dct_err = np.abs(rs.fractional_shift(ramp, 0.5, "dct") - ref)[8:-8].max()
    dft_err = np.abs(rs.fractional_shift(ramp, 0.5, "dft") - ref)
    dft_border = max(dft_err[:4].max(), dft_err[-4:].max())
    assert dct_err * 10 <= dft_border


def test_shift_per_line_and_rejects():
    img = RNG.normal(size=(5, 16))
    d = np.linspace(-1, 1, 5)
    out = rs.fractional_shift(img, d, "dft", axis=1)
    for i in range(5):
        np.testing.assert_allclose(out[i], rs.fractional_shift(img[i], d[i], "dft"), atol=1e-12)
    with pytest.raises(ValueError):
        rs.fractional_shift(img, np.inf)
    with pytest.raises(ValueError):
        rs.fractional_shift(img, 0.5, "haar")


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 64), st.floats(-5, 5), st.integers(0, 10 ** 6))
def test_dft_shift_preserves_energy_and_model(n, delta, seed):
    x = np.random.default_rng(seed).normal(size=n)
    if n % 2 == 0:
        # the split Nyquist term is scaled by cos(pi delta), not phase-rotated
        x -= np.mean(x * (-1.0) ** np.arange(n)) * (-1.0) ** np.arange(n)
    y = rs.fractional_shift(x, delta, "dft")
    assert abs(np.linalg.norm(y) - np.linalg.norm(x)) < 1e-10 * max(1, np.linalg.norm(x))
    ref = oracles.trig_poly_eval(tr.dft(x), np.arange(n) + delta).real
    assert np.max(np.abs(y - ref)) < 1e-9 * max(1, np.abs(x).sum())


def test_shift2_separable():
    img = RNG.normal(size=(12, 10))
    out = rs.shift2(img, 0.3, -0.7, "dct")
    ref = rs.fractional_shift(rs.fractional_shift(img, -0.7, "dct", 1), 0.3, "dct", 0)
    np.testing.assert_allclose(out, ref, atol=1e-12)


# -- rescaling ------------------------------------------------------------

def test_resize_identity_and_errors():
    x = RNG.normal(size=(12, 9))
    assert np.max(np.abs(rs.resize_shsc(x, 1.0) - x)) < 1e-10
    for s in (0.0, -2.0):
        with pytest.raises(ValueError):
            rs.resize_shsc(x, s)


@pytest.mark.parametrize("n", [32, 33])
def test_resize_sigma2_cosine(n):
    y = rs.resize_shsc(cosine(n), 2.0)
    assert len(y) == 2 * n
    ref = np.cos(2 * np.pi * 3 * (np.arange(2 * n) / 2.0) / n + 0.2)
    assert np.max(np.abs(y - ref)) < 1e-8


def test_resize_irrational_rate_matches_model():
    x = RNG.normal(size=20)
    sigma, shift = 1.1, 0.37
    y = rs.resize_shsc(x, sigma, shift)
    assert len(y) == 22
    pos = (np.arange(22) + shift) / sigma
    assert np.max(np.abs(y - oracles.trig_poly_eval(tr.dft(x), pos).real)) < 1e-9


def test_zoom_round_trip_compact_image():
    img = compact_blobs(64)
    back = rs.zoom(rs.zoom(img, np.sqrt(2)), 1 / np.sqrt(2))
    assert np.sqrt(np.mean((back - img)[8:-8, 8:-8] ** 2)) < 1e-3


# -- rotation -------------------------------------------------------------

@pytest.mark.parametrize("func", [rs.rotate_three_pass, rs.rotate_shscr])
def test_rotation_lattice_angles(func):
    img = RNG.normal(size=(10, 10))
    assert np.max(np.abs(func(img, 0.0) - img)) < 1e-12
    assert np.array_equal(func(img, np.pi / 2), np.rot90(img))
    assert np.array_equal(func(img, -np.pi), np.rot90(img, 2))


def test_rotation_methods_agree_on_band_limited_image():
    img = compact_blobs(64)
    a = rs.rotate_three_pass(img, 0.5)
    b = rs.rotate_shscr(img, 0.5)
    assert np.max(np.abs(a - b)[12:-12, 12:-12]) < 1e-4


def test_rotation_moves_point_counter_clockwise():
    n = 65
    y, x = np.mgrid[:n, :n] - 32.0
    img = np.exp(-((y + 10) ** 2 + x ** 2) / 8.0)  # blob above the centre
    out = rs.rotate_three_pass(img, np.pi / 4)
    ref = np.rot90(img)  # a quarter turn puts it on the left
    iy, ix = np.unravel_index(np.argmax(out), out.shape)
    ry, rx = np.unravel_index(np.argmax(ref), ref.shape)
    assert iy < 32 and ix < 32 and ry == 32 and rx < 32


def test_rotate_and_back():
    img = compact_blobs(64)
    back = rs.rotate_three_pass(rs.rotate_three_pass(img, 0.3), -0.3)
    assert np.max(np.abs(back - img)[12:-12, 12:-12]) < 1e-6


def test_shscr_rotation_requires_square():
    with pytest.raises(ValueError):
        rs.rotate_shscr(np.ones((4, 6)), 0.2)


# -- elastic ----------------------------------------------------------------

def test_elastic_zero_field_identity():
    img = RNG.normal(size=(20, 17))
    out = rs.elastic_resample(img, rs.DisplacementField.uniform(img.shape))
    assert np.max(np.abs(out - img)) < 1e-10


def test_elastic_equals_per_window_shift():
    img = RNG.normal(size=(14, 12))
    dy = RNG.uniform(-1, 1, img.shape)
    dx = RNG.uniform(-1, 1, img.shape)
    w = WindowSpec(5, 7)
    out = rs.elastic_resample(img, rs.DisplacementField(dy, dx), w)
    ext = np.pad(img, ((2, 2), (3, 3)), mode="symmetric")
    for i, j in [(0, 0), (5, 6), (13, 11), (7, 2)]:
        win = ext[i:i + 5, j:j + 7]
        ref = rs.fractional_shift(rs.fractional_shift(win, dx[i, j], "dct", 1), dy[i, j], "dct", 0)
        assert abs(out[i, j] - ref[2, 3]) < 1e-12


def test_elastic_uniform_field_tracks_global_shift():
    n = 64
    y, x = np.mgrid[:n, :n]
    img = np.cos(2 * np.pi * (2 * x + y) / n) + 0.5 * np.sin(2 * np.pi * (x - 3 * y) / n)
    out = rs.elastic_resample(img, rs.DisplacementField.uniform(img.shape, dy=0.5), WindowSpec(15, 15))
    ref = rs.fractional_shift(img, 0.5, "dct", axis=0)
    # windowed and global models differ by the window truncation, not by 1e-6
    assert np.max(np.abs(out - ref)[8:-8, 8:-8]) < 1e-3


def test_elastic_sinusoidal_warp_dense_model():
    n = 64
    y, x = np.mgrid[:n, :n]
    img = np.cos(2 * np.pi * (2 * x + y) / n) + 0.5 * np.sin(2 * np.pi * (x - 3 * y) / n + 0.4)
    # warp quantised to the 1/16 grid so the nearest dense sample is exact
    dy = np.round(16 * 0.7 * np.sin(2 * np.pi * x / n)) / 16
    dx = np.round(16 * 0.6 * np.cos(2 * np.pi * y / n)) / 16
    dense = rs.zero_pad_interpolate(img, 16, "dft")
    py = np.round((y + dy) * 16).astype(int) % (16 * n)
    px = np.round((x + dx) * 16).astype(int) % (16 * n)
    out = rs.elastic_resample(img, rs.DisplacementField(dy, dx), WindowSpec(15, 15))
    assert np.max(np.abs(out - dense[py, px])[8:-8, 8:-8]) < 1e-3


def test_displacement_field_validation():
    with pytest.raises(ValueError):
        rs.DisplacementField(np.zeros((3, 3)), np.zeros((3, 4)))
    with pytest.raises(ValueError):
        rs.DisplacementField(np.full((2, 2), np.nan), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        rs.elastic_resample(np.zeros((4, 4)), rs.DisplacementField.uniform((3, 3)))


# -- differentiation and integration --------------------------------------

@pytest.mark.parametrize("domain", ["dft", "dct"])
def test_derivative_of_constant_is_zero(domain):
    assert np.max(np.abs(rs.differentiate(np.full(32, 7.0), domain))) < 1e-12


def test_dct_int_diff_recovers_zero_mean():
    x = RNG.normal(size=64)
    back = rs.integrate(rs.differentiate(x, "dct"), "dct")
    assert np.max(np.abs(back - (x - x.mean()))) < 1e-10


def test_dft_int_diff_recovers_zero_mean_odd_length():
    x = RNG.normal(size=63)
    back = rs.integrate(rs.differentiate(x, "dft"), "dft")
    assert np.max(np.abs(back - (x - x.mean()))) < 1e-10


def test_dft_int_diff_drops_nyquist_for_even_length():
    x = RNG.normal(size=64)
    nyq = np.sum(x * (-1.0) ** np.arange(64)) / 64 * (-1.0) ** np.arange(64)
    back = rs.integrate(rs.differentiate(x, "dft"), "dft")
    assert np.max(np.abs(back - (x - x.mean() - nyq))) < 1e-10


def test_derivative_of_sinusoid():
    n = 256
    k = np.arange(n)
    x = np.sin(2 * np.pi * 5 * k / n + 0.3)
    ref = 2 * np.pi * 5 / n * np.cos(2 * np.pi * 5 * k / n + 0.3)
    assert np.max(np.abs(rs.differentiate(x, "dft") - ref)) < 1e-8
    # the mirror extension is not smooth for a sine, but the interior stays close
    assert np.max(np.abs(rs.differentiate(x, "dct") - ref)[32:-32]) < 5e-3


def test_integral_has_zero_mean_and_axis_support():
    img = RNG.normal(size=(8, 16))
    for dom in ("dft", "dct"):
        out = rs.integrate(img, dom, axis=0)
        assert out.shape == img.shape
        assert np.max(np.abs(out.mean(axis=0))) < 1e-12
        np.testing.assert_allclose(out[:, 3], rs.integrate(img[:, 3], dom), atol=1e-12)
    with pytest.raises(ValueError):
        rs.differentiate(img, "walsh")
