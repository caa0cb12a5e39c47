from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fastxform import recovery as rc
from fastxform import transforms as tr


def dct_instance(seed, n=64, band=8, k=12):
    rng = np.random.default_rng(seed)
    sp = np.zeros(n)
    sp[:band] = rng.normal(size=band)
    x = tr.idct(sp)
    pos = np.sort(rng.choice(n, k, replace=False))
    return x, rc.SampleSet.from_signal(x, pos), rc.make_band_mask(n, "rect", band)


# -- sample sets and masks ------------------------------------------------

def test_sample_set_validation():
    s = rc.SampleSet(8, [1, 5], [0.5, 2.0])
    assert s.K == 2 and s.N == 8 and s.known_mask().sum() == 2
    for pos, vals in (([1, 1], [0, 0]), ([9], [0]), ([-1], [0]), ([], []), ([1, 2], [0])):
        with pytest.raises(ValueError):
            rc.SampleSet(8, pos, vals)
    with pytest.raises(ValueError):
        rc.SampleSet(4, [0], [np.nan])


def test_sample_set_2d_from_signal():
    img = np.arange(12.0).reshape(3, 4)
    s = rc.SampleSet.from_signal(img, [0, 5, 11])
    assert s.positions.tolist() == [[0, 0], [1, 1], [2, 3]]
    assert s.values.tolist() == [0.0, 5.0, 11.0]
    assert s.linear.tolist() == [0, 5, 11]


def test_rect_masks():
    assert rc.make_band_mask((4, 6), "rect", (1, 1)).sum() == 1
    assert rc.make_band_mask((4, 6), "rect", (1, 1))[0, 0]
    assert rc.make_band_mask((4, 6), "rect", (4, 6)).all()
    assert rc.make_band_mask((4, 6), "rect", (4, 6), domain="dft").all()
    dft = rc.make_band_mask(16, "rect", 5, domain="dft")
    assert np.flatnonzero(dft).tolist() == [0, 1, 2, 14, 15]
    with pytest.raises(ValueError):
        rc.make_band_mask((4, 4), "rect", (5, 1))


def test_sector_mask_predicate():
    r, a = 6.5, np.pi / 3
    m = rc.make_band_mask((16, 16), "sector", radius=r, angle=a)
    for i in range(16):
        for j in range(16):
            phi = np.arctan2(j, i)
            want = (i * i + j * j <= r * r and 0 <= phi <= a + 1e-12) or (i == j == 0)
            assert m[i, j] == want


def test_sector_mask_dft_is_symmetric():
    m = rc.make_band_mask((16, 16), "sector", radius=5, angle=np.pi / 4, domain="dft")
    neg = (-np.arange(16)) % 16
    assert np.array_equal(m, m[np.ix_(neg, neg)])


def test_mask_errors():
    with pytest.raises(ValueError):
        rc.make_band_mask((4, 4), "custom", custom=np.zeros((4, 4)))
    with pytest.raises(ValueError):
        rc.make_band_mask((4, 4), "custom", custom=np.ones((2, 2)))
    with pytest.raises(ValueError):
        rc.make_band_mask(8, "sector", radius=2)
    with pytest.raises(ValueError):
        rc.make_band_mask((8, 8), "ring")


# -- direct ---------------------------------------------------------------

def test_direct_full_sampling():
    x = np.random.default_rng(0).normal(size=16)
    s = rc.SampleSet.from_signal(x, np.arange(16))
    for domain in ("dct", "dft"):
        rep = rc.recover_direct(s, np.ones(16, bool), domain)
        assert np.max(np.abs(rep.signal - x)) < 1e-10 and rep.converged


def test_direct_band_limited_instance():
    x, s, mask = dct_instance(3)
    rep = rc.recover_direct(s, mask)
    assert rep.residual < 1e-8
    assert np.sqrt(np.mean((rep.signal - x) ** 2)) < 1e-8
    assert not rep.underdetermined and not rep.ill_conditioned
    assert np.isfinite(rep.condition)


def test_direct_underdetermined_flag():
    x, _, _ = dct_instance(1)
    s = rc.SampleSet.from_signal(x, [3, 17, 40, 52])
    rep = rc.recover_direct(s, rc.make_band_mask(64, "rect", 8))
    assert rep.underdetermined and rep.residual < 1e-8


def test_direct_ill_conditioned_flag():
    # samples bunched at one end leave high-order coefficients nearly invisible
    x = tr.idct(np.r_[np.ones(30), np.zeros(34)])
    s = rc.SampleSet.from_signal(x, np.arange(30))
    rep = rc.recover_direct(s, rc.make_band_mask(64, "rect", 30))
    assert rep.condition > 1e12 and rep.ill_conditioned


def test_direct_2d_dft():
    rng = np.random.default_rng(4)
    mask = rc.make_band_mask((16, 16), "rect", (5, 5), domain="dft")
    sp = np.where(mask, rng.normal(size=(16, 16)), 0)
    img = np.real(tr.idft2(sp + np.conj(sp[np.ix_(-np.arange(16) % 16, -np.arange(16) % 16)])))
    pos = rng.choice(256, 60, replace=False)
    rep = rc.recover_direct(rc.SampleSet.from_signal(img, pos), mask, "dft")
    assert np.max(np.abs(rep.signal - img)) < 1e-8


def test_direct_shape_mismatch():
    _, s, _ = dct_instance(0)
    with pytest.raises(ValueError):
        rc.recover_direct(s, np.ones(32, bool))
    with pytest.raises(ValueError):
        rc.recover_direct(s, np.ones(64, bool), domain="haar")


# -- Gerchberg-Papoulis ---------------------------------------------------

def test_gp_fully_sampled_band_limited_one_iteration():
    x, _, mask = dct_instance(0)
    s = rc.SampleSet.from_signal(x, np.arange(64))
    rep = rc.recover_gp(s, mask)
    assert rep.iterations == 1 and rep.converged


def test_gp_matches_direct():
    x, s, mask = dct_instance(3)
    gp = rc.recover_gp(s, mask, max_iters=500)
    direct = rc.recover_direct(s, mask)
    assert gp.converged and gp.residual < 1e-6 and gp.iterations <= 500
    assert np.sqrt(np.mean((gp.signal - direct.signal) ** 2)) < 1e-4
    assert np.all(np.diff(gp.history) <= 1e-12)


def test_gp_mismatched_band_plateaus():
    x, s, _ = dct_instance(0)
    small = rc.make_band_mask(64, "rect", 4)
    gp = rc.recover_gp(s, small, max_iters=3000)
    direct = rc.recover_direct(s, small)
    assert not gp.converged and gp.residual > 0.01
    # the plateau is the least-squares fit of the smaller band
    assert abs(gp.history[-1] - np.linalg.norm(direct.signal[s.linear] - s.values)) < 1e-6


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 12), st.sampled_from(["dct", "dft"]))
def test_gp_history_monotone(seed, band, domain):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=32)
    pos = rng.choice(32, 10, replace=False)
    mask = rc.make_band_mask(32, "rect", band, domain=domain)
    rep = rc.recover_gp(rc.SampleSet.from_signal(x, pos), mask, domain, max_iters=60)
    assert np.all(np.diff(rep.history) <= 1e-9 * max(1.0, rep.history[0]))
    assert rep.iterations <= 60


def test_gp_argument_checks():
    _, s, mask = dct_instance(0)
    with pytest.raises(ValueError):
        rc.recover_gp(s, mask, max_iters=0)
    with pytest.raises(ValueError):
        rc.recover_gp(s, mask, tol=0)


def test_band_project_2d():
    img = np.random.default_rng(0).normal(size=(8, 8))
    mask = rc.make_band_mask((8, 8), "rect", (2, 3))
    out = rc.band_project(img, mask)
    sp = tr.dct2(out)
    assert np.max(np.abs(sp[~mask])) < 1e-12
    np.testing.assert_allclose(sp[mask], tr.dct2(img)[mask], atol=1e-12)


# -- sinc-lets and uncertainty -------------------------------------------

def test_sinclet_full_support_is_discrete_sinc():
    n, b = 64, 9
    r = rc.generate_sinclet(n, (0, n), b)
    t = np.arange(n) - (n - 1) // 2
    ref = np.where(t == 0, b, np.sin(np.pi * b * t / n) / np.where(t == 0, 1, np.sin(np.pi * t / n)))
    ref /= np.linalg.norm(ref)
    assert np.max(np.abs(r.kernel - ref)) < 1e-8 and r.converged


def test_sinclet_idempotent_at_convergence():
    n = 64
    r = rc.generate_sinclet(n, (27, 36), 9, iters=20000)
    assert r.converged
    inside = np.zeros(n, bool)
    inside[27:36] = True
    y = rc.band_project(np.where(inside, r.kernel, 0), rc._band_1d(n, 9, "dft"), "dft")
    assert np.linalg.norm(y / np.linalg.norm(y) - r.kernel) < 1e-8


def test_sinclet_reference_parameters():
    r = rc.generate_sinclet(512, (205, 308), 51, iters=2000)
    assert r.support_size == 103 and r.band_size == 51 and r.eq6_satisfied
    assert r.iterations <= 2000
    assert r.spatial_concentration >= 0.99 and r.spectral_concentration >= 0.99


def test_sinclet_below_uncertainty_bound():
    r = rc.generate_sinclet(16, (7, 9), 2)
    assert not r.eq6_satisfied
    assert not r.concentrated


def test_sinclet_argument_checks():
    for kw in (dict(support=(5, 5)), dict(support=(0, 20)), dict(bandwidth=0), dict(iters=0)):
        args = dict(n=16, support=(2, 8), bandwidth=4)
        args.update(kw)
        with pytest.raises(ValueError):
            rc.generate_sinclet(**args)


def test_uncertainty_examples():
    imp = np.zeros(32)
    imp[5] = 1
    u = rc.uncertainty_report(imp)
    assert (u.n_sign, u.n_spect, u.N) == (1, 32, 32) and u.satisfied and u.product == 32
    c = rc.uncertainty_report(np.ones(32))
    assert (c.n_sign, c.n_spect) == (32, 1) and c.satisfied
    assert rc.uncertainty_report(np.ones(32), domain="dct").n_spect == 1
    with pytest.raises(ValueError):
        rc.uncertainty_report(imp, signal_tol=-1)


def test_uncertainty_of_sinclet():
    r = rc.generate_sinclet(512, (205, 308), 51)
    cut = np.where((np.arange(512) >= 205) & (np.arange(512) < 308), r.kernel, 0)
    u = rc.uncertainty_report(cut, spect_tol=1e-2 * np.abs(tr.dft(cut)).max())
    assert (u.n_sign, u.n_spect, u.N) == (103, 51, 512) and u.satisfied


def test_cs_bound():
    m, ok = rc.cs_sample_bound(0.074 * 65536, 65536)
    assert abs(m / 65536 - 1.184) < 1e-12 and not ok
    assert rc.cs_sample_bound(1, 2) == (1.0, True)
    m, ok = rc.cs_sample_bound(1024 / (2 * 10), 1024)
    assert m == 512 and ok
    for k, n in ((0, 4), (1, 1)):
        with pytest.raises(ValueError):
            rc.cs_sample_bound(k, n)
