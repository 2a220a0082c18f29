import numpy as np
import pytest

import acmri


def test_masks():
    mask = acmri.make_accelerated_mask(200, 4, 32)
    assert len(mask.acquired_lines) == 74
    assert mask.scan_time == pytest.approx(0.37)
    rnd = acmri.make_random_mask(200, 0.58, 32, 1)
    assert len(rnd.acquired_lines) == 116
    assert rnd.acquired == acmri.make_random_mask(200, 0.58, 32, 1).acquired
    with pytest.raises(ValueError):
        acmri.make_random_mask(64, 0.1, 16, 0)


def test_fft_matches_numpy_centered_unitary():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((6, 5)) + 1j * rng.standard_normal((6, 5))
    ref = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(x), norm="ortho"))
    np.testing.assert_allclose(acmri.fft2c(x), ref, atol=1e-12)
    np.testing.assert_allclose(acmri.ifft2c(acmri.fft2c(x)), x, atol=1e-12)


def test_operator_is_projection_and_matches_data():
    n, m = 16, 8
    mask = acmri.make_random_mask(n, 0.5, 4, 3)
    A = acmri.build_A_dft(mask, m)
    np.testing.assert_allclose(A @ A, A, atol=1e-12)
    img = np.random.default_rng(1).standard_normal((n, m)) + 0j
    maps = np.ones((1, 1, n, m), complex)
    k = acmri.simulate_kspace(img, maps, mask)
    g = acmri.prepare_g(k)
    np.testing.assert_allclose(g[0, 0], A @ img, atol=1e-12)


def test_kernel_closed_form():
    c, w, x = 3.0, 2.0, 0.37
    expected = w / np.pi * np.exp(1j * c * x) * np.sinc(w * x / np.pi)
    assert acmri.kernel_eval([(c, w)], x) == pytest.approx(expected, abs=1e-14)


def test_svd_and_reconstruction_end_to_end():
    n = 32
    truth = acmri.make_phantom('{"n": 32, "m": 32}')
    maps = acmri.make_coil_maps(n, n, coils=8)
    assert maps.shape == (8, 1, n, n)
    mask = acmri.make_accelerated_mask(n, 2, 8)
    report = acmri.svd_analysis(maps, mask)
    assert report["null_dim"] == 0 and report["kappa"] >= 1.0
    assert np.all(np.diff(report["sigma"]) <= 0)

    k = acmri.simulate_kspace(truth, maps, mask, 0.01, 5)
    t = np.abs(truth)
    roi = acmri.default_roi(t)
    ac = acmri.reconstruct(k, maps, mask, alpha=0.01)
    zf = acmri.reconstruct_baseline(k, maps, mask, "zero_fill")
    assert ac["status"] == "ok" and ac["failed_slices"] == []
    assert acmri.rel_error(t, ac["magnitude"], roi) < acmri.rel_error(t, zf["magnitude"], roi)
    assert acmri.ssim_mean(t, t) == pytest.approx(1.0, abs=1e-12)


def test_coil_stack_file_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    a = rng.standard_normal((2, 1, 4, 3)) + 1j * rng.standard_normal((2, 1, 4, 3))
    path = str(tmp_path / "s.stack")
    acmri.write_coil_stack(path, a, "kspace")
    np.testing.assert_array_equal(acmri.read_coil_stack(path), a)
