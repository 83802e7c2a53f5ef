"""OTFS grid transforms against brute-force double-sum oracles."""

import numpy as np
import pytest

from ddpredict.otfs.transforms import (
    OTFSConfig,
    TimeSignal,
    heisenberg,
    isfft,
    read_grid,
    sfft,
    wigner,
    write_grid,
)


def _random_grid(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def _isfft_bruteforce(x_dd):
    m, n = x_dd.shape
    out = np.zeros((m, n), dtype=complex)
    for mm in range(m):
        for nn in range(n):
            acc = 0.0j
            for l in range(m):
                for k in range(n):
                    acc += x_dd[l, k] * np.exp(2j * np.pi * (nn * k / n - mm * l / m))
            out[mm, nn] = acc / np.sqrt(m * n)
    return out


def test_isfft_matches_double_sum(rng):
    config = OTFSConfig(m=8, n=4)
    x = _random_grid(rng, 8, 4)
    np.testing.assert_allclose(isfft(x, config), _isfft_bruteforce(x), atol=1e-12)


def test_sfft_inverts_isfft(rng):
    config = OTFSConfig(m=16, n=8)
    x = _random_grid(rng, 16, 8)
    np.testing.assert_allclose(sfft(isfft(x, config), config), x, atol=1e-12)
    np.testing.assert_allclose(isfft(sfft(x, config), config), x, atol=1e-12)


def test_isfft_is_unitary(rng):
    config = OTFSConfig(m=16, n=8)
    x = _random_grid(rng, 16, 8)
    assert np.linalg.norm(isfft(x, config)) == pytest.approx(np.linalg.norm(x))


def test_heisenberg_slot_structure(rng):
    config = OTFSConfig(m=8, n=3)
    x_tf = _random_grid(rng, 8, 3)
    s = heisenberg(x_tf, config).samples
    assert s.shape == (24,)
    for n in range(3):
        for p in range(8):
            want = sum(
                x_tf[m, n] * np.exp(2j * np.pi * m * p / 8) for m in range(8)
            )
            assert s[n * 8 + p] == pytest.approx(want, abs=1e-12)


def test_wigner_inverts_heisenberg(rng):
    config = OTFSConfig(m=32, n=8)
    x_tf = _random_grid(rng, 32, 8)
    np.testing.assert_allclose(wigner(heisenberg(x_tf, config), config), x_tf, atol=1e-12)


def test_frame_energy_is_m_times_grid_energy(rng):
    config = OTFSConfig(m=16, n=4)
    x_tf = _random_grid(rng, 16, 4)
    s = heisenberg(x_tf, config).samples
    assert np.sum(np.abs(s) ** 2) == pytest.approx(config.m * np.sum(np.abs(x_tf) ** 2))


def test_end_to_end_modulation_identity(rng):
    # dd -> tf -> time -> tf -> dd with no channel is the identity
    config = OTFSConfig(m=16, n=8)
    x_dd = _random_grid(rng, 16, 8)
    s = heisenberg(isfft(x_dd, config), config)
    y_dd = sfft(wigner(s, config), config)
    np.testing.assert_allclose(y_dd, x_dd, atol=1e-12)


def test_cyclic_shift_maps_to_doppler_phase(rng):
    # delaying the frame by one slot multiplies TF columns by a linear phase
    config = OTFSConfig(m=8, n=8)
    x_tf = _random_grid(rng, 8, 8)
    s = heisenberg(x_tf, config).samples
    rolled = np.roll(s, config.m)  # one whole slot
    y_tf = wigner(rolled, config)
    np.testing.assert_allclose(y_tf[:, 1:], x_tf[:, :-1], atol=1e-12)


def test_config_properties():
    config = OTFSConfig(m=64, n=16, subcarrier_spacing_hz=15e3)
    assert config.symbol_duration_s == pytest.approx(1 / 15e3)
    assert config.sample_rate_hz == pytest.approx(960e3)
    assert config.frame_samples == 1024
    assert config.frame_duration_s == pytest.approx(16 / 15e3)
    assert config.delay_resolution_s == pytest.approx(1 / 960e3)
    assert config.doppler_resolution_hz == pytest.approx(15e3 / 16)


def test_config_validation():
    with pytest.raises(ValueError):
        OTFSConfig(m=0)
    with pytest.raises(ValueError):
        OTFSConfig(subcarrier_spacing_hz=0.0)
    with pytest.raises(ValueError):
        OTFSConfig(pulse="gaussian")


def test_grid_shape_checked(rng):
    config = OTFSConfig(m=8, n=4)
    with pytest.raises(ValueError, match="shape"):
        isfft(_random_grid(rng, 4, 8), config)
    with pytest.raises(ValueError, match="length"):
        wigner(np.zeros(7, dtype=complex), config)


def test_grid_roundtrip_exact(tmp_path, rng):
    grid = _random_grid(rng, 8, 4)
    f = tmp_path / "grid.csv"
    write_grid(f, grid)
    np.testing.assert_array_equal(read_grid(f), grid)


def test_read_grid_rejects_corrupt_file(tmp_path):
    f = tmp_path / "g.csv"
    f.write_text("# dims=2,2\n1.0,0.0\n")
    with pytest.raises(ValueError, match="expected 4 entries"):
        read_grid(f)
    f2 = tmp_path / "g2.csv"
    f2.write_text("1.0,0.0\n")
    with pytest.raises(ValueError, match="dims header"):
        read_grid(f2)


def test_time_signal_casts_to_complex():
    sig = TimeSignal(samples=np.ones(4))
    assert sig.samples.dtype == complex
