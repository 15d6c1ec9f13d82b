import numpy as np
import pytest

from pasim.channel import ChannelConfig, demap, effective_snr, transmit
from pasim.constellation import AmplitudeAlphabet, AmplitudeDistribution, SymbolMap, mb_for_entropy


def test_noiseless_is_identity(rng):
    x = rng.normal(size=50) + 1j * rng.normal(size=50)
    assert np.array_equal(transmit(x, ChannelConfig(float("inf"))), x)


def test_noise_power():
    x = np.zeros(10**6, complex)
    y = transmit(x, ChannelConfig(10.0, seed=4))
    assert abs(np.mean(np.abs(y) ** 2) - 0.1) < 1e-3


def test_noise_is_circular():
    y = transmit(np.zeros(10**6, complex), ChannelConfig(0.0, seed=9))
    assert abs(np.var(y.real) - 0.5) < 5e-3
    assert abs(np.var(y.imag) - 0.5) < 5e-3


def test_deterministic_under_seed():
    x = np.ones(1000, complex)
    a = transmit(x, ChannelConfig(12.0, seed=7), stream=3)
    b = transmit(x, ChannelConfig(12.0, seed=7), stream=3)
    c = transmit(x, ChannelConfig(12.0, seed=7), stream=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_llr_signs_match_labels_on_points(ask8):
    smap = SymbolMap(AmplitudeDistribution.uniform(ask8))
    pts, labels, _ = smap.points_1d()
    y = pts[0::2] + 1j * pts[1::2]
    llr = demap(y, ChannelConfig(40.0), smap.dist)
    assert np.array_equal(llr < 0, labels.astype(bool))


def test_sign_llr_zero_at_origin(ask8):
    _, dist = mb_for_entropy(ask8, 1.8)
    llr = demap(np.array([0j]), ChannelConfig(10.0), dist)
    assert np.allclose(llr[:, 0], 0.0, atol=1e-12)


def test_two_point_closed_form():
    # A = {1}: only the sign bit; x = +-s with s = 1/sqrt(2)
    dist = AmplitudeDistribution.uniform(AmplitudeAlphabet.pam(1))
    cfg = ChannelConfig(6.0)
    var1 = cfg.noise_var / 2
    s = SymbolMap(dist).scale
    y = np.array([0.3 - 0.8j, -0.1 + 0.05j])
    llr = demap(y, cfg, dist)
    y1 = np.array([0.3, -0.8, -0.1, 0.05])
    expected = ((y1 + s) ** 2 - (y1 - s) ** 2) / (2 * var1)
    assert llr.shape == (4, 1)
    assert np.allclose(llr[:, 0], np.clip(expected, -50, 50))


def test_priors_shift_amplitude_llrs(ask8):
    # the log-prior ratio shows up exactly when the channel term is negligible
    _, shaped = mb_for_entropy(ask8, 1.6)
    uni = AmplitudeDistribution.uniform(ask8)
    cfg = ChannelConfig(-40.0)
    y = np.array([0.2 + 0.1j])
    p = shaped.as_array()
    lab = ask8.label_matrix()
    expected = np.log(p[lab[:, 0] == 0].sum() / p[lab[:, 0] == 1].sum())
    assert np.allclose(demap(y, cfg, shaped)[:, 1], expected, atol=1e-3)
    assert np.allclose(demap(y, cfg, uni)[:, 1], 0.0, atol=1e-3)


def test_uniform_64qam_hard_decisions_at_30db(ask8):
    smap = SymbolMap(AmplitudeDistribution.uniform(ask8))
    rng = np.random.default_rng(1)
    x, signs, idx = smap.sample(200_000, rng)
    cfg = ChannelConfig(30.0, seed=1)
    llr = demap(transmit(x, cfg), cfg, smap.dist)
    sent = np.concatenate([signs[:, None], ask8.label_matrix()[idx]], axis=1)
    ber = np.mean((llr < 0) != sent.astype(bool))
    assert ber < 1e-5


def _map_symbol(llr):
    return (llr < 0).astype(np.uint8)


def test_shaped_priors_lower_ser(ask8):
    _, shaped = mb_for_entropy(ask8, 1.6)
    smap = SymbolMap(shaped)
    x, signs, idx = smap.sample(500_000, np.random.default_rng(2))
    cfg = ChannelConfig(12.0, seed=2)
    y = transmit(x, cfg)
    sent = np.concatenate([signs[:, None], ask8.label_matrix()[idx]], axis=1)
    err_shaped = np.any(_map_symbol(demap(y, cfg, shaped)) != sent, axis=1)
    # uniform-prior demapper on the same received samples and scaling
    mismatched = AmplitudeDistribution.uniform(ask8)
    scale = smap.scale / SymbolMap(mismatched).scale
    err_uniform = np.any(_map_symbol(demap(y / scale, cfg_scaled(cfg, scale), mismatched)) != sent, axis=1)
    diff = err_uniform.astype(float) - err_shaped.astype(float)
    assert diff.mean() > 3 * diff.std() / np.sqrt(diff.size)


def cfg_scaled(cfg, scale):
    return ChannelConfig(cfg.snr_db + 20 * np.log10(scale), cfg.seed)


def test_effective_snr_cap_and_scaling(rng):
    x = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    assert effective_snr(x, x) == 100.0
    assert effective_snr(x, 2 * x) == 100.0
    y = transmit(x, ChannelConfig(5.0, seed=3))
    assert effective_snr(x, y) == pytest.approx(effective_snr(x, (0.3 - 2j) * y), abs=1e-9)


def test_effective_snr_awgn(ask8):
    smap = SymbolMap(AmplitudeDistribution.uniform(ask8))
    x, _, _ = smap.sample(10**6, np.random.default_rng(6))
    y = transmit(x, ChannelConfig(15.0, seed=6))
    assert abs(effective_snr(x, y) - 15.0) < 0.1


def test_effective_snr_errors():
    with pytest.raises(ValueError, match="length mismatch"):
        effective_snr(np.ones(3), np.ones(4))
    with pytest.raises(ValueError, match="all-zero"):
        effective_snr(np.zeros(3), np.ones(3))
