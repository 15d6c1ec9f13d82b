from fractions import Fraction

import numpy as np
import pytest

from pasim.channel import ChannelConfig, demap, transmit
from pasim.constellation import AmplitudeAlphabet
from pasim.fec_ldpc import dvbs2_code
from pasim.pas_frame import (
    UniformShaper, codeword_labels, codeword_llrs, frame_bits, net_rate, pas_decode, pas_encode,
    plan_frame,
)
from pasim.simulate import TABLE1, table1_system


def test_layout_ess_200(ask8):
    lay = plan_frame(64800, Fraction(4, 5), ask8, 200, 370)
    assert lay.amplitudes_per_codeword == 21600
    assert lay.dm_blocks_per_codeword == 108
    assert lay.amp_label_bits == 43200
    assert lay.uniform_sign_info_bits == 8640
    assert lay.parity_bits == 12960
    assert lay.source_bits_per_codeword == 108 * 370 + 8640 == 48600
    assert lay.info_bits == 51840
    assert lay.symbols_per_codeword == 10800


def test_layout_ccdm_3600(ask8):
    lay = plan_frame(64800, Fraction(4, 5), ask8, 3600, 6660)
    assert lay.dm_blocks_per_codeword == 6
    assert lay.source_bits_per_codeword == 48600
    assert lay.parity_bits == 12960


def test_layout_uniform(ask8):
    lay = plan_frame(64800, Fraction(3, 4), ask8, 1, 2)
    assert lay.source_bits_per_codeword == 48600
    assert lay.parity_bits == 16200
    assert lay.uniform_sign_info_bits == 5400
    assert net_rate(lay) == 9


def test_net_rates(ask8):
    assert net_rate(plan_frame(64800, Fraction(4, 5), ask8, 200, 370)) == 9
    assert net_rate(plan_frame(64800, Fraction(4, 5), ask8, 200, 400)) == Fraction(48, 5)


@pytest.mark.parametrize("name", sorted(TABLE1))
def test_table1_net_rate_is_nine(name):
    assert table1_system(name).net_rate == 9


@pytest.mark.parametrize("args,match", [
    ((64801, Fraction(4, 5), 200, 370), "divisible by m"),
    ((64800, Fraction(4, 5), 7, 13), "divisible by DM blocklength"),
    ((64800, Fraction(1, 2), 200, 370), "parity exceeds sign positions"),
    ((64800, Fraction(4, 5), 200, 401), "outside"),
])
def test_layout_errors(ask8, args, match):
    cw, c, n, k = args
    with pytest.raises(ValueError, match=match):
        plan_frame(cw, c, ask8, n, k)


def test_layout_identity_checked(ask8):
    lay = plan_frame(64800, Fraction(4, 5), ask8, 200, 370)
    fields = dict(lay.__dict__, parity_bits=12961)
    with pytest.raises(ValueError, match="uniform_sign_info_bits \\+ parity_bits"):
        type(lay)(**fields)


def test_zero_source_uniform(ask8):
    sys = table1_system("uniform")
    src = np.zeros(sys.layout.source_bits_per_codeword, np.uint8)
    codeword, labels = frame_bits(sys.layout, sys.shaper, sys.fec, src)
    assert not labels[:, 1:].any()
    assert not labels[: sys.layout.uniform_sign_info_bits, 0].any()
    assert sys.fec.is_codeword(codeword)
    x = pas_encode(sys.layout, sys.shaper, sys.fec, src)
    assert x.shape == (10800,)


def test_label_reordering_is_inverse():
    sys = table1_system("ess-200")
    rng = np.random.default_rng(3)
    src = rng.integers(0, 2, sys.layout.source_bits_per_codeword, dtype=np.uint8)
    codeword, labels = frame_bits(sys.layout, sys.shaper, sys.fec, src)
    assert np.array_equal(codeword_labels(sys.layout, sys.fec, codeword), labels)
    llrs = codeword_llrs(sys.layout, sys.fec, 1.0 - 2.0 * labels)
    assert np.array_equal(llrs < 0, codeword.astype(bool))


def _noiseless(sys, src):
    x = pas_encode(sys.layout, sys.shaper, sys.fec, src, sys.symbol_map)
    cfg = ChannelConfig(float("inf"))
    llrs = codeword_llrs(sys.layout, sys.fec, demap(transmit(x, cfg), cfg, sys.priors))
    return x, pas_decode(sys.layout, sys.shaper, sys.fec, llrs)


@pytest.mark.parametrize("name", sorted(TABLE1))
def test_noiseless_roundtrip(name):
    sys = table1_system(name)
    src = np.random.default_rng(11).integers(0, 2, sys.layout.source_bits_per_codeword, dtype=np.uint8)
    _, res = _noiseless(sys, src)
    assert res.fec_converged
    assert res.dm_failures == 0
    assert np.array_equal(res.decoded_source_bits, src)


def test_ess_codeword_energy():
    sys = table1_system("ess-200")
    src = np.random.default_rng(5).integers(0, 2, sys.layout.source_bits_per_codeword, dtype=np.uint8)
    x, _ = _noiseless(sys, src)
    assert abs(np.mean(np.abs(x) ** 2) - 1) <= 2e-2


@pytest.mark.parametrize("name", ["ess-200", "ccdm-200"])
def test_single_label_flip_corrected(name):
    sys = table1_system(name)
    lay = sys.layout
    src = np.random.default_rng(8).integers(0, 2, lay.source_bits_per_codeword, dtype=np.uint8)
    codeword, _ = frame_bits(lay, sys.shaper, sys.fec, src)
    llrs = 20.0 * (1 - 2.0 * codeword)
    pos = sys.fec.info_positions[1234]  # an amplitude label bit
    llrs[pos] = -llrs[pos]
    res = pas_decode(lay, sys.shaper, sys.fec, llrs)
    assert res.fec_converged and res.dm_failures == 0
    assert np.array_equal(res.decoded_source_bits, src)


def test_zero_llrs_not_converged():
    sys = table1_system("ess-200")
    res = pas_decode(sys.layout, sys.shaper, sys.fec, np.zeros(64800))
    assert not res.fec_converged
    assert 0 <= res.dm_failures <= sys.layout.dm_blocks_per_codeword
    assert res.decoded_source_bits.size == sys.layout.source_bits_per_codeword


def test_llr_length_checked():
    sys = table1_system("ess-200")
    with pytest.raises(ValueError, match="64800 LLRs"):
        pas_decode(sys.layout, sys.shaper, sys.fec, np.zeros(100))


def test_shaper_mismatch_rejected(ask8):
    lay = plan_frame(64800, Fraction(4, 5), ask8, 200, 370)
    with pytest.raises(ValueError, match="does not match layout"):
        frame_bits(lay, UniformShaper(ask8), dvbs2_code("4/5"), np.zeros(48600, np.uint8))


def test_uniform_shaper_roundtrip(ask8):
    shaper = UniformShaper(ask8)
    for bits in ([0, 0], [0, 1], [1, 1], [1, 0]):
        lv = shaper.encode_levels(bits)
        assert list(shaper.decode_levels(lv)) == bits


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(TABLE1))
def test_noiseless_roundtrip_many(name):
    sys = table1_system(name)
    rng = np.random.default_rng(99)
    for _ in range(100):
        src = rng.integers(0, 2, sys.layout.source_bits_per_codeword, dtype=np.uint8)
        _, res = _noiseless(sys, src)
        assert res.dm_failures == 0 and np.array_equal(res.decoded_source_bits, src)
