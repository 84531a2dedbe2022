"""End-to-end bit-chain tests: coding + interleaving + mapping round trips."""

import numpy as np
import pytest

from mimolink import convcode, modulation, stcode
from mimolink.exceptions import ConfigurationError, FramingError
from mimolink.linkchain import LinkChain


def _chain(scheme=stcode.ALAMOUTI, order=64, rate="2/3", n=128, seed=0):
    return LinkChain(
        scheme=scheme,
        constellation=modulation.qam_constellation(order),
        codec=convcode.CodecConfig(rate=rate),
        n_subcarriers=n,
        interleaver_seed=seed,
    )


def test_frame_sizes_per_mode():
    # (scheme, order, rate) -> (coded bits, trellis steps, info bits)
    cases = [
        (stcode.ALAMOUTI, 64, "2/3", 128, 1536, 1024, 1018),
        (stcode.GOLDEN, 16, "1/2", 128, 2048, 1024, 1018),
        (stcode.ALAMOUTI, 256, "3/4", 128, 2048, 1536, 1530),
        (stcode.GOLDEN, 64, "1/2", 128, 3072, 1536, 1530),
    ]
    for scheme, order, rate, n, coded, steps, info in cases:
        c = _chain(scheme, order, rate, n)
        assert (c.coded_bits, c.steps, c.n_info_bits) == (coded, steps, info)


def test_encode_frame_is_deterministic_and_binary():
    chain = _chain()
    rng = np.random.default_rng(0)
    info = rng.integers(0, 2, chain.n_info_bits)
    a = chain.encode_frame(info)
    b = chain.encode_frame(info)
    assert np.array_equal(a, b)
    assert set(np.unique(a)) <= {0, 1}
    assert a.size == chain.coded_bits


def test_transmit_grid_shape_and_energy():
    chain = _chain(stcode.GOLDEN, 16, "1/2")
    rng = np.random.default_rng(1)
    s = chain.transmit_symbols(rng.integers(0, 2, chain.n_info_bits))
    assert s.shape == (128, 2 * stcode.GOLDEN.q_symbols)
    # unit-energy constellation: average |s|^2 per complex symbol ~ 1
    energy = (s ** 2).sum() / (128 * stcode.GOLDEN.q_symbols)
    assert abs(energy - 1.0) < 0.1


def test_perfect_llr_round_trip_recovers_info_bits():
    # Map the transmitted grid back to certain LLRs and run the decoder:
    # the full receive path must reproduce the info bits exactly.
    for scheme, order, rate in [
        (stcode.ALAMOUTI, 64, "2/3"),
        (stcode.GOLDEN, 16, "1/2"),
        (stcode.ALAMOUTI, 256, "3/4"),
    ]:
        chain = _chain(scheme, order, rate)
        rng = np.random.default_rng(2)
        info = rng.integers(0, 2, chain.n_info_bits)
        coded = chain.encode_frame(info)
        frame_llrs = 40.0 * (1.0 - 2.0 * coded.astype(float))
        out = convcode.siso_decode(chain.decoder_input(frame_llrs), chain.codec)
        assert np.array_equal(out.info_bits, info)


def test_decoder_input_undoes_interleaving():
    chain = _chain(seed=99)
    rng = np.random.default_rng(3)
    info = rng.integers(0, 2, chain.n_info_bits)
    mother = convcode.encode_mother(info, chain.codec)
    kept = convcode.puncture(mother, chain.codec)
    llrs_chan = 1.0 - 2.0 * chain.encode_frame(info).astype(float)
    restored = chain.decoder_input(llrs_chan)
    # surviving positions carry the (sign-mapped) punctured stream
    back = convcode.puncture(restored, chain.codec)
    assert np.array_equal(back, 1.0 - 2.0 * kept)


def test_feedback_symbols_certain_llrs_match_transmit_grid():
    chain = _chain(stcode.GOLDEN, 16, "1/2")
    rng = np.random.default_rng(4)
    info = rng.integers(0, 2, chain.n_info_bits)
    grid = chain.transmit_symbols(info)
    mother = convcode.encode_mother(info, chain.codec).astype(float)
    mother_llrs = 80.0 * (1.0 - 2.0 * mother)
    regen = chain.feedback_symbols(mother_llrs)
    np.testing.assert_allclose(regen, grid, atol=1e-10)
    hard = chain.feedback_symbols(mother_llrs, hard=True)
    np.testing.assert_allclose(hard, grid, atol=1e-12)


def test_feedback_symbols_neutral_llrs_give_zero_grid():
    chain = _chain()
    regen = chain.feedback_symbols(np.zeros(2 * chain.steps))
    np.testing.assert_allclose(regen, 0.0, atol=1e-12)


def test_interleaver_seed_changes_channel_order():
    rng = np.random.default_rng(5)
    info = rng.integers(0, 2, _chain().n_info_bits)
    a = _chain(seed=0).encode_frame(info)
    b = _chain(seed=1).encode_frame(info)
    assert not np.array_equal(a, b)
    assert np.array_equal(np.sort(a), np.sort(b))


def test_no_interleaver_keeps_coded_order():
    chain = _chain(seed=None)
    rng = np.random.default_rng(6)
    info = rng.integers(0, 2, chain.n_info_bits)
    coded = convcode.conv_encode(info, chain.codec)
    assert np.array_equal(chain.encode_frame(info), coded)


def test_wrong_info_length_raises():
    chain = _chain()
    with pytest.raises(ConfigurationError):
        chain.encode_frame(np.zeros(chain.n_info_bits - 1, dtype=np.uint8))


def test_indivisible_framing_raises():
    # 16-QAM rate 2/3 needs the coded length divisible by 3; 101
    # subcarriers give 808 coded bits, which is not.
    with pytest.raises(FramingError):
        LinkChain(
            scheme=stcode.ALAMOUTI,
            constellation=modulation.qam_constellation(16),
            codec=convcode.CodecConfig(rate="2/3"),
            n_subcarriers=101,
        )
