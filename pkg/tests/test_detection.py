import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from vlcnm.channel import ChannelModel, NoiseSpec, RngSeed, WhiteOnly, transmit_through
from vlcnm.detection import compute_ser, detect_frame, detect_stream, frame_metrics, wilson_interval
from vlcnm.ppm import PpmConfig, SampleBuffer, SymbolSequence, build_masks, modulate, random_symbols

CFG8 = PpmConfig(order_M=8, frame_duration=64e-6)
frames8 = arrays(np.float64, CFG8.frame_samples, elements=st.floats(-10, 10, allow_subnormal=False))


def wilson_closed_form(k, n, z=1.959963984540054):
    p = k / n
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z / (1 + z * z / n) * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return centre - half, centre + half


class TestDetectFrame:
    @pytest.mark.parametrize("M", [2, 4, 8])
    def test_noiseless_round_trip(self, M):
        cfg = PpmConfig(order_M=M)
        seq = SymbolSequence(np.arange(M), M)
        np.testing.assert_array_equal(detect_stream(modulate(seq, cfg), cfg).symbols, seq.symbols)

    def test_metrics_are_slot_sums(self):
        cfg = PpmConfig(order_M=4, frame_duration=8e-6)
        rec = detect_frame(np.arange(8.0), build_masks(cfg), true_symbol=1)
        np.testing.assert_array_equal(rec.metrics, [1, 5, 9, 13])
        assert rec.decided_symbol == 3 and rec.true_symbol == 1

    def test_ties_go_to_lowest_slot(self):
        cfg = PpmConfig(order_M=4)
        assert detect_frame(np.zeros(1000), build_masks(cfg)).decided_symbol == 0
        frame = np.zeros(1000)
        frame[250:260] = frame[750:760] = 1.0
        assert detect_frame(frame, build_masks(cfg)).decided_symbol == 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            detect_frame(np.zeros(999), build_masks(PpmConfig()))

    @given(frames8, st.floats(-1e3, 1e3))
    def test_dc_offset_shifts_all_metrics_equally(self, frame, c):
        masks = build_masks(CFG8)
        a = detect_frame(frame, masks)
        b = detect_frame(frame + c, masks)
        np.testing.assert_allclose(b.metrics - a.metrics, c * CFG8.slot_samples, atol=1e-7)

    @given(frames8, st.floats(1e-3, 1e3))
    def test_positive_scale_keeps_decision(self, frame, alpha):
        masks = build_masks(CFG8)
        m = masks @ frame
        top = np.sort(m)[-2:]
        if top[1] - top[0] < 1e-9 * max(1.0, abs(top[1])):
            return
        assert detect_frame(alpha * frame, masks).decided_symbol == detect_frame(frame, masks).decided_symbol

    def test_invariances_over_1000_random_frames(self, rng):
        cfg = PpmConfig(order_M=4)
        frames = rng.normal(size=(1000, cfg.frame_samples))
        z = SampleBuffer(frames.ravel(), cfg.sample_rate)
        base = detect_stream(z, cfg).symbols
        shifted = SampleBuffer(frames.ravel() + rng.normal() * 50, cfg.sample_rate)
        scaled = SampleBuffer(frames.ravel() * 3.7, cfg.sample_rate)
        np.testing.assert_array_equal(detect_stream(shifted, cfg).symbols, base)
        np.testing.assert_array_equal(detect_stream(scaled, cfg).symbols, base)


class TestStream:
    def test_frame_count(self):
        cfg = PpmConfig(order_M=4)
        assert frame_metrics(SampleBuffer(np.zeros(5000), 1e6), cfg).shape == (5, 4)

    def test_partial_frame_rejected(self):
        with pytest.raises(ValueError):
            detect_stream(SampleBuffer(np.zeros(1500), 1e6), PpmConfig())

    def test_high_snr_awgn_is_error_free(self):
        cfg = PpmConfig(order_M=4)
        seq = random_symbols(1000, cfg, np.random.default_rng(0))
        r = transmit_through(modulate(seq, cfg), ChannelModel(), WhiteOnly(), NoiseSpec(0.5), RngSeed(1))
        assert compute_ser(detect_stream(r, cfg), seq).n_errors == 0

    def test_ser_nonincreasing_in_snr(self):
        cfg = PpmConfig(order_M=4, frame_duration=40e-6)
        stds = [6.0, 4.0, 3.0, 2.0, 1.5]
        medians = []
        for std in stds:
            sers = []
            for s in range(5):
                seq = random_symbols(2000, cfg, RngSeed(s, 1).generator())
                r = transmit_through(modulate(seq, cfg), ChannelModel(), WhiteOnly(), NoiseSpec(std), RngSeed(s, 2))
                sers.append(compute_ser(detect_stream(r, cfg), seq).ser)
            medians.append(np.median(sers))
        assert all(b <= a for a, b in zip(medians, medians[1:]))
        assert medians[0] > medians[-1]


class TestSer:
    def test_identical(self):
        s = SymbolSequence(np.array([0, 1, 2]), 4)
        rep = compute_ser(s, s)
        assert rep.ser == 0.0 and rep.n_errors == 0 and rep.wilson_interval_95[0] == 0.0

    def test_four_in_a_thousand(self):
        truth = SymbolSequence(np.zeros(1000, int), 4)
        decided = SymbolSequence(np.r_[np.ones(4, int), np.zeros(996, int)], 4)
        rep = compute_ser(decided, truth)
        assert rep.ser == 0.004 and rep.n_symbols == 1000

    def test_all_wrong(self):
        rep = compute_ser(SymbolSequence(np.ones(10, int), 4), SymbolSequence(np.zeros(10, int), 4))
        assert rep.ser == 1.0 and rep.wilson_interval_95[1] == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            compute_ser(SymbolSequence(np.zeros(2, int), 4), SymbolSequence(np.zeros(3, int), 4))

    @given(st.integers(1, 10_000), st.data())
    def test_wilson_matches_closed_form_and_brackets_ser(self, n, data):
        k = data.draw(st.integers(0, n))
        lo, hi = wilson_interval(k, n)
        ref = wilson_closed_form(k, n)
        assert lo == pytest.approx(ref[0], abs=1e-9) and hi == pytest.approx(ref[1], abs=1e-9)
        truth = SymbolSequence(np.zeros(n, int), 2)
        decided = SymbolSequence((np.arange(n) < k).astype(int), 2)
        rep = compute_ser(decided, truth)
        assert rep.wilson_interval_95[0] <= rep.ser <= rep.wilson_interval_95[1]
