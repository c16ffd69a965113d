import math

import numpy as np
import pytest

from delayedchoice.atom import SuperSystemState, interact, prepare_atom
from delayedchoice.detection import (
    BLOCK_SHOTS,
    DetectionRecord,
    PlateKind,
    ScreenModel,
    fit_visibility,
    pdf_visibility,
    position_pdf,
    record_summary,
    sample_counts,
    sample_detections,
    visibility,
)
from delayedchoice.errors import EstimationError, InvariantError
from delayedchoice.hilbert import DensityOperator, dephase, density_from_pure
from delayedchoice.optics import path_state, single_path

from oracles import fringe_table, random_density

R2 = 1 / math.sqrt(2)
SCREEN = ScreenModel()


def rho_from(matrix):
    return DensityOperator((("i", 2),), matrix)


def coherent(c):
    """Path operator with equal populations and coherence ``c``."""
    return rho_from([[0.5, c], [np.conj(c), 0.5]])


class TestScreen:
    def test_defaults(self):
        assert SCREEN.bins == 64 and SCREEN.fringe_period == 1.0
        assert SCREEN.unit_centers()[0] == 0.5 / 64

    @pytest.mark.parametrize("bins,period", [(7, 1.0), (64, 0.0), (64, -1.0), (8.5, 1.0)])
    def test_invalid(self, bins, period):
        with pytest.raises(InvariantError):
            ScreenModel(bins, period)


class TestPositionPdf:
    def test_pure_superposition_fixed(self):
        pdf = position_pdf(density_from_pure(path_state(R2, R2)), SCREEN, "fixed")
        np.testing.assert_allclose(pdf, fringe_table(0.5, 64), atol=1e-15)
        # 1 + cos(2 pi x) up to normalization
        x = (np.arange(64) + 0.5) / 64
        np.testing.assert_allclose(pdf, (1 + np.cos(2 * np.pi * x)) / 64, atol=1e-15)
        assert abs(pdf_visibility(pdf, SCREEN) - 1) < 1e-6

    def test_half_identity_is_uniform(self):
        pdf = position_pdf(rho_from(np.eye(2) / 2), SCREEN, "fixed")
        np.testing.assert_allclose(pdf, np.full(64, 1 / 64), atol=1e-15)

    def test_movable_plate_is_uniform(self):
        pdf = position_pdf(density_from_pure(path_state(R2, R2)), SCREEN, PlateKind.MOVABLE)
        np.testing.assert_allclose(pdf, np.full(64, 1 / 64), atol=1e-15)

    def test_rejects_non_path_operator(self):
        rho = DensityOperator((("i", 2), ("n", 2)), np.eye(4) / 4)
        with pytest.raises(InvariantError):
            position_pdf(rho, SCREEN)

    @pytest.mark.parametrize("bins", [8, 32, 64, 100])
    def test_sums_to_one_and_visibility_law(self, bins):
        screen = ScreenModel(bins)
        rng = np.random.default_rng(bins)
        for _ in range(30):
            rho = rho_from(random_density(rng, 2))
            for plate in PlateKind:
                pdf = position_pdf(rho, screen, plate)
                assert abs(pdf.sum() - 1) < 1e-12
            fixed = position_pdf(rho, screen, "fixed")
            np.testing.assert_allclose(fixed, fringe_table(rho.matrix[0, 1], bins), atol=1e-14)
            if bins >= 32:
                assert abs(pdf_visibility(fixed, screen) - 2 * abs(rho.matrix[0, 1])) < 1e-6

    def test_movable_equals_fixed_of_dephased(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            rho = rho_from(random_density(rng, 2))
            np.testing.assert_array_equal(
                position_pdf(rho, SCREEN, "movable"), position_pdf(dephase(rho), SCREEN, "fixed")
            )


class TestVisibility:
    def test_noiseless_full_fringe(self):
        pdf = np.array(fringe_table(0.5, 64))
        v, err = fit_visibility(SCREEN.unit_centers(), pdf * 1e5)
        assert abs(v - 1) < 1e-6
        assert err < 1e-6

    def test_uniform_counts(self):
        rec = DetectionRecord(np.full(64, 1000), SCREEN.bin_centers(), 64000, 0)
        v, err = visibility(rec)
        assert v == pytest.approx(0, abs=1e-12)
        assert err == pytest.approx(0, abs=1e-9)

    def test_quarter_coherence_gives_half(self):
        pdf = position_pdf(coherent(0.25), SCREEN)
        assert abs(pdf_visibility(pdf, SCREEN) - 0.5) < 1e-6
        pdf = position_pdf(coherent(0.25j), SCREEN)
        assert abs(pdf_visibility(pdf, SCREEN) - 0.5) < 1e-6

    def test_respects_fringe_period(self):
        screen = ScreenModel(64, 3.5)
        pdf = position_pdf(coherent(0.2), screen)
        counts = np.round(pdf * 1e7).astype(int)
        rec = DetectionRecord(counts, screen.bin_centers(), int(1e7), 0, 3.5)
        assert visibility(rec)[0] == pytest.approx(0.4, abs=1e-5)

    def test_too_few_bins(self):
        rec = DetectionRecord([500, 500], [1.0, 2.0], 1000, 0)
        with pytest.raises(EstimationError):
            visibility(rec)
        with pytest.raises(EstimationError):
            fit_visibility(np.arange(4) / 4, np.ones(4))

    def test_warns_on_few_detections(self):
        rec = DetectionRecord(np.full(8, 10), ScreenModel(8).bin_centers(), 80, 0)
        with pytest.warns(UserWarning):
            visibility(rec)

    def test_stderr_is_calibrated(self):
        # spread of sampled estimates should match the reported error
        pdf = position_pdf(coherent(0.25), SCREEN)
        estimates, errors = [], []
        for seed in range(40):
            counts = sample_counts(pdf, 20000, seed)
            rec = DetectionRecord(counts, SCREEN.bin_centers(), 20000, seed)
            v, err = visibility(rec)
            estimates.append(v)
            errors.append(err)
        ratio = np.std(estimates) / np.mean(errors)
        assert 0.6 < ratio < 1.5


class TestSampling:
    def test_two_photon_double_intensity(self):
        state = interact(path_state(R2, R2), prepare_atom("excited_2"))
        rec = sample_detections(state, SCREEN, "fixed", 100_000, 42)
        assert rec.total_detections == 200_000
        assert visibility(rec)[0] < 0.05

    def test_single_path_is_flat(self):
        rec = sample_detections(SuperSystemState(single_path(1), 1), SCREEN, "fixed", 100_000, 1)
        assert rec.total_detections == rec.shots == 100_000
        assert visibility(rec)[0] < 0.05

    def test_deterministic(self):
        state = SuperSystemState(path_state(R2, R2), 1)
        a = sample_detections(state, SCREEN, "fixed", 5000, 123)
        b = sample_detections(state, SCREEN, "fixed", 5000, 123)
        c = sample_detections(state, SCREEN, "fixed", 5000, 124)
        assert a == b
        assert a.to_csv() == b.to_csv()
        assert a != c

    def test_frozen_streams(self):
        # pins the PCG64 / SeedSequence / multinomial pipeline across builds
        assert sample_counts(np.full(8, 1 / 8), 1000, 42).tolist() == [
            138, 126, 120, 138, 112, 135, 118, 113,
        ]
        assert sample_counts(np.arange(1, 9) / 36, 200_000, 7).tolist() == [
            5656, 11174, 16613, 22510, 27514, 33060, 38980, 44493,
        ]

    def test_independent_of_worker_count(self):
        pdf = position_pdf(coherent(0.3), SCREEN)
        shots = 3 * BLOCK_SHOTS + 17
        serial = sample_counts(pdf, shots, 99)
        for workers in (2, 3, 8):
            np.testing.assert_array_equal(sample_counts(pdf, shots, 99, workers=workers), serial)
        assert serial.sum() == shots

    def test_converges_to_pdf(self):
        n = 100_000
        for rho in (coherent(0.5), coherent(0.2 + 0.1j), rho_from(np.diag([0.3, 0.7]))):
            pdf = position_pdf(rho, SCREEN)
            freq = sample_counts(pdf, n, 2718) / n
            bound = 5 * np.sqrt(pdf * (1 - pdf) / n)
            assert np.all(np.abs(freq - pdf) < bound)

    def test_zero_shots(self):
        state = SuperSystemState(single_path(1), 1)
        with pytest.raises(ValueError):
            sample_detections(state, SCREEN, "fixed", 0, 1)


class TestRecordOutput:
    def test_histogram_and_csv(self):
        screen = ScreenModel(8, 2.0)
        rec = DetectionRecord([1, 2, 3, 4, 5, 6, 7, 8], screen.bin_centers(), 36, 5, 2.0)
        assert rec.total_detections == 36
        assert rec.histogram[2] == (2, 3)
        lines = rec.to_csv().splitlines()
        assert lines[0] == "bin_center,count"
        assert lines[1] == "0.125,1"
        assert len(lines) == 9

    def test_summary_fields(self):
        pdf = position_pdf(coherent(0.5), SCREEN)
        rec = DetectionRecord(sample_counts(pdf, 10_000, 3), SCREEN.bin_centers(), 10_000, 3)
        summary = record_summary(rec)
        assert list(summary) == [
            "shots", "seed", "total_detections", "visibility", "visibility_stderr",
        ]
        assert summary["total_detections"] == 10_000

    def test_negative_counts_rejected(self):
        with pytest.raises(InvariantError):
            DetectionRecord([-1] + [0] * 7, ScreenModel(8).bin_centers(), 1, 0)
