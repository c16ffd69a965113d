import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delayedchoice.detection import ScreenModel, position_pdf
from delayedchoice.errors import InvariantError, SubsystemLookupError
from delayedchoice.hilbert import StateVector, density_from_pure, is_unitary
from delayedchoice.optics import (
    OpticalElement,
    apply_circuit,
    beam_splitter,
    interferometer,
    mirror,
    path_state,
    phase_shift,
    single_path,
)

from oracles import interferometer_ports, random_amplitudes

R2 = 1 / math.sqrt(2)
PHASES = [0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi]


class TestBeamSplitter:
    def test_single_mode_input_gives_equal_split(self):
        out = beam_splitter(single_path(1))
        np.testing.assert_allclose(out.amplitudes, [R2, R2], atol=1e-15)

    def test_recombines(self):
        out = beam_splitter(path_state(R2, R2))
        np.testing.assert_allclose(out.amplitudes, [1, 0], atol=1e-15)

    def test_involution(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            v = StateVector((("i", 2),), random_amplitudes(rng, 2))
            assert beam_splitter(beam_splitter(v)).allclose(v)

    def test_rejects_two_photon_state(self):
        v = StateVector.from_amplitudes((("i", 2), ("n", 2)), [1, 0, 0, 0])
        with pytest.raises(InvariantError):
            beam_splitter(v)


class TestMirror:
    def test_global_phase(self):
        out = mirror(single_path(1), 1, math.pi)
        np.testing.assert_allclose(out.amplitudes, [-1, 0], atol=1e-15)

    def test_relative_phase(self):
        out = mirror(path_state(R2, R2), 2, math.pi)
        np.testing.assert_allclose(out.amplitudes, [R2, -R2], atol=1e-15)

    def test_unknown_mode(self):
        with pytest.raises(SubsystemLookupError):
            mirror(single_path(1), 3, 0.0)
        with pytest.raises(SubsystemLookupError):
            OpticalElement("mirror", mode=0)

    @pytest.mark.parametrize("phi", [0.3, 1.0, math.pi, 5.0])
    def test_equal_phase_on_both_arms_leaves_pattern(self, phi):
        v = path_state(R2, R2 * np.exp(0.7j))
        w = mirror(mirror(v, 1, phi), 2, phi)
        np.testing.assert_allclose(w.probabilities(), v.probabilities(), atol=1e-12)
        screen = ScreenModel()
        np.testing.assert_allclose(
            position_pdf(density_from_pure(w), screen),
            position_pdf(density_from_pure(v), screen),
            atol=1e-12,
        )


class TestPhaseShift:
    def test_zero_is_identity(self):
        v = path_state(0.6, 0.8j)
        assert phase_shift(v, 0.0).allclose(v)

    def test_pi_then_split_gives_mode_2(self):
        out = beam_splitter(phase_shift(path_state(R2, R2), math.pi))
        # BS @ diag(1, -1) @ (1, 1)/sqrt(2) = (0, 1)
        np.testing.assert_allclose(out.amplitudes, [0, 1], atol=1e-15)

    def test_periodic(self):
        v = path_state(R2, R2)
        assert phase_shift(v, 1.2).allclose(phase_shift(v, 1.2 + 2 * math.pi))


class TestCircuit:
    def test_empty(self):
        v = path_state(0.6, 0.8)
        assert apply_circuit(v, []).allclose(v)

    def test_split(self):
        out = apply_circuit(single_path(1), [OpticalElement("beam_splitter")])
        np.testing.assert_allclose(out.amplitudes, [R2, R2], atol=1e-15)

    @pytest.mark.parametrize("phi", PHASES)
    def test_closed_interferometer_matches_oracle(self, phi):
        out = apply_circuit(single_path(1), interferometer(phi))
        p1, p2 = interferometer_ports(phi)
        assert abs(out.probabilities()[0] - p1) < 1e-12
        assert abs(out.probabilities()[1] - p2) < 1e-12
        assert abs(p1 - math.cos(phi / 2) ** 2) < 1e-12

    def test_all_elements_unitary(self):
        for el in (
            OpticalElement("beam_splitter"),
            OpticalElement("mirror", phi=0.4, mode=1),
            OpticalElement("mirror", phi=2.0, mode=2),
            OpticalElement("phase_shifter", phi=-1.3),
        ):
            assert is_unitary(el.matrix())

    def test_unknown_kind(self):
        with pytest.raises(InvariantError):
            OpticalElement("prism")


elements = st.one_of(
    st.just(OpticalElement("beam_splitter")),
    st.builds(OpticalElement, st.just("phase_shifter"), st.floats(-10, 10)),
    st.builds(OpticalElement, st.just("mirror"), st.floats(-10, 10), st.sampled_from([1, 2])),
)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(elements, max_size=8),
    st.floats(0, 2 * math.pi),
    st.floats(0, math.pi / 2),
)
def test_circuit_preserves_norm(circuit, phase, theta):
    v = path_state(math.cos(theta), math.sin(theta) * np.exp(1j * phase))
    out = apply_circuit(v, circuit)
    assert abs(np.vdot(out.amplitudes, out.amplitudes).real - 1) < 1e-12
