"""Optical elements acting on a single photon's two path modes.

Mode 1 is the reflected ("R", upper) path and mode 2 the transmitted
("T", lower) path.  A path state is a :class:`StateVector` over exactly one
subsystem of dimension two; the subsystem name identifies the photon.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import InvariantError, SubsystemLookupError
from .hilbert import StateVector, is_unitary, ket

PathState = StateVector

BEAM_SPLITTER = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

ELEMENT_KINDS = ("beam_splitter", "mirror", "phase_shifter")


def path_state(amp1: complex, amp2: complex, photon: str = "i") -> PathState:
    return StateVector(((photon, 2),), [amp1, amp2])


def single_path(mode: int, photon: str = "i") -> PathState:
    return ket(photon, mode, 2)


def check_path_state(state: StateVector) -> str:
    """Return the photon name, raising if ``state`` is not a two-mode path state."""
    if len(state.subsystems) != 1 or state.dims != (2,):
        raise InvariantError(
            f"path state must have one two-mode subsystem, got {state.subsystems}"
        )
    return state.names[0]


def _apply(state: PathState, matrix: np.ndarray) -> PathState:
    check_path_state(state)
    return StateVector(state.subsystems, matrix @ state.amplitudes)


def _mode_phase(mode: int, phi: float) -> np.ndarray:
    if mode not in (1, 2):
        raise SubsystemLookupError(f"path mode must be 1 or 2, got {mode!r}")
    diag = np.ones(2, dtype=complex)
    diag[mode - 1] = np.exp(1j * phi)
    return np.diag(diag)


@dataclass(frozen=True)
class OpticalElement:
    kind: str
    phi: float = 0.0
    mode: int | None = None

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise InvariantError(f"unknown optical element {self.kind!r}")
        if self.kind == "mirror" and self.mode not in (1, 2):
            raise SubsystemLookupError(f"mirror needs path mode 1 or 2, got {self.mode!r}")

    def matrix(self) -> np.ndarray:
        if self.kind == "beam_splitter":
            return BEAM_SPLITTER
        if self.kind == "mirror":
            return _mode_phase(self.mode, self.phi)
        return _mode_phase(2, self.phi)


def beam_splitter(state: PathState) -> PathState:
    """Balanced real splitter; maps |1> to (|1> + |2>)/sqrt(2) and is self-inverse."""
    return _apply(state, BEAM_SPLITTER)


def mirror(state: PathState, mode: int, phi: float = 0.0) -> PathState:
    """Reflection on one arm, contributing phase ``phi`` to that arm only."""
    return _apply(state, _mode_phase(mode, phi))


def phase_shift(state: PathState, phi: float) -> PathState:
    """Relative phase ``phi`` on mode 2 (the path-length difference)."""
    return _apply(state, _mode_phase(2, phi))


def circuit_matrix(elements: Sequence[OpticalElement]) -> np.ndarray:
    return reduce(lambda acc, el: el.matrix() @ acc, elements, np.eye(2, dtype=complex))


def apply_circuit(state: PathState, elements: Sequence[OpticalElement]) -> PathState:
    """Apply ``elements`` left to right."""
    check_path_state(state)
    unitary = circuit_matrix(elements)
    if not is_unitary(unitary):
        raise InvariantError("composite optical circuit is not unitary")
    return _apply(state, unitary)


def interferometer(phi: float) -> list[OpticalElement]:
    """Closed Mach-Zehnder: split, relative phase, recombine."""
    return [
        OpticalElement("beam_splitter"),
        OpticalElement("phase_shifter", phi=phi),
        OpticalElement("beam_splitter"),
    ]


def split_arms(phi: float, mirror_phase: float = 0.0) -> list[OpticalElement]:
    """Open arrangement up to the atom/plate: split, both fixed mirrors, relative phase."""
    return [
        OpticalElement("beam_splitter"),
        OpticalElement("mirror", phi=mirror_phase, mode=1),
        OpticalElement("mirror", phi=mirror_phase, mode=2),
        OpticalElement("phase_shifter", phi=phi),
    ]
