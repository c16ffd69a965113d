"""Three-level atom placed across both photon paths.

An atom in excited level 1 leaves the photon alone.  An atom in excited
level 2 is stimulated with certainty and emits a second photon into the same
path mode as the first, ``|k>_i -> |k>_i |k>_n``.  The atom's own state after
the interaction is not tracked.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .hilbert import StateVector
from .optics import PathState, check_path_state

CHOICE_TIMES = ("before_split", "in_flight", "after_split")


class AtomLevel(str, enum.Enum):
    GROUND = "ground"
    EXCITED_1 = "excited_1"
    EXCITED_2 = "excited_2"


@dataclass(frozen=True)
class AtomPreparation:
    level: AtomLevel
    # metadata only; never consulted by interact()
    choice_time: str = "in_flight"

    def __post_init__(self):
        object.__setattr__(self, "level", AtomLevel(self.level))
        if self.choice_time not in CHOICE_TIMES:
            raise ValueError(f"choice_time must be one of {CHOICE_TIMES}")


@dataclass(frozen=True)
class SuperSystemState:
    """Photon(s) leaving the atom: one path state, or the two-photon state."""

    state: StateVector
    photon_count: int

    def __post_init__(self):
        if self.photon_count not in (1, 2):
            raise ValueError(f"photon_count must be 1 or 2, got {self.photon_count}")
        if len(self.state.subsystems) != self.photon_count:
            raise ValueError("photon_count does not match the number of subsystems")

    @property
    def photons(self) -> tuple[str, ...]:
        return self.state.names


def prepare_atom(level: AtomLevel | str, choice_time: str = "in_flight") -> AtomPreparation:
    return AtomPreparation(AtomLevel(level), choice_time)


def emission_isometry() -> np.ndarray:
    """4x2 matrix sending |k> to |k>|k> in the (11, 12, 21, 22) basis."""
    iso = np.zeros((4, 2), dtype=complex)
    iso[0, 0] = 1.0
    iso[3, 1] = 1.0
    return iso


def interact(photon: PathState, atom: AtomPreparation, new_photon: str = "n") -> SuperSystemState:
    name = check_path_state(photon)
    if atom.level is not AtomLevel.EXCITED_2:
        return SuperSystemState(photon, 1)
    if new_photon == name:
        raise ValueError(f"emitted photon needs a name distinct from {name!r}")
    amps = emission_isometry() @ photon.amplitudes
    # the isometry output is written in (photon, new_photon) order
    state = StateVector.from_amplitudes(((name, 2), (new_photon, 2)), amps)
    return SuperSystemState(state, 2)
