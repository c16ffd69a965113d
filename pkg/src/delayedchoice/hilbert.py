"""Dense finite-dimensional state algebra over labeled tensor-product bases.

Every composite space is a product of named subsystems, each with a declared
dimension and modes numbered from 1.  Subsystems are always stored sorted by
name, and the basis of a composite space is the lexicographic product of
``(name, mode)`` pairs, so matrix layouts are fixed by the subsystem names
alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvariantError,
    LabelingConflictError,
    NormalizationError,
    SubsystemLookupError,
)

NORM_TOL = 1e-12
EIGEN_TOL = 1e-10
WEIGHT_TOL = 1e-9

Subsystems = tuple[tuple[str, int], ...]
BasisLabel = tuple[tuple[str, int], ...]


def _canonical_subsystems(subsystems: Iterable[tuple[str, int]]) -> Subsystems:
    subs = tuple((str(name), int(dim)) for name, dim in subsystems)
    names = [name for name, _ in subs]
    if len(set(names)) != len(names):
        raise LabelingConflictError(f"duplicate subsystem names in {names}")
    if not subs:
        raise InvariantError("at least one subsystem is required")
    for name, dim in subs:
        if dim < 1:
            raise InvariantError(f"subsystem {name!r} has dimension {dim}")
    if list(names) != sorted(names):
        raise InvariantError(f"subsystems must be sorted by name, got {names}")
    return subs


def basis_labels(subsystems: Subsystems) -> list[BasisLabel]:
    """All basis labels of the product space, in storage order."""
    ranges = [[(name, k) for k in range(1, dim + 1)] for name, dim in subsystems]
    return [tuple(combo) for combo in itertools.product(*ranges)]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm pure state over a labeled product basis."""

    subsystems: Subsystems
    amplitudes: np.ndarray

    def __post_init__(self):
        subs = _canonical_subsystems(self.subsystems)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.size != int(np.prod([d for _, d in subs])):
            raise InvariantError(
                f"{amps.size} amplitudes do not match subsystem dims {subs}"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvariantError(f"state is not normalized: squared norm {norm2!r}")
        object.__setattr__(self, "subsystems", subs)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, subsystems, amplitudes, normalize=False) -> "StateVector":
        """Build a state; subsystems may be given in any order.

        Amplitudes are read in the order of ``subsystems`` as given and then
        permuted into canonical (name-sorted) order.
        """
        subs = tuple((str(n), int(d)) for n, d in subsystems)
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise NormalizationError("cannot normalize the zero vector")
            amps = amps / norm
        order = sorted(range(len(subs)), key=lambda k: subs[k][0])
        if order != list(range(len(subs))):
            amps = amps.reshape([d for _, d in subs]).transpose(order).reshape(-1)
            subs = tuple(subs[k] for k in order)
        return cls(subs, amps)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def basis(self) -> list[BasisLabel]:
        return basis_labels(self.subsystems)

    def amplitude(self, label: dict[str, int] | BasisLabel) -> complex:
        """Amplitude on one basis label, e.g. ``{"i": 1, "n": 1}``."""
        modes = dict(label)
        if set(modes) != set(self.names):
            raise SubsystemLookupError(f"label {modes} does not match {self.names}")
        index = []
        for name, dim in self.subsystems:
            k = modes[name]
            if not 1 <= k <= dim:
                raise SubsystemLookupError(f"mode {k} outside 1..{dim} for {name!r}")
            index.append(k - 1)
        return complex(self.amplitudes[np.ravel_multi_index(index, self.dims)])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def allclose(self, other: "StateVector", atol: float = NORM_TOL) -> bool:
        return self.subsystems == other.subsystems and np.allclose(
            self.amplitudes, other.amplitudes, rtol=0, atol=atol
        )


def ket(name: str, mode: int, dim: int = 2) -> StateVector:
    """Basis ket ``|mode>`` of a single subsystem (modes count from 1)."""
    if not 1 <= mode <= dim:
        raise SubsystemLookupError(f"mode {mode} outside 1..{dim} for {name!r}")
    amps = np.zeros(dim, dtype=complex)
    amps[mode - 1] = 1.0
    return StateVector(((name, dim),), amps)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace operator over a labeled basis."""

    subsystems: Subsystems
    matrix: np.ndarray

    def __post_init__(self):
        subs = _canonical_subsystems(self.subsystems)
        mat = _frozen(self.matrix)
        n = int(np.prod([d for _, d in subs]))
        if mat.shape != (n, n):
            raise InvariantError(f"matrix shape {mat.shape} does not match dims {subs}")
        if np.max(np.abs(mat - mat.conj().T)) > NORM_TOL:
            raise InvariantError("operator is not Hermitian")
        tr = np.trace(mat)
        if abs(tr - 1.0) > NORM_TOL:
            raise InvariantError(f"operator trace {tr!r} is not 1")
        if np.min(np.linalg.eigvalsh(mat)) < -EIGEN_TOL:
            raise InvariantError("operator has a negative eigenvalue")
        object.__setattr__(self, "subsystems", subs)
        object.__setattr__(self, "matrix", mat)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def basis(self) -> list[BasisLabel]:
        return basis_labels(self.subsystems)

    def allclose(self, other: "DensityOperator", atol: float = NORM_TOL) -> bool:
        return self.subsystems == other.subsystems and np.allclose(
            self.matrix, other.matrix, rtol=0, atol=atol
        )


@dataclass(frozen=True)
class MixtureComponent:
    weight: float
    state: StateVector

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise NormalizationError(f"mixture weight {self.weight} outside [0, 1]")


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product of two states on disjoint subsystems."""
    overlap = set(a.names) & set(b.names)
    if overlap:
        raise LabelingConflictError(f"subsystems {sorted(overlap)} appear on both sides")
    return StateVector.from_amplitudes(
        a.subsystems + b.subsystems, np.kron(a.amplitudes, b.amplitudes)
    )


def density_from_pure(v: StateVector) -> DensityOperator:
    return DensityOperator(v.subsystems, np.outer(v.amplitudes, v.amplitudes.conj()))


def partial_trace(rho: DensityOperator, keep: str) -> DensityOperator:
    """Trace out every subsystem of ``rho`` except ``keep``."""
    names = rho.names
    if keep not in names:
        raise SubsystemLookupError(f"no subsystem {keep!r} in {names}")
    if len(names) < 2:
        raise InvariantError("partial trace needs at least two subsystems")
    n = len(names)
    k = names.index(keep)
    tensor_form = rho.matrix.reshape(rho.dims + rho.dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[:n])
    col[k] = letters[n]
    subscripts = "".join(row) + "".join(col) + "->" + row[k] + col[k]
    reduced = np.einsum(subscripts, tensor_form)
    return DensityOperator((rho.subsystems[k],), reduced)


def mix(components: Sequence[MixtureComponent]) -> DensityOperator:
    """Convex combination of pure states sharing one basis."""
    if not components:
        raise NormalizationError("a mixture needs at least one component")
    total = sum(c.weight for c in components)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise NormalizationError(f"mixture weights sum to {total!r}, not 1")
    subs = components[0].state.subsystems
    if any(c.state.subsystems != subs for c in components):
        raise LabelingConflictError("mixture components live on different bases")
    mat = sum(
        c.weight * np.outer(c.state.amplitudes, c.state.amplitudes.conj())
        for c in components
    )
    return DensityOperator(subs, mat)


def dephase(rho: DensityOperator) -> DensityOperator:
    """Zero every off-diagonal element (full which-path decoherence)."""
    return DensityOperator(rho.subsystems, np.diag(np.diag(rho.matrix)))


def is_unitary(matrix: np.ndarray, atol: float = NORM_TOL) -> bool:
    matrix = np.asarray(matrix)
    eye = np.eye(matrix.shape[0])
    return bool(np.max(np.abs(matrix.conj().T @ matrix - eye)) < atol)
