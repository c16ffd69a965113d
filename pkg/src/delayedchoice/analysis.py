"""Diagnostics separating an entangled pure state from its sub-systemic mixture."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, LabelingConflictError, SubsystemLookupError
from .hilbert import (
    NORM_TOL,
    DensityOperator,
    MixtureComponent,
    StateVector,
    density_from_pure,
    mix,
    partial_trace,
)

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``state = sum_k coefficients[k] * left[k] (x) right[k]``."""

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    bipartition: tuple[tuple[str, int], tuple[str, int]]

    @property
    def rank(self) -> int:
        return int(np.sum(self.coefficients > RANK_TOL))

    def reconstruct(self) -> StateVector:
        amps = sum(
            c * np.kron(l, r) for c, l, r in zip(self.coefficients, self.left, self.right)
        )
        return StateVector.from_amplitudes(self.bipartition, amps)


def _bipartite_matrix(state: StateVector, bipartition: tuple[str, str]) -> np.ndarray:
    a, b = bipartition
    if a == b or set(bipartition) != set(state.names) or len(state.names) != 2:
        raise SubsystemLookupError(
            f"bipartition {bipartition} does not match subsystems {state.names}"
        )
    m = state.amplitudes.reshape(state.dims)
    return m if state.names == (a, b) else m.T


def schmidt_decompose(state: StateVector, bipartition: tuple[str, str]) -> SchmidtDecomposition:
    m = _bipartite_matrix(state, bipartition)
    u, s, vh = np.linalg.svd(m)
    k = len(s)
    dims = dict(state.subsystems)
    return SchmidtDecomposition(
        coefficients=s,
        left=u[:, :k].T.copy(),
        right=vh[:k, :].copy(),
        bipartition=((bipartition[0], dims[bipartition[0]]), (bipartition[1], dims[bipartition[1]])),
    )


def entanglement_entropy(state: StateVector, bipartition: tuple[str, str]) -> float:
    """Von Neumann entropy of either half, in nats."""
    p = schmidt_decompose(state, bipartition).coefficients ** 2
    p = p[p > 0]
    return float(max(-np.sum(p * np.log(p)), 0.0))


def purity(rho: DensityOperator) -> float:
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def super_systemic_witness(candidate: DensityOperator, reference: StateVector) -> float:
    """Expectation of the projector onto ``reference`` in ``candidate``."""
    if candidate.subsystems != reference.subsystems:
        raise LabelingConflictError(
            f"candidate {candidate.subsystems} and reference {reference.subsystems} differ"
        )
    psi = reference.amplitudes
    value = float(np.real(np.vdot(psi, candidate.matrix @ psi)))
    return min(max(value, 0.0), 1.0)


def subsystem_equivalence_check(
    entangled: StateVector, mixture: DensityOperator, atol: float = NORM_TOL
) -> bool:
    """True when no single-subsystem measurement tells the two descriptions apart."""
    if entangled.subsystems != mixture.subsystems:
        raise LabelingConflictError(
            f"structures differ: {entangled.subsystems} vs {mixture.subsystems}"
        )
    if len(entangled.names) < 2:
        raise InvariantError("equivalence check needs a composite system")
    pure = density_from_pure(entangled)
    return all(
        partial_trace(pure, name).allclose(partial_trace(mixture, name), atol=atol)
        for name in entangled.names
    )


def second_kind_mixture(state: StateVector) -> DensityOperator:
    """Mixture of the product basis kets carried by ``state``, weighted by |amplitude|^2.

    For a correlated state ``sum_k a_k |k>|k>`` this is the non-entangled
    mixture ``sum_k |a_k|^2 |k><k| (x) |k><k|`` that every sub-systemic
    measurement sees.
    """
    components = []
    for index in range(state.dim):
        weight = float(abs(state.amplitudes[index]) ** 2)
        if weight == 0.0:
            continue
        amps = np.zeros(state.dim, dtype=complex)
        amps[index] = 1.0
        components.append(MixtureComponent(weight, StateVector(state.subsystems, amps)))
    total = sum(c.weight for c in components)
    components = [MixtureComponent(c.weight / total, c.state) for c in components]
    return mix(components)
