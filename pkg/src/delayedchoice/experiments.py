"""End-to-end scenarios: the atom variant, Wheeler's arrangement, Marshall's mirror."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import analysis
from .atom import CHOICE_TIMES, AtomLevel, SuperSystemState, interact, prepare_atom
from .detection import (
    DetectionRecord,
    PlateKind,
    ScreenModel,
    pdf_visibility,
    position_pdf,
    reduced_path_states,
    sample_counts,
    sample_detections,
    visibility,
)
from .errors import ConfigError
from .hilbert import (
    DensityOperator,
    StateVector,
    density_from_pure,
    ket,
    partial_trace,
    tensor,
)
from .optics import apply_circuit, interferometer, single_path, split_arms

SCENARIOS = ("paper_variant", "wheeler", "marshall")
INPUTS = ("split", "path_1", "path_2")
PHOTON = "i"
MIRROR = "m"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    shots: int
    seed: int
    atom_level: AtomLevel | None = None
    plate: PlateKind = PlateKind.FIXED
    interferometer_closed: bool | None = None
    phi: float = 0.0
    mirror_overlap: float | None = None
    choice_time: str = "in_flight"
    bins: int = 64
    fringe_period: float = 1.0
    input: str = "split"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario: must be one of {SCENARIOS}, got {self.scenario!r}")
        if isinstance(self.shots, bool) or int(self.shots) != self.shots or self.shots < 1:
            raise ConfigError(f"shots: must be a positive integer, got {self.shots!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed: must be a non-negative integer, got {self.seed!r}")
        if self.choice_time not in CHOICE_TIMES:
            raise ConfigError(f"choice_time: must be one of {CHOICE_TIMES}")
        if self.input not in INPUTS:
            raise ConfigError(f"input: must be one of {INPUTS}, got {self.input!r}")
        try:
            object.__setattr__(self, "plate", PlateKind(self.plate))
        except ValueError:
            raise ConfigError(f"plate: must be fixed or movable, got {self.plate!r}") from None
        try:
            ScreenModel(self.bins, self.fringe_period)
        except ValueError as exc:
            raise ConfigError(f"screen: {exc}") from None
        if not np.isfinite(self.phi):
            raise ConfigError("phi: must be finite")

        if self.scenario == "paper_variant":
            if self.atom_level is None:
                raise ConfigError("atom_level: required for the paper_variant scenario")
            try:
                object.__setattr__(self, "atom_level", AtomLevel(self.atom_level))
            except ValueError:
                raise ConfigError(f"atom_level: unknown level {self.atom_level!r}") from None
        elif self.atom_level is not None:
            raise ConfigError(f"atom_level: only valid for paper_variant, not {self.scenario}")

        if self.scenario == "wheeler":
            if self.interferometer_closed is None:
                object.__setattr__(self, "interferometer_closed", False)
            if self.interferometer_closed and self.plate is PlateKind.MOVABLE:
                raise ConfigError(
                    "interferometer_closed: a closed interferometer has no plate; "
                    "plate kind movable contradicts it"
                )
        elif self.interferometer_closed is not None:
            raise ConfigError(f"interferometer_closed: only valid for wheeler, not {self.scenario}")

        if self.scenario == "marshall":
            if self.mirror_overlap is None:
                raise ConfigError("overlap: required for the marshall scenario")
            if not 0.0 <= self.mirror_overlap <= 1.0:
                raise ConfigError(f"overlap: must lie in [0, 1], got {self.mirror_overlap!r}")
        elif self.mirror_overlap is not None:
            raise ConfigError(f"overlap: only valid for marshall, not {self.scenario}")

        if self.input != "split" and self.scenario != "paper_variant":
            raise ConfigError("input: single-path input is only available for paper_variant")

    @property
    def screen(self) -> ScreenModel:
        return ScreenModel(self.bins, self.fringe_period)


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    config: ExperimentConfig
    record: DetectionRecord
    photon_count: int
    exact_tables: dict[str, np.ndarray]
    visibility: float | None = None
    visibility_stderr: float | None = None
    visibility_exact: float | None = None
    reduced_rho_i: DensityOperator | None = None
    reduced_rho_n: DensityOperator | None = None
    witness_value: float | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def count_ratio(self) -> float:
        return self.record.total_detections / self.record.shots

    @property
    def exact_intensity(self) -> np.ndarray:
        """Expected detections per shot and bin (sums to the photon count)."""
        return self.exact_tables["intensity"]

    def to_dict(self) -> dict[str, Any]:
        cfg = self.config
        out = {
            "scenario": cfg.scenario,
            "atom_level": cfg.atom_level.value if cfg.atom_level else None,
            "plate": cfg.plate.value,
            "phi": float(cfg.phi),
            "s": cfg.mirror_overlap,
            "shots": cfg.shots,
            "seed": cfg.seed,
            "choice_time": cfg.choice_time,
            "interferometer_closed": cfg.interferometer_closed,
            "input": cfg.input,
            "bins": cfg.bins,
            "fringe_period": float(cfg.fringe_period),
            "photon_count": self.photon_count,
            "total_detections": self.record.total_detections,
            "count_ratio": self.count_ratio,
            "visibility": self.visibility,
            "visibility_stderr": self.visibility_stderr,
            "visibility_exact": self.visibility_exact,
            "reduced_rho_i": _matrix_json(self.reduced_rho_i),
            "reduced_rho_n": _matrix_json(self.reduced_rho_n),
            "witness_value": self.witness_value,
        }
        out.update(_jsonable(self.diagnostics))
        return out


def _matrix_json(rho: DensityOperator | None):
    if rho is None:
        return None
    return [[[float(z.real), float(z.imag)] for z in row] for row in rho.matrix]


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, DensityOperator):
        return _matrix_json(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _expected_intensity(state: SuperSystemState, config: ExperimentConfig) -> np.ndarray:
    tables = [position_pdf(rho, config.screen, config.plate) for rho in reduced_path_states(state)]
    return np.sum(tables, axis=0)


def _require(config: ExperimentConfig, scenario: str):
    if config.scenario != scenario:
        raise ConfigError(f"scenario: expected {scenario}, got {config.scenario}")


def prepared_photon(config: ExperimentConfig) -> StateVector:
    """Photon path state just before the atom (or the plate)."""
    if config.input == "split":
        return apply_circuit(single_path(1, PHOTON), split_arms(config.phi))
    mode = 1 if config.input == "path_1" else 2
    return apply_circuit(single_path(mode, PHOTON), split_arms(config.phi)[1:])


def run_paper_variant(config: ExperimentConfig) -> ExperimentReport:
    _require(config, "paper_variant")
    photon = prepared_photon(config)
    atom = prepare_atom(config.atom_level, config.choice_time)
    out = interact(photon, atom)
    screen = config.screen

    intensity = _expected_intensity(out, config)
    record = sample_detections(out, screen, config.plate, config.shots, config.seed)
    v, err = visibility(record)

    diagnostics: dict[str, Any] = {}
    rhos = reduced_path_states(out)
    rho_i = rhos[0]
    rho_n = rhos[1] if out.photon_count == 2 else None
    witness = None
    if out.photon_count == 2:
        mixture = analysis.second_kind_mixture(out.state)
        witness = analysis.super_systemic_witness(density_from_pure(out.state), out.state)
        schmidt = analysis.schmidt_decompose(out.state, (PHOTON, "n"))
        diagnostics.update(
            {
                "witness_mixture_value": analysis.super_systemic_witness(mixture, out.state),
                "subsystem_equivalent": analysis.subsystem_equivalence_check(out.state, mixture),
                "entanglement_entropy": analysis.entanglement_entropy(out.state, (PHOTON, "n")),
                "schmidt_coefficients": schmidt.coefficients,
                "schmidt_rank": schmidt.rank,
                "purity_rho_i": analysis.purity(rho_i),
                "purity_rho_n": analysis.purity(rho_n),
                "purity_mixture": analysis.purity(mixture),
                "mixture_rho_in": mixture,
            }
        )
    if config.atom_level is AtomLevel.GROUND:
        diagnostics["notes"] = ["ground level has no prescribed interaction; treated as identity"]

    return ExperimentReport(
        config=config,
        record=record,
        photon_count=out.photon_count,
        exact_tables={"intensity": intensity},
        visibility=v,
        visibility_stderr=err,
        visibility_exact=pdf_visibility(intensity, screen),
        reduced_rho_i=rho_i,
        reduced_rho_n=rho_n,
        witness_value=witness,
        diagnostics=diagnostics,
    )


def port_probabilities(phi: float) -> np.ndarray:
    """Output-port probabilities of the closed interferometer fed in mode 1."""
    out = apply_circuit(single_path(1, PHOTON), interferometer(phi))
    return out.probabilities()


def run_wheeler(config: ExperimentConfig) -> ExperimentReport:
    _require(config, "wheeler")
    if config.interferometer_closed:
        probs = port_probabilities(config.phi)
        counts = sample_counts(probs, config.shots, config.seed, (0, 0))
        record = DetectionRecord(counts, [1.0, 2.0], config.shots, config.seed)
        return ExperimentReport(
            config=config,
            record=record,
            photon_count=1,
            exact_tables={"intensity": probs},
            diagnostics={"port_probabilities": probs},
        )

    photon = prepared_photon(config)
    out = SuperSystemState(photon, 1)
    intensity = _expected_intensity(out, config)
    record = sample_detections(out, config.screen, config.plate, config.shots, config.seed)
    v, err = visibility(record)
    return ExperimentReport(
        config=config,
        record=record,
        photon_count=1,
        exact_tables={"intensity": intensity},
        visibility=v,
        visibility_stderr=err,
        visibility_exact=pdf_visibility(intensity, config.screen),
        reduced_rho_i=density_from_pure(photon),
    )


def mirror_correlation(overlap: float) -> np.ndarray:
    """Controlled map |k>|m0> -> |k>|m_k> on (photon, mirror), with <m_1|m_2> = overlap."""
    c = overlap
    sn = np.sqrt(max(1.0 - c * c, 0.0))
    rotation = np.array([[c, -sn], [sn, c]], dtype=complex)
    return np.block(
        [[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), rotation]]
    ).astype(complex)


def run_marshall(config: ExperimentConfig) -> ExperimentReport:
    _require(config, "marshall")
    screen = config.screen
    photon = prepared_photon(config)
    joint = tensor(photon, ket(MIRROR, 1))
    coupling = mirror_correlation(config.mirror_overlap)
    # canonical order is (i, m): photon index is the control
    correlated = StateVector(joint.subsystems, coupling @ joint.amplitudes)
    released = StateVector(joint.subsystems, coupling.conj().T @ correlated.amplitudes)

    epochs = {}
    tables = {}
    records = {}
    rhos = {}
    for stream, (epoch, state) in enumerate(
        (("sub_period", correlated), ("full_period", released))
    ):
        rho = partial_trace(density_from_pure(state), PHOTON)
        pdf = position_pdf(rho, screen, config.plate)
        counts = sample_counts(pdf, config.shots, config.seed, (stream, 0))
        rec = DetectionRecord(
            counts, screen.bin_centers(), config.shots, config.seed, screen.fringe_period
        )
        v, err = visibility(rec)
        epochs[epoch] = {
            "visibility_exact": pdf_visibility(pdf, screen),
            "visibility": v,
            "visibility_stderr": err,
            "total_detections": rec.total_detections,
        }
        tables[epoch] = pdf
        records[epoch] = rec
        rhos[epoch] = rho

    tables["intensity"] = tables["sub_period"]
    sub = epochs["sub_period"]
    return ExperimentReport(
        config=config,
        record=records["sub_period"],
        photon_count=1,
        exact_tables=tables,
        visibility=sub["visibility"],
        visibility_stderr=sub["visibility_stderr"],
        visibility_exact=sub["visibility_exact"],
        reduced_rho_i=rhos["sub_period"],
        diagnostics={
            "epochs": epochs,
            "reduced_rho_i_full_period": rhos["full_period"],
            "mirror_entanglement_entropy": analysis.entanglement_entropy(
                correlated, (PHOTON, MIRROR)
            ),
        },
    )


RUNNERS = {
    "paper_variant": run_paper_variant,
    "wheeler": run_wheeler,
    "marshall": run_marshall,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    return RUNNERS[config.scenario](config)


@dataclass(frozen=True, eq=False)
class ChoiceInvarianceReport:
    passed: bool
    tables: dict[str, dict[str, np.ndarray]]
    records_identical: bool


def choice_invariance_check(config: ExperimentConfig) -> ChoiceInvarianceReport:
    """Rerun ``config`` at every choice time and compare the exact tables bit for bit.

    The choice time is carried as metadata only, so every table must match
    exactly, not merely within sampling error.
    """
    reports = {
        t: run_experiment(dataclasses.replace(config, choice_time=t)) for t in CHOICE_TIMES
    }
    tables = {t: r.exact_tables for t, r in reports.items()}
    first = tables[CHOICE_TIMES[0]]
    tables_equal = all(
        set(tab) == set(first) and all(np.array_equal(tab[k], first[k]) for k in first)
        for tab in tables.values()
    )
    ref = reports[CHOICE_TIMES[0]].record
    records_equal = all(r.record == ref for r in reports.values())
    return ChoiceInvarianceReport(tables_equal and records_equal, tables, records_equal)
