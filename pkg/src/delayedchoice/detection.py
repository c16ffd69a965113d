"""Photo-plate model: exact position distributions, seeded sampling, visibility.

The screen spans one fringe period.  A bin centred at ``x`` (in period units)
receives intensity proportional to ``1 + 2 Re(rho_12 exp(2 pi i x))`` where
``rho_12`` is the path coherence of the photon hitting the plate.

Sampling uses NumPy's PCG64 generator.  Shots are cut into fixed-size blocks
and block ``b`` of photon ``j`` draws from
``SeedSequence(seed, spawn_key=(stream, j, b))``, so a record depends only on
its inputs and not on how blocks are spread over workers.
"""

from __future__ import annotations

import enum
import io
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .atom import SuperSystemState
from .errors import EstimationError, InvariantError
from .hilbert import DensityOperator, density_from_pure, dephase, partial_trace

BLOCK_SHOTS = 1 << 16
MIN_FIT_BINS = 8
MIN_FIT_DETECTIONS = 1000


class PlateKind(str, enum.Enum):
    FIXED = "fixed"
    MOVABLE = "movable"


@dataclass(frozen=True)
class ScreenModel:
    bins: int = 64
    fringe_period: float = 1.0

    def __post_init__(self):
        if int(self.bins) != self.bins or self.bins < MIN_FIT_BINS:
            raise InvariantError(f"screen needs an integer bins >= {MIN_FIT_BINS}, got {self.bins}")
        if not self.fringe_period > 0:
            raise InvariantError(f"fringe_period must be positive, got {self.fringe_period}")

    def unit_centers(self) -> np.ndarray:
        """Bin centres in period units, inside [0, 1)."""
        return (np.arange(self.bins) + 0.5) / self.bins

    def bin_centers(self) -> np.ndarray:
        return self.unit_centers() * self.fringe_period


@dataclass(frozen=True, eq=False)
class DetectionRecord:
    counts: np.ndarray
    bin_centers: np.ndarray
    shots: int
    seed: int
    fringe_period: float = 1.0
    total_detections: int = field(init=False)

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        centers = np.array(self.bin_centers, dtype=float)
        if counts.shape != centers.shape:
            raise InvariantError("counts and bin_centers differ in length")
        if np.any(counts < 0):
            raise InvariantError("negative detection count")
        counts.flags.writeable = False
        centers.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "bin_centers", centers)
        object.__setattr__(self, "total_detections", int(counts.sum()))

    @property
    def histogram(self) -> list[tuple[int, int]]:
        return [(b, int(c)) for b, c in enumerate(self.counts)]

    def __eq__(self, other):
        if not isinstance(other, DetectionRecord):
            return NotImplemented
        return (
            self.shots == other.shots
            and self.seed == other.seed
            and self.fringe_period == other.fringe_period
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.bin_centers, other.bin_centers)
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("bin_center,count\n")
        for x, c in zip(self.bin_centers, self.counts):
            buf.write(f"{float(x)!r},{int(c)}\n")
        return buf.getvalue()


def _path_coherence(rho_path: DensityOperator) -> complex:
    if not isinstance(rho_path, DensityOperator) or rho_path.dims != (2,):
        raise InvariantError("position_pdf needs a 2x2 path density operator")
    return complex(rho_path.matrix[0, 1])


def position_pdf(
    rho_path: DensityOperator,
    screen: ScreenModel = ScreenModel(),
    plate: PlateKind | str = PlateKind.FIXED,
) -> np.ndarray:
    """Probability of each screen bin for one photon described by ``rho_path``."""
    if PlateKind(plate) is PlateKind.MOVABLE:
        # the recoiling plate records which path the photon took
        rho_path = dephase(rho_path)
    rho12 = _path_coherence(rho_path)
    x = screen.unit_centers()
    weights = 1.0 + 2.0 * np.real(rho12 * np.exp(2j * np.pi * x))
    weights = np.clip(weights, 0.0, None)
    return weights / weights.sum()


def reduced_path_states(state: SuperSystemState) -> list[DensityOperator]:
    """One density operator per photon, in subsystem order."""
    rho = density_from_pure(state.state)
    if state.photon_count == 1:
        return [rho]
    return [partial_trace(rho, name) for name in state.photons]


def sample_counts(
    pdf: np.ndarray,
    shots: int,
    seed: int,
    stream: tuple[int, ...] = (0,),
    workers: int = 1,
) -> np.ndarray:
    """Histogram of ``shots`` independent draws from ``pdf``."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    pdf = np.asarray(pdf, dtype=float)
    pdf = pdf / pdf.sum()
    n_blocks = -(-shots // BLOCK_SHOTS)

    def block(b: int) -> np.ndarray:
        n = min(BLOCK_SHOTS, shots - b * BLOCK_SHOTS)
        ss = np.random.SeedSequence(seed, spawn_key=tuple(stream) + (b,))
        return np.random.Generator(np.random.PCG64(ss)).multinomial(n, pdf)

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, range(n_blocks)))
    else:
        parts = [block(b) for b in range(n_blocks)]
    return np.sum(parts, axis=0).astype(np.int64)


def sample_detections(
    state: SuperSystemState,
    screen: ScreenModel,
    plate: PlateKind | str,
    shots: int,
    seed: int,
    stream: int = 0,
    workers: int = 1,
) -> DetectionRecord:
    """Seeded Monte Carlo detections on the plate.

    Each shot contributes one detection per photon.  With two photons the
    positions are drawn independently from the two reduced states.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    counts = np.zeros(screen.bins, dtype=np.int64)
    for j, rho in enumerate(reduced_path_states(state)):
        pdf = position_pdf(rho, screen, plate)
        counts += sample_counts(pdf, shots, seed, (stream, j), workers)
    return DetectionRecord(counts, screen.bin_centers(), shots, seed, screen.fringe_period)


def fit_visibility(x: np.ndarray, intensity: np.ndarray) -> tuple[float, float]:
    """Least-squares fit of ``A (1 + V cos(2 pi x + delta))``.

    ``x`` is in period units.  Returns ``(V, stderr)`` with V clamped to
    [0, 1]; the error comes from the residual scatter of the fit.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(intensity, dtype=float)
    if x.size < MIN_FIT_BINS:
        raise EstimationError(f"visibility fit needs at least {MIN_FIT_BINS} bins, got {x.size}")
    design = np.column_stack([np.ones_like(x), np.cos(2 * np.pi * x), np.sin(2 * np.pi * x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    a, b, c = coef
    if a <= 0:
        raise EstimationError("fitted mean intensity is not positive")
    r = float(np.hypot(b, c))
    v = r / a

    resid = y - design @ coef
    dof = max(x.size - 3, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    if r > 0:
        grad = np.array([-r / a**2, b / (r * a), c / (r * a)])
        var = float(grad @ cov @ grad)
    else:
        var = float(cov[1, 1] + cov[2, 2]) / (2 * a**2)
    return float(min(max(v, 0.0), 1.0)), float(np.sqrt(max(var, 0.0)))


def visibility(record: DetectionRecord) -> tuple[float, float]:
    if record.counts.size < MIN_FIT_BINS:
        raise EstimationError(
            f"visibility fit needs at least {MIN_FIT_BINS} bins, got {record.counts.size}"
        )
    if record.total_detections < MIN_FIT_DETECTIONS:
        warnings.warn(
            f"only {record.total_detections} detections; visibility estimate is unreliable",
            stacklevel=2,
        )
    return fit_visibility(record.bin_centers / record.fringe_period, record.counts)


def pdf_visibility(pdf: np.ndarray, screen: ScreenModel) -> float:
    """Visibility of a noiseless probability table."""
    return fit_visibility(screen.unit_centers(), pdf)[0]


def record_summary(record: DetectionRecord) -> dict:
    v, err = visibility(record)
    return {
        "shots": record.shots,
        "seed": record.seed,
        "total_detections": record.total_detections,
        "visibility": v,
        "visibility_stderr": err,
    }
