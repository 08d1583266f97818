"""The singly-excited spin wave: per-atom weights and phases, transverse
mode estimation, and retrieval-efficiency composition.

The stored excitation carries one weight and one phase per atom.  The
transverse mode U(x, y, t) is the weight-squared distribution estimated on
a grid with a Gaussian kernel; retrieval is scored by the Bhattacharyya
overlap squared,

    R(dT) = ( sum_cells sqrt(U0) sqrt(Ut) * cell_area )^2,

composed multiplicatively with a dephasing exponential and the measured
double-exponential atom survival.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import gaussian_filter

from .constants import CONSTANTS, PhysicalConstants
from .errors import EmptyModeError, GridCoverageError


@dataclass(frozen=True)
class ModeSpec:
    """Gaussian optical mode: 130 um signal / 550 um write-read diameters
    are 1/e^2 intensity diameters, so the field waist is half of those."""

    center: tuple[float, float] = (0.0, 0.0)  # m, transverse (x, y)
    waist_w0: float = 65e-6                   # m
    wavelength: float = CONSTANTS.lambda_D2   # m

    def __post_init__(self):
        if self.waist_w0 <= 0:
            raise ValueError("waist_w0 must be positive")


@dataclass
class SpinWaveRecord:
    """Weights (sum w^2 = 1), accumulated phases (rad), and the spin-wave
    wave vector delta_k (rad/m)."""

    weights: np.ndarray
    phases: np.ndarray
    delta_k: np.ndarray
    creation_time: float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.phases = np.asarray(self.phases, dtype=float)
        self.delta_k = np.asarray(self.delta_k, dtype=float)
        if self.weights.shape != self.phases.shape:
            raise ValueError("weights and phases must have equal shapes")

    @property
    def n_atoms(self) -> int:
        return len(self.weights)

    def effective_atom_number(self) -> float:
        """Participation number 1 / sum(w^4) of the normalized weights."""
        return 1.0 / float(np.sum(self.weights**4))


def spinwave_wavevector(write_k, signal_k):
    """delta_k = write_k - signal_k and the spin-wave wavelength 2 pi/|delta_k|.

    Degenerate wave vectors give wavelength = inf.
    """
    write_k = np.asarray(write_k, dtype=float)
    signal_k = np.asarray(signal_k, dtype=float)
    if not (np.all(np.isfinite(write_k)) and np.all(np.isfinite(signal_k))):
        raise ValueError("wave vectors must be finite")
    delta_k = write_k - signal_k
    norm = float(np.linalg.norm(delta_k))
    wavelength = math.inf if norm == 0.0 else 2.0 * math.pi / norm
    return delta_k, wavelength


def collinear_delta_k(constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    """delta_k for collinear beams split by the clock frequency (along z)."""
    return np.array([0.0, 0.0, 2.0 * math.pi * constants.nu_hf / constants.c])


def assign_excitation(positions: np.ndarray, signal: ModeSpec,
                      write: ModeSpec | None = None,
                      delta_k: np.ndarray | None = None,
                      creation_time: float = 0.0) -> SpinWaveRecord:
    """Create the spin wave: raw weight exp(-|r_perp - center|^2 / w0^2)
    from the signal mode, then normalized; all phases zero.

    The much larger write mode (default 275 um waist) varies by < 6% over
    the signal waist and is treated as uniform.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    if len(positions) == 0:
        raise ValueError("at least one atom is required")
    d2 = ((positions[:, 0] - signal.center[0]) ** 2
          + (positions[:, 1] - signal.center[1]) ** 2)
    raw = np.exp(-d2 / signal.waist_w0**2)
    if np.max(raw) < 1e-30:
        raise EmptyModeError("signal mode does not overlap the atomic cloud")
    weights = raw / np.sqrt(np.sum(raw**2))
    if delta_k is None:
        delta_k = collinear_delta_k()
    return SpinWaveRecord(weights, np.zeros_like(weights), delta_k,
                          creation_time)


def evolve_phases(record: SpinWaveRecord, positions: np.ndarray,
                  field, dt: float) -> SpinWaveRecord:
    """Advance phases along trajectories sampled at uniform dt.

    phi_1 is incremented by the trapezoidal integral of delta_omega(r_j)
    and phi_2 by delta_k . (r_j(end) - r_j(start)).  Weights are unchanged.
    ``positions`` has shape (n_times, n_atoms, 3); ``field`` may be None
    for a dark (compensated-to-zero) trap.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 3 or positions.shape[1] != record.n_atoms:
        raise ValueError("trajectory atom count does not match the record")
    phases = record.phases.copy()
    if field is not None and positions.shape[0] > 1:
        rho = np.hypot(positions[..., 0], positions[..., 1])
        omega = field.at_radius(rho)
        phases += np.sum(0.5 * (omega[1:] + omega[:-1]), axis=0) * dt
    phases += (positions[-1] - positions[0]) @ record.delta_k
    return replace(record, phases=phases)


def phase_coherence(record: SpinWaveRecord) -> float:
    """Weighted coherence |sum w^2 exp(i phi)| of the stored excitation."""
    return float(np.abs(np.sum(record.weights**2 * np.exp(1j * record.phases))))


@dataclass
class DensityGrid:
    """Discretized transverse distribution, unit integral over the grid."""

    extent: float                # m, half-width; grid spans [-extent, extent]
    resolution: int              # cells per axis
    values: np.ndarray           # (resolution, resolution), index [ix, iy]

    @property
    def cell_size(self) -> float:
        return 2.0 * self.extent / self.resolution

    @property
    def cell_area(self) -> float:
        return self.cell_size**2

    def centers(self) -> np.ndarray:
        return (-self.extent + self.cell_size * (np.arange(self.resolution) + 0.5))

    def same_grid(self, other: "DensityGrid") -> bool:
        return (self.resolution == other.resolution
                and math.isclose(self.extent, other.extent, rel_tol=1e-12))

    def second_moments(self) -> tuple[float, float]:
        """Variance of the distribution along x and y (m^2)."""
        c = self.centers()
        px = self.values.sum(axis=1) * self.cell_area
        py = self.values.sum(axis=0) * self.cell_area
        mx = np.sum(c * px) / np.sum(px)
        my = np.sum(c * py) / np.sum(py)
        return (float(np.sum((c - mx) ** 2 * px) / np.sum(px)),
                float(np.sum((c - my) ** 2 * py) / np.sum(py)))


def density_estimate(weights: np.ndarray, positions_xy: np.ndarray,
                     extent: float = 150e-6, resolution: int = 128,
                     bandwidth: float = 10e-6,
                     max_outside: float = 0.01) -> DensityGrid:
    """Kernel density estimate of the w^2 distribution on a square grid.

    Cloud-in-cell deposition followed by an isotropic Gaussian blur of
    standard deviation ``bandwidth`` (zero-padded boundaries), then
    normalization to unit integral.  Deterministic for fixed inputs.
    """
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    weights = np.asarray(weights, dtype=float)
    positions_xy = np.asarray(positions_xy, dtype=float)
    mass = weights**2
    total = float(np.sum(mass))
    if total <= 0:
        raise ValueError("total weight must be positive")

    inside = (np.abs(positions_xy[:, 0]) < extent) \
        & (np.abs(positions_xy[:, 1]) < extent)
    if float(np.sum(mass[~inside])) > max_outside * total:
        raise GridCoverageError(
            "more than {:.0%} of the excitation weight lies outside the grid"
            .format(max_outside))

    cell = 2.0 * extent / resolution
    # fractional index of the lower-left neighboring cell center
    fx = (positions_xy[inside, 0] + extent) / cell - 0.5
    fy = (positions_xy[inside, 1] + extent) / cell - 0.5
    ix = np.floor(fx).astype(np.int64)
    iy = np.floor(fy).astype(np.int64)
    tx = fx - ix
    ty = fy - iy

    grid = np.zeros((resolution, resolution))
    m = mass[inside]
    for dx, wx in ((0, 1.0 - tx), (1, tx)):
        for dy, wy in ((0, 1.0 - ty), (1, ty)):
            gx = np.clip(ix + dx, 0, resolution - 1)
            gy = np.clip(iy + dy, 0, resolution - 1)
            np.add.at(grid, (gx, gy), m * wx * wy)

    grid = gaussian_filter(grid, sigma=bandwidth / cell, mode="constant",
                           truncate=8.0)
    grid /= grid.sum() * cell * cell
    return DensityGrid(extent, resolution, grid)


def mode_overlap(u0: DensityGrid, ut: DensityGrid) -> float:
    """Squared Bhattacharyya overlap of two distributions on the same grid."""
    if not u0.same_grid(ut):
        raise ValueError("grids do not match")
    bc = float(np.sum(np.sqrt(u0.values) * np.sqrt(ut.values)) * u0.cell_area)
    return bc**2


def atom_survival(t, fast_fraction: float = 0.5, tau_fast: float = 0.16,
                  tau_slow: float = 0.58):
    """Double-exponential trap survival S(t); S(0) = 1.  Vectorized."""
    if not 0.0 <= fast_fraction <= 1.0:
        raise ValueError("fast_fraction must lie in [0, 1]")
    if tau_fast <= 0 or tau_slow <= 0:
        raise ValueError("time constants must be positive")
    t = np.asarray(t, dtype=float)
    return (fast_fraction * np.exp(-t / tau_fast)
            + (1.0 - fast_fraction) * np.exp(-t / tau_slow))


@dataclass
class EfficiencyCurve:
    """Per-time overlap, dephasing, and loss factors; total is their
    product, normalized to the first time point."""

    times: np.ndarray
    overlap: np.ndarray
    dephasing: np.ndarray
    loss: np.ndarray
    total: np.ndarray


def efficiency_total(times, overlap, tau_dephase: float = 28e-3,
                     fast_fraction: float = 0.5, tau_fast: float = 0.16,
                     tau_slow: float = 0.58) -> EfficiencyCurve:
    """Compose total(t) = overlap(t) * exp(-t/tau_dephase) * S(t), each
    factor normalized to its value at the first time point."""
    if tau_dephase <= 0:
        raise ValueError("tau_dephase must be positive")
    times = np.asarray(times, dtype=float)
    overlap = np.asarray(overlap, dtype=float)
    if np.any(overlap < 0) or np.any(overlap > 1.0 + 1e-9):
        raise ValueError("overlap values must lie in [0, 1]")
    dephasing = np.exp(-times / tau_dephase)
    loss = atom_survival(times, fast_fraction, tau_fast, tau_slow)
    overlap = overlap / overlap[0]
    dephasing = dephasing / dephasing[0]
    loss = loss / loss[0]
    return EfficiencyCurve(times, overlap, dephasing, loss,
                           overlap * dephasing * loss)
