"""Differential light shift of the clock transition, compensation-beam
optimization, and microscopic ensemble dephasing.

The trap light is treated in the far-detuned two-level (D2-only) limit, so
the differential shift of the hyperfine clock transition is

    delta_omega = (U / hbar) * (omega_hf / Delta)

with U the local optical potential and Delta the trap detuning from the D2
line.  A compensation beam parked midway between the two ground hyperfine
components (detunings +/- omega_hf/2) produces an opposite-signed shift;
with identical spatial modes the cancellation condition gives

    P_comp = P_trap * (omega_hf / (2 Delta))^2.

The D1 contribution at 775 nm is ~7% in 1/Delta^2 and is dropped.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .ensemble import DEFAULT_DT, AtomEnsemble, propagate, sample_thermal_ensemble
from .errors import CalibrationError, NearResonanceError
from .geometry import RingPotential, TrapGeometry, potential_at

GAMMA_D2 = 2.0 * math.pi * 6.0666e6  # rad/s, 87Rb D2 natural linewidth


@dataclass(frozen=True)
class CompensationSpec:
    """Trap beam plus a weak compensation beam tuned midway between the
    ground hyperfine components of the D2 line."""

    trap_power: float = 1.9            # W
    trap_wavelength: float = 775e-9    # m
    comp_power: float = 0.0            # W (0 = to be determined)
    residual_fraction: float = 0.01    # relative intensity-control imperfection

    def __post_init__(self):
        if not 0.0 <= self.residual_fraction <= 1.0:
            raise ValueError("residual_fraction must lie in [0, 1]")
        if self.trap_power < 0:
            raise ValueError("trap_power must be non-negative")


def trap_detuning(wavelength: float,
                  constants: PhysicalConstants = CONSTANTS) -> float:
    """Angular detuning (rad/s) of the trap light from the D2 line."""
    return 2.0 * math.pi * (constants.c / wavelength
                            - constants.c / constants.lambda_D2)


def differential_shift(U: float, constants: PhysicalConstants = CONSTANTS,
                       detuning: float = trap_detuning(775e-9)):
    """Differential clock-transition shift (rad/s) for potential energy U (J).

    Linear in U; positive (|F=2> raised relative to |F=1>) inside
    blue-detuned light.  Vectorized over U.
    """
    if detuning == 0:
        raise ValueError("detuning must be non-zero")
    return (np.asarray(U, dtype=float) / constants.hbar) \
        * (constants.omega_hf / detuning)


def optimal_compensation_power(spec: CompensationSpec,
                               constants: PhysicalConstants = CONSTANTS) -> float:
    """Compensation-beam power (W) that cancels the trap's differential shift,
    assuming identical spatial modes."""
    delta = trap_detuning(spec.trap_wavelength, constants)
    if delta <= 0:
        raise ValueError("trap wavelength must be blue of the D2 line")
    if spec.trap_wavelength > constants.lambda_D2 * 0.99 \
            and abs(delta) < 10.0 * GAMMA_D2:
        raise NearResonanceError(
            "trap within 10 linewidths of the D2 line; far-detuned model invalid")
    return spec.trap_power * (constants.omega_hf / (2.0 * delta)) ** 2


def residual_lifetime(tau_uncompensated: float, epsilon: float) -> float:
    """Dephasing time with a residual shift fraction epsilon: tau0 / epsilon.

    epsilon = 0 (perfect compensation) returns math.inf.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if tau_uncompensated <= 0:
        raise ValueError("tau_uncompensated must be positive")
    if epsilon == 0.0:
        return math.inf
    return tau_uncompensated / epsilon


@dataclass(frozen=True)
class ShiftField:
    """Transverse map r -> delta_omega(r) (rad/s) built from the ring
    potential; ``epsilon`` scales it for compensated operation."""

    ring: RingPotential
    detuning: float = trap_detuning(775e-9)
    epsilon: float = 1.0
    constants: PhysicalConstants = CONSTANTS

    def at_radius(self, rho):
        U = potential_at(rho, self.ring) * self.constants.k_B
        return self.epsilon * differential_shift(U, self.constants, self.detuning)

    def at(self, xy):
        xy = np.asarray(xy, dtype=float)
        return self.at_radius(np.hypot(xy[..., 0], xy[..., 1]))

    def with_epsilon(self, epsilon: float) -> "ShiftField":
        return replace(self, epsilon=epsilon)


def ensemble_coherence(positions: np.ndarray, field: ShiftField,
                       times: np.ndarray) -> np.ndarray:
    """|<exp(i phi_1)>| over the ensemble for trajectories sampled at the
    uniform grid ``times``; phases use the trapezoidal rule.  C(0) = 1.

    ``positions`` has shape (n_times, n_atoms, >=2).
    """
    positions = np.asarray(positions, dtype=float)
    times = np.asarray(times, dtype=float)
    if positions.ndim != 3 or positions.shape[1] == 0:
        raise ValueError("positions must be (n_times, n_atoms, >=2) with atoms")
    if positions.shape[0] != len(times):
        raise ValueError("positions and times lengths differ")
    rho = np.hypot(positions[..., 0], positions[..., 1])
    omega = field.at_radius(rho)                      # (n_times, n_atoms)
    dt = np.diff(times)[:, None]
    phi = np.zeros_like(omega)
    phi[1:] = np.cumsum(0.5 * (omega[1:] + omega[:-1]) * dt, axis=0)
    return np.abs(np.exp(1j * phi).mean(axis=1))


def one_over_e_time(times: np.ndarray, values: np.ndarray) -> float:
    """First crossing of 1/e, linearly interpolated; inf if never crossed."""
    target = 1.0 / math.e
    below = np.flatnonzero(values < target)
    if below.size == 0:
        return math.inf
    i = below[0]
    if i == 0:
        return float(times[0])
    t0, t1 = times[i - 1], times[i]
    v0, v1 = values[i - 1], values[i]
    return float(t0 + (v0 - target) / (v0 - v1) * (t1 - t0))


def simulate_coherence(
    field: ShiftField,
    trap: TrapGeometry,
    n_atoms: int = 10_000,
    temperature: float = 15e-6,
    t_max: float = 3e-3,
    sample_dt: float = 2e-5,
    dt: float = DEFAULT_DT,
    gravity: float = CONSTANTS.g_earth,
    seed: int = 0,
    constants: PhysicalConstants = CONSTANTS,
    ensemble: AtomEnsemble | None = None,
):
    """Monte-Carlo dephasing curve C(t) of a thermal ensemble in the trap.

    Streams phase accumulation step by step (memory O(n_atoms)), so long
    storage times are cheap.  Returns (times, C).
    """
    if ensemble is None:
        ensemble = sample_thermal_ensemble(
            n_atoms, trap, temperature, gravity=gravity, seed=seed,
            constants=constants)
    times = np.arange(0.0, t_max + 0.5 * sample_dt, sample_dt)
    phi = np.zeros(len(ensemble))
    rho = np.hypot(ensemble.positions[:, 0], ensemble.positions[:, 1])
    omega_prev = field.at_radius(rho)
    coherence = np.empty(len(times))
    coherence[0] = 1.0
    current = ensemble
    for i in range(1, len(times)):
        current = propagate(current, times[i - 1], times[i], dt=dt, trap=trap,
                            gravity=gravity, constants=constants)
        rho = np.hypot(current.positions[:, 0], current.positions[:, 1])
        omega = field.at_radius(rho)
        phi += 0.5 * (omega + omega_prev) * (times[i] - times[i - 1])
        omega_prev = omega
        coherence[i] = np.abs(np.exp(1j * phi).mean())
    return times, coherence


def calibrate_wall_width(
    target_tau: float,
    ring: RingPotential,
    trap: TrapGeometry | None = None,
    n_atoms: int = 10_000,
    temperature: float = 15e-6,
    gravity: float = CONSTANTS.g_earth,
    seed: int = 0,
    detuning: float = trap_detuning(775e-9),
    constants: PhysicalConstants = CONSTANTS,
    bracket: tuple[float, float] = (5e-6, 60e-6),
    tol: float = 0.05,
    max_iter: int = 40,
) -> float:
    """Wall width whose microscopic dephasing 1/e time equals ``target_tau``.

    Bisection over ``bracket`` on the soft-walled trap built from the ring:
    the trajectories themselves depend on the candidate width, so each
    candidate re-runs the Monte-Carlo dephasing simulation (same seed, so
    the search is deterministic).  Monotonicity (thicker wall -> longer
    light exposure per bounce -> shorter tau) is verified at the bracket
    endpoints before bisecting, not assumed.

    The attainable 1/e times form a staircase: coherent revival dips of
    C(t) make its 1/e crossing hop between dips as the width grows.  When
    no width meets ``tol``, the candidate closest to the target is
    returned as long as it lies within ``2 * tol``; otherwise a
    CalibrationError reports the best achieved value.
    """
    if target_tau <= 0:
        raise ValueError("target_tau must be positive")

    sigma_v = math.sqrt(constants.k_B * temperature / constants.m_atom) \
        if temperature > 0 else 0.0

    def tau_of(width: float) -> float:
        cand_ring = replace(ring, wall_width=width)
        cand_trap = TrapGeometry(
            radius=cand_ring.ring_radius,
            length=trap.length if trap is not None else 3e-3,
            wall_model="soft", ring=cand_ring)
        fld = ShiftField(cand_ring, detuning=detuning, constants=constants)
        # soft-wall substep stability: resolve the wall in >= ~12 steps
        dt = min(DEFAULT_DT, 0.08 * width / (5.0 * sigma_v)) \
            if sigma_v > 0 else DEFAULT_DT
        times, c = simulate_coherence(
            fld, cand_trap, n_atoms=n_atoms, temperature=temperature,
            t_max=4.0 * target_tau, sample_dt=min(2e-5, target_tau / 30.0),
            dt=dt, gravity=gravity, seed=seed, constants=constants)
        return one_over_e_time(times, c)

    lo, hi = bracket
    tau_lo, tau_hi = tau_of(lo), tau_of(hi)
    if not tau_lo > tau_hi:
        raise CalibrationError(
            f"tau is not decreasing in wall width over the bracket: "
            f"tau({lo:g}) = {tau_lo:g} s, tau({hi:g}) = {tau_hi:g} s")
    if not tau_hi <= target_tau <= tau_lo:
        raise CalibrationError(
            f"target {target_tau:g} s outside the reachable range "
            f"[{tau_hi:g}, {tau_lo:g}] s for widths [{lo:g}, {hi:g}] m")

    best_width, best_err = hi, abs(tau_hi - target_tau)
    if abs(tau_lo - target_tau) < best_err:
        best_width, best_err = lo, abs(tau_lo - target_tau)
    for _ in range(max_iter):
        if hi - lo < 0.2e-6:
            break
        mid = 0.5 * (lo + hi)
        tau_mid = tau_of(mid)
        if abs(tau_mid - target_tau) <= tol * target_tau:
            return mid
        if abs(tau_mid - target_tau) < best_err:
            best_width, best_err = mid, abs(tau_mid - target_tau)
        if tau_mid > target_tau:
            lo = mid         # need a thicker wall for a shorter tau
        else:
            hi = mid
    if best_err <= 2.0 * tol * target_tau:
        return best_width
    raise CalibrationError(
        f"no wall width reaches the target within {2 * tol:.0%}: best "
        f"|tau - target| = {best_err:g} s at width {best_width:g} m")
