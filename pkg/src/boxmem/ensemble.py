"""Thermal-ensemble sampling and ballistic propagation in the box trap.

Atoms are stored struct-of-arrays (positions, velocities, alive) since every
operation is vectorized over the ensemble.  The random stream is a
counter-based Philox generator keyed by the 64-bit master seed; samples are
drawn in fixed atom-index order, so results are reproducible regardless of
how downstream consumers chunk the arrays.

Coordinates: z along the trap axis, y vertical (gravity acts along -y).
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .errors import ConfigurationError, NumericalError
from .geometry import TrapGeometry, axial_force, transverse_force

DEFAULT_DT = 5e-6  # s, sub-step; thermal atoms move ~0.3 um per step


@dataclass
class AtomEnsemble:
    """Positions (n,3) in m, velocities (n,3) in m/s, alive flags (n,)."""

    positions: np.ndarray
    velocities: np.ndarray
    alive: np.ndarray = field(default=None)

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if self.positions.shape != self.velocities.shape:
            raise ValueError("positions and velocities must have equal shapes")
        if self.alive is None:
            self.alive = np.ones(len(self.positions), dtype=bool)
        else:
            self.alive = np.asarray(self.alive, dtype=bool)

    def __len__(self):
        return len(self.positions)

    def copy(self) -> "AtomEnsemble":
        return AtomEnsemble(self.positions.copy(), self.velocities.copy(),
                            self.alive.copy())


def sample_thermal_ensemble(
    n: int,
    trap: TrapGeometry,
    temperature: float,
    gravity: float = CONSTANTS.g_earth,
    seed: int = 0,
    constants: PhysicalConstants = CONSTANTS,
    spatial: str = "thermal",
) -> AtomEnsemble:
    """Draw n atoms in thermal equilibrium inside the cylinder.

    Velocities are Maxwell-Boltzmann at ``temperature``.  Positions are
    uniform over the cylinder cross-section weighted by the barometric
    factor exp(-m g y / k_B T) (rejection sampling), uniform along the
    axis.  ``spatial="uniform"`` disables the barometric weighting.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not np.isfinite(temperature) or temperature < 0:
        raise ValueError("temperature must be finite and non-negative")
    if spatial not in ("thermal", "uniform"):
        raise ValueError("spatial must be 'thermal' or 'uniform'")

    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))

    sigma_v = np.sqrt(constants.k_B * temperature / constants.m_atom)
    velocities = sigma_v * rng.standard_normal((n, 3)) if sigma_v > 0 \
        else np.zeros((n, 3))

    barometric = (spatial == "thermal" and gravity != 0.0 and temperature > 0)
    scale_height = (constants.k_B * temperature / (constants.m_atom * gravity)
                    if barometric else np.inf)

    xy = np.empty((n, 2))
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 1024)
        # uniform over the disc
        r = trap.radius * np.sqrt(rng.random(m))
        phi = 2.0 * np.pi * rng.random(m)
        cand = np.column_stack((r * np.cos(phi), r * np.sin(phi)))
        if barometric:
            # accept prob normalized to 1 at the bottom of the trap
            accept = np.exp(-(cand[:, 1] + trap.radius) / scale_height)
            cand = cand[rng.random(m) < accept]
        k = min(len(cand), n - filled)
        xy[filled:filled + k] = cand[:k]
        filled += k

    z = trap.length * (rng.random(n) - 0.5)
    positions = np.column_stack((xy[:, 0], xy[:, 1], z))
    return AtomEnsemble(positions, velocities)


def reflect_specular(ensemble: AtomEnsemble, trap: TrapGeometry,
                     margin: float = 1e-6) -> AtomEnsemble:
    """Project boundary-crossing atoms back onto the boundary and reverse
    the outward normal velocity component.  Speed is preserved exactly.

    Raises NumericalError if any atom is further than ``margin`` beyond
    the boundary (more than one sub-step of penetration).
    """
    out = ensemble.copy()
    pos, vel, alive = out.positions, out.velocities, out.alive

    rho = np.hypot(pos[:, 0], pos[:, 1])
    hit = alive & (rho >= trap.radius)
    if np.any(rho[alive] > trap.radius + margin):
        raise NumericalError("atom beyond the cylinder wall by more than "
                             f"{margin:g} m")
    if np.any(hit):
        nx = pos[hit, 0] / rho[hit]
        ny = pos[hit, 1] / rho[hit]
        pos[hit, 0] = trap.radius * nx
        pos[hit, 1] = trap.radius * ny
        vn = vel[hit, 0] * nx + vel[hit, 1] * ny
        outward = vn > 0
        vel[hit, 0] -= np.where(outward, 2.0 * vn * nx, 0.0)
        vel[hit, 1] -= np.where(outward, 2.0 * vn * ny, 0.0)

    half = trap.length / 2.0
    zhit = alive & (np.abs(pos[:, 2]) >= half)
    if np.any(np.abs(pos[alive, 2]) > half + margin):
        raise NumericalError("atom beyond an end cap by more than "
                             f"{margin:g} m")
    if np.any(zhit):
        sz = np.sign(pos[zhit, 2])
        pos[zhit, 2] = sz * half
        vz = vel[zhit, 2]
        vel[zhit, 2] = np.where(vz * sz > 0, -vz, vz)
    return out


def _fold_axial(z, vz, half):
    """Exact end-cap reflections of decoupled linear axial motion."""
    period = 4.0 * half
    u = np.mod(z + half, period)
    upper = u > 2.0 * half
    z_f = np.where(upper, period - u, u) - half
    vz_f = np.where(upper, -vz, vz)
    return z_f, vz_f


def _resolve_cylinder_crossings(p0, v0, p1, v1, dt, radius, g, iters=60):
    """Reflect atoms that crossed the cylinder wall during a parabolic step.

    p0/v0 are pre-step, p1/v1 the tentative post-step states; crossing
    times are located by bisection on rho^2(t) - R^2 over [0, dt], the
    bounce is applied at the wall, and the remainder of the step replayed.
    Transverse (x, y) only; axial motion is handled separately.
    """
    for _ in range(6):
        rho1 = np.hypot(p1[:, 0], p1[:, 1])
        idx = np.flatnonzero(rho1 > radius * (1.0 + 1e-14))
        if idx.size == 0:
            break
        x0, y0 = p0[idx, 0], p0[idx, 1]
        vx0, vy0 = v0[idx, 0], v0[idx, 1]
        dts = dt if np.isscalar(dt) else dt[idx]

        def rho2(t):
            x = x0 + vx0 * t
            y = y0 + vy0 * t - 0.5 * g * t * t
            return x * x + y * y

        lo = np.zeros(idx.size)
        hi = np.full(idx.size, 1.0) * dts
        r2 = radius * radius
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            outside = rho2(mid) > r2
            hi = np.where(outside, mid, hi)
            lo = np.where(outside, lo, mid)
        tc = 0.5 * (lo + hi)

        xc = x0 + vx0 * tc
        yc = y0 + vy0 * tc - 0.5 * g * tc * tc
        vxc = vx0
        vyc = vy0 - g * tc
        rc = np.hypot(xc, yc)
        # place exactly on the wall, then specular bounce
        scale = radius / rc
        xc *= scale
        yc *= scale
        nx, ny = xc / radius, yc / radius
        vn = vxc * nx + vyc * ny
        vxc -= 2.0 * vn * nx
        vyc -= 2.0 * vn * ny

        rem = dts - tc
        p0[idx, 0], p0[idx, 1] = xc, yc
        v0[idx, 0], v0[idx, 1] = vxc, vyc
        p1[idx, 0] = xc + vxc * rem
        p1[idx, 1] = yc + vyc * rem - 0.5 * g * rem * rem
        v1[idx, 0] = vxc
        v1[idx, 1] = vyc - g * rem
        if np.isscalar(dt):
            dt = np.full(len(p0), dt)
        dt[idx] = rem
    else:
        # Pathological residue (atom grazing the lowest wall point): project
        # back onto the wall and rescale the speed so kinetic + m g y is
        # exactly preserved.
        rho1 = np.hypot(p1[:, 0], p1[:, 1])
        idx = np.flatnonzero(rho1 > radius)
        if np.any(rho1[idx] > radius + 1e-9):
            raise NumericalError("unresolved wall crossing after 6 bounce passes")
        if idx.size:
            y_old = p1[idx, 1]
            scale = radius / rho1[idx]
            p1[idx, 0] *= scale
            p1[idx, 1] *= scale
            nx = p1[idx, 0] / radius
            ny = p1[idx, 1] / radius
            vn = v1[idx, 0] * nx + v1[idx, 1] * ny
            outward = vn > 0
            v1[idx, 0] -= np.where(outward, 2.0 * vn * nx, 0.0)
            v1[idx, 1] -= np.where(outward, 2.0 * vn * ny, 0.0)
            v2_old = v1[idx, 0] ** 2 + v1[idx, 1] ** 2 + v1[idx, 2] ** 2
            v2_new = np.maximum(v2_old + 2.0 * g * (y_old - p1[idx, 1]), 0.0)
            factor = np.sqrt(np.where(v2_old > 0, v2_new / np.maximum(v2_old, 1e-300), 1.0))
            v1[idx] *= factor[:, None]
    return p1, v1


def _check_substep(ensemble, dt, trap):
    v = ensemble.velocities[ensemble.alive]
    if v.size == 0:
        return
    v3 = max(3.0 * float(np.max(np.std(v, axis=0))),
             float(np.max(np.abs(v))))
    if v3 <= 0:
        return
    scale = trap.ring.wall_width if trap.wall_model == "soft" else trap.radius
    t_cross = scale / v3
    if dt > 0.1 * t_cross:
        raise ConfigurationError(
            f"dt={dt:g} s exceeds a tenth of the fastest wall-crossing time "
            f"{t_cross:g} s at 3-sigma thermal speed")


def propagate(
    ensemble: AtomEnsemble,
    t_start: float,
    t_end: float,
    dt: float = DEFAULT_DT,
    trap: TrapGeometry = TrapGeometry(),
    gravity: float = CONSTANTS.g_earth,
    constants: PhysicalConstants = CONSTANTS,
) -> AtomEnsemble:
    """Advance alive atoms ballistically from t_start to t_end.

    Constant gravity, no interatomic interactions.  Hard walls give exact
    in-step specular bounces (bisection for the cylinder, analytic fold
    for the end caps); soft walls integrate -grad U with velocity-Verlet.
    Dead atoms are returned unchanged.
    """
    if t_end < t_start:
        raise ValueError("t_end must be >= t_start")
    if dt <= 0:
        raise ValueError("dt must be positive")
    _check_substep(ensemble, dt, trap)

    out = ensemble.copy()
    alive = out.alive
    if not np.any(alive) or t_end == t_start:
        return out
    pos = out.positions[alive]
    vel = out.velocities[alive]

    remaining = t_end - t_start
    half = trap.length / 2.0
    m = constants.m_atom
    while remaining > 1e-18:
        step = min(dt, remaining)
        remaining -= step
        if trap.wall_model == "hard":
            p1 = pos.copy()
            v1 = vel.copy()
            p1[:, 0] = pos[:, 0] + vel[:, 0] * step
            p1[:, 1] = pos[:, 1] + vel[:, 1] * step - 0.5 * gravity * step**2
            v1[:, 1] = vel[:, 1] - gravity * step
            p1, v1 = _resolve_cylinder_crossings(
                pos.copy(), vel.copy(), p1, v1, step, trap.radius, gravity)
        else:
            acc = transverse_force(pos[:, :2], trap.ring, constants.k_B) / m
            az = (axial_force(pos[:, 2], trap.ring, half, constants.k_B) / m
                  if trap.endcap_model == "soft" else 0.0)
            a0 = np.column_stack((acc[:, 0], acc[:, 1] - gravity,
                                  np.broadcast_to(az, len(pos))))
            vh = vel + 0.5 * step * a0
            p1 = pos + step * vh
            acc1 = transverse_force(p1[:, :2], trap.ring, constants.k_B) / m
            az1 = (axial_force(p1[:, 2], trap.ring, half, constants.k_B) / m
                   if trap.endcap_model == "soft" else 0.0)
            a1 = np.column_stack((acc1[:, 0], acc1[:, 1] - gravity,
                                  np.broadcast_to(az1, len(pos))))
            v1 = vh + 0.5 * step * a1
        if trap.endcap_model == "hard":
            zf, vzf = _fold_axial(pos[:, 2] + vel[:, 2] * step, v1[:, 2], half)
            p1[:, 2] = zf
            v1[:, 2] = vzf
        pos, vel = p1, v1

    out.positions[alive] = pos
    out.velocities[alive] = vel
    return out


def propagate_record(
    ensemble: AtomEnsemble,
    times: np.ndarray,
    dt: float = DEFAULT_DT,
    trap: TrapGeometry = TrapGeometry(),
    gravity: float = CONSTANTS.g_earth,
    constants: PhysicalConstants = CONSTANTS,
) -> np.ndarray:
    """Positions of all atoms at each requested time, shape (n_times, n, 3).

    ``times`` must be non-decreasing and start at >= 0 (the ensemble's own
    epoch).  The trajectory between sample times uses sub-steps of ``dt``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("times must be a non-empty 1-d array")
    if np.any(np.diff(times) < 0) or times[0] < 0:
        raise ValueError("times must be non-decreasing and non-negative")
    rec = np.empty((len(times), len(ensemble), 3))
    current = ensemble
    t = 0.0
    for i, ti in enumerate(times):
        if ti > t:
            current = propagate(current, t, ti, dt=dt, trap=trap,
                                gravity=gravity, constants=constants)
            t = ti
        rec[i] = current.positions
    return rec


def mechanical_energy(ensemble: AtomEnsemble, gravity: float,
                      constants: PhysicalConstants = CONSTANTS) -> np.ndarray:
    """Per-atom kinetic + m g y energy (J); hard-wall invariant."""
    ke = 0.5 * constants.m_atom * np.sum(ensemble.velocities**2, axis=1)
    pe = constants.m_atom * gravity * ensemble.positions[:, 1]
    return ke + pe
