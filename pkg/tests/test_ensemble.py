import math

import numpy as np
import pytest

from boxmem.constants import CONSTANTS
from boxmem.ensemble import (AtomEnsemble, mechanical_energy, propagate,
                             propagate_record, reflect_specular,
                             sample_thermal_ensemble)
from boxmem.errors import ConfigurationError
from boxmem.geometry import RingPotential, TrapGeometry, potential_at

TRAP = TrapGeometry()
T15 = 15e-6


def test_mean_speed_maxwell_boltzmann():
    ens = sample_thermal_ensemble(100_000, TRAP, T15, seed=1)
    speed = np.linalg.norm(ens.velocities, axis=1)
    expected = math.sqrt(8.0 * CONSTANTS.k_B * T15
                         / (math.pi * CONSTANTS.m_atom))
    assert expected == pytest.approx(60.4e-3, rel=2e-3)  # 60.4 mm/s
    assert np.mean(speed) == pytest.approx(expected, rel=1e-2)


def test_second_moment():
    ens = sample_thermal_ensemble(100_000, TRAP, T15, seed=2)
    v2 = np.mean(np.sum(ens.velocities**2, axis=1))
    assert v2 == pytest.approx(3.0 * CONSTANTS.k_B * T15 / CONSTANTS.m_atom,
                               rel=1e-2)


def test_positions_inside_trap():
    ens = sample_thermal_ensemble(50_000, TRAP, T15, seed=3)
    rho = np.hypot(ens.positions[:, 0], ens.positions[:, 1])
    assert np.all(rho <= TRAP.radius)
    assert np.all(np.abs(ens.positions[:, 2]) <= TRAP.length / 2)


def test_barometric_density_ratio():
    ens = sample_thermal_ensemble(400_000, TRAP, T15, seed=4)
    y = ens.positions[:, 1]
    band = 10e-6
    n_lo = np.count_nonzero(np.abs(y + 50e-6) < band)
    n_hi = np.count_nonzero(np.abs(y - 50e-6) < band)
    scale = CONSTANTS.k_B * T15 / (CONSTANTS.m_atom * CONSTANTS.g_earth)
    assert scale == pytest.approx(146.6e-6, rel=5e-3)  # ~147 um
    # the +-50 um strips subtend different chord widths; compare against the
    # geometric factor times the barometric factor
    chord_lo = np.sqrt(TRAP.radius**2 - 50e-6**2)
    expected = math.exp(100e-6 / scale)
    assert n_lo / n_hi == pytest.approx(expected, rel=0.05)
    assert chord_lo > 0


def test_uniform_override_flat():
    ens = sample_thermal_ensemble(200_000, TRAP, T15, seed=5,
                                  spatial="uniform")
    y = ens.positions[:, 1]
    n_lo = np.count_nonzero(np.abs(y + 50e-6) < 10e-6)
    n_hi = np.count_nonzero(np.abs(y - 50e-6) < 10e-6)
    assert n_lo / n_hi == pytest.approx(1.0, abs=0.03)


def test_sampling_deterministic():
    a = sample_thermal_ensemble(1000, TRAP, T15, seed=42)
    b = sample_thermal_ensemble(1000, TRAP, T15, seed=42)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.velocities, b.velocities)
    c = sample_thermal_ensemble(1000, TRAP, T15, seed=43)
    assert not np.array_equal(a.positions, c.positions)


def test_zero_temperature():
    ens = sample_thermal_ensemble(100, TRAP, 0.0, seed=0)
    assert np.all(ens.velocities == 0.0)


def test_invalid_args():
    with pytest.raises(ValueError):
        sample_thermal_ensemble(0, TRAP, T15)
    with pytest.raises(ValueError):
        sample_thermal_ensemble(10, TRAP, -1e-6)
    with pytest.raises(ValueError):
        sample_thermal_ensemble(10, TRAP, T15, spatial="gaussian")


def test_reflection_preserves_speed():
    pos = np.array([[96e-6, 0.0, 0.0]])       # just outside the cylinder
    vel = np.array([[30e-3, 10e-3, 5e-3]])
    ens = AtomEnsemble(pos.copy(), vel.copy())
    out = reflect_specular(ens, TRAP, margin=2e-6)
    assert np.linalg.norm(out.velocities[0]) == pytest.approx(
        np.linalg.norm(vel[0]), rel=1e-12)
    assert out.velocities[0, 0] < 0.0         # radial component reversed
    rho = np.hypot(out.positions[0, 0], out.positions[0, 1])
    assert rho <= TRAP.radius * (1 + 1e-12)


def test_hard_wall_energy_conserved():
    ens = sample_thermal_ensemble(2000, TRAP, T15, seed=7)
    e0 = mechanical_energy(ens, CONSTANTS.g_earth)
    out = propagate(ens, 0.0, 5e-3, trap=TRAP)
    e1 = mechanical_energy(out, CONSTANTS.g_earth)
    # bounded relative to the thermal energy scale
    scale = 1.5 * CONSTANTS.k_B * T15
    assert np.max(np.abs(e1 - e0)) / scale < 1e-9


def test_hard_wall_containment():
    ens = sample_thermal_ensemble(5000, TRAP, T15, seed=8)
    out = propagate(ens, 0.0, 10e-3, trap=TRAP)
    rho = np.hypot(out.positions[:, 0], out.positions[:, 1])
    assert np.all(rho <= TRAP.radius * (1 + 1e-9))
    assert np.all(np.abs(out.positions[:, 2]) <= TRAP.length / 2 * (1 + 1e-9))


def test_free_fall_matches_kinematics():
    big = TrapGeometry(radius=1.0, length=1.0)   # walls far away
    pos = np.zeros((1, 3))
    vel = np.array([[1e-3, 2e-3, 0.5e-3]])
    ens = AtomEnsemble(pos.copy(), vel.copy())
    t = 20e-3
    out = propagate(ens, 0.0, t, dt=1e-4, trap=big)
    g = CONSTANTS.g_earth
    assert out.positions[0, 0] == pytest.approx(vel[0, 0] * t, rel=1e-9)
    assert out.positions[0, 1] == pytest.approx(
        vel[0, 1] * t - 0.5 * g * t * t, rel=1e-9)
    assert out.velocities[0, 1] == pytest.approx(vel[0, 1] - g * t, rel=1e-9)


def test_bounce_return_time():
    # an atom dropped from the axis returns to the axis at 2 sqrt(2R/g)
    pos = np.zeros((1, 3))
    vel = np.zeros((1, 3))
    ens = AtomEnsemble(pos, vel)
    g = CONSTANTS.g_earth
    t_return = 2.0 * math.sqrt(2.0 * TRAP.radius / g)
    out = propagate(ens, 0.0, t_return, dt=2e-6, trap=TRAP, gravity=g)
    assert abs(out.positions[0, 1]) < 1e-7     # back near the axis


def test_substep_guard():
    ens = sample_thermal_ensemble(100, TRAP, T15, seed=9)
    with pytest.raises(ConfigurationError):
        propagate(ens, 0.0, 1e-3, dt=1e-3, trap=TRAP)


def test_propagate_record_shape():
    ens = sample_thermal_ensemble(50, TRAP, T15, seed=10)
    times = np.array([0.0, 1e-3, 2e-3])
    rec = propagate_record(ens, times, trap=TRAP)
    assert rec.shape == (3, 50, 3)
    assert np.array_equal(rec[0], ens.positions)


def test_soft_wall_energy_drift_100ms():
    ring = RingPotential()
    trap = TrapGeometry(radius=ring.ring_radius, wall_model="soft", ring=ring)
    ens = sample_thermal_ensemble(300, trap, T15, seed=11)
    g = CONSTANTS.g_earth

    def total_energy(e):
        rho = np.hypot(e.positions[:, 0], e.positions[:, 1])
        pot = potential_at(rho, ring) * CONSTANTS.k_B
        # offset gravity so the energy scale is positive definite
        return (mechanical_energy(e, g) + pot
                + CONSTANTS.m_atom * g * trap.radius)

    e0 = total_energy(ens)
    out = propagate(ens, 0.0, 100e-3, dt=5e-6, trap=trap, gravity=g)
    e1 = total_energy(out)
    drift = np.max(np.abs(e1 - e0)) / np.mean(e0)
    assert drift < 1e-3
