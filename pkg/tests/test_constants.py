import dataclasses

import pytest
import scipy.constants as sc

from boxmem.constants import CONSTANTS, PhysicalConstants


def test_fundamental_constants_match_codata():
    assert CONSTANTS.k_B == pytest.approx(sc.k, rel=1e-9)
    assert CONSTANTS.hbar == pytest.approx(sc.hbar, rel=1e-9)
    assert CONSTANTS.c == pytest.approx(sc.c, rel=1e-9)


def test_rb87_mass():
    # 86.909180527 u
    assert CONSTANTS.m_atom == pytest.approx(86.909180527 * sc.u, rel=1e-9)


def test_hyperfine_splitting():
    assert CONSTANTS.nu_hf == pytest.approx(6.834682611e9, rel=1e-6)
    assert CONSTANTS.omega_hf == pytest.approx(
        2.0 * sc.pi * CONSTANTS.nu_hf, rel=1e-12)


def test_d_line_wavelengths():
    assert CONSTANTS.lambda_D2 == pytest.approx(780.241e-9, rel=1e-5)
    assert CONSTANTS.lambda_D1 == pytest.approx(794.979e-9, rel=1e-5)
    assert CONSTANTS.lambda_D1 > CONSTANTS.lambda_D2


def test_all_constants_positive():
    for f in dataclasses.fields(CONSTANTS):
        assert getattr(CONSTANTS, f.name) > 0


def test_invalid_constants_rejected():
    with pytest.raises(ValueError):
        PhysicalConstants(m_atom=-1.0)


def test_frozen():
    with pytest.raises(dataclasses.FrozenInstanceError):
        CONSTANTS.m_atom = 0.0
