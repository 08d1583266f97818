"""Physical constants for the 87Rb box-trap memory simulation.

All values are SI.  Atomic data (hyperfine splitting, D-line wavelengths)
follow Steck, "Rubidium 87 D Line Data".
"""

import math
from dataclasses import dataclass

import scipy.constants as sc

_U = sc.physical_constants["atomic mass constant"][0]  # kg


@dataclass(frozen=True)
class PhysicalConstants:
    m_atom: float = 86.909180527 * _U        # kg, 87Rb
    k_B: float = sc.k                        # J/K
    hbar: float = sc.hbar                    # J s
    c: float = sc.c                          # m/s
    g_earth: float = 9.81                    # m/s^2
    nu_hf: float = 6.834682611e9             # Hz, 87Rb ground hyperfine splitting
    lambda_D2: float = 780.241209e-9         # m, vacuum
    lambda_D1: float = 794.978851e-9         # m, vacuum

    def __post_init__(self):
        for name in ("m_atom", "k_B", "hbar", "c", "g_earth",
                     "nu_hf", "lambda_D2", "lambda_D1"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def omega_hf(self) -> float:
        """Ground hyperfine splitting as an angular frequency (rad/s)."""
        return 2.0 * math.pi * self.nu_hf


CONSTANTS = PhysicalConstants()
