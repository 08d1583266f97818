"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A configuration value is inconsistent with the requested operation."""


class NearResonanceError(ValueError):
    """Trap wavelength too close to an atomic resonance for the far-detuned model."""


class CalibrationError(RuntimeError):
    """A calibration target could not be bracketed or reached."""


class GridCoverageError(ValueError):
    """Too much excitation weight falls outside the density grid."""


class EmptyModeError(ValueError):
    """The optical mode does not overlap the atomic cloud."""


class NumericalError(RuntimeError):
    """A numerical procedure failed (non-finite values, lost atoms, ...)."""
