"""Pinned physical constants (SI units)."""

HBAR = 1.054571817e-34  # J s
C_LIGHT = 299792458.0  # m / s
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
ELECTRON_MASS = 9.1093837015e-31  # kg
G_STANDARD = 9.81  # m / s^2, gravitational acceleration at the Earth's surface
