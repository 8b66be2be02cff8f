"""Physical constants (exact CODATA/SI values, never user-configurable)."""

GAS_CONSTANT = 8.314462618
"""Molar gas constant R, J/(mol K)."""

BOLTZMANN = 1.380649e-23
"""Boltzmann constant k_B, J/K (exact SI)."""

PLANCK = 6.62607015e-34
"""Planck constant h, J s (exact SI)."""

KELVIN_OFFSET = 273.15
"""Additive offset between degrees Celsius and kelvin."""
