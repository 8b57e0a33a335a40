"""Physical constants (CODATA values via scipy) and unit conversions."""
from scipy import constants as _c

BOHR_MAGNETON = _c.physical_constants["Bohr magneton"][0]  # J/T
PLANCK = _c.h  # J s

# E-fields enter the API in V/cm; Stark parameters are tabulated in um^2/V^2.
UM_PER_CM = 1e4


def v_per_cm_to_v_per_um(e):
    return e / UM_PER_CM


def resonance_frequency(g: float, b0: float) -> float:
    """Electron spin resonance frequency g*beta*B0/h in Hz for B0 in tesla."""
    return g * BOHR_MAGNETON * b0 / PLANCK
