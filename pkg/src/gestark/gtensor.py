"""Valley g-tensors and the weighted effective g-tensor of a Ge donor.

Each of the four <111> valleys carries an axially symmetric g-tensor
(g_perp across the valley axis, g_par along it). The donor ground state
mixes the valleys with weights alpha_i, and the effective tensor is the
weighted sum. A field along a valley axis lowers that valley, which the
phenomenological ``RepopulationModel`` describes with one coupling kappa.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .constants import resonance_frequency
from .errors import CalibrationError, InvalidWeights
from .geometry import VALLEY_AXES, to_unit_vector, valley_projections

__all__ = [
    "ValleyGTensor",
    "RepopulationModel",
    "EQUAL_WEIGHTS",
    "valley_tensor_in_crystal_frame",
    "effective_g_tensor",
    "g_along",
    "g_along_gradient",
    "resonance_frequency",
    "repopulation_weights",
    "calibrate_kappa",
    "AS75_VALLEY_G",
    "P31_VALLEY_G",
]

WEIGHT_SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-12

EQUAL_WEIGHTS = np.full(4, 0.25)
EQUAL_WEIGHTS.setflags(write=False)


@dataclass(frozen=True)
class ValleyGTensor:
    g_perp: float
    g_par: float

    def __post_init__(self):
        if not (self.g_perp > 0 and self.g_par > 0):
            raise ValueError(f"valley g-factors must be positive, got {self.g_perp}, {self.g_par}")

    @property
    def valley_average(self) -> float:
        """Isotropic g of an equally populated donor, (2 g_perp + g_par) / 3."""
        return (2.0 * self.g_perp + self.g_par) / 3.0


AS75_VALLEY_G = ValleyGTensor(g_perp=1.92, g_par=0.82)
P31_VALLEY_G = ValleyGTensor(g_perp=1.93, g_par=0.83)


def _check_weights(w) -> np.ndarray:
    a = np.asarray(w, dtype=float)
    if a.shape != (4,):
        raise InvalidWeights(f"need 4 valley weights, got shape {a.shape}")
    if np.any(a < 0) or np.any(a > 1):
        raise InvalidWeights(f"valley weights must lie in [0, 1]: {a}")
    if abs(a.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise InvalidWeights(f"valley weights sum to {a.sum()!r}, not 1")
    return a


def valley_tensor_in_crystal_frame(vg: ValleyGTensor, axis) -> np.ndarray:
    """g_perp * I + (g_par - g_perp) * n n^T."""
    n = np.asarray(axis, dtype=float)
    return vg.g_perp * np.eye(3) + (vg.g_par - vg.g_perp) * np.outer(n, n)


def effective_g_tensor(vg: ValleyGTensor, valleys: np.ndarray = VALLEY_AXES, w=EQUAL_WEIGHTS) -> np.ndarray:
    a = _check_weights(w)
    valleys = np.asarray(valleys, dtype=float)
    # sum_i a_i n_i n_i^T, then the isotropic part carries sum(a) = 1
    nn = np.einsum("i,ij,ik->jk", a, valleys, valleys)
    return vg.g_perp * np.eye(3) + (vg.g_par - vg.g_perp) * nn


def _check_symmetric(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape != (3, 3):
        raise ValueError(f"g-tensor must be 3x3, got {t.shape}")
    if np.max(np.abs(t - t.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(t))):
        raise ValueError("g-tensor is not symmetric")
    return t


def g_along(t: np.ndarray, b_hat) -> float:
    """Effective g for a static field along ``b_hat``: |g . b|."""
    t = _check_symmetric(t)
    b = to_unit_vector(b_hat)
    return float(np.linalg.norm(t @ b))


def g_along_gradient(vg: ValleyGTensor, w, b_hat, valleys: np.ndarray = VALLEY_AXES) -> np.ndarray:
    """Partial derivatives of g_along(effective_g_tensor(w), b) w.r.t. each weight.

    The weights are treated as independent coordinates (no sum constraint);
    project onto sum(dw) = 0 to get the derivative along a redistribution.
    """
    a = np.asarray(w, dtype=float)
    b = to_unit_vector(b_hat)
    valleys = np.asarray(valleys, dtype=float)
    g = vg.g_perp * a.sum() * np.eye(3) + (vg.g_par - vg.g_perp) * np.einsum(
        "i,ij,ik->jk", a, valleys, valleys
    )
    gb = g @ b
    norm = np.linalg.norm(gb)
    grads = np.empty(len(a))
    for i, n in enumerate(valleys):
        gi = valley_tensor_in_crystal_frame(vg, n)
        grads[i] = float(gb @ (gi @ b)) / norm
    return grads


@dataclass(frozen=True)
class RepopulationModel:
    """Quadratic valley repopulation, kappa in um^2/V^2."""

    kappa: float

    def __post_init__(self):
        if not np.isfinite(self.kappa):
            raise ValueError("kappa must be finite")


def repopulation_weights(model: RepopulationModel, e_hat, e_field: float, valleys: np.ndarray = VALLEY_AXES) -> np.ndarray:
    """Valley weights under a field of ``e_field`` V/um along ``e_hat``.

    alpha_i = clamp(1/4 + kappa * ((e . n_i)^2 - 1/3) * E^2, 0, 1), renormalized.
    """
    if e_field < 0:
        raise ValueError("field magnitude must be non-negative")
    if e_field == 0 or model.kappa == 0:
        return EQUAL_WEIGHTS.copy()
    proj = valley_projections(to_unit_vector(e_hat), valleys)
    a = np.clip(0.25 + model.kappa * (proj - 1.0 / 3.0) * e_field**2, 0.0, 1.0)
    return a / a.sum()


def _relative_g_shift(vg, kappa, e_hat, e_field, b_hat, valleys):
    w = repopulation_weights(RepopulationModel(kappa), e_hat, e_field, valleys)
    g0 = g_along(effective_g_tensor(vg, valleys, EQUAL_WEIGHTS), b_hat)
    return g_along(effective_g_tensor(vg, valleys, w), b_hat) / g0 - 1.0


def calibrate_kappa(
    vg: ValleyGTensor,
    eta_g: float,
    e_field: float = 0.1,
    direction=(1, 1, 1),
    valleys: np.ndarray = VALLEY_AXES,
    rtol: float = 1e-10,
) -> RepopulationModel:
    """Find kappa such that the repopulation model reproduces a measured eta_g.

    The reference configuration has E and B both along ``direction`` with
    field ``e_field`` in V/um. The matching condition is the Stark relation
    df / f0 = eta_g * E^2, with f0 taken from the zero-field tensor.
    """
    target = eta_g * e_field**2

    def residual(k):
        return _relative_g_shift(vg, k, direction, e_field, direction, valleys) - target

    if target == 0:
        return RepopulationModel(0.0)
    # kappa keeps every weight unclamped while |kappa| * E^2 < 3/8
    k_max = 0.375 / e_field**2
    lo, hi = -1.0, 1.0
    while residual(lo) * residual(hi) > 0:
        lo, hi = 2 * lo, 2 * hi
        if hi > k_max:
            lo, hi = -k_max, k_max
            if residual(lo) * residual(hi) > 0:
                raise CalibrationError(
                    f"eta_g={eta_g} is outside what valley repopulation can produce at E={e_field} V/um"
                )
            break
    kappa = optimize.bisect(residual, lo, hi, xtol=1e-300, rtol=max(rtol, 4 * np.finfo(float).eps), maxiter=500)
    return RepopulationModel(float(kappa))


def weights_from_sequence(values: Sequence[float]) -> np.ndarray:
    """Validate user-supplied weights (e.g. from a config file)."""
    return _check_weights(values)
