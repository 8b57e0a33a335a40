"""Global least-squares extraction of Stark parameters.

The shift model is linear in its coefficients,

    df = a * E^2 + b * M_I * E^2 [+ c * E] [+ d]

with E^2 in (V/um)^2, E in V/cm, a = eta_g * f0 and b = eta_A * A, so the
fit is a single weighted linear solve (QR on a column-scaled design).
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import UM_PER_CM
from .errors import MissingHyperfineConstant, RankDeficient, UnpairedLines
from .experiment import EchoPhaseDataset
from .stark import DonorSpecies


class FitMode(str, enum.Enum):
    bipolar_quadratic = "bipolar_quadratic"
    unipolar_with_linear = "unipolar_with_linear"


class Weighting(str, enum.Enum):
    uniform = "uniform"
    inverse_variance = "inverse_variance"


@dataclass(frozen=True)
class FitOptions:
    mode: FitMode = FitMode.bipolar_quadratic
    weighting: Weighting = Weighting.inverse_variance
    fit_hyperfine: bool = False
    intercept: bool = False  # absorbs the constant eta * E_int^2 strain offset

    def __post_init__(self):
        object.__setattr__(self, "mode", FitMode(self.mode))
        object.__setattr__(self, "weighting", Weighting(self.weighting))


@dataclass(frozen=True)
class FitResult:
    eta_g: float
    eta_g_err: float
    eta_A: Optional[float]
    eta_A_err: Optional[float]
    linear_coeff: Optional[float]  # Hz cm / V
    linear_coeff_err: Optional[float]
    intercept: Optional[float]  # Hz
    intercept_err: Optional[float]
    chi2_reduced: float
    dof: int
    residuals: np.ndarray
    covariance: np.ndarray
    columns: tuple

    def to_json(self) -> dict:
        return {
            "eta_g": self.eta_g,
            "eta_g_err": self.eta_g_err,
            "eta_a": self.eta_A,
            "eta_a_err": self.eta_A_err,
            "linear": self.linear_coeff,
            "linear_err": self.linear_coeff_err,
            "chi2_reduced": self.chi2_reduced,
            "dof": self.dof,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _design(data: EchoPhaseDataset, opts: FitOptions):
    e_um2 = (data.e_field / UM_PER_CM) ** 2
    cols = {"quadratic": e_um2}
    if opts.fit_hyperfine:
        cols["hyperfine"] = np.nan_to_num(data.m_i, nan=0.0) * e_um2
    if opts.mode is FitMode.unipolar_with_linear:
        cols["linear"] = data.e_field.copy()
    if opts.intercept:
        cols["intercept"] = np.ones(len(data))
    return tuple(cols), np.column_stack(list(cols.values()))


def global_fit(data: EchoPhaseDataset, donor: DonorSpecies, f0: float, opts: FitOptions = FitOptions()) -> FitResult:
    """Fit the Stark model jointly over all rows and hyperfine lines."""
    if len(np.unique(data.e_field)) < 3:
        raise RankDeficient("need at least 3 distinct field values")
    if opts.fit_hyperfine:
        lines = np.unique(data.m_i[~data.averaged])
        if len(lines) < 2:
            raise RankDeficient("fitting eta_A needs at least two distinct resolved hyperfine lines")
        if donor.hyperfine_A is None:
            raise MissingHyperfineConstant(f"hyperfine constant A for {donor.name} is not configured")

    names, X = _design(data, opts)
    n, k = X.shape
    dof = n - k
    if dof <= 0:
        raise RankDeficient(f"{n} rows cannot determine {k} parameters")

    if opts.weighting is Weighting.inverse_variance:
        w = 1.0 / data.sigma_hz
    else:
        w = np.ones(n)
    Xw = X * w[:, None]
    yw = data.df_hz * w

    # column scaling keeps E^2 (~1e-4) and E (~1e2) columns comparable
    scale = np.linalg.norm(Xw, axis=0)
    if np.any(scale == 0):
        raise RankDeficient("a design column is identically zero")
    q, r = np.linalg.qr(Xw / scale)
    rdiag = np.abs(np.diag(r))
    if rdiag.min() <= 1e-12 * rdiag.max():
        raise RankDeficient(f"design matrix rank < {k} (columns {names})")
    coef_scaled = np.linalg.solve(r, q.T @ yw)
    coef = coef_scaled / scale

    resid = data.df_hz - X @ coef
    rinv = np.linalg.solve(r, np.eye(k))
    cov = (rinv @ rinv.T) / np.outer(scale, scale)
    chi2 = float(np.sum((resid / data.sigma_hz) ** 2) / dof)
    if opts.weighting is Weighting.uniform:
        cov = cov * float(np.sum(resid**2) / dof)
    err = np.sqrt(np.diag(cov))

    idx = {name: i for i, name in enumerate(names)}

    def get(name, denom=1.0):
        if name not in idx:
            return None, None
        i = idx[name]
        return float(coef[i] / denom), float(err[i] / abs(denom))

    eta_g, eta_g_err = get("quadratic", f0)
    eta_a, eta_a_err = get("hyperfine", donor.hyperfine_A or 1.0)
    lin, lin_err = get("linear")
    icpt, icpt_err = get("intercept")
    return FitResult(eta_g, eta_g_err, eta_a, eta_a_err, lin, lin_err, icpt, icpt_err,
                     chi2, dof, resid, cov, names)


def average_opposite_lines(data: EchoPhaseDataset) -> EchoPhaseDataset:
    """Average each +M_I line with its -M_I partner at the same field.

    The hyperfine Stark term is odd in M_I, so it drops out of the averages.
    Rows that are already averaged pass through unchanged.
    """
    out = []
    groups = {}
    for i in range(len(data)):
        if data.averaged[i]:
            out.append((data.e_field[i], np.nan, data.df_hz[i], data.sigma_hz[i]))
            continue
        groups.setdefault((data.e_field[i], abs(data.m_i[i])), {}).setdefault(np.sign(data.m_i[i]), []).append(i)
    for (e, am), by_sign in groups.items():
        if am == 0:
            for i in by_sign[0.0]:
                out.append((e, np.nan, data.df_hz[i], data.sigma_hz[i]))
            continue
        plus, minus = by_sign.get(1.0, []), by_sign.get(-1.0, [])
        if len(plus) != len(minus):
            raise UnpairedLines(f"M_I=±{am} lines are unpaired at E={e} V/cm")
        for ip, im in zip(plus, minus):
            df = 0.5 * (data.df_hz[ip] + data.df_hz[im])
            sigma = 0.5 * np.hypot(data.sigma_hz[ip], data.sigma_hz[im])
            out.append((e, np.nan, df, sigma))
    out.sort(key=lambda r: r[0])
    cols = list(zip(*out)) if out else [[], [], [], []]
    meta = dict(data.metadata)
    meta["lines_averaged"] = True
    return EchoPhaseDataset(*(np.array(c, dtype=float) for c in cols), metadata=meta)
