"""Phase-accumulation (Mims) Stark experiment and synthetic datasets.

An electric field pulse of length t_E sits inside a Hahn echo. Spins shifted
by df pick up a phase 2*pi*df*t_E, read out by a quadrature detector. The
simulator turns a forward Stark model into rows of (E, M_I, df, sigma).
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import EmptySweep, PhaseWrapRisk
from .geometry import MillerDirection
from .stark import (
    NO_STRAIN,
    DonorSpecies,
    FieldConfiguration,
    StarkParameters,
    StrainConfiguration,
    bipolar_effective_shift,
    shift_with_strain,
)

CSV_HEADER = ("e_field_v_per_cm", "m_i", "delta_f_hz", "sigma_hz")
AVERAGED_LABEL = "avg"


@dataclass(frozen=True)
class PulseSequence:
    t_E: float  # s
    tau: float  # s
    t_half_pi: float = 200e-9
    t_pi: float = 400e-9
    polarity: Optional[str] = None  # None follows the field configuration

    def __post_init__(self):
        for name in ("t_E", "tau", "t_half_pi", "t_pi"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.t_E < self.tau:
            raise ValueError(f"E-field pulse ({self.t_E} s) must fit inside tau ({self.tau} s)")
        if self.polarity not in (None, "unipolar", "bipolar"):
            raise ValueError(f"bad polarity {self.polarity!r}")


@dataclass(frozen=True)
class SampleFixture:
    id: int
    material: str
    doping: float  # donors / cm^3
    faces: tuple
    T2: float  # s


SAMPLES = {
    1: SampleFixture(1, "74Ge:As", 3e15, (MillerDirection(1, 1, 0), MillerDirection(0, 0, 1)), 114e-6),
    2: SampleFixture(2, "natGe:As", 1e15, (MillerDirection(-1, 1, 1), MillerDirection(0, 1, -1)), 55e-6),
    3: SampleFixture(3, "70Ge:P", 1e12, (MillerDirection(1, 0, 0), MillerDirection(0, 0, 1)), 250e-6),
    4: SampleFixture(4, "natGe:P", 4e14, (MillerDirection(1, 1, 0), MillerDirection(0, 0, 1)), 55e-6),
    5: SampleFixture(5, "natGe:P", 1e13, (MillerDirection(1, 1, 1), MillerDirection(1, -1, 0)), 55e-6),
}


@dataclass(frozen=True)
class NoiseModel:
    phase_sigma: float = 0.0  # rad, per point
    seed: int = 0

    def __post_init__(self):
        if self.phase_sigma < 0:
            raise ValueError("phase_sigma must be >= 0")


def hyperfine_projections(d: DonorSpecies) -> list:
    return d.projections()


def phase_from_shift(df, t_E):
    """Accumulated phase in radians; not wrapped."""
    if not t_E > 0:
        raise ValueError("t_E must be positive")
    return 2.0 * math.pi * df * t_E


def echo_amplitude(tau: float, T2: float) -> float:
    if not (tau >= 0 and T2 > 0):
        raise ValueError("tau must be >= 0 and T2 > 0")
    return math.exp(-2.0 * tau / T2)


@dataclass
class EchoPhaseDataset:
    """Stark shift rows; ``m_i`` is NaN for line-averaged rows."""

    e_field: np.ndarray
    m_i: np.ndarray
    df_hz: np.ndarray
    sigma_hz: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.e_field = np.asarray(self.e_field, dtype=float)
        self.m_i = np.asarray(self.m_i, dtype=float)
        self.df_hz = np.asarray(self.df_hz, dtype=float)
        self.sigma_hz = np.asarray(self.sigma_hz, dtype=float)
        n = len(self.e_field)
        if not (len(self.m_i) == len(self.df_hz) == len(self.sigma_hz) == n):
            raise ValueError("dataset columns have different lengths")
        if np.any(~(self.sigma_hz > 0)):
            raise ValueError("sigma_hz must be positive")

    def __len__(self):
        return len(self.e_field)

    @property
    def averaged(self) -> np.ndarray:
        return np.isnan(self.m_i)

    def take(self, idx) -> "EchoPhaseDataset":
        return EchoPhaseDataset(self.e_field[idx], self.m_i[idx], self.df_hz[idx], self.sigma_hz[idx], dict(self.metadata))

    # -- CSV + JSON sidecar ---------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for e, m, df, s in zip(self.e_field, self.m_i, self.df_hz, self.sigma_hz):
            w.writerow([repr(float(e)), AVERAGED_LABEL if math.isnan(m) else repr(float(m)), repr(float(df)), repr(float(s))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, metadata: Optional[dict] = None) -> "EchoPhaseDataset":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(f"dataset CSV header must be {','.join(CSV_HEADER)}")
        cols = [[], [], [], []]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"line {lineno}: expected 4 fields, got {len(row)}")
            try:
                m = row[1].strip()
                vals = [float(row[0]), math.nan if m == AVERAGED_LABEL else float(Fraction(m)), float(row[2]), float(row[3])]
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            for c, v in zip(cols, vals):
                c.append(v)
        return cls(*cols, metadata=dict(metadata or {}))

    def save(self, csv_path, write_metadata: bool = True) -> None:
        csv_path = Path(csv_path)
        csv_path.write_text(self.to_csv(), encoding="utf-8")
        if write_metadata:
            sidecar_path(csv_path).write_text(json.dumps(self.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, csv_path) -> "EchoPhaseDataset":
        csv_path = Path(csv_path)
        meta = {}
        side = sidecar_path(csv_path)
        if side.exists():
            meta = json.loads(side.read_text(encoding="utf-8"))
        return cls.from_csv(csv_path.read_text(encoding="utf-8"), meta)


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def _row_normals(seed: int, n: int) -> np.ndarray:
    # one child stream per row: results do not depend on evaluation order
    children = np.random.SeedSequence(seed).spawn(n)
    return np.array([np.random.default_rng(c).standard_normal() for c in children])


def generate_dataset(
    donor: DonorSpecies,
    params: StarkParameters,
    sweep: Sequence[float],
    cfg: FieldConfiguration,
    seq: PulseSequence,
    noise: NoiseModel = NoiseModel(),
    strain: StrainConfiguration = NO_STRAIN,
) -> EchoPhaseDataset:
    """Simulate measured Stark shifts over a field sweep (V/cm).

    Every hyperfine line is measured when eta_A is known; otherwise only the
    line-averaged shift is produced, as for the unresolved natural-Ge spectra.
    """
    sweep = [float(e) for e in sweep]
    if not sweep:
        raise EmptySweep("field sweep is empty")
    polarity = seq.polarity or cfg.polarity
    if seq.polarity is not None and seq.polarity != cfg.polarity:
        raise ValueError(f"pulse polarity {seq.polarity!r} contradicts field polarity {cfg.polarity!r}")
    f0 = cfg.spectrometer_frequency
    lines = donor.projections() if params.eta_A is not None else [None]
    model = bipolar_effective_shift if polarity == "bipolar" else shift_with_strain

    e_col, m_col, df_true = [], [], []
    for e in sweep:
        for m in lines:
            e_col.append(e)
            m_col.append(math.nan if m is None else float(m))
            df_true.append(model(params, donor, f0, m, e, strain))
    df_true = np.array(df_true)

    phase = phase_from_shift(df_true, seq.t_E)
    if noise.phase_sigma > 0:
        phase = phase + noise.phase_sigma * _row_normals(noise.seed, len(phase))
    if np.any(np.abs(phase) > math.pi / 2):
        warnings.warn(
            f"accumulated phase reaches {np.max(np.abs(phase)):.3g} rad (> pi/2); real detection would wrap",
            PhaseWrapRisk,
            stacklevel=2,
        )
    two_pi_t = 2.0 * math.pi * seq.t_E
    df = phase / two_pi_t
    # noiseless rows still need a positive uncertainty for weighting
    sigma = noise.phase_sigma / two_pi_t if noise.phase_sigma > 0 else 1.0
    meta = {
        "donor": donor.name,
        "e_direction": cfg.e_direction.to_list(),
        "b_direction": cfg.b_direction.to_list(),
        "f0": f0,
        "t_E": seq.t_E,
        "polarity": polarity,
        "seed": noise.seed,
        "phase_sigma": noise.phase_sigma,
        "e_internal": strain.e_internal,
    }
    if donor.hyperfine_A is not None:
        meta["hyperfine_A"] = donor.hyperfine_A
    return EchoPhaseDataset(np.array(e_col), np.array(m_col), df, np.full(len(df), sigma), meta)


def phase_sigma_for_fraction(max_shift_hz: float, t_E: float, fraction: float = 0.05) -> float:
    """Phase noise (rad) that yields sigma_hz = fraction * max_shift_hz."""
    return 2.0 * math.pi * t_E * fraction * abs(max_shift_hz)
