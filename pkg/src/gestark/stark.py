"""Quadratic Stark shift of a donor spin resonance, and the parameter registry.

The shift of hyperfine line M_I under a field E is

    df = (eta_g * f0 + eta_A * A * M_I) * E^2

with E in V/um, eta in um^2/V^2 and the Zeeman energy g*beta*B0 expressed as
the spectrometer frequency f0. Public functions take E in V/cm.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from .constants import UM_PER_CM, resonance_frequency
from .errors import (
    InvalidProjection,
    MissingHyperfineConstant,
    MissingHyperfineParameter,
    MissingParameter,
    UnknownOrientation,
)
from .geometry import DirectionLike, Geometry, MillerDirection, classify_geometry
from .gtensor import AS75_VALLEY_G, P31_VALLEY_G, ValleyGTensor

# Passed as m_i to request the line-averaged shift (hyperfine term cancels).
AVERAGED = None

Projection = Optional[Union[Fraction, float, int, str]]


@dataclass(frozen=True)
class DonorSpecies:
    name: str
    g0: float
    nuclear_spin: Fraction
    hyperfine_A: Optional[float] = None  # Hz; no default, not given for Ge
    valley_g: Optional[ValleyGTensor] = None

    def __post_init__(self):
        object.__setattr__(self, "nuclear_spin", Fraction(self.nuclear_spin))
        if self.g0 <= 0:
            raise ValueError("g0 must be positive")
        if self.nuclear_spin < 0 or (2 * self.nuclear_spin).denominator != 1:
            raise ValueError(f"bad nuclear spin {self.nuclear_spin}")
        if self.hyperfine_A is not None and not self.hyperfine_A > 0:
            raise ValueError("hyperfine_A must be positive when given")

    def with_hyperfine(self, a_hz: Optional[float]) -> "DonorSpecies":
        return replace(self, hyperfine_A=a_hz)

    def projections(self) -> list[Fraction]:
        two_i = int(2 * self.nuclear_spin)
        return [Fraction(-two_i + 2 * k, 2) for k in range(two_i + 1)]

    def f0_from_field(self, b0_tesla: float) -> float:
        return resonance_frequency(self.g0, b0_tesla)


AS75 = DonorSpecies("As75", g0=1.57, nuclear_spin=Fraction(3, 2), valley_g=AS75_VALLEY_G)
P31 = DonorSpecies("P31", g0=1.5631, nuclear_spin=Fraction(1, 2), valley_g=P31_VALLEY_G)
DONORS = {"As75": AS75, "P31": P31}


def donor(name: str, hyperfine_A: Optional[float] = None, g0: Optional[float] = None) -> DonorSpecies:
    """Look up a built-in donor by name ("As75" or "P31"), optionally overriding values."""
    try:
        d = DONORS[name]
    except KeyError:
        raise ValueError(f"unknown donor {name!r}; expected one of {sorted(DONORS)}") from None
    if g0 is not None:
        d = replace(d, g0=g0)
    return d.with_hyperfine(hyperfine_A)


class Source(str, enum.Enum):
    experiment = "experiment"
    theory = "theory"
    inferred = "inferred"


@dataclass(frozen=True)
class StarkParameters:
    """Spin-orbit (eta_g) and hyperfine (eta_A) Stark parameters in um^2/V^2.

    ``None`` marks a value that was never measured or computed, which is
    different from a measured zero.
    """

    eta_g: Optional[float]
    eta_A: Optional[float] = None
    source: Source = Source.experiment
    eta_g_err: Optional[float] = None
    eta_A_err: Optional[float] = None


@dataclass(frozen=True)
class FieldConfiguration:
    e_direction: MillerDirection
    b_direction: MillerDirection
    spectrometer_frequency: float  # Hz
    e_magnitude: float = 0.0  # V/cm
    polarity: str = "bipolar"

    def __post_init__(self):
        object.__setattr__(self, "e_direction", MillerDirection.parse(self.e_direction))
        object.__setattr__(self, "b_direction", MillerDirection.parse(self.b_direction))
        if self.e_magnitude < 0:
            raise ValueError("e_magnitude must be >= 0")
        if not self.spectrometer_frequency > 0:
            raise ValueError("spectrometer_frequency must be > 0")
        if self.polarity not in ("unipolar", "bipolar"):
            raise ValueError(f"polarity must be 'unipolar' or 'bipolar', got {self.polarity!r}")

    @property
    def geometry(self) -> Geometry:
        return classify_geometry(self.e_direction, self.b_direction)


@dataclass(frozen=True)
class StrainConfiguration:
    """Strain as an internal field (V/cm), collinear with the applied field."""

    e_internal: float = 0.0


NO_STRAIN = StrainConfiguration()


def as_projection(m_i: Projection) -> Optional[Fraction]:
    if m_i is None:
        return None
    return Fraction(m_i)


def check_projection(d: DonorSpecies, m_i: Projection) -> Optional[Fraction]:
    m = as_projection(m_i)
    if m is None:
        return None
    if abs(m) > d.nuclear_spin or (m + d.nuclear_spin).denominator != 1:
        raise InvalidProjection(f"M_I={m} is not allowed for {d.name} (I={d.nuclear_spin})")
    return m


def shift_coefficient(p: StarkParameters, d: DonorSpecies, f0: float, m_i: Projection = AVERAGED) -> float:
    """Stark coefficient in Hz per (V/um)^2 for one hyperfine line."""
    if p.eta_g is None:
        raise MissingParameter("eta_g is absent for this orientation")
    m = check_projection(d, m_i)
    coeff = p.eta_g * f0
    if m is not None:
        if p.eta_A is None:
            raise MissingHyperfineParameter(
                "eta_A is absent; only the line-averaged shift (m_i=AVERAGED) is defined"
            )
        if d.hyperfine_A is None:
            raise MissingHyperfineConstant(f"hyperfine constant A for {d.name} is not configured")
        coeff += p.eta_A * d.hyperfine_A * float(m)
    return coeff


def stark_shift(p: StarkParameters, d: DonorSpecies, f0: float, m_i: Projection, e_field: float) -> float:
    """Frequency shift in Hz at ``e_field`` V/cm. Even in the field."""
    e = e_field / UM_PER_CM
    return shift_coefficient(p, d, f0, m_i) * e * e


def shift_with_strain(p, d, f0, m_i, e_ext: float, strain: StrainConfiguration = NO_STRAIN) -> float:
    """Shift when a strain-equivalent internal field adds to the applied one."""
    e = (strain.e_internal + e_ext) / UM_PER_CM
    return shift_coefficient(p, d, f0, m_i) * e * e


def bipolar_effective_shift(p, d, f0, m_i, e_ext: float, strain: StrainConfiguration = NO_STRAIN) -> float:
    """Mean shift over the +E and -E halves of an ideal bipolar pulse."""
    return 0.5 * (shift_with_strain(p, d, f0, m_i, e_ext, strain) + shift_with_strain(p, d, f0, m_i, -e_ext, strain))


# -- registry -------------------------------------------------------------

_ROW_KEYS = {
    "donor", "e_direction", "geometry", "b_direction",
    "eta_g_exp", "eta_g_exp_err", "eta_g_theory", "eta_g_inferred",
    "eta_a_exp", "eta_a_exp_err", "eta_a_theory",
}

RegistryKey = tuple  # (donor, e axis key, geometry, b axis key)


def _key(donor_name: str, e_dir: DirectionLike, b_dir: DirectionLike) -> RegistryKey:
    e = MillerDirection.parse(e_dir)
    b = MillerDirection.parse(b_dir)
    return (donor_name, e.axis_key(), classify_geometry(e, b).value, b.axis_key())


@dataclass(frozen=True)
class RegistryRow:
    donor: str
    e_direction: MillerDirection
    geometry: Geometry
    b_direction: MillerDirection
    values: Mapping[str, float] = field(default_factory=dict)

    def params(self, source: Source) -> Optional[StarkParameters]:
        v = self.values
        if source is Source.experiment:
            p = StarkParameters(v.get("eta_g_exp"), v.get("eta_a_exp"), source,
                                v.get("eta_g_exp_err"), v.get("eta_a_exp_err"))
        elif source is Source.theory:
            p = StarkParameters(v.get("eta_g_theory"), v.get("eta_a_theory"), source)
        else:
            p = StarkParameters(v.get("eta_g_inferred"), None, source)
        if p.eta_g is None and p.eta_A is None:
            return None
        return p

    def to_json(self) -> dict:
        out = {
            "donor": self.donor,
            "e_direction": self.e_direction.to_list(),
            "geometry": self.geometry.value,
            "b_direction": self.b_direction.to_list(),
        }
        out.update(self.values)
        return out

    @property
    def label(self) -> str:
        return f"{self.donor} E{self.e_direction} {self.geometry.symbol} B{self.b_direction}"


class StarkRegistry:
    """Immutable table of Stark parameters keyed by donor and field orientation."""

    def __init__(self, rows: Iterable[RegistryRow]):
        self._rows = tuple(rows)
        self._index = {}
        for r in self._rows:
            k = _key(r.donor, r.e_direction, r.b_direction)
            if k in self._index:
                raise ValueError(f"duplicate registry row {r.label}")
            self._index[k] = r

    @classmethod
    def from_json(cls, data: list) -> "StarkRegistry":
        rows = []
        for i, item in enumerate(data):
            unknown = set(item) - _ROW_KEYS
            if unknown:
                raise ValueError(f"registry row {i}: unknown fields {sorted(unknown)}")
            e = MillerDirection.parse(item["e_direction"])
            b = MillerDirection.parse(item["b_direction"])
            geom = classify_geometry(e, b)
            if item.get("geometry", geom.value) != geom.value:
                raise ValueError(f"registry row {i}: geometry {item['geometry']!r} contradicts directions ({geom.value})")
            if item["donor"] not in DONORS:
                raise ValueError(f"registry row {i}: unknown donor {item['donor']!r}")
            values = {k: item[k] for k in sorted(_ROW_KEYS - {"donor", "e_direction", "geometry", "b_direction"}) if k in item}
            rows.append(RegistryRow(item["donor"], e, geom, b, values))
        return cls(rows)

    @classmethod
    def load(cls, path: Union[str, Path, None] = None) -> "StarkRegistry":
        if path is None:
            text = resources.files("gestark").joinpath("data/stark_parameters.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return cls.from_json(json.loads(text))

    def to_json(self) -> list:
        return [r.to_json() for r in self._rows]

    def dump(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n", encoding="utf-8")

    @property
    def rows(self) -> tuple:
        return self._rows

    def row(self, donor_name: str, e_dir: DirectionLike, b_dir: DirectionLike) -> RegistryRow:
        try:
            return self._index[_key(donor_name, e_dir, b_dir)]
        except KeyError:
            raise UnknownOrientation(
                f"no registry row for {donor_name} E={MillerDirection.parse(e_dir)} B={MillerDirection.parse(b_dir)}"
            ) from None

    def lookup(self, donor_name: str, e_dir: DirectionLike, b_dir: DirectionLike,
               source: Union[Source, str] = Source.experiment) -> Optional[StarkParameters]:
        """Parameters for an exact Table row; ``None`` when the cell is empty."""
        return self.row(donor_name, e_dir, b_dir).params(Source(source))

    def experimental_rows(self) -> list:
        return [r for r in self._rows if r.params(Source.experiment) is not None]


_default_registry: Optional[StarkRegistry] = None


def default_registry() -> StarkRegistry:
    global _default_registry
    if _default_registry is None:
        _default_registry = StarkRegistry.load()
    return _default_registry


def lookup(reg: StarkRegistry, donor_name: str, e_dir, b_dir, source=Source.experiment) -> Optional[StarkParameters]:
    return reg.lookup(donor_name, e_dir, b_dir, source)
