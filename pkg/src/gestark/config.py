"""Run configuration: a single JSON document validated against a schema."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import jsonschema

from .errors import ConfigError
from .experiment import NoiseModel, PulseSequence
from .fitting import FitOptions
from .geometry import MillerDirection
from .stark import (
    DonorSpecies,
    FieldConfiguration,
    Source,
    StarkParameters,
    StarkRegistry,
    StrainConfiguration,
    donor,
)

_direction = {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}


def _obj(props: dict, required=(), **extra) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False, **extra}


SCHEMA = _obj({
    "donor": _obj({
        "species": {"enum": ["As75", "P31"]},
        "g0": _pos,
        "hyperfine_A": _pos,
    }, required=["species"]),
    "field": _obj({
        "e_direction": _direction,
        "b_direction": _direction,
        "e_magnitude": _nonneg,
        "sweep": {"type": "array", "items": {"type": "number"}},
        "polarity": {"enum": ["unipolar", "bipolar"]},
        "f0": _pos,
        "B0": _pos,
        "b_rotation": _obj({
            "axis": _direction,
            "angles_deg": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        }, required=["axis", "angles_deg"]),
    }, required=["e_direction", "b_direction"], **{"not": {"required": ["f0", "B0"]}}),
    "stark": {
        "oneOf": [
            _obj({"registry": {"enum": [s.value for s in Source]}}, required=["registry"]),
            _obj({"eta_g": {"type": "number"}, "eta_A": {"type": "number"}}, required=["eta_g"]),
        ]
    },
    "sequence": _obj({"t_E": _pos, "tau": _pos, "t_half_pi": _pos, "t_pi": _pos}, required=["t_E", "tau"]),
    "noise": _obj({"phase_sigma": _nonneg, "seed": {"type": "integer", "minimum": 0}}),
    "strain": _obj({"e_internal": {"type": "number"}}),
    "fit": _obj({
        "mode": {"enum": ["bipolar_quadratic", "unipolar_with_linear"]},
        "weighting": {"enum": ["uniform", "inverse_variance"]},
        "fit_hyperfine": {"type": "boolean"},
        "intercept": {"type": "boolean"},
    }),
    "tunability": _obj({"e_max": _nonneg, "linewidth": _pos}),
    "gtensor": _obj({
        "g_perp": _pos,
        "g_par": _pos,
        "weights": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "kappa": {"type": "number"},
    }, **{"not": {"required": ["weights", "kappa"]}}),
})

DEFAULT_F0 = 9.6e9


def _where(err: jsonschema.ValidationError) -> str:
    path = ""
    for p in err.absolute_path:
        path += f"[{p}]" if isinstance(p, int) else (f".{p}" if path else p)
    return path or "<root>"


def parse_config(text: str, source: str = "<config>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{source}: {_where(e)}: {e.message}" for e in errors]
        raise ConfigError("\n".join(lines))
    return data


def load_config(path) -> dict:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), str(path))


@dataclass
class RunConfig:
    """Validated configuration with helpers that build domain objects."""

    raw: dict
    registry: StarkRegistry

    def _block(self, name: str) -> dict:
        if name not in self.raw:
            raise ConfigError(f"config is missing the '{name}' block required by this command")
        return self.raw[name]

    def donor(self) -> DonorSpecies:
        b = self._block("donor")
        return donor(b["species"], hyperfine_A=b.get("hyperfine_A"), g0=b.get("g0"))

    def f0(self) -> float:
        f = self.raw.get("field", {})
        if "f0" in f:
            return float(f["f0"])
        if "B0" in f:
            return self.donor().f0_from_field(f["B0"])
        return DEFAULT_F0

    def field(self, e_magnitude: Optional[float] = None) -> FieldConfiguration:
        f = self._block("field")
        mag = f.get("e_magnitude", 0.0) if e_magnitude is None else e_magnitude
        return FieldConfiguration(
            e_direction=MillerDirection.parse(f["e_direction"]),
            b_direction=MillerDirection.parse(f["b_direction"]),
            spectrometer_frequency=self.f0(),
            e_magnitude=mag,
            polarity=f.get("polarity", "bipolar"),
        )

    def sweep(self) -> list:
        f = self._block("field")
        if "sweep" not in f:
            raise ConfigError("field.sweep is required by this command")
        return [float(e) for e in f["sweep"]]

    def e_magnitude(self) -> float:
        f = self._block("field")
        if "e_magnitude" not in f:
            raise ConfigError("field.e_magnitude is required by this command")
        return float(f["e_magnitude"])

    def stark(self) -> StarkParameters:
        s = self._block("stark")
        if "registry" in s:
            f = self._block("field")
            p = self.registry.lookup(self._block("donor")["species"], f["e_direction"], f["b_direction"], s["registry"])
            if p is None:
                raise ConfigError(f"registry has no {s['registry']} values for this orientation")
            return p
        return StarkParameters(eta_g=s["eta_g"], eta_A=s.get("eta_A"), source=Source.experiment)

    def orientation_label(self) -> str:
        fc = self.field()
        return f"E{fc.e_direction} {fc.geometry.symbol} B{fc.b_direction}"

    def sequence(self) -> PulseSequence:
        s = self._block("sequence")
        return PulseSequence(**s)

    def noise(self, seed_override: Optional[int] = None) -> NoiseModel:
        n = dict(self.raw.get("noise", {}))
        if seed_override is not None:
            n["seed"] = seed_override
        return NoiseModel(**n)

    def strain(self) -> StrainConfiguration:
        return StrainConfiguration(**self.raw.get("strain", {}))

    def fit_options(self, **defaults) -> FitOptions:
        opts = dict(defaults)
        opts.update(self.raw.get("fit", {}))
        return FitOptions(**opts)
