"""How far a donor can be Stark-tuned compared with the ensemble linewidth."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

from .stark import AVERAGED, DonorSpecies, StarkParameters, stark_shift

DEFAULT_E_MAX = 480.0  # V/cm, highest field applied without ionizing the 70Ge:P sample
DEFAULT_LINEWIDTH = 1.1e6  # Hz, 0.01% 73Ge enriched material

# Largest Stark shift reported for a donor electron in silicon (121Sb, M_I = 5/2).
SI_SB_REFERENCE_SHIFT = -3.0  # Hz
SI_SB_REFERENCE_FIELD = 50.0  # V/cm


@dataclass(frozen=True)
class TunabilityReport:
    max_shift: float  # Hz
    linewidth: float  # Hz
    ratio: float
    e_max: float  # V/cm
    orientation: str = ""
    source: str = ""
    comparison_shift_si: float = SI_SB_REFERENCE_SHIFT
    comparison_field_si: float = SI_SB_REFERENCE_FIELD

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        rows = [
            ("orientation", self.orientation or "-", ""),
            ("parameter source", self.source or "-", ""),
            ("max field", f"{self.e_max:.6g}", "V/cm"),
            ("max Stark shift", f"{self.max_shift:.6g}", "Hz"),
            ("ensemble linewidth", f"{self.linewidth:.6g}", "Hz"),
            ("shift / linewidth", f"{self.ratio:.6g}", ""),
            (f"Si:Sb reference @ {self.comparison_field_si:g} V/cm", f"{self.comparison_shift_si:.6g}", "Hz"),
        ]
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        return "\n".join(f"{a:<{w0}}  {b:>{w1}}  {c}".rstrip() for a, b, c in rows) + "\n"


def tunability(
    params: StarkParameters,
    donor: DonorSpecies,
    f0: float,
    e_max: float = DEFAULT_E_MAX,
    linewidth: float = DEFAULT_LINEWIDTH,
    orientation: str = "",
) -> TunabilityReport:
    if e_max < 0:
        raise ValueError("e_max must be >= 0")
    if not linewidth > 0:
        raise ValueError("linewidth must be > 0")
    shift = abs(stark_shift(params, donor, f0, AVERAGED, e_max))
    return TunabilityReport(
        max_shift=shift,
        linewidth=linewidth,
        ratio=shift / linewidth,
        e_max=e_max,
        orientation=orientation,
        source=getattr(params.source, "value", str(params.source)),
    )
