"""Direction algebra for cubic germanium.

Miller-index directions, their unit vectors, and the four <111> conduction
band valley axes. Valley axes are headless: only the outer product n n^T is
ever used downstream, so the sign of each representative is irrelevant.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

from .errors import ZeroDirection

PARALLEL_TOL = 1e-9
PERPENDICULAR_TOL = 1e-9


@dataclass(frozen=True)
class MillerDirection:
    """A crystal direction [hkl] given by signed integer indices."""

    h: int
    k: int
    l: int

    def __post_init__(self):
        for name in ("h", "k", "l"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise TypeError(f"Miller index {name}={v!r} is not an integer")
            object.__setattr__(self, name, int(v))
        if self.h == 0 and self.k == 0 and self.l == 0:
            raise ZeroDirection("direction [000] has no orientation")

    @classmethod
    def parse(cls, value: Union["MillerDirection", Sequence[int], str]) -> "MillerDirection":
        """Build a direction from a triple or a string such as "[-111]", "1-10" or "0 1 -1"."""
        if isinstance(value, MillerDirection):
            return value
        if isinstance(value, str):
            tokens = re.findall(r"-?\d", value) if " " not in value.strip("[] ") else value.strip("[] ").split()
            if len(tokens) != 3:
                raise ValueError(f"cannot parse Miller direction from {value!r}")
            return cls(*(int(t) for t in tokens))
        items = list(value)
        if len(items) != 3:
            raise ValueError(f"Miller direction needs 3 indices, got {len(items)}")
        return cls(*items)

    @property
    def indices(self) -> tuple[int, int, int]:
        return (self.h, self.k, self.l)

    def canonical(self) -> "MillerDirection":
        """Divide out the common factor, keeping signs: [2,2,0] -> [1,1,0]."""
        g = reduce(math.gcd, (abs(i) for i in self.indices))
        return MillerDirection(self.h // g, self.k // g, self.l // g)

    def axis_key(self) -> tuple[int, int, int]:
        """Canonical form of the headless axis (first nonzero index positive)."""
        c = self.canonical().indices
        first = next(i for i in c if i != 0)
        if first < 0:
            c = tuple(-i for i in c)
        return c

    def __str__(self) -> str:
        return "[" + "".join(f"{i}" for i in self.indices) + "]"

    def to_list(self) -> list[int]:
        return list(self.indices)


DirectionLike = Union[MillerDirection, Sequence[float], np.ndarray, str]


def to_unit_vector(d: DirectionLike) -> np.ndarray:
    """Return ``d`` normalized to unit length.

    Miller directions, index triples and arbitrary real 3-vectors are all
    accepted; real vectors are the way to inject a small misalignment.
    """
    if isinstance(d, MillerDirection):
        v = np.array(d.indices, dtype=float)
    elif isinstance(d, str):
        v = np.array(MillerDirection.parse(d).indices, dtype=float)
    else:
        v = np.asarray(d, dtype=float)
        if v.shape != (3,):
            raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ZeroDirection("cannot normalize the zero vector")
    return v / n


# [111], [-111], [1-11], [-1-11]: one representative per valley, all with z > 0
VALLEY_AXES = np.array(
    [[1, 1, 1], [-1, 1, 1], [1, -1, 1], [-1, -1, 1]], dtype=float
) / math.sqrt(3.0)
VALLEY_AXES.setflags(write=False)


def valley_axes() -> np.ndarray:
    """The four <111> valley axes as rows of a (4, 3) array."""
    return VALLEY_AXES


def projection_squared(e_hat, valley_axis) -> float:
    """(e . n)^2 for two unit vectors; insensitive to the sign of either."""
    c = float(np.dot(np.asarray(e_hat, dtype=float), np.asarray(valley_axis, dtype=float)))
    return c * c


def valley_projections(e_hat, valleys: np.ndarray = VALLEY_AXES) -> np.ndarray:
    """Squared projections of ``e_hat`` on every valley axis."""
    return (np.asarray(valleys) @ np.asarray(e_hat, dtype=float)) ** 2


class Geometry(str, enum.Enum):
    parallel = "parallel"
    perpendicular = "perpendicular"
    oblique = "oblique"

    @property
    def symbol(self) -> str:
        return {"parallel": "∥", "perpendicular": "⊥", "oblique": "∠"}[self.value]


def classify_geometry(e_dir: DirectionLike, b_dir: DirectionLike) -> Geometry:
    cos = abs(float(np.dot(to_unit_vector(e_dir), to_unit_vector(b_dir))))
    if cos > 1.0 - PARALLEL_TOL:
        return Geometry.parallel
    if cos < PERPENDICULAR_TOL:
        return Geometry.perpendicular
    return Geometry.oblique
