"""Rectangular evaluation grids."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.count - 1)


@dataclass(frozen=True)
class Grid:
    """Tensor-product grid; variables that are not listed are held at zero.

    Examples
    --------
    >>> g = Grid.from_mapping({"xt1": (-1, 1, 3)})
    >>> g.shape
    (3,)
    """

    axes: tuple

    def __post_init__(self):
        if not self.axes:
            raise GridError("grid has no axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise GridError("repeated grid variable")
        for a in self.axes:
            if int(a.count) != a.count or a.count < 2:
                raise GridError(f"axis {a.name!r} needs at least 2 points")
            if not (np.isfinite(a.min) and np.isfinite(a.max)) or not a.min < a.max:
                raise GridError(f"axis {a.name!r} needs min < max")

    @classmethod
    def from_mapping(cls, mapping) -> "Grid":
        try:
            axes = tuple(Axis(str(k), float(v[0]), float(v[1]), int(v[2])) for k, v in mapping.items())
        except (TypeError, ValueError, IndexError) as exc:
            raise GridError(f"malformed grid specification: {exc}") from None
        return cls(axes)

    @classmethod
    def parse(cls, text: str) -> "Grid":
        """``"xt1:-3:3:61,xt2:-2:2:41"``."""
        mapping = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            bits = part.split(":")
            if len(bits) != 4:
                raise GridError(f"grid axis {part!r} is not name:min:max:count")
            if bits[0] in mapping:
                raise GridError(f"repeated grid variable {bits[0]!r}")
            mapping[bits[0]] = bits[1:]
        return cls.from_mapping(mapping)

    @property
    def names(self) -> tuple:
        return tuple(a.name for a in self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(a.count for a in self.axes)

    def axis(self, name) -> Axis:
        for a in self.axes:
            if a.name == name:
                return a
        raise KeyError(name)

    def coordinates(self, variables) -> list:
        """Broadcast coordinate arrays (``indexing="ij"``) for the given variable order."""
        unknown = set(self.names) - set(variables)
        if unknown:
            raise GridError(f"grid variables {sorted(unknown)} not among {list(variables)}")
        mesh = dict(zip(self.names, np.meshgrid(*(a.values() for a in self.axes), indexing="ij")))
        zero = np.zeros(self.shape)
        return [mesh.get(v, zero) for v in variables]

    def to_json(self):
        return [{"name": a.name, "min": a.min, "max": a.max, "count": a.count} for a in self.axes]
