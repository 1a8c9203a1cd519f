"""Shared domain types: materials, meshes, applied-field profiles and the
per-element Peclet number.

The Peclet number is always recomputed from its constituents
(``mu * sigma * |u_z| * dz / 2``) so the solver and the Z-domain analyzer
can never disagree about it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class InvalidArgumentError(ValueError):
    """Raised when a domain object would violate its invariants."""


class NumericalFailureError(RuntimeError):
    """A linear solve produced an unusable result (singular system, NaNs,
    or a residual beyond the accepted budget)."""


class Scheme(enum.Enum):
    """Input-restatement scheme used on the right-hand side of the assembly."""

    GALERKIN = "galerkin"
    ELEMENT_AVERAGED = "averaged"


@dataclass(frozen=True)
class Material:
    """Conductor properties and rectilinear velocity.

    sigma : electrical conductivity (S/m), > 0
    mu    : magnetic permeability (H/m), > 0
    u_z   : conductor velocity along z (m/s), >= 0
    """

    sigma: float
    mu: float
    u_z: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidArgumentError(f"sigma must be > 0, got {self.sigma}")
        if not self.mu > 0:
            raise InvalidArgumentError(f"mu must be > 0, got {self.mu}")
        if self.u_z < 0:
            raise InvalidArgumentError(f"u_z must be >= 0, got {self.u_z}")


@dataclass(frozen=True)
class Peclet:
    """Dimensionless convective/diffusive strength per element."""

    value: float

    def __post_init__(self):
        if self.value < 0 or math.isnan(self.value):
            raise InvalidArgumentError(f"Peclet value must be >= 0, got {self.value}")

    def __float__(self) -> float:
        return self.value


def peclet_of(material: Material, dz: float) -> Peclet:
    """Peclet number mu*sigma*|u_z|*dz/2 for element length dz."""
    if not dz > 0:
        raise InvalidArgumentError(f"dz must be > 0, got {dz}")
    return Peclet(material.mu * material.sigma * abs(material.u_z) * dz / 2.0)


def material_for_peclet(pe: float, dz: float, sigma: float = 1.0, mu: float = 1.0) -> Material:
    """Material whose velocity realizes the requested Peclet number on dz."""
    if not dz > 0:
        raise InvalidArgumentError(f"dz must be > 0, got {dz}")
    if pe < 0:
        raise InvalidArgumentError(f"pe must be >= 0, got {pe}")
    return Material(sigma=sigma, mu=mu, u_z=2.0 * pe / (mu * sigma * dz))


_LENGTH_RTOL = 1e-12


@dataclass(frozen=True)
class Mesh1D:
    """Uniform 1D node line: length = (node_count - 1) * dz."""

    length: float
    dz: float
    node_count: int

    def __post_init__(self):
        if self.node_count < 3:
            raise InvalidArgumentError(f"node_count must be >= 3, got {self.node_count}")
        if not self.dz > 0:
            raise InvalidArgumentError(f"dz must be > 0, got {self.dz}")
        expect = (self.node_count - 1) * self.dz
        if abs(self.length - expect) > _LENGTH_RTOL * max(abs(expect), 1.0):
            raise InvalidArgumentError(
                f"length {self.length} inconsistent with (N-1)*dz = {expect}")

    @classmethod
    def from_node_count(cls, dz: float, node_count: int) -> "Mesh1D":
        return cls(length=(node_count - 1) * dz, dz=dz, node_count=node_count)

    @classmethod
    def from_length(cls, length: float, dz: float) -> "Mesh1D":
        n = int(round(length / dz)) + 1
        return cls(length=(n - 1) * dz, dz=dz, node_count=n)

    def nodes(self) -> np.ndarray:
        return np.arange(self.node_count) * self.dz

    @property
    def element_count(self) -> int:
        return self.node_count - 1


@dataclass(frozen=True)
class Mesh2D:
    """Structured quadrilateral grid: uniform spacing dz along the flow (z),
    per-row heights along y (grading allowed).

    nz : node columns along z, ny : node rows along y.
    z0, y0 : coordinates of the first node column / row.
    """

    nz: int
    ny: int
    dz: float
    row_heights: tuple
    z0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if self.nz < 3 or self.ny < 3:
            raise InvalidArgumentError(f"nz and ny must be >= 3, got {self.nz}, {self.ny}")
        if not self.dz > 0:
            raise InvalidArgumentError(f"dz must be > 0, got {self.dz}")
        if len(self.row_heights) != self.ny - 1:
            raise InvalidArgumentError(
                f"row_heights must have ny-1 = {self.ny - 1} entries, got {len(self.row_heights)}")
        if any(not h > 0 for h in self.row_heights):
            raise InvalidArgumentError("all row heights must be > 0")
        object.__setattr__(self, "row_heights", tuple(float(h) for h in self.row_heights))

    @classmethod
    def uniform(cls, nz: int, ny: int, dz: float, dy: float,
                z0: float = 0.0, y0: float = 0.0) -> "Mesh2D":
        return cls(nz=nz, ny=ny, dz=dz, row_heights=(dy,) * (ny - 1), z0=z0, y0=y0)

    def node_z(self) -> np.ndarray:
        return self.z0 + np.arange(self.nz) * self.dz

    def node_y(self) -> np.ndarray:
        return self.y0 + np.concatenate([[0.0], np.cumsum(self.row_heights)])

    @property
    def node_count(self) -> int:
        return self.nz * self.ny


@dataclass(frozen=True)
class RectPulse1D:
    """B = amplitude for a <= z <= b, else 0."""

    a: float
    b: float
    amplitude: float

    def __post_init__(self):
        if not self.b > self.a:
            raise InvalidArgumentError(f"pulse needs b > a, got [{self.a}, {self.b}]")

    def sample(self, z, y=0.0):
        z = np.asarray(z, dtype=float)
        out = np.where((z >= self.a) & (z <= self.b), self.amplitude, 0.0)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class RectPulse2D:
    """B = amplitude for |z| <= a and |y| <= b_extent, else 0."""

    a: float
    b_extent: float
    amplitude: float

    def __post_init__(self):
        if not (self.a > 0 and self.b_extent > 0):
            raise InvalidArgumentError("pulse extents must be > 0")

    def sample(self, z, y=0.0):
        z = np.asarray(z, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.where((np.abs(z) <= self.a) & (np.abs(y) <= self.b_extent),
                       self.amplitude, 0.0)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class SmoothCircle2D:
    """B = amplitude inside radius, Gaussian falloff exp(-((r-R)/0.5R)^2) outside."""

    radius: float
    amplitude: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgumentError(f"radius must be > 0, got {self.radius}")

    def sample(self, z, y=0.0):
        z = np.asarray(z, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.sqrt(z * z + y * y)
        tail = self.amplitude * np.exp(-(((r - self.radius) / (0.5 * self.radius)) ** 2))
        out = np.where(r <= self.radius, self.amplitude, tail)
        return out if out.ndim else float(out)


FieldProfile = (RectPulse1D, RectPulse2D, SmoothCircle2D)


def sample_profile(profile, point):
    """Evaluate a field profile at a point (z for 1D, (z, y) for 2D)."""
    if isinstance(point, (tuple, list)):
        return profile.sample(*point)
    return profile.sample(point)
