"""Cylindrical and cartesian points, phases and magnetic 2-form components.

The magnetic field is handled as the 2-form B = dA with cylindrical
components

    B^Z = d_r A_phi - d_phi A_r
    B^phi = d_Z A_r - d_r A_Z
    B^r = d_phi A_Z - d_Z A_phi

which are not the orthonormal-frame components. The transformation rules in
this module are the only place where the two pictures meet.
"""

import logging
import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from cylint.config import get_config

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class DomainError(Exception):
    """Exception raised when an evaluator is called outside its domain."""

    pass


class AxisError(DomainError):
    """Exception raised for points on the symmetry axis, where phi is undefined."""

    pass


def wrap_angle(phi: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a value just below a multiple of 2*pi can round up to 2*pi
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def _require_finite(value: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"value must be finite, got {value}")
    return value


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class CylPoint(_Frozen):
    """Point in cylindrical coordinates (r, phi, Z)."""

    r: float = Field(gt=0.0)
    phi: float
    z: float

    @field_validator("r", "z")
    @classmethod
    def _finite(cls, v: float) -> float:
        return _require_finite(v)

    @field_validator("phi")
    @classmethod
    def _wrap(cls, v: float) -> float:
        return wrap_angle(_require_finite(v))


class CartPoint(_Frozen):
    """Point in cartesian coordinates."""

    x: float
    y: float
    z: float

    @field_validator("x", "y", "z")
    @classmethod
    def _finite(cls, v: float) -> float:
        return _require_finite(v)


class CylPhase(_Frozen):
    """Cylindrical point with canonical momenta (p_r, p_phi, p_Z)."""

    point: CylPoint
    p_r: float
    p_phi: float
    p_z: float

    @field_validator("p_r", "p_phi", "p_z")
    @classmethod
    def _finite(cls, v: float) -> float:
        return _require_finite(v)

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        """Return (r, phi, Z, p_r, p_phi, p_Z)."""
        pt = self.point
        return (pt.r, pt.phi, pt.z, self.p_r, self.p_phi, self.p_z)

    @classmethod
    def from_values(
        cls, r: float, phi: float, z: float, p_r: float, p_phi: float, p_z: float
    ) -> "CylPhase":
        """Build a phase from six plain numbers."""
        return cls(point=CylPoint(r=r, phi=phi, z=z), p_r=p_r, p_phi=p_phi, p_z=p_z)


class CartPhase(_Frozen):
    """Cartesian point with canonical momenta."""

    point: CartPoint
    p_x: float
    p_y: float
    p_z: float

    @field_validator("p_x", "p_y", "p_z")
    @classmethod
    def _finite(cls, v: float) -> float:
        return _require_finite(v)


class FieldTriple(_Frozen):
    """Cylindrical 2-form components (B^r, B^phi, B^Z) of the magnetic field."""

    b_r: float
    b_phi: float
    b_z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.b_r, self.b_phi, self.b_z)


class CartField(_Frozen):
    """Cartesian magnetic field components."""

    b_x: float
    b_y: float
    b_z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.b_x, self.b_y, self.b_z)


def default_r_min() -> float:
    """Return the configured minimal admissible radius."""
    return get_config().geometry.r_min


def require_radius(r: float, r_min: Optional[float] = None) -> float:
    """Check that r is at or above r_min.

    Args:
        r: Radius to check
        r_min: Threshold. Defaults to the configured geometry.r_min

    Returns:
        r unchanged

    Raises:
        DomainError: If r < r_min or r is not finite
    """
    threshold = default_r_min() if r_min is None else r_min
    if not math.isfinite(r):
        raise DomainError(f"radius must be finite, got {r}")
    if r < threshold:
        raise DomainError(f"radius {r:.6g} is below r_min = {threshold:.3g}")
    return r


def cyl_to_cart_point(p: CylPoint) -> CartPoint:
    """Map (r, phi, Z) to (r cos phi, r sin phi, Z)."""
    return CartPoint(x=p.r * math.cos(p.phi), y=p.r * math.sin(p.phi), z=p.z)


def cart_to_cyl_point(p: CartPoint) -> CylPoint:
    """Inverse of cyl_to_cart_point.

    Raises:
        AxisError: If x = y = 0
    """
    r = math.hypot(p.x, p.y)
    if r == 0.0:
        raise AxisError("phi is undefined on the axis x = y = 0")
    return CylPoint(r=r, phi=math.atan2(p.y, p.x), z=p.z)


def cyl_to_cart_momenta(ph: CylPhase) -> CartPhase:
    """Transform canonical momenta from cylindrical to cartesian coordinates.

    p_x = cos(phi) p_r - sin(phi)/r p_phi, p_y = sin(phi) p_r + cos(phi)/r p_phi.
    """
    r, phi = ph.point.r, ph.point.phi
    c, s = math.cos(phi), math.sin(phi)
    return CartPhase(
        point=cyl_to_cart_point(ph.point),
        p_x=c * ph.p_r - s / r * ph.p_phi,
        p_y=s * ph.p_r + c / r * ph.p_phi,
        p_z=ph.p_z,
    )


def cart_to_cyl_momenta(ph: CartPhase) -> CylPhase:
    """Inverse of cyl_to_cart_momenta."""
    point = cart_to_cyl_point(ph.point)
    c, s = math.cos(point.phi), math.sin(point.phi)
    return CylPhase(
        point=point,
        p_r=c * ph.p_x + s * ph.p_y,
        p_phi=point.r * (-s * ph.p_x + c * ph.p_y),
        p_z=ph.p_z,
    )


def field_cyl_to_cart(f: FieldTriple, at: CylPoint) -> CartField:
    """Convert 2-form components to cartesian field components at a point."""
    r, phi = at.r, at.phi
    c, s = math.cos(phi), math.sin(phi)
    return CartField(
        b_x=c / r * f.b_r - s * f.b_phi,
        b_y=s / r * f.b_r + c * f.b_phi,
        b_z=f.b_z / r,
    )


def field_cart_to_cyl(f: CartField, at: CylPoint) -> FieldTriple:
    """Inverse of field_cyl_to_cart."""
    r, phi = at.r, at.phi
    c, s = math.cos(phi), math.sin(phi)
    return FieldTriple(
        b_r=r * (c * f.b_x + s * f.b_y),
        b_phi=-s * f.b_x + c * f.b_y,
        b_z=r * f.b_z,
    )


def kinetic_energy_cyl(ph: CylPhase) -> float:
    """Free kinetic energy (p_r^2 + p_phi^2/r^2 + p_Z^2)/2."""
    r = ph.point.r
    return 0.5 * (ph.p_r**2 + ph.p_phi**2 / r**2 + ph.p_z**2)


def kinetic_energy_cart(ph: CartPhase) -> float:
    """Free kinetic energy (p_x^2 + p_y^2 + p_z^2)/2."""
    return 0.5 * (ph.p_x**2 + ph.p_y**2 + ph.p_z**2)
