"""System instances, family descriptors and the integrals of motion.

A SystemInstance bundles the vector potential A (radial gauge, A_r = 0), the
2-form B, the scalar potential W and the data of the two quadratic integrals

    X1 = (p_phi^A)^2 + s1 . p^A + m1
    X2 = (p_Z^A)^2 + s2 . p^A + m2

with p^A = p + A. Evaluators take plain floats (r, phi, Z), wrap phi into
[0, 2*pi) and refuse radii below r_min.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Callable, Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel

from cylint.auxfields import AuxQuintuple
from cylint.geometry import (
    CartField,
    CartPoint,
    CylPhase,
    DomainError,
    FieldTriple,
    cart_to_cyl_point,
    default_r_min,
    field_cyl_to_cart,
    require_radius,
    wrap_angle,
)
from cylint.utils.functions import Function1D

logger = logging.getLogger(__name__)

IntegralName = Literal["H", "X1", "X2", "X1_lin", "X2_lin"]


class ValidationError(Exception):
    """Exception raised when family parameters violate a constraint."""

    pass


class UnknownFamilyError(ValidationError):
    """Exception raised for family ids that are not in the catalog."""

    pass


class Rank3Error(ValidationError):
    """Exception raised for parameters with psi' != 0, mu != 0 and sigma != 0."""

    pass


class ResidualGateError(ValidationError):
    """Exception raised when a user-constrained family fails the residual gate."""

    pass


class UnsupportedReductionError(Exception):
    """Exception raised when a family has no first-order reduction."""

    pass


class ParamSpec(BaseModel):
    """Numeric constant of a family."""

    name: str
    default: float
    description: str = ""


class SlotSpec(BaseModel):
    """Arbitrary one-variable function slot of a family."""

    name: str
    variable: Literal["r", "phi", "z"]
    kinds: list[str]
    periodic: bool = False
    description: str = ""


class OptionSpec(BaseModel):
    """String-valued option such as a profile selector."""

    name: str
    choices: list[str]
    default: str
    description: str = ""


class FamilyDescriptor(BaseModel):
    """Schema and documentation of one catalog family."""

    family_id: str
    name: str
    summary: str
    field: str
    potential: str
    constants: list[ParamSpec] = []
    slots: list[SlotSpec] = []
    options: list[OptionSpec] = []
    constraints: list[str] = []
    reductions: list[str] = []

    def param_names(self) -> list[str]:
        return (
            [c.name for c in self.constants]
            + [s.name for s in self.slots]
            + [o.name for o in self.options]
        )


class LinearIntegral(NamedTuple):
    """First-order integral p^A_axis + offset(r, phi, Z)."""

    axis: int
    offset: Callable[[float, float, float], float]


class SystemInstance(ABC):
    """A fully parameterised member of a catalog family.

    Subclasses implement the underscored evaluators on already checked
    coordinates; the public methods add the radius guard, phi wrapping and
    the regularity check.
    """

    family_id: str = ""
    name: str = ""

    def __init__(self, params: dict[str, Any], aux: AuxQuintuple,
                 r_min: Optional[float] = None):
        self.params = dict(params)
        self.aux = aux
        self.r_min = default_r_min() if r_min is None else r_min
        self.phi_domain: Optional[tuple[float, float]] = None
        self.z_domain: Optional[tuple[float, float]] = None

    # -- subclass hooks -------------------------------------------------
    @abstractmethod
    def _W(self, r: float, phi: float, z: float) -> float: ...

    @abstractmethod
    def _grad_W(self, r: float, phi: float, z: float) -> np.ndarray: ...

    @abstractmethod
    def _A(self, r: float, phi: float, z: float) -> np.ndarray: ...

    @abstractmethod
    def _jac_A(self, r: float, phi: float, z: float) -> np.ndarray: ...

    @abstractmethod
    def _B(self, r: float, phi: float, z: float) -> tuple[float, float, float]: ...

    @abstractmethod
    def _s1(self, r: float, phi: float, z: float) -> np.ndarray: ...

    @abstractmethod
    def _s2(self, r: float, phi: float, z: float) -> np.ndarray: ...

    @abstractmethod
    def _m1(self, r: float, phi: float, z: float) -> float: ...

    @abstractmethod
    def _m2(self, r: float, phi: float, z: float) -> float: ...

    def _first_order(self) -> tuple[Optional[LinearIntegral], Optional[LinearIntegral]]:
        return (None, None)

    def _singular(self, r: float, phi: float, z: float) -> Optional[str]:
        """Reason string if the point is at a pole of a profile, else None."""
        return None

    def _near_singular(self, r: float, phi: float, z: float) -> bool:
        """True if the point is close enough to a pole that sampling should avoid it."""
        return False

    # -- guards ---------------------------------------------------------
    def _point(self, r: float, phi: float, z: float) -> tuple[float, float, float]:
        require_radius(r, self.r_min)
        phi = wrap_angle(phi)
        if self.phi_domain is not None:
            lo, hi = self.phi_domain
            if not lo <= phi <= hi:
                raise DomainError(
                    f"phi = {phi:.6g} outside the solved range [{lo:.6g}, {hi:.6g}]"
                )
        if self.z_domain is not None:
            lo, hi = self.z_domain
            if not lo <= z <= hi:
                raise DomainError(f"Z = {z:.6g} outside the solved range [{lo:.6g}, {hi:.6g}]")
        reason = self._singular(r, phi, z)
        if reason is not None:
            raise DomainError(reason)
        return r, phi, z

    def regular(self, r: float, phi: float, z: float, margin: float = 0.0) -> bool:
        """True if the point and a neighbourhood of size margin can be evaluated."""
        if r - margin < self.r_min:
            return False
        phi = wrap_angle(phi)
        if self.phi_domain is not None:
            lo, hi = self.phi_domain
            if not lo + margin <= phi <= hi - margin:
                return False
        if self.z_domain is not None:
            lo, hi = self.z_domain
            if not lo + margin <= z <= hi - margin:
                return False
        return not self._near_singular(r, phi, z)

    # -- public evaluators ------------------------------------------------
    def W(self, r: float, phi: float, z: float) -> float:
        return self._W(*self._point(r, phi, z))

    def grad_W(self, r: float, phi: float, z: float) -> np.ndarray:
        return self._grad_W(*self._point(r, phi, z))

    def A(self, r: float, phi: float, z: float) -> np.ndarray:
        return self._A(*self._point(r, phi, z))

    def jac_A(self, r: float, phi: float, z: float) -> np.ndarray:
        """Rows are (A_r, A_phi, A_Z), columns the derivatives d_r, d_phi, d_Z."""
        return self._jac_A(*self._point(r, phi, z))

    def B(self, r: float, phi: float, z: float) -> FieldTriple:
        b_r, b_phi, b_z = self._B(*self._point(r, phi, z))
        return FieldTriple(b_r=b_r, b_phi=b_phi, b_z=b_z)

    def s1(self, r: float, phi: float, z: float) -> np.ndarray:
        return self._s1(*self._point(r, phi, z))

    def s2(self, r: float, phi: float, z: float) -> np.ndarray:
        return self._s2(*self._point(r, phi, z))

    def m1(self, r: float, phi: float, z: float) -> float:
        return self._m1(*self._point(r, phi, z))

    def m2(self, r: float, phi: float, z: float) -> float:
        return self._m2(*self._point(r, phi, z))

    def cart_field(self, x: float, y: float, z: float) -> CartField:
        """Cartesian field components at a cartesian point."""
        at = cart_to_cyl_point(CartPoint(x=x, y=y, z=z))
        return field_cyl_to_cart(self.B(at.r, at.phi, at.z), at)

    def first_order(self) -> tuple[Optional[LinearIntegral], Optional[LinearIntegral]]:
        return self._first_order()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.family_id} {self.name}>"


def phase_function(sys: SystemInstance, which: IntegralName) -> Callable[[np.ndarray], float]:
    """Integral `which` as a function of the 6-vector (r, phi, Z, p_r, p_phi, p_Z)."""
    first = sys.first_order() if which in ("X1_lin", "X2_lin") else (None, None)
    if which == "X1_lin" and first[0] is None or which == "X2_lin" and first[1] is None:
        raise UnsupportedReductionError(f"{sys.family_id} has no {which}")

    def f(y: np.ndarray) -> float:
        r, phi, z = float(y[0]), float(y[1]), float(y[2])
        P = np.asarray(y[3:6], dtype=float) + sys.A(r, phi, z)
        if which == "H":
            return 0.5 * (P[0] ** 2 + P[1] ** 2 / r**2 + P[2] ** 2) + sys.W(r, phi, z)
        if which == "X1":
            return float(P[1] ** 2 + sys.s1(r, phi, z) @ P + sys.m1(r, phi, z))
        if which == "X2":
            return float(P[2] ** 2 + sys.s2(r, phi, z) @ P + sys.m2(r, phi, z))
        lin = first[0] if which == "X1_lin" else first[1]
        return float(P[lin.axis] + lin.offset(*sys._point(r, phi, z)))

    return f


def integral_value(sys: SystemInstance, which: IntegralName, ph: CylPhase) -> float:
    """
    Evaluate H, X1, X2 or a first-order integral at a phase point.

    Raises:
        DomainError: Outside the evaluators' domain
        UnsupportedReductionError: For X1_lin / X2_lin on families without them
    """
    return phase_function(sys, which)(np.array(ph.as_tuple()))


def first_order_integrals(
    sys: SystemInstance,
) -> tuple[Optional[Callable[[CylPhase], float]], Optional[Callable[[CylPhase], float]]]:
    """
    First-order integrals X1~, X2~ as phase functions.

    Raises:
        UnsupportedReductionError: If the family exposes neither
    """
    lin1, lin2 = sys.first_order()
    if lin1 is None and lin2 is None:
        raise UnsupportedReductionError(
            f"{sys.family_id} ({sys.name}) has no first-order reduction"
        )
    out1 = (lambda ph: integral_value(sys, "X1_lin", ph)) if lin1 is not None else None
    out2 = (lambda ph: integral_value(sys, "X2_lin", ph)) if lin2 is not None else None
    return out1, out2


class _Wrapped(SystemInstance):
    """Delegates every evaluator to an inner instance."""

    def __init__(self, inner: SystemInstance):
        super().__init__(inner.params, inner.aux, inner.r_min)
        self.inner = inner
        self.family_id = inner.family_id
        self.name = inner.name
        self.phi_domain = inner.phi_domain
        self.z_domain = inner.z_domain

    def _W(self, r, phi, z):
        return self.inner._W(r, phi, z)

    def _grad_W(self, r, phi, z):
        return self.inner._grad_W(r, phi, z)

    def _A(self, r, phi, z):
        return self.inner._A(r, phi, z)

    def _jac_A(self, r, phi, z):
        return self.inner._jac_A(r, phi, z)

    def _B(self, r, phi, z):
        return self.inner._B(r, phi, z)

    def _s1(self, r, phi, z):
        return self.inner._s1(r, phi, z)

    def _s2(self, r, phi, z):
        return self.inner._s2(r, phi, z)

    def _m1(self, r, phi, z):
        return self.inner._m1(r, phi, z)

    def _m2(self, r, phi, z):
        return self.inner._m2(r, phi, z)

    def _first_order(self):
        return self.inner._first_order()

    def _singular(self, r, phi, z):
        return self.inner._singular(r, phi, z)

    def _near_singular(self, r, phi, z):
        return self.inner._near_singular(r, phi, z)


class GaugeShifted(_Wrapped):
    """Same system in the gauge A + grad chi, chi = chi_r(r) + chi_phi(phi) + chi_z(Z)."""

    def __init__(self, inner: SystemInstance, chi_r: Function1D, chi_phi: Function1D,
                 chi_z: Function1D):
        super().__init__(inner)
        self.chi = (chi_r, chi_phi, chi_z)

    def _A(self, r, phi, z):
        cr, cp, cz = self.chi
        return self.inner._A(r, phi, z) + np.array([cr.d1(r), cp.d1(phi), cz.d1(z)])

    def _jac_A(self, r, phi, z):
        cr, cp, cz = self.chi
        return self.inner._jac_A(r, phi, z) + np.diag([cr.d2(r), cp.d2(phi), cz.d2(z)])

    def shift_momenta(self, ph: CylPhase) -> CylPhase:
        """Canonical momenta in the new gauge for the same physical state."""
        pt = ph.point
        cr, cp, cz = self.chi
        return CylPhase(
            point=pt,
            p_r=ph.p_r - cr.d1(pt.r),
            p_phi=ph.p_phi - cp.d1(pt.phi),
            p_z=ph.p_z - cz.d1(pt.z),
        )


def gauge_shifted(sys: SystemInstance, chi_r: Function1D, chi_phi: Function1D,
                  chi_z: Function1D) -> GaugeShifted:
    """Return sys in the gauge A + grad chi; B, W and the integrals are unchanged."""
    return GaugeShifted(sys, chi_r, chi_phi, chi_z)


class PerturbedPotential(_Wrapped):
    """System with W replaced by W + dW; the integrals are left untouched."""

    def __init__(self, inner: SystemInstance,
                 dW: Callable[[float, float, float], float],
                 grad_dW: Callable[[float, float, float], np.ndarray]):
        super().__init__(inner)
        self.dW = dW
        self.grad_dW = grad_dW

    def _W(self, r, phi, z):
        return self.inner._W(r, phi, z) + self.dW(r, phi, z)

    def _grad_W(self, r, phi, z):
        return self.inner._grad_W(r, phi, z) + np.asarray(self.grad_dW(r, phi, z))


def perturb_potential(sys: SystemInstance,
                      dW: Callable[[float, float, float], float],
                      grad_dW: Callable[[float, float, float], np.ndarray]) -> PerturbedPotential:
    """Add dW to the potential (used to break integrability on purpose)."""
    return PerturbedPotential(sys, dW, grad_dW)
