"""Families whose fields are elementary in the arbitrary slots.

F1 uniform-axial: X1 and X2 both reduce to first-order integrals.
F4 axial-mu-rho: B depends on r and Z, X1 reduces.
F5 tau-sigma: B depends on r and phi, X2 reduces.
F6 polar-x-free: purely axial field from rho(r).
F7 sigma-only: purely azimuthal field from sigma(r).
"""

import logging
from typing import Any, Optional

import numpy as np

from cylint.auxfields import AuxQuintuple
from cylint.catalog.system import (
    FamilyDescriptor,
    LinearIntegral,
    ParamSpec,
    SlotSpec,
    SystemInstance,
)
from cylint.utils.functions import FUNCTION_KINDS, Const

logger = logging.getLogger(__name__)

LINE_KINDS = list(FUNCTION_KINDS)
ANGLE_KINDS = ["zero", "const", "trig", "trigpow"]


def line_slot(name: str, variable: str, description: str = "") -> SlotSpec:
    return SlotSpec(name=name, variable=variable, kinds=LINE_KINDS, description=description)


def angle_slot(name: str, description: str = "") -> SlotSpec:
    return SlotSpec(name=name, variable="phi", kinds=ANGLE_KINDS, periodic=True,
                    description=description)


class UniformAxial(SystemInstance):
    """F1: A = (0, mu0 r^2/2 - rho/2, tau0/(2 r^2) - sigma/2), W = W1(r)."""

    family_id = "F1"
    name = "uniform-axial"
    descriptor = FamilyDescriptor(
        family_id="F1",
        name="uniform-axial",
        summary="Both integrals are squares of first-order integrals",
        field="B = (0, tau0/r^3 + sigma'/2, mu0 r - rho'/2)",
        potential="W = W1(r)",
        constants=[
            ParamSpec(name="tau0", default=0.0, description="azimuthal current constant"),
            ParamSpec(name="mu0", default=1.0, description="uniform axial field strength"),
        ],
        slots=[
            line_slot("rho", "r"),
            line_slot("sigma", "r"),
            line_slot("W1", "r", "radial potential"),
        ],
        reductions=["X1_lin", "X2_lin"],
    )

    def __init__(self, params: dict[str, Any], r_min: Optional[float] = None):
        self.tau0 = params["tau0"]
        self.mu0 = params["mu0"]
        self.rho, self.sigma, self.W1 = params["rho"], params["sigma"], params["W1"]
        aux = AuxQuintuple(rho=self.rho, sigma=self.sigma, tau=Const(self.tau0), mu=Const(self.mu0))
        super().__init__(params, aux, r_min)

    def _W(self, r, phi, z):
        return self.W1(r)

    def _grad_W(self, r, phi, z):
        return np.array([self.W1.d1(r), 0.0, 0.0])

    def _A(self, r, phi, z):
        return np.array([
            0.0,
            self.mu0 * r * r / 2 - self.rho(r) / 2,
            self.tau0 / (2 * r * r) - self.sigma(r) / 2,
        ])

    def _jac_A(self, r, phi, z):
        jac = np.zeros((3, 3))
        jac[1, 0] = self.mu0 * r - self.rho.d1(r) / 2
        jac[2, 0] = -self.tau0 / r**3 - self.sigma.d1(r) / 2
        return jac

    def _B(self, r, phi, z):
        return (0.0, self.tau0 / r**3 + self.sigma.d1(r) / 2, self.mu0 * r - self.rho.d1(r) / 2)

    def _s1(self, r, phi, z):
        return np.array([0.0, self.rho(r) - r * r * self.mu0, self.tau0])

    def _s2(self, r, phi, z):
        return np.array([0.0, self.mu0, self.sigma(r) - self.tau0 / (r * r)])

    def _m1(self, r, phi, z):
        rho, sigma, t, m = self.rho(r), self.sigma(r), self.tau0, self.mu0
        return (t * sigma - r * r * m * rho - t * t / (r * r)) / 2 + (rho**2 + m * m * r**4) / 4

    def _m2(self, r, phi, z):
        rho, sigma, t, m = self.rho(r), self.sigma(r), self.tau0, self.mu0
        return (rho * m - m * m * r * r - t * sigma / (r * r)) / 2 + (sigma**2 + t * t / r**4) / 4

    def _first_order(self):
        return (
            LinearIntegral(1, lambda r, phi, z: (self.rho(r) - self.mu0 * r * r) / 2),
            LinearIntegral(2, lambda r, phi, z: self.sigma(r) / 2 - self.tau0 / (2 * r * r)),
        )


class AxialMuRho(SystemInstance):
    """F4: A = (0, r^2 mu(Z)/2 - rho(r)/2, 0)."""

    family_id = "F4"
    name = "axial-mu-rho"
    descriptor = FamilyDescriptor(
        family_id="F4",
        name="axial-mu-rho",
        summary="Field in the (r, Z) half-plane, X1 reduces to first order",
        field="B = (-r^2 mu'/2, 0, r mu - rho'/2)",
        potential="W = W1(r) - r^2 mu^2/8 + rho mu/4 + W3(Z)",
        slots=[
            line_slot("mu", "z"),
            line_slot("rho", "r"),
            line_slot("W1", "r", "radial potential"),
            line_slot("W3", "z", "axial potential"),
        ],
        reductions=["X1_lin"],
    )

    def __init__(self, params: dict[str, Any], r_min: Optional[float] = None):
        self.mu, self.rho = params["mu"], params["rho"]
        self.W1, self.W3 = params["W1"], params["W3"]
        super().__init__(params, AuxQuintuple(rho=self.rho, mu=self.mu), r_min)

    def _W(self, r, phi, z):
        mu, rho = self.mu(z), self.rho(r)
        return self.W1(r) - r * r * mu * mu / 8 + rho * mu / 4 + self.W3(z)

    def _grad_W(self, r, phi, z):
        mu, dmu = self.mu(z), self.mu.d1(z)
        rho, drho = self.rho(r), self.rho.d1(r)
        return np.array([
            self.W1.d1(r) - r * mu * mu / 4 + drho * mu / 4,
            0.0,
            -r * r * mu * dmu / 4 + rho * dmu / 4 + self.W3.d1(z),
        ])

    def _A(self, r, phi, z):
        return np.array([0.0, r * r * self.mu(z) / 2 - self.rho(r) / 2, 0.0])

    def _jac_A(self, r, phi, z):
        jac = np.zeros((3, 3))
        jac[1, 0] = r * self.mu(z) - self.rho.d1(r) / 2
        jac[1, 2] = r * r * self.mu.d1(z) / 2
        return jac

    def _B(self, r, phi, z):
        return (-r * r * self.mu.d1(z) / 2, 0.0, r * self.mu(z) - self.rho.d1(r) / 2)

    def _s1(self, r, phi, z):
        return np.array([0.0, self.rho(r) - r * r * self.mu(z), 0.0])

    def _s2(self, r, phi, z):
        return np.array([0.0, self.mu(z), 0.0])

    def _m1(self, r, phi, z):
        return (self.rho(r) - r * r * self.mu(z)) ** 2 / 4

    def _m2(self, r, phi, z):
        mu = self.mu(z)
        return -r * r * mu * mu / 2 + mu * self.rho(r) / 2 + 2 * self.W3(z)

    def _first_order(self):
        return (LinearIntegral(1, lambda r, phi, z: (self.rho(r) - r * r * self.mu(z)) / 2), None)


class TauSigma(SystemInstance):
    """F5: A = (0, 0, tau(phi)/(2 r^2) - sigma(r)/2)."""

    family_id = "F5"
    name = "tau-sigma"
    descriptor = FamilyDescriptor(
        family_id="F5",
        name="tau-sigma",
        summary="Field independent of Z, X2 reduces to first order",
        field="B = (tau'/(2 r^2), tau/r^3 + sigma'/2, 0)",
        potential="W = W1(r) - tau^2/(8 r^4) + tau sigma/(4 r^2) + W2(phi)/r^2",
        slots=[
            angle_slot("tau"),
            line_slot("sigma", "r"),
            line_slot("W1", "r", "radial potential"),
            angle_slot("W2", "angular potential"),
        ],
        reductions=["X2_lin"],
    )

    def __init__(self, params: dict[str, Any], r_min: Optional[float] = None):
        self.tau, self.sigma = params["tau"], params["sigma"]
        self.W1, self.W2 = params["W1"], params["W2"]
        super().__init__(params, AuxQuintuple(tau=self.tau, sigma=self.sigma), r_min)

    def _W(self, r, phi, z):
        tau, sigma = self.tau(phi), self.sigma(r)
        return (self.W1(r) - tau * tau / (8 * r**4) + tau * sigma / (4 * r * r)
                + self.W2(phi) / (r * r))

    def _grad_W(self, r, phi, z):
        tau, dtau = self.tau(phi), self.tau.d1(phi)
        sigma, dsigma = self.sigma(r), self.sigma.d1(r)
        w2, dw2 = self.W2(phi), self.W2.d1(phi)
        return np.array([
            self.W1.d1(r) + tau * tau / (2 * r**5) + tau * dsigma / (4 * r * r)
            - tau * sigma / (2 * r**3) - 2 * w2 / r**3,
            -tau * dtau / (4 * r**4) + dtau * sigma / (4 * r * r) + dw2 / (r * r),
            0.0,
        ])

    def _A(self, r, phi, z):
        return np.array([0.0, 0.0, self.tau(phi) / (2 * r * r) - self.sigma(r) / 2])

    def _jac_A(self, r, phi, z):
        jac = np.zeros((3, 3))
        jac[2, 0] = -self.tau(phi) / r**3 - self.sigma.d1(r) / 2
        jac[2, 1] = self.tau.d1(phi) / (2 * r * r)
        return jac

    def _B(self, r, phi, z):
        return (
            self.tau.d1(phi) / (2 * r * r),
            self.tau(phi) / r**3 + self.sigma.d1(r) / 2,
            0.0,
        )

    def _s1(self, r, phi, z):
        return np.array([0.0, 0.0, self.tau(phi)])

    def _s2(self, r, phi, z):
        return np.array([0.0, 0.0, self.sigma(r) - self.tau(phi) / (r * r)])

    def _m1(self, r, phi, z):
        tau = self.tau(phi)
        return tau * (self.sigma(r) - tau / (r * r)) / 2 + 2 * self.W2(phi)

    def _m2(self, r, phi, z):
        return (self.sigma(r) - self.tau(phi) / (r * r)) ** 2 / 4

    def _first_order(self):
        return (None, LinearIntegral(2, lambda r, phi, z: (self.sigma(r) - self.tau(phi) / (r * r)) / 2))


class PolarXFree(SystemInstance):
    """F6: purely axial field -rho'(r)/2, separable potential W1(r) + W3(Z)."""

    family_id = "F6"
    name = "polar-x-free"
    descriptor = FamilyDescriptor(
        family_id="F6",
        name="polar-x-free",
        summary="Axial field depending on r only",
        field="B = (0, 0, -rho'/2)",
        potential="W = W1(r) + W3(Z)",
        slots=[
            line_slot("rho", "r"),
            line_slot("W1", "r", "radial potential"),
            line_slot("W3", "z", "axial potential"),
        ],
    )

    def __init__(self, params: dict[str, Any], r_min: Optional[float] = None):
        self.rho, self.W1, self.W3 = params["rho"], params["W1"], params["W3"]
        super().__init__(params, AuxQuintuple(rho=self.rho), r_min)

    def _W(self, r, phi, z):
        return self.W1(r) + self.W3(z)

    def _grad_W(self, r, phi, z):
        return np.array([self.W1.d1(r), 0.0, self.W3.d1(z)])

    def _A(self, r, phi, z):
        return np.array([0.0, -self.rho(r) / 2, 0.0])

    def _jac_A(self, r, phi, z):
        jac = np.zeros((3, 3))
        jac[1, 0] = -self.rho.d1(r) / 2
        return jac

    def _B(self, r, phi, z):
        return (0.0, 0.0, -self.rho.d1(r) / 2)

    def _s1(self, r, phi, z):
        return np.array([0.0, self.rho(r), 0.0])

    def _s2(self, r, phi, z):
        return np.zeros(3)

    def _m1(self, r, phi, z):
        return self.rho(r) ** 2 / 4

    def _m2(self, r, phi, z):
        return 2 * self.W3(z)


class SigmaOnly(SystemInstance):
    """F7: purely azimuthal field sigma'(r)/2."""

    family_id = "F7"
    name = "sigma-only"
    descriptor = FamilyDescriptor(
        family_id="F7",
        name="sigma-only",
        summary="Azimuthal field depending on r only",
        field="B = (0, sigma'/2, 0)",
        potential="W = W1(r) + W2(phi)/r^2",
        slots=[
            line_slot("sigma", "r"),
            line_slot("W1", "r", "radial potential"),
            angle_slot("W2", "angular potential"),
        ],
    )

    def __init__(self, params: dict[str, Any], r_min: Optional[float] = None):
        self.sigma, self.W1, self.W2 = params["sigma"], params["W1"], params["W2"]
        super().__init__(params, AuxQuintuple(sigma=self.sigma), r_min)

    def _W(self, r, phi, z):
        return self.W1(r) + self.W2(phi) / (r * r)

    def _grad_W(self, r, phi, z):
        return np.array([
            self.W1.d1(r) - 2 * self.W2(phi) / r**3,
            self.W2.d1(phi) / (r * r),
            0.0,
        ])

    def _A(self, r, phi, z):
        return np.array([0.0, 0.0, -self.sigma(r) / 2])

    def _jac_A(self, r, phi, z):
        jac = np.zeros((3, 3))
        jac[2, 0] = -self.sigma.d1(r) / 2
        return jac

    def _B(self, r, phi, z):
        return (0.0, self.sigma.d1(r) / 2, 0.0)

    def _s1(self, r, phi, z):
        return np.zeros(3)

    def _s2(self, r, phi, z):
        return np.array([0.0, 0.0, self.sigma(r)])

    def _m1(self, r, phi, z):
        return 2 * self.W2(phi)

    def _m2(self, r, phi, z):
        return self.sigma(r) ** 2 / 4
