"""F8: user-constrained family with an arbitrary angular psi(phi).

The field is purely axial, B^Z = -rho'/2 - (psi'' + psi)/(2 r^2). Only the
gradient of m1 is known in closed form, so m1 is reconstructed by a path
integral from (r, phi) = (1, 0). Since the slots are free, an instance is
only accepted after its determining residuals vanish on a coarse grid.
"""

import logging
from typing import Any, Optional

import numpy as np
from scipy.integrate import quad

from cylint.auxfields import PHI_SAMPLES, R_SAMPLES, Z_SAMPLES, AuxQuintuple
from cylint.catalog.families import angle_slot, line_slot
from cylint.catalog.system import (
    FamilyDescriptor,
    ParamSpec,
    Rank3Error,
    ResidualGateError,
    SystemInstance,
    ValidationError,
)
from cylint.config import get_config
from cylint.utils.functions import Const, Power, Sum, is_identically_zero

logger = logging.getLogger(__name__)

R_REF = 1.0
QUAD_OPTS = {"epsabs": 1e-13, "epsrel": 1e-12, "limit": 200}
GATE_GRID = (3, 4, 3)


class Polar2D(SystemInstance):
    """F8: A = (0, -rho/2 + (psi'' + psi)/(2 r), 0)."""

    family_id = "F8"
    name = "polar-2d-constrained"
    descriptor = FamilyDescriptor(
        family_id="F8",
        name="polar-2d-constrained",
        summary="Arbitrary angular psi; accepted only if the determining residuals vanish",
        field="B = (0, 0, -rho'/2 - (psi'' + psi)/(2 r^2))",
        potential="W = W1(r) + W2(phi)/r^2 + W4(phi)/r^4 + W3(Z)",
        constants=[
            ParamSpec(name="tau0", default=0.0),
            ParamSpec(name="sigma0", default=0.0),
        ],
        slots=[
            angle_slot("psi"),
            line_slot("rho", "r"),
            line_slot("W1", "r", "radial potential"),
            angle_slot("W2", "angular potential, 1/r^2 part"),
            angle_slot("W4", "angular potential, 1/r^4 part"),
            line_slot("W3", "z", "axial potential"),
            line_slot("mu", "z"),
        ],
        constraints=[
            "mu must vanish",
            "psi' != 0 with mu != 0 and sigma != 0 is the rank-3 case and is rejected",
            "determining residuals must vanish on a coarse grid",
        ],
    )

    def __init__(self, params: dict[str, Any], r_min: Optional[float] = None,
                 gate: bool = True):
        p = params
        self.tau0, self.sigma0 = p["tau0"], p["sigma0"]
        self.psi, self.rho = p["psi"], p["rho"]
        self.W1, self.W2, self.W3, self.W4 = p["W1"], p["W2"], p["W3"], p["W4"]
        mu = p["mu"]
        sigma = Sum(Power(a=self.tau0, n=-2.0), Const(self.sigma0))
        dpsi_zero = self.psi.is_zero or all(self.psi.d1(x) == 0.0 for x in PHI_SAMPLES)
        mu_zero = is_identically_zero(mu, Z_SAMPLES)
        sigma_zero = is_identically_zero(sigma, R_SAMPLES)
        if not dpsi_zero and not mu_zero:
            if not sigma_zero:
                raise Rank3Error(
                    "psi' != 0, mu != 0 and sigma != 0 make M invertible; "
                    "that case is outside the catalog"
                )
            raise ValidationError("mu psi' = 0 is violated: psi' != 0 requires mu = 0")
        if not mu_zero:
            raise ValidationError("the polar family needs mu = 0; use F1 or F4 for mu != 0")
        aux = AuxQuintuple(rho=self.rho, sigma=sigma, tau=Const(self.tau0), psi=self.psi, mu=mu)
        super().__init__(params, aux, r_min)
        if gate:
            self._residual_gate()

    def _residual_gate(self) -> None:
        # imported here: verify depends on the catalog package
        from cylint.verify import Grid, determining_residuals

        cfg = get_config().verify
        grid = Grid.uniform(GATE_GRID, r_range=cfg.r_range, z_range=cfg.z_range)
        report = determining_residuals(self, grid, tol=cfg.tol)
        if not report.passed:
            raise ResidualGateError(
                f"F8 parameters fail the determining equations: worst is "
                f"{report.worst_equation} = {report.max_normalized:.3e} "
                f"at {report.worst_point} (tolerance {cfg.tol:.1e})"
            )
        logger.info("F8 residual gate passed (max %.3e)", report.max_normalized)

    def _bz(self, r: float, phi: float) -> float:
        p0, _, p2, _ = self.psi.jet(phi)
        return -self.rho.d1(r) / 2 - (p2 + p0) / (2 * r * r)

    def _W(self, r, phi, z):
        return self.W1(r) + self.W2(phi) / r**2 + self.W4(phi) / r**4 + self.W3(z)

    def _grad_W(self, r, phi, z):
        return np.array([
            self.W1.d1(r) - 2 * self.W2(phi) / r**3 - 4 * self.W4(phi) / r**5,
            self.W2.d1(phi) / r**2 + self.W4.d1(phi) / r**4,
            self.W3.d1(z),
        ])

    def _A(self, r, phi, z):
        p0, _, p2, _ = self.psi.jet(phi)
        return np.array([0.0, -self.rho(r) / 2 + (p2 + p0) / (2 * r), 0.0])

    def _jac_A(self, r, phi, z):
        p0, p1, p2, p3 = self.psi.jet(phi)
        jac = np.zeros((3, 3))
        jac[1, 0] = -self.rho.d1(r) / 2 - (p2 + p0) / (2 * r * r)
        jac[1, 1] = (p3 + p1) / (2 * r)
        return jac

    def _B(self, r, phi, z):
        return (0.0, 0.0, self._bz(r, phi))

    def _s1(self, r, phi, z):
        p0, p1, _, _ = self.psi.jet(phi)
        return np.array([p1, -p0 / r + self.rho(r), self.tau0])

    def _s2(self, r, phi, z):
        return np.array([0.0, 0.0, self.sigma0])

    def _m1_r(self, r: float, phi: float) -> float:
        return -(self.rho(r) - self.psi(phi) / r) * self._bz(r, phi)

    def _m1_phi(self, r: float, phi: float) -> float:
        w_phi = self.W2.d1(phi) / r**2 + self.W4.d1(phi) / r**4
        return self.psi.d1(phi) * self._bz(r, phi) + 2 * r * r * w_phi

    def _m1(self, r, phi, z):
        along_phi, _ = quad(lambda t: self._m1_phi(R_REF, t), 0.0, phi, **QUAD_OPTS)
        along_r, _ = quad(lambda s: self._m1_r(s, phi), R_REF, r, **QUAD_OPTS)
        return along_phi + along_r

    def _m2(self, r, phi, z):
        return 2 * self.W3(z)
