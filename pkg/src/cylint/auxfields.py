"""Auxiliary-function machinery for cylindrical-type integrable systems.

Every solution of the second-order determining equations is parameterised by
five one-variable functions rho(r), sigma(r), tau(phi), psi(phi) and mu(Z).
From them follow the first-order coefficients s1, s2 of the integrals, the
magnetic 2-form B, the matrix M constraining grad W and its inhomogeneity
alpha. Residual helpers here evaluate the remaining conditions on W (and on
m1, m2) at single points.
"""

import logging
import math
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from cylint.geometry import CylPoint, DomainError, FieldTriple, TWO_PI, require_radius
from cylint.utils.finite_diff import gradient, mixed_partial, scaled_step
from cylint.utils.functions import (
    Function1D,
    FunctionGrammarError,
    Zero,
    check_periodic,
    is_identically_zero,
)

logger = logging.getLogger(__name__)

PotentialFn = Callable[[float, float, float], float]

# Sample abscissae used for "not identically zero" and periodicity checks
R_SAMPLES = (0.5, 0.8, 1.0, 1.3, 1.7, 2.0)
PHI_SAMPLES = tuple(0.05 + i * TWO_PI / 11 for i in range(11))
Z_SAMPLES = (-1.0, -0.6, -0.2, 0.0, 0.3, 0.7, 1.0)


class AuxQuintuple(BaseModel):
    """The five auxiliary functions rho(r), sigma(r), tau(phi), psi(phi), mu(Z)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rho: Function1D = Zero()
    sigma: Function1D = Zero()
    tau: Function1D = Zero()
    psi: Function1D = Zero()
    mu: Function1D = Zero()

    def check_periodicity(self) -> None:
        """tau and psi must be 2*pi periodic.

        Raises:
            DomainError: If either fails the sampled periodicity check
        """
        for name in ("tau", "psi"):
            try:
                check_periodic(getattr(self, name), PHI_SAMPLES, name=name)
            except FunctionGrammarError as e:
                raise DomainError(str(e))


class AuxJets(NamedTuple):
    """Auxiliary jets (f, f', f'', f''') evaluated at one point."""

    r: float
    rho: tuple[float, float, float, float]
    sigma: tuple[float, float, float, float]
    tau: tuple[float, float, float, float]
    psi: tuple[float, float, float, float]
    mu: tuple[float, float, float, float]


class ResidualEntry(BaseModel):
    """One scalar condition: raw value and value normalised by its largest summand."""

    name: str
    raw: float
    normalized: float


class PointResiduals(BaseModel):
    """Named residuals at a single point."""

    entries: list[ResidualEntry]

    @property
    def max_normalized(self) -> float:
        return max((e.normalized for e in self.entries), default=0.0)

    def as_dict(self) -> dict[str, float]:
        return {e.name: e.normalized for e in self.entries}


def residual(name: str, summands: Sequence[float]) -> ResidualEntry:
    """Sum summands and normalise by max(1, largest |summand|)."""
    raw = math.fsum(summands)
    scale = max([1.0] + [abs(s) for s in summands])
    return ResidualEntry(name=name, raw=raw, normalized=abs(raw) / scale)


def aux_jets(aux: AuxQuintuple, at: CylPoint, r_min: Optional[float] = None) -> AuxJets:
    """Evaluate all five auxiliary jets at a point."""
    r = require_radius(at.r, r_min)
    return AuxJets(
        r=r,
        rho=aux.rho.jet(r),
        sigma=aux.sigma.jet(r),
        tau=aux.tau.jet(at.phi),
        psi=aux.psi.jet(at.phi),
        mu=aux.mu.jet(at.z),
    )


def s_coeffs_from_aux(aux: AuxQuintuple, at: CylPoint) -> tuple[np.ndarray, np.ndarray]:
    """
    First-order coefficients of the two integrals.

    s1 = (psi', -psi/r - r^2 mu + rho, tau), s2 = (0, mu, -tau/r^2 + sigma).

    Raises:
        DomainError: If at.r < r_min
    """
    j = aux_jets(aux, at)
    r = j.r
    s1 = np.array([j.psi[1], -j.psi[0] / r - r * r * j.mu[0] + j.rho[0], j.tau[0]])
    s2 = np.array([0.0, j.mu[0], -j.tau[0] / (r * r) + j.sigma[0]])
    return s1, s2


def b_field_from_aux(aux: AuxQuintuple, at: CylPoint) -> FieldTriple:
    """
    Magnetic 2-form implied by the auxiliary functions.

    Raises:
        DomainError: If at.r < r_min
    """
    j = aux_jets(aux, at)
    r = j.r
    return FieldTriple(
        b_r=-r * r * j.mu[1] / 2 + j.tau[1] / (2 * r * r),
        b_phi=j.tau[0] / r**3 + j.sigma[1] / 2,
        b_z=-j.psi[0] / (2 * r * r) + r * j.mu[0] - j.rho[1] / 2 - j.psi[2] / (2 * r * r),
    )


def matrix_M(aux: AuxQuintuple, at: CylPoint) -> np.ndarray:
    """Coefficient matrix of the algebraic system M . grad W = (0, 0, alpha)."""
    j = aux_jets(aux, at)
    r = j.r
    rho, sigma, tau, psi, mu = j.rho[0], j.sigma[0], j.tau[0], j.psi[0], j.mu[0]
    return np.array(
        [
            [0.0, r * r * mu, r * r * sigma - tau],
            [j.psi[1], rho - r * r * mu - psi / r, tau],
            [0.0, 4 * r**7 * mu, -4 * r**5 * tau],
        ]
    )


def det_M(aux: AuxQuintuple, at: CylPoint) -> float:
    """Closed-form determinant 4 r^9 psi' mu sigma."""
    j = aux_jets(aux, at)
    return 4 * j.r**9 * j.psi[1] * j.mu[0] * j.sigma[0]


def alpha(aux: AuxQuintuple, at: CylPoint) -> float:
    """Inhomogeneity alpha of the third row of M . grad W."""
    j = aux_jets(aux, at)
    r = j.r
    rho, drho = j.rho[0], j.rho[1]
    sigma, dsigma = j.sigma[0], j.sigma[1]
    tau, dtau = j.tau[0], j.tau[1]
    psi, dpsi = j.psi[0], j.psi[1]
    mu, dmu = j.mu[0], j.mu[1]
    first = -dpsi * (
        (-(r**5) * sigma + r**3 * tau) * dsigma
        - r**5 * mu * drho
        + 2 * tau * tau
        - 2 * r * r * sigma * tau
        + r**3 * mu * (r**3 * mu + r * rho - 2 * psi)
    )
    second = -dtau * ((-r * rho + psi) * tau - r * r * sigma * (r**3 * mu - r * rho + psi))
    third = -(r**4) * dmu * tau * (r * rho - psi)
    return first + second + third


def rank_of_M(aux: AuxQuintuple, at: CylPoint, tol: float = 1e-10) -> int:
    """Numerical rank of M at a point."""
    m = matrix_M(aux, at)
    scale = max(1.0, float(np.max(np.abs(m))))
    return int(np.linalg.matrix_rank(m, tol=tol * scale))


def is_rank3(aux: AuxQuintuple) -> bool:
    """True if psi', mu and sigma are all not identically zero (det M generic)."""
    dpsi_zero = all(aux.psi.d1(p) == 0.0 for p in PHI_SAMPLES) or aux.psi.is_zero
    return not (
        dpsi_zero
        or is_identically_zero(aux.mu, Z_SAMPLES)
        or is_identically_zero(aux.sigma, R_SAMPLES)
    )


def _potential_derivatives(
    W: PotentialFn, at: CylPoint, h: float
) -> tuple[np.ndarray, float, float, float]:
    x = np.array([at.r, at.phi, at.z])

    def f(v: np.ndarray) -> float:
        return W(float(v[0]), float(v[1]), float(v[2]))

    def step(i: int, j: int) -> float:
        return scaled_step(h, max(abs(x[i]), abs(x[j])))

    grad = gradient(f, x, h)
    w_rphi = mixed_partial(f, x, 0, 1, step(0, 1))
    w_phiz = mixed_partial(f, x, 1, 2, step(1, 2))
    w_rz = mixed_partial(f, x, 0, 2, step(0, 2))
    return grad, w_rphi, w_phiz, w_rz


def reduced_residuals(
    aux: AuxQuintuple, W: PotentialFn, at: CylPoint, h: float = 1e-4
) -> PointResiduals:
    """
    Residuals of the reduced conditions on the auxiliary functions and W.

    Two algebraic conditions on the quintuple, three conditions on the mixed
    second derivatives of W and the three rows of M . grad W - (0, 0, alpha).
    W derivatives come from fourth-order finite differences.

    Args:
        aux: Auxiliary functions
        W: Potential as a function of (r, phi, Z)
        at: Evaluation point
        h: Base finite-difference step, scaled by max(1, |x|) per axis

    Returns:
        PointResiduals with eight named entries

    Raises:
        DomainError: If at.r < r_min
    """
    j = aux_jets(aux, at)
    r = j.r
    rho, drho, ddrho = j.rho[0], j.rho[1], j.rho[2]
    sigma, dsigma = j.sigma[0], j.sigma[1]
    tau, dtau, ddtau = j.tau[0], j.tau[1], j.tau[2]
    psi, dpsi, ddpsi, dddpsi = j.psi
    mu, dmu, ddmu = j.mu[0], j.mu[1], j.mu[2]

    grad, w_rphi, w_phiz, w_rz = _potential_derivatives(W, at, h)
    w_r, w_phi, w_z = grad
    c5 = 1.0 / (4 * r**5)
    c3 = 1.0 / (4 * r**3)

    entries = [
        residual("aux_a", [dpsi * r**3 * dsigma, 2 * dpsi * tau, -dtau * r * rho, dtau * psi]),
        residual("aux_b", [mu * dpsi, r**3 * sigma * dmu]),
        residual(
            "W_rphi",
            [
                w_rphi,
                2 * w_phi / r,
                -c5 * dpsi * (-3 * ddpsi),
                -c5 * dpsi * r**3 * ddrho,
                c5 * dpsi * r**3 * mu,
                c5 * dpsi * r * r * drho,
                -c5 * dpsi * r * rho,
                c5 * dpsi * 4 * psi,
                -c5 * dtau * r**3 * dsigma,
                -c5 * 2 * tau * dtau,
                c5 * 2 * r**4 * tau * dmu,
                c5 * dddpsi * psi,
                -c5 * dddpsi * r * rho,
            ],
        ),
        residual(
            "W_phiz",
            [
                w_phiz,
                ddmu * tau / 4,
                -r * r * ddmu * sigma / 4,
                ddtau * mu / (4 * r * r),
            ],
        ),
        residual(
            "W_rz",
            [
                w_rz,
                c3 * 2 * r**4 * dmu * mu,
                -c3 * r**3 * dmu * drho,
                -c3 * r * dmu * psi,
                -c3 * 2 * mu * dtau,
            ],
        ),
    ]

    m = matrix_M(aux, at)
    a = alpha(aux, at)
    for row, target in zip(range(3), (0.0, 0.0, a)):
        summands = [m[row, col] * grad[col] for col in range(3)] + [-target]
        entries.append(residual(f"M_row{row + 1}", summands))
    return PointResiduals(entries=entries)


def substituted_residuals(
    aux: AuxQuintuple,
    grad_m1: Sequence[float],
    grad_m2: Sequence[float],
    grad_W: Sequence[float],
    at: CylPoint,
) -> PointResiduals:
    """
    First- and zeroth-order conditions after substituting the auxiliary solution.

    The nine first-order conditions (six on grad m1 / grad m2, mu psi'' = 0 and
    the two bracket conditions on m1_Z and m2_phi) and the two zeroth-order
    conditions s_i . grad W = 0, each rescaled to polynomial form in r.

    Raises:
        DomainError: If at.r < r_min
    """
    j = aux_jets(aux, at)
    r = j.r
    rho, drho = j.rho[0], j.rho[1]
    sigma, dsigma = j.sigma[0], j.sigma[1]
    tau, dtau = j.tau[0], j.tau[1]
    psi, dpsi, ddpsi = j.psi[0], j.psi[1], j.psi[2]
    mu, dmu = j.mu[0], j.mu[1]
    m1r, m1p, m1z = grad_m1
    m2r, m2p, m2z = grad_m2
    w_r, w_p, w_z = grad_W
    S = r * rho - psi - r**3 * mu
    q = r * r * sigma - tau

    entries = [
        residual(
            "m1_r",
            [
                S * ddpsi,
                S * r * r * drho,
                (r**3 * mu + r * rho) * psi,
                -psi * psi,
                r**3 * tau * dsigma,
                2 * r**6 * mu * mu,
                -2 * r**4 * rho * mu,
                2 * tau * tau,
                -2 * r**3 * m1r,
            ],
        ),
        residual(
            "m1_phi",
            [
                dpsi * (2 * r**3 * mu),
                -dpsi * r * r * drho,
                -dpsi * psi,
                -dpsi * ddpsi,
                tau * r**4 * dmu,
                -tau * dtau,
                4 * r**4 * w_p,
                -2 * r * r * m1p,
            ],
        ),
        residual(
            "m1_z",
            [S * dtau, -S * r**4 * dmu, -dpsi * r**3 * dsigma, -2 * dpsi * tau, -2 * r**3 * m1z],
        ),
        residual(
            "m2_r",
            [
                r**3 * mu * ddpsi,
                r**3 * dsigma * q,
                -2 * r**6 * mu * mu,
                r**5 * mu * drho,
                r**3 * mu * psi,
                2 * r * r * sigma * tau,
                -2 * tau * tau,
                -2 * r**5 * m2r,
            ],
        ),
        residual("m2_phi", [r**4 * dmu * q, -dtau * q, -2 * r**4 * m2p]),
        residual("m2_z", [-(r**4) * mu * dmu, mu * dtau, 4 * r * r * w_z, -2 * r * r * m2z]),
        residual("mu_psi2", [mu * ddpsi]),
        residual(
            "m1_z_bracket",
            [-(r**4) * mu * dmu, r * r * rho * dmu, -r * psi * dmu, mu * dtau, 2 * m1z],
        ),
        residual(
            "m2_phi_bracket",
            [dtau * q, r**4 * tau * dmu, r**3 * mu * dpsi, 2 * r**4 * m2p],
        ),
        residual("s2_grad_W", [r * r * mu * w_p, q * w_z]),
        residual("s1_grad_W", [S * w_p, r * dpsi * w_r, r * tau * w_z]),
    ]
    return PointResiduals(entries=entries)
