"""Families built on nonlinear profiles.

F2 exotic-beta is driven by an angular profile gamma(phi) solving
gamma'' = -(gamma'^2 + 12 gamma^2 - 4 beta1 + 2 f1 gamma) / (2 gamma);
beta = sqrt(gamma) plays the role of psi.

F3 elliptic-MT is driven by two profiles M(Z) and T(phi) solving
y'' = (3 C y^2 + 2 C1 y + C2) / 2 with a shared leading constant C and
separate C1, C2 (C~1, C~2 for T). Closed forms use Jacobi elliptic or
elementary functions, the numeric profile integrates the ODE.
"""

import logging
import math
from typing import Any, Callable, Optional

import numpy as np

from cylint.auxfields import AuxQuintuple
from cylint.catalog.families import line_slot
from cylint.catalog.system import (
    FamilyDescriptor,
    LinearIntegral,
    OptionSpec,
    ParamSpec,
    SystemInstance,
    ValidationError,
)
from cylint.geometry import TWO_PI, DomainError
from cylint.odes import (
    InconsistentInitialData,
    ProfileSolution,
    cubic_from_roots,
    gamma_slope,
    mt_second,
    mt_third,
    solve_gamma,
    solve_MT,
)
from cylint.specialfn import ellip_K, jacobi_sn_cn_dn
from cylint.utils.functions import (
    Const,
    JetFunction,
    Power,
    PowerOf,
    Scaled,
    Sum,
    Trig,
)

logger = logging.getLogger(__name__)

# cn^2 below POLE_EPS is a pole of the 1/cn^2 profiles; sampling keeps POLE_MARGIN away
POLE_EPS = 1e-8
POLE_MARGIN = 1e-3
PERIOD_TOL = 1e-9


class ExoticBeta(SystemInstance):
    """F2: field and potential rational in r, driven by gamma(phi)."""

    family_id = "F2"
    name = "exotic-beta"
    descriptor = FamilyDescriptor(
        family_id="F2",
        name="exotic-beta",
        summary="psi' != 0 family driven by an angular profile gamma = beta^2",
        field=(
            "B = (-tau1 gamma'/(2 r^2 gamma^2), tau1/(gamma r^3), "
            "(2 beta1 gamma + beta2)/(4 r^2 gamma^(5/2)))"
        ),
        potential="W = W0/(r^2 gamma) - (4 tau1^2 + beta2)/(32 gamma^2 r^4)",
        constants=[
            ParamSpec(name="sigma0", default=0.0),
            ParamSpec(name="tau0", default=0.0),
            ParamSpec(name="tau1", default=0.0),
            ParamSpec(name="W0", default=0.0),
            ParamSpec(name="f1", default=-8.0),
            ParamSpec(name="beta1", default=-0.5),
            ParamSpec(name="beta2", default=0.0),
            ParamSpec(name="phi0", default=0.0, description="phase of the closed profile"),
            ParamSpec(name="gamma0", default=1.0, description="numeric profile: gamma(0)"),
            ParamSpec(name="branch", default=1.0, description="numeric profile: sign of gamma'(0)"),
            ParamSpec(name="phi_end", default=TWO_PI, description="numeric profile: end of span"),
            ParamSpec(name="steps", default=0.0, description="numeric profile: RK4 steps, 0 = config"),
        ],
        options=[OptionSpec(name="profile", choices=["closed", "numeric"], default="closed")],
        constraints=[
            "closed: f1 < 0, f1/8 < beta1 < 0, beta2 = 0",
            "numeric: gamma0 > 0, 0 < phi_end <= 2 pi",
        ],
        reductions=["X2_lin"],
    )

    def __init__(self, params: dict[str, Any], r_min: Optional[float] = None):
        p = params
        self.sigma0, self.tau0, self.tau1, self.W0 = p["sigma0"], p["tau0"], p["tau1"], p["W0"]
        self.f1, self.beta1, self.beta2 = p["f1"], p["beta1"], p["beta2"]
        self.profile: Optional[ProfileSolution] = None
        if p["profile"] == "closed":
            self.gamma = self._closed_gamma(p["phi0"])
        else:
            self.gamma = self._numeric_gamma(p)
        aux = AuxQuintuple(
            sigma=Sum(Power(a=self.tau0, n=-2.0), Const(self.sigma0)),
            tau=Sum(Const(self.tau0), Scaled(self.tau1, PowerOf(self.gamma, -1.0))),
            psi=PowerOf(self.gamma, 0.5),
        )
        super().__init__(params, aux, r_min)
        if self.profile is not None:
            self.phi_domain = self.profile.span

    def _closed_gamma(self, phi0: float) -> Sum:
        f1, beta1 = self.f1, self.beta1
        if not (f1 < 0.0 and f1 / 8 < beta1 < 0.0 and self.beta2 == 0.0):
            raise ValidationError(
                "closed gamma profile needs f1 < 0, f1/8 < beta1 < 0 and beta2 = 0 "
                f"(got f1={f1:g}, beta1={beta1:g}, beta2={self.beta2:g})"
            )
        radicand = 64 * beta1 + f1 * f1
        if radicand < 0.0:
            raise ValidationError(f"closed gamma profile needs 64 beta1 + f1^2 >= 0, got {radicand:g}")
        amp = math.sqrt(radicand) / 8
        # amp sin 2(phi - phi0) - f1/8
        return Sum(
            Const(-f1 / 8),
            Trig(a=amp * math.cos(2 * phi0), b=-amp * math.sin(2 * phi0), k=2.0),
        )

    def _numeric_gamma(self, p: dict[str, Any]) -> JetFunction:
        branch = int(p["branch"])
        phi_end = p["phi_end"]
        if not 0.0 < phi_end <= TWO_PI:
            raise ValidationError(f"phi_end must lie in (0, 2 pi], got {phi_end:g}")
        try:
            slope = gamma_slope(self.f1, self.beta1, self.beta2, p["gamma0"], branch)
            sol = solve_gamma(
                self.f1, self.beta1, self.beta2, p["gamma0"], slope,
                (0.0, phi_end), steps=int(p["steps"]) or None,
            )
        except InconsistentInitialData as e:
            raise ValidationError(f"numeric gamma profile: {e}")
        if sol.truncated:
            logger.warning(
                "F2 gamma profile only covers phi in [%.6g, %.6g] (%s)",
                *sol.span, sol.truncation_reason,
            )
        self.profile = sol
        return JetFunction(sol.jet, label="gamma(numeric)")

    def _g(self, phi: float) -> tuple[float, float]:
        g, dg, _, _ = self.gamma.jet(phi)
        return g, dg

    def _W(self, r, phi, z):
        g, _ = self._g(phi)
        return self.W0 / (r * r * g) - (4 * self.tau1**2 + self.beta2) / (32 * g * g * r**4)

    def _grad_W(self, r, phi, z):
        g, dg = self._g(phi)
        c = 4 * self.tau1**2 + self.beta2
        return np.array([
            -2 * self.W0 / (r**3 * g) + c / (8 * g * g * r**5),
            -self.W0 * dg / (r * r * g * g) + c * dg / (16 * g**3 * r**4),
            0.0,
        ])

    def _A(self, r, phi, z):
        g, _ = self._g(phi)
        return np.array([
            0.0,
            -(2 * self.beta1 * g + self.beta2) / (4 * g**2.5 * r),
            self.tau1 / (2 * g * r * r),
        ])

    def _jac_A(self, r, phi, z):
        g, dg = self._g(phi)
        n = (2 * self.beta1 * g + self.beta2) / g**2.5
        dn = -dg * (3 * self.beta1 * g + 2.5 * self.beta2) / g**3.5
        jac = np.zeros((3, 3))
        jac[1, 0] = n / (4 * r * r)
        jac[1, 1] = -dn / (4 * r)
        jac[2, 0] = -self.tau1 / (g * r**3)
        jac[2, 1] = -self.tau1 * dg / (2 * g * g * r * r)
        return jac

    def _B(self, r, phi, z):
        g, dg = self._g(phi)
        return (
            -self.tau1 * dg / (2 * r * r * g * g),
            self.tau1 / (g * r**3),
            (2 * self.beta1 * g + self.beta2) / (4 * r * r * g**2.5),
        )

    def _s1(self, r, phi, z):
        g, dg = self._g(phi)
        beta = math.sqrt(g)
        return np.array([dg / (2 * beta), -beta / r, self.tau0 + self.tau1 / g])

    def _s2(self, r, phi, z):
        g, _ = self._g(phi)
        return np.array([0.0, 0.0, self.sigma0 - self.tau1 / (r * r * g)])

    def _m1(self, r, phi, z):
        g, _ = self._g(phi)
        t0, t1 = self.tau0, self.tau1
        num = 4 * g * t0 * t1 + 2 * self.beta1 * g + 4 * t1 * t1 + self.beta2
        return 2 * self.W0 / g - num / (8 * g * g * r * r)

    def _m2(self, r, phi, z):
        g, _ = self._g(phi)
        return self.tau1 / (g * r * r) * (self.tau1 / (4 * g * r * r) - self.sigma0 / 2)

    def _first_order(self):
        return (None, LinearIntegral(2, lambda r, phi, z: -self.tau1 / (2 * self._g(phi)[0] * r * r)))


Jet4 = tuple[float, float, float, float, float]


class CubicProfile:
    """Solution of y'' = (3 C y^2 + 2 C1 y + C2)/2 given as value and slope.

    Higher derivatives come from the ODE, so every form shares one jet code path.
    """

    def __init__(self, C: float, C1: float, C2: float,
                 value_slope: Callable[[float], tuple[float, float]],
                 pole: Optional[Callable[[float], float]] = None, label: str = "profile"):
        self.C, self.C1, self.C2 = C, C1, C2
        self.value_slope = value_slope
        self.pole = pole
        self.label = label

    def jet4(self, x: float) -> Jet4:
        y, dy = self.value_slope(x)
        d2 = mt_second(self.C, self.C1, self.C2, y)
        d3 = mt_third(self.C, self.C1, y, dy)
        d4 = 3 * self.C * dy * dy + (3 * self.C * y + self.C1) * d2
        return (y, dy, d2, d3, d4)

    def derivative(self) -> JetFunction:
        """y' as a Function1D (its jet needs the fourth derivative of y)."""
        return JetFunction(lambda x: self.jet4(x)[1:], label=f"d/dx {self.label}")

    def pole_distance(self, x: float) -> float:
        """cn^2 at x for the 1/cn^2 forms, +inf otherwise."""
        return math.inf if self.pole is None else self.pole(x)


def sn2_profile(C: float, roots: tuple[float, float, float], label: str) -> CubicProfile:
    """Bounded form (y2 - y3) sn^2(w x, k) + y3 with roots y1 > y2 >= y3."""
    y1, y2, y3 = roots
    C1, C2, _ = cubic_from_roots(C, roots)
    k = math.sqrt(min(max((y2 - y3) / (y1 - y3), 0.0), 1.0))
    w = math.sqrt(C * (y1 - y3)) / 2

    def value_slope(x: float) -> tuple[float, float]:
        sn, cn, dn = jacobi_sn_cn_dn(w * x, k)
        return (y2 - y3) * sn * sn + y3, 2 * (y2 - y3) * sn * cn * dn * w

    return CubicProfile(C, C1, C2, value_slope, label=label)


def pole_profile(C: float, roots: tuple[float, float, float], label: str) -> CubicProfile:
    """Unbounded form y2 + (y1 - y2)/cn^2(w x, k), w = sqrt(C (y1 - y3))/2."""
    y1, y2, y3 = roots
    C1, C2, _ = cubic_from_roots(C, roots)
    k = math.sqrt(min(max((y2 - y3) / (y1 - y3), 0.0), 1.0))
    w = math.sqrt(C * (y1 - y3)) / 2

    def cn2(x: float) -> float:
        return jacobi_sn_cn_dn(w * x, k)[1] ** 2

    def value_slope(x: float) -> tuple[float, float]:
        sn, cn, dn = jacobi_sn_cn_dn(w * x, k)
        if cn * cn < POLE_EPS:
            raise DomainError(f"{label} has a pole near {x:.6g}")
        return y2 + (y1 - y2) / (cn * cn), 2 * (y1 - y2) * sn * dn / cn**3 * w

    return CubicProfile(C, C1, C2, value_slope, pole=cn2, label=label)


class EllipticMT(SystemInstance):
    """F3: A = (0, r^2 M'(Z)/2, T'(phi)/(2 r^2))."""

    family_id = "F3"
    name = "elliptic-MT"
    descriptor = FamilyDescriptor(
        family_id="F3",
        name="elliptic-MT",
        summary="Field driven by cubic-oscillator profiles M(Z) and T(phi)",
        field="B = (T''/(2 r^2) - r^2 M''/2, T'/r^3, r M')",
        potential=(
            "W = -T'' M/(4 r^2) - T M''/4 - r^2 M'^2/8 - T'^2/(8 r^4) "
            "+ W1(r) + W2(T)/r^2 + W3(M)"
        ),
        constants=[
            ParamSpec(name="w0", default=0.0, description="linear coefficient of W2 and W3"),
            ParamSpec(name="C", default=0.0, description="leading cubic constant"),
            ParamSpec(name="t_periods", default=1.0,
                      description="periods of T on [0, 2 pi); fixes C when > 0"),
            ParamSpec(name="M1", default=3.0),
            ParamSpec(name="M2", default=2.0),
            ParamSpec(name="M3", default=1.0),
            ParamSpec(name="T1", default=2.0),
            ParamSpec(name="T2", default=1.0),
            ParamSpec(name="T3", default=0.0),
            ParamSpec(name="k0", default=1.0),
            ParamSpec(name="k1", default=0.0),
            ParamSpec(name="k2", default=0.0),
            ParamSpec(name="k3", default=0.0),
            ParamSpec(name="kt0", default=1.0),
            ParamSpec(name="kt1", default=0.0),
            ParamSpec(name="kt2", default=0.0),
            ParamSpec(name="kt3", default=0.0),
            ParamSpec(name="C1", default=0.0, description="numeric M: linear cubic constant"),
            ParamSpec(name="C2", default=0.0, description="numeric M: constant term"),
            ParamSpec(name="M0", default=0.0, description="numeric M: M(0)"),
            ParamSpec(name="dM0", default=0.0, description="numeric M: M'(0)"),
            ParamSpec(name="z_min", default=-1.0),
            ParamSpec(name="z_max", default=1.0),
            ParamSpec(name="steps", default=0.0, description="numeric M: RK4 steps, 0 = config"),
        ],
        slots=[line_slot("W1", "r", "radial potential")],
        options=[
            OptionSpec(
                name="profile",
                choices=["jacobi-ex1", "jacobi-ex2", "elementary-ex3", "elementary-ex4",
                         "trig-exp", "numeric"],
                default="jacobi-ex1",
            ),
            OptionSpec(name="wiring", choices=["printed", "swapped"], default="printed",
                       description="which cubic constant enters W2 and W3"),
        ],
        constraints=[
            "jacobi-ex1, jacobi-ex2: M1 > M2 > M3",
            "elementary-ex3: M1 = M2 > M3; elementary-ex4: M1 > M2 = M3",
            "T roots T1 > T2 >= T3 with an integer number of periods in 2 pi",
            "trig-exp: C = 0, k0 != 0, integer kt0 != 0",
        ],
    )

    def __init__(self, params: dict[str, Any], r_min: Optional[float] = None):
        p = params
        self.w0 = p["w0"]
        self.W1 = p["W1"]
        self.profile: Optional[ProfileSolution] = None
        kind = p["profile"]
        C = p["C"]
        if kind == "trig-exp":
            if C != 0.0:
                raise ValidationError(f"trig-exp profiles need C = 0, got {C:g}")
            self.T = self._trig_T(p)
            self.M = self._exp_M(p)
        elif kind == "numeric":
            self.T = self._trig_T(p) if C == 0.0 else self._sn2_T(p, C)
            self.M = self._numeric_M(p, C)
        else:
            if p["t_periods"] > 0:
                C = self._periodic_C(p)
            if C <= 0.0:
                raise ValidationError(f"{kind} profiles need C > 0, got {C:g}")
            self.T = self._sn2_T(p, C)
            self.M = self._closed_M(kind, p, C)
        self.C = C
        if p["wiring"] == "printed":
            self.c_w2, self.c_w3 = self.M.C1, self.T.C1
        else:
            self.c_w2, self.c_w3 = self.T.C1, self.M.C1
        aux = AuxQuintuple(tau=self.T.derivative(), mu=self.M.derivative())
        super().__init__(params, aux, r_min)
        if self.profile is not None:
            self.z_domain = self.profile.span

    # -- profile construction ---------------------------------------------
    @staticmethod
    def _T_roots(p: dict[str, Any]) -> tuple[float, float, float]:
        roots = (p["T1"], p["T2"], p["T3"])
        if not roots[0] > roots[1] >= roots[2]:
            raise ValidationError(f"T roots need T1 > T2 >= T3, got {roots}")
        return roots

    def _periodic_C(self, p: dict[str, Any]) -> float:
        n = p["t_periods"]
        if not float(n).is_integer():
            raise ValidationError(f"t_periods must be an integer, got {n:g}")
        t1, t2, t3 = self._T_roots(p)
        k = math.sqrt((t2 - t3) / (t1 - t3))
        return 4 * n * n * ellip_K(k) ** 2 / (math.pi**2 * (t1 - t3))

    def _sn2_T(self, p: dict[str, Any], C: float) -> CubicProfile:
        roots = self._T_roots(p)
        t1, t2, t3 = roots
        if t2 > t3:
            k = math.sqrt((t2 - t3) / (t1 - t3))
            w = math.sqrt(C * (t1 - t3)) / 2
            periods = TWO_PI * w / (2 * ellip_K(k))
            if abs(periods - round(periods)) > PERIOD_TOL or round(periods) == 0:
                raise ValidationError(
                    f"T is not 2 pi periodic: {periods:.12g} periods in [0, 2 pi)"
                )
        return sn2_profile(C, roots, "T")

    @staticmethod
    def _trig_T(p: dict[str, Any]) -> CubicProfile:
        k0, k1, k2, k3 = p["kt0"], p["kt1"], p["kt2"], p["kt3"]
        if k0 == 0.0 or not float(k0).is_integer():
            raise ValidationError(f"kt0 must be a non-zero integer, got {k0:g}")

        def value_slope(phi: float) -> tuple[float, float]:
            s, c = math.sin(k0 * phi), math.cos(k0 * phi)
            return (k1 * s - k2 * c + k3) / k0, k1 * c + k2 * s

        return CubicProfile(0.0, -k0 * k0, 2 * k0 * k3, value_slope, label="T")

    @staticmethod
    def _exp_M(p: dict[str, Any]) -> CubicProfile:
        k0, k1, k2, k3 = p["k0"], p["k1"], p["k2"], p["k3"]
        if k0 == 0.0:
            raise ValidationError("trig-exp profile needs k0 != 0")

        def value_slope(z: float) -> tuple[float, float]:
            ep, em = k1 * math.exp(k0 * z), k2 * math.exp(-k0 * z)
            return (ep - em + k3) / k0, ep + em

        return CubicProfile(0.0, k0 * k0, -2 * k0 * k3, value_slope, label="M")

    @staticmethod
    def _closed_M(kind: str, p: dict[str, Any], C: float) -> CubicProfile:
        roots = (p["M1"], p["M2"], p["M3"])
        m1, m2, m3 = roots
        tol = 1e-12 * max(1.0, abs(m1), abs(m3))
        if kind in ("jacobi-ex1", "jacobi-ex2"):
            ok = m1 > m2 > m3 and m1 - m2 > tol and m2 - m3 > tol
            rule = "M1 > M2 > M3"
        elif kind == "elementary-ex3":
            ok = abs(m1 - m2) <= tol and m2 > m3
            rule = "M1 = M2 > M3"
        else:
            ok = m1 > m2 and abs(m2 - m3) <= tol
            rule = "M1 > M2 = M3"
        if not ok:
            raise ValidationError(f"{kind} needs {rule}, got {roots}")
        if kind in ("jacobi-ex1", "elementary-ex3"):
            return sn2_profile(C, roots, "M")
        return pole_profile(C, roots, "M")

    def _numeric_M(self, p: dict[str, Any], C: float) -> CubicProfile:
        C1, C2, y0, dy0 = p["C1"], p["C2"], p["M0"], p["dM0"]
        z_min, z_max = p["z_min"], p["z_max"]
        if not z_min < 0.0 < z_max:
            raise ValidationError(f"numeric M needs z_min < 0 < z_max, got ({z_min:g}, {z_max:g})")
        C3 = dy0 * dy0 - (C * y0**3 + C1 * y0 * y0 + C2 * y0)
        steps = int(p["steps"]) or None
        forward = solve_MT(C, C1, C2, C3, y0, dy0, (0.0, z_max), steps=steps)
        backward = solve_MT(C, C1, C2, C3, y0, dy0, (0.0, z_min), steps=steps)
        sol = ProfileSolution.join(backward, forward)
        if sol.truncated:
            logger.warning("F3 M profile only covers Z in [%.6g, %.6g] (%s)",
                           *sol.span, sol.truncation_reason)
        self.profile = sol
        return CubicProfile(C, C1, C2, lambda z: sol.jet(z)[:2], label="M(numeric)")

    # -- evaluators -----------------------------------------------------------
    def _singular(self, r, phi, z):
        if self.M.pole_distance(z) < POLE_EPS:
            return f"M has a pole at Z = {z:.6g}"
        return None

    def _near_singular(self, r, phi, z):
        return self.M.pole_distance(z) < POLE_MARGIN

    def _W2(self, T: float) -> tuple[float, float]:
        return self.w0 * T - self.c_w2 * T * T / 8, self.w0 - self.c_w2 * T / 4

    def _W3(self, M: float) -> tuple[float, float]:
        return self.w0 * M - self.c_w3 * M * M / 8, self.w0 - self.c_w3 * M / 4

    def _W(self, r, phi, z):
        T, dT, ddT, _, _ = self.T.jet4(phi)
        M, dM, ddM, _, _ = self.M.jet4(z)
        return (
            -ddT * M / (4 * r * r) - T * ddM / 4 - r * r * dM * dM / 8 - dT * dT / (8 * r**4)
            + self.W1(r) + self._W2(T)[0] / (r * r) + self._W3(M)[0]
        )

    def _grad_W(self, r, phi, z):
        T, dT, ddT, d3T, _ = self.T.jet4(phi)
        M, dM, ddM, d3M, _ = self.M.jet4(z)
        return np.array([
            ddT * M / (2 * r**3) - r * dM * dM / 4 + dT * dT / (2 * r**5)
            + self.W1.d1(r) - 2 * self._W2(T)[0] / r**3,
            -d3T * M / (4 * r * r) - dT * ddM / 4 - dT * ddT / (4 * r**4)
            + self._W2(T)[1] * dT / (r * r),
            -ddT * dM / (4 * r * r) - T * d3M / 4 - r * r * dM * ddM / 4 + self._W3(M)[1] * dM,
        ])

    def _A(self, r, phi, z):
        return np.array([0.0, r * r * self.M.jet4(z)[1] / 2, self.T.jet4(phi)[1] / (2 * r * r)])

    def _jac_A(self, r, phi, z):
        _, dT, ddT, _, _ = self.T.jet4(phi)
        _, dM, ddM, _, _ = self.M.jet4(z)
        jac = np.zeros((3, 3))
        jac[1, 0] = r * dM
        jac[1, 2] = r * r * ddM / 2
        jac[2, 0] = -dT / r**3
        jac[2, 1] = ddT / (2 * r * r)
        return jac

    def _B(self, r, phi, z):
        _, dT, ddT, _, _ = self.T.jet4(phi)
        _, dM, ddM, _, _ = self.M.jet4(z)
        return (ddT / (2 * r * r) - r * r * ddM / 2, dT / r**3, r * dM)

    def _s1(self, r, phi, z):
        return np.array([0.0, -r * r * self.M.jet4(z)[1], self.T.jet4(phi)[1]])

    def _s2(self, r, phi, z):
        return np.array([0.0, self.M.jet4(z)[1], -self.T.jet4(phi)[1] / (r * r)])

    def _m1(self, r, phi, z):
        T, dT, ddT, _, _ = self.T.jet4(phi)
        M, dM, _, _, _ = self.M.jet4(z)
        return r**4 * dM * dM / 4 - dT * dT / (2 * r * r) - M * ddT / 2 + 2 * self._W2(T)[0]

    def _m2(self, r, phi, z):
        T, dT, _, _, _ = self.T.jet4(phi)
        M, dM, ddM, _, _ = self.M.jet4(z)
        return -r * r * dM * dM / 2 + dT * dT / (4 * r**4) - ddM * T / 2 + 2 * self._W3(M)[0]
