"""Profile ODE solvers for the exotic families.

Two nonlinear ODEs define profiles that have no elementary closed form in
general:

    gamma: gamma gamma'^2 + 4 gamma^3 - 4 beta1 gamma + f1 gamma^2 = beta2
    M/T:   y'^2 = C y^3 + C1 y^2 + C2 y + C3

Both are integrated in differentiated (second-order) form with fixed-step
classical RK4 so that turning points, where the square root of the first
integral changes branch, need no special handling. The first integral is
kept as a monitor and every accepted node satisfies it to monitor_tol.
"""

import logging
import math
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import brentq

from cylint.config import get_config
from cylint.geometry import DomainError

logger = logging.getLogger(__name__)

BLOWUP = 1e8
SPAN_EPS = 1e-12


class InconsistentInitialData(Exception):
    """Exception raised when initial data violate the first integral."""

    pass


class PositivityLoss(Exception):
    """Exception raised when gamma reaches zero inside the requested span."""

    pass


def gamma_monitor(f1: float, beta1: float, beta2: float, g: float, dg: float) -> float:
    """First-integral residual gamma gamma'^2 + 4 gamma^3 - 4 beta1 gamma + f1 gamma^2 - beta2."""
    return g * dg * dg + 4 * g**3 - 4 * beta1 * g + f1 * g * g - beta2


def gamma_second(f1: float, beta1: float, g: float, dg: float) -> float:
    return -(dg * dg + 12 * g * g - 4 * beta1 + 2 * f1 * g) / (2 * g)


def gamma_third(f1: float, beta1: float, g: float, dg: float) -> float:
    ddg = gamma_second(f1, beta1, g, dg)
    dn = 2 * dg * ddg + 24 * g * dg + 2 * f1 * dg
    return -dn / (2 * g) - ddg * dg / g


def mt_monitor(C: float, C1: float, C2: float, C3: float, y: float, dy: float) -> float:
    """First-integral residual y'^2 - (C y^3 + C1 y^2 + C2 y + C3)."""
    return dy * dy - (C * y**3 + C1 * y * y + C2 * y + C3)


def mt_second(C: float, C1: float, C2: float, y: float) -> float:
    return (3 * C * y * y + 2 * C1 * y + C2) / 2


def mt_third(C: float, C1: float, y: float, dy: float) -> float:
    return (3 * C * y + C1) * dy


def cubic_from_roots(C: float, roots: tuple[float, float, float]) -> tuple[float, float, float]:
    """Coefficients (C1, C2, C3) of C (y - y1)(y - y2)(y - y3)."""
    y1, y2, y3 = roots
    return (
        -C * (y1 + y2 + y3),
        C * (y1 * y2 + y1 * y3 + y2 * y3),
        -C * y1 * y2 * y3,
    )


def gamma_closed_form(f1: float, beta1: float, phi0: float = 0.0) -> Callable[[float], float]:
    """Bounded solution for beta2 = 0: (sqrt(64 beta1 + f1^2) sin 2(phi - phi0) - f1) / 8."""
    amp = math.sqrt(64 * beta1 + f1 * f1)
    return lambda phi: (amp * math.sin(2 * (phi - phi0)) - f1) / 8


def gamma_slope(f1: float, beta1: float, beta2: float, gamma0: float, branch: int = 1) -> float:
    """
    Initial slope gamma'(0) from the first integral and a branch sign.

    Raises:
        InconsistentInitialData: If gamma0 <= 0 or the radicand is negative
    """
    if gamma0 <= 0.0:
        raise InconsistentInitialData(f"gamma0 must be positive, got {gamma0}")
    if branch not in (1, -1):
        raise InconsistentInitialData(f"branch must be +1 or -1, got {branch}")
    radicand = (beta2 - 4 * gamma0**3 + 4 * beta1 * gamma0 - f1 * gamma0**2) / gamma0
    if radicand < -1e-14:
        raise InconsistentInitialData(
            f"no real slope at gamma0={gamma0:g}: radicand {radicand:.6g} < 0"
        )
    return branch * math.sqrt(max(radicand, 0.0))


class RealityRegion(BaseModel):
    """Interval between consecutive real roots of the cubic occupied by a profile."""

    roots: list[float]
    lower: Optional[float]
    upper: Optional[float]
    bounded: bool


def reality_region(C: float, C1: float, C2: float, C3: float,
                   values: np.ndarray) -> RealityRegion:
    """Locate the profile's range relative to the real roots of the cubic."""
    coeffs = [C, C1, C2, C3]
    while coeffs and coeffs[0] == 0.0:
        coeffs = coeffs[1:]
    roots: list[float] = []
    if len(coeffs) > 1:
        raw = np.roots(coeffs)
        roots = sorted(float(z.real) for z in raw if abs(z.imag) < 1e-9)
    lo, hi = float(np.min(values)), float(np.max(values))
    lower = max((x for x in roots if x <= lo + 1e-9), default=None)
    upper = min((x for x in roots if x >= hi - 1e-9), default=None)
    return RealityRegion(
        roots=roots, lower=lower, upper=upper, bounded=lower is not None and upper is not None
    )


# Quintic Hermite basis on [0, 1] and first derivatives
def _hermite(t: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    t2, t3, t4, t5 = t * t, t**3, t**4, t**5
    h = (
        1 - 10 * t3 + 15 * t4 - 6 * t5,
        t - 6 * t3 + 8 * t4 - 3 * t5,
        (t2 - 3 * t3 + 3 * t4 - t5) / 2,
        10 * t3 - 15 * t4 + 6 * t5,
        -4 * t3 + 7 * t4 - 3 * t5,
        (t3 - 2 * t4 + t5) / 2,
    )
    dh = (
        -30 * t2 + 60 * t3 - 30 * t4,
        1 - 18 * t2 + 32 * t3 - 15 * t4,
        (2 * t - 9 * t2 + 12 * t3 - 5 * t4) / 2,
        30 * t2 - 60 * t3 + 30 * t4,
        -12 * t2 + 28 * t3 - 15 * t4,
        (3 * t2 - 8 * t3 + 5 * t4) / 2,
    )
    return h, dh


class ProfileSolution(BaseModel):
    """Dense numerical solution of a profile ODE.

    Values and first derivatives between nodes come from quintic Hermite
    interpolation; second and third derivatives are then taken from the ODE
    itself so the jet stays consistent with the equation.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: Literal["gamma", "mt"]
    constants: tuple[float, ...]
    x: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    ddy: np.ndarray
    monitor: np.ndarray
    truncated: bool = False
    truncation_reason: Optional[str] = None
    richardson_error: float = 0.0

    @property
    def span(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    @property
    def branch(self) -> np.ndarray:
        """Sign of the first derivative at each node (+1 where it vanishes)."""
        return np.where(self.dy < 0.0, -1, 1)

    @property
    def max_monitor(self) -> float:
        return float(np.max(np.abs(self.monitor)))

    def _locate(self, x: float) -> tuple[int, float, float]:
        lo, hi = self.span
        if not (lo - SPAN_EPS <= x <= hi + SPAN_EPS):
            raise DomainError(
                f"profile evaluated at {x:.6g}, outside its solved span [{lo:.6g}, {hi:.6g}]"
            )
        i = int(np.searchsorted(self.x, x, side="right")) - 1
        i = min(max(i, 0), self.x.size - 2)
        h = float(self.x[i + 1] - self.x[i])
        return i, h, (x - float(self.x[i])) / h

    def _value_slope(self, x: float) -> tuple[float, float]:
        i, h, t = self._locate(x)
        hb, dhb = _hermite(t)
        data = (
            self.y[i], h * self.dy[i], h * h * self.ddy[i],
            self.y[i + 1], h * self.dy[i + 1], h * h * self.ddy[i + 1],
        )
        value = sum(c * b for c, b in zip(data, hb))
        slope = sum(c * b for c, b in zip(data, dhb)) / h
        return float(value), float(slope)

    def jet(self, x: float) -> tuple[float, float, float, float]:
        """(y, y', y'', y''') at x.

        Raises:
            DomainError: Outside the solved span
        """
        y, dy = self._value_slope(x)
        if self.kind == "gamma":
            f1, beta1, _ = self.constants
            return (y, dy, gamma_second(f1, beta1, y, dy), gamma_third(f1, beta1, y, dy))
        C, C1, C2, _ = self.constants
        return (y, dy, mt_second(C, C1, C2, y), mt_third(C, C1, y, dy))

    def __call__(self, x: float) -> float:
        return self._value_slope(x)[0]

    def radicand(self, x: float) -> float:
        """Square of the first derivative implied by the first integral."""
        y, _ = self._value_slope(x)
        if self.kind == "gamma":
            f1, beta1, beta2 = self.constants
            return (beta2 - 4 * y**3 + 4 * beta1 * y - f1 * y * y) / y
        C, C1, C2, C3 = self.constants
        return C * y**3 + C1 * y * y + C2 * y + C3

    def branch_flips(self) -> list[float]:
        """Abscissae where the first derivative changes sign (turning points)."""
        flips = []
        sign = np.sign(self.dy)
        for i in range(self.x.size - 1):
            if sign[i] * sign[i + 1] < 0:
                a, b = float(self.x[i]), float(self.x[i + 1])
                flips.append(float(brentq(lambda s: self._value_slope(s)[1], a, b, xtol=1e-14)))
            elif sign[i + 1] == 0 and i + 2 < self.x.size and sign[i] * sign[i + 2] < 0:
                flips.append(float(self.x[i + 1]))
        return flips

    @classmethod
    def join(cls, backward: "ProfileSolution", forward: "ProfileSolution") -> "ProfileSolution":
        """Glue a backward solve and a forward solve that share their first node."""
        reasons = [r for r in (backward.truncation_reason, forward.truncation_reason) if r]
        return cls(
            kind=forward.kind,
            constants=forward.constants,
            x=np.concatenate([backward.x[:-1], forward.x]),
            y=np.concatenate([backward.y[:-1], forward.y]),
            dy=np.concatenate([backward.dy[:-1], forward.dy]),
            ddy=np.concatenate([backward.ddy[:-1], forward.ddy]),
            monitor=np.concatenate([backward.monitor[:-1], forward.monitor]),
            truncated=backward.truncated or forward.truncated,
            truncation_reason=", ".join(reasons) or None,
            richardson_error=max(backward.richardson_error, forward.richardson_error),
        )


def _rk4_second_order(
    accel: Callable[[float, float], float],
    y0: float,
    dy0: float,
    a: float,
    b: float,
    steps: int,
    accept: Callable[[float, float, float], Optional[str]],
) -> tuple[list[float], list[float], list[float], Optional[str]]:
    """Fixed-step RK4 for y'' = accel(y, y'); stops at the first rejected node."""
    h = (b - a) / steps
    xs, ys, dys = [a], [y0], [dy0]
    y, v = y0, dy0
    reason = None
    for n in range(1, steps + 1):
        try:
            k1y, k1v = v, accel(y, v)
            k2y, k2v = v + 0.5 * h * k1v, accel(y + 0.5 * h * k1y, v + 0.5 * h * k1v)
            k3y, k3v = v + 0.5 * h * k2v, accel(y + 0.5 * h * k2y, v + 0.5 * h * k2v)
            k4y, k4v = v + h * k3v, accel(y + h * k3y, v + h * k3v)
        except (ZeroDivisionError, OverflowError):
            reason = "singular"
            break
        y_new = y + h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v_new = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        x_new = a + n * h
        reason = accept(x_new, y_new, v_new)
        if reason is not None:
            break
        y, v = y_new, v_new
        xs.append(x_new)
        ys.append(y)
        dys.append(v)
    return xs, ys, dys, reason


def _richardson(full: list[float], half: list[float]) -> float:
    n = min(len(full[::2]), len(half))
    if n == 0:
        return 0.0
    diff = np.abs(np.asarray(full[::2][:n]) - np.asarray(half[:n]))
    return float(np.max(diff)) / 15.0


def _finish(kind: Literal["gamma", "mt"], constants: tuple[float, ...], xs: list[float],
            ys: list[float], dys: list[float], second: Callable[[float, float], float],
            monitor: Callable[[float, float], float], reason: Optional[str],
            richardson: float) -> ProfileSolution:
    x = np.asarray(xs)
    y = np.asarray(ys)
    dy = np.asarray(dys)
    if x.size > 1 and x[0] > x[-1]:
        x, y, dy = x[::-1].copy(), y[::-1].copy(), dy[::-1].copy()
    ddy = np.array([second(a, b) for a, b in zip(y, dy)])
    mon = np.array([monitor(a, b) for a, b in zip(y, dy)])
    if reason is not None:
        logger.warning("%s profile truncated at %.6g (%s)", kind, xs[-1], reason)
    return ProfileSolution(
        kind=kind,
        constants=constants,
        x=x,
        y=y,
        dy=dy,
        ddy=ddy,
        monitor=mon,
        truncated=reason is not None,
        truncation_reason=reason,
        richardson_error=richardson,
    )


def solve_gamma(
    f1: float,
    beta1: float,
    beta2: float,
    gamma0: float,
    dgamma0: float,
    phi_span: tuple[float, float],
    steps: Optional[int] = None,
    strict: bool = False,
) -> ProfileSolution:
    """
    Integrate the gamma profile ODE.

    Args:
        f1, beta1, beta2: Constants of the first integral
        gamma0, dgamma0: Initial value and slope at phi_span[0]
        phi_span: (start, end); end may be smaller than start
        steps: Number of RK4 steps. Defaults to odes.steps from config
        strict: Raise PositivityLoss instead of truncating when gamma
            approaches zero

    Returns:
        ProfileSolution with monitor residual <= odes.monitor_tol on every node

    Raises:
        InconsistentInitialData: If gamma0 <= 0 or the initial data violate
            the first integral by more than odes.consistency_tol
        PositivityLoss: If strict and gamma approaches zero in the span
    """
    cfg = get_config().odes
    steps = steps or cfg.steps
    if gamma0 <= 0.0:
        raise InconsistentInitialData(f"gamma0 must be positive, got {gamma0}")
    m0 = gamma_monitor(f1, beta1, beta2, gamma0, dgamma0)
    if abs(m0) > cfg.consistency_tol:
        raise InconsistentInitialData(
            f"initial data violate the first integral: residual {m0:.3e} "
            f"> {cfg.consistency_tol:.1e}"
        )

    a, b = phi_span

    def accel(g: float, dg: float) -> float:
        return gamma_second(f1, beta1, g, dg)

    def run(n: int) -> tuple[list[float], list[float], list[float], Optional[str]]:
        peak = [gamma0]

        def accept(x: float, g: float, dg: float) -> Optional[str]:
            if not math.isfinite(g) or g <= cfg.gamma_floor * peak[0]:
                return "positivity"
            if abs(gamma_monitor(f1, beta1, beta2, g, dg)) > cfg.monitor_tol:
                return "monitor"
            peak[0] = max(peak[0], g)
            return None

        return _rk4_second_order(accel, gamma0, dgamma0, a, b, n, accept)

    xs, ys, dys, reason = run(steps)
    if reason == "positivity" and strict:
        raise PositivityLoss(f"gamma approaches zero near phi = {xs[-1]:.6g}")
    _, ys_half, _, _ = run(max(steps // 2, 1))
    return _finish(
        "gamma",
        (f1, beta1, beta2),
        xs, ys, dys,
        accel,
        lambda g, dg: gamma_monitor(f1, beta1, beta2, g, dg),
        reason,
        _richardson(ys, ys_half),
    )


def solve_MT(
    C: float,
    C1: float,
    C2: float,
    C3: float,
    y0: float,
    dy0: float,
    span: tuple[float, float],
    steps: Optional[int] = None,
) -> ProfileSolution:
    """
    Integrate y'' = (3 C y^2 + 2 C1 y + C2) / 2 with the cubic first integral as monitor.

    Args:
        C, C1, C2, C3: Cubic coefficients
        y0, dy0: Initial value and slope at span[0]
        span: (start, end); end may be smaller than start
        steps: Number of RK4 steps. Defaults to odes.steps from config

    Returns:
        ProfileSolution; truncated if the monitor bound is exceeded or the
        solution blows up

    Raises:
        InconsistentInitialData: If the initial data violate the first integral
    """
    cfg = get_config().odes
    steps = steps or cfg.steps
    m0 = mt_monitor(C, C1, C2, C3, y0, dy0)
    if abs(m0) > cfg.consistency_tol:
        raise InconsistentInitialData(
            f"initial data violate the first integral: residual {m0:.3e} "
            f"> {cfg.consistency_tol:.1e}"
        )

    def accel(y: float, dy: float) -> float:
        return mt_second(C, C1, C2, y)

    def accept(x: float, y: float, dy: float) -> Optional[str]:
        if not math.isfinite(y) or abs(y) > BLOWUP:
            return "blowup"
        if abs(mt_monitor(C, C1, C2, C3, y, dy)) > cfg.monitor_tol:
            return "monitor"
        return None

    a, b = span
    xs, ys, dys, reason = _rk4_second_order(accel, y0, dy0, a, b, steps, accept)
    _, ys_half, _, _ = _rk4_second_order(accel, y0, dy0, a, b, max(steps // 2, 1), accept)
    return _finish(
        "mt",
        (C, C1, C2, C3),
        xs, ys, dys,
        accel,
        lambda y, dy: mt_monitor(C, C1, C2, C3, y, dy),
        reason,
        _richardson(ys, ys_half),
    )
