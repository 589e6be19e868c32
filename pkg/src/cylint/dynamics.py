"""Hamiltonian trajectories of catalog systems.

H = 1/2 (P_r^2 + P_phi^2 / r^2 + P_Z^2) + W with P = p + A. Integration is
fixed-step, either classical RK4 or the implicit midpoint rule solved by
fixed-point iteration. phi is carried unwrapped while stepping and wrapped
into [0, 2*pi) when states are stored.
"""

import csv
import io
import logging
import math
from pathlib import Path
from typing import Literal, Optional, TextIO, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from cylint.catalog.system import SystemInstance, UnsupportedReductionError, phase_function
from cylint.config import IntegratorSettings, get_config
from cylint.geometry import CylPhase, DomainError, wrap_angle

logger = logging.getLogger(__name__)

STATE_COLUMNS = ("r", "phi", "Z", "p_r", "p_phi", "p_Z")
BASE_OBSERVABLES = ("H", "X1", "X2")
LINEAR_OBSERVABLES = ("X1_lin", "X2_lin")


class ConvergenceError(Exception):
    """Exception raised when the implicit midpoint iteration does not converge."""

    pass


class IntegratorConfig(BaseModel):
    """Step control for integrate(); dt may be negative to run backwards in time."""

    scheme: Literal["implicit-midpoint", "rk4"] = "implicit-midpoint"
    dt: float = 1e-3
    tol: float = 1e-12
    max_iter: int = 50

    @field_validator("dt")
    @classmethod
    def _nonzero_dt(cls, v: float) -> float:
        if v == 0.0 or not math.isfinite(v):
            raise ValueError("dt must be finite and non-zero")
        return v

    @classmethod
    def from_settings(cls, settings: Optional[IntegratorSettings] = None,
                      **overrides: object) -> "IntegratorConfig":
        """Build from the [integrator] config section, with explicit overrides."""
        s = settings or get_config().integrator
        data = {"scheme": s.scheme, "dt": s.dt, "tol": s.tol, "max_iter": s.max_iter}
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


class Trajectory(BaseModel):
    """Sampled trajectory with the integrals evaluated along it."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    family_id: str = ""
    times: np.ndarray
    states: np.ndarray
    observables: dict[str, np.ndarray]
    truncated: bool = False
    truncation_reason: Optional[str] = None

    @property
    def columns(self) -> list[str]:
        return ["t", *STATE_COLUMNS, *self.observables]

    def __len__(self) -> int:
        return int(self.times.size)

    def final_state(self) -> CylPhase:
        return CylPhase.from_values(*self.states[-1])

    def drift(self, name: str) -> float:
        """max |X(t) - X(0)| of an observable."""
        values = self.observables[name]
        return float(np.max(np.abs(values - values[0])))

    def to_csv(self, target: Union[str, Path, TextIO]) -> None:
        """Write one row per sample with 17 significant digits."""
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="", encoding="utf-8") as fh:
                self._write(fh)
        else:
            self._write(target)

    def _write(self, fh: TextIO) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.columns)
        obs = list(self.observables.values())
        for i in range(len(self)):
            row = [self.times[i], *self.states[i], *(o[i] for o in obs)]
            writer.writerow([f"{float(v):.17g}" for v in row])


def read_trajectory_csv(source: Union[str, Path, TextIO]) -> Trajectory:
    """
    Parse a CSV written by Trajectory.to_csv.

    Raises:
        ValueError: If the header does not start with t and the six state columns
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0][:7]) != ("t", *STATE_COLUMNS):
        raise ValueError("not a trajectory CSV: expected header t,r,phi,Z,p_r,p_phi,p_Z,...")
    header = rows[0]
    data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    data = data.reshape(-1, len(header))
    return Trajectory(
        times=data[:, 0],
        states=data[:, 1:7],
        observables={name: data[:, 7 + i] for i, name in enumerate(header[7:])},
    )


def _rhs(sys: SystemInstance, y: np.ndarray) -> np.ndarray:
    r, phi, z = float(y[0]), float(y[1]), float(y[2])
    P = y[3:6] + sys.A(r, phi, z)
    v = np.array([P[0], P[1] / (r * r), P[2]])
    pdot = -sys.jac_A(r, phi, z).T @ v - sys.grad_W(r, phi, z)
    pdot[0] += P[1] ** 2 / r**3
    return np.concatenate([v, pdot])


def eom(sys: SystemInstance, ph: Union[CylPhase, np.ndarray]) -> np.ndarray:
    """
    Hamilton's equations (r', phi', Z', p_r', p_phi', p_Z') at a phase point.

    Raises:
        DomainError: Outside the system's domain
    """
    y = np.array(ph.as_tuple() if isinstance(ph, CylPhase) else ph, dtype=float)
    return _rhs(sys, y)


def _rk4_step(sys: SystemInstance, y: np.ndarray, h: float) -> np.ndarray:
    k1 = _rhs(sys, y)
    k2 = _rhs(sys, y + 0.5 * h * k1)
    k3 = _rhs(sys, y + 0.5 * h * k2)
    k4 = _rhs(sys, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _midpoint_step(sys: SystemInstance, y: np.ndarray, h: float, cfg: IntegratorConfig) -> np.ndarray:
    y_new = y + h * _rhs(sys, y)
    for _ in range(cfg.max_iter):
        y_next = y + h * _rhs(sys, 0.5 * (y + y_new))
        delta = float(np.max(np.abs(y_next - y_new)))
        y_new = y_next
        if delta <= cfg.tol * max(1.0, float(np.max(np.abs(y_new)))):
            return y_new
    logger.error("implicit midpoint did not converge in %d iterations (last update %.3e)",
                 cfg.max_iter, delta)
    raise ConvergenceError(
        f"implicit midpoint fixed point did not converge in {cfg.max_iter} iterations "
        f"(last update {delta:.3e}); reduce dt"
    )


def _observable_functions(sys: SystemInstance) -> dict[str, object]:
    funcs = {name: phase_function(sys, name) for name in BASE_OBSERVABLES}
    for name in LINEAR_OBSERVABLES:
        try:
            funcs[name] = phase_function(sys, name)
        except UnsupportedReductionError:
            pass
    return funcs


def integrate(sys: SystemInstance, initial: CylPhase, t_end: float,
              cfg: Optional[IntegratorConfig] = None) -> Trajectory:
    """
    Integrate from t = 0 to t_end with fixed steps.

    The step size is |cfg.dt| in the direction of t_end, so a negative t_end
    (or dt) runs the system backwards. The last step is shortened to land on
    t_end exactly.

    Args:
        sys: System to integrate
        initial: Initial phase point
        t_end: Final time
        cfg: Scheme and step; defaults to the [integrator] config section

    Returns:
        Trajectory; truncated if a step leaves the domain (radius below
        r_min, pole of a profile, end of a solved profile span)

    Raises:
        DomainError: If the initial state itself is outside the domain
        ConvergenceError: If the implicit midpoint iteration fails
    """
    cfg = cfg or IntegratorConfig.from_settings()
    direction = math.copysign(1.0, t_end) if t_end != 0.0 else math.copysign(1.0, cfg.dt)
    step = abs(cfg.dt) * direction
    n_full = int(math.floor(abs(t_end) / abs(cfg.dt) + 1e-9))
    remainder = t_end - n_full * step
    steps = [step] * n_full
    if abs(remainder) > 1e-12 * max(1.0, abs(t_end)):
        steps.append(remainder)

    funcs = _observable_functions(sys)
    y = np.array(initial.as_tuple(), dtype=float)
    t = 0.0
    times = [t]
    states = [y.copy()]
    values = {name: [f(y)] for name, f in funcs.items()}
    reason: Optional[str] = None

    for n, h in enumerate(steps, start=1):
        try:
            if cfg.scheme == "rk4":
                y_new = _rk4_step(sys, y, h)
            else:
                y_new = _midpoint_step(sys, y, h, cfg)
            if not np.all(np.isfinite(y_new)):
                raise DomainError("state became non-finite")
            obs = {name: f(y_new) for name, f in funcs.items()}
        except DomainError as e:
            reason = str(e)
            logger.warning("trajectory truncated at t = %.6g: %s", t, reason)
            break
        y = y_new
        t = n * step if n <= n_full else t_end
        times.append(t)
        states.append(y.copy())
        for name, v in obs.items():
            values[name].append(v)

    arr = np.array(states)
    arr[:, 1] = [wrap_angle(p) for p in arr[:, 1]]
    return Trajectory(
        family_id=sys.family_id,
        times=np.array(times),
        states=arr,
        observables={name: np.array(v) for name, v in values.items()},
        truncated=reason is not None,
        truncation_reason=reason,
    )
