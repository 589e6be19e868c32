"""Numerical verification of catalog systems.

Everything here treats a SystemInstance as a black box of value-only
evaluators and differentiates with fourth-order central differences:

* check_commutation: {H, X1}, {H, X2} and {X1, X2} at random phase points
* determining_residuals: the 28 conditions on s1, s2, m1, m2, W and B that
  make X1 and X2 commuting integrals
* gauge_check: B against the curl of A, jac_A against differences of A
* conservation_report: drift of the integrals along a trajectory
"""

import logging
from typing import Callable, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from cylint.auxfields import ResidualEntry, residual
from cylint.catalog.system import SystemInstance, phase_function
from cylint.config import get_config
from cylint.dynamics import Trajectory
from cylint.geometry import TWO_PI, DomainError
from cylint.utils.finite_diff import gradient, jacobian, scaled_step

logger = logging.getLogger(__name__)

PhaseFn = Callable[[np.ndarray], float]

PAIRS = (("H", "X1"), ("H", "X2"), ("X1", "X2"))

EQUATION_GROUPS = (
    "s1_order2",
    "s2_order2",
    "m1_order1",
    "m2_order1",
    "W_order0",
    "bracket_order2",
    "bracket_order1",
    "bracket_order0",
)
PRINTED_GROUP = "bracket_order1_printed"
MAX_REDRAWS = 1000


class Grid(BaseModel):
    """Tensor grid in (r, phi, Z); phi samples are j * 2 pi / nphi."""

    nr: int = Field(ge=1)
    nphi: int = Field(ge=1)
    nz: int = Field(ge=1)
    r_range: tuple[float, float] = (0.5, 2.0)
    z_range: tuple[float, float] = (-1.0, 1.0)

    @classmethod
    def uniform(cls, shape: Sequence[int], r_range: Optional[tuple[float, float]] = None,
                z_range: Optional[tuple[float, float]] = None) -> "Grid":
        cfg = get_config().verify
        nr, nphi, nz = shape
        return cls(nr=nr, nphi=nphi, nz=nz, r_range=r_range or cfg.r_range,
                   z_range=z_range or cfg.z_range)

    @classmethod
    def from_config(cls) -> "Grid":
        return cls.uniform(get_config().verify.grid)

    def points(self) -> list[tuple[float, float, float]]:
        rs = np.linspace(*self.r_range, self.nr) if self.nr > 1 else [self.r_range[0]]
        zs = np.linspace(*self.z_range, self.nz) if self.nz > 1 else [self.z_range[0]]
        phis = [j * TWO_PI / self.nphi for j in range(self.nphi)]
        return [(float(r), float(p), float(z)) for r in rs for p in phis for z in zs]


class CommutationReport(BaseModel):
    """Normalised Poisson brackets at random phase points."""

    family: str
    seed: int
    tolerance: float
    n_samples: int
    h: float
    per_pair: dict[str, float]
    mean_per_pair: dict[str, float]
    max_normalized: float
    mean_normalized: float
    worst_pair: str
    worst_point: list[float]
    passed: bool


class ResidualReport(BaseModel):
    """Normalised residuals of named equations on a grid."""

    family: str
    kind: str
    tolerance: float
    grid: Grid
    h: float
    n_points: int
    n_skipped: int = 0
    per_equation: dict[str, float]
    mean_per_equation: dict[str, float]
    per_group: dict[str, float] = {}
    printed: dict[str, float] = {}
    printed_discrepancy: float = 0.0
    max_normalized: float
    mean_normalized: float
    worst_equation: str
    worst_point: list[float]
    passed: bool


class ConservationReport(BaseModel):
    """Relative drift max |X(t) - X(0)| / max(1, |X(0)|) of each observable."""

    family: str
    tolerance: float
    n_steps: int
    drift: dict[str, float]
    max_drift: float
    truncated: bool
    truncation_reason: Optional[str] = None
    passed: bool


class VerifyReport(BaseModel):
    """Uniform JSON summary written by the command line."""

    model_config = ConfigDict(populate_by_name=True)

    family: str
    kind: str
    seed: Optional[int] = None
    tolerance: float
    max_residual: float
    mean_residual: float
    per_equation: dict[str, float]
    passed: bool = Field(serialization_alias="pass")

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


def phase_gradient_fd(F: PhaseFn, y: np.ndarray, h: float) -> np.ndarray:
    """Gradient of a phase function in (r, phi, Z, p_r, p_phi, p_Z)."""
    return gradient(F, np.asarray(y, dtype=float), h)


def poisson_bracket_fd(F: PhaseFn, G: PhaseFn, y: np.ndarray, h: float) -> tuple[float, float]:
    """
    Canonical Poisson bracket {F, G} by finite differences.

    Returns:
        (bracket, |grad F| |grad G|)
    """
    gf = phase_gradient_fd(F, y, h)
    gg = phase_gradient_fd(G, y, h)
    bracket = float(gf[:3] @ gg[3:] - gf[3:] @ gg[:3])
    return bracket, float(np.linalg.norm(gf) * np.linalg.norm(gg))


def _fd_margin(h: float, r: float, phi: float, z: float) -> float:
    return 2 * scaled_step(h, max(r, phi, abs(z)))


def _draw_phase(sys: SystemInstance, rng: np.random.Generator, box: dict[str, tuple[float, float]],
                h: float) -> np.ndarray:
    phi_lo, phi_hi = sys.phi_domain or (0.0, TWO_PI)
    z_lo, z_hi = box["z"]
    if sys.z_domain is not None:
        z_lo, z_hi = max(z_lo, sys.z_domain[0]), min(z_hi, sys.z_domain[1])
    for _ in range(MAX_REDRAWS):
        r = rng.uniform(*box["r"])
        phi = rng.uniform(phi_lo, phi_hi)
        z = rng.uniform(z_lo, z_hi)
        p = rng.uniform(*box["p"], size=3)
        if r >= sys.r_min + 2 * scaled_step(h, r) and sys.regular(r, phi, z, _fd_margin(h, r, phi, z)):
            return np.array([r, phi, z, *p])
    raise DomainError(f"{sys.family_id}: no regular sample point found in {MAX_REDRAWS} draws")


def check_commutation(
    sys: SystemInstance,
    n_samples: Optional[int] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    box: Optional[dict[str, tuple[float, float]]] = None,
    h: Optional[float] = None,
) -> CommutationReport:
    """
    Check that H, X1 and X2 Poisson-commute at random phase points.

    Each bracket is normalised by max(1, |grad F| |grad G|). Points that are
    not regular (poles, ends of solved profile spans) are redrawn from the
    same generator, so a given seed always yields the same report.

    Args:
        sys: System to check
        n_samples: Number of phase points (config verify.samples)
        seed: Generator seed (config verify.seed)
        tol: Pass threshold on the normalised brackets (config verify.tol)
        box: Ranges {"r": ..., "z": ..., "p": ...}; defaults from config
        h: Finite-difference step (config verify.fd_step)

    Returns:
        CommutationReport
    """
    cfg = get_config().verify
    n_samples = n_samples if n_samples is not None else cfg.samples
    seed = seed if seed is not None else cfg.seed
    tol = tol if tol is not None else cfg.tol
    h = h if h is not None else cfg.fd_step
    box = {"r": cfg.r_range, "z": cfg.z_range, "p": cfg.p_range, **(box or {})}

    funcs = {name: phase_function(sys, name) for name in ("H", "X1", "X2")}
    rng = np.random.default_rng(seed)
    values: dict[str, list[float]] = {f"{a},{b}": [] for a, b in PAIRS}
    worst = (-1.0, "", [])
    for _ in range(n_samples):
        y = _draw_phase(sys, rng, box, h)
        for a, b in PAIRS:
            bracket, scale = poisson_bracket_fd(funcs[a], funcs[b], y, h)
            normalized = abs(bracket) / max(1.0, scale)
            values[f"{a},{b}"].append(normalized)
            if normalized > worst[0]:
                worst = (normalized, f"{a},{b}", [float(v) for v in y])

    per_pair = {k: max(v) for k, v in values.items()}
    mean_pair = {k: float(np.mean(v)) for k, v in values.items()}
    all_values = [x for v in values.values() for x in v]
    report = CommutationReport(
        family=sys.family_id,
        seed=seed,
        tolerance=tol,
        n_samples=n_samples,
        h=h,
        per_pair=per_pair,
        mean_per_pair=mean_pair,
        max_normalized=max(all_values),
        mean_normalized=float(np.mean(all_values)),
        worst_pair=worst[1],
        worst_point=worst[2],
        passed=max(all_values) <= tol,
    )
    logger.info("%s commutation: max %.3e over %d samples (%s)", sys.family_id,
                report.max_normalized, n_samples, "pass" if report.passed else "FAIL")
    return report


def _equations(r: float, s1: np.ndarray, s2: np.ndarray, B: tuple[float, float, float],
               J: np.ndarray) -> tuple[list[ResidualEntry], list[ResidualEntry]]:
    """All determining equations at one point.

    J holds first derivatives (columns d_r, d_phi, d_Z) of the rows
    s1 (0-2), s2 (3-5), m1 (6), m2 (7), W (8).
    """
    b_r, b_phi, b_z = B
    ds1, ds2 = J[0:3], J[3:6]
    dm1, dm2, dW = J[6], J[7], J[8]
    R, P, Z = 0, 1, 2
    r2 = r * r
    out: list[ResidualEntry] = []

    def add(group: str, rows: list[list[float]]) -> None:
        for i, summands in enumerate(rows, start=1):
            out.append(residual(f"{group}[{i}]", summands))

    add("s1_order2", [
        [ds1[R, R]],
        [ds1[P, P], s1[R] / r],
        [ds1[R, P], r2 * ds1[P, R], 2 * r2 * b_z],
        [ds1[Z, P], r2 * ds1[P, Z], -2 * r2 * b_r],
        [ds1[Z, R], ds1[R, Z]],
        [ds1[Z, Z]],
    ])
    add("s2_order2", [
        [ds2[R, R]],
        [ds2[P, P], s2[R] / r],
        [ds2[R, P], r2 * ds2[P, R]],
        [ds2[Z, P], r2 * ds2[P, Z], 2 * b_r],
        [ds2[Z, R], ds2[R, Z], -2 * b_phi],
        [ds2[Z, Z]],
    ])
    add("m1_order1", [
        [dm1[R], -s1[Z] * b_phi, s1[P] * b_z],
        [dm1[P], -s1[R] * b_z, s1[Z] * b_r, -2 * r2 * dW[P]],
        [dm1[Z], -s1[P] * b_r, s1[R] * b_phi],
    ])
    add("m2_order1", [
        [dm2[R], -s2[Z] * b_phi, s2[P] * b_z],
        [dm2[P], -s2[R] * b_z, s2[Z] * b_r],
        [dm2[Z], -s2[P] * b_r, s2[R] * b_phi, -2 * dW[Z]],
    ])
    add("W_order0", [list(s1 * dW), list(s2 * dW)])
    add("bracket_order2", [
        [ds2[P, P]],
        [ds2[R, P]],
        [ds1[R, Z]],
        [ds2[Z, P], -ds1[P, Z], 2 * b_r],
    ])

    def transport(a: np.ndarray, db: np.ndarray, row: int) -> list[float]:
        """Summands of a . grad b^row."""
        return [a[k] * db[row, k] for k in range(3)]

    def neg(xs: list[float]) -> list[float]:
        return [-x for x in xs]

    add("bracket_order1", [
        transport(s2, ds1, R) + neg(transport(s1, ds2, R)),
        [2 * s2[R] * b_z, -2 * s2[Z] * b_r, -2 * dm2[P]]
        + transport(s2, ds1, P) + neg(transport(s1, ds2, P)),
        [2 * s1[R] * b_phi, -2 * s1[P] * b_r, 2 * dm1[Z]]
        + transport(s2, ds1, Z) + neg(transport(s1, ds2, Z)),
    ])
    add("bracket_order0", [
        neg([s1[k] * dm2[k] for k in range(3)])
        + [s2[k] * dm1[k] for k in range(3)]
        + [
            -b_z * (s1[R] * s2[P] - s1[P] * s2[R]),
            -b_r * (s1[P] * s2[Z] - s1[Z] * s2[P]),
            -b_phi * (s1[Z] * s2[R] - s1[R] * s2[Z]),
        ],
    ])

    # as published, with s1^Z in the second row and s2^r = 0 assumed
    printed = [
        residual(f"{PRINTED_GROUP}[1]", [s2[Z] * ds1[R, Z], s2[P] * ds1[R, P]]),
        residual(f"{PRINTED_GROUP}[2]", [
            -2 * s1[P] * b_r, -s1[P] * ds2[Z, P], s2[Z] * ds1[Z, Z], -s1[Z] * ds2[Z, Z],
            s2[P] * ds1[Z, P], 2 * s1[R] * b_phi, -s1[R] * ds2[Z, R], 2 * dm1[Z],
        ]),
        residual(f"{PRINTED_GROUP}[3]", [
            -2 * s2[Z] * b_r, s2[Z] * ds1[P, Z], s2[P] * ds1[P, P], -s1[Z] * ds2[P, Z],
            -s1[R] * ds2[P, R], -2 * dm2[P],
        ]),
    ]
    return out, printed


def _fields(sys: SystemInstance) -> Callable[[np.ndarray], np.ndarray]:
    def f(x: np.ndarray) -> np.ndarray:
        r, phi, z = float(x[0]), float(x[1]), float(x[2])
        return np.concatenate([
            sys.s1(r, phi, z),
            sys.s2(r, phi, z),
            [sys.m1(r, phi, z), sys.m2(r, phi, z), sys.W(r, phi, z)],
        ])

    return f


def _usable(sys: SystemInstance, point: tuple[float, float, float], h: float) -> bool:
    r, phi, z = point
    if r < sys.r_min + 2 * scaled_step(h, r):
        return False
    return sys.regular(r, phi, z, _fd_margin(h, r, phi, z))


def _summarise(
    sys: SystemInstance, kind: str, grid: Grid, h: float, tol: float, n_skipped: int,
    per_point: list[tuple[tuple[float, float, float], list[ResidualEntry]]],
) -> dict[str, object]:
    if not per_point:
        raise DomainError(f"{sys.family_id}: no regular grid point to evaluate")
    names = [e.name for e in per_point[0][1]]
    table = np.array([[e.normalized for e in entries] for _, entries in per_point])
    col_max = table.max(axis=0)
    worst_row, worst_col = np.unravel_index(int(np.argmax(table)), table.shape)
    return {
        "family": sys.family_id,
        "kind": kind,
        "tolerance": tol,
        "grid": grid,
        "h": h,
        "n_points": len(per_point),
        "n_skipped": n_skipped,
        "per_equation": {n: float(v) for n, v in zip(names, col_max)},
        "mean_per_equation": {n: float(v) for n, v in zip(names, table.mean(axis=0))},
        "max_normalized": float(table.max()),
        "mean_normalized": float(table.mean()),
        "worst_equation": names[worst_col],
        "worst_point": list(per_point[worst_row][0]),
        "passed": bool(table.max() <= tol),
    }


def determining_residuals(
    sys: SystemInstance,
    grid: Optional[Grid] = None,
    h: Optional[float] = None,
    tol: Optional[float] = None,
) -> ResidualReport:
    """
    Evaluate the 28 determining equations on a grid.

    Groups: s1_order2 (6), s2_order2 (6), m1_order1 (3), m2_order1 (3),
    W_order0 (2), bracket_order2 (4), bracket_order1 (3), bracket_order0 (1).
    The bracket equations are evaluated in their general form including s2^r
    terms. The published first-order bracket equations are evaluated as well
    and reported under `printed` without affecting the pass flag.

    Each residual is normalised by max(1, largest |summand|).

    Args:
        sys: System to check
        grid: Evaluation grid (config verify.grid); points closer than 2h to
            r_min or to a singular set are skipped
        h: Finite-difference step (config verify.fd_step)
        tol: Pass threshold (config verify.tol)

    Returns:
        ResidualReport
    """
    cfg = get_config().verify
    grid = grid or Grid.from_config()
    h = h if h is not None else cfg.fd_step
    tol = tol if tol is not None else cfg.tol
    fields = _fields(sys)

    per_point = []
    printed_rows = []
    discrepancy = 0.0
    skipped = 0
    for point in grid.points():
        if not _usable(sys, point, h):
            skipped += 1
            continue
        r, phi, z = point
        J = jacobian(fields, np.array(point), h)
        entries, printed = _equations(r, sys.s1(r, phi, z), sys.s2(r, phi, z),
                                      sys.B(r, phi, z).as_tuple(), J)
        per_point.append((point, entries))
        printed_rows.append([e.normalized for e in printed])
        general = {e.name: e.raw for e in entries}
        for i, e in enumerate(printed, start=1):
            discrepancy = max(discrepancy, abs(e.raw - general[f"bracket_order1[{i}]"]))

    summary = _summarise(sys, "residuals", grid, h, tol, skipped, per_point)
    per_eq = summary["per_equation"]
    summary["per_group"] = {
        g: max(v for k, v in per_eq.items() if k.startswith(g + "[")) for g in EQUATION_GROUPS
    }
    if printed_rows:
        cols = np.max(np.array(printed_rows), axis=0)
        summary["printed"] = {f"{PRINTED_GROUP}[{i + 1}]": float(v) for i, v in enumerate(cols)}
    summary["printed_discrepancy"] = discrepancy
    report = ResidualReport(**summary)
    if discrepancy > tol:
        logger.info("%s: published first-order bracket form differs by %.3e",
                    sys.family_id, discrepancy)
    logger.info("%s residuals: max %.3e (%s) over %d points", sys.family_id,
                report.max_normalized, report.worst_equation, report.n_points)
    return report


def gauge_check(sys: SystemInstance, grid: Optional[Grid] = None, h: Optional[float] = None,
                tol: Optional[float] = None) -> ResidualReport:
    """
    Check B against the curl of A and jac_A against differences of A.

    B^Z = d_r A_phi - d_phi A_r, B^phi = d_Z A_r - d_r A_Z,
    B^r = d_phi A_Z - d_Z A_phi.
    """
    cfg = get_config().verify
    grid = grid or Grid.from_config()
    h = h if h is not None else cfg.fd_step
    tol = tol if tol is not None else cfg.tol

    def potential(x: np.ndarray) -> np.ndarray:
        return sys.A(float(x[0]), float(x[1]), float(x[2]))

    per_point = []
    skipped = 0
    for point in grid.points():
        if not _usable(sys, point, h):
            skipped += 1
            continue
        r, phi, z = point
        D = jacobian(potential, np.array(point), h)
        b_r, b_phi, b_z = sys.B(r, phi, z).as_tuple()
        analytic = sys.jac_A(r, phi, z)
        entries = [
            residual("B_r", [D[2, 1], -D[1, 2], -b_r]),
            residual("B_phi", [D[0, 2], -D[2, 0], -b_phi]),
            residual("B_Z", [D[1, 0], -D[0, 1], -b_z]),
        ]
        for i, comp in enumerate(("A_r", "A_phi", "A_Z")):
            for j, axis in enumerate(("r", "phi", "Z")):
                entries.append(residual(f"d_{axis} {comp}", [analytic[i, j], -D[i, j]]))
        per_point.append((point, entries))
    report = ResidualReport(**_summarise(sys, "gauge", grid, h, tol, skipped, per_point))
    logger.info("%s gauge check: max %.3e", sys.family_id, report.max_normalized)
    return report


def conservation_report(traj: Trajectory, tol: Optional[float] = None) -> ConservationReport:
    """Relative drift of every observable stored in the trajectory."""
    tol = tol if tol is not None else get_config().verify.tol
    drift = {}
    for name, values in traj.observables.items():
        x0 = float(values[0])
        drift[name] = float(np.max(np.abs(values - x0))) / max(1.0, abs(x0))
    max_drift = max(drift.values(), default=0.0)
    return ConservationReport(
        family=traj.family_id,
        tolerance=tol,
        n_steps=len(traj) - 1,
        drift=drift,
        max_drift=max_drift,
        truncated=traj.truncated,
        truncation_reason=traj.truncation_reason,
        passed=max_drift <= tol and not traj.truncated,
    )


AnyReport = Union[CommutationReport, ResidualReport, ConservationReport]


def to_verify_report(report: AnyReport) -> VerifyReport:
    """Flatten any verification report into the command-line JSON schema."""
    if isinstance(report, CommutationReport):
        return VerifyReport(
            family=report.family, kind="commutation", seed=report.seed,
            tolerance=report.tolerance, max_residual=report.max_normalized,
            mean_residual=report.mean_normalized, per_equation=report.per_pair,
            passed=report.passed,
        )
    if isinstance(report, ResidualReport):
        return VerifyReport(
            family=report.family, kind=report.kind, tolerance=report.tolerance,
            max_residual=report.max_normalized, mean_residual=report.mean_normalized,
            per_equation=report.per_equation, passed=report.passed,
        )
    values = list(report.drift.values())
    return VerifyReport(
        family=report.family, kind="conservation", tolerance=report.tolerance,
        max_residual=report.max_drift,
        mean_residual=float(np.mean(values)) if values else 0.0,
        per_equation=report.drift, passed=report.passed,
    )
