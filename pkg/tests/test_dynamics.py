"""Tests for cylint.dynamics"""

import io
import math

import numpy as np
import pytest
from pydantic import ValidationError

from cylint.catalog import build_family, load_sample_params
from cylint.dynamics import (
    ConvergenceError,
    IntegratorConfig,
    Trajectory,
    eom,
    integrate,
    read_trajectory_csv,
)
from cylint.geometry import CylPhase, DomainError

LARMOR_START = CylPhase.from_values(1.0, 0.0, 0.0, 0.3, 0.2, 0.1)


def _larmor():
    """Uniform unit field along Z, no potential."""
    return build_family("F1", {"mu0": 1.0})


class TestIntegratorConfig:
    def test_defaults(self) -> None:
        cfg = IntegratorConfig()
        assert cfg.scheme == "implicit-midpoint"
        assert cfg.dt == 1e-3

    @pytest.mark.parametrize("dt", [0.0, math.inf, math.nan])
    def test_rejects_bad_dt(self, dt: float) -> None:
        with pytest.raises(ValidationError):
            IntegratorConfig(dt=dt)

    def test_rejects_unknown_scheme(self) -> None:
        with pytest.raises(ValidationError):
            IntegratorConfig(scheme="euler")

    def test_from_settings_overrides(self) -> None:
        cfg = IntegratorConfig.from_settings(scheme="rk4", dt=0.01, tol=None)
        assert cfg.scheme == "rk4"
        assert cfg.dt == 0.01
        assert cfg.tol == 1e-12


class TestEquationsOfMotion:
    def test_velocities_are_kinetic_momenta(self) -> None:
        sys = _larmor()
        y = eom(sys, LARMOR_START)
        r = 1.0
        P_phi = 0.2 + r * r / 2
        assert y[:3] == pytest.approx([0.3, P_phi / r**2, 0.1])

    def test_accepts_arrays(self) -> None:
        sys = build_family("F5", load_sample_params("F5"))
        ph = CylPhase.from_values(1.3, 0.4, 0.2, 0.1, -0.3, 0.6)
        np.testing.assert_array_equal(eom(sys, ph), eom(sys, np.array(ph.as_tuple())))


class TestIntegrate:
    """Fixed-step integration of Hamilton's equations."""

    @pytest.mark.parametrize("scheme", ["implicit-midpoint", "rk4"])
    def test_larmor_orbit_closes(self, scheme: str) -> None:
        traj = integrate(_larmor(), LARMOR_START, 2 * math.pi, IntegratorConfig(scheme=scheme, dt=1e-3))
        end = traj.final_state().as_tuple()
        assert end[0] == pytest.approx(1.0, abs=1e-6)
        assert math.cos(end[1]) == pytest.approx(1.0, abs=1e-6)
        assert math.sin(end[1]) == pytest.approx(0.0, abs=1e-6)
        assert end[2] == pytest.approx(0.1 * 2 * math.pi, abs=1e-9)
        assert traj.times[-1] == pytest.approx(2 * math.pi)

    def test_integrals_conserved(self) -> None:
        sys = build_family("F1", load_sample_params("F1"))
        start = CylPhase.from_values(1.2, 0.3, 0.0, 0.1, 0.4, -0.2)
        traj = integrate(sys, start, 2.0, IntegratorConfig(dt=1e-3))
        assert set(traj.observables) == {"H", "X1", "X2", "X1_lin", "X2_lin"}
        for name in traj.observables:
            assert traj.drift(name) < 1e-5, name
        assert not traj.truncated

    def test_no_linear_observables_without_reduction(self) -> None:
        sys = build_family("F6", load_sample_params("F6"))
        traj = integrate(sys, CylPhase.from_values(1.0, 0.5, 0.0, 0.0, 0.1, 0.1), 0.05)
        assert set(traj.observables) == {"H", "X1", "X2"}

    def test_time_reversal(self) -> None:
        sys = build_family("F5", load_sample_params("F5"))
        start = CylPhase.from_values(1.1, 0.7, 0.2, 0.2, -0.4, 0.3)
        cfg = IntegratorConfig(dt=1e-2)
        forward = integrate(sys, start, 1.0, cfg)
        back = integrate(sys, forward.final_state(), -1.0, cfg)
        assert back.times[-1] == pytest.approx(-1.0)
        end = back.final_state().as_tuple()
        assert end[0] == pytest.approx(1.1, abs=1e-9)
        assert end[1] == pytest.approx(0.7, abs=1e-9)
        assert end[3:] == pytest.approx((0.2, -0.4, 0.3), abs=1e-9)

    def test_last_step_lands_on_t_end(self) -> None:
        traj = integrate(_larmor(), LARMOR_START, 0.0105, IntegratorConfig(dt=1e-3))
        assert len(traj) == 12
        assert traj.times[-1] == 0.0105

    def test_phi_is_stored_wrapped(self) -> None:
        traj = integrate(_larmor(), LARMOR_START, 8.0, IntegratorConfig(scheme="rk4", dt=1e-2))
        assert np.all((traj.states[:, 1] >= 0.0) & (traj.states[:, 1] < 2 * math.pi))

    def test_truncated_at_r_min(self) -> None:
        sys = build_family("F1", {"mu0": 1.0}, r_min=0.2)
        start = CylPhase.from_values(0.5, 0.0, 0.0, -3.0, 0.0, 0.0)
        traj = integrate(sys, start, 1.0, IntegratorConfig(dt=1e-3))
        assert traj.truncated
        assert "below r_min" in traj.truncation_reason
        assert traj.times[-1] < 0.2
        assert np.all(traj.states[:, 0] >= 0.2)

    def test_initial_state_outside_domain(self) -> None:
        sys = build_family("F1", {"mu0": 1.0}, r_min=0.2)
        with pytest.raises(DomainError):
            integrate(sys, CylPhase.from_values(0.1, 0.0, 0.0, 0.0, 0.0, 0.0), 1.0)

    def test_midpoint_convergence_failure(self) -> None:
        cfg = IntegratorConfig(dt=0.1, max_iter=1, tol=1e-15)
        with pytest.raises(ConvergenceError, match="reduce dt"):
            integrate(_larmor(), LARMOR_START, 1.0, cfg)


class TestTrajectoryCsv:
    def test_round_trip(self) -> None:
        traj = integrate(_larmor(), LARMOR_START, 0.05, IntegratorConfig(dt=1e-2))
        buf = io.StringIO()
        traj.to_csv(buf)
        buf.seek(0)
        back = read_trajectory_csv(buf)
        np.testing.assert_array_equal(back.times, traj.times)
        np.testing.assert_array_equal(back.states, traj.states)
        assert list(back.observables) == list(traj.observables)
        np.testing.assert_array_equal(back.observables["H"], traj.observables["H"])

    def test_header(self, tmp_path) -> None:
        traj = integrate(_larmor(), LARMOR_START, 0.01, IntegratorConfig(dt=1e-2))
        path = tmp_path / "traj.csv"
        traj.to_csv(path)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header == "t,r,phi,Z,p_r,p_phi,p_Z,H,X1,X2,X1_lin,X2_lin"

    def test_rejects_foreign_csv(self) -> None:
        with pytest.raises(ValueError, match="not a trajectory CSV"):
            read_trajectory_csv(io.StringIO("a,b\n1,2\n"))

    def test_empty_trajectory_model(self) -> None:
        traj = Trajectory(times=np.zeros(1), states=np.zeros((1, 6)), observables={})
        assert traj.columns == ["t", "r", "phi", "Z", "p_r", "p_phi", "p_Z"]


@pytest.mark.slow
class TestLongRuns:
    """Long-horizon drift of the integrals."""

    @pytest.mark.parametrize("family", ["F2", "F3", "F7", "F8"])
    def test_drift_stays_small(self, family: str) -> None:
        sys = build_family(family, load_sample_params(family))
        start = CylPhase.from_values(1.2, 1.0, 0.1, 0.1, 0.2, -0.1)
        traj = integrate(sys, start, 50.0, IntegratorConfig(dt=2e-3))
        if traj.truncated:
            pytest.skip(traj.truncation_reason)
        for name in ("H", "X1", "X2"):
            assert traj.drift(name) / max(1.0, abs(traj.observables[name][0])) < 1e-4, name

    @pytest.mark.parametrize("family", ["F1", "F4", "F5"])
    def test_midpoint_hundred_thousand_steps(self, family: str) -> None:
        sys = build_family(family, load_sample_params(family))
        start = CylPhase.from_values(1.2, 0.3, 0.0, 0.1, 0.4, -0.2)
        traj = integrate(sys, start, 2.0, IntegratorConfig(scheme="implicit-midpoint", dt=2e-5))
        assert not traj.truncated
        assert len(traj) == 100_001

        def rel_drift(name: str) -> float:
            return traj.drift(name) / max(1.0, abs(traj.observables[name][0]))

        assert rel_drift("H") <= 1e-8
        assert rel_drift("X1") <= 1e-6
        assert rel_drift("X2") <= 1e-6
