"""Tests for cylint.catalog.system: evaluator guards, integrals and wrappers."""

import math

import numpy as np
import pytest

from cylint.catalog import (
    build_family,
    gauge_shifted,
    integral_value,
    load_sample_params,
    perturb_potential,
    phase_function,
)
from cylint.geometry import CylPhase, DomainError
from cylint.utils.functions import Poly, Trig, Zero
from cylint.verify import Grid, check_commutation, determining_residuals, gauge_check

PHASE = CylPhase.from_values(1.1, 0.6, 0.2, 0.3, -0.8, 0.5)


def _sample(family: str):
    return build_family(family, load_sample_params(family))


class TestGuards:
    """Radius floor, angle wrapping and solved ranges."""

    def test_radius_below_floor(self) -> None:
        sys = build_family("F6", load_sample_params("F6"), r_min=0.2)
        with pytest.raises(DomainError, match="below r_min"):
            sys.W(0.1, 0.0, 0.0)

    def test_phi_is_wrapped(self) -> None:
        sys = _sample("F5")
        assert sys.W(1.0, -0.5, 0.0) == pytest.approx(sys.W(1.0, 2 * math.pi - 0.5, 0.0))

    def test_regular_respects_margin(self) -> None:
        sys = build_family("F6", load_sample_params("F6"), r_min=0.2)
        assert sys.regular(0.3, 1.0, 0.0)
        assert not sys.regular(0.3, 1.0, 0.0, margin=0.2)

    def test_repr(self) -> None:
        assert "F6" in repr(_sample("F6"))


class TestIntegrals:
    def test_hamiltonian(self) -> None:
        sys = _sample("F6")
        r, phi, z, p_r, p_phi, p_z = PHASE.as_tuple()
        P = np.array([p_r, p_phi, p_z]) + sys.A(r, phi, z)
        expected = 0.5 * (P[0] ** 2 + P[1] ** 2 / r**2 + P[2] ** 2) + sys.W(r, phi, z)
        assert integral_value(sys, "H", PHASE) == pytest.approx(expected)

    def test_phase_function_matches_integral_value(self) -> None:
        sys = _sample("F5")
        f = phase_function(sys, "X1")
        assert f(np.array(PHASE.as_tuple())) == integral_value(sys, "X1", PHASE)


class TestGaugeShift:
    """A + grad chi leaves B, W and the physical integrals unchanged."""

    CHI = (Poly(0.0, 0.0, 0.3), Trig(0.2, 0.0, 1.0), Poly(0.0, 0.5))

    def test_field_unchanged(self) -> None:
        sys = _sample("F4")
        shifted = gauge_shifted(sys, *self.CHI)
        assert shifted.B(1.2, 0.4, 0.3).as_tuple() == pytest.approx(sys.B(1.2, 0.4, 0.3).as_tuple())
        assert not np.allclose(shifted.A(1.2, 0.4, 0.3), sys.A(1.2, 0.4, 0.3))

    def test_integrals_follow_shifted_momenta(self) -> None:
        sys = _sample("F1")
        shifted = gauge_shifted(sys, *self.CHI)
        moved = shifted.shift_momenta(PHASE)
        for name in ("H", "X1", "X2", "X1_lin", "X2_lin"):
            assert integral_value(shifted, name, moved) == pytest.approx(integral_value(sys, name, PHASE))

    def test_shifted_system_still_checks_out(self) -> None:
        shifted = gauge_shifted(_sample("F5"), *self.CHI)
        grid = Grid.uniform((2, 3, 2))
        assert gauge_check(shifted, grid).passed
        assert determining_residuals(shifted, grid).passed
        assert check_commutation(shifted, n_samples=10, seed=2).passed

    def test_zero_shift_is_identity(self) -> None:
        sys = _sample("F7")
        shifted = gauge_shifted(sys, Zero(), Zero(), Zero())
        np.testing.assert_array_equal(shifted.A(1.0, 0.2, 0.0), sys.A(1.0, 0.2, 0.0))


class TestPerturbedPotential:
    """Breaking integrability on purpose is detected."""

    @staticmethod
    def _broken(family: str):
        return perturb_potential(
            _sample(family),
            lambda r, p, z: 0.05 * math.sin(p) * r,
            lambda r, p, z: np.array([0.05 * math.sin(p), 0.05 * r * math.cos(p), 0.0]),
        )

    @pytest.mark.parametrize("family", ["F1", "F2", "F3", "F4", "F5", "F6", "F7"])
    def test_commutation_fails(self, family: str) -> None:
        report = check_commutation(self._broken(family), n_samples=100, seed=0, tol=1e-6)
        assert not report.passed
        assert report.max_normalized > 1e-4

    def test_residuals_fail(self) -> None:
        report = determining_residuals(self._broken("F1"), Grid.uniform((2, 3, 2)))
        assert not report.passed

    def test_gauge_still_passes(self) -> None:
        assert gauge_check(self._broken("F1"), Grid.uniform((2, 3, 2))).passed
