"""Tests for cylint.auxfields: auxiliary quintuple, B, M and point residuals."""

import numpy as np
import pytest

from cylint.auxfields import (
    AuxQuintuple,
    alpha,
    b_field_from_aux,
    det_M,
    is_rank3,
    matrix_M,
    rank_of_M,
    reduced_residuals,
    residual,
    s_coeffs_from_aux,
    substituted_residuals,
)
from cylint.catalog import build_family, load_sample_params
from cylint.geometry import CylPoint, DomainError
from cylint.utils.finite_diff import gradient
from cylint.utils.functions import Const, Poly, Trig, TrigPow

GENERIC = AuxQuintuple(
    rho=Poly(0.2, 0.1, 0.3),
    sigma=Poly(0.5, -0.2),
    tau=Trig(0.3, 0.1, 1.0),
    psi=TrigPow(2.0, 0.5, 0.0, 1.0, 1.0),
    mu=Poly(1.0, 0.4),
)
POINTS = [CylPoint(r=0.8, phi=0.4, z=-0.3), CylPoint(r=1.6, phi=3.9, z=0.7)]


class TestResidual:
    def test_normalised_by_largest_summand(self) -> None:
        e = residual("x", [10.0, -9.0])
        assert e.raw == 1.0
        assert e.normalized == pytest.approx(0.1)

    def test_floor_of_one(self) -> None:
        assert residual("x", [1e-3, 1e-3]).normalized == pytest.approx(2e-3)


class TestAuxQuintuple:
    def test_defaults_are_zero(self) -> None:
        aux = AuxQuintuple()
        assert aux.rho.is_zero and aux.mu.is_zero

    def test_periodicity_accepts_trig(self) -> None:
        GENERIC.check_periodicity()

    def test_periodicity_rejects_poly_tau(self) -> None:
        with pytest.raises(DomainError, match="tau"):
            AuxQuintuple(tau=Poly(0.0, 1.0)).check_periodicity()


class TestCoefficients:
    """s1, s2 and B as functions of the quintuple."""

    def test_s_coefficients(self) -> None:
        at = POINTS[0]
        r = at.r
        s1, s2 = s_coeffs_from_aux(GENERIC, at)
        psi, dpsi = GENERIC.psi(at.phi), GENERIC.psi.d1(at.phi)
        mu, tau = GENERIC.mu(at.z), GENERIC.tau(at.phi)
        np.testing.assert_allclose(s1, [dpsi, -psi / r - r * r * mu + GENERIC.rho(r), tau])
        np.testing.assert_allclose(s2, [0.0, mu, GENERIC.sigma(r) - tau / (r * r)])

    @pytest.mark.parametrize("family", ["F1", "F4", "F5", "F6", "F7"])
    def test_b_field_matches_family(self, family: str) -> None:
        sys = build_family(family, load_sample_params(family))
        for at in POINTS:
            expected = sys.B(at.r, at.phi, at.z).as_tuple()
            got = b_field_from_aux(sys.aux, at).as_tuple()
            assert got == pytest.approx(expected, abs=1e-12)

    def test_s_coefficients_match_family(self) -> None:
        sys = build_family("F1", load_sample_params("F1"))
        for at in POINTS:
            s1, s2 = s_coeffs_from_aux(sys.aux, at)
            np.testing.assert_allclose(s1, sys.s1(at.r, at.phi, at.z), atol=1e-12)
            np.testing.assert_allclose(s2, sys.s2(at.r, at.phi, at.z), atol=1e-12)

    def test_radius_guard(self) -> None:
        with pytest.raises(DomainError):
            s_coeffs_from_aux(GENERIC, CylPoint(r=1e-9, phi=0.0, z=0.0))


class TestMatrixM:
    def test_closed_form_determinant(self) -> None:
        for at in POINTS:
            assert det_M(GENERIC, at) == pytest.approx(np.linalg.det(matrix_M(GENERIC, at)), rel=1e-10)

    def test_rank3_detection(self) -> None:
        assert is_rank3(GENERIC)
        assert rank_of_M(GENERIC, POINTS[0]) == 3
        assert not is_rank3(AuxQuintuple(rho=Poly(1.0), mu=Const(1.0)))

    def test_alpha_vanishes_without_angular_dependence(self) -> None:
        aux = AuxQuintuple(rho=Poly(0.1, 0.2), sigma=Poly(0.3), mu=Poly(1.0, 0.5))
        assert alpha(aux, POINTS[1]) == 0.0


class TestPointResiduals:
    """Reduced and substituted conditions vanish on catalog members."""

    @pytest.mark.parametrize("family", ["F1", "F5"])
    def test_reduced_conditions(self, family: str) -> None:
        sys = build_family(family, load_sample_params(family))
        for at in POINTS:
            res = reduced_residuals(sys.aux, sys.W, at)
            assert len(res.entries) == 8
            assert res.max_normalized < 1e-8, res.as_dict()

    def test_substituted_conditions_tau_sigma(self) -> None:
        sys = build_family("F5", load_sample_params("F5"))
        for at in POINTS:
            x = np.array([at.r, at.phi, at.z])
            g1 = gradient(lambda v: sys.m1(*v), x, 1e-3)
            g2 = gradient(lambda v: sys.m2(*v), x, 1e-3)
            gw = sys.grad_W(at.r, at.phi, at.z)
            res = substituted_residuals(sys.aux, g1, g2, gw, at)
            assert len(res.entries) == 11
            assert res.max_normalized < 1e-8, res.as_dict()

    def test_potential_steps_scale_with_coordinates(self, monkeypatch: pytest.MonkeyPatch) -> None:
        import cylint.auxfields as auxfields

        steps = []
        real = auxfields.mixed_partial

        def recording(f, x, i, j, h):
            steps.append(((i, j), h))
            return real(f, x, i, j, h)

        monkeypatch.setattr(auxfields, "mixed_partial", recording)
        sys = build_family("F1", load_sample_params("F1"))
        reduced_residuals(sys.aux, sys.W, POINTS[1])
        # r = 1.6, phi = 3.9, Z = 0.7 with base step 1e-4
        assert dict(steps) == pytest.approx({(0, 1): 3.9e-4, (1, 2): 3.9e-4, (0, 2): 1.6e-4})

    def test_broken_potential_detected(self) -> None:
        sys = build_family("F5", load_sample_params("F5"))
        at = POINTS[0]
        res = reduced_residuals(sys.aux, lambda r, p, z: sys.W(r, p, z) + 0.3 * r * np.sin(p), at)
        assert res.max_normalized > 1e-3
