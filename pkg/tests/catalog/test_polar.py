"""Tests for cylint.catalog.polar: the user-constrained family F8."""

import math

import pytest

from cylint.catalog import (
    Rank3Error,
    ResidualGateError,
    ValidationError,
    build_family,
    describe_family,
    load_sample_params,
)
from cylint.catalog.polar import Polar2D
from cylint.catalog.registry import bind_params
from cylint.utils.functions import Poly, Trig, TrigPow
from cylint.verify import Grid, check_commutation, determining_residuals

SQRT_HALF = math.sqrt(0.5)


def _params(**overrides: object) -> dict[str, object]:
    base: dict[str, object] = {
        "psi": TrigPow(1.0, SQRT_HALF, 0.0, 2.0, 0.5),
        "W2": TrigPow(1.0, SQRT_HALF, 0.0, 2.0, -1.0),
        "W3": Poly(0.0, 0.0, 0.3),
    }
    base.update(overrides)
    return base


class TestPolar2D:
    def test_sample_passes_gate(self) -> None:
        sys = build_family("F8", load_sample_params("F8"))
        report = determining_residuals(sys, Grid.uniform((3, 5, 3)))
        assert report.passed

    def test_sample_commutes(self) -> None:
        sys = build_family("F8", load_sample_params("F8"))
        assert check_commutation(sys, n_samples=10, seed=11).passed

    def test_m1_reference_point(self) -> None:
        sys = build_family("F8", _params())
        assert sys.m1(1.0, 0.0, 0.3) == pytest.approx(0.0, abs=1e-14)

    def test_m1_gradient(self) -> None:
        sys = build_family("F8", _params())
        h = 1e-4
        r, phi = 1.4, 2.0
        d_r = (sys.m1(r + h, phi, 0.0) - sys.m1(r - h, phi, 0.0)) / (2 * h)
        assert d_r == pytest.approx(sys._m1_r(r, phi), abs=1e-7)

    def test_free_potential_rejected_by_gate(self) -> None:
        with pytest.raises(ResidualGateError, match="fail the determining equations"):
            build_family("F8", _params(W2=Trig(0.1, 0.0, 1.0)))

    def test_gate_can_be_skipped(self) -> None:
        bound = bind_params(describe_family("F8"), _params(W2=Trig(0.1, 0.0, 1.0)))
        sys = Polar2D(bound, gate=False)
        assert not determining_residuals(sys, Grid.uniform((3, 4, 3))).passed

    def test_rank3_rejected(self) -> None:
        with pytest.raises(Rank3Error):
            build_family("F8", _params(mu=Poly(1.0), sigma0=1.0))

    def test_mu_with_psi_needs_sigma_zero(self) -> None:
        with pytest.raises(ValidationError, match="psi' != 0 requires mu = 0"):
            build_family("F8", _params(mu=Poly(1.0)))

    def test_mu_must_vanish(self) -> None:
        with pytest.raises(ValidationError, match="needs mu = 0"):
            build_family("F8", {"mu": Poly(1.0)})

    def test_rank3_is_a_validation_error(self) -> None:
        assert issubclass(Rank3Error, ValidationError)
        assert issubclass(ResidualGateError, ValidationError)
