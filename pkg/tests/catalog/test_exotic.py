"""Tests for cylint.catalog.exotic: profile-driven families F2 and F3."""

import math

import pytest
from scipy import special

from cylint.catalog import ValidationError, build_family, load_sample_params
from cylint.catalog.exotic import POLE_EPS, pole_profile, sn2_profile
from cylint.geometry import DomainError
from cylint.odes import mt_monitor
from cylint.specialfn import ellip_K
from cylint.utils.paramfile import ParamFile
from cylint.verify import Grid, check_commutation, determining_residuals, gauge_check

SMALL_GRID = Grid.uniform((3, 5, 3))
POINT = (1.2, 0.9, 0.4)

TRIG_EXP = {
    "profile": "trig-exp",
    "k0": 1.0, "k1": 0.3, "k2": 0.2, "k3": 0.1,
    "kt0": 1.0, "kt1": 0.4, "kt2": 0.1, "kt3": 0.2,
    "w0": 0.1,
}


def _with(family: str, **overrides: object) -> dict[str, object]:
    """Sample parameters of a family with some entries replaced."""
    pf: ParamFile = load_sample_params(family)
    values: dict[str, object] = {e.key: e.number if e.is_number else e.word for e in pf.entries}
    values.update(overrides)
    return values


class TestCubicProfiles:
    """Closed elliptic forms against the cubic first integral."""

    def test_sn2_satisfies_first_integral(self) -> None:
        prof = sn2_profile(1.0, (3.0, 2.0, 1.0), "M")
        for x in (0.0, 0.8, 2.1, 4.0):
            y, dy, *_ = prof.jet4(x)
            assert mt_monitor(1.0, prof.C1, prof.C2, -6.0, y, dy) == pytest.approx(0.0, abs=1e-12)

    def test_sn2_matches_scipy(self) -> None:
        prof = sn2_profile(1.0, (3.0, 2.0, 1.0), "M")
        w = math.sqrt(2.0) / 2
        sn = special.ellipj(w * 1.3, 0.5)[0]
        assert prof.value_slope(1.3)[0] == pytest.approx(sn * sn + 1.0, abs=1e-12)

    def test_pole_form_satisfies_first_integral(self) -> None:
        prof = pole_profile(1.0, (3.0, 2.0, 1.0), "M")
        for x in (0.0, 0.5, 1.5):
            y, dy, *_ = prof.jet4(x)
            assert y >= 3.0
            assert mt_monitor(1.0, prof.C1, prof.C2, -6.0, y, dy) == pytest.approx(0.0, abs=1e-9 * y**3)

    def test_pole_raises(self) -> None:
        prof = pole_profile(1.0, (3.0, 2.0, 1.0), "M")
        x_pole = ellip_K(math.sqrt(0.5)) / (math.sqrt(2.0) / 2)
        assert prof.pole_distance(x_pole) < POLE_EPS
        with pytest.raises(DomainError, match="pole"):
            prof.jet4(x_pole)

    def test_derivative_jet(self) -> None:
        prof = sn2_profile(1.0, (3.0, 2.0, 1.0), "M")
        d = prof.derivative()
        y, dy, d2, d3, d4 = prof.jet4(0.7)
        assert d.jet(0.7) == (dy, d2, d3, d4)


class TestExoticBeta:
    """F2 with closed and numeric gamma profiles."""

    def test_sample_is_integrable(self) -> None:
        sys = build_family("F2", load_sample_params("F2"))
        assert determining_residuals(sys, SMALL_GRID).passed
        assert gauge_check(sys, SMALL_GRID).passed
        assert check_commutation(sys, n_samples=15, seed=5).passed

    def test_numeric_matches_closed(self) -> None:
        closed = build_family("F2", load_sample_params("F2"))
        numeric = build_family("F2", _with("F2", profile="numeric"))
        assert numeric.phi_domain == pytest.approx((0.0, 2 * math.pi))
        for fn in ("W", "m1", "m2"):
            assert getattr(numeric, fn)(*POINT) == pytest.approx(getattr(closed, fn)(*POINT), abs=1e-8)

    def test_numeric_is_integrable(self) -> None:
        sys = build_family("F2", _with("F2", profile="numeric"))
        report = determining_residuals(sys, SMALL_GRID)
        assert report.passed
        # phi = 0 sits on the end of the solved span
        assert report.n_skipped == 9

    def test_numeric_truncated_profile(self) -> None:
        sys = build_family("F2", _with("F2", profile="numeric", beta2=1.0, branch=-1.0))
        lo, hi = sys.phi_domain
        assert lo == 0.0 and hi < 2 * math.pi
        with pytest.raises(DomainError, match="solved range"):
            sys.W(1.0, hi + 0.1, 0.0)

    def test_reduction(self) -> None:
        sys = build_family("F2", load_sample_params("F2"))
        lin1, lin2 = sys.first_order()
        assert lin1 is None and lin2.axis == 2

    @pytest.mark.parametrize(
        "overrides, message",
        [
            ({"beta1": 0.5}, "f1/8 < beta1 < 0"),
            ({"beta2": 1.0}, "beta2 = 0"),
            ({"beta1": -1.5}, "f1/8 < beta1 < 0"),
            ({"beta1": -0.4, "f1": -4.0}, "64 beta1"),
            ({"profile": "numeric", "gamma0": 3.0}, "numeric gamma profile"),
            ({"profile": "numeric", "phi_end": 7.0}, "phi_end"),
        ],
    )
    def test_constraints(self, overrides: dict[str, object], message: str) -> None:
        with pytest.raises(ValidationError, match=message):
            build_family("F2", _with("F2", **overrides))


class TestEllipticMT:
    """F3 closed, trig-exp and numeric profiles."""

    def test_sample_is_integrable(self) -> None:
        sys = build_family("F3", load_sample_params("F3"))
        assert determining_residuals(sys, SMALL_GRID).passed
        assert gauge_check(sys, SMALL_GRID).passed
        assert check_commutation(sys, n_samples=15, seed=7).passed

    def test_period_fixes_C(self) -> None:
        sys = build_family("F3", load_sample_params("F3"))
        expected = 4 * ellip_K(math.sqrt(0.5)) ** 2 / (math.pi**2 * 2.0)
        assert sys.C == pytest.approx(expected)
        assert sys.T.value_slope(0.3)[0] == pytest.approx(sys.T.value_slope(0.3 + 2 * math.pi)[0], abs=1e-9)

    @pytest.mark.parametrize(
        "profile, roots",
        [
            ("jacobi-ex2", (3.0, 2.0, 1.0)),
            ("elementary-ex3", (2.0, 2.0, 1.0)),
            ("elementary-ex4", (3.0, 1.0, 1.0)),
        ],
    )
    def test_other_closed_profiles(self, profile: str, roots: tuple[float, float, float]) -> None:
        params = _with("F3", profile=profile, M1=roots[0], M2=roots[1], M3=roots[2])
        assert determining_residuals(build_family("F3", params), SMALL_GRID).passed

    def test_trig_exp(self) -> None:
        sys = build_family("F3", TRIG_EXP)
        assert sys.C == 0.0
        assert determining_residuals(sys, SMALL_GRID).passed

    def test_numeric_matches_trig_exp(self) -> None:
        closed = build_family("F3", TRIG_EXP)
        numeric = build_family("F3", {
            **TRIG_EXP, "profile": "numeric", "C1": 1.0, "C2": -0.2, "M0": 0.2, "dM0": 0.5,
        })
        assert numeric.z_domain == pytest.approx((-1.0, 1.0))
        for z in (-0.7, 0.0, 0.4):
            assert numeric.W(1.1, 0.8, z) == pytest.approx(closed.W(1.1, 0.8, z), abs=1e-8)

    def test_swapped_wiring_fails(self) -> None:
        sys = build_family("F3", _with("F3", wiring="swapped"))
        report = determining_residuals(sys, SMALL_GRID)
        assert not report.passed
        assert report.per_group["W_order0"] > 1e-3

    @pytest.mark.parametrize(
        "overrides, message",
        [
            ({"M2": 3.0}, "M1 > M2 > M3"),
            ({"profile": "elementary-ex3"}, "M1 = M2 > M3"),
            ({"T2": 3.0}, "T1 > T2 >= T3"),
            ({"t_periods": 1.5}, "integer"),
            ({"t_periods": 0.0, "C": 1.0}, "not 2 pi periodic"),
            ({"t_periods": 0.0, "C": 0.0}, "C > 0"),
            ({"profile": "trig-exp", "C": 1.0}, "C = 0"),
            ({**TRIG_EXP, "kt0": 0.5}, "kt0"),
            ({"profile": "numeric", "z_min": 0.5}, "z_min < 0 < z_max"),
        ],
    )
    def test_constraints(self, overrides: dict[str, object], message: str) -> None:
        with pytest.raises(ValidationError, match=message):
            build_family("F3", _with("F3", **overrides))
