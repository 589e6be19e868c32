"""Tests for cylint.specialfn: AGM, K and Jacobi elliptic functions."""

import math

import pytest
from scipy import special

from cylint.geometry import DomainError
from cylint.specialfn import (
    agm,
    ellip_K,
    jacobi_cn,
    jacobi_dn,
    jacobi_sn,
    jacobi_sn_cn_dn,
)


class TestAgm:
    def test_known_value(self) -> None:
        # Gauss's constant: 1 / agm(1, sqrt 2)
        assert 1.0 / agm(1.0, math.sqrt(2.0)) == pytest.approx(0.8346268416740731, rel=1e-15)

    def test_equal_arguments(self) -> None:
        assert agm(3.0, 3.0) == 3.0

    @pytest.mark.parametrize("a, b", [(0.0, 1.0), (-1.0, 1.0), (math.inf, 1.0)])
    def test_rejects_bad_arguments(self, a: float, b: float) -> None:
        with pytest.raises(DomainError):
            agm(a, b)


class TestEllipK:
    def test_k_zero_is_half_pi(self) -> None:
        assert ellip_K(0.0) == math.pi / 2

    @pytest.mark.parametrize("k", [0.1, 0.5, 0.9, 0.999])
    def test_matches_scipy(self, k: float) -> None:
        assert ellip_K(k) == pytest.approx(special.ellipk(k * k), rel=1e-13)

    def test_diverges_at_one(self) -> None:
        with pytest.raises(DomainError, match="diverges"):
            ellip_K(1.0)

    def test_rejects_out_of_range(self) -> None:
        with pytest.raises(DomainError):
            ellip_K(1.5)


class TestJacobi:
    """sn, cn, dn against scipy and the elementary limits."""

    @pytest.mark.parametrize("u", [-3.0, -0.4, 0.0, 0.7, 2.5, 11.0])
    @pytest.mark.parametrize("k", [0.2, 0.6, 0.95])
    def test_matches_scipy(self, u: float, k: float) -> None:
        sn, cn, dn, _ = special.ellipj(u, k * k)
        assert jacobi_sn_cn_dn(u, k) == pytest.approx((sn, cn, dn), abs=1e-12)

    def test_k_zero_is_trigonometric(self) -> None:
        assert jacobi_sn_cn_dn(0.9, 0.0) == (math.sin(0.9), math.cos(0.9), 1.0)

    def test_k_one_is_hyperbolic(self) -> None:
        sn, cn, dn = jacobi_sn_cn_dn(0.9, 1.0)
        assert sn == pytest.approx(math.tanh(0.9))
        assert cn == dn == pytest.approx(1.0 / math.cosh(0.9))

    @pytest.mark.parametrize("u, sign", [(800.0, 1.0), (-1500.0, -1.0), (40.0, 1.0)])
    def test_k_one_large_argument(self, u: float, sign: float) -> None:
        sn, cn, dn = jacobi_sn_cn_dn(u, 1.0)
        assert sn == sign
        assert cn == dn == pytest.approx(0.0, abs=1e-17)

    @pytest.mark.parametrize("k", [0.0, 0.3, 0.7, 0.99, 1.0])
    def test_defining_equations(self, k: float) -> None:
        # sn' = cn dn, cn' = -sn dn, dn' = -k^2 sn cn
        h = 1e-5
        for u in (-1.3, 0.2, 0.9, 2.6):
            sn, cn, dn = jacobi_sn_cn_dn(u, k)
            plus = jacobi_sn_cn_dn(u + h, k)
            minus = jacobi_sn_cn_dn(u - h, k)
            d_sn, d_cn, d_dn = ((p - m) / (2 * h) for p, m in zip(plus, minus))
            assert d_sn == pytest.approx(cn * dn, abs=1e-9)
            assert d_cn == pytest.approx(-sn * dn, abs=1e-9)
            assert d_dn == pytest.approx(-k * k * sn * cn, abs=1e-9)

    def test_identities(self) -> None:
        k = 0.7
        for u in (0.3, 1.9, 4.2):
            sn, cn, dn = jacobi_sn(u, k), jacobi_cn(u, k), jacobi_dn(u, k)
            assert sn * sn + cn * cn == pytest.approx(1.0, abs=1e-14)
            assert dn * dn + k * k * sn * sn == pytest.approx(1.0, abs=1e-14)

    def test_quarter_period(self) -> None:
        k = 0.8
        assert jacobi_sn(ellip_K(k), k) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_modulus(self) -> None:
        with pytest.raises(DomainError):
            jacobi_sn_cn_dn(0.5, -0.1)
