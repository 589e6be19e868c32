"""Tests for cylint.catalog.registry: lookup, parameter binding and samples."""

import math

import pytest

from cylint.catalog import (
    FAMILIES,
    UnknownFamilyError,
    ValidationError,
    bind_params,
    build_family,
    describe_family,
    list_families,
    load_sample_params,
)
from cylint.utils.functions import Poly, Zero
from cylint.utils.paramfile import parse_param_text

ALL_IDS = [f"F{i}" for i in range(1, 9)]


class TestLookup:
    def test_all_families_registered(self) -> None:
        assert sorted(FAMILIES) == ALL_IDS
        assert [d.family_id for d in list_families()] == ALL_IDS

    def test_describe_by_id_and_name(self) -> None:
        assert describe_family("F3").name == "elliptic-MT"
        assert describe_family("elliptic-MT").family_id == "F3"

    def test_unknown_family(self) -> None:
        with pytest.raises(UnknownFamilyError, match="Known families"):
            describe_family("F9")

    def test_descriptor_lists_reductions(self) -> None:
        assert describe_family("F1").reductions == ["X1_lin", "X2_lin"]
        assert describe_family("F6").reductions == []

    def test_param_names(self) -> None:
        assert describe_family("F6").param_names() == ["rho", "W1", "W3"]


class TestSamples:
    """Every shipped sample binds and builds."""

    @pytest.mark.parametrize("family", ALL_IDS)
    def test_sample_builds(self, family: str) -> None:
        sys = build_family(family, load_sample_params(family))
        assert sys.family_id == family
        assert sys.W(1.0, 0.5, 0.2) == pytest.approx(sys.W(1.0, 0.5 + 2 * math.pi, 0.2))

    def test_sample_by_name(self) -> None:
        assert load_sample_params("uniform-axial").source == "samples/F1.params"


class TestBindParams:
    """Schema checks applied to parameter files and mappings."""

    def test_defaults(self) -> None:
        bound = bind_params(describe_family("F1"), None)
        assert bound["tau0"] == 0.0
        assert bound["mu0"] == 1.0
        assert isinstance(bound["rho"], Zero)

    def test_slot_from_file(self) -> None:
        pf = parse_param_text("rho = poly\nrho.c2 = 0.5\n")
        bound = bind_params(describe_family("F6"), pf)
        assert bound["rho"](2.0) == 2.0

    def test_mapping_with_function_objects(self) -> None:
        bound = bind_params(describe_family("F6"), {"rho": Poly(0.0, 1.0)})
        assert bound["rho"](3.0) == 3.0

    def test_unknown_key(self) -> None:
        with pytest.raises(ValidationError, match="unknown parameter 'sigma'"):
            bind_params(describe_family("F6"), {"sigma": 1.0})

    def test_slot_argument_without_kind(self) -> None:
        with pytest.raises(ValidationError, match="without a kind"):
            bind_params(describe_family("F6"), {"rho.c1": 1.0})

    def test_slot_argument_for_unknown_slot(self) -> None:
        with pytest.raises(ValidationError, match="unknown slot"):
            bind_params(describe_family("F6"), {"tau.a": 1.0})

    def test_constant_must_be_number(self) -> None:
        with pytest.raises(ValidationError, match="must be a number"):
            bind_params(describe_family("F1"), parse_param_text("tau0 = big"))

    def test_option_choices(self) -> None:
        with pytest.raises(ValidationError, match="must be one of"):
            bind_params(describe_family("F2"), {"profile": "fancy"})

    def test_angular_slot_rejects_polynomials(self) -> None:
        with pytest.raises(ValidationError, match="accepts kinds"):
            bind_params(describe_family("F5"), {"tau": "poly", "tau.c1": 1.0})

    def test_angular_slot_needs_integer_wave_number(self) -> None:
        with pytest.raises(ValidationError, match="integer k"):
            bind_params(describe_family("F5"), {"tau": "trig", "tau.a": 1.0, "tau.k": 0.5})

    def test_unknown_slot_argument(self) -> None:
        with pytest.raises(ValidationError, match="Unknown argument"):
            bind_params(describe_family("F6"), {"rho": "poly", "rho.c9": 1.0})

    def test_slot_given_a_number(self) -> None:
        with pytest.raises(ValidationError, match="needs a function kind"):
            bind_params(describe_family("F6"), {"rho": 1.0})


class TestBuildFamily:
    def test_defaults_build(self) -> None:
        sys = build_family("F6")
        assert sys.B(1.0, 0.0, 0.0).as_tuple() == (0.0, 0.0, 0.0)

    def test_r_min_override(self) -> None:
        assert build_family("F6", r_min=0.25).r_min == 0.25

    def test_unknown_family(self) -> None:
        with pytest.raises(UnknownFamilyError):
            build_family("nope")
