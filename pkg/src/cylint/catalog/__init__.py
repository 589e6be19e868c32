"""Catalog of cylindrical-type integrable magnetic systems F1 ... F8."""

from cylint.catalog.registry import (
    FAMILIES,
    bind_params,
    build_family,
    describe_family,
    list_families,
    load_sample_params,
)
from cylint.catalog.system import (
    FamilyDescriptor,
    GaugeShifted,
    LinearIntegral,
    Rank3Error,
    ResidualGateError,
    SystemInstance,
    UnknownFamilyError,
    UnsupportedReductionError,
    ValidationError,
    first_order_integrals,
    gauge_shifted,
    integral_value,
    perturb_potential,
    phase_function,
)

__all__ = [
    "FAMILIES",
    "FamilyDescriptor",
    "GaugeShifted",
    "LinearIntegral",
    "Rank3Error",
    "ResidualGateError",
    "SystemInstance",
    "UnknownFamilyError",
    "UnsupportedReductionError",
    "ValidationError",
    "bind_params",
    "build_family",
    "describe_family",
    "first_order_integrals",
    "gauge_shifted",
    "integral_value",
    "list_families",
    "load_sample_params",
    "perturb_potential",
    "phase_function",
]
