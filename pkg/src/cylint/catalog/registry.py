"""Family registry, parameter binding and shipped sample parameters."""

import logging
from importlib import resources
from typing import Any, Mapping, Optional, Union

from cylint.auxfields import PHI_SAMPLES, R_SAMPLES, Z_SAMPLES
from cylint.catalog.exotic import EllipticMT, ExoticBeta
from cylint.catalog.families import AxialMuRho, PolarXFree, SigmaOnly, TauSigma, UniformAxial
from cylint.catalog.polar import Polar2D
from cylint.catalog.system import (
    FamilyDescriptor,
    SystemInstance,
    UnknownFamilyError,
    ValidationError,
)
from cylint.geometry import DomainError
from cylint.utils.functions import (
    Function1D,
    FunctionGrammarError,
    Zero,
    check_derivatives,
    check_periodic,
    make_function,
)
from cylint.utils.paramfile import ParamFile, parse_param_text

logger = logging.getLogger(__name__)

FAMILIES: dict[str, type[SystemInstance]] = {
    cls.family_id: cls
    for cls in (UniformAxial, ExoticBeta, EllipticMT, AxialMuRho, TauSigma, PolarXFree,
                SigmaOnly, Polar2D)
}

_SAMPLES_BY_VARIABLE = {"r": R_SAMPLES, "phi": PHI_SAMPLES, "z": Z_SAMPLES}

ParamSource = Union[ParamFile, Mapping[str, Any], None]


def _family_class(family_id: str) -> type[SystemInstance]:
    """Resolve an id such as "F3" or a name such as "elliptic-MT"."""
    if family_id in FAMILIES:
        return FAMILIES[family_id]
    for cls in FAMILIES.values():
        if cls.name == family_id:
            return cls
    raise UnknownFamilyError(
        f"Unknown family '{family_id}'. Known families: {', '.join(FAMILIES)}"
    )


def list_families() -> list[FamilyDescriptor]:
    """Descriptors of all catalog families in id order."""
    return [FAMILIES[k].descriptor for k in sorted(FAMILIES)]


def describe_family(family_id: str) -> FamilyDescriptor:
    """
    Schema of one family.

    Raises:
        UnknownFamilyError: If family_id is not in the catalog
    """
    return _family_class(family_id).descriptor


def _raw_values(source: ParamSource) -> dict[str, Any]:
    if source is None:
        return {}
    if isinstance(source, ParamFile):
        return {e.key: e.number if e.is_number else e.word for e in source.entries}
    return dict(source)


def bind_params(descriptor: FamilyDescriptor, source: ParamSource) -> dict[str, Any]:
    """
    Bind a parameter file or mapping to a family schema.

    Constants become floats, slots become Function1D objects (a mapping may
    pass them ready-made) and options stay strings. Missing entries take
    their defaults; missing slots are zero.

    Raises:
        ValidationError: On unknown keys, wrong value types, unknown function
            kinds, non-periodic angular slots or failed derivative gates
    """
    raw = _raw_values(source)
    constants = {c.name: c for c in descriptor.constants}
    slots = {s.name: s for s in descriptor.slots}
    options = {o.name: o for o in descriptor.options}
    fid = descriptor.family_id

    slot_args: dict[str, dict[str, float]] = {name: {} for name in slots}
    for key, value in raw.items():
        if "." in key:
            slot, arg = key.split(".", 1)
            if slot not in slots:
                raise ValidationError(f"{fid}: '{key}' refers to unknown slot '{slot}'")
            if slot not in raw:
                raise ValidationError(f"{fid}: '{key}' given without a kind for slot '{slot}'")
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{fid}: slot argument '{key}' must be a number")
            slot_args[slot][arg] = float(value)
        elif key not in constants and key not in slots and key not in options:
            raise ValidationError(
                f"{fid}: unknown parameter '{key}' (expected one of "
                f"{', '.join(descriptor.param_names())})"
            )

    bound: dict[str, Any] = {}
    for name, spec in constants.items():
        value = raw.get(name, spec.default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{fid}: constant '{name}' must be a number, got '{value}'")
        bound[name] = float(value)

    for name, spec in options.items():
        value = raw.get(name, spec.default)
        if value not in spec.choices:
            raise ValidationError(
                f"{fid}: option '{name}' must be one of {', '.join(spec.choices)}, got '{value}'"
            )
        bound[name] = value

    for name, spec in slots.items():
        value = raw.get(name)
        try:
            if value is None:
                fn: Function1D = Zero()
            elif isinstance(value, Function1D):
                fn = value
            elif isinstance(value, str):
                if value not in spec.kinds:
                    raise ValidationError(
                        f"{fid}: slot '{name}' accepts kinds {', '.join(spec.kinds)}, got '{value}'"
                    )
                fn = make_function(value, slot_args[name])
            else:
                raise ValidationError(f"{fid}: slot '{name}' needs a function kind, got '{value}'")
            if spec.periodic:
                check_periodic(fn, name=name)
            check_derivatives(fn, _SAMPLES_BY_VARIABLE[spec.variable], name=name)
        except FunctionGrammarError as e:
            raise ValidationError(f"{fid}: {e}")
        bound[name] = fn
    return bound


def load_sample_params(family_id: str) -> ParamFile:
    """
    Shipped sample parameter file of a family.

    Raises:
        UnknownFamilyError: If family_id is not in the catalog
    """
    fid = _family_class(family_id).family_id
    resource = resources.files("cylint.samples").joinpath(f"{fid}.params")
    return parse_param_text(resource.read_text(encoding="utf-8"), source=f"samples/{fid}.params")


def build_family(family_id: str, params: ParamSource = None,
                 r_min: Optional[float] = None) -> SystemInstance:
    """
    Build a validated system instance.

    Args:
        family_id: Catalog id, "F1" ... "F8"
        params: ParamFile or mapping; None uses the schema defaults
        r_min: Radius floor; defaults to the configured value

    Returns:
        SystemInstance ready for evaluation

    Raises:
        UnknownFamilyError: If family_id is not in the catalog
        ValidationError: If the parameters violate a family constraint
            (Rank3Error and ResidualGateError are subclasses)
    """
    cls = _family_class(family_id)
    bound = bind_params(cls.descriptor, params)
    sys = cls(bound, r_min=r_min)
    if sys.phi_domain is None:
        try:
            sys.aux.check_periodicity()
        except DomainError as e:
            raise ValidationError(f"{cls.family_id}: {e}")
    logger.debug("Built %s (%s)", cls.family_id, cls.name)
    return sys
