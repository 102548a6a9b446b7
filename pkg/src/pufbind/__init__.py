"""Bind tuned controller gains to a device's power-up fingerprint.

The toolkit simulates SRAM startup behavior, enrolls a stable window of
cells behind a fuzzy extractor, encodes a gain table as Boolean
expressions keyed to that window, and ships the result as a single
public bundle.  A genuine device recovers the preferred gains; anything
else lands on a chosen degraded row.  Attack harnesses and a scaling
benchmark round out the package.
"""

__version__ = "0.1.0"

from .attack import AttackReport, clone_dynamic_attack, static_enumerate
from .binding import ProtectedBundle, bind, bundle_from_dict, bundle_to_dict, recover_values
from .enrollment import EnrollmentRecord, SamplingPlan, enroll, verify_enrollment
from .errors import (
    CapacityError,
    EnrollmentError,
    ParameterError,
    PufbindError,
    StateError,
)
from .fuzzy_extractor import HelperData, gen_masks, lock, unlock
from .logic_encode import (
    ParamTable,
    Partition,
    SopExprList,
    build_partition,
    build_tobin,
    canonical_text,
    derive_truth_tables,
    eval_exprs,
    hash_exprs,
    minimize,
    parse_exprs,
    synthesize_sop,
)
from .pid_sim import PidConfig, PlantModel, Trace, simulate, validate_table
from .sram_sim import DeviceModel, Temperature, clone_device, new_device, startup

__all__ = [
    "AttackReport",
    "CapacityError",
    "DeviceModel",
    "EnrollmentError",
    "EnrollmentRecord",
    "HelperData",
    "ParamTable",
    "ParameterError",
    "Partition",
    "PidConfig",
    "PlantModel",
    "ProtectedBundle",
    "PufbindError",
    "SamplingPlan",
    "SopExprList",
    "StateError",
    "Temperature",
    "Trace",
    "bind",
    "build_partition",
    "build_tobin",
    "bundle_from_dict",
    "bundle_to_dict",
    "canonical_text",
    "clone_device",
    "clone_dynamic_attack",
    "derive_truth_tables",
    "enroll",
    "eval_exprs",
    "gen_masks",
    "hash_exprs",
    "lock",
    "minimize",
    "new_device",
    "parse_exprs",
    "recover_values",
    "simulate",
    "startup",
    "static_enumerate",
    "synthesize_sop",
    "unlock",
    "validate_table",
    "verify_enrollment",
    "__version__",
]
