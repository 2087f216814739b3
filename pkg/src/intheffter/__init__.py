"""Integer Heffter arrays and integer Heffter array sets: builders, verifiers, oracles."""

from .core import (
    Block,
    FourSet,
    IntervalD,
    PartialArray,
    SumProfile,
    SupportSet,
    VerificationReport,
    verify_ihs,
    verify_integer_heffter,
)
from .errors import (
    ConstructionError,
    ExternalConstruction,
    HeffterError,
    InfeasiblePartition,
    InvalidParameters,
    OpenCase,
)
from .heffter import Feasibility, HeffterParams, build_integer_heffter, classify, ihs_regroup, ihs_to_heffter
from .ihs import appendix_ihs, build_ihs, partition_pieces

__all__ = [
    "Block",
    "FourSet",
    "IntervalD",
    "PartialArray",
    "SumProfile",
    "SupportSet",
    "VerificationReport",
    "verify_ihs",
    "verify_integer_heffter",
    "HeffterError",
    "InvalidParameters",
    "ExternalConstruction",
    "OpenCase",
    "ConstructionError",
    "InfeasiblePartition",
    "HeffterParams",
    "Feasibility",
    "ihs_to_heffter",
    "ihs_regroup",
    "build_integer_heffter",
    "classify",
    "build_ihs",
    "appendix_ihs",
    "partition_pieces",
]
