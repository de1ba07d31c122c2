"""Numerics for noncommutative Orlicz sequence spaces of finite matrices."""

from .errors import (
    BracketOverflowError,
    ConvergenceError,
    DimensionMismatchError,
    InvalidFunctionError,
    InvalidInputError,
    InvalidParameterError,
    OrliczError,
)
from .functions import (
    GridFunction,
    GridSpec,
    OrliczFunction,
    conjugate,
    delta2_probe,
    index_alpha,
    index_beta,
    intermediate,
    parse_phi,
    power_function,
    validate,
)
from .norms import NormResult, luxemburg_norm, orlicz_norm, schatten_norm
from .report import CheckRecord, VerificationReport
from .spectral import modular_trace, singular_values
from .tuples import (
    OperatorPair,
    TupleSpaceSpec,
    conjugate_spec,
    tuple_luxemburg_norm,
    tuple_orlicz_norm,
    upsilon,
)

__version__ = "0.1.0"
