"""Busy-period distribution of the M|D|infinity queue.

Moments come from an exact recursion, the distribution function from a
transform-inversion algorithm with a guaranteed error band, and both are
checked against a convolution series and a Monte Carlo sampler.
"""

from mdbusy.errors import (
    ConsistencyError,
    MdBusyError,
    RangeError,
    ResourceError,
    SingularityError,
    ValidationError,
)
from mdbusy.model import CdfEstimate, Method, MixedCdf, QueueParams, make_params, service_cdf

__version__ = "0.1.0"

__all__ = [
    "CdfEstimate",
    "ConsistencyError",
    "MdBusyError",
    "Method",
    "MixedCdf",
    "QueueParams",
    "RangeError",
    "ResourceError",
    "SingularityError",
    "ValidationError",
    "make_params",
    "service_cdf",
]
