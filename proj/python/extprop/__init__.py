"""Extended propagator direction-of-arrival estimators for uniform linear arrays."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ArrayConfig,
    Scenario,
    ExtpropError,
    NumericalError,
    IllConditionedError,
)

__version__ = "0.1.0"
