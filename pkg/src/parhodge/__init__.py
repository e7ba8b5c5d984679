"""Exact local tame nonabelian Hodge computations in characteristic p."""
from .errors import *  # noqa: F401,F403
from .ffield import FieldCtx, FieldElement
from .kernels import BACKEND
from .series import LaurentSeries, MatSeries, TruncSeries, descend_support, substitute_power

__version__ = "0.1.0"
