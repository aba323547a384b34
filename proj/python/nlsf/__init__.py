"""Python bindings for the nlsf ground-state solver."""

from ._nlsf import *  # noqa: F401,F403
from ._nlsf import __doc__  # noqa: F401
