"""Toric symplectic potentials, Abreu's equation and related numerical checks."""

from ._abreu import *  # noqa: F401,F403
from ._abreu import __doc__  # noqa: F401
