"""Casimir free energy, entropy and cavity modes between two mirrors."""

from ._core import *  # noqa: F401,F403
from ._core import CasimirError, __doc__  # noqa: F401
