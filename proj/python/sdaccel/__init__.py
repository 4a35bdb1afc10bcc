"""Bit-exact models of SAS compression (PSSA), text-based mixed precision
(TIPS) and the dual-mode bit-slice core, with EMA accounting."""

from ._sdaccel import *  # noqa: F401,F403
from ._sdaccel import __version__  # noqa: F401
