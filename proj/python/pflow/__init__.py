"""Particle method for one-dimensional viscous compressible flow."""

from ._pflow import *  # noqa: F401,F403
from ._pflow import __doc__  # noqa: F401
