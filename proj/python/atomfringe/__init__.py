"""Fringe visibility, entanglement bounds and tomography for pinned two-level emitters."""

from ._atomfringe import *  # noqa: F401,F403
from ._atomfringe import __version__  # noqa: F401
