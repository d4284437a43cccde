"""LEO satellite IoT random access and backhaul toolkit."""

from ._leoiot import *  # noqa: F401,F403
from ._leoiot import __version__  # noqa: F401
