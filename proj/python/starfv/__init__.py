"""Star-shaped Fleming-Viot process and its coalescent dual."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
