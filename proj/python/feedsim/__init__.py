"""Learning from Poisson message feeds under imperfect recall."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
