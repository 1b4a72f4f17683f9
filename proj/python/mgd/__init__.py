"""Detection of correlation across multiple randomly relabeled Gaussian graphs."""

from ._mgd import *  # noqa: F401,F403
from ._mgd import __version__  # noqa: F401
