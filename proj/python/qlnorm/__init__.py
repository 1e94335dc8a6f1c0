"""Radial solver for L2-normalized quasi-linear Schrodinger solutions."""

from ._core import *  # noqa: F401,F403
from ._core import QlnormError, __doc__  # noqa: F401
