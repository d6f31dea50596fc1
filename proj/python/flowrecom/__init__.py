"""ReCom redistricting ensembles with flow-aware proposals."""

from ._core import *  # noqa: F401,F403
from ._core import FlowrecomError, __version__

METHODS = ("RST", "BiasedRST", "MaxIRCut", "MinIRCut")
