"""Python bindings for the avsup supervisory-control simulator."""

from ._avsup import *  # noqa: F401,F403
from ._avsup import __doc__  # noqa: F401

__version__ = "0.1.0"
