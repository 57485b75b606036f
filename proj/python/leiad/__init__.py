"""Python bindings for the leiad core."""

from ._leiad import *  # noqa: F401,F403
from ._leiad import LeiadError, SessionManager

__all__ = [name for name in dir() if not name.startswith("_")]
