"""Minimized quantum divergences over convex sets of states."""

from ._qadd import *  # noqa: F401,F403
from ._qadd import QaddError

__all__ = [name for name in dir() if not name.startswith("_")]


def error_code(err: QaddError) -> str:
    """Error code carried by a QaddError message ("Code: message")."""
    return str(err).split(":", 1)[0]
