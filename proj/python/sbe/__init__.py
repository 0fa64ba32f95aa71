from ._sbe import *  # noqa: F401,F403
