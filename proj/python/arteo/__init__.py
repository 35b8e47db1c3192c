"""Safe adaptive exploration-and-optimization experiments (C++ core)."""

try:
    from ._arteo import *  # noqa: F401,F403  (installed layout)
except ImportError:  # in-tree build: extension sits on sys.path
    from _arteo import *  # noqa: F401,F403

from ._version import __version__  # noqa: F401
