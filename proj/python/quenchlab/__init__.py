"""Numerical laboratory for finite-time quenching of dh/dt = Lap(h) - h^-beta.

The compiled extension carries the whole public surface; this package simply
re-exports it. See README.md for the CLI counterpart and the CSV outputs.
"""

try:
    from ._core import *  # noqa: F401,F403
    from . import _core as core  # noqa: F401
except ImportError:  # running against a build tree without package install
    from _core import *  # noqa: F401,F403
    import _core as core  # noqa: F401

__version__ = "0.1.0"
