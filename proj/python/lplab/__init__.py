"""Optimal Bayesian estimators under L^p losses.

Thin wrapper around the compiled extension; see the project README for the
experiment CLI and file formats.
"""

try:
    from lplab._core import *  # noqa: F401,F403  (installed package layout)
    from lplab import _core as core
except ImportError:  # build-tree layout: extension on PYTHONPATH
    from _core import *  # noqa: F401,F403
    import _core as core

__all__ = [name for name in dir(core) if not name.startswith("_")]
__version__ = "0.1.0"
