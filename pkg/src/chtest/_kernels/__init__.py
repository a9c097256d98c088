"""Hot graph kernels with a compiled implementation and a pure-Python fallback.

``reach_many`` is imported from the Cython extension when it was built,
otherwise from :mod:`._reach_py`. ``BACKEND`` names the one in use. Set
``CHTEST_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _reach_py

if os.environ.get("CHTEST_PURE_PYTHON"):
    from ._reach_py import reach_many
    BACKEND = "python"
else:
    try:
        from ._reach import reach_many
        BACKEND = "cython"
    except ImportError:
        from ._reach_py import reach_many
        BACKEND = "python"

reach_many_py = _reach_py.reach_many

__all__ = ["reach_many", "reach_many_py", "BACKEND"]
