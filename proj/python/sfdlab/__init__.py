"""Spatial difference schemes for stochastic parabolic problems.

The heavy lifting lives in the compiled ``_core`` extension. Installed
builds place it inside this package; in a plain CMake build tree the
module sits next to the build products instead, so fall back to a
top-level import (the test harness puts the build directory on the
path, via ``SFDLAB_CORE_DIR`` when set).
"""

import os
import sys

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __doc__ as _core_doc
except ImportError:  # build-tree layout: _core is not inside the package
    _dir = os.environ.get("SFDLAB_CORE_DIR")
    if _dir and _dir not in sys.path:
        sys.path.append(_dir)
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _core_doc

__doc__ = _core_doc or __doc__
