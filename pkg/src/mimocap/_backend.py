"""Select the kernel implementation at import time.

The compiled extension is used when it imports cleanly, unless the
environment variable ``MIMOCAP_PURE_PYTHON`` is set to a truthy value.
"""

import os

from . import _fallback

kernels = _fallback
name = "python"

if os.environ.get("MIMOCAP_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
    try:
        from . import _kernels
    except ImportError:  # extension not built
        pass
    else:
        kernels = _kernels
        name = "cython"
