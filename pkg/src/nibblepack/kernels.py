"""Hot kernels: the compiled extension when available, otherwise the numpy fallback.

Set ``NIBBLEPACK_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"

if os.environ.get("NIBBLEPACK_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

pair_popcounts = _impl.pair_popcounts
max_independent_set = _impl.max_independent_set
upper_edges = _impl.upper_edges
mixed_pair_counts = _impl.mixed_pair_counts
max_pair_popcount = _impl.max_pair_popcount
