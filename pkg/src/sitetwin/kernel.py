"""Kernel backend selection: compiled extension if present, numpy otherwise.

Both backends implement the same contract and produce bit-identical floats
(asserted in the test suite); the compiled one is simply faster on large
networks. ``SITETWIN_FORCE_NUMPY=1`` forces the fallback, which the benchmark
uses to compare the two.
"""

from __future__ import annotations

import os

from . import _kernel_numpy

if os.environ.get("SITETWIN_FORCE_NUMPY"):
    _impl = _kernel_numpy
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernel_numpy

BACKEND: str = _impl.BACKEND

mcs_batch = _impl.mcs_batch
cpm_full = _impl.cpm_full

numpy_backend = _kernel_numpy
