"""Hot-kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``BEAMDOPPLER_PURE_PYTHON=1`` to force the fallback.

``sos_synthesize`` always uses the numpy version: its block matrix product
runs on BLAS and beats the compiled scalar recurrence by about 10x (see
``benchmarks/bench_kernels.py``).
"""

import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("BEAMDOPPLER_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

branch_density = _impl.branch_density
bin_counts = _impl.bin_counts
sos_synthesize = _pykernels.sos_synthesize

__all__ = ["BACKEND", "branch_density", "bin_counts", "sos_synthesize"]
