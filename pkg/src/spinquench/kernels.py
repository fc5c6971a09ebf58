"""Backend selection for the statevector kernels.

The compiled extension (``_speedups``) is preferred; the numpy fallback is
used when the extension is missing or when ``SPINQUENCH_PURE=1`` is set in
the environment.  Both backends expose the same function set and are
exercised against each other in the test suite and in
``benchmarks/bench_kernels.py``.
"""

import os

from . import _kernels_py

if os.environ.get("SPINQUENCH_PURE", "0") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

apply_1q = _impl.apply_1q
apply_diag1q = _impl.apply_diag1q
apply_2q = _impl.apply_2q
apply_phase2q = _impl.apply_phase2q
expect_z = _impl.expect_z
bit_prob = _impl.bit_prob
parity_even_prob = _impl.parity_even_prob
project_mask = _impl.project_mask
