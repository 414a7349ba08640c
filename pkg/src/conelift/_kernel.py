"""Select the coefficient kernel: compiled extension or pure-python fallback.

Set ``CONELIFT_PURE_PYTHON=1`` to force the fallback (used by the benchmark
to compare both backends).
"""

import os

if os.environ.get("CONELIFT_PURE_PYTHON"):
    from conelift import _kernel_py as kernel
else:
    try:
        from conelift import _jetkernel as kernel  # type: ignore[attr-defined]
    except ImportError:
        from conelift import _kernel_py as kernel

KERNEL_NAME = kernel.KERNEL_NAME
mul_f64 = kernel.mul_f64
horner_f64 = kernel.horner_f64
