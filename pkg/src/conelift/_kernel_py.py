"""Pure-python fallback for the truncated-Taylor coefficient kernels.

Mirrors the API of the compiled module ``conelift._jetkernel``.  Both
operate on flat float64 coefficient arrays plus precomputed index tables;
``conelift._kernel`` picks whichever is importable.
"""

import numpy as np

KERNEL_NAME = "python"


def mul_f64(a, b, ia, ib, io, nout):
    """Multiply two truncated Taylor coefficient vectors.

    ``out[io[m]] += a[ia[m]] * b[ib[m]]`` over the whole table.
    """
    out = np.zeros(nout)
    np.add.at(out, io, a[ia] * b[ib])
    return out


def horner_f64(series, dc, ia, ib, io, nout):
    """Evaluate ``sum_j series[j] * dc**j`` where ``dc`` has zero constant term.

    ``series`` are the rescaled derivative values g^(j)(c0)/j!.  Runs the
    Horner recurrence with the same multiply table as ``mul_f64``.
    """
    k = len(series) - 1
    out = np.zeros(nout)
    out[0] = series[k]
    for j in range(k - 1, -1, -1):
        out = mul_f64(out, dc, ia, ib, io, nout)
        out[0] += series[j]
    return out
