"""Dense linear algebra that works on float64 and jet-valued (object) arrays.

Sizes here are tiny (chart dimensions), so plain Gauss-Jordan with value
pivoting is all that is needed for the object path; float inputs go through
numpy.
"""

from __future__ import annotations

import numpy as np

from conelift import jets
from conelift.errors import SingularMetric


def inv(a):
    a = np.asarray(a)
    if a.dtype != object:
        try:
            return np.linalg.inv(a)
        except np.linalg.LinAlgError as exc:
            raise SingularMetric(str(exc)) from exc
    n = a.shape[0]
    aug = np.empty((n, 2 * n), dtype=object)
    aug[:, :n] = a
    aug[:, n:] = 0.0
    for i in range(n):
        aug[i, n + i] = 1.0
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(jets.deep_value(aug[r, col])))
        pval = jets.deep_value(aug[piv, col])
        if abs(pval) < 1e-300:
            raise SingularMetric("pivot collapsed in object-matrix inverse")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        scale = _reciprocal(aug[col, col])
        aug[col, :] = aug[col, :] * scale
        for r in range(n):
            if r == col:
                continue
            f = aug[r, col]
            if isinstance(f, (int, float)) and f == 0:
                continue
            aug[r, :] = aug[r, :] - f * aug[col, :]
    return aug[:, n:]


def _reciprocal(v):
    if isinstance(v, jets.Jet):
        return v.reciprocal()
    return 1.0 / v


def dot(a, b):
    return np.dot(a, b)


def norm_sq(v, metric=None):
    v = np.asarray(v)
    if metric is None:
        return np.dot(v, v)
    return np.dot(v, np.dot(metric, v))


def gram_schmidt(basis, metric):
    """Orthonormalize rows of ``basis`` against ``metric`` in index order.

    Deterministic (no pivoting); raises SingularMetric when a vector
    degenerates, which for a coordinate basis means the metric was not
    positive definite.
    """
    basis = np.asarray(basis)
    m = basis.shape[0]
    out = np.empty_like(basis, dtype=basis.dtype if basis.dtype == object else float)
    rows = []
    for i in range(m):
        v = basis[i]
        for e in rows:
            coef = np.dot(e, np.dot(metric, v))
            v = v - coef * e
        nsq = np.dot(v, np.dot(metric, v))
        if jets.deep_value(nsq) <= 0.0:
            raise SingularMetric("metric not positive definite under Gram-Schmidt")
        v = v * _invsqrt(nsq)
        rows.append(v)
    for i, r in enumerate(rows):
        out[i] = r
    return out


def _invsqrt(v):
    if isinstance(v, jets.Jet):
        return v.sqrt().reciprocal()
    return 1.0 / np.sqrt(v)
