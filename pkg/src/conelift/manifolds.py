"""Chart-level tensor calculus: metrics, connections, curvature, scalar calculus.

Conventions (frozen for the whole library):

* curvature operator ``R(U, V) = [nabla_U, nabla_V] - nabla_[U,V]``, components
  ``R[l, i, j, k]`` = l-th component of ``R(d_i, d_j) d_k``;
* Ricci is the frame trace ``Ric(X, Y) = sum_a g(R(e_a, X) Y, e_a)``;
* the Laplacian on functions is positive: on flat space ``lap f = -sum d^2 f``;
* orthonormal frames come from Gram-Schmidt on the coordinate basis in index
  order, with no pivoting, so every run reproduces the same frame.

All operations accept jet-valued points, which is what makes the higher
operators in :mod:`conelift.immersion` compose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from conelift import engine, jets, linalg
from conelift.errors import DomainError, SingularMetric

BOUNDARY_MARGIN = 1e-6
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class Box:
    """Open coordinate box; chart operations reject points near the boundary."""

    lo: tuple
    hi: tuple

    def check(self, x):
        for v, a, b in zip(x, self.lo, self.hi):
            v = jets.deep_value(v)
            if not (a + BOUNDARY_MARGIN <= v <= b - BOUNDARY_MARGIN):
                raise DomainError(
                    f"coordinate {v!r} outside open box ({a}, {b}) margin {BOUNDARY_MARGIN}")


@dataclass(frozen=True)
class ChartManifold:
    """A single-chart manifold given by a smooth metric component function."""

    dim: int
    metric: object  # point -> (dim, dim) component grid
    name: str = ""
    domain: Box | None = None

    def check_point(self, x):
        if len(x) != self.dim:
            raise DomainError(f"point of length {len(x)} on {self.dim}-dim chart")
        if self.domain is not None:
            self.domain.check(x)

    def metric_at(self, x, validate=False):
        self.check_point(x)
        g = np.asarray(self.metric(x))
        if validate and g.dtype != object:
            if np.max(np.abs(g - g.T)) > SYMMETRY_TOL:
                raise SingularMetric(f"metric grid not symmetric at {x!r}")
            w = np.linalg.eigvalsh(g)
            if w.min() <= 0:
                raise SingularMetric(
                    f"metric not positive definite at {x!r} (eigenvalues {w})")
        return g


@dataclass(frozen=True)
class EuclideanSpace:
    """Flat R^dim with the identity metric; the trivial immersion target."""

    dim: int
    name: str = "euclidean"

    def project(self, p, v):
        return v

    def curvature_op(self, p, u, v, w):
        return np.zeros(self.dim)


@dataclass(frozen=True)
class EmbeddedSphere:
    """Unit sphere S^dim in R^(dim+1) with tangential-projection calculus."""

    dim: int
    name: str = "sphere"

    @property
    def ambient_dim(self):
        return self.dim + 1

    def project(self, p, v):
        # Id - p p^T applied to v; works for jet-valued entries
        return v - np.dot(p, v) * p

    def curvature_op(self, p, u, v, w):
        """R(u, v) w for the round unit metric (constant curvature one)."""
        return np.dot(v, w) * u - np.dot(u, w) * v

    def check_point(self, p):
        r = jets.deep_value(np.dot(p, p))
        if abs(r - 1.0) > 1e-8:
            raise DomainError(f"point not on the unit sphere: |p|^2 = {r}")


def metric_inverse(M, x):
    return linalg.inv(M.metric_at(x))


def christoffel(M, x, cfg=engine.DEFAULT):
    """Levi-Civita symbols ``out[k, i, j]`` of the chart metric at ``x``."""
    M.check_point(x)
    g, dg = engine.value_and_jacobian(M.metric, x, cfg)
    ginv = linalg.inv(g)
    # dg[i, j, l] = d_l g_ij
    t = (np.einsum("jli->lij", dg) + np.einsum("ilj->lij", dg)
         - np.einsum("ijl->lij", dg))
    return 0.5 * np.einsum("kl,lij->kij", ginv, t)


def riemann(M, x, cfg=engine.DEFAULT):
    """Curvature components ``R[l, i, j, k]`` of ``R(d_i, d_j) d_k`` at ``x``."""
    M.check_point(x)
    gamma, dgamma = engine.value_and_jacobian(
        lambda y: christoffel(M, y, cfg), x, cfg)
    # dgamma[l, j, k, i] = d_i Gamma^l_jk
    r = (np.einsum("ljki->lijk", dgamma) - np.einsum("likj->lijk", dgamma)
         + np.einsum("lia,ajk->lijk", gamma, gamma)
         - np.einsum("lja,aik->lijk", gamma, gamma))
    return r


def ricci(M, x, cfg=engine.DEFAULT, riem=None):
    """Ricci grid ``Ric[j, k]``; the frame trace over the first curvature slot."""
    if riem is None:
        riem = riemann(M, x, cfg)
    return np.einsum("lljk->jk", riem)


def riemann_and_ricci(M, x, cfg=engine.DEFAULT):
    riem = riemann(M, x, cfg)
    return riem, ricci(M, x, cfg, riem=riem)


def orthonormal_frame(M, x):
    """Rows ``e_1 .. e_m`` of the deterministic g-orthonormal frame at ``x``."""
    M.check_point(x)
    g = M.metric_at(x)
    n = M.dim
    if g.dtype == object:
        basis = np.empty((n, n), dtype=object)
        basis[:, :] = 0.0
        for i in range(n):
            basis[i, i] = 1.0
    else:
        basis = np.eye(n)
    return linalg.gram_schmidt(basis, g)


def gradient(M, f, x, cfg=engine.DEFAULT):
    """Metric dual of df at ``x``."""
    M.check_point(x)
    df = engine.jacobian(lambda y: np.asarray(f(y)).reshape(()), x, cfg)
    return np.dot(metric_inverse(M, x), np.asarray(df).reshape(-1))


def laplacian(M, f, x, cfg=engine.DEFAULT):
    """Positive Laplacian of a scalar field: ``-g^{ij}(d_i d_j f - Gamma^k_ij d_k f)``."""
    M.check_point(x)
    _, df, ddf = engine.value_jacobian_hessian(
        lambda y: np.asarray(f(y)).reshape(()), x, cfg)
    df = np.asarray(df).reshape(-1)
    ddf = np.asarray(ddf).reshape(len(x), len(x))
    ginv = metric_inverse(M, x)
    gamma = christoffel(M, x, cfg)
    return -np.einsum("ij,ij->", ginv, ddf - np.einsum("kij,k->ij", gamma, df))


def divergence(M, V, x, cfg=engine.DEFAULT):
    """``sum_i g(e_i, nabla_{e_i} V)`` over the deterministic frame."""
    M.check_point(x)
    g = M.metric_at(x)
    gamma = christoffel(M, x, cfg)
    v, dv = engine.value_and_jacobian(V, x, cfg)
    frame = orthonormal_frame(M, x)
    total = 0.0
    for e in frame:
        # (nabla_e V)^k = e^j d_j V^k + Gamma^k_{ja} e^j V^a
        cov = np.dot(dv, e) + np.einsum("kja,j,a->k", gamma, e, v)
        total = total + np.dot(e, np.dot(g, cov))
    return total


def vector_field_covariant(M, Y, X_vec, x, cfg=engine.DEFAULT, gamma=None):
    """``nabla_X Y`` at ``x`` for a vector field callable Y and a fixed vector X."""
    if gamma is None:
        gamma = christoffel(M, x, cfg)
    y, dy = engine.value_and_jacobian(Y, x, cfg)
    return np.dot(dy, X_vec) + np.einsum("kja,j,a->k", gamma, X_vec, y)
