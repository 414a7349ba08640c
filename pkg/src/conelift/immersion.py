"""Calculus attached to an immersion phi: (M, g) -> (N, h).

Sections of the pulled-back tangent bundle are plain callables
``x -> components``, where components are target-chart components for a
:class:`~conelift.manifolds.ChartManifold` target and ambient components for
an :class:`~conelift.manifolds.EmbeddedSphere` / flat target.  Every
operation accepts jet-valued points, so operators compose: the bitension
field is literally the Jacobi operator applied to the tension section.

The source metric used for frames and source Christoffels is the one the
source chart declares; for the catalog immersions it coincides with the
pullback metric (isometric immersions), and tests pin that agreement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from conelift import engine, jets, linalg, manifolds
from conelift.errors import NotNormal, RankDeficient

RANK_TOL = 1e-10


@dataclass(frozen=True)
class Immersion:
    source: manifolds.ChartManifold
    target: object  # ChartManifold | EmbeddedSphere | EuclideanSpace
    map: object     # x -> target coordinates (chart or ambient)
    label: str = ""

    @property
    def m(self):
        return self.source.dim

    @property
    def target_is_chart(self):
        return isinstance(self.target, manifolds.ChartManifold)

    @property
    def rep_dim(self):
        """Length of a section component vector."""
        if self.target_is_chart:
            return self.target.dim
        if isinstance(self.target, manifolds.EmbeddedSphere):
            return self.target.ambient_dim
        return self.target.dim


@dataclass(frozen=True)
class SecondFundamentalData:
    point: object
    B: object       # grid (m, m, rep_dim) of target vectors
    tau: object     # tension vector, rep_dim
    H: object       # mean curvature vector, rep_dim


def differential(phi, x, cfg=engine.DEFAULT):
    """(phi(x), dphi) with dphi[a, i] = d_i phi^a."""
    phi.source.check_point(x)
    return engine.value_and_jacobian(phi.map, x, cfg)


def target_metric_at(phi, y):
    if phi.target_is_chart:
        return phi.target.metric_at(y)
    return None  # ambient representation: plain dot products


def pairing(phi, y, u, v):
    """h(u, v) at target point y, in the section representation."""
    h = target_metric_at(phi, y)
    if h is None:
        return np.dot(u, v)
    return np.dot(u, np.dot(h, v))


def pullback_metric(phi, x, cfg=engine.DEFAULT, check_rank=True):
    """g_ij = h(dphi d_i, dphi d_j); raises RankDeficient at degenerate points."""
    y, dphi = differential(phi, x, cfg)
    h = target_metric_at(phi, y)
    if h is None:
        g = np.einsum("ai,aj->ij", dphi, dphi)
    else:
        g = np.einsum("ai,ab,bj->ij", dphi, h, dphi)
    if check_rank and g.dtype != object:
        w = np.linalg.eigvalsh(np.asarray(g, dtype=float))
        if w.min() <= RANK_TOL:
            raise RankDeficient(
                f"differential loses rank at {x!r} (pullback eigenvalues {w})")
    return g


def source_frame(phi, x):
    return manifolds.orthonormal_frame(phi.source, x)


def covariant_derivative(phi, V, X_vec, x, cfg=engine.DEFAULT, value_jac=None):
    """Pullback-bundle covariant derivative ``nabla_X V`` at ``x``.

    ``X_vec`` is the value of the direction at ``x`` (the operator is
    tensorial in the direction).  ``value_jac`` may supply a precomputed
    ``(V(x), dV)`` pair.
    """
    if value_jac is None:
        v, dV = engine.value_and_jacobian(V, x, cfg)
    else:
        v, dV = value_jac
    xv = np.dot(dV, X_vec)
    if phi.target_is_chart:
        y, dphi = differential(phi, x, cfg)
        gamma = manifolds.christoffel(phi.target, y, cfg)
        push = np.dot(dphi, X_vec)
        return xv + np.einsum("abc,b,c->a", gamma, push, v)
    if isinstance(phi.target, manifolds.EmbeddedSphere):
        y = np.asarray(phi.map(x))
        return phi.target.project(y, xv)
    return xv


# spec-facing alias: the pullback connection acting on sections
pullback_connection = covariant_derivative


def second_fundamental_form(phi, x, cfg=engine.DEFAULT):
    """Coordinate second fundamental form, tension and mean curvature at ``x``."""
    y, dphi, ddphi = engine.value_jacobian_hessian(phi.map, x, cfg)
    m = phi.m
    gamma_src = manifolds.christoffel(phi.source, x, cfg)
    # nabla_{d_i}(dphi d_j) minus dphi(nabla_{d_i} d_j)
    corr = np.einsum("ak,kij->aij", dphi, gamma_src)
    if phi.target_is_chart:
        gamma_tgt = manifolds.christoffel(phi.target, y, cfg)
        second = ddphi + np.einsum("abc,bi,cj->aij", gamma_tgt, dphi, dphi)
    elif isinstance(phi.target, manifolds.EmbeddedSphere):
        second = np.empty_like(ddphi)
        for i in range(m):
            for j in range(m):
                second[:, i, j] = phi.target.project(y, ddphi[:, i, j])
    else:
        second = ddphi
    B = np.einsum("aij->ija", second - corr)
    g = np.asarray(phi.source.metric(x))
    ginv = linalg.inv(g)
    tau = np.einsum("ij,ija->a", ginv, B)
    return SecondFundamentalData(point=x, B=B, tau=tau, H=tau / float(m))


def tension(phi, x, cfg=engine.DEFAULT):
    return second_fundamental_form(phi, x, cfg).tau


def tension_section(phi, cfg=engine.DEFAULT):
    def section(x):
        return second_fundamental_form(phi, x, cfg).tau

    return engine.tag_noise(section, cfg, orders=2)


def mean_curvature_section(phi, cfg=engine.DEFAULT):
    m = float(phi.m)

    def section(x):
        return second_fundamental_form(phi, x, cfg).tau / m

    return engine.tag_noise(section, cfg, orders=2)


def _frame_fields(phi, frame_mix=None):
    def frame_at(y):
        fr = source_frame(phi, y)
        if frame_mix is not None:
            fr = np.dot(np.asarray(frame_mix), fr)
        return fr

    return frame_at


def rough_laplacian(phi, V, x, cfg=engine.DEFAULT, frame_mix=None):
    """Positive connection Laplacian on pullback sections.

    ``-sum_i { nabla_{e_i}(nabla_{e_i} V) - nabla_{(nabla_{e_i} e_i)} V }``
    over the deterministic frame (optionally re-mixed by an orthogonal
    ``frame_mix`` for invariance tests).
    """
    frame_at = _frame_fields(phi, frame_mix)
    frame = frame_at(x)
    m = phi.m
    total = 0.0
    v, dV = engine.value_and_jacobian(V, x, cfg)
    for i in range(m):
        def Ei(y, _i=i):
            return frame_at(y)[_i]

        def Wi(y, _Ei=Ei):
            return covariant_derivative(phi, V, _Ei(y), y, cfg)

        engine.tag_noise(Wi, cfg, parents=(V,), orders=1)
        first = covariant_derivative(phi, Wi, frame[i], x, cfg)
        conn = manifolds.vector_field_covariant(phi.source, Ei, frame[i], x, cfg)
        second = covariant_derivative(phi, V, conn, x, cfg, value_jac=(v, dV))
        total = total + (first - second)
    return -1.0 * total


def curvature_operator(phi, V, x, cfg=engine.DEFAULT):
    """``sum_i R^N(V, dphi e_i) dphi e_i``; tensorial in V."""
    frame = source_frame(phi, x)
    v = np.asarray(V(x)) if callable(V) else np.asarray(V)
    y, dphi = differential(phi, x, cfg)
    out = 0.0
    if phi.target_is_chart:
        riem = manifolds.riemann(phi.target, y, cfg)
        for e in frame:
            w = np.dot(dphi, e)
            out = out + np.einsum("labc,a,b,c->l", riem, v, w, w)
        return out
    for e in frame:
        w = np.dot(dphi, e)
        out = out + phi.target.curvature_op(y, v, w, w)
    return out


def jacobi_operator(phi, V, x, cfg=engine.DEFAULT):
    """J(V) = rough Laplacian minus the curvature operator."""
    return rough_laplacian(phi, V, x, cfg) - curvature_operator(phi, V, x, cfg)


def bitension(phi, x, cfg=engine.DEFAULT):
    """J applied to the tension section; vanishes exactly for biharmonic maps."""
    return jacobi_operator(phi, tension_section(phi, cfg), x, cfg)


# -- tangential / normal splitting ------------------------------------------------


def pushed_frame(phi, x, cfg=engine.DEFAULT):
    """h-orthonormal basis of dphi(T_x M): the pushforward of the source frame."""
    _, dphi = differential(phi, x, cfg)
    return [np.dot(dphi, e) for e in source_frame(phi, x)]


def tangential_part(phi, x, v, cfg=engine.DEFAULT, basis=None):
    if basis is None:
        basis = pushed_frame(phi, x, cfg)
    y = np.asarray(phi.map(x))
    out = 0.0
    for w in basis:
        out = out + pairing(phi, y, v, w) * w
    return out


def normal_part(phi, x, v, cfg=engine.DEFAULT, basis=None):
    return v - tangential_part(phi, x, v, cfg, basis=basis)


def _check_normal(phi, x, zeta_val, cfg):
    y = np.asarray(phi.map(x))
    scale = max(1.0, float(jets.deep_value(pairing(phi, y, zeta_val, zeta_val))))
    for w in pushed_frame(phi, x, cfg):
        if abs(jets.deep_value(pairing(phi, y, zeta_val, w))) > 1e-8 * scale:
            raise NotNormal("section is not h-orthogonal to the immersed tangent")


def shape_operator(phi, zeta, x, cfg=engine.DEFAULT, check=True):
    """Matrix of ``A_zeta`` in the deterministic frame: ``h(A_zeta e_i, e_j) =
    h(B(e_i, e_j), zeta)``; returns the symmetric (m, m) grid."""
    zeta_val = np.asarray(zeta(x)) if callable(zeta) else np.asarray(zeta)
    if check:
        _check_normal(phi, x, zeta_val, cfg)
    data = second_fundamental_form(phi, x, cfg)
    frame = source_frame(phi, x)
    y = np.asarray(phi.map(x))
    m = phi.m
    a = np.empty((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            bij = np.einsum("ija,i,j->a", data.B, frame[i], frame[j])
            a[i, j] = pairing(phi, y, bij, zeta_val)
    try:
        a = a.astype(float)
    except (TypeError, ValueError):
        pass
    return a


def shape_apply(phi, zeta, X_vec, x, cfg=engine.DEFAULT, check=True):
    """``A_zeta X`` in source-chart components."""
    a = shape_operator(phi, zeta, x, cfg, check=check)
    frame = source_frame(phi, x)
    g = np.asarray(phi.source.metric(x))
    coeffs = [np.dot(X_vec, np.dot(g, e)) for e in frame]
    out = 0.0
    for i in range(phi.m):
        for j in range(phi.m):
            out = out + a[i, j] * coeffs[i] * frame[j]
    return out


def normal_connection(phi, zeta, X_vec, x, cfg=engine.DEFAULT):
    """Normal projection of the pullback covariant derivative of ``zeta``."""
    full = covariant_derivative(phi, zeta, X_vec, x, cfg)
    return normal_part(phi, x, full, cfg)


def normal_laplacian(phi, zeta, x, cfg=engine.DEFAULT):
    """Positive Laplacian of the normal connection, same shape as the rough one."""
    frame_at = _frame_fields(phi)
    frame = frame_at(x)
    total = 0.0
    for i in range(phi.m):
        def Ei(y, _i=i):
            return frame_at(y)[_i]

        def Wi(y, _Ei=Ei):
            return normal_connection(phi, zeta, _Ei(y), y, cfg)

        engine.tag_noise(Wi, cfg, parents=(zeta,), orders=1)
        first = normal_part(phi, x, covariant_derivative(phi, Wi, frame[i], x, cfg), cfg)
        conn = manifolds.vector_field_covariant(phi.source, Ei, frame[i], x, cfg)
        second = normal_part(phi, x, covariant_derivative(phi, zeta, conn, x, cfg), cfg)
        total = total + (first - second)
    return -1.0 * total


def _curvature_mean_terms(phi, H_val, x, cfg):
    """``sum_i R^N(H, dphi e_i) dphi e_i`` split into tangential/normal parts."""
    rv = curvature_operator(phi, lambda _y: H_val, x, cfg)
    basis = pushed_frame(phi, x, cfg)
    tang = tangential_part(phi, x, rv, cfg, basis=basis)
    return tang, rv - tang


def biharmonic_split_residuals(phi, x, cfg=engine.DEFAULT):
    """Left-hand sides of the two biharmonicity equations of an isometric
    immersion, both returned in the target representation.

    Tangential line: ``sum (nabla_{e_i} A_H)(e_i) + sum A_{nabla^perp_{e_i} H}(e_i)
    - sum (R^N(H, e_i) e_i)^T``; normal line: ``lap^perp H +
    sum B(A_H e_i, e_i) - sum (R^N(H, e_i) e_i)^perp``.
    """
    H = mean_curvature_section(phi, cfg)
    frame_at = _frame_fields(phi)
    frame = frame_at(x)
    m = phi.m
    data = second_fundamental_form(phi, x, cfg)
    H_val = H(x)
    y, dphi = differential(phi, x, cfg)

    # tangential line, assembled in source components then pushed forward
    tang_src = 0.0
    for i in range(m):
        def Ei(y_, _i=i):
            return frame_at(y_)[_i]

        def AH_Ei(y_, _Ei=Ei):
            return shape_apply(phi, H, _Ei(y_), y_, cfg, check=False)

        engine.tag_noise(AH_Ei, cfg, parents=(H,), orders=0)
        first = manifolds.vector_field_covariant(phi.source, AH_Ei, frame[i], x, cfg)
        conn = manifolds.vector_field_covariant(phi.source, Ei, frame[i], x, cfg)
        second = shape_apply(phi, H, conn, x, cfg, check=False)
        nperp = normal_connection(phi, H, frame[i], x, cfg)
        third = shape_apply(phi, nperp, frame[i], x, cfg, check=False)
        tang_src = tang_src + (first - second) + third
    rc_tang, rc_norm = _curvature_mean_terms(phi, H_val, x, cfg)
    tangential = np.dot(dphi, tang_src) - rc_tang

    lap = normal_laplacian(phi, H, x, cfg)
    btrace = 0.0
    for i in range(m):
        ahe = shape_apply(phi, H, frame[i], x, cfg, check=False)
        btrace = btrace + np.einsum("ija,i,j->a", data.B, ahe, frame[i])
    normal = lap + btrace - rc_norm
    return tangential, normal
