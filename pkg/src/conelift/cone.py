"""Metric cones C(M) = M x R+ with metric dr^2 + r^2 g.

Chart order is (r, x^1 .. x^m).  The closed-form calculus here keeps every
radial coupling term of the cone connection; in particular, for a base
vector field V along a lifted immersion,

* ``nabla_X V`` picks up ``- r h(X, V) dr`` and
* ``nabla_dr V = V / r``,

so the closed rough Laplacian and Jacobi operator below carry the radial
terms that a naive product rule would drop.  All closed forms are pinned
against the generic chart machinery by the test suite.

The complex structure on the cone over a contact sphere acts as
``I Y = J Y + eta(Y) Psi`` on base vectors and ``I Psi = -xi`` on the
Liouville field ``Psi = r dr``; for the round Sasaki sphere this is exactly
the ambient block rotation of the flat cone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from conelift import engine, immersion, jets, manifolds, sasaki
from conelift.errors import DimensionMismatch

CONE_RADII = (0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class ConeManifold(manifolds.ChartManifold):
    base: manifolds.ChartManifold = None


def cone_over(base, r_range=(0.05, 100.0)):
    """The metric cone chart over a chart manifold."""
    n = base.dim + 1

    def metric(x):
        r = x[0]
        gb = np.asarray(base.metric(x[1:]))
        if gb.dtype == object or isinstance(r, jets.Jet):
            out = np.empty((n, n), dtype=object)
            out[:, :] = 0.0
        else:
            out = np.zeros((n, n))
        out[0, 0] = 1.0
        out[1:, 1:] = (r * r) * gb
        return out

    domain = None
    if base.domain is not None:
        domain = manifolds.Box((r_range[0],) + tuple(base.domain.lo),
                               (r_range[1],) + tuple(base.domain.hi))
    else:
        domain = manifolds.Box((r_range[0],) + (-1e9,) * base.dim,
                               (r_range[1],) + (1e9,) * base.dim)
    return ConeManifold(dim=n, metric=metric, name=f"cone({base.name})",
                        domain=domain, base=base)


def liouville(x):
    """Components of Psi = r dr in the cone chart."""
    out = np.zeros(len(x), dtype=object if isinstance(x[0], jets.Jet) else float)
    out[0] = x[0]
    return out


def closed_christoffel(cone, x, cfg=engine.DEFAULT):
    """Cone Levi-Civita symbols assembled from the base ones.

    ``G^r_ij = -r g_ij``, ``G^k_rj = d_jk / r``, base block unchanged,
    all remaining radial entries zero.
    """
    r = x[0]
    xb = np.asarray(x[1:])
    base = cone.base
    gb = np.asarray(base.metric(xb), dtype=float)
    gam_b = np.asarray(manifolds.christoffel(base, xb, cfg), dtype=float)
    n = cone.dim
    out = np.zeros((n, n, n))
    out[0, 1:, 1:] = -r * gb
    for k in range(1, n):
        out[k, 0, k] = 1.0 / r
        out[k, k, 0] = 1.0 / r
    out[1:, 1:, 1:] = gam_b
    return out


def closed_connection(cone, x, U, V, cfg=engine.DEFAULT):
    """``nabla_U V`` for constant-component fields in the cone chart."""
    gam = closed_christoffel(cone, x, cfg)
    return np.einsum("kij,i,j->k", gam, U, V)


def closed_curvature(cone, x, X, Y, Z, cfg=engine.DEFAULT):
    """``R(X, Y) Z`` on the cone: base curvature minus the round defect.

    Any radial slot kills the output; base slots give
    ``R_base(X, Y) Z - g(Y, Z) X + g(X, Z) Y``.
    """
    xb = np.asarray(x[1:])
    base = cone.base
    gb = np.asarray(base.metric(xb), dtype=float)
    riem_b = np.asarray(manifolds.riemann(base, xb, cfg), dtype=float)
    Xb, Yb, Zb = (np.asarray(v[1:], dtype=float) for v in (X, Y, Z))
    rb = np.einsum("lijk,i,j,k->l", riem_b, Xb, Yb, Zb)
    rb = rb - np.dot(Yb, np.dot(gb, Zb)) * Xb + np.dot(Xb, np.dot(gb, Zb)) * Yb
    out = np.zeros(cone.dim)
    out[1:] = rb
    return out


def closed_curvature_grid(cone, x, cfg=engine.DEFAULT):
    """Full component grid of the closed-form cone curvature at ``x``."""
    xb = np.asarray(x[1:])
    base = cone.base
    gb = np.asarray(base.metric(xb), dtype=float)
    riem_b = np.asarray(manifolds.riemann(base, xb, cfg), dtype=float)
    n = cone.dim
    out = np.zeros((n, n, n, n))
    nb = n - 1
    eye = np.eye(nb)
    out[1:, 1:, 1:, 1:] = (riem_b
                           - np.einsum("jk,li->lijk", gb, eye)
                           + np.einsum("ik,lj->lijk", gb, eye))
    return out


# -- lifted immersions ---------------------------------------------------------


@dataclass(frozen=True)
class ConeLift:
    base: immersion.Immersion
    chart: immersion.Immersion | None    # cone chart -> cone chart, when the
                                         # base target is a chart manifold
    ambient: immersion.Immersion | None  # cone chart -> flat ambient, when the
                                         # base target is an embedded sphere

    @property
    def generic(self):
        """Preferred presentation for generic verification runs."""
        return self.ambient if self.ambient is not None else self.chart


def lift(phi):
    """The cone lift (r, x) -> (r, phi(x)) in every available presentation."""
    cone_src = cone_over(phi.source)
    chart = None
    ambient = None
    if phi.target_is_chart:
        cone_tgt = cone_over(phi.target)

        def cmap(x):
            out = np.empty(cone_tgt.dim, dtype=object)
            out[0] = x[0]
            out[1:] = np.asarray(phi.map(x[1:]))
            return out

        chart = immersion.Immersion(source=cone_src, target=cone_tgt,
                                    map=cmap, label=f"lift({phi.label})")
    if isinstance(phi.target, manifolds.EmbeddedSphere):
        amb = manifolds.EuclideanSpace(phi.target.ambient_dim)

        def amap(x):
            return x[0] * np.asarray(phi.map(x[1:]))

        ambient = immersion.Immersion(source=cone_src, target=amb,
                                      map=amap, label=f"lift({phi.label})")
    if isinstance(phi.target, manifolds.EuclideanSpace):
        raise DimensionMismatch("lift expects a sphere or chart target")
    return ConeLift(base=phi, chart=chart, ambient=ambient)


def split_ambient(u, q, r):
    """Split an ambient cone vector at radius r over base point q into
    (radial coefficient, base components in the sphere's ambient rep).

    The base part is divided by r so that it matches base-chart components:
    the cone chart identifies a base vector v at radius r with the ambient
    vector r v.
    """
    ur = np.dot(u, q)
    return ur, (u - ur * q) / r


# -- closed pullback-bundle calculus -------------------------------------------


@dataclass(frozen=True)
class ConeSection:
    """W = V + B dr along a lifted immersion: V a radius-independent section
    of the base pullback bundle, B a scalar on the cone over the source."""

    V: object  # x_base -> base target-rep components
    B: object  # (x_base, r) -> scalar


@dataclass(frozen=True)
class ConeLaplacianTerms:
    base_laplacian: object      # (1/r^2) rough_lap V
    base_reflection: object     # -(m/r^2) V
    base_tangential: object     # +(1/r^2) V^T
    base_tension: object        # -(B/r^3) tau
    base_gradient: object       # -(2/r^3) grad_M B
    radial_scalar: object       # full dr coefficient
    tangential_part: object     # V^T itself

    def base_total(self):
        return (self.base_laplacian + self.base_reflection + self.base_tangential
                + self.base_tension + self.base_gradient)


def closed_pullback_connection(phi, W, x_base, r, direction, cfg=engine.DEFAULT):
    """``nabla_X W`` or ``nabla_dr W`` along the lift, in (base, radial) form.

    ``direction`` is either the string ``"dr"`` or a source vector X (chart
    components on M).  Returns ``(base_components, radial_scalar)``.
    """
    if isinstance(direction, str) and direction == "dr":
        v = np.asarray(W.V(x_base))

        def br(rr):
            return np.asarray(W.B(x_base, rr[0])).reshape(())

        db = engine.jacobian(br, np.array([r]), cfg).reshape(-1)[0]
        return v / r, db
    X = np.asarray(direction)
    v = np.asarray(W.V(x_base))
    nab = immersion.covariant_derivative(phi, W.V, X, x_base, cfg)
    y, dphi = immersion.differential(phi, x_base, cfg)
    push = np.dot(dphi, X)
    bval = W.B(x_base, r)

    def bx(xb):
        return np.asarray(W.B(xb, r)).reshape(())

    xb_grad = engine.jacobian(bx, x_base, cfg).reshape(-1)
    xB = np.dot(xb_grad, X)
    base = nab + (bval / r) * push
    radial = xB - r * immersion.pairing(phi, y, push, v)
    return base, radial


def closed_rough_laplacian_and_jacobi(phi, W, x_base, r, cfg=engine.DEFAULT):
    """Closed-form rough Laplacian and Jacobi operator of the lift on
    ``W = V + B dr``, term by term.

    Returns ``(terms, lap_base, lap_radial, jac_base, jac_radial)`` where the
    two base outputs are in the base target representation.
    """
    m = phi.m
    y, dphi = immersion.differential(phi, x_base, cfg)
    v = np.asarray(W.V(x_base))
    tau = immersion.tension(phi, x_base, cfg)
    lapV = immersion.rough_laplacian(phi, W.V, x_base, cfg)
    basis = immersion.pushed_frame(phi, x_base, cfg)
    vt = immersion.tangential_part(phi, x_base, v, cfg, basis=basis)

    bval = float(W.B(x_base, r))

    def bx(xb):
        return np.asarray(W.B(xb, r)).reshape(())

    def br(rr):
        return np.asarray(W.B(x_base, rr[0])).reshape(())

    grad_b = manifolds.gradient(phi.source, bx, x_base, cfg)
    lap_b = manifolds.laplacian(phi.source, bx, x_base, cfg)
    _, dbr, ddbr = engine.value_jacobian_hessian(br, np.array([r]), cfg)
    dbr = float(np.asarray(dbr).reshape(-1)[0])
    ddbr = float(np.asarray(ddbr).reshape(-1)[0])

    frame = immersion.source_frame(phi, x_base)
    mixed = 0.0
    for e in frame:
        nab = immersion.covariant_derivative(phi, W.V, e, x_base, cfg)
        mixed = mixed + immersion.pairing(phi, y, np.dot(dphi, e), nab)
    h_tau_v = immersion.pairing(phi, y, tau, v)

    terms = ConeLaplacianTerms(
        base_laplacian=lapV / r ** 2,
        base_reflection=-(m / r ** 2) * v,
        base_tangential=vt / r ** 2,
        base_tension=-(bval / r ** 3) * tau,
        base_gradient=-(2.0 / r ** 3) * np.dot(dphi, grad_b),
        radial_scalar=(lap_b / r ** 2 - ddbr - (m / r) * dbr + (m / r ** 2) * bval
                       + (2.0 / r) * mixed + h_tau_v / r),
        tangential_part=vt,
    )
    lap_base = terms.base_total()
    lap_radial = terms.radial_scalar

    curv = immersion.curvature_operator(phi, W.V, x_base, cfg)
    calR_base = (curv - float(m) * v + vt) / r ** 2
    jac_base = lap_base - calR_base
    jac_radial = lap_radial
    return terms, lap_base, lap_radial, jac_base, jac_radial


# -- complex structure and the cone two-form -------------------------------------


def kaehler_form(S, r, p, u, v):
    """The cone two-form on vectors given as (radial coeff, base components):
    ``2 r dr wedge eta + r^2 deta`` with half-convention wedges; for the
    constructed sphere ``deta(X, Y) = h(X, JY)`` holds to machine precision
    and is used directly."""
    a1, X1 = u
    a2, X2 = v
    term1 = r * (a1 * S.eta(p, X2) - a2 * S.eta(p, X1))
    term2 = (r ** 2) * np.dot(X1, np.asarray(S.J(p, X2)))
    return term1 + term2


def complex_structure_apply(S, r, p, u):
    """I acting on (radial coeff, base components).

    ``I(dr) = -xi / r`` and ``I X = J X + eta(X) r dr``, so
    ``I(a dr + X) = (r eta(X)) dr + (J X - (a / r) xi)``.
    """
    a, X = u
    base = np.asarray(S.J(p, X)) - (a / r) * np.asarray(S.xi(p))
    radial = r * S.eta(p, X)
    return radial, base


def lagrangian_residual(S, phi, x_base, r, cfg=engine.DEFAULT):
    """max |Omega(u, v)| over the candidate basis {Psi, dphi(e_i)} of the
    lifted tangent space at (r, x)."""
    y, dphi = immersion.differential(phi, x_base, cfg)
    if 2 * (phi.m + 1) != S.carrier.ambient_dim:
        raise DimensionMismatch("candidate basis does not have half dimension")
    basis = [(r, np.zeros(phi.target.ambient_dim))]
    for e in immersion.source_frame(phi, x_base):
        basis.append((0.0, np.asarray(np.dot(dphi, e), dtype=float)))
    worst = 0.0
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            worst = max(worst, abs(float(jets.deep_value(
                kaehler_form(S, r, y, basis[i], basis[j])))))
    return worst
