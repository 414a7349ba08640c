"""Contact metric structures on odd spheres and biharmonicity residual systems.

The standard structure on the unit sphere S^(2m+1) in R^(2m+2) uses the
ambient block rotation ``J0 (x, y) -> (-y, x)`` on each complex pair.  The
sign pairing is pinned by the axioms themselves: with

* ``xi(p) = -J0 p``  (the distinguished unit field),
* ``eta = h(., xi)``,
* ``J v = J0 v`` projected tangentially,

all seven contact-metric axioms hold together with the defining condition
``(nabla_X J)(Y) = h(X, Y) xi - eta(Y) X``, using the half-convention
``d eta(X, Y) = (X eta(Y) - Y eta(X) - eta([X, Y])) / 2``.  Flipping xi to
``+J0 p`` flips the sign of both the two-form identity and the defining
condition; the residual functions below expose that, and the construction
tests pin the working choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from conelift import engine, immersion, jets, manifolds
from conelift.errors import DimensionMismatch, NotLegendrian

LEGENDRIAN_GATE = 1e-8


def block_rotation(ambient_dim):
    """Ambient complex-structure matrix: (x, y) -> (-y, x) on each pair."""
    if ambient_dim % 2:
        raise DimensionMismatch("ambient dimension must be even")
    j = np.zeros((ambient_dim, ambient_dim))
    for k in range(0, ambient_dim, 2):
        j[k, k + 1] = -1.0
        j[k + 1, k] = 1.0
    return j


@dataclass(frozen=True)
class ContactMetricStructure:
    carrier: manifolds.EmbeddedSphere
    xi: object    # p -> unit field components
    eta: object   # (p, v) -> scalar
    J: object     # (p, v) -> tangent components
    label: str = ""

    @property
    def m(self):
        return self.carrier.dim // 2

    def tangent_basis(self, p):
        """Deterministic h-orthonormal basis of T_p S: projected ambient axes."""
        n = self.carrier.ambient_dim
        vecs = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            v = self.carrier.project(p, e)
            for w in vecs:
                v = v - np.dot(w, v) * w
            nn = float(jets.deep_value(np.dot(v, v)))
            if nn > 1e-12:
                vecs.append(v / np.sqrt(nn))
            if len(vecs) == self.carrier.dim:
                break
        return vecs


def build_sasaki_sphere(m, flip_xi=False, flip_J=False):
    """The standard contact metric structure on the unit S^(2m+1).

    ``flip_xi`` / ``flip_J`` produce deliberately wrong structures for
    negative tests of the residual functions.
    """
    sphere = manifolds.EmbeddedSphere(2 * m + 1)
    j0 = block_rotation(2 * m + 2)
    s_xi = 1.0 if flip_xi else -1.0
    s_j = -1.0 if flip_J else 1.0

    def xi(p):
        return s_xi * np.dot(j0, p)

    def eta(p, v):
        return s_xi * np.dot(v, np.dot(j0, p))

    def J(p, v):
        w = np.dot(j0, v)
        return s_j * sphere.project(p, w)

    return ContactMetricStructure(carrier=sphere, xi=xi, eta=eta, J=J,
                                  label=f"sasaki-sphere-m{m}")


def _extend(p, v):
    """Projected-constant tangent field through (p, v): q -> v - <v, q> q."""
    def field(q):
        return v - np.dot(v, q) * q

    return field


def _sphere_nabla(S, field, p, direction, cfg):
    """Levi-Civita derivative on the sphere: project the ambient derivative."""
    d = engine.directional(field, p, direction, cfg)
    return S.carrier.project(p, d)


def d_eta(S, p, X, Y, cfg=engine.DEFAULT):
    """Half-convention exterior derivative of eta on extended fields."""
    Xf, Yf = _extend(p, X), _extend(p, Y)

    def eta_Y(q):
        return np.asarray(S.eta(q, Yf(q))).reshape(())

    def eta_X(q):
        return np.asarray(S.eta(q, Xf(q))).reshape(())

    x_of = engine.directional(eta_Y, p, X, cfg)
    y_of = engine.directional(eta_X, p, Y, cfg)
    bracket = (engine.directional(Yf, p, X, cfg)
               - engine.directional(Xf, p, Y, cfg))
    return 0.5 * (x_of - y_of - S.eta(p, bracket))


def axiom_residuals(S, p, cfg=engine.DEFAULT, X=None, Y=None, rng=None):
    """The seven defining residuals of a contact metric structure at ``p``.

    Keys: ``square`` (J^2 = -Id + eta (x) xi), ``unit`` (eta(xi) = 1),
    ``kernel`` (J xi = 0), ``eta_J`` (eta o J = 0), ``compatible``
    (h(JX, JY) = h(X, Y) - eta(X) eta(Y)), ``dual`` (eta = h(., xi)),
    ``two_form`` (d eta(X, Y) = h(X, JY)).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    sph = S.carrier
    if X is None:
        X = sph.project(p, rng.standard_normal(sph.ambient_dim))
    if Y is None:
        Y = sph.project(p, rng.standard_normal(sph.ambient_dim))
    xi = np.asarray(S.xi(p))
    out = {}
    jx = np.asarray(S.J(p, X))
    out["square"] = _vnorm(S.J(p, jx) + X - S.eta(p, X) * xi)
    out["unit"] = abs(float(S.eta(p, xi)) - 1.0)
    out["kernel"] = _vnorm(S.J(p, xi))
    out["eta_J"] = abs(float(S.eta(p, jx)))
    jy = np.asarray(S.J(p, Y))
    out["compatible"] = abs(float(np.dot(jx, jy) - np.dot(X, Y)
                                  + S.eta(p, X) * S.eta(p, Y)))
    out["dual"] = abs(float(S.eta(p, X) - np.dot(X, xi)))
    out["two_form"] = abs(float(d_eta(S, p, X, Y, cfg) - np.dot(X, jy)))
    return out


def _vnorm(v):
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(np.dot(v, v)))


def sasaki_condition_residual(S, X, Y, p, cfg=engine.DEFAULT, extension_scale=None):
    """|(nabla_X J)(Y) - h(X, Y) xi + eta(Y) X| at p.

    ``extension_scale`` multiplies the Y-extension by ``1 + <q - p, w>`` to
    exercise extension independence of the tensor.
    """
    Yf0 = _extend(p, Y)
    if extension_scale is None:
        Yf = Yf0
    else:
        w = np.asarray(extension_scale)

        def Yf(q):
            return (1.0 + np.dot(q - p, w)) * Yf0(q)

    def JY(q):
        return np.asarray(S.J(q, Yf(q)))

    nabla_JY = _sphere_nabla(S, JY, p, X, cfg)
    nabla_Y = _sphere_nabla(S, Yf, p, X, cfg)
    lhs = nabla_JY - np.asarray(S.J(p, nabla_Y))
    rhs = np.dot(X, Y) * np.asarray(S.xi(p)) - S.eta(p, Y) * X
    return _vnorm(lhs - rhs)


def legendrian_residual(phi, S, x, cfg=engine.DEFAULT):
    """max_i |eta(dphi e_i)| over the orthonormal source frame at ``x``."""
    if S.carrier.dim != 2 * phi.m + 1:
        raise DimensionMismatch(
            f"source dim {phi.m} needs carrier dim {2 * phi.m + 1}")
    y, dphi = immersion.differential(phi, x, cfg)
    worst = 0.0
    for e in immersion.source_frame(phi, x):
        worst = max(worst, abs(float(jets.deep_value(
            S.eta(y, np.dot(dphi, e))))))
    return worst


def require_legendrian(phi, S, x, cfg=engine.DEFAULT, gate=LEGENDRIAN_GATE):
    res = legendrian_residual(phi, S, x, cfg)
    if res > gate:
        raise NotLegendrian(f"{phi.label or 'immersion'}: residual {res:.3e} > {gate}")
    return res


def space_form_curvature(eps, S, X, Y, Z, p):
    """Curvature of a Sasakian space form with phi-sectional curvature eps,
    evaluated literally, all seven terms."""
    h = np.dot
    eta = lambda v: S.eta(p, v)
    J = lambda v: np.asarray(S.J(p, v))
    xi = np.asarray(S.xi(p))
    a = (eps + 3.0) / 4.0
    b = (eps - 1.0) / 4.0
    out = a * (h(Y, Z) * X - h(Z, X) * Y)
    out = out + b * (eta(X) * eta(Z) * Y - eta(Y) * eta(Z) * X
                     + h(X, Z) * eta(Y) * xi - h(Y, Z) * eta(X) * xi
                     + h(Z, J(Y)) * J(X) - h(Z, J(X)) * J(Y)
                     + 2.0 * h(X, J(Y)) * J(Z))
    return out


def space_form_ricci(eps, S, p, U, V):
    """Frame trace of the space-form curvature: Ric(U, V)."""
    total = 0.0
    for e in S.tangent_basis(p):
        total = total + np.dot(space_form_curvature(eps, S, e, U, V, p), e)
    return total


def _source_components(phi, x, v, cfg):
    """Source-chart components of a target-rep vector tangent to the immersion."""
    y, dphi = immersion.differential(phi, x, cfg)
    frame = immersion.source_frame(phi, x)
    out = 0.0
    for e in frame:
        out = out + immersion.pairing(phi, y, v, np.dot(dphi, e)) * e
    return out


def _d_second_fundamental(phi, x, cfg):
    """(nabla^perp_{e_k} B)(e_i, e_j) over the frame, shape (m, m, m, rep)."""
    frame_at = immersion._frame_fields(phi)
    frame = frame_at(x)
    m = phi.m
    rep = phi.rep_dim
    data = immersion.second_fundamental_form(phi, x, cfg)
    out = np.empty((m, m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            def Bij(y, _i=i, _j=j):
                d = immersion.second_fundamental_form(phi, y, cfg)
                fr = frame_at(y)
                return np.einsum("ija,i,j->a", d.B, fr[_i], fr[_j])

            engine.tag_noise(Bij, cfg, orders=2)
            for k in range(m):
                full = immersion.covariant_derivative(phi, Bij, frame[k], x, cfg)
                perp = immersion.normal_part(phi, x, full, cfg)

                def Ei(y, _i=i):
                    return frame_at(y)[_i]

                def Ej(y, _j=j):
                    return frame_at(y)[_j]

                di = manifolds.vector_field_covariant(phi.source, Ei, frame[k], x, cfg)
                dj = manifolds.vector_field_covariant(phi.source, Ej, frame[k], x, cfg)
                corr = (np.einsum("ija,i,j->a", data.B, di, frame[j])
                        + np.einsum("ija,i,j->a", data.B, frame[i], dj))
                out[i, j, k] = perp - corr
    return out, data, frame


def legendrian_biharmonic_residuals(phi, S, x, cfg=engine.DEFAULT):
    """Left-hand sides of the tangential / normal biharmonicity system for a
    Legendrian immersion into a Sasakian sphere, in target representation."""
    require_legendrian(phi, S, x, cfg)
    H = immersion.mean_curvature_section(phi, cfg)
    dB, data, frame = _d_second_fundamental(phi, x, cfg)
    m = phi.m
    y, dphi = immersion.differential(phi, x, cfg)
    H_val = np.asarray(H(x))
    frame_at = immersion._frame_fields(phi)

    # tangential line: shape terms plus the Codazzi rewriting of the
    # curvature term
    tang_src = 0.0
    for i in range(m):
        def Ei(yy, _i=i):
            return frame_at(yy)[_i]

        def AH_Ei(yy, _Ei=Ei):
            return immersion.shape_apply(phi, H, _Ei(yy), yy, cfg, check=False)

        first = manifolds.vector_field_covariant(phi.source, AH_Ei, frame[i], x, cfg)
        conn = manifolds.vector_field_covariant(phi.source, Ei, frame[i], x, cfg)
        second = immersion.shape_apply(phi, H, conn, x, cfg, check=False)
        nperp = immersion.normal_connection(phi, H, frame[i], x, cfg)
        third = immersion.shape_apply(phi, nperp, frame[i], x, cfg, check=False)
        tang_src = tang_src + (first - second) + third
    codazzi = 0.0
    for j in range(m):
        coeff = 0.0
        for i in range(m):
            coeff = coeff + np.dot(dB[j, i, i] - dB[i, j, i],
                                   H_val)
        codazzi = codazzi + coeff * frame[j]
    tangential = np.dot(dphi, tang_src - codazzi)

    # normal line
    lap = immersion.normal_laplacian(phi, H, x, cfg)
    btrace = 0.0
    for i in range(m):
        ahe = immersion.shape_apply(phi, H, frame[i], x, cfg, check=False)
        btrace = btrace + np.einsum("ija,i,j->a", data.B, ahe, frame[i])
    JH = np.asarray(S.J(y, H_val))
    ric_terms = 0.0
    ric_m = None
    if m > 1:
        ric_m = manifolds.ricci(phi.source, x, cfg)
        g_src = np.asarray(phi.source.metric(x))
    for j in range(m):
        ej_t = np.dot(dphi, frame[j])
        ric_n = space_form_ricci(1.0, S, y, JH, ej_t)
        term = ric_n
        if m > 1:
            jh_src = _source_components(phi, x, JH, cfg)
            term = term - np.einsum("ab,a,b->", ric_m, jh_src, frame[j])
        ric_terms = ric_terms + term * np.asarray(S.J(y, ej_t))
    shape_terms = 0.0
    jh_src = _source_components(phi, x, JH, cfg)
    for i in range(m):
        b_jh = np.einsum("ija,i,j->a", data.B, jh_src, frame[i])
        a_b = immersion.shape_apply(phi, b_jh, frame[i], x, cfg, check=False)
        shape_terms = shape_terms + np.asarray(S.J(y, np.dot(dphi, a_b)))
    ah_jh = immersion.shape_apply(phi, H, jh_src, x, cfg, check=False)
    last = float(m) * np.asarray(S.J(y, np.dot(dphi, ah_jh)))
    normal = lap + btrace + ric_terms - shape_terms + last + H_val
    return np.asarray(tangential), np.asarray(normal)


def spaceform_eigen_coefficient(eps, m):
    return (eps * (m + 3.0) + 3.0 * (m - 1.0)) / 4.0


def spaceform_biharmonic_residual(phi, eps, x, cfg=engine.DEFAULT, S=None):
    """Eigen residual |rough_lap H - c(eps, m) H| and the split residual pair
    for a Legendrian immersion into a Sasakian space form."""
    if S is None:
        S = build_sasaki_sphere(phi.m)
    require_legendrian(phi, S, x, cfg)
    m = phi.m
    c = spaceform_eigen_coefficient(eps, m)
    H = immersion.mean_curvature_section(phi, cfg)
    H_val = np.asarray(H(x))
    lap_full = immersion.rough_laplacian(phi, H, x, cfg)
    eigen = _vnorm(np.asarray(lap_full, dtype=float) - c * np.asarray(H_val, dtype=float))

    frame = immersion.source_frame(phi, x)
    data = immersion.second_fundamental_form(phi, x, cfg)
    tang_src = 0.0
    frame_at = immersion._frame_fields(phi)
    for i in range(m):
        def Ei(yy, _i=i):
            return frame_at(yy)[_i]

        def AH_Ei(yy, _Ei=Ei):
            return immersion.shape_apply(phi, H, _Ei(yy), yy, cfg, check=False)

        first = manifolds.vector_field_covariant(phi.source, AH_Ei, frame[i], x, cfg)
        conn = manifolds.vector_field_covariant(phi.source, Ei, frame[i], x, cfg)
        second = immersion.shape_apply(phi, H, conn, x, cfg, check=False)
        nperp = immersion.normal_connection(phi, H, frame[i], x, cfg)
        third = immersion.shape_apply(phi, nperp, frame[i], x, cfg, check=False)
        tang_src = tang_src + (first - second) + third
    y, dphi = immersion.differential(phi, x, cfg)
    line_a = np.dot(dphi, tang_src)
    lap_perp = immersion.normal_laplacian(phi, H, x, cfg)
    btrace = 0.0
    for i in range(m):
        ahe = immersion.shape_apply(phi, H, frame[i], x, cfg, check=False)
        btrace = btrace + np.einsum("ija,i,j->a", data.B, ahe, frame[i])
    line_b = lap_perp + btrace - c * H_val
    return eigen, (np.asarray(line_a), np.asarray(line_b))
