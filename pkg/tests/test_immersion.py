import numpy as np
import pytest

from conelift import engine, immersion, jets, manifolds
from conelift.errors import NotNormal, RankDeficient
from conftest import (CENTRAL_CFG, JET_CFG, flat_chart, round_s3_chart,
                      s3_embedding)

P = lambda v: np.asarray(v, dtype=float)


def norm(v):
    v = P(v)
    return float(np.sqrt(v @ v))


def great_circle():
    def gc(x):
        t = x[0]
        return np.array([jets.cos(t), 0.0, jets.sin(t), 0.0], dtype=object)

    return immersion.Immersion(flat_chart(1, "param"),
                               manifolds.EmbeddedSphere(3), gc, "great-circle")


def small_circle():
    s2 = np.sqrt(2.0)

    def sc(x):
        t = x[0]
        return np.array([jets.cos(s2 * t) / s2, jets.sin(s2 * t) / s2,
                         0.5, 0.5], dtype=object)

    return immersion.Immersion(flat_chart(1, "param"),
                               manifolds.EmbeddedSphere(3), sc, "small-circle")


def latitude(rho):
    sr, cr = np.sin(rho), np.cos(rho)

    def lat(x):
        t = x[0]
        return np.array([sr * jets.cos(t), sr * jets.sin(t), cr + 0.0 * t],
                        dtype=object)

    src = manifolds.ChartManifold(1, lambda x: np.array([[sr ** 2]]),
                                  name="latitude-param")
    return immersion.Immersion(src, manifolds.EmbeddedSphere(2), lat,
                               f"latitude-{rho:.3f}")


class TestPullback:
    def test_identity_immersion(self):
        phi = immersion.Immersion(flat_chart(2), manifolds.EuclideanSpace(2),
                                  lambda x: np.array([x[0], x[1]], dtype=object),
                                  "identity")
        g = immersion.pullback_metric(phi, np.array([0.3, 0.4]))
        assert np.allclose(P(g), np.eye(2), atol=1e-14)

    def test_great_circle_unit_speed(self):
        g = immersion.pullback_metric(great_circle(), np.array([0.9]))
        assert float(P(g)[0, 0]) == pytest.approx(1.0, abs=1e-14)

    def test_small_circle_unit_speed(self):
        # cross-checked against a central-difference evaluation of |gamma'|
        g = immersion.pullback_metric(small_circle(), np.array([0.9]),
                                      CENTRAL_CFG)
        assert float(P(g)[0, 0]) == pytest.approx(1.0, abs=1e-9)

    def test_rank_deficient(self):
        phi = immersion.Immersion(flat_chart(1), manifolds.EuclideanSpace(2),
                                  lambda x: np.array([1.0 + 0.0 * x[0],
                                                      2.0 + 0.0 * x[0]],
                                                     dtype=object), "point")
        with pytest.raises(RankDeficient):
            immersion.pullback_metric(phi, np.array([0.0]))


class TestSecondFundamentalForm:
    def test_geodesic_vanishes(self):
        data = immersion.second_fundamental_form(great_circle(), np.array([0.7]))
        assert norm(data.tau) < 1e-13
        assert np.max(np.abs(P(data.B))) < 1e-13

    def test_latitude_curvature_oracle(self):
        # geodesic curvature of a latitude circle equals cot(rho)
        for rho in (np.pi / 4, np.pi / 3):
            data = immersion.second_fundamental_form(latitude(rho),
                                                     np.array([0.5]))
            assert norm(data.tau) == pytest.approx(1.0 / np.tan(rho), abs=1e-11)
            assert norm(data.H) == pytest.approx(1.0 / np.tan(rho), abs=1e-11)

    def test_small_circle_tension(self):
        data = immersion.second_fundamental_form(small_circle(), np.array([0.5]))
        assert norm(data.tau) == pytest.approx(1.0, abs=1e-12)

    def test_normality_of_B(self):
        rng = np.random.default_rng(0)
        phi = latitude(np.pi / 3)
        for _ in range(10):
            x = np.array([rng.uniform(0, 6)])
            data = immersion.second_fundamental_form(phi, x)
            y = P(phi.map(x))
            for w in immersion.pushed_frame(phi, x):
                assert abs(float(np.dot(P(data.B[0, 0]), P(w)))) < 1e-10
            # also h-orthogonal to the sphere's radial direction by construction
            assert abs(float(np.dot(P(data.tau), y))) < 1e-10

    def test_symmetry(self):
        phi = latitude(np.pi / 3)
        data = immersion.second_fundamental_form(phi, np.array([1.1]))
        assert np.max(np.abs(P(data.B) - np.transpose(P(data.B), (1, 0, 2)))) < 1e-10


class TestPullbackConnection:
    def test_constant_section_flat_target(self):
        phi = immersion.Immersion(flat_chart(1), manifolds.EuclideanSpace(2),
                                  lambda x: np.array([x[0], x[0] ** 2],
                                                     dtype=object), "graph")
        V = lambda y: np.array([jets.sin(y[0]), 3.0 + 0.0 * y[0]], dtype=object)
        out = immersion.covariant_derivative(phi, V, np.array([1.0]),
                                             np.array([0.4]))
        assert P(out)[0] == pytest.approx(np.cos(0.4), abs=1e-13)
        assert abs(P(out)[1]) < 1e-13

    def test_velocity_field_of_geodesic_is_parallel(self):
        phi = great_circle()

        def V(y):
            _, dphi = immersion.differential(phi, y)
            return dphi[:, 0]

        out = immersion.covariant_derivative(phi, V, np.array([1.0]),
                                             np.array([0.4]))
        assert norm(out) < 1e-12

    def test_linearity(self):
        phi = latitude(np.pi / 4)
        x = np.array([0.8])
        V1 = lambda y: np.array([jets.sin(y[0]), 0.2 + 0.0 * y[0],
                                 jets.cos(2 * y[0])], dtype=object)
        V2 = lambda y: np.array([0.1 + 0.0 * y[0], jets.cos(y[0]),
                                 jets.sin(3 * y[0])], dtype=object)
        combo = lambda y: 2.0 * V1(y) - 3.0 * V2(y)
        lhs = immersion.covariant_derivative(phi, combo, np.array([1.0]), x)
        rhs = (2.0 * P(immersion.covariant_derivative(phi, V1, np.array([1.0]), x))
               - 3.0 * P(immersion.covariant_derivative(phi, V2, np.array([1.0]), x)))
        assert np.max(np.abs(P(lhs) - rhs)) < 1e-12


class TestRoughLaplacian:
    def test_flat_reduces_to_componentwise(self):
        phi = immersion.Immersion(flat_chart(2), manifolds.EuclideanSpace(3),
                                  lambda x: np.array([x[0], x[1], 0.0 * x[0]],
                                                     dtype=object), "plane")
        V = lambda y: np.array([y[0] ** 2, 0.0 * y[0], 0.0 * y[0]], dtype=object)
        out = immersion.rough_laplacian(phi, V, np.array([0.3, 0.7]))
        assert np.allclose(P(out), [-2.0, 0.0, 0.0], atol=1e-12)

    def test_unit_circle_position_eigenfield(self):
        phi = immersion.Immersion(flat_chart(1), manifolds.EuclideanSpace(2),
                                  lambda x: np.array([jets.cos(x[0]),
                                                      jets.sin(x[0])],
                                                     dtype=object), "circle")
        V = lambda y: np.array([jets.cos(y[0]), jets.sin(y[0])], dtype=object)
        x = np.array([0.4])
        out = immersion.rough_laplacian(phi, V, x)
        assert np.allclose(P(out), [np.cos(0.4), np.sin(0.4)], atol=1e-12)

    def test_frame_invariance(self):
        phi = immersion.Immersion(
            manifolds.ChartManifold(2, lambda x: np.array([[2.0 / 3, 1.0 / 3],
                                                           [1.0 / 3, 2.0 / 3]]),
                                    name="torus-param"),
            manifolds.EmbeddedSphere(5),
            lambda x: np.array([jets.cos(x[0]), jets.sin(x[0]),
                                jets.cos(x[1]), jets.sin(x[1]),
                                jets.cos(x[0] + x[1]),
                                -jets.sin(x[0] + x[1])], dtype=object) / np.sqrt(3.0),
            "clifford")
        x = np.array([0.4, 1.1])
        V = immersion.tension_section(phi)
        theta = 0.63
        q = np.array([[np.cos(theta), np.sin(theta)],
                      [-np.sin(theta), np.cos(theta)]])
        base = immersion.rough_laplacian(phi, V, x)
        mixed = immersion.rough_laplacian(phi, V, x, frame_mix=q)
        assert np.max(np.abs(P(base) - P(mixed))) < 1e-8


class TestJacobiAndBitension:
    def test_flat_target_curvature_term_zero(self):
        phi = immersion.Immersion(flat_chart(1), manifolds.EuclideanSpace(2),
                                  lambda x: np.array([x[0], x[0] ** 3],
                                                     dtype=object), "cubic")
        V = lambda y: np.array([jets.sin(y[0]), y[0] ** 2], dtype=object)
        x = np.array([0.3])
        assert norm(immersion.curvature_operator(phi, V, x)) < 1e-14
        jac = immersion.jacobi_operator(phi, V, x)
        lap = immersion.rough_laplacian(phi, V, x)
        assert np.max(np.abs(P(jac) - P(lap))) < 1e-14

    def test_constant_curvature_oracle(self):
        phi = great_circle()
        x = np.array([0.9])
        y, dphi = immersion.differential(phi, x)
        # unit normal in the sphere along the circle
        V_val = np.array([0.0, 1.0, 0.0, 0.0])
        got = immersion.curvature_operator(phi, lambda _: V_val, x)
        e = P(dphi)[:, 0]
        want = (e @ e) * V_val - (V_val @ e) * e
        assert np.max(np.abs(P(got) - want)) < 1e-12

    def test_tensoriality_in_V(self):
        phi = latitude(np.pi / 3)
        x = np.array([0.8])
        V = lambda y: np.array([jets.sin(3 * y[0]), jets.cos(y[0]),
                                0.3 + 0.0 * y[0]], dtype=object)
        frozen = P(V(x))
        a = P(immersion.curvature_operator(phi, V, x))
        b = P(immersion.curvature_operator(phi, lambda _: frozen, x))
        assert np.max(np.abs(a - b)) < 1e-12

    def test_great_circle_biharmonic(self):
        t2 = immersion.bitension(great_circle(), np.array([1.2]))
        assert norm(t2) < 1e-13

    def test_small_circle_proper_biharmonic(self):
        phi = small_circle()
        x = np.array([0.7])
        assert norm(immersion.tension(phi, x)) == pytest.approx(1.0, abs=1e-12)
        assert norm(immersion.bitension(phi, x)) < 1e-12

    def test_small_circle_central_backend(self):
        phi = small_circle()
        x = np.array([0.7])
        assert norm(immersion.bitension(phi, x, CENTRAL_CFG)) < 1e-3

    def test_latitude_bitension_fixture(self):
        # tension kappa n with kappa = cot(rho); bitension (kappa^3 - kappa) n
        rho = np.pi / 3
        kappa = 1.0 / np.tan(rho)
        t2 = immersion.bitension(latitude(rho), np.array([0.8]))
        assert norm(t2) == pytest.approx(abs(kappa ** 3 - kappa), abs=1e-10)
        assert norm(t2) > 0.1

    def test_harmonic_implies_biharmonic_on_samples(self):
        phi = great_circle()
        for t in np.linspace(0.2, 6.0, 7):
            assert norm(immersion.tension(phi, np.array([t]))) < 1e-10
            assert norm(immersion.bitension(phi, np.array([t]))) < 1e-8


class TestShapeAndNormal:
    def test_geodesic_shape_vanishes(self):
        phi = great_circle()
        x = np.array([0.5])
        zeta = np.array([0.0, 1.0, 0.0, 0.0])
        a = immersion.shape_operator(phi, zeta, x)
        assert np.max(np.abs(P(a))) < 1e-12

    def test_latitude_shape_oracle(self):
        rho = np.pi / 4
        phi = latitude(rho)
        x = np.array([0.3])
        data = immersion.second_fundamental_form(phi, x)
        zeta = P(data.H) / norm(data.H)
        a = immersion.shape_operator(phi, zeta, x)
        assert float(P(a)[0, 0]) == pytest.approx(1.0 / np.tan(rho), abs=1e-10)

    def test_not_normal_rejected(self):
        phi = great_circle()
        x = np.array([0.5])
        _, dphi = immersion.differential(phi, x)
        with pytest.raises(NotNormal):
            immersion.shape_operator(phi, P(dphi)[:, 0], x)

    def test_weingarten_consistency(self):
        rng = np.random.default_rng(1)
        phi = latitude(np.pi / 3)
        for _ in range(20):
            x = np.array([rng.uniform(0, 6)])
            data = immersion.second_fundamental_form(phi, x)
            y = P(phi.map(x))
            zeta = immersion.normal_part(phi, x, rng.standard_normal(3))
            a = immersion.shape_operator(phi, zeta, x)
            frame = immersion.source_frame(phi, x)
            for i in range(1):
                for j in range(1):
                    bij = np.einsum("ija,i,j->a", P(data.B), P(frame[i]),
                                    P(frame[j]))
                    assert float(P(a)[i, j]) == pytest.approx(
                        float(np.dot(bij, P(zeta))), abs=1e-10)


class TestSplitResiduals:
    def test_geodesic_both_zero(self):
        t_line, n_line = immersion.biharmonic_split_residuals(great_circle(),
                                                              np.array([0.6]))
        assert norm(t_line) < 1e-12
        assert norm(n_line) < 1e-12

    def test_proper_biharmonic_both_zero_with_H_nonzero(self):
        phi = small_circle()
        x = np.array([0.6])
        t_line, n_line = immersion.biharmonic_split_residuals(phi, x)
        assert norm(immersion.tension(phi, x)) > 0.5
        assert norm(t_line) < 1e-11
        assert norm(n_line) < 1e-11

    def test_normal_line_matches_bitension_projection(self):
        phi = latitude(np.pi / 3)
        x = np.array([0.9])
        _, n_line = immersion.biharmonic_split_residuals(phi, x)
        t2 = P(immersion.bitension(phi, x))
        t2_perp = P(immersion.normal_part(phi, x, t2))
        # m = 1: the normal line is exactly the normal bitension part
        assert np.max(np.abs(P(n_line) - t2_perp)) < 1e-10

    def test_recombination_m2(self):
        c = np.array([0.7, 0.5, np.sqrt(1 - 0.49 - 0.25)])

        def tmap(x):
            u, v = x[0], x[1]
            return np.array([c[0] * jets.cos(u), c[0] * jets.sin(u),
                             c[1] * jets.cos(v), c[1] * jets.sin(v),
                             c[2] * jets.cos(u + v), c[2] * jets.sin(u + v)],
                            dtype=object)

        g = np.array([[c[0] ** 2 + c[2] ** 2, c[2] ** 2],
                      [c[2] ** 2, c[1] ** 2 + c[2] ** 2]])
        phi = immersion.Immersion(
            manifolds.ChartManifold(2, lambda x: g, name="torus"),
            manifolds.EmbeddedSphere(5), tmap, "fat-torus")
        rng = np.random.default_rng(2)
        for _ in range(3):
            x = rng.uniform(0.2, 6.0, size=2)
            t_line, n_line = immersion.biharmonic_split_residuals(phi, x)
            t2 = P(immersion.bitension(phi, x))
            recomb = 2.0 * (P(t_line) + P(n_line))
            assert np.max(np.abs(t2 - recomb)) < 1e-9


class TestCrossPresentation:
    def test_chart_vs_ambient_curve_in_s3(self):
        """The same curve through the hyperspherical chart and through the
        ambient presentation must agree on all invariant outputs."""
        a = np.sin(1.1) * np.sin(0.9)
        chart = round_s3_chart()

        def chart_map(x):
            t = x[0]
            return np.array([1.1 + 0.0 * t, 0.9 + 0.0 * t, t / a], dtype=object)

        def ambient_map(x):
            return s3_embedding(chart_map(x))

        src = flat_chart(1, "param")
        phi_chart = immersion.Immersion(src, chart, chart_map, "curve-chart")
        phi_amb = immersion.Immersion(src, manifolds.EmbeddedSphere(3),
                                      ambient_map, "curve-ambient")
        x = np.array([0.4])
        g1 = float(P(immersion.pullback_metric(phi_chart, x))[0, 0])
        g2 = float(P(immersion.pullback_metric(phi_amb, x))[0, 0])
        assert g1 == pytest.approx(g2, abs=1e-10)

        tau_c = immersion.tension(phi_chart, x)
        tau_a = immersion.tension(phi_amb, x)
        h = P(chart.metric_at(chart_map(x)))
        n_c = float(np.sqrt(P(tau_c) @ h @ P(tau_c)))
        assert n_c == pytest.approx(norm(tau_a), abs=1e-9)

        t2_c = immersion.bitension(phi_chart, x)
        t2_a = immersion.bitension(phi_amb, x)
        n2_c = float(np.sqrt(P(t2_c) @ h @ P(t2_c)))
        assert n2_c == pytest.approx(norm(t2_a), abs=1e-6)
