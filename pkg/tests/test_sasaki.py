import numpy as np
import pytest

from conelift import engine, immersion, jets, manifolds, sasaki
from conelift.errors import DimensionMismatch, NotLegendrian
from conftest import JET_CFG, flat_chart, round_s3_chart, s3_embedding

P = lambda v: np.asarray(v, dtype=float)


def norm(v):
    v = P(v)
    return float(np.sqrt(v @ v))


def random_on_sphere(rng, n):
    p = rng.standard_normal(n)
    return p / np.linalg.norm(p)


class TestConstruction:
    @pytest.mark.parametrize("m", [1, 2])
    def test_all_axioms_on_random_points(self, m):
        S = sasaki.build_sasaki_sphere(m)
        rng = np.random.default_rng(10 + m)
        worst = {}
        for _ in range(100):
            p = random_on_sphere(rng, 2 * m + 2)
            res = sasaki.axiom_residuals(S, p, JET_CFG, rng=rng)
            for k, v in res.items():
                worst[k] = max(worst.get(k, 0.0), v)
        assert max(worst.values()) < 1e-9, worst

    @pytest.mark.parametrize("m", [1, 2])
    def test_defining_condition(self, m):
        S = sasaki.build_sasaki_sphere(m)
        rng = np.random.default_rng(20 + m)
        for _ in range(20):
            p = random_on_sphere(rng, 2 * m + 2)
            X = S.carrier.project(p, rng.standard_normal(2 * m + 2))
            Y = S.carrier.project(p, rng.standard_normal(2 * m + 2))
            assert sasaki.sasaki_condition_residual(S, X, Y, p, JET_CFG) < 1e-8

    def test_unit_field_example(self):
        S = sasaki.build_sasaki_sphere(1)
        p = np.array([1.0, 0.0, 0.0, 0.0])
        xi = P(S.xi(p))
        assert abs(float(S.eta(p, xi)) - 1.0) < 1e-14
        assert np.allclose(np.abs(xi), [0, 1, 0, 0])
        X = np.array([0.0, 0.0, 1.0, 0.0])
        jx = P(S.J(p, X))
        assert np.allclose(jx, [0, 0, 0, 1])
        jjx = P(S.J(p, jx))
        assert np.allclose(jjx, -X, atol=1e-14)

    def test_scaled_field_detected(self):
        # doubling the distinguished field breaks the unit axiom by one
        S = sasaki.build_sasaki_sphere(1)
        bad = sasaki.ContactMetricStructure(
            carrier=S.carrier, xi=lambda p: 2.0 * np.asarray(S.xi(p)),
            eta=S.eta, J=S.J, label="scaled")
        p = np.array([0.0, 1.0, 0.0, 0.0])
        res = sasaki.axiom_residuals(bad, p, JET_CFG)
        assert res["unit"] == pytest.approx(1.0, abs=1e-12)

    def test_zero_structure_detected(self):
        sphere = manifolds.EmbeddedSphere(3)
        zero = sasaki.ContactMetricStructure(
            carrier=sphere, xi=lambda p: np.zeros(4),
            eta=lambda p, v: 0.0, J=lambda p, v: np.zeros(4), label="zero")
        res = sasaki.axiom_residuals(zero, np.array([1.0, 0, 0, 0]), JET_CFG)
        assert res["unit"] == pytest.approx(1.0, abs=1e-14)

    def test_flipped_J_breaks_condition_by_predicted_amount(self):
        S = sasaki.build_sasaki_sphere(1, flip_J=True)
        p = np.array([1.0, 0.0, 0.0, 0.0])
        X = np.array([0.0, 0.0, 1.0, 0.0])
        Y = np.array([0.0, 0.0, 0.3, 0.9])
        res = sasaki.sasaki_condition_residual(S, X, Y, p, JET_CFG)
        expected = 2.0 * norm(np.dot(X, Y) * P(S.xi(p)) - S.eta(p, Y) * X)
        assert res == pytest.approx(expected, abs=1e-10)
        assert res > 0.1

    def test_extension_independence(self):
        S = sasaki.build_sasaki_sphere(1)
        rng = np.random.default_rng(3)
        p = random_on_sphere(rng, 4)
        X = S.carrier.project(p, rng.standard_normal(4))
        Y = S.carrier.project(p, rng.standard_normal(4))
        r1 = sasaki.sasaki_condition_residual(S, X, Y, p, JET_CFG)
        r2 = sasaki.sasaki_condition_residual(S, X, Y, p, JET_CFG,
                                              extension_scale=rng.standard_normal(4))
        assert abs(r1 - r2) < 1e-9


class TestLegendrian:
    def test_great_circle(self, entries):
        e = entries["great-legendrian-circle"]
        assert sasaki.legendrian_residual(e.immersion, e.structure,
                                          np.array([0.3]), JET_CFG) < 1e-12

    def test_small_circle_value(self, entries):
        e = entries["biharmonic-small-circle"]
        res = sasaki.legendrian_residual(e.immersion, e.structure,
                                         np.array([0.3]), JET_CFG)
        assert res == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-10)

    def test_clifford_torus(self, entries):
        e = entries["clifford-torus"]
        rng = np.random.default_rng(4)
        for _ in range(5):
            x = rng.uniform(0.1, 6.0, size=2)
            assert sasaki.legendrian_residual(e.immersion, e.structure,
                                              x, JET_CFG) < 1e-10

    def test_dimension_mismatch(self, entries):
        e = entries["clifford-torus"]
        with pytest.raises(DimensionMismatch):
            sasaki.legendrian_residual(e.immersion,
                                       sasaki.build_sasaki_sphere(1),
                                       np.array([0.1, 0.1]), JET_CFG)

    def test_gate_raises(self, entries):
        e = entries["biharmonic-small-circle"]
        with pytest.raises(NotLegendrian):
            sasaki.require_legendrian(e.immersion, e.structure,
                                      np.array([0.3]), JET_CFG)


class TestSpaceForm:
    def test_unit_parameter_reduces_to_round(self):
        S = sasaki.build_sasaki_sphere(1)
        rng = np.random.default_rng(5)
        for _ in range(10):
            p = random_on_sphere(rng, 4)
            X, Y, Z = (S.carrier.project(p, rng.standard_normal(4))
                       for _ in range(3))
            got = sasaki.space_form_curvature(1.0, S, X, Y, Z, p)
            want = np.dot(Y, Z) * X - np.dot(X, Z) * Y
            assert np.max(np.abs(P(got) - want)) < 1e-12

    def test_matches_numeric_chart_curvature(self):
        """Parameter-one curvature against the generic chart computation on
        the round three-sphere, vectors moved through the embedding."""
        S = sasaki.build_sasaki_sphere(1)
        chart = round_s3_chart()
        rng = np.random.default_rng(6)
        for _ in range(50):
            xc = np.array([rng.uniform(0.4, 2.7), rng.uniform(0.4, 2.7),
                           rng.uniform(-3.0, 3.0)])
            emb, demb = engine.value_and_jacobian(s3_embedding, xc, JET_CFG)
            p = P(emb)
            riem = P(manifolds.riemann(chart, xc, JET_CFG))
            Xc, Yc, Zc = rng.standard_normal((3, 3))
            out_chart = np.einsum("lijk,i,j,k->l", riem, Xc, Yc, Zc)
            # push everything to the ambient representation
            X, Y, Z = (P(demb) @ v for v in (Xc, Yc, Zc))
            out_amb = P(demb) @ out_chart
            got = sasaki.space_form_curvature(1.0, S, X, Y, Z, p)
            assert np.max(np.abs(P(got) - out_amb)) < 1e-8

    def test_distinguished_sectional_curvature_parameter_free(self):
        S = sasaki.build_sasaki_sphere(2)
        rng = np.random.default_rng(7)
        p = random_on_sphere(rng, 6)
        xi = P(S.xi(p))
        Y = S.carrier.project(p, rng.standard_normal(6))
        Y = Y - np.dot(Y, xi) * xi
        for eps in (-3.0, 1.0, 9.0):
            got = sasaki.space_form_curvature(eps, S, xi, Y, xi, p)
            assert np.max(np.abs(P(got) + Y)) < 1e-12

    def test_eigen_coefficient_arithmetic(self):
        assert sasaki.spaceform_eigen_coefficient(1.0, 1) == pytest.approx(1.0)
        assert sasaki.spaceform_eigen_coefficient(1.0, 2) == pytest.approx(2.0)


class TestBiharmonicSystems:
    def test_minimal_entries_vanish(self, entries):
        for name in ("great-legendrian-circle", "clifford-torus"):
            e = entries[name]
            x = np.array([0.5]) if e.m == 1 else np.array([0.5, 1.2])
            lt, ln = sasaki.legendrian_biharmonic_residuals(
                e.immersion, e.structure, x, JET_CFG)
            assert norm(lt) < 1e-10 and norm(ln) < 1e-10
            eig, (la, lb) = sasaki.spaceform_biharmonic_residual(
                e.immersion, e.eps, x, JET_CFG, S=e.structure)
            assert eig < 1e-10
            assert norm(la) < 1e-10 and norm(lb) < 1e-10

    def test_proper_biharmonic_surface_vanishes(self, entries):
        e = entries["biharmonic-legendrian-surface"]
        rng = np.random.default_rng(8)
        for _ in range(3):
            x = rng.uniform(0.2, 4.0, size=2)
            tau = immersion.tension(e.immersion, x, JET_CFG)
            assert norm(tau) == pytest.approx(1.0, abs=1e-10)  # |H| = 1/2
            lt, ln = sasaki.legendrian_biharmonic_residuals(
                e.immersion, e.structure, x, JET_CFG)
            assert norm(lt) < 1e-9 and norm(ln) < 1e-9
            eig, (la, lb) = sasaki.spaceform_biharmonic_residual(
                e.immersion, e.eps, x, JET_CFG, S=e.structure)
            assert eig < 1e-9
            assert norm(la) < 1e-9 and norm(lb) < 1e-9

    def test_helix_fails_with_predicted_magnitude(self, entries):
        e = entries["legendre-helix"]
        x = np.array([0.7])
        kappa_sq = 0.5
        eig, (la, lb) = sasaki.spaceform_biharmonic_residual(
            e.immersion, e.eps, x, JET_CFG, S=e.structure)
        # eigen defect is exactly kappa^2 |H|
        assert eig == pytest.approx(kappa_sq * np.sqrt(0.5), abs=1e-9)
        lt, ln = sasaki.legendrian_biharmonic_residuals(
            e.immersion, e.structure, x, JET_CFG)
        assert norm(ln) == pytest.approx(kappa_sq * np.sqrt(0.5), abs=1e-9)

    def test_nonlegendrian_rejected(self, entries):
        e = entries["biharmonic-small-circle"]
        with pytest.raises(NotLegendrian):
            sasaki.legendrian_biharmonic_residuals(
                e.immersion, e.structure, np.array([0.4]), JET_CFG)
