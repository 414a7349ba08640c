import numpy as np
import pytest

from conelift import catalog, engine, flow, immersion, jets
from conelift.errors import DegenerateCurve, DimensionMismatch
from conftest import JET_CFG

P = lambda v: np.asarray(v, dtype=float)


def great_circle(K=64):
    t = np.arange(K) * 2 * np.pi / K
    pts = np.zeros((K, 4))
    pts[:, 0] = np.cos(t)
    pts[:, 2] = np.sin(t)
    return flow.DiscreteCurve(pts)


def helix_curve(K=128):
    t = np.arange(K) * 2 * np.pi / K
    c1, c2 = np.sqrt(2.0 / 3.0), np.sqrt(1.0 / 3.0)
    pts = np.stack([c1 * np.cos(t), c1 * np.sin(t),
                    c2 * np.cos(2 * t), -c2 * np.sin(2 * t)], axis=1)
    return flow.DiscreteCurve(pts)


class TestDiscreteCurve:
    def test_validators(self):
        with pytest.raises(DimensionMismatch):
            flow.DiscreteCurve(np.ones((8, 4)) / 2.0)          # too few
        with pytest.raises(DimensionMismatch):
            bad = great_circle(64).samples[:63]
            flow.DiscreteCurve(bad)                            # odd count
        with pytest.raises(DimensionMismatch):
            flow.DiscreteCurve(great_circle(64).samples * 1.01)

    def test_degenerate_curve(self):
        pts = np.tile(np.array([1.0, 0, 0, 0]), (32, 1))
        with pytest.raises(DegenerateCurve):
            flow.discrete_functionals(flow.DiscreteCurve(pts))


class TestFunctionals:
    def test_great_circle_values(self):
        c = great_circle(64)
        e, e2, pen = flow.discrete_functionals(c)
        # discrete speed of the centered stencil is sinc(dt)
        want = np.pi * (np.sin(c.dt) / c.dt) ** 2
        assert e == pytest.approx(want, abs=1e-12)
        assert e2 < 1e-6
        assert pen < 1e-8  # this orientation is tangent to the contact kernel

    def test_second_order_convergence(self):
        e_inf, e2_inf = 2 * np.pi, np.pi / np.sqrt(2.0)
        errs_e, errs_e2 = [], []
        for K in (64, 128, 256):
            e, e2, _ = flow.discrete_functionals(helix_curve(K))
            errs_e.append(abs(e - e_inf))
            errs_e2.append(abs(e2 - e2_inf))
        for errs in (errs_e, errs_e2):
            for a, b in zip(errs, errs[1:]):
                assert 3.5 <= a / b <= 4.5

    def test_discrete_tension_matches_continuum(self):
        c = helix_curve(256)
        tau = flow.discrete_tension(c)
        mags = np.linalg.norm(tau, axis=1)
        assert np.max(np.abs(mags - np.sqrt(0.5))) < 5e-4


class TestGradients:
    @pytest.mark.parametrize("cfg", [
        flow.FlowConfig(functional=flow.ENERGY, fix_energy=False),
        flow.FlowConfig(functional=flow.BIENERGY, fix_energy=False),
        flow.FlowConfig(functional=flow.BIENERGY, penalty_weight=3.0,
                        fix_energy=False),
    ])
    def test_adjoint_matches_numeric(self, cfg):
        curve = helix_curve(64)
        assert flow.gradient_consistency(curve, cfg, directions=20) < 1e-6


class TestFlow:
    def test_energy_flow_reaches_geodesic(self):
        K = 64
        c0 = great_circle(K)
        t = np.arange(K) * 2 * np.pi / K
        # perturbation in the stable range of the closed geodesic
        V = np.zeros((K, 4))
        V[:, 1] = np.sin(2 * t)
        V[:, 3] = 0.5 * np.cos(3 * t)
        pts = c0.samples + 0.02 * V
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        cfg = flow.FlowConfig(functional=flow.ENERGY, step_size=0.5,
                              max_iterations=2000, tolerance=1e-9,
                              fix_energy=False)
        out, log = flow.flow(flow.DiscreteCurve(pts), cfg)
        _, e2, _ = flow.discrete_functionals(out)
        objs = [row["objective"] for row in log]
        assert all(a >= b for a, b in zip(objs, objs[1:]))
        assert e2 < 1e-8
        assert np.max(np.linalg.norm(flow.discrete_tension(out), axis=1)) < 1e-4

    def test_already_critical_input_unchanged(self):
        c = great_circle(64)
        cfg = flow.FlowConfig(functional=flow.ENERGY, step_size=0.1,
                              max_iterations=50, tolerance=1e-3,
                              fix_energy=False)
        out, log = flow.flow(c, cfg)
        assert len(log) == 1
        assert np.array_equal(out.samples, c.samples)

    def test_bienergy_flow_regenerates_fixture(self):
        out, log = catalog.produce_flow_fixture()
        objs = [row["objective"] for row in log]
        assert all(a >= b for a, b in zip(objs, objs[1:]))
        e, e2, pen = flow.discrete_functionals(out)
        tau = np.linalg.norm(flow.discrete_tension(out), axis=1)
        assert pen < 1e-5
        assert np.max(tau) - np.min(tau) < 1e-4      # constant curvature
        assert np.min(tau) > 0.1
        shipped = catalog.load_flow_fixture()
        assert np.max(np.abs(out.samples - shipped.samples)) < 1e-9

    def test_flow_deterministic_rerun(self):
        start = catalog.fixture_start_curve(64)
        cfg = flow.FlowConfig(functional=flow.BIENERGY, step_size=1.0,
                              max_iterations=60, tolerance=1e-9,
                              penalty_weight=10.0, fix_energy=True)
        a, _ = flow.flow(start, cfg)
        b, _ = flow.flow(start, cfg)
        assert np.array_equal(a.samples, b.samples)

    def test_energy_level_held(self):
        start = catalog.fixture_start_curve(64)
        e0 = flow.discrete_functionals(start)[0]
        cfg = flow.FlowConfig(functional=flow.BIENERGY, step_size=1.0,
                              max_iterations=200, tolerance=1e-9,
                              penalty_weight=10.0, fix_energy=True)
        out, _ = flow.flow(start, cfg)
        e1 = flow.discrete_functionals(out)[0]
        assert abs(e1 - e0) < 1e-8 * max(1.0, e0)


class TestVariationChecks:
    def test_first_variation_at_geodesic(self):
        c = great_circle(128)
        rng = np.random.default_rng(0)
        V = rng.standard_normal(c.samples.shape)
        de, pairing = flow.first_variation_check(c, V)
        assert abs(de) < 1e-6
        assert abs(pairing) < 1e-6

    def test_first_variation_general(self):
        c = helix_curve(128)
        rng = np.random.default_rng(1)
        for _ in range(3):
            V = rng.standard_normal(c.samples.shape)
            de, pairing = flow.first_variation_check(c, V)
            assert abs(de - pairing) < 1e-4 * max(1.0, abs(de))

    def test_second_variation_at_geodesic(self):
        K = 512
        c = great_circle(K)
        t = np.arange(K) * 2 * np.pi / K
        # normal field with enough oscillation for a positive Hessian
        V = np.zeros((K, 4))
        V[:, 1] = np.sin(2 * t)

        from conelift import manifolds

        phi = immersion.Immersion(
            manifolds.ChartManifold(1, lambda x: np.eye(1), name="p"),
            manifolds.EmbeddedSphere(3),
            lambda x: np.array([jets.cos(x[0]), 0.0, jets.sin(x[0]), 0.0],
                               dtype=object), "gc")

        def Vfield(y):
            s = y[0]
            return np.array([0.0 * s, jets.sin(2.0 * s), 0.0 * s, 0.0 * s],
                            dtype=object)

        jv_vals = np.zeros_like(V)
        for k, tk in enumerate(t):
            jv_vals[k] = P(immersion.jacobi_operator(phi, Vfield,
                                                     np.array([tk]), JET_CFG))
        d2, pairing = flow.second_variation_check(c, V, jv_vals)
        assert d2 > 0
        assert abs(d2 - pairing) < 1e-3 * max(1.0, abs(d2))


class TestInterpolation:
    def test_interpolant_reproduces_bandlimited_curve(self):
        c = helix_curve(64)
        gamma = flow.fourier_interpolant(c)
        for t in (0.0, 0.7, 3.1):
            got = P(gamma(np.array([t])))
            c1, c2 = np.sqrt(2.0 / 3.0), np.sqrt(1.0 / 3.0)
            want = np.array([c1 * np.cos(t), c1 * np.sin(t),
                             c2 * np.cos(2 * t), -c2 * np.sin(2 * t)])
            assert np.max(np.abs(got - want)) < 1e-12

    def test_to_immersion_tension(self):
        c = helix_curve(128)
        phi = flow.to_immersion(c, "interp-helix")
        tau = immersion.tension(phi, np.array([0.9]), JET_CFG)
        assert np.linalg.norm(P(tau)) == pytest.approx(np.sqrt(0.5), abs=1e-10)


class TestSerialization:
    def test_roundtrip_exact(self, tmp_path):
        c = helix_curve(64)
        path = tmp_path / "curve.txt"
        flow.save_curve(str(path), c, cfg=flow.FlowConfig(), provenance="test")
        back = flow.load_curve(str(path))
        assert np.array_equal(back.samples, c.samples)
        assert back.period == c.period
        header = path.read_text().splitlines()[:8]
        assert header[1] == "# schema: 1"
        assert any("config_hash" in line for line in header)
        assert any("provenance: test" in line for line in header)
