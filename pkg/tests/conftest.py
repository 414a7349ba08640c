import numpy as np
import pytest

from conelift import catalog, engine, jets, manifolds

JET_CFG = engine.DEFAULT
CENTRAL_CFG = engine.CENTRAL_DEFAULT


def flat_chart(n, name="flat"):
    return manifolds.ChartManifold(n, lambda x, _n=n: np.eye(_n), name=name)


def round_s2_chart():
    def metric(x):
        out = np.empty((2, 2), dtype=object)
        out[:, :] = 0.0
        out[0, 0] = 1.0
        out[1, 1] = jets.sin(x[0]) ** 2
        return out

    return manifolds.ChartManifold(2, metric, name="round-s2",
                                   domain=manifolds.Box((0.02, -9.0), (3.12, 9.0)))


def round_s3_chart():
    def metric(x):
        out = np.empty((3, 3), dtype=object)
        out[:, :] = 0.0
        out[0, 0] = 1.0
        out[1, 1] = jets.sin(x[0]) ** 2
        out[2, 2] = jets.sin(x[0]) ** 2 * jets.sin(x[1]) ** 2
        return out

    return manifolds.ChartManifold(3, metric, name="round-s3",
                                   domain=manifolds.Box((0.02, 0.02, -9.0),
                                                        (3.12, 3.12, 9.0)))


def s2_embedding(x):
    """Chart-to-ambient map of the round two-sphere chart."""
    th, ph = x[0], x[1]
    st = jets.sin(th)
    return np.array([st * jets.cos(ph), st * jets.sin(ph), jets.cos(th)],
                    dtype=object)


def s3_embedding(x):
    chi, th, ph = x[0], x[1], x[2]
    sc, st = jets.sin(chi), jets.sin(th)
    return np.array([jets.cos(chi), sc * jets.cos(th),
                     sc * st * jets.cos(ph), sc * st * jets.sin(ph)],
                    dtype=object)


@pytest.fixture(scope="session")
def entries():
    return {e.name: e for e in catalog.build_all(skip_missing_fixture=False)}
