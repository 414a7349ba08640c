"""Differentiation backends behind one small API.

Every geometric operation receives a :class:`DifferentiationConfig` and calls
:func:`jacobian` / :func:`hessian` / :func:`directional` here.  In ``jet``
mode the callable is evaluated once on jet-valued coordinates (exact to
truncation order, nests freely).  In ``central`` mode classical central
differences with optional Richardson extrapolation are used; nested use is
supported by tracking a noise estimate on derived callables so that each
level picks a step large enough to beat the noise of the level below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from conelift import jets
from conelift.errors import DerivativeError

JET = "jet"
CENTRAL = "central"

#: absolute noise assumed for a callable built from exact formulas
NOISE_FLOOR = 1e-15


@dataclass(frozen=True)
class DifferentiationConfig:
    mode: str = JET
    jet_order: int = 4
    fd_step: float = 1e-4
    fd_richardson_levels: int = 1

    def __post_init__(self):
        if self.mode not in (JET, CENTRAL):
            raise ValueError(f"unknown differentiation mode {self.mode!r}")
        if self.mode == JET and self.jet_order < 4:
            raise ValueError("jet_order must be >= 4 (fourth-order pipelines)")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")
        if self.fd_richardson_levels < 0:
            raise ValueError("fd_richardson_levels must be >= 0")


#: default configuration used throughout the catalog and the CLI
DEFAULT = DifferentiationConfig()
CENTRAL_DEFAULT = DifferentiationConfig(mode=CENTRAL)


def noise_of(f):
    return getattr(f, "_fd_noise", NOISE_FLOOR)


def tag_noise(f, cfg, parents=(), orders=1):
    """Record the noise estimate of a callable built from ``orders`` central
    derivative levels of its parents.  No-op in jet mode."""
    if cfg.mode != CENTRAL:
        return f
    noise = max([NOISE_FLOOR] + [noise_of(p) for p in parents])
    for _ in range(orders):
        noise = _output_noise(noise, 1, cfg)
    f._fd_noise = noise
    return f


def _step(noise, order, cfg):
    # optimal central-difference step balancing truncation (order 2R+2)
    # against amplified roundoff noise/h^order; fd_step acts as a floor
    p = order + 2 * (cfg.fd_richardson_levels + 1)
    return float(max(cfg.fd_step, noise ** (1.0 / p)))


def _output_noise(noise, order, cfg):
    h = _step(noise, order, cfg)
    return noise / h ** order + h ** (2 * (cfg.fd_richardson_levels + 1))


def _as_array(y):
    a = np.asarray(y)
    if a.dtype != object and not np.issubdtype(a.dtype, np.floating):
        a = a.astype(float)
    return a


def _extract(arr, fn):
    out = np.empty(arr.shape, dtype=object)
    flat_in = arr.reshape(-1)
    flat_out = out.reshape(-1)
    for i, v in enumerate(flat_in):
        flat_out[i] = fn(v)
    try:
        return out.astype(float)
    except (TypeError, ValueError):
        return out


# -- jet backend ---------------------------------------------------------------


def _jet_eval(f, x, order):
    space, xj = jets.seed_point(x, order)
    try:
        y = _as_array(f(xj))
    except (ZeroDivisionError, FloatingPointError, OverflowError) as exc:
        raise DerivativeError(str(exc)) from exc
    return space, y


def _jet_value(space):
    # strip only jets of this seeding level; captured outer jets pass through
    def grab(v):
        if isinstance(v, jets.Jet) and v.space is space:
            return v.value
        return v

    return grab


def _jet_grad(space):
    n = space.nvars

    def grab(v):
        if isinstance(v, jets.Jet) and v.space is space:
            return v.grad()
        g = np.empty(n, dtype=object)
        g[:] = 0.0
        return g

    return grab


# -- central backend -------------------------------------------------------------


def _richardson(samples):
    """samples[j] = central estimate at step h/2^j; eliminate h^2 terms."""
    cur = list(samples)
    k = 1
    while len(cur) > 1:
        fac = 4.0 ** k
        cur = [(fac * b - a) / (fac - 1.0) for a, b in zip(cur[:-1], cur[1:])]
        k += 1
    return cur[0]


def _central_jac(f, x, cfg):
    x = np.asarray(x, dtype=float)
    h0 = _step(noise_of(f), 1, cfg)
    levels = cfg.fd_richardson_levels + 1
    y0 = _as_array(f(x))
    jac = np.zeros(y0.shape + (len(x),))
    for i in range(len(x)):
        ests = []
        for lev in range(levels):
            h = h0 / 2.0 ** lev
            xp = x.copy()
            xm = x.copy()
            xp[i] += h
            xm[i] -= h
            ests.append((_as_array(f(xp)) - _as_array(f(xm))) / (2.0 * h))
        jac[..., i] = _richardson(ests)
    return y0, jac


def _central_hess(f, x, cfg):
    x = np.asarray(x, dtype=float)
    noise = noise_of(f)
    h0 = _step(noise, 2, cfg)
    levels = cfg.fd_richardson_levels + 1
    y0 = _as_array(f(x))
    n = len(x)
    hess = np.zeros(y0.shape + (n, n))

    def shifted(di, dj, i, j, h):
        xs = x.copy()
        xs[i] += di * h
        xs[j] += dj * h
        return _as_array(f(xs))

    for i in range(n):
        ests = []
        for lev in range(levels):
            h = h0 / 2.0 ** lev
            ests.append((shifted(1, 0, i, i, h) - 2.0 * y0 + shifted(-1, 0, i, i, h))
                        / h ** 2)
        hess[..., i, i] = _richardson(ests)
        for j in range(i + 1, n):
            ests = []
            for lev in range(levels):
                h = h0 / 2.0 ** lev
                val = (shifted(1, 1, i, j, h) - shifted(1, -1, i, j, h)
                       - shifted(-1, 1, i, j, h) + shifted(-1, -1, i, j, h)) \
                    / (4.0 * h ** 2)
                ests.append(val)
            hess[..., i, j] = hess[..., j, i] = _richardson(ests)
    _, jac = _central_jac(f, x, cfg)
    return y0, jac, hess


# -- public api -------------------------------------------------------------------


def value_and_jacobian(f, x, cfg):
    """f maps an n-point to an array; returns (f(x), df) with df[..., i] = d_i f."""
    if cfg.mode == CENTRAL:
        return _central_jac(f, x, cfg)
    space, y = _jet_eval(f, x, 1)
    val = _extract(y, _jet_value(space))
    grab = _jet_grad(space)
    n = space.nvars
    jac = np.empty(y.shape + (n,), dtype=object)
    flat_y = y.reshape(-1)
    flat_j = jac.reshape(-1, n)
    for i, v in enumerate(flat_y):
        flat_j[i, :] = grab(v)
    try:
        jac = jac.astype(float)
    except (TypeError, ValueError):
        pass
    return val, jac


def jacobian(f, x, cfg):
    return value_and_jacobian(f, x, cfg)[1]


def value_jacobian_hessian(f, x, cfg):
    """Adds hess[..., i, j] = d_i d_j f."""
    if cfg.mode == CENTRAL:
        return _central_hess(f, x, cfg)
    space, y = _jet_eval(f, x, 2)
    val = _extract(y, _jet_value(space))
    grab = _jet_grad(space)
    n = space.nvars
    jac = np.empty(y.shape + (n,), dtype=object)
    hess = np.empty(y.shape + (n, n), dtype=object)
    flat_y = y.reshape(-1)
    flat_j = jac.reshape(-1, n)
    flat_h = hess.reshape(-1, n, n)
    for k, v in enumerate(flat_y):
        flat_j[k, :] = grab(v)
        if isinstance(v, jets.Jet) and v.space is space:
            for i in range(n):
                for j in range(n):
                    flat_h[k, i, j] = v.second(i, j)
        else:
            flat_h[k, :, :] = 0.0
    try:
        jac = jac.astype(float)
        hess = hess.astype(float)
    except (TypeError, ValueError):
        pass
    return val, jac, hess


def directional(f, x, v, cfg):
    """First derivative of t -> f(x + t v) at t = 0."""
    if cfg.mode == CENTRAL:
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        h0 = _step(noise_of(f), 1, cfg)
        ests = []
        for lev in range(cfg.fd_richardson_levels + 1):
            h = h0 / 2.0 ** lev
            ests.append((_as_array(f(x + h * v)) - _as_array(f(x - h * v)))
                        / (2.0 * h))
        return _richardson(ests)
    space = jets.JetSpace(1, 1)
    xj = np.empty(len(x), dtype=object)
    for i in range(len(x)):
        t = space.variable(0, 0.0)
        xj[i] = x[i] + t * v[i]
    y = _as_array(f(xj))

    def grab(u):
        if isinstance(u, jets.Jet) and u.space is space:
            return u.grad()[0]
        return 0.0

    return _extract(y, grab)
