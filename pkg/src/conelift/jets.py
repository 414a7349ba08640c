"""Truncated-Taylor (jet) forward arithmetic.

A :class:`Jet` stores the Taylor coefficients ``c_alpha = d^alpha f / alpha!``
of a scalar quantity, truncated at a fixed total order, in a fixed set of
variables.  Arithmetic on jets propagates derivatives exactly (to the
truncation order), so evaluating a smooth callable on jet-valued coordinates
yields all its partial derivatives in one pass.

Jets nest: the coefficients of a jet may themselves be jets from an outer
differentiation level.  This is how higher operators (rough Laplacians,
bitension fields) are assembled from first-order building blocks without
ever writing out fourth-order chain rules by hand.

Every seeding call gets a *fresh* :class:`JetSpace` (variable set), so two
nesting levels that happen to share the same (nvars, order) signature can
never be confused; the coefficient tables behind the spaces are cached.

Float64 coefficient kernels live in ``conelift._kernel`` (compiled when the
extension built, pure python otherwise).  Object-coefficient (nested) jets
always take the python path.
"""

from __future__ import annotations

import itertools
import math
import threading

import numpy as np

from conelift import _kernel

__all__ = [
    "Jet",
    "JetSpace",
    "seed_point",
    "value",
    "deep_value",
    "sin",
    "cos",
    "tan",
    "exp",
    "log",
    "sqrt",
    "arctan",
]

_SPACE_COUNTER = itertools.count()
_TABLE_CACHE: dict = {}
_TABLE_LOCK = threading.Lock()


def _monomials(nvars, order):
    """All exponent tuples with total degree <= order, graded-lex order."""
    monos = []
    for deg in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            alpha = [0] * nvars
            for i in combo:
                alpha[i] += 1
            monos.append(tuple(alpha))
    return monos


class _Tables:
    """Shared index tables for one (nvars, order) signature."""

    __slots__ = ("nvars", "order", "monos", "index", "size",
                 "mul_ia", "mul_ib", "mul_io", "first", "pair")

    def __init__(self, nvars, order):
        self.nvars = nvars
        self.order = order
        self.monos = _monomials(nvars, order)
        self.size = len(self.monos)
        self.index = {m: i for i, m in enumerate(self.monos)}
        ia, ib, io = [], [], []
        for i, a in enumerate(self.monos):
            da = sum(a)
            for j, b in enumerate(self.monos):
                if da + sum(b) > order:
                    continue
                ia.append(i)
                ib.append(j)
                io.append(self.index[tuple(x + y for x, y in zip(a, b))])
        self.mul_ia = np.asarray(ia, dtype=np.int32)
        self.mul_ib = np.asarray(ib, dtype=np.int32)
        self.mul_io = np.asarray(io, dtype=np.int32)
        self.first = np.zeros(nvars, dtype=np.int64)
        for i in range(nvars):
            e = tuple(1 if k == i else 0 for k in range(nvars))
            self.first[i] = self.index[e]
        self.pair = np.zeros((nvars, nvars), dtype=np.int64) if order >= 2 else None
        if order >= 2:
            for i in range(nvars):
                for j in range(nvars):
                    e = [0] * nvars
                    e[i] += 1
                    e[j] += 1
                    self.pair[i, j] = self.index[tuple(e)]


def _tables(nvars, order):
    key = (nvars, order)
    tab = _TABLE_CACHE.get(key)
    if tab is None:
        with _TABLE_LOCK:
            tab = _TABLE_CACHE.get(key)
            if tab is None:
                tab = _Tables(nvars, order)
                _TABLE_CACHE[key] = tab
    return tab


class JetSpace:
    """A fresh set of jet variables sharing cached coefficient tables.

    Space identity (not the (nvars, order) signature) decides whether two
    jets convolve or whether one acts as a scalar coefficient of the other;
    the space created deeper in a nested differentiation always has the
    larger ``uid``.
    """

    __slots__ = ("tab", "uid")

    def __init__(self, nvars, order):
        self.tab = _tables(nvars, order)
        self.uid = next(_SPACE_COUNTER)

    @property
    def nvars(self):
        return self.tab.nvars

    @property
    def order(self):
        return self.tab.order

    @property
    def size(self):
        return self.tab.size

    def constant(self, v):
        c = np.zeros(self.size) if _is_number(v) else np.empty(self.size, dtype=object)
        if c.dtype == object:
            c[:] = 0.0
        c[0] = v
        return Jet(self, c)

    def variable(self, i, v):
        num = _is_number(v)
        c = np.zeros(self.size) if num else np.empty(self.size, dtype=object)
        if not num:
            c[:] = 0.0
        c[0] = v
        c[self.tab.first[i]] = 1.0
        return Jet(self, c)


def _is_number(v):
    return isinstance(v, (int, float, np.integer, np.floating))


def seed_point(x, order):
    """Seed a coordinate point for differentiation: one fresh variable per entry.

    Returns an object array of jets (plus the fresh space).  Entries of ``x``
    may be floats or jets from an outer level.
    """
    x = list(x)
    space = JetSpace(len(x), order)
    out = np.empty(len(x), dtype=object)
    for i, v in enumerate(x):
        out[i] = space.variable(i, v)
    return space, out


class Jet:
    __slots__ = ("space", "c")

    def __init__(self, space, c):
        self.space = space
        self.c = c

    # -- extraction ---------------------------------------------------------

    @property
    def value(self):
        return self.c[0]

    def grad(self):
        return self.c[self.space.tab.first]

    def coeff(self, alpha):
        return self.c[self.space.tab.index[tuple(alpha)]]

    def second(self, i, j):
        """Raw second partial d_i d_j (Taylor coefficient times multiplicity)."""
        v = self.c[self.space.tab.pair[i, j]]
        return v * 2.0 if i == j else v

    # -- helpers ------------------------------------------------------------

    def _lift(self, other):
        """Classify ``other`` relative to this jet.

        Returns (kind, payload): kind "s" for a scalar coefficient, "j" for a
        jet of the same space, or "outer" when *self* is the scalar relative
        to a deeper space.
        """
        if isinstance(other, np.ndarray):
            # defer to numpy so jet * vector broadcasts elementwise
            return "nd", other
        if not isinstance(other, Jet):
            return "s", other
        if other.space is self.space:
            return "j", other
        if other.space.uid > self.space.uid:
            return "outer", other
        return "s", other

    def _new(self, c):
        return Jet(self.space, c)

    def _mul_same(self, other):
        a, b = self.c, other.c
        tab = self.space.tab
        if a.dtype != object and b.dtype != object:
            return self._new(_kernel.mul_f64(a, b, tab.mul_ia, tab.mul_ib,
                                             tab.mul_io, tab.size))
        out = np.empty(tab.size, dtype=object)
        out[:] = 0.0
        np.add.at(out, tab.mul_io, a[tab.mul_ia] * b[tab.mul_ib])
        return self._new(out)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        kind, o = self._lift(other)
        if kind == "nd":
            return NotImplemented
        if kind == "outer":
            return o.__add__(self)
        if kind == "j":
            return self._new(self.c + o.c)
        if _is_number(o):
            if o == 0:
                return self
            c = self.c.copy()
        else:
            c = self.c.astype(object) if self.c.dtype != object else self.c.copy()
        c[0] = c[0] + o
        return self._new(c)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.c)

    def __sub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return self.__add__(-other if isinstance(other, Jet) else -1.0 * other)

    def __rsub__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return (-self).__add__(other)

    def __mul__(self, other):
        kind, o = self._lift(other)
        if kind == "nd":
            return NotImplemented
        if kind == "outer":
            return o.__mul__(self)
        if kind == "j":
            return self._mul_same(o)
        if _is_number(o):
            if o == 0:
                return 0.0
            if o == 1:
                return self
            return self._new(self.c * o)
        # scalar coefficient that is itself a jet from an outer level
        out = np.empty(self.space.size, dtype=object)
        for i, v in enumerate(self.c):
            out[i] = v * o if not (_is_number(v) and v == 0) else 0.0
        return self._new(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        kind, o = self._lift(other)
        if kind == "nd":
            return NotImplemented
        if kind == "outer":
            return o.__rtruediv__(self)
        if kind == "j":
            return self._mul_same(o.reciprocal())
        if _is_number(o):
            return self._new(self.c / o)
        return self.__mul__(_reciprocal_scalar(o))

    def __rtruediv__(self, other):
        if isinstance(other, np.ndarray):
            return NotImplemented
        return self.reciprocal().__mul__(other)

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            if p == 0:
                return self.space.constant(1.0)
            if p < 0:
                return self.reciprocal() ** (-p)
            out = self
            for _ in range(int(p) - 1):
                out = out._mul_same(self)
            return out
        c0 = self.value
        fac = 1.0
        series = []
        for j in range(self.space.order + 1):
            series.append(fac * _pow_scalar(c0, p - j))
            fac = fac * (p - j) / (j + 1)
        return self._compose(series)

    # -- series composition --------------------------------------------------

    def _compose(self, series):
        """Evaluate g(self) where series[j] = g^(j)(value)/j!."""
        tab = self.space.tab
        dc = self.c.copy()
        dc[0] = 0.0
        if dc.dtype != object and all(_is_number(s) for s in series):
            return self._new(_kernel.horner_f64(
                np.asarray(series, dtype=float), dc,
                tab.mul_ia, tab.mul_ib, tab.mul_io, tab.size))
        delta = self._new(dc)
        out = self.space.constant(series[-1])
        for j in range(len(series) - 2, -1, -1):
            out = out._mul_same(delta) + series[j]
        return out

    def _series(self, derivs):
        """Rescale raw derivative values g^(j)(c0) into Taylor coefficients."""
        fac = 1.0
        out = []
        for j, d in enumerate(derivs):
            if j > 0:
                fac /= j
            out.append(d * fac if not (_is_number(d) and d == 0) else 0.0)
        return out

    def reciprocal(self):
        c0 = self.value
        inv = _reciprocal_scalar(c0)
        series = [inv]
        for j in range(1, self.space.order + 1):
            series.append(series[-1] * (-1.0) * inv)
        return self._compose(series)

    # -- elementary functions -------------------------------------------------

    def sin(self):
        s, c = sin(self.value), cos(self.value)
        cyc = [s, c, -1.0 * s, -1.0 * c]
        return self._compose(self._series(
            [cyc[j % 4] for j in range(self.space.order + 1)]))

    def cos(self):
        s, c = sin(self.value), cos(self.value)
        cyc = [c, -1.0 * s, -1.0 * c, s]
        return self._compose(self._series(
            [cyc[j % 4] for j in range(self.space.order + 1)]))

    def tan(self):
        return self.sin() / self.cos()

    def exp(self):
        e = exp(self.value)
        return self._compose(self._series([e] * (self.space.order + 1)))

    def log(self):
        c0 = self.value
        derivs = [log(c0)]
        for j in range(1, self.space.order + 1):
            derivs.append(((-1.0) ** (j - 1)) * math.factorial(j - 1)
                          * _pow_scalar(c0, -j))
        return self._compose(self._series(derivs))

    def sqrt(self):
        return self ** 0.5

    def arctan(self):
        c0 = self.value
        th = arctan(c0)
        cth = cos(th)
        derivs = [th]
        for j in range(1, self.space.order + 1):
            derivs.append(math.factorial(j - 1) * (cth ** j)
                          * sin(j * (th + math.pi / 2.0)))
        return self._compose(self._series(derivs))

    def __repr__(self):
        return f"Jet(n={self.space.nvars}, k={self.space.order}, value={self.value!r})"


def _reciprocal_scalar(v):
    if _is_number(v):
        return 1.0 / v
    return v.reciprocal()


def _pow_scalar(v, p):
    if _is_number(v):
        return float(v) ** p
    return v ** p


# -- polymorphic scalar math (floats, jets, object arrays) --------------------

def _dispatch(x, name, fn):
    if isinstance(x, Jet):
        return getattr(x, name)()
    if isinstance(x, np.ndarray) and x.dtype == object:
        return np.asarray(fn(x), dtype=object)
    return fn(x)


def sin(x):
    return _dispatch(x, "sin", np.sin)


def cos(x):
    return _dispatch(x, "cos", np.cos)


def tan(x):
    return _dispatch(x, "tan", np.tan)


def exp(x):
    return _dispatch(x, "exp", np.exp)


def log(x):
    return _dispatch(x, "log", np.log)


def sqrt(x):
    return _dispatch(x, "sqrt", np.sqrt)


def arctan(x):
    return _dispatch(x, "arctan", np.arctan)


def value(x):
    """One extraction step: the constant coefficient of a jet, else x itself."""
    return x.value if isinstance(x, Jet) else x


def deep_value(x):
    """Peel all jet levels down to a plain float."""
    while isinstance(x, Jet):
        x = x.value
    return float(x)
