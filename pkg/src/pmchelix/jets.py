"""Truncated Taylor jets in one or two variables.

A :class:`Jet` stores the Taylor coefficients of a real quantity around a
base point, up to a fixed total degree (at most 4).  Coefficients are the
*normalized* ones, ``d^i/du^i d^j/dv^j f / (i! j!)``, laid out densely over
all multi-degrees of total degree ``<= order`` in graded order.

Jets are batched: ``coeffs`` has shape ``(K,) + batch_shape`` where ``K`` is
the number of multi-degrees, so a single Jet can carry a whole probe grid of
points, or the coordinates of an ambient vector, at once.  Batch axes follow
numpy broadcasting rules; plain floats and arrays act as constant jets.
"""
from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

MAX_ORDER = 4
DOMAIN_EPS = 1e-12


class JetShapeError(ValueError):
    """Operands have different variable counts or truncation orders."""


class JetDomainError(ValueError):
    """A composed function was evaluated outside its domain."""


@lru_cache(maxsize=None)
def multi_degrees(nvars: int, order: int) -> tuple:
    """Multi-degrees of total degree <= order, in graded order."""
    if nvars == 1:
        return tuple((k,) for k in range(order + 1))
    if nvars == 2:
        return tuple((k - j, j) for k in range(order + 1) for j in range(k + 1))
    raise JetShapeError(f"jets support 1 or 2 variables, got {nvars}")


@lru_cache(maxsize=None)
def _index(nvars: int, order: int) -> dict:
    return {d: i for i, d in enumerate(multi_degrees(nvars, order))}


@lru_cache(maxsize=None)
def _product_table(nvars: int, order: int) -> tuple:
    # for each left index p: (array of right indices q, array of result indices m)
    degs = multi_degrees(nvars, order)
    idx = _index(nvars, order)
    table = []
    for p in degs:
        qs, ms = [], []
        for q in degs:
            m = tuple(a + b for a, b in zip(p, q))
            if sum(m) <= order:
                qs.append(idx[q])
                ms.append(idx[m])
        table.append((np.array(qs), np.array(ms)))
    return tuple(table)


@lru_cache(maxsize=None)
def _diff_table(nvars: int, order: int, var: int) -> tuple:
    # d/dx_var maps a degree-(m+e_var) coefficient to degree m with factor m_var+1
    src_idx = _index(nvars, order)
    dst, src, fac = [], [], []
    for i, d in enumerate(multi_degrees(nvars, order - 1)):
        up = list(d)
        up[var] += 1
        dst.append(i)
        src.append(src_idx[tuple(up)])
        fac.append(up[var])
    return np.array(dst), np.array(src), np.array(fac, dtype=float)


@lru_cache(maxsize=None)
def _truncate_table(nvars: int, order: int, new_order: int) -> np.ndarray:
    idx = _index(nvars, order)
    return np.array([idx[d] for d in multi_degrees(nvars, new_order)])


def _lift(coeffs: np.ndarray, ndim: int) -> np.ndarray:
    # prepend unit batch axes so coeffs broadcast against an ndim-dimensional batch
    extra = ndim - (coeffs.ndim - 1)
    if extra <= 0:
        return coeffs
    return coeffs.reshape((coeffs.shape[0],) + (1,) * extra + coeffs.shape[1:])


class Jet:
    """Batched truncated Taylor expansion.

    Arithmetic between two jets requires equal ``nvars`` and ``order``;
    use :meth:`truncate` to bring operands to a common order.
    """

    __slots__ = ("coeffs", "nvars", "order")
    # make numpy defer to the reflected jet operators
    __array_ufunc__ = None

    def __init__(self, coeffs, nvars: int, order: int):
        if nvars not in (1, 2):
            raise JetShapeError(f"jets support 1 or 2 variables, got {nvars}")
        if not 0 <= order <= MAX_ORDER:
            raise JetShapeError(f"order must be in [0, {MAX_ORDER}], got {order}")
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[0] != len(multi_degrees(nvars, order)):
            raise JetShapeError(
                f"expected {len(multi_degrees(nvars, order))} coefficients, got {coeffs.shape[0]}"
            )
        self.coeffs = coeffs
        self.nvars = nvars
        self.order = order

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros((len(multi_degrees(nvars, order)),) + value.shape)
        coeffs[0] = value
        return cls(coeffs, nvars, order)

    @classmethod
    def variable(cls, value, index: int, nvars: int, order: int) -> "Jet":
        """Jet of the coordinate function ``x_index`` at ``value``."""
        jet = cls.constant(value, nvars, order)
        if order >= 1:
            deg = [0] * nvars
            deg[index] = 1
            jet.coeffs[_index(nvars, order)[tuple(deg)]] = 1.0
        return jet

    @classmethod
    def variables(cls, point, order: int) -> tuple:
        """Coordinate jets for every variable at ``point`` (sequence of arrays)."""
        nvars = len(point)
        return tuple(cls.variable(point[i], i, nvars, order) for i in range(nvars))

    # -- inspection -------------------------------------------------------
    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[1:]

    def coeff(self, *degree) -> np.ndarray:
        return self.coeffs[_index(self.nvars, self.order)[tuple(degree)]]

    def partial(self, *degree) -> np.ndarray:
        """Partial derivative value ``d^|degree| f`` at the base point."""
        scale = 1.0
        for k in degree:
            scale *= factorial(k)
        return self.coeff(*degree) * scale

    def __repr__(self) -> str:
        return f"Jet(nvars={self.nvars}, order={self.order}, batch={self.batch_shape})"

    # -- structural -------------------------------------------------------
    def _like(self, coeffs) -> "Jet":
        return Jet(coeffs, self.nvars, self.order)

    def _check(self, other: "Jet") -> None:
        if other.nvars != self.nvars or other.order != self.order:
            raise JetShapeError(
                f"jet mismatch: ({self.nvars} vars, order {self.order}) vs "
                f"({other.nvars} vars, order {other.order})"
            )

    def truncate(self, order: int) -> "Jet":
        if order == self.order:
            return self
        if order > self.order:
            raise JetShapeError("cannot raise the order of a jet")
        take = _truncate_table(self.nvars, self.order, order)
        return Jet(self.coeffs[take], self.nvars, order)

    def diff(self, var: int) -> "Jet":
        """Jet of the partial derivative along ``var`` (one order lower)."""
        if self.order == 0:
            raise JetShapeError("cannot differentiate an order-0 jet")
        dst, src, fac = _diff_table(self.nvars, self.order, var)
        fac = fac.reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(self.coeffs[src] * fac, self.nvars, self.order - 1)

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self._like(self.coeffs[(slice(None),) + idx])

    def sum(self, axis=-1) -> "Jet":
        axis = axis + 1 if axis >= 0 else axis
        return self._like(self.coeffs.sum(axis=axis))

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return self._like(self.coeffs.reshape((self.coeffs.shape[0],) + tuple(shape)))

    def expand(self, axis: int) -> "Jet":
        axis = axis + 1 if axis >= 0 else axis
        return self._like(np.expand_dims(self.coeffs, axis))

    def where(self, mask, other: "Jet") -> "Jet":
        """Per-batch-element selection: ``self`` where mask else ``other``."""
        self._check(other)
        mask = np.asarray(mask)
        return self._like(np.where(mask[None], _lift(self.coeffs, mask.ndim), _lift(other.coeffs, mask.ndim)))

    @staticmethod
    def stack(jets, axis: int = -1) -> "Jet":
        first = jets[0]
        for j in jets[1:]:
            first._check(j)
        axis = axis + 1 if axis >= 0 else axis
        n = max(len(j.batch_shape) for j in jets)
        coeffs = np.broadcast_arrays(*[_lift(j.coeffs, n) for j in jets])
        return Jet(np.stack(coeffs, axis=axis), first.nvars, first.order)

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> "Jet":
        return self._like(-self.coeffs)

    def __add__(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check(other)
            n = max(len(self.batch_shape), len(other.batch_shape))
            return self._like(_lift(self.coeffs, n) + _lift(other.coeffs, n))
        other = np.asarray(other, dtype=float)
        shape = (self.coeffs.shape[0],) + np.broadcast_shapes(self.batch_shape, other.shape)
        coeffs = np.array(np.broadcast_to(_lift(self.coeffs, len(shape) - 1), shape))
        coeffs[0] += other
        return self._like(coeffs)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return jet_product(self, other)
        other = np.asarray(other, dtype=float)
        return self._like(_lift(self.coeffs, other.ndim) * other[None])

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return jet_product(self, jet_analytic("reciprocal", other))
        other = np.asarray(other, dtype=float)
        return self._like(_lift(self.coeffs, other.ndim) / other[None])

    def __rtruediv__(self, other) -> "Jet":
        return jet_analytic("reciprocal", self) * other

    def __pow__(self, k: int) -> "Jet":
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Jet.constant(np.ones(self.batch_shape), self.nvars, self.order)
        for _ in range(k):
            out = out * self
        return out

    def sqrt(self) -> "Jet":
        return jet_analytic("sqrt", self)

    def sin(self) -> "Jet":
        return jet_analytic("sin", self)

    def cos(self) -> "Jet":
        return jet_analytic("cos", self)

    def exp(self) -> "Jet":
        return jet_analytic("exp", self)

    def log(self) -> "Jet":
        return jet_analytic("log", self)

    def reciprocal(self) -> "Jet":
        return jet_analytic("reciprocal", self)


def jet_product(a: Jet, b: Jet) -> Jet:
    """Truncated Cauchy product of two jets."""
    a._check(b)
    shape = (a.coeffs.shape[0],) + np.broadcast_shapes(a.batch_shape, b.batch_shape)
    out = np.zeros(shape)
    ac = _lift(a.coeffs, len(shape) - 1)
    bc = _lift(b.coeffs, len(shape) - 1)
    for p, (qs, ms) in enumerate(_product_table(a.nvars, a.order)):
        out[ms] += ac[p] * bc[qs]
    return Jet(out, a.nvars, a.order)


def _taylor_derivatives(fn: str, x: np.ndarray, order: int) -> list:
    """Derivatives f^(k)(x), k = 0..order."""
    if fn == "exp":
        e = np.exp(x)
        return [e] * (order + 1)
    if fn == "sin":
        s, c = np.sin(x), np.cos(x)
        return [[s, c, -s, -c][k % 4] for k in range(order + 1)]
    if fn == "cos":
        s, c = np.sin(x), np.cos(x)
        return [[c, -s, -c, s][k % 4] for k in range(order + 1)]
    if fn == "sqrt":
        if np.any(x <= DOMAIN_EPS):
            raise JetDomainError(f"sqrt of jet with value <= {DOMAIN_EPS}")
        out, coef = [], 1.0
        for k in range(order + 1):
            out.append(coef * x ** (0.5 - k))
            coef *= 0.5 - k
        return out
    if fn == "reciprocal":
        if np.any(np.abs(x) <= DOMAIN_EPS):
            raise JetDomainError(f"reciprocal of jet with |value| <= {DOMAIN_EPS}")
        return [(-1) ** k * factorial(k) * x ** (-1.0 - k) for k in range(order + 1)]
    if fn == "log":
        if np.any(x <= DOMAIN_EPS):
            raise JetDomainError(f"log of jet with value <= {DOMAIN_EPS}")
        out = [np.log(x)]
        out += [(-1) ** (k - 1) * factorial(k - 1) * x ** (-float(k)) for k in range(1, order + 1)]
        return out
    raise ValueError(f"unsupported jet function {fn!r}")


def jet_analytic(fn: str, a: Jet) -> Jet:
    """Compose an analytic scalar function with a jet.

    ``fn`` is one of ``sqrt, sin, cos, exp, reciprocal`` (and ``log``).
    The result is exact through the retained order: with ``d = a - a(0)``
    nilpotent, ``f(a) = sum_k f^(k)(a0) / k! d^k``.
    """
    x0 = a.value
    derivs = _taylor_derivatives(fn, x0, a.order)
    delta = a._like(a.coeffs.copy())
    delta.coeffs[0] = 0.0
    result = Jet.constant(derivs[a.order] / factorial(a.order), a.nvars, a.order)
    for k in range(a.order - 1, -1, -1):
        result = jet_product(result, delta) + derivs[k] / factorial(k)
    return result


def _dispatch(name):
    np_fn = {"sqrt": np.sqrt, "sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log,
             "reciprocal": np.reciprocal}[name]

    def fn(x):
        if isinstance(x, Jet):
            return jet_analytic(name, x)
        return np_fn(np.asarray(x, dtype=float))

    fn.__name__ = name
    fn.__doc__ = f"{name} for floats, arrays or jets."
    return fn


sqrt = _dispatch("sqrt")
sin = _dispatch("sin")
cos = _dispatch("cos")
exp = _dispatch("exp")
log = _dispatch("log")
reciprocal = _dispatch("reciprocal")


def cosh(x):
    return 0.5 * (exp(x) + exp(-x))


def sinh(x):
    return 0.5 * (exp(x) - exp(-x))


def value_of(x) -> np.ndarray:
    """Degree-0 part of a jet, or the array itself."""
    return x.value if isinstance(x, Jet) else np.asarray(x, dtype=float)


def stack(items, axis: int = -1):
    """Stack scalars/arrays/jets along a new batch axis, promoting to jets if any is a jet."""
    jets = [x for x in items if isinstance(x, Jet)]
    if not jets:
        return np.stack(np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in items]), axis=axis)
    ref = jets[0]
    promoted = [x if isinstance(x, Jet) else Jet.constant(x, ref.nvars, ref.order) for x in items]
    return Jet.stack(promoted, axis=axis)
