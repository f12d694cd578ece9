"""Truncated multivariate Taylor jets with complex coefficients.

A jet of order K in n variables stores the Taylor coefficients c_alpha of a
function around a base point for every multi-index |alpha| <= K.  Coefficients
live in the last axis of a numpy array so that a single ``Jet`` can carry a
whole batch (a vector or a matrix of jets) and vectorised products stay cheap.

Multi-indices are listed degree by degree, so truncating to a lower order is a
prefix slice of the coefficient axis.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from numbers import Number

import numpy as np

MAX_VARS = 4
MAX_ORDER = 4


class JetError(ValueError):
    """Base class for jet arithmetic errors."""


class OrderMismatchError(JetError):
    """Operands disagree on order or number of variables."""


class BranchCutError(JetError):
    """A multivalued function was evaluated on its branch cut."""


class JetZeroDivisionError(JetError, ZeroDivisionError):
    """Division by a jet whose value vanishes."""


class SingularMatrixError(JetError):
    """A jet-valued matrix has a (numerically) singular value part."""

    def __init__(self, message, cond=np.inf):
        super().__init__(message)
        self.cond = cond


def n_coeffs(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


class JetSpace:
    """Index tables shared by all jets with a given (nvars, order)."""

    def __init__(self, nvars: int, order: int):
        if not 1 <= nvars <= MAX_VARS:
            raise JetError(f"nvars must be in 1..{MAX_VARS}, got {nvars}")
        if not 0 <= order <= MAX_ORDER:
            raise JetError(f"order must be in 0..{MAX_ORDER}, got {order}")
        self.nvars = nvars
        self.order = order
        indices = []
        for deg in range(order + 1):
            level = [a for a in itertools.product(range(deg + 1), repeat=nvars) if sum(a) == deg]
            indices.extend(sorted(level, reverse=True))
        self.indices = indices
        self.size = len(indices)
        self.index = {a: k for k, a in enumerate(indices)}
        self.degree = np.array([sum(a) for a in indices])
        self.factorial = np.array([math.prod(math.factorial(x) for x in a) for a in indices], dtype=float)

        pa, pb, pk = [], [], []
        for i, a in enumerate(indices):
            for j, b in enumerate(indices):
                if sum(a) + sum(b) <= order:
                    pa.append(i)
                    pb.append(j)
                    pk.append(self.index[tuple(x + y for x, y in zip(a, b))])
        self.pair_a = np.array(pa)
        self.pair_b = np.array(pb)
        scatter = np.zeros((len(pk), self.size), dtype=complex)
        scatter[np.arange(len(pk)), pk] = 1.0
        self.scatter = scatter

        # d/dx_v maps an order-K jet to an order-(K-1) jet.
        self.deriv_src = []
        self.deriv_fac = []
        if order >= 1:
            lower = indices[: n_coeffs(nvars, order - 1)]
            for v in range(nvars):
                src, fac = [], []
                for b in lower:
                    up = list(b)
                    up[v] += 1
                    src.append(self.index[tuple(up)])
                    fac.append(b[v] + 1.0)
                self.deriv_src.append(np.array(src))
                self.deriv_fac.append(np.array(fac))


@lru_cache(maxsize=None)
def jet_space(nvars: int, order: int) -> JetSpace:
    return JetSpace(nvars, order)


def _branch_check(a0, name):
    a0 = np.asarray(a0)
    mag = np.abs(a0)
    if np.any(mag == 0):
        raise BranchCutError(f"{name} evaluated at zero")
    on_cut = (np.abs(a0.imag) <= 1e-14 * mag) & (a0.real < 0)
    if np.any(on_cut):
        raise BranchCutError(f"{name} evaluated on the negative real axis")


class Jet:
    """A (batch of) truncated Taylor expansion(s).

    ``coeffs`` has shape ``batch_shape + (n_coeffs(nvars, order),)``.
    Jets are treated as immutable.
    """

    __slots__ = ("coeffs", "nvars", "order")
    __array_ufunc__ = None  # let numpy scalars and arrays defer to Jet operators

    def __init__(self, coeffs, nvars: int, order: int):
        coeffs = np.asarray(coeffs, dtype=complex)
        sp = jet_space(nvars, order)
        if coeffs.ndim == 0 or coeffs.shape[-1] != sp.size:
            raise JetError(f"coefficient axis must have length {sp.size}, got shape {coeffs.shape}")
        self.coeffs = coeffs
        self.nvars = nvars
        self.order = order

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=complex)
        c = np.zeros(value.shape + (n_coeffs(nvars, order),), dtype=complex)
        c[..., 0] = value
        return cls(c, nvars, order)

    @classmethod
    def variables(cls, point, order: int) -> list["Jet"]:
        """Seed jets x_v = point_v + h_v for every coordinate of ``point``."""
        point = list(point)
        n = len(point)
        sp = jet_space(n, order)
        out = []
        for v, x in enumerate(point):
            c = np.zeros(sp.size, dtype=complex)
            c[0] = x
            if order >= 1:
                e = [0] * n
                e[v] = 1
                c[sp.index[tuple(e)]] = 1.0
            out.append(cls(c, n, order))
        return out

    @classmethod
    def array(cls, nested, nvars: int, order: int) -> "Jet":
        """Assemble a batched jet from a nested list of jets and numbers."""
        def conv(x):
            if isinstance(x, Jet):
                x._check_space(nvars, order)
                return x.coeffs
            if isinstance(x, (list, tuple)):
                return np.stack([conv(y) for y in x])
            return cls.constant(x, nvars, order).coeffs
        return cls(conv(nested), nvars, order)

    @classmethod
    def stack(cls, items, axis: int = 0) -> "Jet":
        items = list(items)
        ref = next((x for x in items if isinstance(x, Jet)), None)
        if ref is None:
            raise JetError("stack needs at least one Jet")
        cs = [ref._coerce(x) for x in items]
        ax = axis if axis >= 0 else axis - 1
        return cls(np.stack(cs, axis=ax), ref.nvars, ref.order)

    # basic properties -------------------------------------------------
    @property
    def space(self) -> JetSpace:
        return jet_space(self.nvars, self.order)

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[:-1]

    @property
    def value(self):
        v = self.coeffs[..., 0]
        return v.item() if v.ndim == 0 else v.copy()

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.coeffs[key + (slice(None),)], self.nvars, self.order)

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Jet(self.coeffs.reshape(shape + (self.coeffs.shape[-1],)), self.nvars, self.order)

    def sum(self, axis=None) -> "Jet":
        if axis is None:
            c = self.coeffs.reshape(-1, self.coeffs.shape[-1]).sum(axis=0)
        else:
            axes = axis if isinstance(axis, tuple) else (axis,)
            axes = tuple(a if a >= 0 else a - 1 for a in axes)
            c = self.coeffs.sum(axis=axes)
        return Jet(c, self.nvars, self.order)

    def transpose(self, *axes) -> "Jet":
        nb = len(self.shape)
        axes = axes or tuple(reversed(range(nb)))
        return Jet(self.coeffs.transpose(tuple(axes) + (nb,)), self.nvars, self.order)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderMismatchError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.coeffs[..., : n_coeffs(self.nvars, order)], self.nvars, order)

    def derivative(self, alpha) -> np.ndarray:
        """Partial derivative d^alpha f at the base point."""
        alpha = tuple(alpha)
        k = self.space.index[alpha]
        return self.coeffs[..., k] * self.space.factorial[k]

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, shape={self.shape}, value={self.value!r})"

    # coercion ---------------------------------------------------------
    def _check_space(self, nvars, order):
        if nvars != self.nvars or order != self.order:
            raise OrderMismatchError(
                f"jet mismatch: ({self.nvars} vars, order {self.order}) vs ({nvars} vars, order {order})")

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Jet):
            other._check_space(self.nvars, self.order)
            return other.coeffs
        if isinstance(other, (Number, np.ndarray, np.generic)):
            return Jet.constant(other, self.nvars, self.order).coeffs
        raise TypeError(f"cannot combine Jet with {type(other).__name__}")

    def _new(self, coeffs) -> "Jet":
        return Jet(coeffs, self.nvars, self.order)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            return self._new(self.coeffs + self._coerce(other))
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return self._new(self.coeffs - self._coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        try:
            return self._new(self._coerce(other) - self.coeffs)
        except TypeError:
            return NotImplemented

    def __neg__(self):
        return self._new(-self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Jet):
            other._check_space(self.nvars, self.order)
            return self._new(_mul(self.coeffs, other.coeffs, self.space))
        if isinstance(other, (Number, np.ndarray, np.generic)):
            other = np.asarray(other, dtype=complex)
            return self._new(self.coeffs * other[..., None])
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if isinstance(other, (Number, np.ndarray, np.generic)):
            other = np.asarray(other, dtype=complex)
            if np.any(other == 0):
                raise JetZeroDivisionError("division by zero")
            return self._new(self.coeffs / other[..., None])
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (Number, np.ndarray, np.generic)):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("jets only support integer powers")
        n = int(n)
        if n < 0:
            return self.reciprocal() ** (-n)
        result = self._new(Jet.constant(np.ones(self.shape), self.nvars, self.order).coeffs)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # elementary functions ---------------------------------------------
    def _compose(self, taylor):
        """f(a0 + h) = sum_k taylor[k] h^k with h the non-constant part."""
        h = self.coeffs.copy()
        h[..., 0] = 0
        hj = self._new(h)
        acc = Jet.constant(taylor[self.order], self.nvars, self.order)
        for k in range(self.order - 1, -1, -1):
            acc = acc * hj
            acc.coeffs[..., 0] += taylor[k]
        return acc

    def reciprocal(self):
        a0 = self.coeffs[..., 0]
        if np.any(a0 == 0):
            raise JetZeroDivisionError("reciprocal of a jet with zero value")
        return self._compose([(-1.0) ** k / a0 ** (k + 1) for k in range(self.order + 1)])

    def exp(self):
        e = np.exp(self.coeffs[..., 0])
        return self._compose([e / math.factorial(k) for k in range(self.order + 1)])

    def log(self):
        a0 = self.coeffs[..., 0]
        _branch_check(a0, "log")
        t = [np.log(a0)] + [(-1.0) ** (k + 1) / (k * a0 ** k) for k in range(1, self.order + 1)]
        return self._compose(t)

    def sqrt(self):
        a0 = self.coeffs[..., 0]
        _branch_check(a0, "sqrt")
        s = np.sqrt(a0)
        t = [math.prod(0.5 - j for j in range(k)) / math.factorial(k) * s / a0 ** k
             for k in range(self.order + 1)]
        return self._compose(t)

    def sin(self):
        a0 = self.coeffs[..., 0]
        cyc = [np.sin(a0), np.cos(a0), -np.sin(a0), -np.cos(a0)]
        return self._compose([cyc[k % 4] / math.factorial(k) for k in range(self.order + 1)])

    def cos(self):
        a0 = self.coeffs[..., 0]
        cyc = [np.cos(a0), -np.sin(a0), -np.cos(a0), np.sin(a0)]
        return self._compose([cyc[k % 4] / math.factorial(k) for k in range(self.order + 1)])

    def conj(self):
        return self._new(self.coeffs.conj())

    conjugate = conj

    @property
    def real(self):
        return self._new(self.coeffs.real.astype(complex))

    @property
    def imag(self):
        return self._new(self.coeffs.imag.astype(complex))

    def abs2(self):
        return self * self.conj()

    # differentiation --------------------------------------------------
    def diff(self, v: int) -> "Jet":
        if self.order == 0:
            raise OrderMismatchError("cannot differentiate an order-0 jet")
        sp = self.space
        return Jet(self.coeffs[..., sp.deriv_src[v]] * sp.deriv_fac[v], self.nvars, self.order - 1)

    def grad(self) -> "Jet":
        """Gradient with the variable axis appended to the batch shape."""
        return Jet.stack([self.diff(v) for v in range(self.nvars)], axis=-1)

    # comparisons ------------------------------------------------------
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol * max(1.0, self.max_abs())))


def _mul(a, b, sp: JetSpace):
    return (a[..., sp.pair_a] * b[..., sp.pair_b]) @ sp.scatter


def _pair_letter(subscripts: str) -> str:
    for ch in "zyxwvutsrqponmlkjihgfedcba":
        if ch not in subscripts:
            return ch
    raise JetError("no free einsum letter")


def einsum(subscripts: str, a, b):
    """Two-operand einsum where either operand may be a Jet or a numeric array."""
    ins, out = subscripts.replace(" ", "").split("->")
    sa, sb = ins.split(",")
    ja, jb = isinstance(a, Jet), isinstance(b, Jet)
    if ja and jb:
        a._check_space(b.nvars, b.order)
        sp = a.space
        p = _pair_letter(subscripts)
        prod = np.einsum(f"{sa}{p},{sb}{p}->{out}{p}", a.coeffs[..., sp.pair_a], b.coeffs[..., sp.pair_b])
        return Jet(prod @ sp.scatter, a.nvars, a.order)
    if ja or jb:
        ref = a if ja else b
        p = _pair_letter(subscripts)
        if ja:
            c = np.einsum(f"{sa}{p},{sb}->{out}{p}", a.coeffs, np.asarray(b, dtype=complex))
        else:
            c = np.einsum(f"{sa},{sb}{p}->{out}{p}", np.asarray(a, dtype=complex), b.coeffs)
        return Jet(c, ref.nvars, ref.order)
    return np.einsum(subscripts, a, b)


def matmul(a, b):
    return einsum("ij,jk->ik", a, b)


def inv(m: Jet, cond_limit: float = 1e12) -> Jet:
    """Inverse of a square jet-valued matrix (batch shape (n, n))."""
    a0 = m.coeffs[..., 0]
    cond = np.linalg.cond(a0)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularMatrixError(f"matrix is singular (cond={cond:.3g})", cond)
    inv0 = np.linalg.inv(a0)
    nil = m.coeffs.copy()
    nil[..., 0] = 0
    step = einsum("ij,jk->ik", -inv0, Jet(nil, m.nvars, m.order))
    x = Jet.constant(inv0, m.nvars, m.order)
    for _ in range(m.order):
        x = einsum("ij,jk->ik", step, x) + inv0
    return x


def value(x):
    """Base-point value of a Jet, or the number itself."""
    return x.value if isinstance(x, Jet) else x


def lower(x, order: int):
    """Truncate jets to ``order``; leave plain numbers untouched."""
    return x.truncate(order) if isinstance(x, Jet) else x


def align(*xs):
    """Truncate jets to their common (lowest) order; numbers pass through."""
    orders = [x.order for x in xs if isinstance(x, Jet)]
    if not orders:
        return xs
    k = min(orders)
    return tuple(lower(x, k) for x in xs)


def jsum(*terms):
    """Sum after truncating every jet to the lowest order present."""
    terms = align(*terms)
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def jprod(*factors):
    """Product after truncating every jet to the lowest order present."""
    factors = align(*factors)
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out
