"""Differential forms with jet-valued components.

A p-form on an n-dimensional chart is stored as its components on the basis
dx^I, I an increasing p-tuple, listed in lexicographic order.  Components are
kept in one batched ``Jet`` whose first batch axis runs over the basis.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jets import Jet, OrderMismatchError


class FormError(ValueError):
    pass


@lru_cache(maxsize=None)
def basis(n: int, p: int) -> tuple:
    return tuple(itertools.combinations(range(n), p))


@lru_cache(maxsize=None)
def basis_index(n: int, p: int) -> dict:
    return {I: k for k, I in enumerate(basis(n, p))}


def _sort_sign(seq):
    """Sign of the permutation sorting ``seq`` (0 if there are repeats)."""
    if len(set(seq)) < len(seq):
        return 0, None
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign, tuple(seq)


@lru_cache(maxsize=None)
def _wedge_table(n, p, q):
    ia, ib, rows = [], [], []
    out_idx = basis_index(n, p + q)
    for a, I in enumerate(basis(n, p)):
        for b, J in enumerate(basis(n, q)):
            sign, K = _sort_sign(I + J)
            if sign:
                ia.append(a)
                ib.append(b)
                rows.append((out_idx[K], sign))
    mat = np.zeros((len(basis(n, p + q)), len(rows)))
    for col, (k, s) in enumerate(rows):
        mat[k, col] = s
    return np.array(ia, dtype=int), np.array(ib, dtype=int), mat


@lru_cache(maxsize=None)
def _d_table(n, p):
    # d(f dx^I) = sum_v df/dx^v dx^v ^ dx^I
    out_idx = basis_index(n, p + 1)
    mat = np.zeros((len(basis(n, p + 1)), len(basis(n, p)) * n))
    for a, I in enumerate(basis(n, p)):
        for v in range(n):
            sign, K = _sort_sign((v,) + I)
            if sign:
                mat[out_idx[K], a * n + v] = sign
    return mat


def _linear(mat, comps: Jet) -> Jet:
    return Jet(np.tensordot(mat, comps.coeffs, axes=(1, 0)), comps.nvars, comps.order)


@dataclass(frozen=True)
class FormValue:
    """A p-form at a point: jet-valued components on the dx^I basis."""

    degree: int
    comps: Jet

    def __post_init__(self):
        n = self.comps.nvars
        if self.comps.shape != (math.comb(n, self.degree),):
            raise FormError(f"a {self.degree}-form in {n} variables needs {math.comb(n, self.degree)} components")

    @property
    def nvars(self):
        return self.comps.nvars

    @property
    def order(self):
        return self.comps.order

    @classmethod
    def from_components(cls, degree, comps, nvars, order):
        return cls(degree, Jet.array(list(comps), nvars, order))

    @classmethod
    def zero(cls, degree, nvars, order):
        return cls(degree, Jet.constant(np.zeros(math.comb(nvars, degree)), nvars, order))

    def component(self, I) -> Jet:
        sign, K = _sort_sign(tuple(I))
        if not sign:
            return Jet.constant(0, self.nvars, self.order)
        return self.comps[basis_index(self.nvars, self.degree)[K]] * sign

    def values(self) -> np.ndarray:
        return np.asarray(self.comps.coeffs[..., 0])

    def truncate(self, order):
        return FormValue(self.degree, self.comps.truncate(order))

    def __add__(self, other):
        self._same(other)
        return FormValue(self.degree, self.comps + other.comps)

    def __sub__(self, other):
        self._same(other)
        return FormValue(self.degree, self.comps - other.comps)

    def __neg__(self):
        return FormValue(self.degree, -self.comps)

    def scale(self, f):
        """Multiply by a scalar (Jet or number)."""
        if isinstance(f, Jet):
            f = Jet(np.broadcast_to(f.coeffs, self.comps.coeffs.shape), f.nvars, f.order)
        return FormValue(self.degree, self.comps * f)

    def _same(self, other):
        if self.degree != other.degree:
            raise FormError("cannot add forms of different degree")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values()))) if self.values().size else 0.0


def basis_form(n: int, I, order: int = 0) -> FormValue:
    """The constant form dx^{I_1} ^ ... ^ dx^{I_p}."""
    sign, K = _sort_sign(tuple(I))
    c = np.zeros(math.comb(n, len(I)))
    if sign:
        c[basis_index(n, len(I))[K]] = sign
    return FormValue(len(I), Jet.constant(c, n, order))


def one_form(comps, nvars=None, order=None) -> FormValue:
    """A 1-form from its n coefficients (Jets or numbers)."""
    comps = list(comps)
    ref = next((c for c in comps if isinstance(c, Jet)), None)
    nvars = nvars or (ref.nvars if ref is not None else len(comps))
    order = ref.order if ref is not None else (order or 0)
    return FormValue(1, Jet.array(comps, nvars, order))


def wedge(a: FormValue, b: FormValue) -> FormValue:
    if a.nvars != b.nvars:
        raise FormError("forms live on charts of different dimension")
    if a.order != b.order:
        raise OrderMismatchError(f"wedge of jets of order {a.order} and {b.order}")
    n = a.nvars
    if a.degree + b.degree > n:
        raise FormError("wedge degree exceeds chart dimension")
    ia, ib, mat = _wedge_table(n, a.degree, b.degree)
    prod = a.comps[ia] * b.comps[ib] if len(ia) else Jet.constant(np.zeros(0), n, a.order)
    return FormValue(a.degree + b.degree, _linear(mat, prod))


def wedge_all(*forms: FormValue) -> FormValue:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def exterior_derivative(a: FormValue) -> FormValue:
    """d of a form; the result has one jet order less."""
    if a.order < 1:
        raise OrderMismatchError("exterior derivative needs jets of order >= 1")
    n = a.nvars
    if a.degree == n:
        raise FormError("cannot differentiate a top-degree form")
    g = a.comps.grad()  # shape (C(n,p), n)
    flat = g.reshape(-1)
    return FormValue(a.degree + 1, _linear(_d_table(n, a.degree), flat))


def extract_coefficient(form: FormValue, base: FormValue):
    """Return (q, residual) with form ~ q * base at the base point.

    For top-degree forms this is the exact ratio (residual 0).  Otherwise q is
    the least-squares multiplier and ``residual`` is the size of the part of
    ``form`` not proportional to ``base``.
    """
    if form.degree != base.degree or form.nvars != base.nvars:
        raise FormError("forms must have the same degree and chart")
    f = form.values()
    b = base.values()
    norm2 = float(np.vdot(b, b).real)
    if norm2 == 0.0:
        raise FormError("reference form vanishes")
    q = np.vdot(b, f) / norm2
    residual = float(np.max(np.abs(f - q * b))) if f.size else 0.0
    return complex(q), residual


class FormField:
    """A p-form field given by component callables on a chart."""

    def __init__(self, degree: int, components, chart):
        from .exprlang import as_field

        self.chart = tuple(chart)
        self.degree = degree
        n = len(self.chart)
        if len(components) != math.comb(n, degree):
            raise FormError(f"need {math.comb(n, degree)} components")
        self.components = [as_field(c, self.chart) for c in components]

    def __call__(self, X) -> FormValue:
        ref = next(x for x in X if isinstance(x, Jet))
        return FormValue(self.degree, Jet.array([c(X) for c in self.components], ref.nvars, ref.order))

    def at(self, point, order: int) -> FormValue:
        return self(Jet.variables(point, order))
