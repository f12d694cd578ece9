"""Hodge star on 2-forms and aligned null Maxwell fields F = f λ∧μ.

In the null frame (g_12 = g_34 = 1) the volume form is ±i θ¹∧θ²∧θ³∧θ⁴; the sign
is fixed so that θ³∧θ¹ is anti-self-dual, *(θ³∧θ¹) = -i θ³∧θ¹.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .coframe import ETA, NullCoframe
from .crstruct import CRLocal, CRStructure, field_depth
from .forms import FormValue, basis, exterior_derivative, extract_coefficient, wedge, wedge_all
from .jets import Jet


def _levi_civita():
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for a in range(4) for b in range(a + 1, 4) if perm[a] > perm[b])
        eps[perm] = (-1) ** inversions
    return eps


_EPS = _levi_civita()


def _star(w, vol):
    up = ETA @ w @ ETA
    return 0.5 * vol * np.einsum("kl,klij->ij", up, _EPS)


def _orientation():
    w = np.zeros((4, 4), dtype=complex)
    w[2, 0], w[0, 2] = 1, -1  # θ³∧θ¹
    for vol in (1j, -1j):
        if np.allclose(_star(w, vol), -1j * w):
            return vol
    raise RuntimeError("no orientation makes θ³∧θ¹ anti-self-dual")


VOLUME_FACTOR = _orientation()


def hodge_star_frame(w) -> np.ndarray:
    """Star of a 2-form given by its antisymmetric frame components w_ij."""
    return _star(np.asarray(w, dtype=complex), VOLUME_FACTOR)


def _to_matrix(form: FormValue) -> np.ndarray:
    vals = form.values()
    m = np.zeros((4, 4), dtype=complex)
    for k, (i, j) in enumerate(basis(4, 2)):
        m[i, j], m[j, i] = vals[k], -vals[k]
    return m


def _from_matrix(m) -> FormValue:
    return FormValue(2, Jet.constant(np.array([m[i, j] for i, j in basis(4, 2)]), 4, 0))


def hodge_star(coframe: NullCoframe, form: FormValue, point) -> FormValue:
    """Hodge star of a coordinate 2-form at ``point`` (values only)."""
    E = coframe.values(point)
    e = np.linalg.inv(E)
    W = _to_matrix(form)
    w = e.T @ W @ e  # frame components
    s = hodge_star_frame(w)
    return _from_matrix(E.T @ s @ E)


@dataclass(frozen=True)
class MaxwellReport:
    dF_residual: float  # size of dF
    dF_coefficient: complex  # dF = q λ∧μ∧μ̄
    nullness: float  # size of F∧F
    asd_residual: float  # size of *F + iF
    nbm_residual: complex  # ∂f̄ + c f̄
    consistency: float  # |q - conj(nbm)|


def maxwell_check(cr: CRStructure, f, point, coframe: NullCoframe | None = None) -> MaxwellReport:
    """Check F = f λ∧μ on the lift M x R (f independent of r).

    ``cr`` must be normalized.  The anti-self-duality test uses ``coframe``,
    by default the plain lift θ¹ = μ, θ³ = λ, θ⁴ = dr.
    """
    from .lift import lift_general

    point = list(point)
    if len(point) == 3:
        point = point + [0.0]
    X = Jet.variables(point, 1 + cr.depth + field_depth(f))
    loc = CRLocal(cr, X)
    loc.require_normalized()
    fj = loc.field(f).truncate(1)
    lam = loc.lam.truncate(1)
    mu = loc.mu.truncate(1)

    def four(v):
        return FormValue(1, Jet.stack([v[0], v[1], v[2], v[0] * 0]))

    L, Mu = four(lam), four(mu)
    F = wedge(L, Mu).scale(fj)
    dF = exterior_derivative(F)
    base = wedge_all(L, Mu, four(mu.conj())).truncate(0)
    q, _ = extract_coefficient(dF, base)
    F0 = F.truncate(0)
    null = wedge(F0, F0).max_abs()
    coframe = coframe or lift_general(cr)
    star = hodge_star(coframe, F0, point)
    asd = float(np.abs(star.values() + 1j * F0.values()).max())
    c = loc.c.truncate(0)
    fb = fj.conj()
    nbm = complex((loc.d(fb) + c * fb.truncate(0)).value)
    return MaxwellReport(dF.max_abs(), q, null, asd, nbm, float(abs(q - np.conj(nbm))))
