"""Three-dimensional CR structures (λ, μ) and the CR-level equations of their lifts.

A CR structure is a real 1-form λ and a complex 1-form μ with λ∧μ∧μ̄ ≠ 0.
Dual to (λ, μ, μ̄) are the vector fields (∂₀, ∂, ∂̄).  In the normalized case
dμ = 0 and

    dλ = i μ∧μ̄ + (c μ + c̄ μ̄)∧λ,

which defines the structure function c.  All fields here are evaluated on jet
seeds; each derivative consumes one jet order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exprlang import as_field
from .forms import FormValue, exterior_derivative, extract_coefficient, wedge, wedge_all
from .jets import Jet, SingularMatrixError, einsum, inv, lower
from .jets import align as _align, jprod as _prod, jsum as _sum


class CRError(ValueError):
    pass


class NotNormalizedError(CRError):
    pass


class DegenerateCRError(CRError):
    pass


def field_depth(f) -> int:
    return getattr(f, "depth", 0)


class CRStructure:
    """A CR structure on a 3-chart given by coefficient callables for λ and μ.

    ``lam(X)`` and ``mu(X)`` return the three dx-components of λ and μ; X may
    carry an extra trailing coordinate (the fibre coordinate of a lift), which
    they must ignore.  ``depth`` counts the jet orders consumed in producing
    the coefficients.
    """

    def __init__(self, chart, lam, mu, depth: int = 0, name: str = ""):
        self.chart = tuple(chart)
        if len(self.chart) != 3:
            raise CRError("a CR structure needs a 3-dimensional chart")
        self.lam = lam
        self.mu = mu
        self.depth = depth
        self.name = name

    @classmethod
    def from_expressions(cls, chart, lam, mu, name=""):
        chart = tuple(chart)
        lf = [as_field(c, chart) for c in lam]
        mf = [as_field(c, chart) for c in mu]
        if len(lf) != 3 or len(mf) != 3:
            raise CRError("λ and μ need three components each")
        return cls(chart, lambda X: [f(X) for f in lf], lambda X: [f(X) for f in mf], 0, name)

    def coefficients(self, X):
        """(λ, μ) as Jets of shape (3,) and order (seed order - depth)."""
        k = X[0].order - self.depth
        if k < 0:
            raise CRError("seed order too small for this structure")
        n = X[0].nvars
        lam = Jet.array([lower(x, k) for x in self.lam(X)], n, k)
        mu = Jet.array([lower(x, k) for x in self.mu(X)], n, k)
        return lam, mu

    def local(self, point, order: int, nvars: int | None = None) -> "CRLocal":
        """Local data at ``point`` with coefficient jets of the given order."""
        point = list(point)
        if nvars is not None and nvars > len(point):
            point = point + [0.0] * (nvars - len(point))
        return CRLocal(self, Jet.variables(point, order + self.depth))

    def normalized(self) -> "CRStructure":
        """λ' = λ/ω so that the Levi coefficient becomes 1."""
        parent = self

        def lam(X):
            loc = CRLocal(parent, X)
            om = loc.levi.real
            return list(loc.lam.truncate(loc.order - 1) / Jet.stack([om, om, om]))

        return CRStructure(self.chart, lam, lambda X: list(CRLocal(parent, X).mu.truncate(X[0].order - parent.depth - 1)),
                           self.depth + 1, self.name + " (normalized)")


class CRLocal:
    """Frame data of a CR structure on one set of jet seeds."""

    def __init__(self, cr: CRStructure, X):
        self.cr = cr
        self.X = list(X)
        self.lam, self.mu = cr.coefficients(self.X)
        self.order = self.lam.order
        self.nvars = self.lam.nvars
        L = Jet.stack([self.lam, self.mu, self.mu.conj()])  # L[a, m] = θ^a(∂_m)
        self.L = L
        try:
            self.Z = inv(L, cond_limit=1e12)  # Z[m, a]: m-component of the a-th dual vector
        except SingularMatrixError as exc:
            raise DegenerateCRError(f"λ∧μ∧μ̄ vanishes (cond={exc.cond:.3g})") from None
        self._frame_d = None

    # dual operators ---------------------------------------------------
    def apply(self, f, a: int) -> Jet:
        if not isinstance(f, Jet):
            return Jet.constant(0, self.nvars, max(self.order - 1, 0))
        if f.order < 1:
            raise CRError("jet order exhausted")
        k = min(f.order, self.order)
        g = f.truncate(k).grad()[:3]
        z = self.Z.truncate(k - 1)[:, a]
        return einsum("m,m->", g, z)

    def d0(self, f):
        return self.apply(f, 0)

    def d(self, f):
        return self.apply(f, 1)

    def dbar(self, f):
        return self.apply(f, 2)

    def field(self, f) -> Jet:
        """Evaluate a scalar field (callable, expression or number) on the seeds."""
        v = as_field(f, self.cr.chart + ("r",))(self.X) if isinstance(f, str) else as_field(f, self.cr.chart)(self.X)
        if not isinstance(v, Jet):
            return Jet.constant(v, self.nvars, self.order)
        return v.truncate(min(v.order, self.order))

    # structure --------------------------------------------------------
    @property
    def frame_d(self) -> Jet:
        """D[a, b, c]: dθ^a = ½ D^a_bc θ^b ∧ θ^c for θ = (λ, μ, μ̄); order K-1."""
        if self._frame_d is None:
            if self.order < 1:
                raise CRError("jet order exhausted")
            dL = self.L.grad()[:, :, :3]  # dL[a, n, m] = d_m L[a, n]
            dcoord = dL.transpose(0, 2, 1) - dL
            z = self.Z.truncate(self.order - 1)
            D = einsum("amn,mb->abn", dcoord, z)
            self._frame_d = einsum("abn,nc->abc", D, z)
        return self._frame_d

    @property
    def levi(self) -> Jet:
        """ω with λ∧dλ = i ω λ∧μ∧μ̄."""
        return self.frame_d[0, 1, 2] * (-1j)

    @property
    def c(self) -> Jet:
        """Coefficient of μ∧λ in dλ."""
        return self.frame_d[0, 1, 0]

    def dmu_size(self) -> float:
        dL = self.L.grad()[1, :, :3]
        return float(np.abs(np.asarray((dL.transpose(1, 0) - dL).value)).max())

    def require_normalized(self, tol: float = 1e-9):
        om = complex(self.levi.value)
        if abs(om - 1) > tol:
            raise NotNormalizedError(f"Levi coefficient is {om:.6g}, expected 1; normalize λ first")
        if self.dmu_size() > 1e-10:
            raise NotNormalizedError(f"μ is not closed (|dμ| = {self.dmu_size():.3g})")
        return self


# ---------------------------------------------------------------------------
# point-level operations

def _point_local(cr, point, order, fields=(), normalized=True):
    extra = max([field_depth(f) for f in fields], default=0)
    loc = cr.local(point, order + extra, nvars=len(point) if len(point) == 4 else None)
    if normalized:
        loc.require_normalized()
    return loc


def levi_coefficient(cr: CRStructure, point) -> float:
    """Levi coefficient from the ratio of λ∧dλ to i λ∧μ∧μ̄ at the point."""
    loc = cr.local(point, 1)
    lam = FormValue(1, loc.lam[:3] if loc.nvars == 3 else loc.lam)
    mu = FormValue(1, loc.mu)
    dlam = exterior_derivative(lam)
    top = wedge(lam.truncate(0), dlam)
    base = wedge_all(lam, mu, FormValue(1, loc.mu.conj())).truncate(0)
    q, _ = extract_coefficient(top, FormValue(3, base.comps * 1j))
    scale = max(1.0, abs(q))
    if abs(q.imag) > 1e-8 * scale:
        raise CRError(f"Levi coefficient has imaginary part {q.imag:.3g}; is λ real?")
    return float(q.real)


def normalize_lambda(cr: CRStructure, points=()) -> CRStructure:
    """Rescale λ by 1/ω; raises if ω vanishes at any of ``points``."""
    for p in points:
        if abs(levi_coefficient(cr, p)) < 1e-10:
            raise DegenerateCRError(f"Levi form degenerates at {tuple(p)}")
    return cr.normalized()


def structure_function_c(cr: CRStructure, point) -> complex:
    loc = _point_local(cr, point, 1)
    D = loc.frame_d
    c = complex(D[0, 1, 0].value)
    cbar = complex(D[0, 2, 0].value)
    if abs(cbar - np.conj(c)) > 1e-9 * max(1.0, abs(c)):
        raise CRError("μ̄∧λ coefficient is not the conjugate of c")
    return c


def duality_residual(cr: CRStructure, point) -> float:
    loc = cr.local(point, 0)
    pairing = np.asarray(loc.L.value) @ np.asarray(loc.Z.value)
    return float(np.abs(pairing - np.eye(3)).max())


_OPS = {"d0": 0, "del": 1, "delbar": 2}


def cr_apply(cr: CRStructure, f, op, point, order: int) -> Jet:
    """Apply ∂₀ ('d0'), ∂ ('del') or ∂̄ ('delbar') to a field.

    ``op`` may be a sequence such as ("del", "delbar") for ∂∂̄f; the last
    operator acts first.  The jet ``order`` is the budget for f; each operator
    consumes one order.
    """
    ops = [op] if isinstance(op, str) else list(op)
    if len(ops) > order:
        raise CRError(f"order budget {order} too small for {len(ops)} derivatives")
    loc = cr.local(point, order, nvars=len(point) if len(point) == 4 else None)
    v = loc.field(f)
    for name in reversed(ops):
        v = loc.apply(v, _OPS[name])
    return v


def commutator_residual(cr: CRStructure, f, point) -> complex:
    """(∂₀∂ - ∂∂₀)f - c ∂₀f."""
    loc = _point_local(cr, point, 2, (f,))
    v = loc.field(f)
    lhs = loc.d0(loc.d(v)) - loc.d(loc.d0(v))
    lhs, c, d0f = _align(lhs, loc.c, loc.d0(v))
    return complex((lhs - c * d0f).value)


def residual_ee0(cr: CRStructure, point) -> complex:
    """∂c̄ - ∂̄c, which vanishes for any normalized structure."""
    loc = _point_local(cr, point, 2)
    c = loc.c
    return complex((loc.d(c.conj()) - loc.dbar(c)).value)


def residual_ee5(cr: CRStructure, t, point) -> complex:
    """∂t + (c - t) t."""
    loc = _point_local(cr, point, 1, (t,))
    tj = loc.field(t)
    dt, c, tt = _align(loc.d(tj), loc.c, tj)
    return complex((dt + (c - tt) * tt).value)


def second_cr_form_residual(cr: CRStructure, t, point) -> complex:
    """Coefficient of μ∧μ̄∧λ in dφ∧φ for φ = μ + i t̄ λ, by exterior calculus."""
    loc = _point_local(cr, point, 1, (t,))
    tj = loc.field(t)
    lam, mu, tj = _align(loc.lam, loc.mu, tj)
    n = loc.nvars
    tb = Jet.stack([tj.conj()] * n)
    phi = FormValue(1, mu + tb * lam * 1j)
    dphi = exterior_derivative(phi)
    top = wedge(dphi, phi.truncate(dphi.order))
    base = wedge_all(FormValue(1, mu), FormValue(1, mu.conj()), FormValue(1, lam)).truncate(dphi.order)
    q, _ = extract_coefficient(top, base)
    return q


def _require_real(x: Jet, what: str):
    v = complex(x.value)
    if abs(v.imag) > 1e-10 * max(1.0, abs(v)):
        raise CRError(f"{what} must be real, got {v}")


def ee7_operator(loc: CRLocal, p: Jet, t: Jet, Lambda: float, m: Jet):
    """Return (left side, right side) of the scalar equation for p checked by residual_ee7, as jets."""
    c = loc.c
    cb = c.conj()
    dp, dbp = loc.d(p), loc.dbar(p)
    coeff = _sum(_prod(0.5, c, cb), 0.75 * _sum(loc.d(cb), loc.dbar(c)),
                 -1.5 * _sum(loc.d(t.conj()), loc.dbar(t), _prod(t, t.conj())))
    lhs = _sum(loc.d(dbp), loc.dbar(dp), _prod(cb, dp), _prod(c, dbp), _prod(coeff, p))
    rhs = _sum((m + m.conj()) / p ** 3, (2.0 / 3.0) * Lambda * p ** 3)
    return _align(lhs, rhs)


def cr_laplacian(cr: CRStructure, f, point) -> float:
    """Δ_CR f = (∂∂̄ + ∂̄∂ + c∂̄ + c̄∂ + ½cc̄ + ⅜(∂c̄ + ∂̄c)) f for real f."""
    loc = _point_local(cr, point, 2, (f,))
    fj = loc.field(f)
    _require_real(fj, "f")
    c = loc.c
    cb = c.conj()
    v = _sum(loc.d(loc.dbar(fj)), loc.dbar(loc.d(fj)), _prod(c, loc.dbar(fj)), _prod(cb, loc.d(fj)),
             _prod(0.5, c, cb, fj), _prod(0.375, _sum(loc.d(cb), loc.dbar(c)), fj))
    v = complex(v.value)
    if abs(v.imag) > 1e-10 * max(1.0, abs(v)):
        raise CRError(f"Δ_CR f has imaginary part {v.imag:.3g}")
    return float(v.real)


def residual_ee7(cr: CRStructure, p, t, m, Lambda: float, point) -> complex:
    loc = _point_local(cr, point, 2, (p, t, m))
    pj = loc.field(p)
    _require_real(pj, "p")
    if abs(pj.value) == 0:
        raise CRError("p vanishes")
    lin, rhs = ee7_operator(loc, pj, loc.field(t), Lambda, loc.field(m))
    return complex((lin - rhs).value)


def residual_ee8(cr: CRStructure, m, t, point) -> complex:
    """∂m + 3(c - t)m."""
    loc = _point_local(cr, point, 1, (m, t))
    mj, tj = loc.field(m), loc.field(t)
    dm, c, mj, tj = _align(loc.d(mj), loc.c, mj, tj)
    return complex((dm + 3 * (c - tj) * mj).value)


def residual_maxwell_nbm(cr: CRStructure, f, point) -> complex:
    """∂f̄ + c f̄."""
    loc = _point_local(cr, point, 1, (f,))
    fb = loc.field(f).conj()
    dfb, c, fb = _align(loc.d(fb), loc.c, fb)
    return complex((dfb + c * fb).value)


def cartan_invariant(cr: CRStructure, point) -> complex:
    """∂∂̄∂c + 3c∂̄∂c - 7ic∂₀c - 3i∂∂₀c + (∂c + 2c²)∂̄c."""
    loc = _point_local(cr, point, 4)
    c = loc.c  # order 3
    dc = loc.d(c)
    dbdc = loc.dbar(dc)
    val = _sum(loc.d(dbdc), _prod(3, c, dbdc), _prod(-7j, c, loc.d0(c)),
               -3j * loc.d(loc.d0(c)), _prod(_sum(dc, _prod(2, c, c)), loc.dbar(c)))
    return complex(val.value)


@dataclass(frozen=True)
class TypeIIIInvariants:
    I: complex
    del_Ibar: complex
    r33_closed: complex
    psi3_closed: complex
    type_n_candidate: bool
    psi4_closed: complex | None


def type_iii_invariants(cr: CRStructure, p, point, r: float = 0.0, s: float = 0.0,
                        Lambda: float = 0.0, tol: float = 1e-9) -> TypeIIIInvariants:
    """I = ∂(∂log p + c) + (∂log p + c)² and the closed forms built from it."""
    loc = _point_local(cr, point, 4, (p,))
    pj = loc.field(p)
    _require_real(pj, "p")
    if abs(pj.value) == 0:
        raise CRError("p vanishes")
    logp = pj.log()
    a = loc.d(logp) + loc.c
    I = loc.d(a) + (a * a).truncate(a.order - 1)
    dIb = loc.d(I.conj())
    p2 = (pj * pj).truncate(dIb.order)
    inner = p2 * dIb
    outer = loc.d(inner) + 2 * loc.c.truncate(inner.order - 1) * inner.truncate(inner.order - 1)
    half = (r + s) / 2
    cs = np.cos(half)
    p0 = complex(pj.value)
    r33 = 8 * cs ** 4 / p0 ** 4 * complex(outer.value)
    psi3 = 2j * complex(dIb.value) * np.exp(1j * half) / p0 ** 2 * cs ** 3
    if Lambda:
        c = loc.c
        cb = c.conj()
        dl, dbl = loc.d(logp), loc.dbar(logp)
        paren = (4 / 3 * Lambda * p0 ** 2 + 6 * (cb.value * dl.value + c.value * dbl.value)
                 + 12 * dl.value * dbl.value + 3 * c.value * cb.value
                 - 0.5 * (loc.d(cb).value + loc.dbar(c).value) - 2j * loc.d0(logp).value)
        r33 += -8 * Lambda * cs ** 4 * complex(paren)
        psi3 += -4j * Lambda * (2 * complex(dbl.value) + complex(cb.value)) * np.exp(1j * half) * cs ** 3
    candidate = abs(complex(dIb.value)) < tol
    psi4 = None
    if candidate:
        psi4 = 2j * complex(loc.d0(I.conj()).value) * np.exp(-1j * half) * cs ** 3 / p0 ** 2
    return TypeIIIInvariants(complex(I.value), complex(dIb.value), complex(r33), complex(psi3), candidate, psi4)


# ---------------------------------------------------------------------------
# gauge freedom and CR functions

def t_from_cr_function(cr: CRStructure, eta):
    """Field t with h dη = μ + i t̄ λ for a CR function η (∂̄η = 0).

    The returned callable evaluates on seeds and consumes one jet order.
    """
    def t(X):
        loc = CRLocal(cr, X)
        ej = loc.field(eta)
        d0e, de = loc.d0(ej), loc.d(ej)
        return (d0e / (de * 1j)).conj()

    t.depth = cr.depth + 1
    return t


def cr_function_residual(cr: CRStructure, eta, point) -> complex:
    loc = _point_local(cr, point, 1, (eta,), normalized=False)
    return complex(loc.dbar(loc.field(eta)).value)


@dataclass
class GaugeResult:
    cr: CRStructure  # (λ', μ')
    c_prime: object  # callable point -> complex
    t_prime: object


def gauge_transform(cr: CRStructure, t, h, t0) -> GaugeResult:
    """λ' = |h|⁻²λ, μ' = h⁻¹(μ + i t̄₀ λ), with c' and t' from the transformation laws.

    The c' law assumes μ' is again closed.
    """
    chart = cr.chart
    hf, tf, t0f = as_field(h, chart), as_field(t, chart), as_field(t0, chart)
    depth = max(cr.depth, field_depth(h), field_depth(t0))

    def _vals(X):
        k = X[0].order - depth
        hv, t0v = lower(hf(X), k), lower(t0f(X), k)
        hv = hv if isinstance(hv, Jet) else Jet.constant(hv, X[0].nvars, k)
        if np.any(np.asarray(hv.value) == 0):
            raise CRError("h vanishes")
        lam0, mu0 = cr.coefficients(X)
        return hv, t0v, [lower(x, k) for x in lam0], [lower(x, k) for x in mu0]

    def lam(X):
        hv, _, lam0, _ = _vals(X)
        w = (hv * hv.conj()).reciprocal()
        return [w * x for x in lam0]

    def mu(X):
        hv, t0v, lam0, mu0 = _vals(X)
        tb = t0v.conj() if isinstance(t0v, Jet) else np.conj(t0v)
        return [(m + 1j * tb * l) / hv for l, m in zip(lam0, mu0)]

    new = CRStructure(chart, lam, mu, depth, cr.name + " (gauge)")

    def c_prime(point):
        loc = _point_local(cr, point, 1, (hf, t0f), normalized=False)
        hv, t0v = loc.field(hf), loc.field(t0f)
        logh = (hv * hv.conj()).log()
        val = hv.value * (loc.c.value - t0v.value - loc.d(logh).value)
        return complex(val)

    def t_prime(point):
        loc = _point_local(cr, point, 0, (hf, tf, t0f), normalized=False)
        return complex(loc.field(hf).value * (loc.field(tf).value - loc.field(t0f).value))

    return GaugeResult(new, c_prime, t_prime)
