"""Lifts of CR structures to null coframes on M x R (fibre coordinate r, last).

General ansatz:  θ¹ = Pμ, θ³ = Pλ, θ⁴ = P(dr + Wμ + W̄μ̄ + Hλ), so that
g = 2P²[μμ̄ + λ(dr + Wμ + W̄μ̄ + Hλ)].

The reduced lift fixes the r-dependence of P, W, H from the Einstein
equations R44 = R24 = R22 = 0 and R12 + R34 = 2Λ, in terms of fields p, s, t, m
on M.  The Fefferman lift is the special case P = 1, W = -(i/3)c,
H = -(1/12)(∂c̄ + ∂̄c).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coframe import NullCoframe
from .crstruct import CRLocal, CRStructure
from .exprlang import as_field
from .jets import Jet, lower
from .jets import jprod as _prod, jsum as _sum

COS_GUARD = 0.05


class LiftError(ValueError):
    pass


def lift_chart(cr: CRStructure, fibre: str = "r"):
    return cr.chart + (fibre,)


def _jet(x, nvars, order):
    if isinstance(x, Jet):
        return x.truncate(order)
    return Jet.constant(x, nvars, order)


def _assemble(lam, mu, P, W, H, Pmu=None):
    """Rows (θ¹, θ³, θ⁴) on the 4-chart from M-forms and lift functions (all jets)."""
    zero = P * 0
    Pmu = P if Pmu is None else Pmu
    lam3 = [lam[k] for k in range(3)]
    mu3 = [mu[k] for k in range(3)]
    mub3 = [x.conj() for x in mu3]
    t1 = [Pmu * x for x in mu3] + [zero]
    t3 = [P * x for x in lam3] + [zero]
    Wb = W.conj()
    t4 = [P * (W * a + Wb * b + H * l) for a, b, l in zip(mu3, mub3, lam3)] + [P]
    return t1, t3, t4


def lift_general(cr: CRStructure, P=1.0, W=0.0, H=0.0, mu_scale=None, name: str = "") -> NullCoframe:
    """Coframe θ¹ = Pμ, θ³ = Pλ, θ⁴ = P(dr + Wμ + W̄μ̄ + Hλ).

    P, W, H are fields on the 4-chart (M-coordinates, r).  If ``mu_scale`` is
    given it replaces P in θ¹ only, which covers metrics written as
    2(𝒫²μμ̄ + λ(dr + ...)).
    """
    chart = lift_chart(cr)
    fP, fW, fH = (as_field(x, chart) for x in (P, W, H))
    fS = as_field(mu_scale, chart) if mu_scale is not None else None

    def rows(X):
        lam, mu = cr.coefficients(X)
        n, k = X[0].nvars, lam.order
        Pj = _jet(fP(X), n, k)
        if np.any(np.asarray(Pj.value) == 0):
            raise LiftError("P vanishes")
        Sj = _jet(fS(X), n, k) if fS is not None else None
        return _assemble(lam, mu, Pj, _jet(fW(X), n, k), _jet(fH(X), n, k), Sj)

    return NullCoframe(chart, rows, cr.depth, name or f"lift of {cr.name}")


@dataclass
class LiftParameters:
    """Fields on M for the reduced lift: p real nonzero, s real, t and m complex."""

    p: object = 1.0
    s: object = 0.0
    t: object = 0.0
    m: object = 0.0
    Lambda: float = 0.0


def reduced_functions(loc: CRLocal, params: LiftParameters, r: Jet, q_form: str = "corrected") -> dict:
    """P, W, H and the intermediate x, y, Q, h as jets (two orders below ``loc``).

    ``q_form="as_printed"`` uses -2t∂̄p in Q instead of -2t∂̄log p; only the
    latter gives R12 + R34 = 2Λ when t and p are both non-constant.
    """
    if q_form not in ("corrected", "as_printed"):
        raise LiftError(f"unknown q_form {q_form!r}")
    loc.require_normalized()
    p = loc.field(params.p)
    s = loc.field(params.s)
    t = loc.field(params.t)
    m = loc.field(params.m)
    L = float(params.Lambda)
    if abs(complex(p.value).imag) > 1e-10 * max(1.0, abs(p.value)):
        raise LiftError("p must be real")
    if abs(complex(s.value).imag) > 1e-10 * max(1.0, abs(s.value)):
        raise LiftError("s must be real")
    if p.value == 0:
        raise LiftError("p vanishes")
    c, cb = loc.c, loc.c.conj()
    tb, mb = t.conj(), m.conj()
    dp, dbp = loc.d(p), loc.dbar(p)
    dlogp, dblogp = _prod(dp, 1 / p), _prod(dbp, 1 / p)
    d0logp = _prod(loc.d0(p), 1 / p)
    lap = _sum(loc.d(dbp), loc.dbar(dp))
    grad2 = _sum(_prod(2, dp, dbp), _prod(-1, p, lap))  # 2∂p∂̄p - p(∂∂̄p + ∂̄∂p)

    x = _prod((-1j * s).exp(), _sum(c, 2 * dlogp, -t))
    y = _sum(1j * c, 2j * dlogp, loc.d(s), -2j * t)
    p4 = p ** 4
    Q = _sum(_prod(3 * m + mb, 1 / p4), (2 / 3) * L * p * p, _prod(grad2, 1 / (2 * p * p)),
             -0.5j * d0logp, _prod(-2, t, dbp if q_form == "as_printed" else dblogp), _prod(-1, tb, dlogp), 1.5 * loc.dbar(t),
             _prod(-1, cb, t), _prod(-0.5, c, tb), _prod(2.5, t, tb), loc.d(tb), -loc.dbar(c))
    h = _sum(_prod(3, m + mb, 1 / p4), 2 * L * p * p, _prod(grad2, 1 / (p * p)),
             _prod(-3, _sum(_prod(t, dblogp), _prod(tb, dlogp))), 2.5 * _sum(loc.d(tb), loc.dbar(t)),
             _prod(6, t, tb), _prod(-1.5, _sum(_prod(c, tb), _prod(cb, t))), -2 * loc.dbar(c), loc.d0(s))
    phase = (1j * (r + s)).exp()
    half = (r + s) * 0.5
    cos_half = half.cos()
    if np.any(np.abs(np.asarray(cos_half.value)) < COS_GUARD):
        raise LiftError("cos((r+s)/2) is too close to zero; the lift is singular there")
    W = _sum(_prod(1j, (-1j * r).exp(), x), y)
    H = _sum(_prod(m, 1 / p4, phase, phase), _prod(mb, 1 / p4, phase.conj(), phase.conj()),
             _prod(Q, phase), _prod(Q.conj(), phase.conj()), h)
    P = _prod(p, 1 / cos_half)
    k = H.order
    out = {"P": P, "W": W, "H": H, "Q": Q, "h": h, "x": x, "y": y}
    return {key: lower(v, k) for key, v in out.items()}


def lift_reduced(cr: CRStructure, params: LiftParameters | None = None, name: str = "",
                 q_form: str = "corrected") -> NullCoframe:
    """Coframe of the reduced Einstein lift; consumes two jet orders beyond the CR data."""
    params = params or LiftParameters()
    chart = lift_chart(cr)

    def rows(X):
        loc = CRLocal(cr, X)
        f = reduced_functions(loc, params, X[3].truncate(loc.order), q_form)
        k = f["H"].order
        return _assemble(loc.lam.truncate(k), loc.mu.truncate(k), f["P"], f["W"], f["H"])

    return NullCoframe(chart, rows, cr.depth + 2, name or f"reduced lift of {cr.name}")


def lift_values(cr: CRStructure, params: LiftParameters, point) -> dict:
    """Values of P, W, H, Q, h, x, y at a 4-chart point."""
    X = Jet.variables(point, 2 + cr.depth)
    loc = CRLocal(cr, X)
    f = reduced_functions(loc, params, X[3].truncate(loc.order))
    return {k: complex(v.value) for k, v in f.items()}


def fefferman_functions(loc: CRLocal) -> dict:
    loc.require_normalized()
    c = loc.c
    W = c * (-1j / 3)
    H = _sum(loc.d(c.conj()), loc.dbar(c)) * (-1.0 / 12.0)
    k = H.order
    return {"P": Jet.constant(1.0, loc.nvars, k), "W": W.truncate(k), "H": H}


def lift_fefferman(cr: CRStructure, name: str = "") -> NullCoframe:
    """Fefferman coframe: P = 1, W = -(i/3)c, H = -(1/12)(∂c̄ + ∂̄c)."""
    chart = lift_chart(cr)

    def rows(X):
        loc = CRLocal(cr, X)
        f = fefferman_functions(loc)
        k = f["H"].order
        return _assemble(loc.lam.truncate(k), loc.mu.truncate(k), f["P"], f["W"], f["H"])

    return NullCoframe(chart, rows, cr.depth + 2, name or f"Fefferman lift of {cr.name}")


def periodicity_residual(cr: CRStructure, params: LiftParameters, point) -> dict:
    """Compare lift data at r and r + 2π.

    W, H and the metric are 2π-periodic; P = p/cos((r+s)/2) changes sign, so
    the coframe itself is compared up to that overall sign.
    """
    a = list(point)
    b = a[:3] + [a[3] + 2 * np.pi]
    fa, fb = lift_values(cr, params, a), lift_values(cr, params, b)
    co = lift_reduced(cr, params)
    Ea, Eb = co.values(a), co.values(b)
    ga, gb = co.metric(a), co.metric(b)
    return {
        "W": abs(fa["W"] - fb["W"]),
        "H": abs(fa["H"] - fb["H"]),
        "P2": abs(fa["P"] ** 2 - fb["P"] ** 2),
        "metric": float(np.abs(ga - gb).max()),
        "coframe_up_to_sign": float(np.abs(Ea + Eb).max()),
    }


__all__ = [
    "LiftError", "LiftParameters", "lift_general", "lift_reduced", "lift_fefferman",
    "lift_values", "reduced_functions", "fefferman_functions", "periodicity_residual",
]
