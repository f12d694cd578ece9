"""Riemann, Ricci and Weyl tensors of a null coframe, and the Weyl scalars.

Curvature 2-forms Ω^i_j = dΓ^i_j + Γ^i_k ∧ Γ^k_j are computed from jets of the
connection, so nothing here uses finite differences.  Frame components follow
Ω^i_j = ½ R^i_jkl θ^k ∧ θ^l, Ricci R_ij = R^k_ikj and R = g^ij R_ij.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coframe import CONJ, ETA, ETA_INV, NullCoframe, frame_geometry


@dataclass
class CurvaturePacket:
    point: tuple
    riemann: np.ndarray  # R_ijkl, all indices lowered
    ricci: np.ndarray  # R_ij
    scalar: complex
    weyl: np.ndarray  # C_ijkl
    psi: np.ndarray  # Ψ0..Ψ4
    connection_residual: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def scale(self) -> float:
        """Relative residual scale max(1, |Ψ2|, max |R_ijkl|)."""
        return float(max(1.0, abs(self.psi[2]), np.abs(self.riemann).max()))


def riemann_packet(coframe: NullCoframe, point) -> CurvaturePacket:
    """Full curvature data at ``point`` (coframe jets of order 2 are used)."""
    geo = frame_geometry(coframe, point, 2)
    G = geo.conn  # Γ^i_{j mu}, order 1
    dG = G.grad()  # dG[i, j, nu, mu] = d_mu Γ^i_{j nu}
    dG_anti = dG.transpose(0, 1, 3, 2) - dG
    G0 = np.asarray(G.value)
    GG = np.einsum("ikm,kjn->ijmn", G0, G0)
    omega = np.asarray(dG_anti.value) + GG - GG.transpose(0, 1, 3, 2)
    e = np.asarray(geo.e.value)
    R_up = np.einsum("ijmn,mk,nl->ijkl", omega, e, e)
    R = np.einsum("im,mjkl->ijkl", ETA, R_up)
    ricci = np.einsum("kikj->ij", R_up)
    scalar = complex(np.einsum("ij,ij->", ETA_INV, ricci))
    C = weyl_tensor(R, ricci, scalar)
    psi = weyl_scalars_from_tensor(C)
    return CurvaturePacket(tuple(point), R, ricci, scalar, C, psi)


def weyl_tensor(R, ricci, scalar) -> np.ndarray:
    g = ETA
    ric_g = (np.einsum("ik,jl->ijkl", g, ricci) - np.einsum("il,jk->ijkl", g, ricci)
             - np.einsum("jk,il->ijkl", g, ricci) + np.einsum("jl,ik->ijkl", g, ricci))
    gg = np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g)
    return R - 0.5 * ric_g + scalar / 6.0 * gg


def weyl_scalars_from_tensor(C) -> np.ndarray:
    # one-based labels: Ψ0=C4141, Ψ1=C4341, Ψ2=C4132, Ψ3=C3432, Ψ4=C3232
    return np.array([C[3, 0, 3, 0], C[3, 2, 3, 0], C[3, 0, 2, 1], C[2, 3, 2, 1], C[2, 1, 2, 1]])


def weyl_scalars(coframe: NullCoframe, point) -> np.ndarray:
    return riemann_packet(coframe, point).psi


def ricci_blocks(packet: CurvaturePacket, Lambda: float = 0.0) -> dict:
    """The three blocks of Einstein's equations R_ij = Λ g_ij.

    a: R22, R24, R44   b: R12 - Λ, R34 - Λ   c: R33, R23, R13   (one-based indices)
    """
    r = packet.ricci
    return {
        "a": float(max(abs(r[1, 1]), abs(r[1, 3]), abs(r[3, 3]))),
        "b": float(max(abs(r[0, 1] - Lambda), abs(r[2, 3] - Lambda))),
        "c": float(max(abs(r[2, 2]), abs(r[1, 2]), abs(r[0, 2]))),
        "all": float(np.abs(r - Lambda * ETA).max()),
    }


def curvature_identities(packet: CurvaturePacket) -> dict:
    """Residuals of the algebraic symmetries of the curvature tensors."""
    R = packet.riemann
    C = packet.weyl
    first = R + R.transpose(1, 0, 2, 3)
    second = R + R.transpose(0, 1, 3, 2)
    pair = R - R.transpose(2, 3, 0, 1)
    bianchi = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
    trace = np.einsum("ik,ijkl->jl", ETA_INV, C)
    conj = R.conj() - R[np.ix_(CONJ, CONJ, CONJ, CONJ)]
    ric_sym = packet.ricci - packet.ricci.T
    return {
        "antisymmetry": float(max(np.abs(first).max(), np.abs(second).max())),
        "pair_symmetry": float(np.abs(pair).max()),
        "bianchi": float(np.abs(bianchi).max()),
        "weyl_traceless": float(np.abs(trace).max()),
        "conjugation": float(np.abs(conj).max()),
        "ricci_symmetry": float(np.abs(ric_sym).max()),
        "scalar_imag": float(abs(packet.scalar.imag)),
    }


def coordinate_riemann_fd(metric_fn, point, h: float = 1e-2) -> np.ndarray:
    """Coordinate Riemann tensor R^rho_{sigma mu nu} from finite differences of a metric.

    ``metric_fn(x)`` returns the 4x4 metric at x.  Christoffel symbols and their
    derivatives use fourth-order central differences.
    """
    x0 = np.asarray(point, dtype=float)
    n = 4
    stencil = [(-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)]

    def dmetric(x):
        out = np.zeros((n, n, n))  # out[c, a, b] = d_c g_ab
        for c in range(n):
            for s, w in stencil:
                xs = x.copy()
                xs[c] += s * h
                out[c] += w * metric_fn(xs) / h
        return out

    def christoffel(x):
        g = metric_fn(x)
        gi = np.linalg.inv(g)
        dg = dmetric(x)
        low = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)  # Γ_{a b c}, first index lowered
        return np.einsum("ra,abc->rbc", gi, low)

    Gam = christoffel(x0)
    dGam = np.zeros((n, n, n, n))  # dGam[m, r, a, b] = d_m Γ^r_ab
    for m in range(n):
        for s, w in stencil:
            xs = x0.copy()
            xs[m] += s * h
            dGam[m] += w * christoffel(xs) / h
    # R^r_{s m n} = d_m Γ^r_{n s} - d_n Γ^r_{m s} + Γ^r_{m l} Γ^l_{n s} - Γ^r_{n l} Γ^l_{m s}
    R = (np.einsum("mrns->rsmn", dGam) - np.einsum("nrms->rsmn", dGam)
         + np.einsum("rml,lns->rsmn", Gam, Gam) - np.einsum("rnl,lms->rsmn", Gam, Gam))
    return R


def frame_riemann_from_coordinates(R_coord, E) -> np.ndarray:
    """Lower-index frame components R_ijkl from coordinate R^rho_{sigma mu nu}."""
    E = np.asarray(E)
    e = np.linalg.inv(E)
    g = E.T @ ETA @ E
    R_low = np.einsum("ar,rsmn->asmn", g, R_coord)
    return np.einsum("asmn,ai,sj,mk,nl->ijkl", R_low, e, e, e, e)
