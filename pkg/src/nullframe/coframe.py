"""Null coframes, structure coefficients, the Levi-Civita connection and optical scalars.

A null coframe (θ¹, θ², θ³, θ⁴) has θ² = conj(θ¹), θ³ and θ⁴ real, and metric
g = 2(θ¹θ² + θ³θ⁴), i.e. frame metric components g_12 = g_34 = 1.  Frame indices
are zero-based in code: θ¹ -> 0, θ² -> 1, θ³ -> 2, θ⁴ -> 3.

Coframe matrices are stored with rows indexed by the frame and columns by the
coordinate differentials: E[i, mu] = θ^i(∂_mu).  The dual frame is e = E^{-1},
so e[mu, j] is the mu-th component of the vector e_j.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exprlang import as_field
from .forms import FormValue, basis_form, extract_coefficient, wedge, wedge_all
from .jets import Jet, SingularMatrixError, einsum, inv, lower

ETA = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float)
ETA_INV = ETA.copy()
# complex conjugation swaps θ¹ and θ² and fixes θ³, θ⁴
CONJ = np.array([1, 0, 2, 3])


class FrameError(ValueError):
    pass


class SingularFrameError(FrameError):
    def __init__(self, message, cond=np.inf):
        super().__init__(message)
        self.cond = cond


class RealityError(FrameError):
    pass


def _as_jet_matrix(rows, nvars, order):
    return Jet.array([[lower(x, order) for x in row] for row in rows], nvars, order)


class NullCoframe:
    """A null coframe field on a 4-dimensional chart.

    ``rows(X)`` maps coordinate values X (jets or numbers) to the coordinate
    components of (θ¹, θ³, θ⁴); θ² is taken as the conjugate of θ¹.  ``depth``
    is how many jet orders ``rows`` consumes (the coframe of a lift involves
    derivatives of the underlying data).
    """

    def __init__(self, chart, rows, depth: int = 0, name: str = ""):
        self.chart = tuple(chart)
        if len(self.chart) != 4:
            raise FrameError("a coframe needs a 4-dimensional chart")
        self.rows = rows
        self.depth = depth
        self.name = name

    @classmethod
    def from_expressions(cls, chart, theta1, theta3, theta4, name=""):
        """Build a coframe from three lists of four expression strings."""
        chart = tuple(chart)
        fields = [[as_field(c, chart) for c in row] for row in (theta1, theta3, theta4)]
        if any(len(row) != 4 for row in fields):
            raise FrameError("each coframe row needs 4 components")
        return cls(chart, lambda X: [[f(X) for f in row] for row in fields], 0, name)

    def _full_rows(self, X):
        t1, t3, t4 = self.rows(X)
        t2 = [np.conj(x) if not isinstance(x, Jet) else x.conj() for x in t1]
        return [list(t1), t2, list(t3), list(t4)]

    def matrix(self, X) -> Jet:
        """Coframe matrix from seed jets X; the result has order (seed order - depth)."""
        order = X[0].order - self.depth
        if order < 0:
            raise FrameError(f"seed order {X[0].order} too small for a coframe of depth {self.depth}")
        return _as_jet_matrix(self._full_rows(X), X[0].nvars, order)

    def jet(self, point, order: int) -> Jet:
        return self.matrix(Jet.variables(point, order + self.depth))

    def values(self, point) -> np.ndarray:
        return np.asarray(self.jet(point, 0).value)

    def metric(self, point) -> np.ndarray:
        E = self.values(point)
        return (E.T @ ETA @ E).real

    def reality_residual(self, point) -> float:
        E = self.values(point)
        return float(max(np.abs(E[2:].imag).max(), np.abs(E[1] - E[0].conj()).max()))

    def check_reality(self, point, tol=1e-12):
        res = self.reality_residual(point)
        scale = max(1.0, float(np.abs(self.values(point)).max()))
        if res > tol * scale:
            raise RealityError(f"coframe violates reality conditions (residual {res:.3g})")
        return res


def frame_decompose(omega, E) -> np.ndarray:
    """Frame components w_i of a 1-form with coordinate components omega: omega = w_i θ^i."""
    E = np.asarray(E.value if isinstance(E, Jet) else E)
    return np.linalg.solve(E.T, np.asarray(omega, dtype=complex))


@dataclass
class FrameGeometry:
    """Jet-level first-order data of a coframe at a point.

    E, e      coframe matrix and its inverse (order K)
    dtheta    D[i, j, k]: dθ^i = ½ D^i_jk θ^j ∧ θ^k (order K-1)
    gamma     γ_ijk with Γ_ij = γ_ijk θ^k (order K-1)
    conn      Γ^i_{j mu}, coordinate components of the connection 1-forms (order K-1)
    """

    point: tuple
    E: Jet
    e: Jet
    dtheta: Jet
    gamma: Jet
    conn: Jet

    @property
    def structure(self) -> np.ndarray:
        """c^i_jk with dθ^i = -½ c^i_jk θ^j ∧ θ^k, at the point."""
        return -np.asarray(self.dtheta.value)


def frame_condition(coframe: NullCoframe, point) -> float:
    return float(np.linalg.cond(coframe.values(point)))


def frame_geometry(coframe: NullCoframe, point, order: int = 1) -> FrameGeometry:
    """Structure coefficients and connection jets; ``order`` >= 1 is the coframe jet order."""
    if order < 1:
        raise FrameError("frame geometry needs coframe jets of order >= 1")
    E = coframe.jet(point, order)
    try:
        e = inv(E, cond_limit=1e12)
    except SingularMatrixError as exc:
        raise SingularFrameError(str(exc), exc.cond) from None
    dE = E.grad()  # dE[i, nu, mu] = d_mu E^i_nu
    dcoord = dE.transpose(0, 2, 1) - dE  # (dθ^i)_{mu nu}
    e1 = e.truncate(order - 1)
    D = einsum("imn,mj->ijn", dcoord, e1)
    D = einsum("ijn,nk->ijk", D, e1)
    A = einsum("im,mjk->ijk", ETA, D)
    gamma = (A + A.transpose(2, 0, 1) - A.transpose(1, 2, 0)) * 0.5
    conn = einsum("ijk,km->ijm", gamma, E.truncate(order - 1))
    conn = einsum("im,mjk->ijk", ETA_INV, conn)
    return FrameGeometry(tuple(point), E, e, D, gamma, conn)


def structure_coefficients(coframe: NullCoframe, point) -> np.ndarray:
    return frame_geometry(coframe, point, 1).structure


def connection_residuals(geo: FrameGeometry) -> dict:
    """Residuals of dθ^i + Γ^i_j ∧ θ^j = 0, Γ_ij = -Γ_ji and the conjugation rule."""
    E = np.asarray(geo.E.value)
    D = np.asarray(geo.dtheta.value)
    G = np.asarray(geo.conn.value)
    dcoord = np.einsum("ijk,jm,kn->imn", D, E, E)
    wedge_part = np.einsum("ijm,jn->imn", G, E)
    eq = dcoord + wedge_part - wedge_part.transpose(0, 2, 1)
    gam = np.asarray(geo.gamma.value)
    antisym = gam + gam.transpose(1, 0, 2)
    conj = gam.conj() - gam[np.ix_(CONJ, CONJ, CONJ)]
    return {
        "structure_equation": float(np.abs(eq).max()),
        "antisymmetry": float(np.abs(antisym).max()),
        "conjugation": float(np.abs(conj).max()),
    }


@dataclass(frozen=True)
class OpticalScalars:
    kappa: complex
    sigma: complex
    Omega: float
    rho: complex
    tau: complex
    expansion: float
    twist_residual: float  # size of the part of dθ³∧θ³ not of the expected shape


def _frame_two_form(D_i) -> FormValue:
    from .forms import basis

    comps = [D_i[j, k] for j, k in basis(4, 2)]
    return FormValue(2, Jet.constant(np.array(comps), 4, 0))


def optical_scalars(coframe: NullCoframe, point) -> OpticalScalars:
    geo = frame_geometry(coframe, point, 1)
    D = np.asarray(geo.dtheta.value)
    th = [basis_form(4, (i,)) for i in range(4)]
    vol = basis_form(4, (0, 1, 2, 3))
    d3, d1 = _frame_two_form(D[2]), _frame_two_form(D[0])
    kbar, _ = extract_coefficient(wedge_all(d3, th[0], th[2]), vol)
    sbar, _ = extract_coefficient(wedge_all(d1, th[0], th[2]), vol)
    kappa, sigma = np.conj(-kbar), np.conj(-sbar)
    tw = wedge(d3, th[2])
    iOmega, _ = extract_coefficient(FormValue(3, tw.comps), FormValue(3, basis_form(4, (0, 1, 2)).comps))
    Omega = (iOmega / 1j)
    expected = basis_form(4, (0, 1, 2)).comps.coeffs[..., 0] * (1j * Omega.real)
    expected = expected + (-kappa) * basis_form(4, (0, 2, 3)).comps.coeffs[..., 0]
    expected = expected + (-np.conj(kappa)) * basis_form(4, (1, 2, 3)).comps.coeffs[..., 0]
    twist_residual = float(np.abs(tw.values() - expected).max())
    gam = np.asarray(geo.gamma.value)
    rho = np.conj(-gam[1, 3, 0])
    tau = np.conj(-gam[1, 3, 2])
    twist_residual = max(twist_residual, abs(Omega.imag))
    return OpticalScalars(complex(kappa), complex(sigma), float(Omega.real), complex(rho), complex(tau),
                          float(-2 * rho.real), twist_residual)


def adapted_transform(coframe: NullCoframe, A=1.0, phi=0.0, B=0.0) -> NullCoframe:
    """Change to another coframe adapted to the same null direction θ³.

    A (real, nonzero), phi (real) and B (complex) may be numbers, expression
    strings or callables of the coordinates.
    """
    fA, fphi, fB = (as_field(x, coframe.chart) for x in (A, phi, B))

    def rows(X):
        t1, t3, t4 = (list(r) for r in coframe.rows(X))
        t2 = [x.conj() if isinstance(x, Jet) else np.conj(x) for x in t1]
        order = X[0].order - coframe.depth if isinstance(X[0], Jet) else None

        def low(x):
            return lower(x, order) if order is not None else x

        a, p, b = low(fA(X)), low(fphi(X)), low(fB(X))
        a0 = a.value if isinstance(a, Jet) else a
        if np.any(np.abs(np.asarray(a0)) == 0):
            raise FrameError("adapted transform with A = 0")
        ph = p.__mul__(1j).exp() if isinstance(p, Jet) else np.exp(1j * np.asarray(p))
        bb = b.conj() if isinstance(b, Jet) else np.conj(b)
        n1 = [ph * (x + bb * z) for x, z in zip(t1, t3)]
        n3 = [a * z for z in t3]
        n4 = [(w - b * x - bb * y - b * bb * z) / a for w, x, y, z in zip(t4, t1, t2, t3)]
        return n1, n3, n4

    return NullCoframe(coframe.chart, rows, coframe.depth, coframe.name + "'")
