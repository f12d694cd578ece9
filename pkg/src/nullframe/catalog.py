"""Built-in scenarios: CR structures, their lifts and the properties they must satisfy.

Each scenario carries a sampling box, a predicate excluding singular regions,
closed forms where known, and a list of expectations.  An expectation names a
check from ``CHECKS`` and a tolerance; checks return (absolute, relative)
residuals at one point, and the expectation passes when the chosen residual is
below the tolerance.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import exprlang
from .coframe import NullCoframe, connection_residuals, frame_geometry, optical_scalars
from .crstruct import CRStructure, cartan_invariant, levi_coefficient
from .curvature import curvature_identities, riemann_packet, ricci_blocks
from .forms import exterior_derivative, one_form
from .lift import LiftParameters, lift_fefferman, lift_general, lift_reduced, periodicity_residual
from .maxwell import maxwell_check
from .petrov import PetrovLabel, classify


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class Expectation:
    check: str
    tol: float
    relative: bool = True


@dataclass(frozen=True)
class Scenario:
    name: str
    params: dict
    coframe: NullCoframe
    cr: CRStructure | None
    domain: tuple  # (lo, hi) per chart coordinate
    expected: tuple = ()
    Lambda: float = 0.0
    exclude: Callable | None = None  # exclude(point) -> True for unsafe points
    closed_forms: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def chart(self):
        return self.coframe.chart

    def safe(self, point) -> bool:
        point = np.asarray(point, dtype=float)
        inside = all(lo <= x <= hi for x, (lo, hi) in zip(point, self.domain))
        return inside and not (self.exclude and self.exclude(point))

    def sample(self, rng: np.random.Generator, count: int, max_tries: int = 100000) -> np.ndarray:
        """``count`` safe points drawn uniformly from the box by rejection."""
        lo = np.array([d[0] for d in self.domain], dtype=float)
        hi = np.array([d[1] for d in self.domain], dtype=float)
        out = []
        for _ in range(max_tries):
            if len(out) == count:
                break
            x = lo + (hi - lo) * rng.random(len(lo))
            if self.safe(x):
                out.append(x)
        if len(out) < count:
            raise CatalogError(f"could not draw {count} safe points for {self.name}")
        return np.array(out)


# ---------------------------------------------------------------------------
# checks


class PointContext:
    """Lazily computed data of a scenario at one point."""

    def __init__(self, scenario: Scenario, point):
        self.scenario = scenario
        self.point = [float(x) for x in point]

    @functools.cached_property
    def packet(self):
        return riemann_packet(self.scenario.coframe, self.point)

    @functools.cached_property
    def optical(self):
        return optical_scalars(self.scenario.coframe, self.point)

    @functools.cached_property
    def petrov(self):
        return classify(self.packet.psi)

    @functools.cached_property
    def levi(self) -> float:
        if self.scenario.cr is None:
            return float("nan")
        return levi_coefficient(self.scenario.cr, self.point[:3])


def _rel(ctx: PointContext, value: float):
    return float(value), float(value) / ctx.packet.scale


def check_ricci(ctx):
    return _rel(ctx, ricci_blocks(ctx.packet, ctx.scenario.Lambda)["all"])


def check_goldberg_sachs(ctx):
    psi = ctx.packet.psi
    return _rel(ctx, max(abs(psi[0]), abs(psi[1])))


def check_weyl_scalars(ctx):
    """Distance to the closed-form Ψ (NaN entries unconstrained); Ψ0, Ψ1 only if none is known."""
    psi = ctx.packet.psi
    form = ctx.scenario.closed_forms.get("psi")
    if form is None:
        return check_goldberg_sachs(ctx)
    want = np.asarray(form(ctx.point), dtype=complex)
    mask = ~np.isnan(want)
    diff = np.abs(psi[mask] - want[mask])
    return _rel(ctx, float(diff.max()) if diff.size else 0.0)


def check_petrov(ctx):
    want = ctx.scenario.extras.get("petrov")
    if want is None:
        raise CatalogError(f"scenario {ctx.scenario.name} has no expected Petrov label")
    bad = float(ctx.petrov.label != PetrovLabel(want))
    return bad, bad


def check_levi(ctx):
    form = ctx.scenario.closed_forms.get("levi")
    if form is None:
        raise CatalogError(f"scenario {ctx.scenario.name} has no closed-form Levi coefficient")
    d = abs(ctx.levi - form(ctx.point))
    return d, d


def check_shearfree(ctx):
    o = ctx.optical
    d = max(abs(o.kappa), abs(o.sigma))
    return d, d


def check_structure_equation(ctx):
    """First structure equation, connection symmetries and d²θ = 0 for every coframe row."""
    geo = frame_geometry(ctx.scenario.coframe, ctx.point, 2)
    res = max(connection_residuals(geo).values())
    E = geo.E
    for i in range(4):
        th = one_form([E[i, k] for k in range(4)])
        res = max(res, exterior_derivative(exterior_derivative(th)).max_abs())
    return _rel(ctx, res)


def check_tensor_identities(ctx):
    ids = curvature_identities(ctx.packet)
    keys = ("pair_symmetry", "bianchi", "weyl_traceless", "antisymmetry", "ricci_symmetry")
    return _rel(ctx, max(ids[k] for k in keys))


def check_maxwell(ctx):
    """dF, F∧F and *F + iF for the scenario's Maxwell potential."""
    scn = ctx.scenario
    f = scn.extras.get("maxwell_f")
    if f is None:
        raise CatalogError(f"scenario {scn.name} has no Maxwell field")
    rep = maxwell_check(scn.extras["maxwell_cr"], f, ctx.point, scn.coframe)
    d = max(rep.dF_residual, rep.nullness, rep.asd_residual)
    return d, d


def check_cartan_covanishing(ctx, threshold: float = 1e-7):
    """0 when Ψ4 and the Cartan invariant vanish together (or are both nonzero), else 1."""
    scn = ctx.scenario
    psi4 = abs(ctx.packet.psi[4]) / ctx.packet.scale < threshold
    cart = abs(cartan_invariant(scn.cr, ctx.point[:3])) < threshold
    bad = float(psi4 != cart)
    return bad, bad


def check_periodicity(ctx):
    params = ctx.scenario.extras.get("lift_parameters")
    if params is None:
        raise CatalogError(f"scenario {ctx.scenario.name} is not a reduced lift")
    res = periodicity_residual(ctx.scenario.cr, params, ctx.point)
    d = max(res.values())
    return d, d


CHECKS = {
    "ricci_blocks": check_ricci,
    "goldberg_sachs": check_goldberg_sachs,
    "weyl_scalars": check_weyl_scalars,
    "classify": check_petrov,
    "levi": check_levi,
    "shearfree": check_shearfree,
    "structure_equation": check_structure_equation,
    "tensor_identities": check_tensor_identities,
    "maxwell": check_maxwell,
    "cartan_covanishing": check_cartan_covanishing,
    "periodicity": check_periodicity,
}


def missing_requirement(scenario: Scenario, name: str) -> str | None:
    """Why check ``name`` cannot run on ``scenario``, or None if it can."""
    needs = {
        "classify": ("petrov" in scenario.extras, "no expected Petrov label"),
        "levi": ("levi" in scenario.closed_forms and scenario.cr is not None, "no closed-form Levi coefficient"),
        "maxwell": ("maxwell_f" in scenario.extras, "no Maxwell field"),
        "periodicity": ("lift_parameters" in scenario.extras, "not a reduced lift"),
        "cartan_covanishing": (scenario.cr is not None, "no CR structure"),
    }
    ok, why = needs.get(name, (True, ""))
    return None if ok else why


def run_check(scenario: Scenario, name: str, point) -> tuple:
    if name not in CHECKS:
        raise CatalogError(f"unknown check {name!r}")
    return CHECKS[name](PointContext(scenario, point))


# ---------------------------------------------------------------------------
# scenarios

CR_CHART = ("u", "z_re", "z_im")
KERR_CHART = ("u", "zeta_re", "zeta_im")
# |r| <= π - 0.11 keeps |cos(r/2)| above the lift's singularity guard
R_MAX = np.pi - 0.11
MU_DZ = ["0", "1", "i"]
HEISENBERG_LAMBDA = ["1", "-z_im", "z_re"]  # du + (i/2)(z dz̄ - z̄ dz)
ROBINSON_LAMBDA = ["1", "2*z_im", "-2*z_re"]  # du + i(z̄ dz - z dz̄)

_COMMON = (
    Expectation("structure_equation", 1e-10),
    Expectation("tensor_identities", 1e-9),
)


def _num(x) -> str:
    return f"({float(x)!r})"


def heisenberg_cr() -> CRStructure:
    return CRStructure.from_expressions(CR_CHART, HEISENBERG_LAMBDA, MU_DZ, name="heisenberg")


def robinson_cr() -> CRStructure:
    return CRStructure.from_expressions(CR_CHART, ROBINSON_LAMBDA, MU_DZ, name="robinson")


def _zabs2(point, i=1):
    return point[i] ** 2 + point[i + 1] ** 2


def minkowski() -> Scenario:
    cr = CRStructure.from_expressions(CR_CHART, ["1", "0", "0"], MU_DZ, name="flat")
    co = lift_general(cr, name="minkowski")
    return Scenario(
        "minkowski", {}, co, cr, ((-1, 1), (-1, 1), (-1, 1), (-2, 2)),
        expected=_COMMON + (Expectation("ricci_blocks", 1e-12), Expectation("weyl_scalars", 1e-12),
                            Expectation("classify", 0.5), Expectation("shearfree", 1e-12),
                            Expectation("levi", 1e-12)),
        closed_forms={"psi": lambda p: np.zeros(5), "levi": lambda p: 0.0},
        extras={"petrov": "ZERO"},
    )


def heisenberg() -> Scenario:
    """Heisenberg CR structure with its flat reduced lift (p = 1, s = t = m = 0)."""
    cr = heisenberg_cr()
    params = LiftParameters()
    co = lift_reduced(cr, params, name="heisenberg lift")
    return Scenario(
        "heisenberg", {}, co, cr, ((-1, 1), (-1, 1), (-1, 1), (-R_MAX, R_MAX)),
        expected=_COMMON + (Expectation("ricci_blocks", 1e-8), Expectation("weyl_scalars", 1e-8),
                            Expectation("levi", 1e-12), Expectation("shearfree", 1e-10),
                            Expectation("periodicity", 1e-12)),
        closed_forms={"psi": lambda p: np.zeros(5), "levi": lambda p: 1.0},
        extras={"lift_parameters": params},
    )


KERR_LIMIT = 10.0


def kerr_family(m: float = 1.0, a: float = 0.0, b: float = 0.0) -> Scenario:
    """Three-parameter Ricci-flat family; b = 0 is Kerr, a = b = 0 Schwarzschild, m = a = 0 Taub-NUT."""
    for key, v in (("m", m), ("a", a), ("b", b)):
        if not np.isfinite(v) or abs(v) > KERR_LIMIT:
            raise CatalogError(f"kerr_family parameter {key}={v} outside [-{KERR_LIMIT}, {KERR_LIMIT}]")
    M, A, B = _num(m), _num(a), _num(b)
    s = "(zeta_re^2 + zeta_im^2)"
    D = f"(1 + {s}/2)"
    G = f"((2*{B} + ({A} + {B})*{s})/{D}^2)"
    # λ = du + iG/ζ dζ - iG/ζ̄ dζ̄ written on (u, Re ζ, Im ζ)
    lam = ["1", f"2*{G}*zeta_im/{s}", f"-2*{G}*zeta_re/{s}"]
    cr = CRStructure.from_expressions(KERR_CHART, lam, MU_DZ, name="kerr family")
    N = f"({B} - {A} + ({B} + {A})*{s}/2)"
    P2 = f"(r^2/{D}^2 + {N}^2/{D}^4)"
    W = f"(i*{A}*(zeta_re - i*zeta_im)/{D}^2)"
    H = f"(-1/2 + ({M}*r + {B}^2 - {A}*{B}*(1 - {s}/2)/{D})/(r^2 + {N}^2/{D}^2))"
    co = lift_general(cr, P=1, W=W, H=H, mu_scale=f"sqrt{P2}", name="kerr family")

    def levi(p):
        q = _zabs2(p)
        return ((a + b) * q - 2 * (a - b)) / (1 + q / 2) ** 3

    return Scenario(
        "kerr_family", {"m": m, "a": a, "b": b}, co, cr,
        ((-1, 1), (-1.5, 1.5), (-1.5, 1.5), (0.5, 4.0)),
        expected=_COMMON + (Expectation("ricci_blocks", 1e-6), Expectation("goldberg_sachs", 1e-7),
                            Expectation("levi", 1e-10), Expectation("shearfree", 1e-9)),
        exclude=lambda p: _zabs2(p) < 0.04,
        closed_forms={"levi": levi},
        extras={"P2": P2, "W": W, "H": H},
    )


def robinson_maxwell() -> Scenario:
    """Minkowski space over the Robinson CR structure, with the null field F = f λ∧μ, f = u - i|z|²."""
    cr = robinson_cr()
    co = lift_general(cr, P=1, mu_scale="sqrt(r^2 + 1)", name="robinson minkowski")
    return Scenario(
        "robinson_maxwell", {}, co, cr, ((-1, 1), (-1, 1), (-1, 1), (-2, 2)),
        expected=_COMMON + (Expectation("ricci_blocks", 1e-10), Expectation("weyl_scalars", 1e-10),
                            Expectation("maxwell", 1e-10), Expectation("levi", 1e-12),
                            Expectation("shearfree", 1e-10)),
        closed_forms={"psi": lambda p: np.zeros(5), "levi": lambda p: -2.0},
        extras={"maxwell_f": "u - i*(z_re^2 + z_im^2)", "maxwell_cr": cr.normalized(),
                "non_solution": "z_re - i*z_im"},
    )


def _epsilon_of(c_expr: str) -> float:
    """The real constant ε with c = ε z̄, probed at fixed points."""
    e = exprlang.parse(c_expr, CR_CHART)
    probes = [(0.3, 0.7, -0.2), (-1.1, -0.4, 0.9), (0.5, 1.3, 0.6), (2.0, -0.8, -1.7)]
    eps = []
    for u, x, y in probes:
        env = {"u": complex(u), "z_re": complex(x), "z_im": complex(y)}
        eps.append(complex(exprlang.evaluate(e, env)) / complex(x, -y))
    eps = np.array(eps)
    if np.abs(eps - eps[0]).max() > 1e-10 * max(1.0, abs(eps[0])) or abs(eps[0].imag) > 1e-12:
        raise CatalogError(f"fefferman_of supports c = ε·conj(z) with real ε; got {c_expr!r}")
    return float(eps[0].real)


def fefferman_cr(eps: float) -> CRStructure:
    """Normalized CR structure with c = ε z̄: λ = du + αdz + ᾱdz̄, μ = dz,
    α = -εz̄u + iγ z̄, γ = (1 - exp(εs))/(2εs), s = |z|² (Heisenberg for ε = 0)."""
    if eps == 0.0:
        return heisenberg_cr()
    E = _num(eps)
    s = "(z_re^2 + z_im^2)"
    g = f"((1 - exp({E}*{s}))/(2*{E}*{s}))"
    alpha = f"(-{E}*(z_re - i*z_im)*u + i*{g}*(z_re - i*z_im))"
    return CRStructure.from_expressions(CR_CHART, ["1", f"2*re{alpha}", f"-2*im{alpha}"], MU_DZ,
                                        name=f"c = {eps!r} conj(z)")


def fefferman_of(c: str = "0") -> Scenario:
    eps = _epsilon_of(c)
    if abs(eps) > 2.0:
        raise CatalogError(f"fefferman_of: |ε| = {abs(eps)} outside [0, 2]")
    cr = fefferman_cr(eps)
    co = lift_fefferman(cr, name="fefferman lift")
    label = "ZERO" if eps == 0.0 else "N"
    psi = (lambda p: np.zeros(5)) if eps == 0.0 else (lambda p: np.array([0, 0, 0, 0, np.nan]))
    return Scenario(
        "fefferman_of", {"c": c}, co, cr, ((-1, 1), (-1, 1), (-1, 1), (-2, 2)),
        expected=_COMMON + (Expectation("weyl_scalars", 1e-7), Expectation("classify", 0.5),
                            Expectation("levi", 1e-10), Expectation("shearfree", 1e-10),
                            Expectation("cartan_covanishing", 0.5)),
        exclude=(lambda p: _zabs2(p) < 0.0625) if eps else None,
        closed_forms={"psi": psi, "levi": lambda p: 1.0,
                      "c": lambda p: eps * complex(p[1], -p[2]),
                      "cartan": lambda p: 2 * eps ** 3 * complex(p[1], -p[2]) ** 2},
        extras={"petrov": label, "epsilon": eps},
    )


def taubnut_like(M: float = 1.0) -> Scenario:
    """Reduced lift over Heisenberg with p = 1, s = t = 0, m = iM, Λ = 0."""
    if not np.isfinite(M) or abs(M) > KERR_LIMIT:
        raise CatalogError(f"taubnut_like: M={M} outside [-{KERR_LIMIT}, {KERR_LIMIT}]")
    cr = heisenberg_cr()
    params = LiftParameters(p=1.0, s=0.0, t=0.0, m=1j * M, Lambda=0.0)
    co = lift_reduced(cr, params, name="taub-nut-like lift")

    def psi(p):
        return np.array([0, 0, 0.5j * M * (1 + np.exp(1j * p[3])) ** 3, 0, 0])

    return Scenario(
        "taubnut_like", {"M": M}, co, cr, ((-1, 1), (-1, 1), (-1, 1), (-R_MAX, R_MAX)),
        expected=_COMMON + (Expectation("ricci_blocks", 1e-6), Expectation("weyl_scalars", 1e-8),
                            Expectation("classify", 0.5), Expectation("shearfree", 1e-10),
                            Expectation("periodicity", 1e-12)),
        exclude=lambda p: abs(p[3]) > R_MAX,
        closed_forms={"psi": psi, "levi": lambda p: 1.0},
        extras={"petrov": "II_OR_D" if M else "ZERO", "lift_parameters": params},
    )


SCENARIOS = {
    "minkowski": (minkowski, {}),
    "heisenberg": (heisenberg, {}),
    "kerr_family": (kerr_family, {"m": 1.0, "a": 0.0, "b": 0.0}),
    "robinson_maxwell": (robinson_maxwell, {}),
    "fefferman_of": (fefferman_of, {"c": "0"}),
    "taubnut_like": (taubnut_like, {"M": 1.0}),
}


def catalog_list() -> list:
    """(name, default parameters) for every built-in scenario."""
    return [(name, dict(defaults)) for name, (_, defaults) in SCENARIOS.items()]


def catalog_get(name: str, **params) -> Scenario:
    if name not in SCENARIOS:
        raise CatalogError(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}")
    factory, defaults = SCENARIOS[name]
    unknown = set(params) - set(defaults)
    if unknown:
        raise CatalogError(f"scenario {name} has no parameter(s) {sorted(unknown)}")
    return factory(**{**defaults, **params})


__all__ = [
    "CatalogError", "Expectation", "Scenario", "PointContext", "CHECKS", "run_check", "missing_requirement",
    "catalog_get", "catalog_list", "heisenberg_cr", "robinson_cr", "fefferman_cr",
]
