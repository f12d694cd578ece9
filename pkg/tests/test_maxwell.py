import numpy as np
import pytest
from conftest import random_coframe

from nullframe.catalog import catalog_get, heisenberg_cr, robinson_cr
from nullframe.crstruct import CRLocal
from nullframe.forms import FormValue
from nullframe.jets import Jet
from nullframe.maxwell import hodge_star, hodge_star_frame, maxwell_check

PT = [0.3, 0.4, -0.5, 0.2]


def test_star_squares_to_minus_one():
    rng = np.random.default_rng(0)
    for _ in range(5):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        w = a - a.T
        assert np.abs(hodge_star_frame(hodge_star_frame(w)) + w).max() < 1e-12
    co = random_coframe(1)
    F = FormValue(2, Jet.constant(rng.normal(size=6) + 0j, 4, 0))
    assert np.abs(hodge_star(co, hodge_star(co, F, PT), PT).values() + F.values()).max() < 1e-10


def test_frame_null_form_is_anti_self_dual():
    w = np.zeros((4, 4), dtype=complex)
    w[2, 0], w[0, 2] = 1, -1  # θ³∧θ¹
    assert np.abs(hodge_star_frame(w) + 1j * w).max() < 1e-14


def test_robinson_null_field():
    scn = catalog_get("robinson_maxwell")
    cr, f = scn.extras["maxwell_cr"], scn.extras["maxwell_f"]
    rep = maxwell_check(cr, f, PT, scn.coframe)
    assert rep.dF_residual < 1e-10
    assert rep.nullness == 0
    assert rep.asd_residual < 1e-11
    bad = maxwell_check(cr, scn.extras["non_solution"], PT, scn.coframe)
    assert bad.dF_residual > 0.1


@pytest.mark.parametrize("f", ["exp(z_re + i*z_im)", "u^2 + z_re*sin(z_im)", "0"])
def test_dF_coefficient_is_conjugate_of_nbm(f):
    for cr in (heisenberg_cr(), robinson_cr().normalized()):
        rep = maxwell_check(cr, f, PT)
        assert rep.consistency < 1e-10


def test_derivative_of_cr_function_gives_solution():
    cr = heisenberg_cr()
    eta = "(u + 0.5*i*(z_re^2 + z_im^2))^2 + 0.3*(z_re + i*z_im)"

    def f(X):
        loc = CRLocal(cr, X)
        return loc.d0(loc.field(eta))

    f.depth = cr.depth + 1
    rep = maxwell_check(cr, f, PT[:3])
    assert rep.dF_residual < 1e-10 and abs(rep.nbm_residual) < 1e-10
