import numpy as np
import pytest

from nullframe.catalog import CatalogError, catalog_get, catalog_list, run_check

CASES = [
    ("minkowski", {}),
    ("heisenberg", {}),
    ("kerr_family", {"m": 1.0, "a": 0.5, "b": 0.2}),
    ("kerr_family", {"m": 0.0, "a": 0.0, "b": 1.0}),
    ("robinson_maxwell", {}),
    ("fefferman_of", {"c": "0"}),
    ("fefferman_of", {"c": "0.3*(z_re - i*z_im)"}),
    ("taubnut_like", {"M": 1.0}),
]


def test_catalog_list_names():
    names = [n for n, _ in catalog_list()]
    assert len(names) == len(set(names))
    assert {"minkowski", "kerr_family", "heisenberg", "robinson_maxwell", "fefferman_of", "taubnut_like"} == set(names)


@pytest.mark.parametrize("name,params", CASES)
def test_expectations_hold(name, params):
    scn = catalog_get(name, **params)
    rng = np.random.default_rng(11)
    for pt in scn.sample(rng, 3):
        for exp in scn.expected:
            a, r = run_check(scn, exp.check, pt)
            worst = r if exp.relative else a
            assert worst < exp.tol, (exp.check, worst)


def test_samples_respect_domain_and_exclusions():
    scn = catalog_get("kerr_family", m=1.0, a=0.7, b=0.0)
    pts = scn.sample(np.random.default_rng(0), 50)
    assert pts.shape == (50, 4)
    lo, hi = np.array(scn.domain).T
    assert np.all((pts >= lo) & (pts <= hi))
    assert np.all(pts[:, 1] ** 2 + pts[:, 2] ** 2 >= 0.04)


def test_errors():
    with pytest.raises(CatalogError):
        catalog_get("kerr")
    with pytest.raises(CatalogError):
        catalog_get("kerr_family", mass=1.0)
    with pytest.raises(CatalogError):
        catalog_get("kerr_family", m=50.0)
    with pytest.raises(CatalogError):
        catalog_get("fefferman_of", c="z_re^2")
    with pytest.raises(CatalogError):
        catalog_get("fefferman_of", c="0.3*i*(z_re - i*z_im)")


def test_schwarzschild_is_levi_flat():
    scn = catalog_get("kerr_family", m=1.0, a=0.0, b=0.0)
    for pt in scn.sample(np.random.default_rng(1), 5):
        assert run_check(scn, "levi", pt)[0] < 1e-14
        assert abs(scn.closed_forms["levi"](pt)) == 0


def test_kerr_levi_changes_sign_across_critical_circle():
    scn = catalog_get("kerr_family", m=1.0, a=1.0, b=0.0)
    inside = scn.closed_forms["levi"]([0, 1.0, 0.9, 1])
    outside = scn.closed_forms["levi"]([0, 1.0, 1.1, 1])
    assert inside < 0 < outside


def test_taubnut_psi2():
    scn = catalog_get("taubnut_like", M=1.0)
    pt = [0.1, 0.2, 0.3, 0.8]
    want = 0.5j * (1 + np.exp(0.8j)) ** 3
    assert abs(scn.closed_forms["psi"](pt)[2] - want) < 1e-15
    assert run_check(scn, "weyl_scalars", pt)[1] < 1e-8
