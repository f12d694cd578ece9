import numpy as np
import pytest
from conftest import random_coframe

from nullframe.catalog import catalog_get
from nullframe.coframe import adapted_transform, optical_scalars
from nullframe.curvature import (
    coordinate_riemann_fd, curvature_identities, frame_riemann_from_coordinates, riemann_packet, ricci_blocks,
    weyl_scalars,
)

PT = [0.1, -0.2, 0.3, 0.25]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_identities_on_random_coframes(seed):
    pk = riemann_packet(random_coframe(seed), PT)
    ids = curvature_identities(pk)
    for key, val in ids.items():
        assert val < 1e-9 * pk.scale, key
    assert np.abs(pk.riemann).max() > 1e-2  # genuinely curved


@pytest.mark.parametrize("seed", [10, 11])
def test_frame_riemann_matches_coordinate_oracle(seed):
    co = random_coframe(seed)
    pk = riemann_packet(co, PT)
    R_fd = frame_riemann_from_coordinates(coordinate_riemann_fd(co.metric, PT, h=1e-2), co.values(PT))
    assert np.abs(pk.riemann - R_fd).max() < 1e-6 * pk.scale


def test_weyl_scalar_index_formulas():
    """Ψ1 = ½(R4341 + R1421), Ψ3 = ½(R3432 + R2312) (one-based labels) hold for any metric."""
    pk = riemann_packet(random_coframe(4), PT)
    R = pk.riemann
    assert abs(pk.psi[0] - R[3, 0, 3, 0]) < 1e-12
    assert abs(pk.psi[1] - 0.5 * (R[3, 2, 3, 0] + R[0, 3, 1, 0])) < 1e-12
    assert abs(pk.psi[3] - 0.5 * (R[2, 3, 2, 1] + R[1, 2, 0, 1])) < 1e-12
    assert abs(pk.psi[4] - R[2, 1, 2, 1]) < 1e-12


def test_minkowski():
    pk = riemann_packet(catalog_get("minkowski").coframe, PT)
    assert np.abs(pk.riemann).max() == 0
    assert max(ricci_blocks(pk).values()) == 0
    assert np.all(pk.psi == 0)


def test_schwarzschild_is_ricci_flat_but_curved():
    scn = catalog_get("kerr_family", m=1.0, a=0.0, b=0.0)
    pt = [0.2, 0.4, -0.3, 2.0]
    pk = riemann_packet(scn.coframe, pt)
    assert np.abs(pk.riemann).max() > 0.1
    assert ricci_blocks(pk)["all"] < 1e-7
    assert abs(pk.psi[2] + 1.0 / 2.0 ** 3) < 1e-12  # Ψ2 = -m/r³
    assert abs(pk.ricci[3, 3].imag) < 1e-10  # R44 real


@pytest.mark.parametrize("c", ["0", "0.3*(z_re - i*z_im)"])
def test_fefferman_ricci_follows_raychaudhuri(c):
    """k = ∂_r is twisting, non-expanding and the metric is r-independent, so R44 = -2ρ² = Ω²/2."""
    scn = catalog_get("fefferman_of", c=c)
    pt = [0.1, 0.5, -0.4, 0.3]
    pk = riemann_packet(scn.coframe, pt)
    o = optical_scalars(scn.coframe, pt)
    assert abs(o.expansion) < 1e-12 and abs(o.Omega - 1) < 1e-12
    assert abs(pk.ricci[3, 3] + 2 * o.rho ** 2) < 1e-12
    assert abs(pk.ricci[3, 3] - 0.5) < 1e-12


def test_psi0_rescaling_under_constant_transform():
    """Ψ0 = C(k, m, k, m) with k = e4 → A e4 and m = e1 → e^{-iφ} e1; B (null rotation about k) drops out."""
    co = random_coframe(5)
    old = weyl_scalars(co, PT)
    assert abs(old[0]) > 1e-3
    for A, phi, B in [(1.3, 0.0, 0.0), (1.0, 0.6, 0.0), (1.0, 0.0, 0.2 - 0.1j), (1.3, 0.6, 0.2 - 0.1j)]:
        new = weyl_scalars(adapted_transform(co, A, phi, B), PT)
        assert abs(new[0] - A ** 2 * np.exp(-2j * phi) * old[0]) < 1e-9


def test_fd_oracle_on_flat_metric():
    R = coordinate_riemann_fd(lambda x: np.diag([-1.0, 1, 1, 1]), [0, 0, 0, 0])
    assert np.abs(R).max() < 1e-20
