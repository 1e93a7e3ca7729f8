import math
import warnings

import numpy as np
import pytest

from ctbands.errors import OddSize, OutsideRegime
from ctbands.lattice import assemble, check_ct_anticommutation
from ctbands.models import (
    BilayerSpec,
    RiceMeleSpec,
    band_gap,
    band_grid,
    bilayer_dispersion,
    bilayer_lattice,
    finite_difference_velocity,
    group_velocity,
    hyperboloid_params,
    hyperboloid_residual,
    rice_mele_dispersion,
    rice_mele_lattice,
    valley_analysis,
)
from ctbands.numerics import svd
from ctbands.spectra import solve

from oracles import bilayer_analytic, match_multisets, rice_mele_analytic

HALF_GAP_098 = 0.19899748742132392  # sqrt(1 - 0.98**2)


def tolerance_near_ep(gamma, gamma_c):
    # sqrt(eps0^2 - gamma^2) turns an O(1e-15) error in eps0 into O(1e-8) at the exceptional point
    return 1e-6 if math.isclose(gamma, gamma_c) else 1e-9


def test_rice_mele_wiring():
    q = rice_mele_lattice(RiceMeleSpec(4, 0.3)).coupling.real
    expected = np.array(
        [
            [0.7, 0.0, 0.0, 1.3],
            [1.3, 0.7, 0.0, 0.0],
            [0.0, 1.3, 0.7, 0.0],
            [0.0, 0.0, 1.3, 0.7],
        ]
    )
    np.testing.assert_allclose(q, expected)


def test_rice_mele_uniform_small_ring():
    s = svd(rice_mele_lattice(RiceMeleSpec(2, 0.0)).coupling).singular_values
    np.testing.assert_allclose(s, [2.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("n", [2, 5, 8, 17, 32])
@pytest.mark.parametrize("delta", [0.0, 0.3, -0.45])
def test_rice_mele_singular_values(n, delta):
    s = svd(rice_mele_lattice(RiceMeleSpec(n, delta)).coupling).singular_values
    eps0, _ = rice_mele_analytic(n, delta, 0.0)
    np.testing.assert_allclose(np.sort(s), np.sort(eps0), atol=1e-10)


@pytest.mark.parametrize("n", [4, 9, 32])
@pytest.mark.parametrize("gamma", [0.0, 0.45, 0.6, 1.3])
def test_rice_mele_oracle_equivalence(n, gamma):
    delta = 0.3
    rep = solve(assemble(rice_mele_lattice(RiceMeleSpec(n, delta)), gamma))
    _, analytic = rice_mele_analytic(n, delta, gamma)
    assert match_multisets(rep.eigenvalues(), analytic) <= tolerance_near_ep(gamma, 2 * delta)


def test_rice_mele_dispersion_values():
    assert rice_mele_dispersion(0.3, math.pi, 0.0) == pytest.approx((0.6, 0.6))
    eps0, eps = rice_mele_dispersion(0.3, math.pi, 0.6)
    assert abs(eps) < 1e-7
    assert rice_mele_dispersion(0.5, math.pi)[0] == pytest.approx(1.0)
    eps0, eps = rice_mele_dispersion(0.3, 0.0, 0.6)
    assert eps0 == 2.0
    assert eps == pytest.approx(1.9078784028338913)


def test_bilayer_small_parity_bookkeeping():
    lat = bilayer_lattice(BilayerSpec(2, 1.0, 5.0))
    assert 2 * lat.n == 8
    # each rung is one A-B bond of strength T plus J bonds doubled by wrap-around
    np.testing.assert_allclose(np.diag(lat.coupling.real), 5.0)
    for label_a, label_b in zip(lat.labels["A"], lat.labels["B"]):
        la, ja, _ = map(int, label_a.split(","))
        lb, jb, _ = map(int, label_b.split(","))
        assert la != lb and ja == jb


def test_bilayer_rejects_odd_size():
    with pytest.raises(OddSize):
        bilayer_lattice(BilayerSpec(3))
    with pytest.raises(OddSize):
        band_grid(BilayerSpec(5))


def test_bilayer_warns_outside_valley_regime():
    with pytest.warns(UserWarning):
        bilayer_lattice(BilayerSpec(4, 1.0, 3.0))


def test_bilayer_coupling_energies_match_fourier():
    spec = BilayerSpec(4, 1.0, 5.0)
    s = svd(bilayer_lattice(spec).coupling).singular_values
    eps0, _ = bilayer_analytic(4, 1.0, 5.0, 0.0)
    np.testing.assert_allclose(np.sort(s), np.sort(np.abs(eps0)), atol=1e-9)


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("gamma", [0.0, 0.5, 0.98, 1.0, 1.5])
def test_band_grid_matches_real_space(n, gamma):
    spec = BilayerSpec(n, 1.0, 5.0, gamma)
    rep = solve(assemble(bilayer_lattice(spec), gamma))
    grid = band_grid(spec)
    assert match_multisets(rep.eigenvalues(), grid.all_energies()) <= tolerance_near_ep(gamma, 1.0)
    assert match_multisets(grid.all_energies(), bilayer_analytic(n, 1.0, 5.0, gamma)[1]) <= 1e-12


def test_bilayer_dispersion_values():
    spec = BilayerSpec(4, 1.0, 5.0, 0.0)
    assert bilayer_dispersion(spec, 0.0, 0.0)[0] == 9.0
    assert bilayer_dispersion(spec, math.pi, math.pi)[0] == pytest.approx(1.0)
    eps0, eps = bilayer_dispersion(spec.with_gamma(1.0), math.pi, math.pi)
    assert abs(eps) < 1e-7
    eps0, eps = bilayer_dispersion(spec.with_gamma(0.5), 0.3, 1.1, -1)
    assert eps0 < 0 and eps.real < 0


def test_band_grid_minimum():
    grid = band_grid(BilayerSpec(4, 1.0, 5.0, 0.0))
    assert grid.positive_energies().real.min() == pytest.approx(1.0, abs=1e-12)
    grid = band_grid(BilayerSpec(64, 1.0, 5.0, 0.98))
    assert grid.positive_energies().real.min() == pytest.approx(HALF_GAP_098, abs=1e-9)
    grid = band_grid(BilayerSpec(64, 1.0, 5.0, 1.0))
    half = 64 // 2 - 1
    assert grid.energies[0, half, half] == 0


def test_band_grid_pointwise_pairing_and_symmetry():
    grid = band_grid(BilayerSpec(8, 1.0, 5.0, 1.7))
    e = grid.energies
    np.testing.assert_array_equal(e[1], -e[0])
    plus = e[0]
    np.testing.assert_allclose(plus, plus.T, atol=1e-14)
    # k -> -k maps n to N - n on the 1..N grid
    flipped = np.roll(plus[::-1, :], -1, axis=0)
    np.testing.assert_allclose(plus, flipped, atol=1e-14)
    for z in plus.ravel():
        assert z.imag == 0 or z.real == 0


def test_band_grid_rows():
    grid = band_grid(BilayerSpec(4, 1.0, 5.0, 0.5))
    rows = list(grid.rows())
    assert len(rows) == 16 and {r[2] for r in rows} == {"+"}
    assert len(list(grid.rows(full=True))) == 32
    assert rows[0][:2] == (pytest.approx(math.pi / 2), pytest.approx(math.pi / 2))


def test_valley_analysis_values():
    va = valley_analysis(BilayerSpec(64, 1.0, 5.0, 0.98))
    assert va.gamma_c == 1.0
    assert va.gap == pytest.approx(0.39799497484264784)
    a, b, c = va.hyperboloid
    assert c == pytest.approx(HALF_GAP_098)
    assert a == b == pytest.approx(0.14071247279470284)
    assert va.v_g == pytest.approx(math.sqrt(2))
    assert va.valley_points == [(math.pi, math.pi)]


def test_valley_analysis_limits():
    va = valley_analysis(BilayerSpec(8, 1.0, 5.0, 0.0))
    assert va.gap == 2.0 and va.hyperboloid[2] == va.gamma_c
    va = valley_analysis(BilayerSpec(8, 1.0, 5.0, 1.2))
    assert va.hyperboloid is None and va.v_g is None and va.gap == 0.0
    with pytest.raises(OutsideRegime):
        hyperboloid_params(BilayerSpec(8, 1.0, 5.0, 1.2))
    with pytest.raises(OutsideRegime):
        group_velocity(BilayerSpec(8, 1.0, 5.0, 1.2))
    with pytest.raises(OutsideRegime):
        valley_analysis(BilayerSpec(8, 1.0, 4.0, 0.0))
    for t in (5.0, 6.5, 9.0):
        spec = BilayerSpec(8, 1.0, t, 0.0)
        assert group_velocity(spec) == pytest.approx(math.sqrt(2 * (t - 4)))
        assert band_gap(spec) == pytest.approx(2 * (t - 4))


def test_hyperboloid_fit_near_valley():
    spec = BilayerSpec(64, 1.0, 5.0, 0.98)
    grid = band_grid(spec)
    kx, ky = np.meshgrid(grid.k, grid.k, indexing="ij")
    near = np.hypot(kx - math.pi, ky - math.pi) <= 0.15
    assert np.count_nonzero(near) == 9
    res = hyperboloid_residual(spec, kx[near], ky[near], grid.energies[0][near])
    assert res.max() <= 0.03


@pytest.mark.parametrize("dk", [0.02, 0.01, 0.001])
def test_group_velocity_finite_difference(dk):
    spec = BilayerSpec(64, 1.0, 5.0, 1.0)
    fd = finite_difference_velocity(spec, dk)
    assert fd == pytest.approx(group_velocity(spec), rel=0.02)


def test_ct_exact_for_builders():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lats = [
            rice_mele_lattice(RiceMeleSpec(7, 0.3)),
            rice_mele_lattice(RiceMeleSpec(3, 1.4)),
            bilayer_lattice(BilayerSpec(4, 1.0, 5.0)),
            bilayer_lattice(BilayerSpec(6, 0.7, 2.0)),
        ]
    for lat in lats:
        for gamma in (0.0, 0.5, 1.5, -3.0):
            assert check_ct_anticommutation(assemble(lat, gamma)) == 0.0
