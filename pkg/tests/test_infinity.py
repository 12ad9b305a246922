import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from cfr import indicators, infinity, oracles
from cfr.geometry import LineParam
from cfr.infinity import (B_infinity, GermAtInfinity, P1, Pk_family, Pk_residue,
                          ResonantY, check_confinement)


@pytest.fixture(scope="module")
def line_germ():
    b, tay = oracles.exterior_line_germ()
    return GermAtInfinity(b, tay + [0.0] * 5)


def test_B_infinity():
    assert np.allclose(B_infinity([GermAtInfinity(2.0, [])]), [1, 2])
    assert np.allclose(B_infinity([]), [1])
    two = B_infinity([GermAtInfinity(2.0, []), GermAtInfinity(-1.0, [])])
    assert np.allclose(two, [1, 1, -2])


def test_P1_line_germ(line_germ):
    p1 = P1([line_germ])
    for y in (10.0, -4.0, 3.0 + 2.0j):
        assert abs(p1.coeffs[1](y) - 1.0 / (y + 0.5)) < 1e-12
        assert abs(p1.coeffs[0](y) - 1.0 / (y + 0.5)) < 1e-12


def test_P1_no_germs():
    p1 = P1([])
    assert abs(p1(0.3, 5.0)) == 0


def test_P1_two_germs():
    germs = [GermAtInfinity(2.0, [0.0]), GermAtInfinity(3.0, [0.0])]
    p1 = P1(germs)
    y = 5.0
    assert abs(p1.coeffs[0](y)) < 1e-14
    assert abs(p1.coeffs[1](y) - (2 / (1 + 2 * y) + 3 / (1 + 3 * y))) < 1e-13


def test_Pk_residue_basics(line_germ):
    z = LineParam(0.0, 10.0)
    assert Pk_residue(line_germ, 0, z) == -1.0
    assert abs(Pk_residue(line_germ, 1, z) - 2.0 / 21.0) < 1e-14
    with pytest.raises(ResonantY):
        Pk_residue(line_germ, 1, LineParam(0.0, -0.5))


def test_Pk_residue_vs_family(line_germ):
    fam = Pk_family([line_germ], 4)
    for k in (1, 2, 3, 4):
        for z in (LineParam(0.2, 10.0), LineParam(-0.3, -7.0 + 2.0j)):
            assert abs(Pk_residue(line_germ, k, z) - fam[k](z.x, z.y)) < 1e-10


def test_Pk_family_no_germs():
    fam = Pk_family([], 3)
    assert abs(fam[0](0.1, 3.0)) == 0
    for k in (1, 2, 3):
        assert abs(fam[k](0.1, 3.0)) == 0


def test_exterior_G_matches_P(exterior, line_germ):
    """Quadrature route equals germ route on a 5x5 grid (p = 0 sheets)."""
    fam = Pk_family([line_germ], 2)
    for a in np.linspace(0, 2 * np.pi, 5, endpoint=False):
        y = 5.0 * np.exp(1j * a)
        for f in np.linspace(-0.4, 0.4, 5):
            z = LineParam(f, y)
            for k in (1, 2):
                g = indicators.G_k(exterior, z, k)
                assert abs(g - fam[k](z.x, z.y)) < 1e-10


def test_p22_is_p11_derivative():
    germ = GermAtInfinity(2.0, [0.0, 0.0])
    fam = Pk_family([germ], 2)
    p11 = P1([germ]).coeffs[1]
    y = 3.3
    assert abs(fam[2].coeffs[2](y) - p11.deriv()(y)) < 1e-13


def test_mixed_partial_identity(line_germ):
    """dP_k/dY = (k/(k+1)) dP_{k+1}/dX at 20 random points with |y| > rho."""
    fam = Pk_family([line_germ], 5)
    rng = np.random.default_rng(7)
    for _ in range(20):
        x = rng.standard_normal() + 1j * rng.standard_normal()
        y = (2.0 + rng.uniform(0, 3)) * np.exp(2j * np.pi * rng.uniform())
        for k in (1, 2, 3, 4):
            lhs = fam[k].deriv_y()(x, y)
            rhs = fam[k + 1].deriv_x()(x, y) * k / (k + 1)
            assert abs(lhs - rhs) < 1e-8 * (1 + abs(lhs))


def test_family_matches_pointwise_residues(rng):
    germs = [GermAtInfinity(1.5 + 0.2j, [0.3, -0.1, 0.05, 0.0, 0.0]),
             GermAtInfinity(-0.8, [0.1j, 0.2, 0.0, 0.0, 0.0])]
    fam = Pk_family(germs, 4)
    for _ in range(5):
        x = rng.standard_normal() + 1j * rng.standard_normal()
        y = 6.0 * np.exp(2j * np.pi * rng.uniform())
        for k in range(5):
            direct = sum(Pk_residue(g, k, LineParam(x, y)) for g in germs)
            assert abs(direct - fam[k](x, y)) < 1e-8


def test_germ_depth_guard():
    g = GermAtInfinity(2.0, [1.0])
    with pytest.raises(ValueError):
        Pk_residue(g, 3, LineParam(0.0, 10.0))


def test_confinement():
    assert check_confinement(np.array([1.0, 2.0]), 1.5)        # root -1/2
    assert not check_confinement(np.array([1.0, 0.1]), 1.0)    # root -10
    assert check_confinement(np.array([1.0]), 0.3)             # no roots


def test_germs_from_json():
    germs = infinity.germs_from_json(
        {"germs": [{"b": [2.0, 0.0], "taylor": [[-2.0, 0.0]]}]}
    )
    assert germs[0].b == 2.0
    assert germs[0].taylor == [-2.0]
