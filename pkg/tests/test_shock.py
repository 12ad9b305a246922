import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from cfr import indicators, shock
from cfr.shock import (BInversionDiverged, BiSeries, E_decomposition, GridTooSmall,
                       HData, H_from_laurent, ResidueObstruction, delta_from_expH,
                       eqsym1_residual, exp_H, exp_minus_H, g1_biseries, iterate_E,
                       op_E, primitivize, rational_tail, s_k_from_mu, shock_residual,
                       system_residual)

W = -3.0


def grid_eval(fn, x0, y0, hx, hy, n=9):
    xs = x0 + (np.arange(n) - n // 2) * hx
    ys = y0 + (np.arange(n) - n // 2) * hy
    return np.array([[fn(x, y) for y in ys] for x in xs])


# -- plain BiSeries calculus -----------------------------------------------------


def test_biseries_mul_and_eval():
    a = BiSeries.from_x_poly([1.0, 2.0], 8, W)        # 1 + 2x
    b = BiSeries.from_y_poly([0.0, 1.0], 8, W)        # y
    c = a * b
    assert abs(c(0.5, 3.0) - (1 + 1.0) * 3.0) < 1e-14
    d = c.shift_y(-2)                                  # multiply by y^-2
    assert abs(d(0.5, 3.0) - 2.0 / 3.0) < 1e-14


def test_primitivize_calculus():
    s = BiSeries(np.array([[1.0]], dtype=complex), 2, 2, W)    # y^-2
    p = primitivize(s)
    # -y^-1 + 1/omega
    assert abs(p(0.0, 5.0) - (-1.0 / 5.0 + 1.0 / W * (-1) * (-1))) < 1e-14
    assert abs(p(0.0, W)) < 1e-14
    one = BiSeries.from_x_poly([1.0], 4, W)
    q = primitivize(one)                                        # Y - omega
    assert abs(q(0.0, 5.0) - (5.0 - W)) < 1e-14
    bad = BiSeries(np.array([[1.0]], dtype=complex), 1, 1, W)   # y^-1
    with pytest.raises(ResidueObstruction):
        primitivize(bad)


def test_primitivize_inverts_dy():
    rng = np.random.default_rng(3)
    c = rng.standard_normal((5, 6)) + 1j * rng.standard_normal((5, 6))
    s = BiSeries(c, 2, 7, W)  # no y^0, no y^-1 content
    back = primitivize(s.dy())
    lo, hi = s.mlo, s.mhi
    diff = back._window(lo, hi) - s._window(lo, hi)
    assert np.max(np.abs(diff)) < 1e-12
    # P picks the primitive vanishing at omega: back = s - s(., omega)
    assert abs(back(0.3, 5.0) - (s(0.3, 5.0) - s(0.3, W))) < 1e-12
    assert abs(back(0.3, W)) < 1e-12


def test_exp_identity():
    rng = np.random.default_rng(5)
    c = rng.standard_normal((4, 6)) * 0.3
    h = BiSeries(c, 1, 6, W)
    e = h.exp()
    em = h.scale(-1.0).exp()
    prod = e * em
    pc = prod.c.copy()
    pc[0, -prod.mlo] -= 1.0
    assert np.max(np.abs(pc)) < 1e-10


# -- H data on the interior-line oracle -------------------------------------------


def test_H_coefficients(interior_h):
    # H~ = ln y - ln(y + 1/2): coefficients (-1)^m/(m 2^m)
    for m in range(1, 6):
        assert abs(interior_h.Htilde.coeff(0, m) - (-1) ** m / (m * 2 ** m)) < 1e-9
    assert np.max(np.abs(interior_h.Htilde.c[1:, :])) < 1e-9  # no x dependence


def test_zero_tail_H():
    lt_zero = type("T", (), {"mmax": 1, "poly_Gkm": lambda self, k, m: np.zeros(2)})()
    h = H_from_laurent(lt_zero, 0, W)
    e = exp_H(h)
    assert e.mono_pow == 0
    assert abs(e.series(0.2, 4.0) - 1.0) < 1e-14


def test_dH_dy_equals_dG1_dx(interior, interior_h):
    """Identity dH/dy = dG_1/dx on circles |y| in {2 rho, 3 rho}."""
    from cfr.geometry import LineParam
    dhtdy = interior_h.Htilde.dy()
    for R in (3.0, 4.5):
        for a in np.linspace(0, 2 * np.pi, 8, endpoint=False):
            y = R * np.exp(1j * a)
            x = 0.2
            lhs = dhtdy(x, y) - interior_h.delta / y
            h = 1e-4
            rhs = (indicators.G_k(interior, LineParam(x + h, y), 1)
                   - indicators.G_k(interior, LineParam(x - h, y), 1)) / (2 * h)
            assert abs(lhs - rhs) < 1e-7


def test_exp_H_line(interior_h):
    # e^H = omega/(y + 1/2)
    eh = exp_H(interior_h)
    for y in (5.0, -4.0 + 2.0j):
        val = eh.mono_coef * y ** (-float(eh.mono_pow)) * eh.series(0.0, y)
        assert abs(val - W / (y + 0.5)) < 1e-9


def test_delta_slope_fit(interior_h):
    assert abs(delta_from_expH(interior_h) - 1.0) < 1e-3


def test_op_E_single_term():
    # H~ with single term a x / y^2: E(1) = P(a/y^2) = -a/y + a/omega
    a = 0.7
    c = np.zeros((4, 2), dtype=complex)
    c[1, 1] = a
    h = HData(0, BiSeries(c, 1, 2, W), W)
    e1 = op_E(BiSeries.from_x_poly([1.0], 3, W), h)
    y = 6.0
    assert abs(e1(0.0, y) - (-a / y + a / W)) < 1e-14
    zero = op_E(BiSeries.zero(3, W), h)
    assert np.max(np.abs(zero.c)) == 0


def test_E_table_structure(interior_h):
    tab = E_decomposition(4, interior_h)
    # E_{2,2} = (Y - omega)^2/2
    e22 = tab[(2, 2)]
    for y in (4.0, -5.0 + 1.0j):
        assert abs(e22(0.3, y) - (y - W) ** 2 / 2.0) < 1e-12
    # E_{1,0} = P(dH/dx)
    e10 = tab[(1, 0)]
    direct = interior_h.dHx.primitivize()
    lo, hi = max(e10.mlo, direct.mlo), min(e10.mhi, direct.mhi)
    assert np.max(np.abs((e10 - direct)._window(lo, hi))) < 1e-14
    with pytest.raises(ValueError):
        E_decomposition(9, interior_h)


def test_operator_identity_Ek(interior_h):
    """E^k(f x 1) = sum_j f^(j) E_{k,j} for f = x^3 + 2x, k = 1..4."""
    f = np.array([0.0, 2.0, 0.0, 1.0])
    tab = E_decomposition(4, interior_h)
    for k in range(1, 5):
        lhs = iterate_E(f, k, interior_h)
        rhs = None
        fj = f.copy()
        for j in range(k + 1):
            t = tab[(k, j)] * BiSeries.from_x_poly(fj, interior_h.Htilde.nx, W)
            rhs = t if rhs is None else rhs + t
            fj = P.polyder(fj)
        lo, hi = max(lhs.mlo, rhs.mlo), min(lhs.mhi, rhs.mhi)
        assert np.max(np.abs((lhs - rhs)._window(lo, hi))) < 1e-9


def test_tau_independence(interior_lt):
    """With the anchor omega fixed, the cut direction never enters the numbers."""
    h1 = H_from_laurent(interior_lt, interior_lt.delta, W, tau=1.0)
    h2 = H_from_laurent(interior_lt, interior_lt.delta, W, tau=1.0j)
    mu = [np.array([0.4, -0.2, 0.1])]
    s1 = s_k_from_mu(mu, [1.0], h1)
    s2 = s_k_from_mu(mu, [1.0], h2)
    assert np.max(np.abs(s1[0].c - s2[0].c)) < 1e-9


def test_s_k_from_mu_line_closure(interior_h, interior_lt):
    """mu_1 = (x+1)/omega reproduces -s_1 = G_1 on the interior-line oracle."""
    s = s_k_from_mu([np.array([1.0, 1.0]) / W], [1.0], interior_h)
    for (x, y) in [(0.25, 5.0), (-0.3, -4.0 + 1.0j)]:
        assert abs(-s[0](x, y) - (-(x + 1) / (y + 0.5))) < 1e-9
    g1 = g1_biseries(interior_lt, interior_h.Htilde.nx, W)
    assert eqsym1_residual(s, g1.dx()) < 1e-8


def test_s_k_zero_mu(interior_h):
    s = s_k_from_mu([np.zeros(3), np.zeros(3)], [1.0, 0.5], interior_h)
    assert all(np.max(np.abs(t.c)) == 0 for t in s)


def test_s_k_random_mu_chain(interior_lt, rng):
    """(s_1, s_2) from random mu satisfies the chain of Prop-style equations
    with dN/dx = dG_1/dx - B'/B (the A-free closure of the construction)."""
    W2 = -4.5
    h = H_from_laurent(interior_lt, interior_lt.delta, W2)
    nx = h.Htilde.nx
    B = np.array([1.0, 0.5])
    g1 = g1_biseries(interior_lt, nx, W2)
    dNx = g1.dx() - rational_tail(P.polyder(B), B, nx, W2, interior_lt.mmax + 2)
    mu = [rng.standard_normal(5) + 1j * rng.standard_normal(5) for _ in range(2)]
    s = s_k_from_mu(mu, B, h)
    assert eqsym1_residual(s, dNx) < 1e-8
    # sensitivity: perturbing s_2 must be detected
    pert = [s[0], s[1] + BiSeries.from_x_poly([1e-3], nx, W2)]
    assert eqsym1_residual(pert, dNx) > 1e-4


def test_systMu_reproduces_inputs(interior_lt, rng):
    """(1 x B) s_k = (sum E^{j-k} mu_j) e^H termwise within validity."""
    W2 = -4.5
    h = H_from_laurent(interior_lt, interior_lt.delta, W2)
    B = np.array([1.0, 0.8])
    mu = [rng.standard_normal(4) for _ in range(2)]
    s = s_k_from_mu(mu, B, h)
    eh = exp_H(h)
    tab_mu = [BiSeries.from_x_poly(m, h.Htilde.nx, W2) for m in mu]
    for k in (1, 2):
        acc = tab_mu[k - 1]
        if k == 1:
            acc = acc + op_E(tab_mu[1], h)
        rhs = (eh.series * acc).shift_y(-eh.mono_pow).scale(eh.mono_coef)
        lhs = s[k - 1] * BiSeries.from_y_poly(B, h.Htilde.nx, W2)
        lo, hi = max(lhs.mlo, rhs.mlo), min(lhs.mhi, rhs.mhi)
        assert np.max(np.abs((lhs - rhs)._window(lo, hi))) < 1e-9


def test_B_inversion_guard(interior_h):
    with pytest.raises(BInversionDiverged):
        s_k_from_mu([np.ones(2)], [1.0, 0.4], interior_h)  # root -2.5, |omega|=3


# -- finite-difference residuals ---------------------------------------------------


def test_shock_residual_line_wave():
    h = lambda x, y: -(x + 1.0) / (y + 0.5)
    vals = grid_eval(h, 0.0, 10.0, 0.05, 0.05)
    assert shock_residual(vals, 0.05, 0.05) < 1e-8


def test_shock_residual_constant():
    vals = np.full((9, 9), 0.7 + 0.2j)
    assert shock_residual(vals, 0.1, 0.1) < 1e-14


def test_shock_residual_not_a_wave():
    vals = grid_eval(lambda x, y: x, 0.0, 10.0, 0.2, 0.2)
    # residual |h_y - h h_x| = |x|, maximized over interior nodes
    assert shock_residual(vals, 0.2, 0.2) > 0.1


def test_grid_too_small():
    with pytest.raises(GridTooSmall):
        shock_residual(np.zeros((4, 6), dtype=complex), 0.1, 0.1)


def test_system_residual_two_line():
    ha = lambda x, y: -(x + 1.0) / (y + 0.5)
    hb = lambda x, y: -(x + 1.0) / (y - 1.0 / 3.0)
    S1 = grid_eval(lambda x, y: ha(x, y) + hb(x, y), 0.0, 10.0, 0.05, 0.05)
    S2 = grid_eval(lambda x, y: ha(x, y) * hb(x, y), 0.0, 10.0, 0.05, 0.05)
    assert system_residual([S1, S2], 0.05, 0.05) < 1e-7
    # perturbation of Sigma_2 by 1e-3 must show up above 1e-4
    assert system_residual([S1, S2 + 1e-3], 0.05, 0.05) > 1e-4


def test_biseries_dumps():
    s = BiSeries.from_x_poly([1.0, 0.0, 2.0], 4, W)
    d = s.dumps()
    assert d["0,0"] == [1.0, 0.0] and d["2,0"] == [2.0, 0.0]
