"""Analytic boundary-data fixtures with known closed-form answers.

Each generator returns a BoundaryData built from exact samples and exact
velocities, so quadrature errors are the only numerical noise in tests.

interior_line : Q = {(1 : t : 1 + a t), |t| < 1}, one positively oriented loop,
                delta = 1, no points at infinity, single sheet
                h(z) = -(x+1)/(y+a).
exterior_line : complementary piece {|t| > 1} plus its point at infinity;
                same circle with reversed orientation, delta = -1, q_inf = 1,
                zero sheets, G_1 = P_1 = (1+x)/(y+a).
two_line      : nodal union of z2 = 1 + a z1 and z2 = 1 + b z1 over |z1| = 1,
                delta = 2, two sheets -(x+1)/(y+a), -(x+1)/(y+b).
conic         : Q = {(1 : t : t^2), |t| < 1}, delta = 1, one sheet equal to
                the small root of t^2 + y t + x = 0.
"""

import numpy as np

from .geometry import BoundaryData, BoundaryLoop


def _theta(n):
    return np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)


def _loop_from_maps(n, wfun, dwfun):
    t = _theta(n)
    w = np.stack(wfun(t), axis=1)
    dw = np.stack(dwfun(t), axis=1)
    return BoundaryLoop(t, w, dw)


def interior_line(a=0.5, n=1024) -> BoundaryData:
    lp = _loop_from_maps(
        n,
        lambda t: (np.ones_like(t, dtype=complex), np.exp(1j * t), 1.0 + a * np.exp(1j * t)),
        lambda t: (np.zeros_like(t, dtype=complex), 1j * np.exp(1j * t), a * 1j * np.exp(1j * t)),
    )
    return BoundaryData([lp], [1])


def exterior_line(a=0.5, n=1024) -> BoundaryData:
    b = interior_line(a=a, n=n)
    return BoundaryData(b.loops, [-1])


def exterior_line_germ(a=0.5):
    """Taylor data of the exterior line's branch at {w0 = 0}.

    In the chart (u0, u1) = (w0/w2, w1/w2) the line w2 = w0 + a w1 reads
    u1 = (1 - u0)/a, so b = 1/a and g_1 = -1/a.
    """
    return complex(1.0 / a), [complex(-1.0 / a)]


def two_line(a=0.5, b=-1.0 / 3.0, n=1024) -> BoundaryData:
    loops = [
        _loop_from_maps(
            n,
            lambda t, c=c: (np.ones_like(t, dtype=complex), np.exp(1j * t), 1.0 + c * np.exp(1j * t)),
            lambda t, c=c: (np.zeros_like(t, dtype=complex), 1j * np.exp(1j * t), c * 1j * np.exp(1j * t)),
        )
        for c in (a, b)
    ]
    return BoundaryData(loops, [1, 1])


def conic(n=1024) -> BoundaryData:
    lp = _loop_from_maps(
        n,
        lambda t: (np.ones_like(t, dtype=complex), np.exp(1j * t), np.exp(2j * t)),
        lambda t: (np.zeros_like(t, dtype=complex), 1j * np.exp(1j * t), 2j * np.exp(2j * t)),
    )
    return BoundaryData([lp], [1])


def conic_small_root(x, y):
    """Root of t^2 + y t + x that lies inside the unit disc for z in Z."""
    r = np.sqrt(y * y - 4.0 * x + 0j)
    t1 = (-y + r) / 2.0
    t2 = (-y - r) / 2.0
    return np.where(np.abs(t1) < np.abs(t2), t1, t2)


ORACLES = {
    "interior-line": interior_line,
    "exterior-line": exterior_line,
    "two-line": two_line,
    "conic": conic,
}
