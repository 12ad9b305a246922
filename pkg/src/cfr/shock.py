"""Shock-wave verification and the operator calculus (J, H, P, D, E, s_k).

All operator algebra runs on BiSeries values: truncated sums

    sum_{n, m}  c[n, m] x^n y^(-m),   0 <= n <= nx,   mlo <= m <= mhi,

where negative m carries positive powers of y (used by the polynomial parts
(Y - omega)^k of the E-table).  The log-bearing term J never materializes:
the factor y^(-delta) of e^H is kept as an exact monomial, so no branch cut
enters the numerics and the cut direction tau is metadata only.

Each series tracks the m-range on which its coefficients are exact.  The
primitivization P and multiplications by positive y-powers move information
downward in m, so validity shrinks by a bounded amount per operator
application; `exact=True` marks series that are finite (polynomials), whose
validity never shrinks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import symmetric

RESIDUE_EPS = 1e-12


class ResidueObstruction(ValueError):
    """Primitivization hit a y^-1 term (would require the log term J)."""


class GridTooSmall(ValueError):
    """Finite-difference verification needs at least a 5x5 grid."""


class BInversionDiverged(ValueError):
    """Roots of B leave no 1/y-expansion margin at the anchor point omega."""


@dataclass
class BiSeries:
    """Truncated double series sum c[n, i] x^n y^-(mlo+i)."""

    c: np.ndarray
    mlo: int
    mhi: int
    omega: complex
    tau: complex = 1.0 + 0.0j
    exact: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=complex)
        assert self.c.shape[1] == self.mhi - self.mlo + 1

    @property
    def nx(self):
        return self.c.shape[0] - 1

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(nx, omega, tau=1.0):
        return BiSeries(np.zeros((nx + 1, 1), dtype=complex), 0, 0, omega, tau, exact=True)

    @staticmethod
    def from_x_poly(coeffs, nx, omega, tau=1.0):
        """Embed an x-polynomial as a y-independent series (f ⊗ 1)."""
        c = np.zeros((nx + 1, 1), dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        c[: min(len(coeffs), nx + 1), 0] = coeffs[: nx + 1]
        return BiSeries(c, 0, 0, omega, tau, exact=True)

    @staticmethod
    def from_y_poly(coeffs, nx, omega, tau=1.0):
        """Embed a y-polynomial sum b_j y^j: exponent j sits at m = -j."""
        coeffs = np.asarray(coeffs, dtype=complex)
        deg = len(coeffs) - 1
        c = np.zeros((nx + 1, deg + 1), dtype=complex)
        c[0, :] = coeffs[::-1]  # m = -deg .. 0 maps to y^deg .. y^0
        return BiSeries(c, -deg, 0, omega, tau, exact=True)

    # -- bookkeeping -----------------------------------------------------

    def coeff(self, n, m):
        if n < 0 or n > self.nx or m < self.mlo or m > self.mhi:
            return 0.0 + 0.0j
        return self.c[n, m - self.mlo]

    def x_poly(self, m):
        """x-Taylor vector of the coefficient of y^-m."""
        if m < self.mlo or m > self.mhi:
            return np.zeros(self.nx + 1, dtype=complex)
        return self.c[:, m - self.mlo].copy()

    def _window(self, mlo, mhi):
        out = np.zeros((self.nx + 1, mhi - mlo + 1), dtype=complex)
        lo = max(mlo, self.mlo)
        hi = min(mhi, self.mhi)
        if hi >= lo:
            out[:, lo - mlo : hi - mlo + 1] = self.c[:, lo - self.mlo : hi - self.mlo + 1]
        return out

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if np.isscalar(other):
            other = BiSeries.from_x_poly([other], self.nx, self.omega, self.tau)
        mlo = min(self.mlo, other.mlo)
        if self.exact and other.exact:
            mhi, exact = max(self.mhi, other.mhi), True
        elif self.exact:
            mhi, exact = other.mhi, False
        elif other.exact:
            mhi, exact = self.mhi, False
        else:
            mhi, exact = min(self.mhi, other.mhi), False
        c = self._window(mlo, mhi) + other._window(mlo, mhi)
        return BiSeries(c, mlo, mhi, self.omega, self.tau, exact)

    def __sub__(self, other):
        if np.isscalar(other):
            other = BiSeries.from_x_poly([other], self.nx, self.omega, self.tau)
        return self + other.scale(-1.0)

    def scale(self, a):
        return replace(self, c=self.c * a)

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        a, b = self, other
        mlo = a.mlo + b.mlo
        if a.exact and b.exact:
            mhi, exact = a.mhi + b.mhi, True
        elif a.exact:
            mhi, exact = a.mlo + b.mhi, False
        elif b.exact:
            mhi, exact = b.mlo + a.mhi, False
        else:
            mhi, exact = min(a.mhi + b.mlo, b.mhi + a.mlo), False
        nx = a.nx
        c = np.zeros((nx + 1, mhi - mlo + 1), dtype=complex)
        for i in range(a.c.shape[1]):
            col_m = a.mlo + i
            for j in range(b.c.shape[1]):
                m = col_m + b.mlo + j
                if m > mhi:
                    break
                # x-convolution truncated at nx (exact for the kept orders)
                conv = _xconv(a.c[:, i], b.c[:, j], nx)
                c[:, m - mlo] += conv
        return BiSeries(c, mlo, mhi, a.omega, a.tau, exact)

    def shift_y(self, j):
        """Multiply by y^j (exact index shift m -> m - j)."""
        return replace(self, mlo=self.mlo - j, mhi=self.mhi - j)

    # -- calculus ----------------------------------------------------------

    def dx(self):
        c = np.zeros_like(self.c)
        n = np.arange(1, self.nx + 1)
        c[:-1, :] = self.c[1:, :] * n[:, None]
        return replace(self, c=c)

    def dy(self):
        """d/dy: c x^n y^-m -> -m c x^n y^-(m+1)."""
        ms = np.arange(self.mlo, self.mhi + 1)
        return BiSeries(self.c * (-ms)[None, :], self.mlo + 1, self.mhi + 1,
                        self.omega, self.tau, self.exact)

    def primitivize(self):
        """Antiderivative in y vanishing at omega: c y^-m -> c (y^(1-m) - w^(1-m))/(1-m).

        A nonzero y^-1 coefficient is an obstruction (it would demand the
        multivalued J term) and raises ResidueObstruction.
        """
        if self.mlo <= 1 <= self.mhi:
            res = self.c[:, 1 - self.mlo]
            if np.max(np.abs(res)) > RESIDUE_EPS:
                raise ResidueObstruction(
                    f"y^-1 coefficient of size {np.max(np.abs(res)):.2e}"
                )
        mlo = min(self.mlo - 1, 0)
        mhi = max((self.mhi - 1) if self.exact else self.mhi - 1, 0)
        c = np.zeros((self.nx + 1, mhi - mlo + 1), dtype=complex)
        w = self.omega
        for m in range(self.mlo, self.mhi + 1):
            if m == 1:
                continue
            col = self.c[:, m - self.mlo] / (1.0 - m)
            c[:, (m - 1) - mlo] += col
            c[:, 0 - mlo] -= col * w ** (1 - m)
        return BiSeries(c, mlo, mhi, self.omega, self.tau, self.exact)

    def exp(self):
        """exp of a series with no y^0-or-lower content."""
        if self.mlo < 1 and np.max(np.abs(self._window(min(self.mlo, 0), 0))) > 0:
            raise ValueError("exp expects a pure 1/y tail (mlo >= 1)")
        if self.mhi < 1:
            return BiSeries.from_x_poly([1.0], self.nx, self.omega, self.tau)
        M = self.mhi
        nx = self.nx
        h = self._window(1, M)
        e = np.zeros((nx + 1, M + 1), dtype=complex)  # orders 0..M
        e[0, 0] = 1.0
        for m in range(1, M + 1):
            acc = np.zeros(nx + 1, dtype=complex)
            for j in range(1, m + 1):
                acc += j * _xconv(h[:, j - 1], e[:, m - j], nx)
            e[:, m] = acc / m
        return BiSeries(e, 0, M, self.omega, self.tau, exact=False)

    def invert_tail(self):
        """1/self for series of shape c0(x) + O(1/y) with c0(0) != 0."""
        if self.mlo != 0:
            raise ValueError("invert_tail expects leading order y^0")
        nx, M = self.nx, self.mhi
        a0 = self.c[:, 0]
        if abs(a0[0]) < 1e-13:
            raise ZeroDivisionError("leading x-coefficient vanishes")
        inv0 = _xinv(a0, nx)
        out = np.zeros((nx + 1, M + 1), dtype=complex)
        out[:, 0] = inv0
        for m in range(1, M + 1):
            acc = np.zeros(nx + 1, dtype=complex)
            for j in range(1, m + 1):
                if j <= self.mhi:
                    acc += _xconv(self.c[:, j], out[:, m - j], nx)
            out[:, m] = -_xconv(inv0, acc, nx)
        return BiSeries(out, 0, M, self.omega, self.tau, exact=False)

    # -- evaluation / io ---------------------------------------------------

    def __call__(self, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        tot = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        xp = np.polynomial.polynomial.polyval
        for i in range(self.c.shape[1]):
            m = self.mlo + i
            tot = tot + xp(x, self.c[:, i]) * y ** (-float(m))
        return tot if tot.shape else complex(tot)

    def dumps(self):
        """Debugging dump {"n,m": [re, im]} of the nonzero coefficients."""
        out = {}
        for n in range(self.nx + 1):
            for i in range(self.c.shape[1]):
                v = self.c[n, i]
                if v != 0:
                    out[f"{n},{self.mlo + i}"] = [float(v.real), float(v.imag)]
        return out


def _xconv(a, b, nx):
    out = np.zeros(nx + 1, dtype=complex)
    for i, ai in enumerate(a):
        if ai == 0 or i > nx:
            continue
        hi = min(nx - i, len(b) - 1)
        out[i : i + hi + 1] += ai * b[: hi + 1]
    return out


def _xinv(a, nx):
    out = np.zeros(nx + 1, dtype=complex)
    out[0] = 1.0 / a[0]
    for n in range(1, nx + 1):
        s = 0.0 + 0.0j
        for i in range(1, min(n, len(a) - 1) + 1):
            s += a[i] * out[n - i]
        out[n] = -s * out[0]
    return out


# -- H data -------------------------------------------------------------------


@dataclass
class HData:
    """delta plus the single-valued part H~ of H = -delta*J + H~."""

    delta: int
    Htilde: BiSeries
    omega: complex

    @property
    def dHx(self):
        return self.Htilde.dx()


@dataclass
class ExpH:
    """e^H = mono_coef * y^(-mono_pow) * series, with the monomial kept exact."""

    mono_coef: complex
    mono_pow: int
    series: BiSeries

    def __call__(self, x, y):
        return self.mono_coef * np.asarray(y, dtype=complex) ** (-float(self.mono_pow)) \
            * self.series(x, y)


def H_from_laurent(lt, delta: int, omega, tau=1.0) -> HData:
    """H~ = -sum_{m>=1} G'_{1,m+1}(x)/m * y^-m from a LaurentTable."""
    nx = max(lt.mmax + 1, 12)
    M = lt.mmax - 1
    if M < 1:
        return HData(delta, BiSeries.zero(nx, omega, tau), omega)
    c = np.zeros((nx + 1, M), dtype=complex)
    for m in range(1, M + 1):
        g = lt.poly_Gkm(1, m + 1)            # degree <= m+1
        dg = np.polynomial.polynomial.polyder(g)
        c[: len(dg), m - 1] = -dg / m
    return HData(delta, BiSeries(c, 1, M, omega, tau, exact=False), omega)


def exp_H(h: HData) -> ExpH:
    """e^H as (exact monomial omega^delta y^-delta) * exp(H~)."""
    return ExpH(h.omega ** h.delta, h.delta, h.Htilde.exp())


def exp_minus_H(h: HData) -> ExpH:
    return ExpH(h.omega ** (-h.delta), -h.delta, h.Htilde.scale(-1.0).exp())


def delta_from_expH(h: HData, x=0.0, radii=(1e2, 1e3, 1e4)) -> float:
    """Slope fit of ln|e^-H| against ln|y| over large radii; converges to delta.

    ln|e^-H| = delta ln|y| + const + O(1/y), so the fit basis includes the
    known first-order 1/y correction; the slope is then exact to O(1/y^2).
    """
    em = exp_minus_H(h)
    r = np.asarray(radii, dtype=float)
    logs = np.array([np.log(abs(em(x, ri))) for ri in r])
    A = np.stack([np.log(r), np.ones_like(r), 1.0 / r], axis=1)
    sol, *_ = np.linalg.lstsq(A, logs, rcond=None)
    return float(sol[0])


# -- operators ---------------------------------------------------------------


def primitivize(s: BiSeries) -> BiSeries:
    return s.primitivize()


def op_D(s: BiSeries, h: HData) -> BiSeries:
    """D = d/dx + (dH/dx)* ; note dH/dx = dH~/dx since J carries no x."""
    return s.dx() + s * h.dHx


def op_E(s: BiSeries, h: HData) -> BiSeries:
    """E = P . D."""
    return op_D(s, h).primitivize()


def E_decomposition(kmax: int, h: HData):
    """Triangular table E_{k,j}, 0 <= j <= k <= kmax.

    E_{k,k} = (Y-omega)^k / k!,  E_{k+1,0} = E^k P(dH/dx),
    E_{k+1,j} = P E_{k,j-1} + E E_{k,j}.
    """
    if kmax > 8:
        raise ValueError("E-table capped at kmax <= 8")
    nx, w, tau = h.Htilde.nx, h.omega, h.Htilde.tau
    tab = {(0, 0): BiSeries.from_x_poly([1.0], nx, w, tau)}
    for k in range(kmax):
        tab[(k + 1, k + 1)] = tab[(k, k)].primitivize()
        for j in range(1, k + 1):
            tab[(k + 1, j)] = tab[(k, j - 1)].primitivize() + op_E(tab[(k, j)], h)
        if k == 0:
            tab[(1, 0)] = h.dHx.primitivize()
        else:
            tab[(k + 1, 0)] = op_E(tab[(k, 0)], h)
    return tab


def iterate_E(f_coeffs, k: int, h: HData) -> BiSeries:
    """E^k applied to f ⊗ 1 by direct iteration (independent check route)."""
    s = BiSeries.from_x_poly(f_coeffs, h.Htilde.nx, h.omega, h.Htilde.tau)
    for _ in range(k):
        s = op_E(s, h)
    return s


def s_k_from_mu(mu, B, h: HData):
    """Shock-wave candidates s_k(mu, B) = e^H~ / ((Y/w)^delta B) * sum E^(j-k) mu_j.

    mu is a list of d x-Taylor vectors, B the ascending coefficients of a
    polynomial with B(0) = 1 and roots confined well inside |y| < |omega|/1.5.
    Returns the list [s_1 .. s_d].
    """
    d = len(mu)
    B = np.atleast_1d(np.asarray(B, dtype=complex))
    nx, w, tau = h.Htilde.nx, h.omega, h.Htilde.tau
    r = len(B) - 1
    if r > 0:
        rts = symmetric.roots(B[::-1])
        if 1.5 * float(np.max(np.abs(rts))) > abs(w):
            raise BInversionDiverged(
                "roots of B too close to the series anchor |omega|"
            )
    # 1/B as y^-r * (unit tail series)
    mcap = h.Htilde.mhi + 2
    unit = np.zeros((nx + 1, mcap + 1), dtype=complex)
    unit[0, : r + 1] = B[::-1]
    invB = BiSeries(unit, 0, mcap, w, tau, exact=False).invert_tail().shift_y(-r)

    eH = exp_H(h)
    pref = (eH.series * invB).shift_y(-eH.mono_pow).scale(eH.mono_coef)

    terms = [BiSeries.from_x_poly(mj, nx, w, tau) for mj in mu]
    out = []
    # E_k(mu) built backwards: acc_k = mu_k + E(acc_{k+1})
    acc = None
    eks = [None] * (d + 1)
    for k in range(d, 0, -1):
        acc = terms[k - 1] if acc is None else terms[k - 1] + op_E(acc, h)
        eks[k] = acc
    for k in range(1, d + 1):
        out.append(pref * eks[k])
    return out


# -- finite-difference verification -------------------------------------------


def _fd4(vals, h, axis):
    """4th-order centered first derivative along axis; edges are invalid."""
    v = np.moveaxis(vals, axis, 0)
    d = np.full_like(v, np.nan + 0j)
    d[2:-2] = (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * h)
    return np.moveaxis(d, 0, axis)


def shock_residual(values, hx: float, hy: float) -> float:
    """sup over interior nodes of |dh/dy - h dh/dx| on an axis-parallel grid."""
    values = np.asarray(values, dtype=complex)
    if values.shape[0] < 5 or values.shape[1] < 5:
        raise GridTooSmall("need at least 5 nodes per axis")
    hx_ = _fd4(values, hx, 0)
    hy_ = _fd4(values, hy, 1)
    res = hy_ - values * hx_
    core = res[2:-2, 2:-2]
    return float(np.max(np.abs(core)))


def system_residual(S, hx: float, hy: float) -> float:
    """Max residual of the symmetric-function system over the d equations.

    S is the list of grids [S_1 .. S_d]; with Sig_k = (-1)^k S_k the system is
    Sig_d dSig_1/dx + dSig_d/dy = 0 and
    Sig_k dSig_1/dx + dSig_k/dy = dSig_{k+1}/dx for k < d.
    """
    d = len(S)
    sig = [((-1) ** (k + 1)) * np.asarray(S[k], dtype=complex) for k in range(d)]
    if sig[0].shape[0] < 5 or sig[0].shape[1] < 5:
        raise GridTooSmall("need at least 5 nodes per axis")
    ds1x = _fd4(sig[0], hx, 0)
    worst = 0.0
    for k in range(1, d + 1):
        lhs = sig[k - 1] * ds1x + _fd4(sig[k - 1], hy, 1)
        rhs = _fd4(sig[k], hx, 0) if k < d else 0.0
        res = (lhs - rhs)[2:-2, 2:-2]
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def rational_tail(num, den, nx, omega, mhi, tau=1.0) -> BiSeries:
    """num(y)/den(y) expanded in powers of 1/y, valid to order y^-mhi."""
    num = np.atleast_1d(np.asarray(num, dtype=complex))
    den = np.atleast_1d(np.asarray(den, dtype=complex))
    r = len(den) - 1
    unit = np.zeros((nx + 1, mhi + r + 1), dtype=complex)
    unit[0, : r + 1] = den[::-1]
    inv = BiSeries(unit, 0, mhi + r, omega, tau, exact=False).invert_tail().shift_y(-r)
    return BiSeries.from_y_poly(num, nx, omega, tau) * inv


def eqsym1_residual(s_list, dNx=None):
    """Residual of the chain -s_k dN/dx + ds_k/dy = ds_{k+1}/dx (zero at k=d).

    dNx is the series of dN/dx with N = G_1 - P; by the equivalence behind the
    construction it equals dG_1/dx - B'/B (independent of A).  When omitted,
    N := -s_1 is used, which is only appropriate for fitted solutions where
    -s_1 reproduces G_1 - P.  The residual series is formed with exact series
    derivatives and measured by its largest coefficient on the range where
    every participating series is valid.
    """
    d = len(s_list)
    if dNx is None:
        dNx = s_list[0].dx().scale(-1.0)
    worst = 0.0
    for k in range(1, d + 1):
        sk = s_list[k - 1]
        term = sk.scale(-1.0) * dNx + sk.dy()
        if k < d:
            term = term - s_list[k].dx()
        worst = max(worst, float(np.max(np.abs(term.c))))
    return worst


def g1_biseries(lt, nx, omega, tau=1.0) -> BiSeries:
    """G_1 as a BiSeries, straight from a LaurentTable."""
    M = lt.mmax
    c = np.zeros((nx + 1, M + 1), dtype=complex)
    for m in range(M + 1):
        g = lt.poly_Gkm(1, m)
        c[: len(g), m] = g[: nx + 1]
    return BiSeries(c, 0, M, omega, tau, exact=False)
