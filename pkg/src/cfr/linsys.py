"""Assembly and least-squares solution of the differential systems (E0)/(E1)/(E2).

The unknown rational part of the indicator is R = A/B + X B'/B with
deg A < r = deg B and B(0) = 1; the shock data is carried by d = r + delta
unknown functions mu_j, represented as x-Taylor vectors of degree Dmu.  The
master equation behind (E0) is

    sum_{j} E^(j-1)(mu_j ⊗ 1) = [A + X B' - B G_1] e^(-H),

whose y-Laurent coefficients give one x-Taylor equation per order n.  Both
sides are linear in (mu, A, B) jointly, so one orthogonal least-squares
solve recovers everything; beta_0 = 1 is the normalization.

Rows are only assembled for Laurent orders on which every participating
series is exactly valid, so series truncation never perturbs the system; it
merely bounds the number of equations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P

from . import indicators, infinity, shock
from .shock import BiSeries, HData


class TruncationExceeded(ValueError):
    """Requested Laurent order is outside the validated range."""


class E2Degenerate(ValueError):
    """d^2 G_1 / dx^2 vanishes: system (E2) is unavailable."""


class RankDeficient(Warning):
    """Joint system had a nullspace; the smallest-norm solution was returned."""


def coeff_c0(j: int, m: int, n: int, etab) -> np.ndarray:
    """x-Taylor vector c_{j,m}^{0,n}: the coefficient of y^n in E_{j-1,m}."""
    s = etab[(j - 1, m)]
    if -n < s.mlo:
        return np.zeros(s.nx + 1, dtype=complex)
    if -n > s.mhi and not s.exact:
        raise TruncationExceeded(f"order y^{n} beyond validated range of E_{j-1},{m}")
    return s.x_poly(-n)


def coeff_c0_circle(j: int, m: int, n: int, etab, radius: float, nodes: int = 128):
    """Independent circle-quadrature route for c_{j,m}^{0,n} at a few x points.

    Returns (x_points, values) with values = (1/2 pi i) * contour integral of
    E_{j-1,m}(x, y) dy / y^(n+1) over |y| = radius.
    """
    s = etab[(j - 1, m)]
    xs = np.array([0.0, 0.37, 0.11 + 0.23j])
    th = 2.0 * np.pi * np.arange(nodes) / nodes
    y = radius * np.exp(1j * th)
    dy = 1j * y * (2.0 * np.pi / nodes)
    vals = []
    for x in xs:
        f = s(np.full_like(y, x), y)
        vals.append(np.sum(f * dy / y ** (n + 1)) / (2.0j * np.pi))
    return xs, np.array(vals)


def _shifted_coeffs(series: BiSeries, shift: int, window, nx_rows: int):
    """Coefficient arrays of y^shift * series on the window of Laurent orders n.

    Entry [i, t] is the x^t coefficient of y^(window[i]); orders where the
    shifted series is not valid are flagged by NaN in column 0.
    """
    out = np.zeros((len(window), nx_rows + 1), dtype=complex)
    sh = series.shift_y(shift)
    for i, n in enumerate(window):
        m = -n
        if m < sh.mlo:
            continue  # exactly zero above the top of the series
        if m > sh.mhi:
            if not sh.exact:
                out[i, 0] = np.nan
            continue
        v = sh.x_poly(m)
        out[i, :] = v[: nx_rows + 1]
    return out


@dataclass
class K0Components:
    """Affine decomposition of the right side K_n^0 = const + sum a_i A_i + sum b_i B_i."""

    const: np.ndarray
    a: list
    beta: list
    window: np.ndarray


def k0_components(h: HData, g1: BiSeries, r: int, window, nx_rows: int) -> K0Components:
    """Laurent data of [A + X B' - B G_1] e^(-H), split by its (A, B) linearity.

    e^(-H) = w^(-delta) y^delta e^(-H~); multiplication by the monomials Y^i
    of A and B is an exact index shift, so each unknown coefficient a_i,
    beta_i contributes a fixed known series.  beta_0 = 1 feeds the constant
    part.
    """
    d = h.delta
    em = h.Htilde.scale(-1.0).exp()          # e^(-H~)
    g1em = g1 * em                           # G_1 e^(-H~)
    # X * e^(-H~): multiply by x, i.e. shift coefficients up one x-degree.
    cx = np.zeros_like(em.c)
    cx[1:, :] = em.c[:-1, :]
    xem = BiSeries(cx, em.mlo, em.mhi, em.omega, em.tau, em.exact)

    wmd = h.omega ** (-d)
    const = -wmd * _shifted_coeffs(g1em, d, window, nx_rows)
    a_parts, b_parts = [], []
    for i in range(r):
        a_parts.append(wmd * _shifted_coeffs(em, i + d, window, nx_rows))
    for i in range(1, r + 1):
        t = wmd * (
            i * _shifted_coeffs(xem, i - 1 + d, window, nx_rows)
            - _shifted_coeffs(g1em, i + d, window, nx_rows)
        )
        b_parts.append(t)
    return K0Components(const, a_parts, b_parts, np.asarray(window))


def valid_window(h: HData, g1: BiSeries, r: int, d: int, extra: int = 4):
    """Laurent orders n on which every (E0) ingredient is exactly valid."""
    depth = min(h.Htilde.mhi, g1.mhi) - (r + max(d, 1)) - 2
    n_lo = -max(depth, 2)
    return np.arange(n_lo, d + extra + 1)


@dataclass
class Layout:
    d: int
    r: int
    dmu: int

    @property
    def n_mu(self):
        return self.d * (self.dmu + 1)

    @property
    def n_unknowns(self):
        return self.n_mu + 2 * self.r

    def split(self, u):
        mu = [u[j * (self.dmu + 1) : (j + 1) * (self.dmu + 1)] for j in range(self.d)]
        a = u[self.n_mu : self.n_mu + self.r]
        beta = u[self.n_mu + self.r : self.n_mu + 2 * self.r]
        return mu, a, beta


def _mu_columns(cvec, m, dmu, nx_rows):
    """Rows x columns block of the term c(x) * mu^{(m)} for one (j, m, n)."""
    block = np.zeros((nx_rows + 1, dmu + 1), dtype=complex)
    for i in range(m, dmu + 1):
        fac = factorial(i) / factorial(i - m)
        lo = i - m
        for t in range(lo, nx_rows + 1):
            if t - lo < len(cvec):
                block[t, i] = fac * cvec[t - lo]
    return block


def assemble_E0(h: HData, g1: BiSeries, etab, layout: Layout, window=None, nx_rows=None):
    """Matrix and affine right side of (E0) over the unknowns (mu, A, B)."""
    d, r, dmu = layout.d, layout.r, layout.dmu
    nx_rows = h.Htilde.nx if nx_rows is None else nx_rows
    if window is None:
        window = valid_window(h, g1, r, d)
    k = k0_components(h, g1, r, window, nx_rows)

    nrow_n = len(window)
    rows = nrow_n * (nx_rows + 1)
    M = np.zeros((rows, layout.n_unknowns), dtype=complex)
    rhs = np.zeros(rows, dtype=complex)
    keep = np.ones(nrow_n, dtype=bool)

    for i, n in enumerate(window):
        if np.isnan(k.const[i, 0]) or any(np.isnan(p[i, 0]) for p in k.a + k.beta):
            keep[i] = False
            continue
        r0, r1 = i * (nx_rows + 1), (i + 1) * (nx_rows + 1)
        rhs[r0:r1] = k.const[i]
        for jj in range(1, d + 1):
            for m in range(jj):
                try:
                    cvec = coeff_c0(jj, m, int(n), etab)
                except TruncationExceeded:
                    keep[i] = False
                    break
                if np.any(cvec):
                    col0 = (jj - 1) * (dmu + 1)
                    M[r0:r1, col0 : col0 + dmu + 1] += _mu_columns(cvec, m, dmu, nx_rows)
            if not keep[i]:
                break
        for ii in range(r):
            M[r0:r1, layout.n_mu + ii] -= k.a[ii][i]
            M[r0:r1, layout.n_mu + r + ii] -= k.beta[ii][i]

    mask = np.repeat(keep, nx_rows + 1)
    return M[mask], rhs[mask]


def solve_joint(M, rhs, layout: Layout):
    """Least-squares solve, reporting rank and conditioning.

    A rank-deficient system is reported through a RankDeficient warning and
    the flag on the result; the smallest-norm solution is returned.
    """
    sol, _, rank, sv = np.linalg.lstsq(M, rhs, rcond=None)
    res = float(np.linalg.norm(M @ sol - rhs)) / (1.0 + float(np.linalg.norm(rhs)))
    cond = float(sv[0] / sv[-1]) if len(sv) and sv[-1] > 0 else np.inf
    deficient = rank < M.shape[1]
    if deficient:
        warnings.warn(f"nullspace of dimension {M.shape[1] - rank}", RankDeficient)
    mu, a, beta = layout.split(sol)
    return FitResult(
        mu=[np.asarray(m) for m in mu],
        A=np.asarray(a),
        B=np.concatenate(([1.0 + 0.0j], np.asarray(beta))),
        residual=res,
        rank=int(rank),
        cond=cond,
        rank_deficient=bool(deficient),
    )


@dataclass
class FitResult:
    mu: list
    A: np.ndarray
    B: np.ndarray
    residual: float
    rank: int
    cond: float
    rank_deficient: bool
    r: int = -1
    confined: bool = False


def pin_AB(M, rhs, layout: Layout, A, B):
    """Move pinned (A, B) values back to the right side; returns (M_mu, rhs_eff).

    The unknown (a, beta) columns of M hold the negated K components, so
    pinned values contribute with the opposite sign.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    nm = layout.n_mu
    if layout.r:
        rhs_eff = rhs - M[:, nm:] @ np.concatenate((A, B[1:]))
    else:
        rhs_eff = rhs
    return M[:, :nm], rhs_eff


def residual_at(M, rhs, layout: Layout, A, B):
    """System residual with (A, B) pinned, minimizing over mu only."""
    Mmu, rhs_eff = pin_AB(M, rhs, layout, A, B)
    if layout.n_mu:
        sol, *_ = np.linalg.lstsq(Mmu, rhs_eff, rcond=None)
        resid = Mmu @ sol - rhs_eff
    else:
        resid = -rhs_eff
    return float(np.linalg.norm(resid)) / (1.0 + float(np.linalg.norm(rhs_eff)))


def fixed_AB_residual(h, g1, etab, layout: Layout, A, B, window=None, extra_blocks=()):
    """(E0) residual with (A, B) pinned; extra row blocks (E1/E2) may be stacked."""
    if window is None:
        window = valid_window(h, g1, layout.r, layout.d)
    M, rhs = assemble_E0(h, g1, etab, layout, window, h.Htilde.nx)
    for Mb, rb in extra_blocks:
        M = np.vstack([M, Mb])
        rhs = np.concatenate([rhs, rb])
    return residual_at(M, rhs, layout, A, B)


def rhs_K0(B, A, h: HData, g1: BiSeries, window=None, nx_rows=None):
    """Laurent data of [A + X B' - B G_1] e^(-H) for numeric (A, B).

    Returns a map n -> x-Taylor vector over the validated window; entries are
    None where the series data does not reach.  K_n^0 vanishes for n >= d.
    """
    B = np.atleast_1d(np.asarray(B, dtype=complex))
    A = np.asarray(A, dtype=complex)
    r = len(B) - 1
    nx_rows = h.Htilde.nx if nx_rows is None else nx_rows
    if window is None:
        window = valid_window(h, g1, r, max(r + h.delta, 1))
    k = k0_components(h, g1, r, window, nx_rows)
    out = {}
    for i, n in enumerate(window):
        row = k.const[i].copy()
        bad = np.isnan(row[0])
        for ii in range(r):
            if np.isnan(k.a[ii][i, 0]) or np.isnan(k.beta[ii][i, 0]):
                bad = True
                break
            row += A[ii] * k.a[ii][i] + B[ii + 1] * k.beta[ii][i]
        out[int(n)] = None if bad else row
    return out


def assemble_solve_E0(b, r: int, dmu: int = 10, mmax: int = 12) -> FitResult:
    """Joint least-squares solve of (E0) at a fixed candidate degree r.

    Unknowns are the mu Taylor vectors and (A, B) with beta_0 = 1; the
    minimizer, relative residual, rank and condition number are reported and
    a rank-deficient system returns the smallest-norm solution, flagged.
    """
    from .geometry import rho as _rho

    lt = indicators.laurent_extract(b, kmax=2, mmax=mmax, cross_check=False)
    d = r + lt.delta
    if d < 0:
        raise ValueError(f"r = {r} gives d = {d} < 0")
    omega = -2.0 * _rho(b)
    h = shock.H_from_laurent(lt, lt.delta, omega)
    g1 = shock.g1_biseries(lt, h.Htilde.nx, omega)
    etab = shock.E_decomposition(max(d - 1, 0), h)
    layout = Layout(d=d, r=r, dmu=dmu)
    M, rhs = assemble_E0(h, g1, etab, layout)
    fit = solve_joint(M, rhs, layout)
    fit.r = r
    fit.confined = infinity.check_confinement(fit.B, _rho(b))
    return fit


# -- (E1) and (E2) -------------------------------------------------------------


def e1_table(etab, h: HData, d: int):
    """E^1_{j,m} for 1 <= j <= d, 0 <= m <= j (x-derivative system)."""
    out = {}
    for j in range(1, d + 1):
        out[(j, 0)] = shock.op_D(etab[(j - 1, 0)], h)
        for m in range(1, j):
            out[(j, m)] = etab[(j - 1, m - 1)] + shock.op_D(etab[(j - 1, m)], h)
        out[(j, j)] = etab[(j - 1, j - 1)]
    return out


def assemble_E1(h: HData, g1: BiSeries, etab, layout: Layout, window=None, nx_rows=None):
    """Rows of (E1): sum c^{1,n}_{j,m} mu_j^{(m)} = coeffs of (B' - B dG1/dx) e^-H."""
    d, r, dmu = layout.d, layout.r, layout.dmu
    nx_rows = h.Htilde.nx if nx_rows is None else nx_rows
    if window is None:
        window = valid_window(h, g1, r, d)
    tab1 = e1_table(etab, h, d)
    em = h.Htilde.scale(-1.0).exp()
    g1xem = g1.dx() * em
    wmd = h.omega ** (-h.delta)

    const = -wmd * _shifted_coeffs(g1xem, h.delta, window, nx_rows)
    b_parts = []
    for i in range(1, r + 1):
        t = wmd * (
            i * _shifted_coeffs(em, i - 1 + h.delta, window, nx_rows)
            - _shifted_coeffs(g1xem, i + h.delta, window, nx_rows)
        )
        b_parts.append(t)

    nrow_n = len(window)
    rows = nrow_n * (nx_rows + 1)
    M = np.zeros((rows, layout.n_unknowns), dtype=complex)
    rhs = np.zeros(rows, dtype=complex)
    keep = np.ones(nrow_n, dtype=bool)
    for i, n in enumerate(window):
        if np.isnan(const[i, 0]) or any(np.isnan(p[i, 0]) for p in b_parts):
            keep[i] = False
            continue
        r0, r1 = i * (nx_rows + 1), (i + 1) * (nx_rows + 1)
        rhs[r0:r1] = const[i]
        ok = True
        for jj in range(1, d + 1):
            for m in range(jj + 1):
                s = tab1[(jj, m)]
                if -n > s.mhi and not s.exact:
                    ok = False
                    break
                cvec = s.x_poly(-n) if -n >= s.mlo else np.zeros(s.nx + 1, dtype=complex)
                if np.any(cvec):
                    col0 = (jj - 1) * (dmu + 1)
                    M[r0:r1, col0 : col0 + dmu + 1] += _mu_columns(cvec, m, dmu, nx_rows)
            if not ok:
                break
        if not ok:
            keep[i] = False
            continue
        for ii in range(r):
            M[r0:r1, layout.n_mu + r + ii] -= b_parts[ii][i]
    mask = np.repeat(keep, nx_rows + 1)
    return M[mask], rhs[mask]


def e2_table(etab, h: HData, d: int, gxx_inv: BiSeries):
    """E^2_{j,m}/Gxx for 1 <= j <= d, 0 <= m <= j+1 (second-derivative system)."""
    hx = h.dHx
    hxx = hx.dx()
    out = {}
    for j in range(1, d + 1):
        for m in range(j + 2):
            acc = None

            def _get(mm):
                if 0 <= mm <= j - 1:
                    return etab[(j - 1, mm)]
                return None

            t = _get(m - 2)
            if t is not None:
                acc = t
            t = _get(m - 1)
            if t is not None:
                dd = shock.op_D(t, h).scale(2.0)
                acc = dd if acc is None else acc + dd
            t = _get(m)
            if t is not None:
                dd = t.dx().dx() + (t.dx() * hx).scale(2.0) + t * (hx * hx + hxx)
                acc = dd if acc is None else acc + dd
            if acc is None:
                acc = BiSeries.zero(h.Htilde.nx, h.omega, h.Htilde.tau)
            out[(j, m)] = acc * gxx_inv
    return out


def invert_gxx(g1: BiSeries):
    """1/(d^2 G_1/dx^2) as a BiSeries; raises E2Degenerate when unusable."""
    gxx = g1.dx().dx()
    mags = np.abs(gxx.c).max(axis=0)
    nz = np.nonzero(mags > 1e-8)[0]
    if not len(nz):
        raise E2Degenerate("d^2 G_1/dx^2 vanishes within tolerance")
    m0 = gxx.mlo + nz[0]
    lead = gxx.x_poly(m0)
    if abs(lead[0]) < 1e-10:
        raise E2Degenerate("leading coefficient of d^2 G_1/dx^2 has no constant term")
    u = gxx.shift_y(m0)  # unit series with mlo = 0
    u = BiSeries(u._window(0, u.mhi), 0, u.mhi, u.omega, u.tau, u.exact)
    return u.invert_tail().shift_y(m0)


def assemble_E2(h: HData, g1: BiSeries, etab, layout: Layout, window=None, nx_rows=None):
    """Rows of (E2): sum c^{2,n}_{j,m} mu_j^{(m)} = coeffs of -B e^-H."""
    d, r, dmu = layout.d, layout.r, layout.dmu
    nx_rows = h.Htilde.nx if nx_rows is None else nx_rows
    if window is None:
        window = valid_window(h, g1, r, d)
    gxx_inv = invert_gxx(g1)
    tab2 = e2_table(etab, h, d, gxx_inv)
    em = h.Htilde.scale(-1.0).exp()
    wmd = h.omega ** (-h.delta)

    const = -wmd * _shifted_coeffs(em, h.delta, window, nx_rows)
    b_parts = [-wmd * _shifted_coeffs(em, i + h.delta, window, nx_rows)
               for i in range(1, r + 1)]

    nrow_n = len(window)
    rows = nrow_n * (nx_rows + 1)
    M = np.zeros((rows, layout.n_unknowns), dtype=complex)
    rhs = np.zeros(rows, dtype=complex)
    keep = np.ones(nrow_n, dtype=bool)
    for i, n in enumerate(window):
        if np.isnan(const[i, 0]) or any(np.isnan(p[i, 0]) for p in b_parts):
            keep[i] = False
            continue
        r0, r1 = i * (nx_rows + 1), (i + 1) * (nx_rows + 1)
        rhs[r0:r1] = const[i]
        ok = True
        for jj in range(1, d + 1):
            for m in range(jj + 2):
                s = tab2[(jj, m)]
                if -n > s.mhi and not s.exact:
                    ok = False
                    break
                cvec = s.x_poly(-n) if -n >= s.mlo else np.zeros(s.nx + 1, dtype=complex)
                if np.any(cvec):
                    col0 = (jj - 1) * (dmu + 1)
                    M[r0:r1, col0 : col0 + dmu + 1] += _mu_columns(cvec, m, dmu, nx_rows)
            if not ok:
                break
        if not ok:
            keep[i] = False
            continue
        for ii in range(r):
            M[r0:r1, layout.n_mu + r + ii] -= b_parts[ii][i]
    mask = np.repeat(keep, nx_rows + 1)
    return M[mask], rhs[mask]


# -- the outer (A, B) discovery loop -------------------------------------------


def fit_infinity(b, dmu: int = 10, r_max: int = 6, accept_tol: float = 1e-6,
                 mmax: int = 12, use_e1: bool = False):
    """Recover (r, A, B, mu) from boundary data alone.

    Scans r upward (starting at the smallest r with d = r + delta >= 0) and
    accepts the first candidate whose joint (E0) residual is below accept_tol
    and whose B has all roots confined in the rho-disc.  The minimal-degree
    acceptance mirrors the minimality available from the uniqueness theory.
    """
    lt = indicators.laurent_extract(b, kmax=2, mmax=mmax, cross_check=False)
    from .geometry import rho as _rho

    rh = _rho(b)
    omega = -2.0 * rh
    h = shock.H_from_laurent(lt, lt.delta, omega)
    nx = h.Htilde.nx
    g1 = shock.g1_biseries(lt, nx, omega)

    best = None
    r_lo = max(0, -lt.delta)
    for r in range(r_lo, r_max + 1):
        d = r + lt.delta
        if d < 0:
            continue
        etab = shock.E_decomposition(max(d - 1, 0), h)
        layout = Layout(d=d, r=r, dmu=dmu)
        M, rhs = assemble_E0(h, g1, etab, layout)
        if use_e1:
            M1, rhs1 = assemble_E1(h, g1, etab, layout)
            M = np.vstack([M, M1])
            rhs = np.concatenate([rhs, rhs1])
        fit = solve_joint(M, rhs, layout)
        fit.r = r
        fit.confined = infinity.check_confinement(fit.B, rh)
        if fit.residual < accept_tol and fit.confined:
            return fit, h, g1
        if best is None or fit.residual < best.residual:
            best = fit
    return best, h, g1
