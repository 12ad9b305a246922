"""Germ data of Q at {w0 = 0}: the polynomial B_inf and rational corrections P_k.

A germ is the Taylor data of one branch u1 = g(u0) of Q at a point
q = (0 : b : 1), in the chart (u0, u1) = (w0/w2, w1/w2).  The corrections P_k
are the residues at Q_inf of the indicator integrand; they are polynomials of
degree k in X whose coefficients are rational in Y with denominators dividing
B_inf^k.  Everything here is exact truncated-series arithmetic, no quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P

from . import symmetric

RESONANT_EPS = 1e-9


class ResonantY(ValueError):
    """1 + y*b_q is numerically zero: y hits a pole of the germ correction."""


@dataclass
class GermAtInfinity:
    """One branch of Q at (0 : b : 1): value b = g(0) and Taylor tail g_1..g_K."""

    b: complex
    taylor: list

    def series(self, order):
        """Coefficient vector [g_0, ..., g_order] of g; raises if depth is short.

        The residue of P_k genuinely involves g_k (the order-k jet), so the
        stored tail must reach that far.
        """
        if order > len(self.taylor):
            raise ValueError(
                f"germ Taylor depth {len(self.taylor)} < required order {order}"
            )
        return np.concatenate(([self.b], np.asarray(self.taylor[:order], dtype=complex)))


def _trim(c):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    nz = np.nonzero(np.abs(c) > 0)[0]
    return c[: nz[-1] + 1] if len(nz) else np.zeros(1, dtype=complex)


@dataclass
class RationalY:
    """Rational fraction num(Y) / B(Y)^j with a shared base polynomial B."""

    num: np.ndarray
    j: int
    base: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=complex))

    def __post_init__(self):
        self.num = _trim(self.num)
        self.base = _trim(self.base)

    def with_power(self, j):
        """Rewrite with denominator B^j (j >= self.j)."""
        if j < self.j:
            raise ValueError("cannot lower denominator power")
        num = self.num
        for _ in range(j - self.j):
            num = P.polymul(num, self.base)
        return RationalY(num, j, self.base)

    def __add__(self, other):
        j = max(self.j, other.j)
        a, b = self.with_power(j), other.with_power(j)
        return RationalY(P.polyadd(a.num, b.num), j, self.base)

    def scale(self, c):
        return RationalY(self.num * c, self.j, self.base)

    def deriv(self):
        """d/dY: (N/B^j)' = (N'B - j N B') / B^(j+1)."""
        if self.j == 0:
            return RationalY(P.polyder(self.num), 0, self.base)
        t = P.polysub(
            P.polymul(P.polyder(self.num), self.base),
            self.j * P.polymul(self.num, P.polyder(self.base)),
        )
        return RationalY(t, self.j + 1, self.base)

    def __call__(self, y):
        den = P.polyval(y, self.base) ** self.j
        if np.min(np.abs(den)) < RESONANT_EPS:
            raise ResonantY("evaluation at a root of B_inf")
        return P.polyval(y, self.num) / den


@dataclass
class RationalAffinePoly:
    """Polynomial in X with RationalY coefficients: element of C_k[X, Y)."""

    coeffs: list  # X^0 .. X^degX

    @property
    def degX(self):
        return len(self.coeffs) - 1

    def __call__(self, x, y):
        tot = 0.0 + 0.0j
        for m, c in enumerate(self.coeffs):
            tot = tot + c(y) * np.asarray(x) ** m
        return tot

    def deriv_x(self):
        return RationalAffinePoly(
            [c.scale(m) for m, c in enumerate(self.coeffs)][1:] or
            [RationalY(np.zeros(1), 0, self.coeffs[0].base)]
        )

    def deriv_y(self):
        return RationalAffinePoly([c.deriv() for c in self.coeffs])


# -- truncated series helpers (plain coefficient vectors) ---------------------


def _ser_mul(a, b, order):
    out = np.zeros(order + 1, dtype=complex)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        hi = min(order - i, len(b) - 1)
        out[i : i + hi + 1] += ai * b[: hi + 1]
    return out


def _ser_pow(a, p, order):
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0
    for _ in range(p):
        out = _ser_mul(out, a, order)
    return out


def _ser_inv(a, order):
    if abs(a[0]) < RESONANT_EPS:
        raise ResonantY("series inversion with vanishing constant term")
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0 / a[0]
    for n in range(1, order + 1):
        s = 0.0 + 0.0j
        for i in range(1, min(n, len(a) - 1) + 1):
            s += a[i] * out[n - i]
        out[n] = -s / a[0]
    return out


# -- operations ---------------------------------------------------------------


def B_infinity(germs) -> np.ndarray:
    """Ascending coefficients of B_inf(Y) = prod (1 + Y b_q)."""
    out = np.ones(1, dtype=complex)
    for g in germs:
        out = P.polymul(out, np.array([1.0, g.b], dtype=complex))
    return _trim(out)


def P1(germs) -> RationalAffinePoly:
    """P_1 = p_{1,0} + p_{1,1} X with p_{1,1} = B'/B, p_{1,0} = -sum g_1/(1+Y b)."""
    base = B_infinity(germs)
    if not germs:
        z = RationalY(np.zeros(1), 0, base)
        return RationalAffinePoly([z, z])
    p11 = RationalY(P.polyder(base), 1, base)
    num = np.zeros(1, dtype=complex)
    for q in germs:
        g1 = q.taylor[0] if q.taylor else 0.0
        rest = np.ones(1, dtype=complex)
        for other in germs:
            if other is not q:
                rest = P.polymul(rest, np.array([1.0, other.b], dtype=complex))
        num = P.polyadd(num, -g1 * rest)
    p10 = RationalY(num, 1, base)
    return RationalAffinePoly([p10, p11])


def Pk_residue(germ: GermAtInfinity, k: int, z) -> complex:
    """Residue contribution of one germ to P_k at the line parameter z.

    Equals the coefficient of u^(k-1) in [x(g - u g') - g'] g^(k-1) / (1 + xu + yg),
    computed with exact truncated series arithmetic; P_0 is identically -1.
    """
    if k == 0:
        return -1.0 + 0.0j
    x, y = z.x, z.y
    if abs(1.0 + y * germ.b) < RESONANT_EPS:
        raise ResonantY("1 + y b_q vanishes")
    order = k - 1
    g = germ.series(k)  # length k+1; g' needs g_k for the u^(k-1) coefficient
    j = np.arange(order + 1)
    gmu = (1.0 - j) * g[: order + 1]          # g - u g'
    gp = (j + 1.0) * g[1 : order + 2]         # g'
    num = x * gmu - gp
    num = _ser_mul(num, _ser_pow(g, k - 1, order), order)
    den = y * g[: order + 1].copy()           # 1 + x u + y g(u)
    den[0] += 1.0
    if order >= 1:
        den[1] += x
    q = _ser_mul(num, _ser_inv(den, order), order)
    return complex(q[order])


def _bracket(germ, k, n):
    """<g' g^(k-1) (g - g0)^(n-1), u^(k-1)> for the p_{k,0} closed form."""
    order = k - 1
    g = germ.series(k)
    gp = P.polyder(g)[: order + 1] if k >= 1 else np.zeros(1, dtype=complex)
    gm = g.copy()
    gm[0] = 0.0
    term = _ser_mul(gp, _ser_pow(g, k - 1, order), order)
    term = _ser_mul(term, _ser_pow(gm, n - 1, order), order)
    return complex(term[order])


def _pk0_germ(germ, k, base) -> RationalY:
    """p_{k,0} contribution of one germ, with denominator committed to B_inf^k.

    Uses the expansion of the residue in powers of 1/(1 + Y b):

        p_{k,0}^q = sum_{n=1..k} (-1)^n Y^(n-1) <g' g^(k-1) (g-g0)^(n-1), u^(k-1)>
                    / (1 + Y b)^n
    """
    lin = np.array([1.0, germ.b], dtype=complex)
    num = np.zeros(1, dtype=complex)
    for n in range(1, k + 1):
        c = (-1) ** n * _bracket(germ, k, n)
        if c == 0:
            continue
        t = np.concatenate((np.zeros(n - 1, dtype=complex), [c]))  # c * Y^(n-1)
        for _ in range(k - n):
            t = P.polymul(t, lin)
        num = P.polyadd(num, t)
    return RationalY(num, k, lin)


def Pk_family(germs, kmax: int):
    """The corrections P_0..P_kmax as RationalAffinePoly over B_inf.

    p_{k,0} comes from the series-residue route; the higher X-coefficients
    follow the recursion p_{k,m} = (k/(m!(k-m))) p_{k-m,0}^{(m)} and
    p_{k,k} = p_{1,1}^{(k-1)}/(k-1)!.
    """
    base = B_infinity(germs)
    zero = RationalY(np.zeros(1), 0, base)
    out = [RationalAffinePoly([RationalY(np.array([-float(len(germs))]), 0, base)])]
    if kmax == 0:
        return out
    if not germs:
        for k in range(1, kmax + 1):
            out.append(RationalAffinePoly([zero] * (k + 1)))
        out[0] = RationalAffinePoly([zero])
        return out

    # per-germ p_{k,0} lifted to the common denominator B_inf^k
    pk0 = {}
    for k in range(1, kmax + 1):
        acc = RationalY(np.zeros(1), k, base)
        for q in germs:
            frac = _pk0_germ(q, k, base)
            rest = np.ones(1, dtype=complex)
            for other in germs:
                if other is not q:
                    rest = P.polymul(rest, np.array([1.0, other.b], dtype=complex))
            lift = frac.num
            for _ in range(k):
                lift = P.polymul(lift, rest)
            acc = acc + RationalY(lift, k, base)
        pk0[k] = acc

    p11 = RationalY(P.polyder(base), 1, base)
    for k in range(1, kmax + 1):
        coeffs = [pk0[k]]
        for m in range(1, k):
            d = pk0[k - m]
            for _ in range(m):
                d = d.deriv()
            coeffs.append(d.scale(k / (factorial(m) * (k - m))))
        top = p11
        for _ in range(k - 1):
            top = top.deriv()
        coeffs.append(top.scale(1.0 / factorial(k - 1)))
        out.append(RationalAffinePoly(coeffs))
    return out


def check_confinement(Binf, rho: float) -> bool:
    """True iff every root of B_inf has modulus <= rho."""
    c = _trim(Binf)
    if len(c) == 1:
        return True
    rts = symmetric.roots(c[::-1])
    return bool(np.all(np.abs(rts) <= rho * (1.0 + 1e-9) + 1e-12))


def germs_from_json(obj) -> list:
    return [
        GermAtInfinity(
            complex(g["b"][0], g["b"][1]),
            [complex(p[0], p[1]) for p in g.get("taylor", [])],
        )
        for g in obj["germs"]
    ]
