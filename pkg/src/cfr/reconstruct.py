"""End-to-end reconstruction: per-line fibers, curve sweep, algebraicity test.

For each admissible line L_z the holomorphic extensions N_{Q,k} = G_k - P_k
are the power sums of the fiber ordinates h_j(z); Newton's identities turn
them into elementary symmetric functions, a monic polynomial is assembled and
rooted, and each root h contributes the projective point (1 : h : -x - y h).
Sweeping a grid of lines accumulates the reconstructed point cloud.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import indicators, symmetric
from .geometry import BoundaryData, LineParam, ProjPoint, in_Z, line_eval, m_of_y, rho


class DegenerateFiber(ValueError):
    """Discriminant vanished: the line is treated as non-transverse and skipped."""


MERGE_EPS = 1e-6


def N_Qk(b: BoundaryData, z: LineParam, k, pk_family) -> complex:
    """Holomorphic extension N_{Q,k}(z) = G_k(z) - P_k(x, y)."""
    ks = np.atleast_1d(k)
    g = indicators.G_k(b, z, ks if len(ks) > 1 else int(ks[0]))
    g = np.atleast_1d(g)
    out = np.array(
        [g[i] - (pk_family[kk](z.x, z.y) if kk < len(pk_family) else 0.0)
         for i, kk in enumerate(ks)],
        dtype=complex,
    )
    return out if len(ks) > 1 else complex(out[0])


@dataclass
class FiberResult:
    z: LineParam
    roots: np.ndarray
    points: list
    discriminant: complex


@dataclass
class PointCloud:
    points: list = field(default_factory=list)        # ProjPoint
    multiplicity: list = field(default_factory=list)  # int
    source: list = field(default_factory=list)        # LineParam of first sighting
    skipped: list = field(default_factory=list)       # degenerate z with reason

    def __len__(self):
        return len(self.points)


def chordal_distance(p: ProjPoint, q: ProjPoint) -> float:
    """Fubini-Study chordal metric |p ^ q| / (|p| |q|) on CP2."""
    from .geometry import chordal
    return chordal(p.w, q.w)


def fiber(b: BoundaryData, z: LineParam, p: int, pk_family) -> FiberResult:
    """Roots of the fiber polynomial over L_z and the projective points.

    p is the sheet count; the power sums N_{Q,1..p} convert to elementary
    symmetric functions, the monic fiber polynomial is rooted, and lines with
    |discriminant| below 1e-12 * scale raise DegenerateFiber.
    """
    if p < 1:
        raise ValueError("fiber needs p >= 1")
    N = np.atleast_1d(N_Qk(b, z, list(range(1, p + 1)), pk_family))
    S = symmetric.power_to_elementary(N)
    coeffs = symmetric.monic_from_elementary(S)
    if p >= 2:
        disc = symmetric.discriminant(coeffs)
        if abs(disc) < symmetric.DISC_SINGULAR_TOL * symmetric.fiber_scale(coeffs):
            raise DegenerateFiber(f"discriminant {abs(disc):.2e} below threshold")
    else:
        disc = 1.0 + 0.0j
    rts = symmetric.roots(coeffs)
    pts = [ProjPoint(1.0, complex(h), complex(-z.x - z.y * h)) for h in rts]
    return FiberResult(z=z, roots=rts, points=pts, discriminant=complex(disc))


def _default_grid(b: BoundaryData, radii, angles, xfracs, angle_offset):
    r = rho(b)
    zs = []
    for rad_mult in radii:
        R = rad_mult * r
        for j in range(angles):
            y = R * np.exp(2j * np.pi * (j + angle_offset) / angles)
            m = m_of_y(b, y)
            for f in xfracs:
                zs.append(LineParam(f * m, y))
    return zs


def sweep(b: BoundaryData, p: int, pk_family, radii=(2.0, 2.5, 3.0),
          angles=16, xfracs=(0.0, 0.2, -0.35), merge_eps=MERGE_EPS,
          threads=None, angle_offset=0.31) -> PointCloud:
    """Union of fibers over a z-grid, deduplicated in the chordal metric.

    radii are multiples of rho; xfracs are fractions of m(y) (complex values
    allowed).  Degenerate lines are recorded in cloud.skipped, not raised.
    """
    cloud = PointCloud()
    if p < 1:
        return cloud
    zs = _default_grid(b, radii, angles, xfracs, angle_offset)

    def work(z):
        try:
            return fiber(b, z, p, pk_family)
        except DegenerateFiber as e:
            return (z, str(e))

    threads = threads or int(os.environ.get("CFR_THREADS", "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, zs))
    else:
        results = [work(z) for z in zs]

    for res in results:
        if isinstance(res, tuple):
            cloud.skipped.append(res)
            continue
        for pt in res.points:
            for i, q in enumerate(cloud.points):
                if chordal_distance(pt, q) < merge_eps:
                    cloud.multiplicity[i] += 1
                    break
            else:
                cloud.points.append(pt)
                cloud.multiplicity.append(1)
                cloud.source.append(res.z)
    return cloud


def detect_algebraic(b: BoundaryData, radii=(2.0, 3.0), angles=16,
                     xs=(0.0, 0.25, -0.25, 0.2j, -0.2j), deg_max=6,
                     fit_tol=1e-8):
    """Least-squares test of G_1(x, y) = (A0(y) + x A1(y)) / B(y).

    Scans denominator degrees up to deg_max with B monic in its top
    coefficient; returns (True, model) when some degree fits with relative
    residual below fit_tol, else (False, best_model).
    """
    r = rho(b)
    samples = []
    for mult in radii:
        R = mult * r
        for j in range(angles):
            y = R * np.exp(2j * np.pi * (j + 0.17) / angles)
            for x in xs:
                z = LineParam(x, y)
                samples.append((x, y, indicators.G_k(b, z, 1)))
    xv = np.array([s[0] for s in samples])
    yv = np.array([s[1] for s in samples])
    gv = np.array([s[2] for s in samples])

    if np.max(np.abs(gv)) < 1e-13:
        return True, {"A0": np.zeros(1), "A1": np.zeros(1), "B": np.ones(1),
                      "residual": 0.0, "degree": 0}

    best = None
    for dB in range(1, deg_max + 1):
        # unknowns: A0 (deg dB-1), A1 (deg dB-1), low coefficients of monic B
        cols = []
        for i in range(dB):
            cols.append(yv ** i)                    # A0
        for i in range(dB):
            cols.append(xv * yv ** i)               # x A1
        for i in range(dB):
            cols.append(-gv * yv ** i)              # -G_1 * beta_i
        M = np.stack(cols, axis=1)
        rhs = gv * yv ** dB
        sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        A0, A1, Blow = sol[:dB], sol[dB : 2 * dB], sol[2 * dB :]
        B = np.concatenate([Blow, [1.0]])
        Bv = np.polynomial.polynomial.polyval(yv, B)
        model_vals = (np.polynomial.polynomial.polyval(yv, A0)
                      + xv * np.polynomial.polynomial.polyval(yv, A1)) / Bv
        rel = float(np.linalg.norm(model_vals - gv) / np.linalg.norm(gv))
        entry = {"A0": A0, "A1": A1, "B": B, "residual": rel, "degree": dB}
        if best is None or rel < best["residual"]:
            best = entry
        if rel < fit_tol:
            return True, entry
    return False, best
