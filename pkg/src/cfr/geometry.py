"""Projective-plane primitives, boundary-data model and the admissible domain Z.

Boundary data is the only physical input of the pipeline: oriented closed
loops sampled uniformly in a parameter t in [0, 2pi), given in homogeneous
coordinates w = (w0, w1, w2) together with the parameter derivative dw/dt in
the same gauge.  All downstream contour quadratures only use the gauge
invariant combinations (w1/w0, w2/w0) and their differentials, so the stored
per-sample normalization never enters the results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

# Modulus below which a homogeneous coordinate counts as zero (after
# max-modulus normalization).
CHART_EPS = 1e-12

# Discrete minima overestimate the true minimum of |x + y*z1 + z2| over the
# boundary; in_Z deflates m(y) by this factor to stay safely inside Z.
M_SAFETY = 0.98


class ChartUndefined(ValueError):
    """Requested affine chart divides by a (numerically) vanishing coordinate."""


class OutsideDomain(ValueError):
    """Line parameter lies outside the admissible domain (|y| <= rho)."""


def _normalize_rows(w):
    """Scale each row of an (N,3) complex array to max-modulus 1."""
    s = np.max(np.abs(w), axis=1)
    if np.any(s == 0.0):
        raise ValueError("zero homogeneous coordinate triple")
    return w / s[:, None], s


def chordal(a, b) -> float:
    """Gauge-independent chordal distance |a ^ b| / (|a| |b|) on CP2."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cross = np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
    return float(np.linalg.norm(cross) / (np.linalg.norm(a) * np.linalg.norm(b)))


@dataclass(frozen=True)
class ProjPoint:
    """Point of CP2 in max-modulus-normalized homogeneous coordinates."""

    w0: complex
    w1: complex
    w2: complex

    def __post_init__(self):
        s = max(abs(self.w0), abs(self.w1), abs(self.w2))
        if s == 0.0:
            raise ValueError("all homogeneous coordinates vanish")
        if abs(s - 1.0) > 1e-9:
            object.__setattr__(self, "w0", self.w0 / s)
            object.__setattr__(self, "w1", self.w1 / s)
            object.__setattr__(self, "w2", self.w2 / s)

    @property
    def w(self):
        return np.array([self.w0, self.w1, self.w2], dtype=complex)

    @staticmethod
    def from_array(w) -> "ProjPoint":
        return ProjPoint(complex(w[0]), complex(w[1]), complex(w[2]))


@dataclass(frozen=True)
class LineParam:
    """Parameters (x, y) of the line L_z = {x w0 + y w1 + w2 = 0}."""

    x: complex
    y: complex


@dataclass
class BoundaryLoop:
    """One closed, uniformly sampled loop of the boundary.

    t  : (N,) real parameters, uniform on [0, 2pi)
    w  : (N, 3) complex homogeneous coordinates, max-modulus normalized
    dw : (N, 3) complex parameter derivatives in the same per-sample gauge
    """

    t: np.ndarray
    w: np.ndarray
    dw: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.w = np.asarray(self.w, dtype=complex)
        self.dw = np.asarray(self.dw, dtype=complex)
        # accept the duplicated-endpoint layout: drop the final sample when it
        # reproduces the first one (closure must then be exact to 1e-10)
        if len(self.t) > 2 and abs(self.t[-1] - self.t[0] - 2.0 * np.pi) < 1e-9:
            if chordal(self.w[0], self.w[-1]) > 1e-10:
                raise ValueError("duplicated-endpoint loop fails closure")
            self.t = self.t[:-1]
            self.w = self.w[:-1]
            self.dw = self.dw[:-1]
        n = len(self.t)
        if n < 16:
            raise ValueError("loop needs at least 16 samples")
        dt = np.diff(self.t)
        if not np.allclose(dt, dt[0], rtol=0, atol=1e-9 * (1 + abs(dt[0]))):
            raise ValueError("loop samples are not uniformly spaced")
        self.w, scale = _normalize_rows(self.w)
        self.dw = self.dw / scale[:, None]
        if np.min(np.abs(self.w)) <= CHART_EPS:
            raise ValueError("boundary sample with w0*w1*w2 = 0")

    def __len__(self):
        return len(self.t)

    @property
    def z1(self):
        return self.w[:, 1] / self.w[:, 0]

    @property
    def z2(self):
        return self.w[:, 2] / self.w[:, 0]

    @property
    def dz1(self):
        w, dw = self.w, self.dw
        return (dw[:, 1] * w[:, 0] - w[:, 1] * dw[:, 0]) / w[:, 0] ** 2

    @property
    def dz2(self):
        w, dw = self.w, self.dw
        return (dw[:, 2] * w[:, 0] - w[:, 2] * dw[:, 0]) / w[:, 0] ** 2


@dataclass
class BoundaryData:
    """Oriented boundary of the curve: loops plus per-loop orientation signs."""

    loops: list = field(default_factory=list)
    orientation: list = field(default_factory=list)

    def __post_init__(self):
        if not self.loops:
            raise ValueError("boundary needs at least one loop")
        if len(self.orientation) != len(self.loops):
            raise ValueError("one orientation sign per loop required")
        if any(s not in (1, -1) for s in self.orientation):
            raise ValueError("orientation signs must be +1 or -1")
        for lp in self.loops:
            # Uniform grids omit the duplicate endpoint; accept either layout
            # but reject visibly open arcs (consecutive samples stay close in
            # the projective chordal metric).
            if chordal(lp.w[0], lp.w[-1]) > 0.5:
                raise ValueError("loop does not close")

    def signed_loops(self):
        return zip(self.orientation, self.loops)


# -- operations ---------------------------------------------------------------


def affine_chart(p: ProjPoint, chart: int):
    """Affine coordinates of p in the given chart, remaining pair in cyclic order."""
    w = p.w
    d = w[chart]
    if abs(d) <= CHART_EPS:
        raise ChartUndefined(f"coordinate w{chart} vanishes")
    return w[(chart + 1) % 3] / d, w[(chart + 2) % 3] / d


def rho(b: BoundaryData) -> float:
    """max over boundary samples of |w2/w1|."""
    return max(float(np.max(np.abs(lp.w[:, 2] / lp.w[:, 1]))) for lp in b.loops)


def m_of_y(b: BoundaryData, y: complex) -> float:
    """min over boundary samples of |y*(w1/w0) + (w2/w0)|, defined for |y| > rho."""
    if abs(y) <= rho(b):
        raise OutsideDomain(f"|y| = {abs(y):g} <= rho = {rho(b):g}")
    return min(float(np.min(np.abs(y * lp.z1 + lp.z2))) for lp in b.loops)


def in_Z(b: BoundaryData, z: LineParam) -> bool:
    """Membership in the admissible domain Z (with deflated m(y) for safety)."""
    if abs(z.y) <= rho(b):
        return False
    return abs(z.x) < M_SAFETY * m_of_y(b, z.y)


def line_eval(z: LineParam, p: ProjPoint) -> complex:
    """Incidence residual x*w0 + y*w1 + w2 in the normalized gauge."""
    return z.x * p.w0 + z.y * p.w1 + p.w2


# -- velocity synthesis -------------------------------------------------------

# 8th-order centered first-derivative stencil on a uniform periodic grid.
_FD8 = np.array([1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5,
                 0.0,
                 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280])


def synth_velocities(t, w):
    """Differentiate periodic samples w(t) with 8th-order centered differences."""
    w = np.asarray(w, dtype=complex)
    n = len(t)
    h = (t[1] - t[0]) if n > 1 else 1.0
    dw = np.zeros_like(w)
    for k, c in enumerate(_FD8):
        off = k - 4
        if c != 0.0:
            dw += c * np.roll(w, -off, axis=0)
    return dw / h


# -- boundary JSON i/o --------------------------------------------------------


def _c2pair(c):
    return [float(np.real(c)), float(np.imag(c))]


def _pair2c(p):
    return complex(p[0], p[1])


def boundary_to_json(b: BoundaryData) -> dict:
    loops = []
    for sign, lp in b.signed_loops():
        samples = []
        for i in range(len(lp)):
            samples.append({
                "t": float(lp.t[i]),
                "w": [_c2pair(c) for c in lp.w[i]],
                "dw": [_c2pair(c) for c in lp.dw[i]],
            })
        loops.append({"orientation": int(sign), "samples": samples})
    return {"loops": loops}


def boundary_from_json(obj: dict) -> BoundaryData:
    loops, signs = [], []
    for entry in obj["loops"]:
        signs.append(int(entry["orientation"]))
        ts, ws, dws = [], [], []
        has_dw = all("dw" in s for s in entry["samples"])
        for s in entry["samples"]:
            ts.append(float(s["t"]))
            ws.append([_pair2c(p) for p in s["w"]])
            if has_dw:
                dws.append([_pair2c(p) for p in s["dw"]])
        ts = np.array(ts)
        ws = np.array(ws, dtype=complex)
        if has_dw:
            dws = np.array(dws, dtype=complex)
        else:
            dws = synth_velocities(ts, ws)
        loops.append(BoundaryLoop(ts, ws, dws))
    return BoundaryData(loops, signs)


def load_boundary(path) -> BoundaryData:
    with open(path, "r", encoding="utf-8") as fh:
        return boundary_from_json(json.load(fh))
