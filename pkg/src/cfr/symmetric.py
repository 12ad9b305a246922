"""Newton identities, monic assembly, simultaneous root finding, discriminant."""

from __future__ import annotations

import numpy as np

ROOT_RESIDUAL_TOL = 1e-9
ABERTH_MAX_ITER = 200

# Fibers whose discriminant falls under this relative threshold are treated as
# non-transverse line positions and skipped by callers.
DISC_SINGULAR_TOL = 1e-12


class NoConvergence(RuntimeError):
    """Root iteration failed to reach the residual target."""


def power_to_elementary(N):
    """Elementary symmetric functions from power sums.

    Newton's identities in the recursive form
        S_k = (1/k) sum_{j=1..k} (-1)^(j-1) S_{k-j} N_j,   S_0 = 1,
    which the brute-force expansion of prod (T - h_j) confirms; displayed
    versions with a (-1)^(j-1) against S_j N_{k-j} get the k >= 3 signs wrong.
    """
    N = list(N)
    S = [1.0 + 0.0j]
    for k in range(1, len(N) + 1):
        acc = 0.0 + 0.0j
        for j in range(1, k + 1):
            acc += (-1) ** (j - 1) * S[k - j] * N[j - 1]
        S.append(acc / k)
    return np.array(S[1:], dtype=complex)


def elementary_to_power(S):
    """Power sums from elementary symmetric functions (inverse identities):

        N_k = (-1)^(k-1) k S_k + sum_{j=1..k-1} (-1)^(j-1) S_j N_{k-j}.
    """
    S = list(S)
    N = []
    for k in range(1, len(S) + 1):
        acc = (-1) ** (k - 1) * k * S[k - 1]
        for j in range(1, k):
            acc += (-1) ** (j - 1) * S[j - 1] * N[k - j - 1]
        N.append(acc)
    return np.array(N, dtype=complex)


def monic_from_elementary(S):
    """Coefficients [1, -S_1, +S_2, ...] of prod (T - h_j), highest power first."""
    out = [1.0 + 0.0j]
    for k, s in enumerate(S, start=1):
        out.append((-1) ** k * s)
    return np.array(out, dtype=complex)


def _polyval_and_deriv(coeffs, z):
    """Horner evaluation of p and p' for coefficients in descending order."""
    p = np.zeros_like(z) + coeffs[0]
    dp = np.zeros_like(z)
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def roots(coeffs):
    """All roots of a monic-ish polynomial via Aberth-Ehrlich iteration.

    Falls back to companion-matrix eigenvalues if the iteration stalls; the
    result is accepted only when |p(root)| < 1e-9 * (1 + ||coeffs||).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) < 2:
        raise ValueError("degree must be at least 1")
    coeffs = coeffs / coeffs[0]
    deg = len(coeffs) - 1
    scale = 1.0 + float(np.max(np.abs(coeffs)))
    tol = ROOT_RESIDUAL_TOL * (1.0 + float(np.linalg.norm(coeffs)))

    if deg == 1:
        return np.array([-coeffs[1]])

    # Deterministic Fejer-like starting circle; the offset breaks the symmetry
    # of polynomials with real coefficients.
    k = np.arange(deg)
    z = scale * np.exp(2j * np.pi * (k + 0.5) / deg + 0.4j)

    converged = False
    for _ in range(ABERTH_MAX_ITER):
        p, dp = _polyval_and_deriv(coeffs, z)
        if np.max(np.abs(p)) < tol * 1e-3:
            converged = True
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = np.sum(1.0 / diff, axis=1) - 1.0  # remove the diagonal 1/1 term
            corr = w / (1.0 - w * s)
        corr = np.where(np.isfinite(corr), corr, w)
        z = z - corr
        if np.max(np.abs(corr)) < 1e-14 * (1.0 + np.max(np.abs(z))):
            converged = True
            break

    p, _ = _polyval_and_deriv(coeffs, z)
    if not converged or np.max(np.abs(p)) > tol:
        comp = np.diag(np.ones(deg - 1, dtype=complex), -1)
        comp[0, :] = -coeffs[1:]
        z = np.linalg.eigvals(comp)
        # one Newton polish pass
        for _ in range(3):
            p, dp = _polyval_and_deriv(coeffs, z)
            step = np.where(np.abs(dp) > 0, p / np.where(dp == 0, 1, dp), 0)
            z = z - step
        p, _ = _polyval_and_deriv(coeffs, z)
        if np.max(np.abs(p)) > tol:
            raise NoConvergence(f"max residual {np.max(np.abs(p)):.3e} exceeds {tol:.3e}")
    return z


def discriminant(coeffs):
    """Resultant-based discriminant of a polynomial (descending coefficients)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = len(coeffs) - 1
    if deg < 2:
        raise ValueError("discriminant needs degree >= 2")
    dcoeffs = coeffs[:-1] * np.arange(deg, 0, -1)
    n, m = deg, deg - 1
    # Sylvester matrix of p (degree n) and p' (degree m).
    S = np.zeros((n + m, n + m), dtype=complex)
    for i in range(m):
        S[i, i : i + n + 1] = coeffs
    for i in range(n):
        S[m + i, i : i + m + 1] = dcoeffs
    res = np.linalg.det(S)
    sign = (-1) ** (n * (n - 1) // 2)
    return sign * res / coeffs[0]


def fiber_scale(coeffs):
    """Homogeneous magnitude scale used for the near-tangency discriminant test."""
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = len(coeffs) - 1
    return (1.0 + float(np.max(np.abs(coeffs)))) ** (2 * (deg - 1))
