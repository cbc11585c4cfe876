"""Reference eigensolver and basic spectral metrics.

The oracle shares no code with the solver pipeline: it reduces to
Hessenberg form in 200-bit arithmetic with its own left-to-right
reflectors, expands the characteristic polynomial by the Hessenberg
determinant recurrence, finds all roots by Aberth iteration and validates
each root through the smallest singular value of ``lambda I - M``.
"""

from __future__ import annotations

import itertools
import warnings
from typing import NamedTuple

import mpmath
import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from ..errors import CardinalityMismatch, OracleNonConvergence, TooFewEigenvalues
from ..matrix import as_complex_matrix

ORACLE_BITS = 200
RESIDUAL_TOL = 1e-10
MAX_ORACLE_DIM = 64


def _mp_hessenberg(A: list[list]) -> list[list]:
    """Left-to-right Householder reduction on a list-of-lists of mpc."""
    n = len(A)
    for k in range(n - 2):
        x = [A[i][k] for i in range(k + 1, n)]
        alpha = mpmath.sqrt(mpmath.fsum(abs(t) ** 2 for t in x))
        if alpha == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else mpmath.mpc(1)
        v = list(x)
        v[0] += phase * alpha
        vv = mpmath.fsum(abs(t) ** 2 for t in v)
        beta = 2 / vv
        idx = range(k + 1, n)
        # A <- P A
        for j in range(n):
            s = mpmath.fsum(mpmath.conj(v[a]) * A[i][j] for a, i in enumerate(idx))
            for a, i in enumerate(idx):
                A[i][j] -= beta * v[a] * s
        # A <- A P
        for i in range(n):
            s = mpmath.fsum(A[i][j] * v[a] for a, j in enumerate(idx))
            for a, j in enumerate(idx):
                A[i][j] -= beta * s * mpmath.conj(v[a])
        for i in range(k + 2, n):
            A[i][k] = mpmath.mpc(0)
    return A


def _poly_mul_linear(p: list, c) -> list:
    """Coefficients (low to high) of ``(z - c) p(z)``."""
    out = [mpmath.mpc(0)] * (len(p) + 1)
    for i, a in enumerate(p):
        out[i + 1] += a
        out[i] -= c * a
    return out


def _charpoly_hessenberg(H: list[list]) -> list:
    """Coefficients (low to high) of ``det(z I - H)`` for upper Hessenberg ``H``."""
    n = len(H)
    polys = [[mpmath.mpc(1)]]
    for k in range(n):
        pk = _poly_mul_linear(polys[k], H[k][k])
        prod = mpmath.mpc(1)
        for i in range(k - 1, -1, -1):
            prod *= H[i + 1][i]
            coef = H[i][k] * prod
            if coef != 0:
                for d, a in enumerate(polys[i]):
                    pk[d] -= coef * a
        polys.append(pk)
    return polys[n]


def _horner_with_derivative(coeffs: list, z):
    p = coeffs[-1]
    dp = mpmath.mpc(0)
    for a in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _aberth(coeffs: list, max_iter: int = 2000) -> list:
    n = len(coeffs) - 1
    radius = 1 + max(abs(a) for a in coeffs[:-1])  # Cauchy bound for monic polynomials
    center = -coeffs[n - 1] / n
    start = 0.4 + 0.9 * mpmath.mpf(1) / n
    z = [center + radius * mpmath.expjpi(2 * mpmath.mpf(k) / n + start) for k in range(n)]
    tol = mpmath.mpf(2) ** (-(ORACLE_BITS - 40)) * radius
    for _ in range(max_iter):
        biggest = mpmath.mpf(0)
        new = list(z)
        for i in range(n):
            p, dp = _horner_with_derivative(coeffs, z[i])
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else mpmath.mpc(tol)
            s = mpmath.fsum(1 / (z[i] - z[j]) for j in range(n) if j != i and z[i] != z[j])
            w = ratio / (1 - ratio * s)
            new[i] = z[i] - w
            biggest = max(biggest, abs(w))
        z = new
        if biggest <= tol:
            return z
    raise OracleNonConvergence(f"Aberth iteration did not converge in {max_iter} sweeps")


def oracle_eigenvalues(M) -> np.ndarray:
    """Eigenvalues of ``M`` from a 200-bit characteristic-polynomial root finder."""
    M = as_complex_matrix(M)
    n = M.shape[0]
    if n > MAX_ORACLE_DIM:
        raise ValueError(f"oracle is desk-scale only (n <= {MAX_ORACLE_DIM}), got n={n}")
    if n == 1:
        return M[0].copy()
    with mpmath.workprec(ORACLE_BITS):
        A = [[mpmath.mpc(complex(M[i, j])) for j in range(n)] for i in range(n)]
        H = _mp_hessenberg(A)
        coeffs = _charpoly_hessenberg(H)
        roots = _aberth(coeffs)
        eigs = np.array([complex(r) for r in roots])
    scale = max(float(np.linalg.norm(M, 2)), np.finfo(float).tiny)
    for lam in eigs:
        smin = smallest_singular_value(lam * np.eye(n) - M)
        if smin > RESIDUAL_TOL * scale:
            raise OracleNonConvergence(
                f"root {lam} fails validation: sigma_min = {smin:.3g} > {RESIDUAL_TOL:g} ||M||"
            )
    return np.sort_complex(eigs)


# --------------------------------------------------------------------------
# smallest singular value


class SigmaMin(NamedTuple):
    value: float
    singular: bool
    iterations: int


def sigma_min_detail(M, max_iter: int = 500, rtol: float = 1e-12) -> SigmaMin:
    """Inverse power iteration on ``(A^* A)^{-1}`` from a fixed start vector.

    Each sweep solves with the LU factors of ``A`` and ``A^*``. The
    returned value is ``||A x|| / ||x||`` for the final iterate, which is an
    upper bound on ``sigma_min`` that converges quadratically in the
    eigenvector error.
    """
    A = as_complex_matrix(M)
    n = A.shape[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    if np.any(np.diagonal(lu) == 0):
        return SigmaMin(0.0, True, 0)
    x = np.ones(n, dtype=np.complex128) + 1j * np.arange(n) / max(n, 1)
    x /= np.linalg.norm(x)
    est = np.inf
    for it in range(1, max_iter + 1):
        y = scipy.linalg.lu_solve((lu, piv), x, trans=2, check_finite=False)
        z = scipy.linalg.lu_solve((lu, piv), y, trans=0, check_finite=False)
        nz = np.linalg.norm(z)
        if not np.isfinite(nz) or nz == 0:
            return SigmaMin(0.0, True, it)
        x = z / nz
        new = float(np.linalg.norm(A @ x))
        if abs(new - est) <= rtol * new:
            return SigmaMin(new, False, it)
        est = new
    return SigmaMin(est, False, max_iter)


def smallest_singular_value(M) -> float:
    return sigma_min_detail(M).value


# --------------------------------------------------------------------------
# spectral metrics


def matching_distance(A, B) -> float:
    """Optimal bottleneck matching distance between two multisets of complex numbers."""
    a = np.asarray(A, dtype=np.complex128).ravel()
    b = np.asarray(B, dtype=np.complex128).ravel()
    if a.size != b.size:
        raise CardinalityMismatch(f"multisets of sizes {a.size} and {b.size}")
    if a.size == 0:
        return 0.0
    C = np.abs(a[:, None] - b[None, :])
    levels = np.unique(C)
    lo, hi = 0, levels.size - 1
    # smallest threshold admitting a perfect matching; feasibility via assignment
    while lo < hi:
        mid = (lo + hi) // 2
        cost = (C > levels[mid]).astype(float)
        r, c = linear_sum_assignment(cost)
        if cost[r, c].sum() == 0:
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])


def min_gap(eigs) -> float:
    z = np.asarray(eigs, dtype=np.complex128).ravel()
    if z.size < 2:
        raise TooFewEigenvalues("gap needs at least two eigenvalues")
    return float(min(abs(a - b) for a, b in itertools.combinations(z, 2)))
