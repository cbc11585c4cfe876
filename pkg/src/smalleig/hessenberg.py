"""Bottom-up Householder Hessenberg reduction and its randomized wrapper.

The reduction works from the last row upwards: the reflector for row ``r``
acts on coordinates ``0..r-1`` and zeroes the entries of row ``r`` left of
the subdiagonal. No reflector touches coordinate ``n-1``, so the
accumulated unitary fixes ``e_n``. That is what lets RHess control the
last row of its output: conjugating first by a reflector sending ``e_n`` to
a random unit vector ``u`` makes ``e_n^* U^* = u^*`` for the composite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PrecisionInsufficient
from .matrix import (
    C_HOUSEHOLDER,
    HouseholderReflector,
    RngStream,
    as_complex_matrix,
    householder_vector,
    sample_unit_sphere,
)
from .scalar import HARDWARE, PrecisionConfig, unit_roundoff

# Backward-error constant of the reduction used in assertion budgets (tunable).
C_HESSENBERG = 20.0


@dataclass
class HessReduction:
    H: np.ndarray
    reflectors: list = field(default_factory=list)
    ops: int = 0

    def unitary(self) -> np.ndarray:
        """Accumulated ``Q`` with ``H = Q^* M Q`` (for tests and diagnostics)."""
        n = self.H.shape[0]
        Q = np.eye(n, dtype=np.complex128)
        for refl in self.reflectors:
            Q = Q @ refl.dense(n)
        return Q


def hess_bu(M, u: float | None = None) -> HessReduction:
    H = as_complex_matrix(M).copy()
    n = H.shape[0]
    if u is None:
        u = unit_roundoff()
    # Frobenius norm dominates the operator norm, so this only widens the skip
    skip_tol = 2.0 * n * u * float(np.linalg.norm(H, "fro"))
    out = HessReduction(H)
    for r in range(n - 1, 1, -1):
        x = H[r, : r - 1]
        if float(np.linalg.norm(x)) <= skip_tol:
            H[r, : r - 1] = 0.0
            continue
        v = householder_vector(np.conj(H[r, :r]), r - 1)
        beta = 2.0 / float(np.vdot(v, v).real)
        # H <- H P on columns 0..r (rows below r are already zero there)
        w = H[: r + 1, :r] @ v
        H[: r + 1, :r] -= beta * np.outer(w, v.conj())
        # H <- P H on rows 0..r-1
        z = v.conj() @ H[:r, :]
        H[:r, :] -= beta * np.outer(v, z)
        H[r, : r - 1] = 0.0
        out.reflectors.append(HouseholderReflector(v, 0))
        out.ops += 4 * r * (r + 1) + 4 * r * n
    return out


def rhess_required_u(n: int) -> float:
    return 1.0 / (20.0 * C_HOUSEHOLDER * n ** 1.5)


@dataclass
class RHessResult:
    H: np.ndarray
    u: np.ndarray
    reduction: HessReduction
    first: HouseholderReflector | None

    def unitary(self) -> np.ndarray:
        """Composite ``U`` with ``H = U^* M U`` and ``U e_n = u``."""
        n = self.H.shape[0]
        P = self.first.dense(n) if self.first is not None else np.eye(n, dtype=np.complex128)
        return P @ self.reduction.unitary()


def rhess_detail(M, rng: RngStream, cfg: PrecisionConfig = HARDWARE) -> RHessResult:
    M = as_complex_matrix(M)
    n = M.shape[0]
    u_mach = unit_roundoff(cfg)
    if u_mach > rhess_required_u(n):
        raise PrecisionInsufficient(
            f"unit roundoff {u_mach:g} exceeds {rhess_required_u(n):g} needed at n={n}"
        )
    if n == 1:
        return RHessResult(M.copy(), np.ones(1, dtype=np.complex128), HessReduction(M.copy()), None)
    uvec = sample_unit_sphere(n, rng)
    # rotate the phase so u_n is real and nonnegative; then P e_n = u exactly
    last = uvec[-1]
    if last != 0:
        uvec = uvec * (abs(last) / last)
    v = uvec.copy()
    v[-1] -= 1.0
    first = None
    A = M.copy()
    if np.linalg.norm(v) > 0:
        first = HouseholderReflector(v, 0)
        beta = first.beta
        A = A - beta * np.outer(A @ v, v.conj())
        A = A - beta * np.outer(v, v.conj() @ A)
    red = hess_bu(A, u_mach)
    return RHessResult(red.H, uvec, red, first)


def rhess(M, rng: RngStream, cfg: PrecisionConfig = HARDWARE) -> np.ndarray:
    """Hessenberg matrix unitarily similar to ``M`` with a uniformly random last row of the conjugator."""
    return rhess_detail(M, rng, cfg).H


def hess_backward_bound(normM: float, n: int, u: float | None = None) -> float:
    if u is None:
        u = unit_roundoff()
    return C_HESSENBERG * normM * n ** 2.5 * u


def rhess_backward_bound(normM: float, n: int, u: float | None = None) -> float:
    if u is None:
        u = unit_roundoff()
    return 3.0 * (C_HESSENBERG + C_HOUSEHOLDER) * normM * n ** 2.5 * u


def cost_model(n: int) -> float:
    return 10.0 / 3.0 * n ** 3
