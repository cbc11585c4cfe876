"""Eigenvector-based diagnostics: spectral measure and the condition-number surrogate.

Both use the eigenvector matrix ``V`` with unit-norm columns, computed by
inverse iteration at the oracle eigenvalues. For such ``V``,
``||e_n^* V|| >= 1/||V^{-1}||``; together with Cauchy-Schwarz this makes
the two-sided functional-calculus inequality hold exactly with
``kappa = ||V|| ||V^{-1}||`` in place of the unknown infimum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import DefectiveOrClustered
from ..matrix import as_complex_matrix
from .oracle import min_gap, oracle_eigenvalues

CLUSTER_TOL = 1e-8


@dataclass
class SpectralMeasure:
    eigenvalues: np.ndarray
    masses: np.ndarray

    @property
    def min_mass(self) -> float:
        return float(self.masses.min())

    def expectation(self, f) -> float:
        """``E[|f(Z)|^2]^(1/2)`` for a vectorized ``f``."""
        return float(np.sqrt(np.sum(self.masses * np.abs(f(self.eigenvalues)) ** 2)))


def eigenvectors(M, eigs=None, sweeps: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Unit-norm right eigenvectors by inverse iteration at each (oracle) eigenvalue."""
    M = as_complex_matrix(M)
    n = M.shape[0]
    if eigs is None:
        eigs = oracle_eigenvalues(M)
    eigs = np.asarray(eigs, dtype=np.complex128)
    if n == 1:
        return eigs, np.ones((1, 1), dtype=np.complex128)
    scale = max(float(np.linalg.norm(M, 2)), 1.0)
    if min_gap(eigs) <= CLUSTER_TOL * scale:
        raise DefectiveOrClustered(f"eigenvalue gap {min_gap(eigs):.3g} below {CLUSTER_TOL:g} ||M||")
    nudge = 1e-12 * scale
    V = np.empty((n, n), dtype=np.complex128)
    for k, lam in enumerate(eigs):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(M - (lam + nudge) * np.eye(n), check_finite=False)
        x = np.ones(n, dtype=np.complex128) + 1j * np.linspace(0.0, 1.0, n)
        for _ in range(sweeps):
            x = scipy.linalg.lu_solve(lu, x, check_finite=False)
            x /= np.linalg.norm(x)
        V[:, k] = x
    resid = np.linalg.norm(M @ V - V * eigs[None, :], axis=0)
    if np.any(resid > 1e-8 * scale):
        raise DefectiveOrClustered("inverse iteration did not resolve every eigenvector")
    return eigs, V


def spectral_measure(H) -> SpectralMeasure:
    eigs, V = eigenvectors(H)
    w = np.abs(V[-1, :]) ** 2
    return SpectralMeasure(eigs, w / w.sum())


def kappa_v_surrogate(M) -> float:
    """``||V|| ||V^{-1}||`` for unit-column eigenvectors; within ``sqrt(n)`` of the infimum."""
    _, V = eigenvectors(M)
    return float(np.linalg.cond(V, 2))
