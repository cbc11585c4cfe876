"""Seeded test instances with certified shattering parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..globaldata import GlobalData
from ..hessenberg import rhess
from ..matrix import RngStream, operator_norm_estimate, sample_ginibre
from .oracle import min_gap, oracle_eigenvalues
from .pseudospectra import ShatteringCertificate, check_shattered
from .spectral import SpectralMeasure, kappa_v_surrogate, spectral_measure


@dataclass
class ShatteredInstance:
    H: np.ndarray
    eigenvalues: np.ndarray
    eps: float
    zeta: float
    kappa: float
    measure: SpectralMeasure
    certificate: ShatteringCertificate
    global_data: GlobalData

    @property
    def p(self) -> float:
        return self.measure.min_mass

    @property
    def gap(self) -> float:
        return min_gap(self.eigenvalues) if len(self.eigenvalues) > 1 else math.inf


def _separated_points(n: int, rng: RngStream, min_sep: float) -> np.ndarray:
    pts: list[complex] = []
    while len(pts) < n:
        r, theta = math.sqrt(rng.uniform()), 2 * math.pi * rng.uniform()
        z = complex(r * math.cos(theta), r * math.sin(theta))
        if all(abs(z - w) >= min_sep for w in pts):
            pts.append(z)
    return np.array(pts)


def shattered_instance(n: int, rng: RngStream, noise: float = 0.3, max_tries: int = 20) -> ShatteredInstance:
    """Hessenberg matrix with separated spectrum and certified ``(eps, zeta)``.

    A diagonal of well-separated points in the unit disk is perturbed by
    ``noise`` times an upper-triangular Ginibre block (nonnormal, spectrum
    unchanged), conjugated by a random unitary and reduced by RHess.
    ``zeta`` is a third of the oracle gap and ``eps = zeta / (4 kappa)``.
    """
    for attempt in range(max_tries):
        r = rng.child(attempt)
        D = np.diag(_separated_points(n, r.child(0), 1.2 / math.sqrt(n)))
        T = D + noise * np.triu(sample_ginibre(n, r.child(1)), 1)
        Q, _ = np.linalg.qr(r.child(2).standard_complex_normal((n, n)))
        H = rhess(Q @ T @ Q.conj().T, r.child(3))
        eigs = oracle_eigenvalues(H)
        if n == 1:
            zeta, kappa = 0.5, 1.0
        else:
            zeta = min_gap(eigs) / 3.0
            kappa = kappa_v_surrogate(H)
        eps = zeta / (4.0 * kappa)
        cert = check_shattered(H, eps, zeta, zeta / 4.0, centers=eigs)
        if not cert.verdict:
            continue
        measure = spectral_measure(H) if n > 1 else SpectralMeasure(eigs, np.ones(1))
        g = GlobalData(n, operator_norm_estimate(H), eps, zeta)
        return ShatteredInstance(H, eigs, eps, zeta, kappa, measure, cert, g)
    raise RuntimeError(f"no certified instance after {max_tries} tries")
