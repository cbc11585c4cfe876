"""Pseudospectrum grids and shattering certificates.

``f(z) = sigma_min(z - M)`` is 1-Lipschitz, so sampled values carry over
to a neighbourhood of each sample. Containment of the eps-pseudospectrum
in the disks ``D(lambda_i, zeta)`` is certified on the boundary circles:
every connected component of the pseudospectrum contains an eigenvalue,
so if ``f > eps`` on each circle, no component can leave its disk.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import GridTooCoarse, NonPositiveParameter
from ..matrix import as_complex_matrix
from .oracle import oracle_eigenvalues

MAX_BISECTIONS = 12


def sigma_min_batch(M: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``sigma_min(z_k I - M)`` for every point of ``z`` (batched LAPACK SVD)."""
    n = M.shape[0]
    z = np.asarray(z, dtype=np.complex128).ravel()
    stack = z[:, None, None] * np.eye(n)[None, :, :] - M[None, :, :]
    return np.linalg.svd(stack, compute_uv=False)[:, -1]


@dataclass
class ShatteringCertificate:
    centers: np.ndarray
    zeta: float
    eps: float
    separated: bool
    contained: bool
    min_boundary_sigma: float
    reason: str = ""

    @property
    def verdict(self) -> bool:
        return self.separated and self.contained

    def __bool__(self) -> bool:
        return self.verdict


def _circle_certified(M, center, zeta, eps, step) -> tuple[bool, float, str]:
    k = max(8, math.ceil(2 * math.pi * zeta / step))
    theta = np.linspace(0.0, 2 * math.pi, k, endpoint=False)
    pending = [(t, 2 * math.pi / k) for t in theta]
    low = math.inf
    for _ in range(MAX_BISECTIONS + 1):
        t = np.array([a for a, _ in pending])
        vals = sigma_min_batch(M, center + zeta * np.exp(1j * t))
        low = min(low, float(vals.min()))
        if np.any(vals <= eps):
            return False, low, f"sigma_min <= eps on the circle around {complex(center):.6g}"
        nxt = []
        for (a, w), f in zip(pending, vals):
            # arc of angular width w centred at a has radius zeta*w/2 around its midpoint
            if f - zeta * w / 2 <= eps:
                nxt += [(a - w / 4, w / 2), (a + w / 4, w / 2)]
        if not nxt:
            return True, low, ""
        pending = nxt
    return False, low, "undecided at finest resolution"


def check_shattered(M, eps: float, zeta: float, grid_step: float, centers=None) -> ShatteringCertificate:
    """Certify that the eps-pseudospectrum lies in disjoint, separated radius-zeta disks.

    Separation requires centers at least ``3 zeta`` apart (disks at least
    ``zeta`` apart). ``True`` is a certificate; ``False`` means a violation
    was found or the adaptive refinement could not decide.
    """
    if not (eps >= 0 and zeta > 0 and grid_step > 0):
        raise NonPositiveParameter("need eps >= 0, zeta > 0 and grid_step > 0")
    if grid_step > zeta / 4:
        raise GridTooCoarse(f"grid_step {grid_step:g} exceeds zeta/4 = {zeta / 4:g}")
    M = as_complex_matrix(M)
    c = oracle_eigenvalues(M) if centers is None else np.asarray(centers, dtype=np.complex128)
    separated = all(abs(a - b) >= 3 * zeta for a, b in itertools.combinations(c, 2))
    cert = ShatteringCertificate(c, zeta, eps, separated, False, math.inf)
    if not separated:
        cert.reason = "disks closer than zeta"
        return cert
    for center in c:
        ok, low, why = _circle_certified(M, center, zeta, eps, grid_step)
        cert.min_boundary_sigma = min(cert.min_boundary_sigma, low)
        if not ok:
            cert.reason = why
            return cert
    cert.contained = True
    return cert


def pseudospectrum_grid(M, eps: float, box: tuple[float, float, float, float], step: float):
    """Rows ``(re, im, sigma_min, inside)`` on a rectangular grid; ``inside`` is ``sigma_min <= eps``."""
    x0, x1, y0, y1 = box
    if step <= 0:
        raise NonPositiveParameter("step must be positive")
    if x1 < x0 or y1 < y0:
        raise ValueError("box must satisfy xmin <= xmax and ymin <= ymax")
    if step > min(x1 - x0, y1 - y0) and (x1 > x0 or y1 > y0):
        raise ValueError("step exceeds the box width")
    M = as_complex_matrix(M)
    xs = x0 + step * np.arange(int(math.floor((x1 - x0) / step + 1e-9)) + 1)
    ys = y0 + step * np.arange(int(math.floor((y1 - y0) / step + 1e-9)) + 1)
    Z = (xs[None, :] + 1j * ys[:, None]).ravel()
    s = sigma_min_batch(M, Z)
    return [(float(z.real), float(z.imag), float(v), bool(v <= eps)) for z, v in zip(Z, s)]


def write_grid_csv(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["re", "im", "sigma_min", "in_pseudospectrum"])
    for re, im, s, inside in rows:
        w.writerow([repr(re), repr(im), repr(s), int(inside)])
