"""Decoupling by fixed-shift QR steps, and splitting at small subdiagonals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DecoupleBudgetExceeded, NonPositiveParameter
from .iqr import iqr_step
from .matrix import check_hessenberg


def decouple_cap(kappa_v: float, p: float, omega: float, d: float) -> int:
    """Steps after which some iterate has ``|H_{n,n-1}| <= omega``.

    ``kappa_v`` bounds the eigenvector condition number, ``p`` the mass of
    the target eigenvalue and ``d`` the distance of the shift to it; the
    bound is ``ceil(log(kappa_v^2/p) / (2 log(3 omega/(4 d))))``.
    """
    if not (kappa_v > 0 and p > 0 and omega > 0 and d > 0):
        raise NonPositiveParameter("kappa_v, p, omega and d must be positive")
    ratio = 3.0 * omega / (4.0 * d)
    if ratio <= 1.0:
        raise NonPositiveParameter(f"shift too far: need d < 3 omega/4, got d={d:g}, omega={omega:g}")
    return max(1, math.ceil(math.log(kappa_v ** 2 / p) / (2.0 * math.log(ratio))))


@dataclass
class DecoupleResult:
    H: np.ndarray
    steps: int
    subdiagonals: list = field(default_factory=list)  # |H_{n,n-1}| after each step
    ops: int = 0


def decouple_detail(H, lambda_hat: complex, omega: float, m_cap: int) -> DecoupleResult:
    H = check_hessenberg(H)
    n = H.shape[0]
    if omega <= 0:
        raise NonPositiveParameter("omega must be positive")
    if m_cap < 1:
        raise NonPositiveParameter("m_cap must be >= 1")
    if n == 1:
        return DecoupleResult(H, 0)
    out = DecoupleResult(H, 0, [abs(H[n - 1, n - 2])])
    while abs(H[n - 1, n - 2]) > omega:
        if out.steps >= m_cap:
            raise DecoupleBudgetExceeded(
                f"|H_(n,n-1)| = {abs(H[n - 1, n - 2]):.3g} > omega = {omega:.3g} after {m_cap} steps"
            )
        res = iqr_step(H, lambda_hat)
        H = res.H_next
        out.steps += 1
        out.ops += res.ops
        out.subdiagonals.append(abs(H[n - 1, n - 2]))
    out.H = H
    return out


def decouple(H, lambda_hat: complex, omega: float, m_cap: int) -> np.ndarray:
    """Apply QR steps at ``lambda_hat`` until the last subdiagonal is at most ``omega``."""
    return decouple_detail(H, lambda_hat, omega, m_cap).H


@dataclass
class DeflationSplit:
    blocks: list
    cuts: list  # i such that H[i+1, i] was set to zero (0-based)
    zeroed: np.ndarray

    @property
    def sizes(self) -> list[int]:
        return [b.shape[0] for b in self.blocks]


def deflate(H, omega: float) -> DeflationSplit:
    """Zero every subdiagonal of magnitude ``<= omega`` and return the diagonal blocks."""
    H = check_hessenberg(H).copy()
    n = H.shape[0]
    cuts = [i for i in range(n - 1) if abs(H[i + 1, i]) <= omega]
    for i in cuts:
        H[i + 1, i] = 0.0
    edges = [0] + [i + 1 for i in cuts] + [n]
    blocks = [H[a:b, a:b].copy() for a, b in zip(edges[:-1], edges[1:])]
    return DeflationSplit(blocks, cuts, H)
