"""Distance-to-spectrum estimation and the six-point annulus net."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveParameter
from .iqr import tau_pow_detail
from .matrix import RngStream, sample_disk
from .scalar import mth_root_log

ROOT_ACCURACY = 1e-3


@dataclass
class DistSpecResult:
    tau: float
    log_tau_pow: float
    precondition_ok: bool | None
    ops: int


def dist_spec_detail(H, s: complex, m: int, **kwargs) -> DistSpecResult:
    """Estimate ``dist(s, Spec H)`` as ``||e_n^* (s - H)^{-m}||^{-1/m}``.

    Keyword arguments are forwarded to :func:`smalleig.iqr.tau_pow_detail`
    (mode, C, kappa_v, dist, norm_bound).
    """
    tp = tau_pow_detail(H, s, m, **kwargs)
    tau = mth_root_log(tp.log_value, int(m), ROOT_ACCURACY)
    return DistSpecResult(tau, tp.log_value, tp.precondition_ok, tp.ops)


def dist_spec(H, s: complex, m: int, **kwargs) -> float:
    return dist_spec_detail(H, s, m, **kwargs).tau


def choose_m(eps: float, zeta: float, n: int, p: float) -> int:
    """Power used by the distance estimator: ceil(12 (log(n zeta/eps) + log(1/p)/2)), at least 1."""
    if not (eps > 0 and zeta > 0 and p > 0):
        raise NonPositiveParameter("eps, zeta and p must be positive")
    if p > 1:
        raise NonPositiveParameter(f"p is a probability mass, got {p!r}")
    m = math.ceil(12.0 * (math.log(n * zeta / eps) + 0.5 * math.log(1.0 / p)))
    return max(m, 1)


@dataclass
class NetPoints:
    center: complex
    tau: float
    w: complex
    points: np.ndarray  # six complex points, index l-1 for l = 1..6

    def __iter__(self):
        return iter(self.points)


def net_offsets(tau: float) -> np.ndarray:
    return np.array([tau * cmath.exp(1j * math.pi * l / 3.0) for l in range(1, 7)])


def build_net(s: complex, tau: float, eta2: float, rng: RngStream) -> NetPoints:
    """Six points ``s + tau e^{i pi l / 3} + w`` sharing one ``w ~ Unif(D(0, eta2))``."""
    if not tau > 0:
        raise NonPositiveParameter(f"tau must be positive, got {tau!r}")
    if eta2 < 0:
        raise NonPositiveParameter(f"eta2 must be nonnegative, got {eta2!r}")
    w = sample_disk(eta2, rng)
    pts = s + net_offsets(tau) + w
    return NetPoints(complex(s), float(tau), w, pts)


def regularize_shift(s: complex, eta2: float, rng: RngStream) -> complex:
    """Return ``s + w`` with ``w ~ Unif(D(0, eta2))``."""
    if eta2 < 0:
        raise NonPositiveParameter(f"eta2 must be nonnegative, got {eta2!r}")
    return complex(s) + sample_disk(eta2, rng)
