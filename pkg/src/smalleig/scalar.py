"""Precision configuration, unit roundoff and the m-th root primitive.

The solver itself runs in hardware double precision. Extended precision
(used by the verification oracles) is delegated to mpmath, configured
through :class:`PrecisionConfig` so that both sides agree on what "bits"
means: the unit roundoff is ``2**(1 - bits)``.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import mpmath

from .errors import NonPositiveInput, ParameterOutOfRange, PrecisionInsufficient

DOUBLE_BITS = 53

# exp(log(a)/m) at double precision has relative error at most
# (2|log a|/m + 2) u; |log a| <= 709 for finite doubles, so
# ROOT_CONSTANT * m * u dominates it for every m >= 1.
ROOT_CONSTANT = 1420


@dataclass(frozen=True)
class PrecisionConfig:
    bits: int = DOUBLE_BITS
    mode: str = "hardware-double"

    def __post_init__(self):
        if self.mode not in ("hardware-double", "extended"):
            raise ParameterOutOfRange(f"unknown precision mode {self.mode!r}")
        if self.mode == "hardware-double" and self.bits != DOUBLE_BITS:
            raise ParameterOutOfRange("hardware-double mode forces bits = 53")
        if self.bits < DOUBLE_BITS:
            raise ParameterOutOfRange(f"bits must be >= {DOUBLE_BITS}, got {self.bits}")

    @classmethod
    def extended(cls, bits: int) -> "PrecisionConfig":
        return cls(bits=bits, mode="extended")

    @property
    def u(self) -> float:
        return unit_roundoff(self)

    @contextlib.contextmanager
    def workprec(self):
        """Context in which mpmath arithmetic runs at this configuration's width."""
        with mpmath.workprec(self.bits):
            yield


HARDWARE = PrecisionConfig()


def unit_roundoff(cfg: PrecisionConfig = HARDWARE) -> float:
    # exact power of two; ldexp avoids any rounding in the exponent
    return math.ldexp(1.0, 1 - cfg.bits)


def _check_root_request(m: int, eps_rel: float, cfg: PrecisionConfig) -> None:
    if m < 1 or int(m) != m:
        raise NonPositiveInput(f"m must be a positive integer, got {m!r}")
    if not (0 < eps_rel <= 0.5):
        raise ParameterOutOfRange(f"eps_rel must lie in (0, 1/2], got {eps_rel!r}")
    if eps_rel < m * ROOT_CONSTANT * unit_roundoff(cfg):
        raise PrecisionInsufficient(
            f"eps_rel={eps_rel:g} below m*c*u={m * ROOT_CONSTANT * unit_roundoff(cfg):g}"
        )


def mth_root(a: float, m: int, eps_rel: float = 1e-3, cfg: PrecisionConfig = HARDWARE) -> float:
    """Return ``a**(1/m)`` to relative accuracy ``eps_rel``.

    Computed as ``exp(log(a)/m)``. Raises :class:`NonPositiveInput` for
    ``a <= 0`` and :class:`PrecisionInsufficient` when ``eps_rel`` is
    finer than ``m * ROOT_CONSTANT * u``.
    """
    if not a > 0 or not math.isfinite(a):
        raise NonPositiveInput(f"mth_root needs a finite positive input, got {a!r}")
    _check_root_request(m, eps_rel, cfg)
    if m == 1:
        return float(a)
    if cfg.mode == "extended":
        with cfg.workprec():
            return float(mpmath.root(mpmath.mpf(a), m))
    return math.exp(math.log(a) / m)


def mth_root_log(log_a: float, m: int, eps_rel: float = 1e-3, cfg: PrecisionConfig = HARDWARE) -> float:
    """``exp(log_a / m)``: the m-th root of a number given by its natural log.

    Used where ``a`` itself over- or underflows (products of thousands of
    R-factor corner entries).
    """
    if not math.isfinite(log_a):
        raise NonPositiveInput(f"log input must be finite, got {log_a!r}")
    _check_root_request(m, eps_rel, cfg)
    return math.exp(log_a / m)
