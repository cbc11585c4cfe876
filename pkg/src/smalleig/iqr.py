"""Degree-1 shifted QR step on Hessenberg matrices, its compositions, and tau^m.

One step with shift ``s`` factors ``H - s = QR`` with ``n - 1`` Givens
rotations (R with a nonnegative diagonal) and returns ``RQ + s``. The
``(n, n)`` corner of each ``R`` is recorded: the product of those corners
over ``m`` steps at a fixed shift equals ``||e_n^* (s - H)^{-m}||^{-1}``.

The inner loops run in a numba kernel; each call also reports how many
complex arithmetic operations it performed, so the cost model can be
checked against the measured count.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveParameter, PrecisionInsufficient, SingularEncounter
from .matrix import check_hessenberg, opnorm
from .scalar import HARDWARE, PrecisionConfig, unit_roundoff

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

log = logging.getLogger(__name__)


def nu_iqr(n: int) -> float:
    """Stability constant of the Givens-based step."""
    return 32.0 * n ** 1.5


@njit(cache=True)
def _iqr_kernel(H, shifts, rnn):
    n = H.shape[0]
    ops = 0
    g = np.empty((max(n - 1, 1), 4), dtype=np.complex128)
    for t in range(shifts.shape[0]):
        s = shifts[t]
        for i in range(n):
            H[i, i] -= s
        ops += n
        # H - s = Q R: rotate rows k, k+1 to kill the subdiagonal entry
        for k in range(n - 1):
            a = H[k, k]
            b = H[k + 1, k]
            r = math.hypot(abs(a), abs(b))
            if r == 0.0:
                g11 = 1.0 + 0j
                g12 = 0j
                g21 = 0j
                g22 = 1.0 + 0j
            else:
                g11 = a.conjugate() / r
                g12 = b.conjugate() / r
                g21 = -b / r
                g22 = a / r
            g[k, 0] = g11
            g[k, 1] = g12
            g[k, 2] = g21
            g[k, 3] = g22
            H[k, k] = r
            H[k + 1, k] = 0j
            for j in range(k + 1, n):
                x = H[k, j]
                y = H[k + 1, j]
                H[k, j] = g11 * x + g12 * y
                H[k + 1, j] = g21 * x + g22 * y
            ops += 10 + 6 * (n - k - 1)
        # positive diagonal convention: only R_nn can carry a phase
        rn = H[n - 1, n - 1]
        arn = abs(rn)
        rnn[t] = arn
        d = rn / arn if arn != 0.0 else 1.0 + 0j
        H[n - 1, n - 1] = arn + 0j
        # R Q with Q = G_0^* ... G_{n-2}^* diag(1, .., 1, d)
        for k in range(n - 1):
            c11 = g[k, 0].conjugate()
            c12 = g[k, 1].conjugate()
            c21 = g[k, 2].conjugate()
            c22 = g[k, 3].conjugate()
            for i in range(k + 2):
                x = H[i, k]
                y = H[i, k + 1]
                H[i, k] = x * c11 + y * c12
                H[i, k + 1] = x * c21 + y * c22
            ops += 6 * (k + 2)
        for i in range(n):
            H[i, n - 1] *= d
            H[i, i] += s
        ops += 2 * n + 2
    return ops


@dataclass
class IqrResult:
    H_next: np.ndarray
    r_nn_list: np.ndarray
    ops: int = 0


def iqr_poly(H, shifts, C: float | None = None) -> IqrResult:
    """Compose single-shift steps: IQR(...IQR(IQR(H, s1), s2)..., sm).

    An empty shift list is the identity. When ``C`` is given, every shift
    must lie in the disk ``D(0, C ||H||)``.
    """
    H = check_hessenberg(H)
    shifts = np.atleast_1d(np.asarray(shifts, dtype=np.complex128))
    if C is not None and shifts.size:
        bound = C * opnorm(H)
        if np.max(np.abs(shifts)) > bound:
            raise ValueError(f"shift outside D(0, {C} ||H||)")
    work = np.array(H, dtype=np.complex128, order="C")
    rnn = np.empty(shifts.size, dtype=np.float64)
    ops = _iqr_kernel(work, shifts, rnn) if shifts.size else 0
    return IqrResult(work, rnn, int(ops))


def iqr_step(H, s: complex) -> IqrResult:
    return iqr_poly(H, [s])


def iqr_backward_bound(normH: float, n: int, m: int, C: float, u: float | None = None) -> float:
    """Backward error budget 1.4 m (1 + C) ||H|| nu(n) u of m composed steps."""
    if u is None:
        u = unit_roundoff()
    return 1.4 * m * (1.0 + C) * normH * nu_iqr(n) * u


# --------------------------------------------------------------------------
# tau^m


def comptau_required_log2_u(n: int, m: int, C: float, normH: float, kappa_v: float, dist: float) -> float:
    """log2 of :func:`comptau_required_u`; finite even when the value underflows."""
    return -math.log2(6e3 * kappa_v * nu_iqr(n)) + 2 * m * math.log2(dist / ((2.0 + 2.0 * C) * normH))


def comptau_required_u(n: int, m: int, C: float, normH: float, kappa_v: float, dist: float) -> float:
    """Largest unit roundoff under which the tau^m computation is 0.1%-accurate."""
    return (1.0 / (6e3 * kappa_v * nu_iqr(n))) * (dist / ((2.0 + 2.0 * C) * normH)) ** (2 * m)


@dataclass
class TauPow:
    value: float  # prod r_nn, may over/underflow; use log_value
    log_value: float
    r_nn: np.ndarray
    precondition_ok: bool | None
    ops: int


def tau_pow_detail(
    H,
    s: complex,
    m: int,
    *,
    mode: str = "practical",
    C: float = 10.0,
    kappa_v: float | None = None,
    dist: float | None = None,
    norm_bound: float | None = None,
    cfg: PrecisionConfig = HARDWARE,
) -> TauPow:
    """Run ``m`` steps at shift ``s`` and return the product of the R corners.

    The precision precondition is evaluated when ``kappa_v`` and ``dist``
    (a lower bound on the distance of ``s`` to the spectrum) are supplied.
    In ``theory`` mode a violated or unevaluable precondition raises
    :class:`PrecisionInsufficient`; in ``practical`` mode it is logged.
    """
    if m < 1 or int(m) != m:
        raise NonPositiveParameter(f"m must be a positive integer, got {m!r}")
    H = check_hessenberg(H)
    n = H.shape[0]
    ok = None
    if kappa_v is not None and dist is not None:
        normH = norm_bound if norm_bound is not None else opnorm(H)
        need = comptau_required_log2_u(n, m, C, normH, kappa_v, dist)
        ok = math.log2(unit_roundoff(cfg)) <= need
        if not ok:
            msg = f"tau^m precondition violated: log2 u={math.log2(unit_roundoff(cfg)):.1f} > {need:.1f}"
            if mode == "theory":
                bits = 1 + math.ceil(-need)
                raise PrecisionInsufficient(msg, required_bits=bits)
            log.debug(msg)
    elif mode == "theory":
        raise PrecisionInsufficient("theory mode needs kappa_v and dist to check the precondition")

    res = iqr_poly(H, np.full(int(m), s, dtype=np.complex128))
    if np.any(res.r_nn_list == 0.0):
        raise SingularEncounter(f"R_nn vanished at shift {s!r}: shift lies on the spectrum numerically")
    with np.errstate(over="ignore", under="ignore"):
        log_value = float(np.sum(np.log(res.r_nn_list)))
        value = float(np.exp(log_value))
    return TauPow(value, log_value, res.r_nn_list, ok, res.ops + int(m))


def compute_tau_pow(H, s: complex, m: int, **kwargs) -> float:
    """``prod_k (R_k)_nn`` over ``m`` steps at shift ``s``, i.e. tau^m."""
    return tau_pow_detail(H, s, m, **kwargs).value


def log_tau_pow(H, s: complex, m: int, **kwargs) -> float:
    """Natural log of :func:`compute_tau_pow`, safe against over/underflow."""
    return tau_pow_detail(H, s, m, **kwargs).log_value
