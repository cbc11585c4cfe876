"""Recursive eigenvalue driver, parameter ledger, preprocessing and precision calculator.

``solve`` is the end-to-end entry point: it perturbs the input by a small
Ginibre matrix (which shatters the pseudospectrum with high probability),
derives the global data ``(n, Sigma, eps, zeta)`` and runs the recursion
``small_eig``. Each recursion level randomizes a Hessenberg form, finds one
eigenvalue by net descent, decouples it with fixed-shift QR steps, deflates
and recurses on the diagonal blocks.

Two modes are supported. ``theory`` evaluates the precision the worst-case
analysis demands and refuses to run when hardware doubles fall short
(always, in practice). ``practical`` runs in doubles with capped iteration
depths and a roundoff floor on the deflation threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import mpmath
import numpy as np

from .deflation import decouple_cap, decouple_detail, deflate
from .errors import (
    DecoupleBudgetExceeded,
    ParameterOutOfRange,
    PrecisionInsufficient,
    RetryBudgetExceeded,
    ZeroMatrix,
)
from .globaldata import GlobalData
from .hessenberg import C_HESSENBERG, rhess
from .iqr import nu_iqr
from .matrix import C_HOUSEHOLDER, RngStream, as_complex_matrix, operator_norm_estimate, sample_ginibre
from .oneeig import one_eig, one_eig_params
from .scalar import DOUBLE_BITS, ROOT_CONSTANT, unit_roundoff

MODES = ("theory", "practical")


# --------------------------------------------------------------------------
# parameters


@dataclass
class ParameterLedger:
    Delta: float
    omega: float
    beta: float
    p: float
    varphi: float
    m1: int
    eta1: float
    eta2: float
    m2: int
    gamma: float | None = None
    W: float | None = None
    required_bits: int | None = None
    omega_theory: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


def _check_unit_interval(name: str, x: float) -> None:
    if not (0 < x < 1):
        raise ParameterOutOfRange(f"{name} must lie in (0, 1), got {x!r}")


# Ledger formulas are evaluated at this width and rounded once, so every
# field is the correctly rounded double of the exact expression.
_LEDGER_PREC = 113


def compute_parameters(delta: float, phi: float, g: GlobalData) -> ParameterLedger:
    _check_unit_interval("delta", delta)
    _check_unit_interval("phi", phi)
    with mpmath.workprec(_LEDGER_PREC):
        n = mpmath.mpf(g.n)
        S, e, z = mpmath.mpf(g.Sigma), mpmath.mpf(g.eps), mpmath.mpf(g.zeta)
        Delta = mpmath.mpf(delta) * S / 2
        omega = min(e, Delta) / (3 * n)
        beta = omega / 20
        p = mpmath.mpf(phi) * e ** 2 / (2 * n ** 5 * z ** 2)
        varphi = mpmath.mpf(phi) / (2 * n)
        m1 = int(mpmath.ceil(12 * mpmath.log(n * z / e) + 6 * mpmath.log(1 / p)))
        m2 = int(mpmath.ceil(mpmath.log(z ** 2 * n ** 2 / (p * e ** 2)) / (2 * mpmath.log(15))))
        eta2 = min(beta / 5, z / 3)
        eta1 = eta2 * mpmath.sqrt(varphi / (12 * mpmath.log(3 * S / (10 * beta))))
        vals = [float(x) for x in (Delta, omega, beta, p, varphi)]
        etas = float(eta1), float(eta2)
    assert m2 <= m1, (m1, m2)
    Delta, omega, beta, p, varphi = vals
    return ParameterLedger(Delta, omega, beta, p, varphi, m1, etas[0], etas[1], m2, omega_theory=omega)


def shattering_parameters(norm_M: float, gamma: float, phi: float, n: int) -> tuple[float, float]:
    """``(eps, zeta)`` such that the eps-pseudospectrum of ``M + gamma G`` is zeta-shattered w.p. ``1 - phi``."""
    if not (0 < phi < 0.5):
        raise ParameterOutOfRange(f"phi must lie in (0, 1/2), got {phi!r}")
    if not (0 < gamma < norm_M / 2):
        raise ParameterOutOfRange(f"gamma must lie in (0, ||M||/2), got {gamma!r}")
    with mpmath.workprec(_LEDGER_PREC):
        f, gm, nn = mpmath.mpf(phi), mpmath.mpf(gamma), mpmath.mpf(n)
        zeta = mpmath.sqrt(f) * gm / (2 * mpmath.sqrt(3) * nn ** 1.5)
        eps = gm ** 2 * f / (180 * mpmath.sqrt(2) * mpmath.mpf(norm_M) * mpmath.log(1 / f) * nn ** 3)
        return float(eps), float(zeta)


def ginibre_norm_threshold(n: int, phi: float) -> float:
    """``W`` with ``P[||G_n|| > W] <= phi/3``."""
    return 2.0 * math.sqrt(2.0) + math.sqrt(math.log(6.0 / phi)) / math.sqrt(n)


class PrecisionRequirement(NamedTuple):
    bits: int
    asymptotic: str


def _u_small_eig_log2(ledger: ParameterLedger, g: GlobalData) -> mpmath.mpf:
    c = max(C_HOUSEHOLDER, C_HESSENBERG, float(ROOT_CONSTANT))
    with mpmath.workprec(200):
        eps, zeta, Sigma = mpmath.mpf(g.eps), mpmath.mpf(g.zeta), mpmath.mpf(g.Sigma)
        pre = eps / (6000 * mpmath.mpf(c) * mpmath.mpf(nu_iqr(g.n)) * g.n * zeta)
        return mpmath.log(pre, 2) + 2 * ledger.m1 * mpmath.log(mpmath.mpf(ledger.eta1) / (44 * Sigma), 2)


def required_precision(ledger: ParameterLedger, g: GlobalData) -> PrecisionRequirement:
    """Mantissa bits (unit roundoff ``2**(1-bits)``) meeting the worst-case precision bound."""
    lg = _u_small_eig_log2(ledger, g)
    bits = int(mpmath.ceil(-lg)) + 1
    return PrecisionRequirement(bits, "O(log^2(n/(delta*phi)))")


# --------------------------------------------------------------------------
# preprocessing


@dataclass
class Preprocessed:
    Mp: np.ndarray
    global_data: GlobalData
    ledger: ParameterLedger
    Sigma_input: float
    delta: float
    phi: float

    def __iter__(self):
        return iter((self.Mp, self.global_data, self.ledger))


def preprocess(M, delta: float, phi: float, rng: RngStream) -> Preprocessed:
    """Add ``gamma G`` and derive the global data for ``small_eig(Mp, delta/2, phi/3)``."""
    M = as_complex_matrix(M)
    _check_unit_interval("delta", delta)
    _check_unit_interval("phi", phi)
    n = M.shape[0]
    Sigma = operator_norm_estimate(M)
    if Sigma == 0.0:
        raise ZeroMatrix("input matrix is zero; its spectrum is {0} with multiplicity n")
    W = ginibre_norm_threshold(n, phi)
    gamma = delta * Sigma / (4.0 * W)
    Mp = M + gamma * sample_ginibre(n, rng)
    # Sigma bounds ||M||; inflate so it also bounds ||Mp|| <= ||M|| (1 + delta/2)
    Sigma_g = Sigma * (1.0 + delta / 2.0)
    eps, zeta = shattering_parameters(Sigma, gamma, phi / 3.0, n)
    g = GlobalData(n, Sigma_g, eps, zeta)
    ledger = compute_parameters(delta / 2.0, phi / 3.0, g)
    ledger.gamma, ledger.W = gamma, W
    return Preprocessed(Mp, g, ledger, Sigma, delta, phi)


# --------------------------------------------------------------------------
# recursion


@dataclass
class SolverConfig:
    mode: str = "practical"
    m_cap: int = 256
    decouple_floor: int = 8
    omega_floor_factor: float = 1024.0
    retry_budget: int | None = None
    keep_traces: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterOutOfRange(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.m_cap < 1:
            raise ParameterOutOfRange("m_cap must be >= 1")


def practical_ledger(ledger: ParameterLedger, g: GlobalData, cfg: SolverConfig) -> ParameterLedger:
    """Raise omega to a roundoff floor (never above Delta/(3n)); beta, eta1, eta2 follow."""
    floor = cfg.omega_floor_factor * g.n * unit_roundoff() * g.Sigma
    omega = min(max(ledger.omega, floor), ledger.Delta / (3.0 * g.n))
    if omega == ledger.omega:
        return ledger
    out = ParameterLedger(**asdict(ledger))
    out.omega = omega
    out.beta = omega / 20.0
    prm = one_eig_params(out.beta, out.varphi, out.p, g)
    out.eta1, out.eta2 = prm.eta1, prm.eta2
    return out


@dataclass
class EigenReport:
    eigenvalues: list
    n: int
    success: bool
    budget_used: int
    required_bits: int
    tree: dict
    traces: list = field(default_factory=list)
    ledger: ParameterLedger | None = None
    global_data: GlobalData | None = None
    retries: int = 0
    mode: str = "practical"
    message: str = ""

    @property
    def internal_vertices(self) -> int:
        def count(node):
            kids = node.get("children", [])
            return (1 if kids else 0) + sum(count(k) for k in kids)

        return count(self.tree)

    def to_json(self, traces: bool = False) -> dict:
        doc = {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "n": self.n,
            "success": self.success,
            "budget_used": self.budget_used,
            "required_bits": self.required_bits,
            "tree": self.tree,
            "retries": self.retries,
            "mode": self.mode,
            "ledger": self.ledger.to_json() if self.ledger else None,
            "global": self.global_data.to_json() if self.global_data else None,
        }
        if self.message:
            doc["message"] = self.message
        if traces:
            doc["traces"] = [t.to_json() for t in self.traces]
        return doc

    def dumps(self, traces: bool = False) -> str:
        return json.dumps(self.to_json(traces), indent=2) + "\n"


def _retry_budget(phi: float, cfg: SolverConfig) -> int:
    if cfg.retry_budget is not None:
        return cfg.retry_budget
    return math.ceil(math.log2(1.0 / phi)) + 3


def small_eig(
    M,
    delta: float,
    phi: float,
    g: GlobalData,
    rng: RngStream,
    mode: str = "practical",
    config: SolverConfig | None = None,
) -> EigenReport:
    """Backward-stable eigenvalues of ``M`` with global data ``g``.

    Raises :class:`RetryBudgetExceeded` when a block exhausts its retries
    and :class:`PrecisionInsufficient` in ``theory`` mode.
    """
    cfg = config if config is not None else SolverConfig(mode=mode)
    if config is not None and mode != cfg.mode:
        cfg = SolverConfig(**{**asdict(cfg), "mode": mode})
    M = as_complex_matrix(M)
    ledger = compute_parameters(delta, phi, g)
    req = required_precision(ledger, g)
    ledger.required_bits = req.bits
    if cfg.mode == "theory" and req.bits > DOUBLE_BITS:
        raise PrecisionInsufficient(
            f"worst-case analysis needs {req.bits} bits; hardware doubles carry {DOUBLE_BITS}",
            required_bits=req.bits,
        )
    work = practical_ledger(ledger, g, cfg) if cfg.mode == "practical" else ledger
    budget = _retry_budget(phi, cfg)
    m2 = work.m2 if cfg.mode == "theory" else max(min(work.m2, cfg.m_cap), cfg.decouple_floor)
    d_cap = max(decouple_cap(g.kappa_bound, work.p, work.omega, work.beta), m2)

    report = EigenReport([], M.shape[0], False, 0, req.bits, {}, ledger=work, global_data=g, mode=cfg.mode)

    def solve_block(B: np.ndarray, stream: RngStream) -> dict:
        nb = B.shape[0]
        if nb == 1:
            report.eigenvalues.append(complex(B[0, 0]))
            return {"n": 1, "eigenvalue": [float(B[0, 0].real), float(B[0, 0].imag)]}
        failures = 0
        while True:
            attempt = stream.child(failures)
            H = rhess(B, attempt.child(0))
            res = one_eig(H, work.beta, work.varphi, work.p, g, attempt.child(1),
                          m_cap=None if cfg.mode == "theory" else cfg.m_cap, mode=cfg.mode)
            if cfg.keep_traces:
                report.traces.append(res.trace)
            if res.correctness:
                try:
                    dec = decouple_detail(H, res.lambda_hat, work.omega, d_cap)
                    break
                except DecoupleBudgetExceeded:
                    pass
            failures += 1
            report.retries += 1
            if failures > budget:
                raise RetryBudgetExceeded(
                    f"block of size {nb}: {failures} consecutive failures (budget {budget})"
                )
        split = deflate(dec.H, work.omega)
        report.budget_used += 3
        for blk in split.blocks:
            # surviving subdiagonals exceed omega, so every block has norm >= omega
            assert blk.shape[0] == 1 or np.all(np.abs(np.diagonal(blk, -1)) > work.omega)
        children = [solve_block(blk, stream.child(1000 + k)) for k, blk in enumerate(split.blocks)]
        return {
            "n": nb,
            "lambda_hat": [res.lambda_hat.real, res.lambda_hat.imag],
            "decouple_steps": dec.steps,
            "cuts": split.cuts,
            "children": children,
        }

    report.tree = solve_block(M, rng)
    n = M.shape[0]
    assert report.internal_vertices <= max(n - 1, 0)
    assert report.budget_used <= 3 * max(n - 1, 0)
    assert len(report.eigenvalues) == n
    report.success = True
    return report


def solve(
    M,
    delta: float,
    phi: float,
    rng: RngStream,
    mode: str = "practical",
    config: SolverConfig | None = None,
) -> EigenReport:
    """Preprocess and run the recursion with ``(delta/2, phi/3)``."""
    pre = preprocess(M, delta, phi, rng.child(0))
    rep = small_eig(pre.Mp, delta / 2.0, phi / 3.0, pre.global_data, rng.child(1), mode, config)
    rep.ledger.gamma, rep.ledger.W = pre.ledger.gamma, pre.ledger.W
    return rep


def forward_eig(M, beta: float, phi: float, rng: RngStream, mode: str = "practical",
                config: SolverConfig | None = None) -> EigenReport:
    """Eigenvalues within ``beta ||M||`` of the true ones, via accuracy ``(beta/12)^n``."""
    if not (0 < beta <= 1):
        raise ParameterOutOfRange(f"beta must lie in (0, 1], got {beta!r}")
    M = as_complex_matrix(M)
    return solve(M, forward_delta(beta, M.shape[0]), phi, rng, mode, config)


def forward_delta(beta: float, n: int) -> float:
    return (beta / 12.0) ** n
