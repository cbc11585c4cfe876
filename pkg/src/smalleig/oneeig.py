"""Net-descent shifted inverse iteration: one forward-approximate eigenvalue.

Starting from the regularized corner entry ``H_nn + w``, each round
estimates the distance ``tau`` to the spectrum, lays the six-point net on
the annulus ``0.9 tau <= |z - s| <= 1.12 tau`` and moves to the best net
point if its estimate contracts by 0.66. A round without contraction ends
the run with ``correctness = False``; retries belong to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .distspec import build_net, choose_m, dist_spec_detail
from .errors import NonPositiveParameter, RequiresViolation, SingularEncounter
from .globaldata import GlobalData
from .matrix import RngStream, check_hessenberg, opnorm, sample_disk

CONTRACTION = 0.66
EXIT_FACTOR = 0.9


@dataclass(frozen=True)
class OneEigParams:
    m: int
    eta1: float
    eta2: float
    beta: float
    varphi: float
    p: float
    m_uncapped: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def one_eig_params(beta: float, varphi: float, p: float, g: GlobalData, m_cap: int | None = None) -> OneEigParams:
    if not (beta > 0 and varphi > 0 and p > 0):
        raise NonPositiveParameter("beta, varphi and p must be positive")
    if beta > g.Sigma / 10:
        raise NonPositiveParameter(f"beta={beta:g} exceeds Sigma/10={g.Sigma / 10:g}")
    m = choose_m(g.eps, g.zeta, g.n, p)
    eta2 = min(beta / 5.0, g.zeta / 3.0)
    eta1 = eta2 * math.sqrt(varphi / (12.0 * math.log(3.0 * g.Sigma / (10.0 * beta))))
    m_used = m if m_cap is None else min(m, int(m_cap))
    return OneEigParams(m_used, eta1, eta2, beta, varphi, p, m)


def iteration_bound(Sigma: float, beta: float) -> int:
    """Number of contracting rounds after which success is guaranteed."""
    return math.ceil(2.0 * math.log(Sigma / (5.0 * beta)))


@dataclass
class ShiftTrace:
    params: OneEigParams
    s0: complex = 0j
    tau0: float = math.nan
    rounds: list = field(default_factory=list)
    precondition_flags: list = field(default_factory=list)
    ops: int = 0

    @property
    def accepted_taus(self) -> list[float]:
        taus = [self.tau0]
        taus += [r["tau_next"] for r in self.rounds if r["accepted"] is not None]
        return taus

    @property
    def shifts(self) -> list[complex]:
        out = [self.s0]
        out += [r["net"][r["accepted"]] for r in self.rounds if r["accepted"] is not None]
        return out

    def to_json(self) -> dict:
        def c(z):
            return [float(z.real), float(z.imag)]

        return {
            "params": self.params.to_json(),
            "s0": c(self.s0),
            "tau0": self.tau0,
            "rounds": [
                {
                    "s": c(r["s"]),
                    "tau": r["tau"],
                    "net": [c(z) for z in r["net"]],
                    "values": list(r["values"]),
                    "accepted": r["accepted"],
                    "tau_next": r["tau_next"],
                }
                for r in self.rounds
            ],
            "ops": self.ops,
        }


class OneEigResult(NamedTuple):
    lambda_hat: complex
    correctness: bool
    trace: ShiftTrace


def one_eig(
    H,
    beta: float,
    varphi: float,
    p: float,
    g: GlobalData,
    rng: RngStream,
    *,
    m_cap: int | None = None,
    mode: str = "practical",
) -> OneEigResult:
    H = check_hessenberg(H)
    n = H.shape[0]
    if n < 2:
        raise RequiresViolation("one_eig needs n >= 2; 1x1 blocks are handled by deflation")
    if beta > 0.5:
        raise RequiresViolation(f"beta must be <= 1/2, got {beta:g}")
    normH = opnorm(H)
    if not (10 * beta <= normH * (1 + 1e-12) and normH <= 2 * g.Sigma * (1 + 1e-12)):
        raise RequiresViolation(
            f"need 10 beta <= ||H|| <= 2 Sigma (beta={beta:g}, ||H||={normH:g}, Sigma={g.Sigma:g})"
        )
    prm = one_eig_params(beta, varphi, p, g, m_cap)
    trace = ShiftTrace(prm)
    opts = dict(
        mode=mode, C=10.0, kappa_v=g.kappa_bound, dist=prm.eta1, norm_bound=2 * g.Sigma
    )

    def estimate(z):
        try:
            r = dist_spec_detail(H, z, prm.m, **opts)
        except SingularEncounter:
            # shift numerically on the spectrum: distance zero
            trace.precondition_flags.append(False)
            return 0.0
        trace.precondition_flags.append(r.precondition_ok)
        trace.ops += r.ops
        return r.tau

    s = H[n - 1, n - 1] + sample_disk(prm.eta2, rng)
    tau = estimate(s)
    trace.s0, trace.tau0 = complex(s), tau
    while tau > EXIT_FACTOR * beta:
        net = build_net(s, tau, prm.eta2, rng)
        values = [estimate(z) for z in net.points]
        j = int(np.argmin(values))
        rec = {"s": complex(s), "tau": tau, "net": [complex(z) for z in net.points],
               "values": values, "accepted": None, "tau_next": None}
        trace.rounds.append(rec)
        if values[j] <= CONTRACTION * tau:
            s, tau = complex(net.points[j]), values[j]
            rec["accepted"], rec["tau_next"] = j, tau
        else:
            return OneEigResult(complex(s), False, trace)
    return OneEigResult(complex(s), True, trace)
