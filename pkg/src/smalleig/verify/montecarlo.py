"""Monte Carlo checks of the random-matrix tail bounds.

Gap and condition-number trials use LAPACK eigenvalues for speed: they
test the random objects (sphere, Ginibre, perturbed spectra), not the
solver. Shattering trials go through the oracle-centred certificate.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ..errors import ParameterOutOfRange
from ..matrix import RngStream, as_complex_matrix, sample_ginibre
from .pseudospectra import check_shattered

MIN_TRIALS = 1000


class TailEstimate(NamedTuple):
    empirical: float
    bound: float
    stderr: float
    trials: int

    def within(self, sigmas: float = 3.0) -> bool:
        return self.empirical <= self.bound + sigmas * self.stderr


def _binomial_stderr(q: float, trials: int) -> float:
    # floor the variance at one success so a zero-count estimate still has a margin
    q = max(q, 1.0 / trials)
    return math.sqrt(q * (1 - q) / trials)


def _require_trials(trials: int) -> None:
    if trials < MIN_TRIALS:
        raise ParameterOutOfRange(f"need at least {MIN_TRIALS} trials, got {trials}")


def _estimate(hits: int, trials: int, bound: float) -> TailEstimate:
    q = hits / trials
    return TailEstimate(q, bound, _binomial_stderr(max(q, min(bound, 1.0)), trials), trials)


def dkw_margin(trials: int, alpha: float = 1e-6) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band: sup-deviation of an empirical CDF at level alpha."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * trials))


def _min_gaps(eigs: np.ndarray) -> np.ndarray:
    d = np.abs(eigs[:, :, None] - eigs[:, None, :])
    n = eigs.shape[1]
    d[:, np.arange(n), np.arange(n)] = np.inf
    return d.min(axis=(1, 2))


def monte_carlo_gap_bound(n: int, gamma: float, t: float, trials: int, rng: RngStream, M=None) -> TailEstimate:
    """Empirical ``P[gap(M + gamma G) <= t]`` (``M = 0`` by default) against ``n^3 t^2/gamma^2``."""
    _require_trials(trials)
    base = np.zeros((n, n), dtype=np.complex128) if M is None else as_complex_matrix(M)
    G = rng.standard_complex_normal((trials, n, n)) / math.sqrt(n)
    eigs = np.linalg.eigvals(base[None] + gamma * G)
    hits = int(np.sum(_min_gaps(eigs) <= t))
    return _estimate(hits, trials, n ** 3 * t ** 2 / gamma ** 2)


def ginibre_norm_tail(n: int, t: float, trials: int, rng: RngStream) -> TailEstimate:
    """Empirical ``P[||G_n|| >= t]`` against ``2 exp(-n (t - 2 sqrt 2)^2)``."""
    _require_trials(trials)
    if t < 2 * math.sqrt(2):
        raise ParameterOutOfRange("the Ginibre norm tail bound needs t >= 2 sqrt(2)")
    G = rng.standard_complex_normal((trials, n, n)) / math.sqrt(n)
    norms = np.linalg.norm(G, ord=2, axis=(1, 2))
    hits = int(np.sum(norms >= t))
    return _estimate(hits, trials, 2 * math.exp(-n * (t - 2 * math.sqrt(2)) ** 2))


def kappa_v_tail(M, gamma: float, t: float, trials: int, rng: RngStream) -> TailEstimate:
    """Exceedance of ``sqrt(n)/t`` by the unit-column condition number of ``V`` for ``M + gamma G``.

    The surrogate exceeds the infimum by at most ``sqrt(n)``, so the raised
    threshold keeps the comparison with the bound at ``1/t`` sound.
    """
    _require_trials(trials)
    M = as_complex_matrix(M)
    n = M.shape[0]
    normM = float(np.linalg.norm(M, 2))
    if not (0 < gamma < normM):
        raise ParameterOutOfRange("need 0 < gamma < ||M||")
    if not (0 < t < gamma / (normM * n ** 1.5)):
        raise ParameterOutOfRange("need t < gamma/(||M|| n^(3/2))")
    hits = 0
    for _ in range(trials):
        X = M + gamma * sample_ginibre(n, rng)
        _, V = np.linalg.eig(X)
        V = V / np.linalg.norm(V, axis=0)
        if np.linalg.cond(V, 2) >= math.sqrt(n) / t:
            hits += 1
    bound = 2 * (2 * math.sqrt(2) + normM / gamma + math.sqrt(4 * math.log(1 / t) / n)) ** 2 * n ** 3 * t ** 2
    return _estimate(hits, trials, bound)


def sphere_anticoncentration(n: int, t: float, trials: int, rng: RngStream) -> TailEstimate:
    """Empirical ``P[|u_1| <= t/sqrt(n-1)]`` for uniform ``u`` on the complex sphere, against ``t^2``.

    The ``stderr`` field carries the DKW band instead of a binomial error.
    """
    if n < 2:
        raise ParameterOutOfRange("anti-concentration needs n >= 2")
    z = rng.standard_complex_normal((trials, n))
    u1 = np.abs(z[:, 0]) / np.linalg.norm(z, axis=1)
    q = float(np.mean(u1 <= t / math.sqrt(n - 1)))
    return TailEstimate(q, t ** 2, dkw_margin(trials), trials)


def sphere_first_coordinate_cdf(n: int, x: float) -> float:
    """Exact ``P[|u_1|^2 <= x] = 1 - (1 - x)^(n-1)`` (Beta(1, n-1))."""
    return 1.0 - (1.0 - x) ** (n - 1)


def shattering_end_to_end(M, gamma: float, phi: float, trials: int, rng: RngStream) -> TailEstimate:
    """Fraction of Ginibre perturbations whose pseudospectrum is *not* certified shattered.

    ``(eps, zeta)`` come from the shattering parameter formulas; the bound
    is ``phi``.
    """
    from ..driver import shattering_parameters

    M = as_complex_matrix(M)
    n = M.shape[0]
    eps, zeta = shattering_parameters(float(np.linalg.norm(M, 2)), gamma, phi, n)
    failures = 0
    for _ in range(trials):
        X = M + gamma * sample_ginibre(n, rng)
        if not check_shattered(X, eps, zeta, zeta / 4).verdict:
            failures += 1
    q = failures / trials
    return TailEstimate(q, phi, _binomial_stderr(max(q, phi), trials), trials)
