"""Dense complex matrices, Hessenberg structure, reflectors, samplers and I/O.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
helpers here validate shape and structure instead of wrapping them in a
class. Randomness always flows through an :class:`RngStream` so every
draw can be replayed from ``(seed, path)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MatrixFormatError, NotHessenberg, ZeroReflectorVector

# Householder error constant used for roundoff budgets (tunable).
C_HOUSEHOLDER = 12.0


# --------------------------------------------------------------------------
# structure


def as_complex_matrix(M) -> np.ndarray:
    A = np.array(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise MatrixFormatError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise MatrixFormatError("matrix has non-finite entries")
    return A


def is_hessenberg(H: np.ndarray) -> bool:
    return not np.any(np.tril(H, -2))


def check_hessenberg(H) -> np.ndarray:
    H = as_complex_matrix(H)
    if not is_hessenberg(H):
        raise NotHessenberg("entries below the first subdiagonal must be exactly zero")
    return H


def subdiagonal(H: np.ndarray) -> np.ndarray:
    return np.diagonal(H, -1).copy()


def opnorm(M: np.ndarray) -> float:
    """Exact-to-roundoff spectral norm (LAPACK SVD); for checks, not for the solver."""
    return float(np.linalg.norm(M, 2))


# --------------------------------------------------------------------------
# randomness


@dataclass
class RngStream:
    """Deterministic random stream identified by ``(seed, path)``.

    ``child(*keys)`` derives an independent stream; identical
    ``(seed, path)`` pairs always reproduce identical draws.
    """

    seed: int
    path: tuple = ()
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.seed = int(self.seed) & 0xFFFFFFFFFFFFFFFF
        self.path = tuple(int(k) for k in self.path)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, *keys: int) -> "RngStream":
        return RngStream(self.seed, self.path + tuple(keys))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def standard_complex_normal(self, size=None):
        """Centered complex Gaussian(s) with E|z|^2 = 1."""
        g = self._gen
        return (g.standard_normal(size) + 1j * g.standard_normal(size)) / math.sqrt(2.0)

    def uniform(self, size=None):
        return self._gen.random(size)


def sample_unit_sphere(n: int, rng: RngStream) -> np.ndarray:
    """Uniform vector on the complex unit sphere in C^n (normalized Gaussian)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    while True:
        z = rng.standard_complex_normal(n)
        nrm = np.linalg.norm(z)
        if nrm > 0:
            return z / nrm


def sample_disk(radius: float, rng: RngStream) -> complex:
    """Uniform point of the closed disk D(0, radius); radius 0 gives 0."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    r = radius * math.sqrt(rng.uniform())
    theta = 2.0 * math.pi * rng.uniform()
    if radius == 0:
        return 0j
    w = complex(r * math.cos(theta), r * math.sin(theta))
    # guard the closed-disk contract against rounding in cos/sin
    if abs(w) > radius:
        w *= radius / abs(w)
    return w


def sample_ginibre(n: int, rng: RngStream) -> np.ndarray:
    """Normalized complex Ginibre matrix: i.i.d. entries of variance 1/n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.standard_complex_normal((n, n)) / math.sqrt(n)


# --------------------------------------------------------------------------
# Householder reflectors and Givens rotations


@dataclass(frozen=True)
class HouseholderReflector:
    """``P = I - beta v v^*`` with ``beta = 2 / (v^* v)``; stored as ``v``."""

    v: np.ndarray
    offset: int = 0  # v acts on coordinates offset .. offset+len(v)-1

    @property
    def beta(self) -> float:
        return 2.0 / float(np.vdot(self.v, self.v).real)

    def dense(self, n: int) -> np.ndarray:
        P = np.eye(n, dtype=np.complex128)
        k = self.offset
        m = len(self.v)
        P[k:k + m, k:k + m] -= self.beta * np.outer(self.v, self.v.conj())
        return P


def householder_apply(v, x) -> np.ndarray:
    """Compute ``x - beta (v^* x) v`` (works on a vector or on matrix columns)."""
    v = np.asarray(v, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    vv = float(np.vdot(v, v).real)
    if vv == 0.0:
        raise ZeroReflectorVector("reflector vector must be nonzero")
    beta = 2.0 / vv
    if x.ndim == 1:
        return x - beta * np.vdot(v, x) * v
    return x - beta * np.outer(v, v.conj() @ x)


def householder_vector(y: np.ndarray, k: int) -> np.ndarray | None:
    """Reflector vector mapping ``y`` onto a multiple of ``e_k``.

    The phase of ``y[k]`` is copied onto ``||y|| e_k`` to avoid cancellation.
    Returns ``None`` for ``y == 0``.
    """
    nrm = np.linalg.norm(y)
    if nrm == 0.0:
        return None
    v = y.astype(np.complex128, copy=True)
    yk = y[k]
    phase = yk / abs(yk) if yk != 0 else 1.0
    v[k] += phase * nrm
    return v


# --------------------------------------------------------------------------
# norm estimation


def operator_norm_estimate(M, squarings: int = 5) -> float:
    """Certified upper bound Sigma with ``||M|| <= Sigma <= 2 ||M||``.

    Candidates that all dominate ``||M||``: the Frobenius norm,
    ``sqrt(||M||_1 ||M||_inf)`` and ``||A^k||_F^(1/2k)`` for the Gram matrix
    ``A = M^* M`` and ``k = 2**squarings`` (computed by normalized repeated
    squaring, overshoot at most ``n^(1/4k)``). The minimum is returned with
    a small roundoff inflation.
    """
    M = as_complex_matrix(M)
    n = M.shape[0]
    fro = float(np.linalg.norm(M, "fro"))
    if fro == 0.0:
        return 0.0
    one = float(np.abs(M).sum(axis=0).max())
    inf = float(np.abs(M).sum(axis=1).max())
    candidates = [fro, math.sqrt(one * inf)]

    B = M.conj().T @ M
    s = float(np.linalg.norm(B, "fro"))
    B = B / s
    log_scale = math.log(s)  # log ||A^k||_F accumulated as k doubles
    k = 1
    for _ in range(squarings):
        B = B @ B
        s = float(np.linalg.norm(B, "fro"))
        if s == 0.0:
            break
        B = B / s
        log_scale = 2.0 * log_scale + math.log(s)
        k *= 2
    else:
        candidates.append(math.exp(log_scale / (2 * k)))
    # the squaring candidate overshoots by at most n^(1/4k) < 2
    return min(candidates) * (1.0 + 64 * n * np.finfo(float).eps)


# --------------------------------------------------------------------------
# JSON I/O


def matrix_to_json(M: np.ndarray, **extra) -> dict:
    M = as_complex_matrix(M)
    n = M.shape[0]
    doc = {"n": n, "entries": [[float(z.real), float(z.imag)] for z in M.reshape(-1)]}
    doc.update(extra)
    return doc


def matrix_from_json(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "n" not in doc or "entries" not in doc:
        raise MatrixFormatError('matrix JSON must be an object with "n" and "entries"')
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixFormatError(f'"n" must be a positive integer, got {n!r}')
    entries = doc["entries"]
    if not isinstance(entries, list) or len(entries) != n * n:
        raise MatrixFormatError(f'"entries" must hold n^2 = {n * n} [re, im] pairs')
    vals = []
    for k, pair in enumerate(entries):
        ok = (
            isinstance(pair, list)
            and len(pair) == 2
            and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in pair)
        )
        if not ok or not all(math.isfinite(t) for t in pair):
            raise MatrixFormatError(
                f"entry {k} (row {k // n}, col {k % n}) is not a finite [re, im] pair: {pair!r}"
            )
        vals.append(complex(pair[0], pair[1]))
    return np.array(vals, dtype=np.complex128).reshape(n, n)


def load_matrix(path) -> np.ndarray:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return matrix_from_json(doc)
    except MatrixFormatError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc


def save_matrix(path, M: np.ndarray, **extra) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M, **extra)) + "\n")
