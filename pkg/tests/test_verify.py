import io
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from smalleig.driver import shattering_parameters
from smalleig.errors import (
    CardinalityMismatch,
    DefectiveOrClustered,
    GridTooCoarse,
    ParameterOutOfRange,
    TooFewEigenvalues,
)
from smalleig.matrix import RngStream
from smalleig.verify.instances import shattered_instance
from smalleig.verify.montecarlo import (
    ginibre_norm_tail,
    kappa_v_tail,
    monte_carlo_gap_bound,
    shattering_end_to_end,
    sphere_anticoncentration,
)
from smalleig.verify.oracle import (
    matching_distance,
    min_gap,
    oracle_eigenvalues,
    sigma_min_detail,
    smallest_singular_value,
)
from smalleig.verify.pseudospectra import check_shattered, pseudospectrum_grid, sigma_min_batch, write_grid_csv
from smalleig.verify.spectral import kappa_v_surrogate, spectral_measure

from conftest import complex_matrix


# ---------------------------------------------------------------- oracle eigenvalues


@pytest.mark.parametrize(
    "M,want",
    [
        ([[0, 1], [1, 0]], [1, -1]),  # companion matrix of z^2 - 1
        (np.diag([1.0, 2.0, 3.0]), [1, 2, 3]),
        ([[0, 1], [-1, 0]], [1j, -1j]),
        ([[2 - 1j]], [2 - 1j]),
    ],
)
def test_oracle_examples(M, want):
    assert matching_distance(oracle_eigenvalues(np.array(M, dtype=complex)), want) <= 1e-13


@given(st.integers(1, 10), st.integers(0, 2 ** 32 - 1))
def test_oracle_agrees_with_lapack(n, seed):
    M = complex_matrix(n, seed)
    assert matching_distance(oracle_eigenvalues(M), np.linalg.eigvals(M)) <= 1e-9 * np.linalg.norm(M, 2)


# ---------------------------------------------------------------- metrics


def test_matching_distance_examples():
    assert matching_distance([1, 2], [2.1, 0.9]) == pytest.approx(0.1)
    assert matching_distance([1 + 1j, 3], [1 + 1j, 3]) == 0
    assert matching_distance([0, 10], [10, 0]) == 0
    with pytest.raises(CardinalityMismatch):
        matching_distance([1], [1, 2])


@given(st.lists(st.complex_numbers(max_magnitude=10), min_size=1, max_size=8), st.randoms())
def test_matching_distance_permutation_invariant(a, r):
    b = list(a)
    r.shuffle(b)
    assert matching_distance(a, b) == 0


def test_min_gap_examples():
    assert min_gap([0, 1, 1.5]) == pytest.approx(0.5)
    assert min_gap([1j, -1j]) == pytest.approx(2)
    assert min_gap([2, 2, 5]) == 0
    with pytest.raises(TooFewEigenvalues):
        min_gap([1])


def test_sigma_min_examples():
    assert smallest_singular_value(np.diag([3.0, 0.5])) == pytest.approx(0.5, rel=1e-8)
    Q, _ = np.linalg.qr(complex_matrix(4, 0))
    assert smallest_singular_value(Q) == pytest.approx(1.0, rel=1e-8)
    r = sigma_min_detail(np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert r.value == 0 and r.singular


@given(st.integers(1, 16), st.integers(0, 2 ** 32 - 1))
def test_sigma_min_agrees_with_svd(n, seed):
    M = complex_matrix(n, seed)
    assert smallest_singular_value(M) == pytest.approx(np.linalg.svd(M, compute_uv=False)[-1], rel=1e-8)


# ---------------------------------------------------------------- spectral measure and kappa


def test_spectral_measure_examples():
    m = spectral_measure(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(m.masses, [0.5, 0.5], atol=1e-12)
    m = spectral_measure(np.array([[1, 1], [0, 2]], dtype=complex))
    # e_2^* V has weight only on the eigenvalue 2
    assert m.masses[np.argmin(np.abs(m.eigenvalues - 1))] <= 1e-20
    assert m.masses[np.argmin(np.abs(m.eigenvalues - 2))] == pytest.approx(1.0)
    assert m.expectation(lambda z: np.ones_like(z)) == pytest.approx(1.0)


def test_kappa_examples():
    Q, _ = np.linalg.qr(complex_matrix(4, 1))
    assert kappa_v_surrogate(Q @ np.diag([1, 2, 3j, -1]) @ Q.conj().T) == pytest.approx(1.0, abs=1e-10)
    assert kappa_v_surrogate(np.diag([1.0, 2.0, 3.0])) == pytest.approx(1.0, abs=1e-12)
    assert kappa_v_surrogate(np.array([[0, 10], [0, 1]], dtype=complex)) >= 10
    with pytest.raises(DefectiveOrClustered):
        kappa_v_surrogate(np.array([[0, 1], [0, 0]], dtype=complex))


@given(st.integers(2, 5), st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
def test_functional_calculus_sandwich(n, seed, m):
    inst = shattered_instance(n, RngStream(seed))
    H = inst.H
    s = inst.eigenvalues[0] + 0.5 * inst.gap
    x = np.zeros(n, dtype=complex)
    x[-1] = 1
    A = (s * np.eye(n) - H).conj().T
    for _ in range(m):
        x = scipy.linalg.solve(A, x)
    lhs = np.linalg.norm(x)  # ||e_n^* (s - H)^{-m}||
    mid = inst.measure.expectation(lambda z: (s - z) ** (-m))
    k = inst.kappa
    assert lhs / k <= mid * (1 + 1e-9)
    assert mid <= k * lhs * (1 + 1e-9)


@given(st.integers(2, 6), st.integers(0, 2 ** 32 - 1))
def test_shattering_consequences(n, seed):
    inst = shattered_instance(n, RngStream(seed))
    assert inst.certificate.verdict
    assert min_gap(inst.eigenvalues) >= inst.zeta
    assert inst.kappa <= math.sqrt(n) * n * inst.zeta / inst.eps
    assert abs(inst.measure.masses.sum() - 1) <= 1e-12


# ---------------------------------------------------------------- pseudospectra


def test_check_shattered_examples():
    assert check_shattered(np.diag([0.0, 1.0]), 0.01, 0.25, 0.05).verdict
    cert = check_shattered(np.diag([0.0, 0.1]), 0.01, 0.25, 0.05)
    assert not cert.verdict and not cert.separated
    J = np.array([[0, 1], [0, 0]], dtype=complex)
    # sigma_min(z - J) <= |z|^2 near 0, so the 0.25-pseudospectrum reaches radius ~0.5 > 0.1
    cert = check_shattered(J, 0.25, 0.1, 0.02, centers=[0j, 10.0])
    assert not cert.contained
    with pytest.raises(GridTooCoarse):
        check_shattered(np.diag([0.0, 1.0]), 0.01, 0.25, 0.1)


def test_pseudospectrum_grid_and_csv():
    rows = pseudospectrum_grid(np.diag([0.0, 1.0]), 0.1, (-0.5, 1.5, -0.5, 1.5), 0.05)
    inside = [(re, im) for re, im, _, flag in rows if flag]
    assert inside
    for re, im in inside:
        assert min(abs(complex(re, im)), abs(complex(re, im) - 1)) <= 0.1 + 1e-12
    # every grid point strictly within the radius is flagged
    dist = [min(abs(complex(re, im)), abs(complex(re, im) - 1)) for re, im, _, _ in rows]
    assert sum(d <= 0.1 - 1e-9 for d in dist) <= len(inside) <= sum(d <= 0.1 + 1e-9 for d in dist)
    zero = pseudospectrum_grid(np.diag([0.0, 1.0]), 0.0, (-0.5, 1.5, -0.5, 1.5), 0.05)
    assert {(round(r, 9), round(i, 9)) for r, i, _, f in zero if f} <= {(0.0, 0.0), (1.0, 0.0)}
    buf = io.StringIO()
    write_grid_csv(rows[:2], buf)
    lines = buf.getvalue().split("\n")
    assert lines[0] == "re,im,sigma_min,in_pseudospectrum" and len(lines) == 4
    with pytest.raises(ValueError):
        pseudospectrum_grid(np.eye(2), 0.1, (0, 1, 0, 1), 2.0)


@given(st.integers(2, 6), st.integers(0, 2 ** 32 - 1), st.floats(0.01, 0.5))
def test_pseudospectrum_perturbation_inclusion(n, seed, size):
    M = complex_matrix(n, seed)
    E = complex_matrix(n, seed + 1)
    E *= size / np.linalg.norm(E, 2)
    eps = 1.0
    g = np.random.default_rng(seed)
    z = g.uniform(-4, 4, 500) + 1j * g.uniform(-4, 4, 500)
    a = sigma_min_batch(M + E, z)
    b = sigma_min_batch(M, z)
    # Lambda_{eps - ||E||}(M + E) is inside Lambda_eps(M)
    assert np.all(b[a <= eps - size] <= eps + 1e-12)


def test_literal_inclusion_direction_fails():
    # M = 0, E = (eps/2) I: Lambda_eps(E) is D(eps/2, eps) but Lambda_{eps/2}(0) is D(0, eps/2)
    eps = 1.0
    z = np.array([1.2 + 0j])
    assert sigma_min_batch(0.5 * np.eye(2), z)[0] <= eps
    assert sigma_min_batch(np.zeros((2, 2)), z)[0] > eps / 2


# ---------------------------------------------------------------- Monte Carlo harnesses


def test_gap_tail():
    for t in (0.01, 0.05):
        est = monte_carlo_gap_bound(4, 1.0, t, 20_000, RngStream(1))
        assert est.within()
    assert monte_carlo_gap_bound(4, 1.0, 0.0, 1000, RngStream(2)).empirical == 0
    with pytest.raises(ParameterOutOfRange):
        monte_carlo_gap_bound(4, 1.0, 0.01, 10, RngStream(2))


def test_ginibre_and_sphere_tails():
    assert ginibre_norm_tail(8, 2 * math.sqrt(2) + 0.5, 5000, RngStream(3)).within()
    for n in (2, 8):
        for t in (0.1, 0.3, 0.5):
            est = sphere_anticoncentration(n, t, 100_000, RngStream(4, (n,)))
            assert est.empirical <= est.bound + est.stderr


def test_kappa_tail():
    M = np.diag([1.0, -1.0, 0.5j, -0.5j]) + 0j
    gamma = 0.5
    t = 0.5 * gamma / (np.linalg.norm(M, 2) * 4 ** 1.5)
    est = kappa_v_tail(M, gamma, t, 1000, RngStream(5))
    assert est.within()


def test_shattering_end_to_end_small():
    M = np.diag([1.0, -1.0, 1j, -1j]) + 0j
    est = shattering_end_to_end(M, 0.3, 0.3, 60, RngStream(6))
    assert est.empirical <= est.bound + 0.1
    eps, zeta = shattering_parameters(1.0, 0.3, 0.3, 4)
    assert eps < zeta
