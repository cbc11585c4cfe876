import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smalleig.errors import MatrixFormatError, NotHessenberg, ZeroReflectorVector
from smalleig.matrix import (
    HouseholderReflector,
    RngStream,
    as_complex_matrix,
    check_hessenberg,
    householder_apply,
    householder_vector,
    is_hessenberg,
    load_matrix,
    matrix_from_json,
    matrix_to_json,
    operator_norm_estimate,
    sample_disk,
    sample_ginibre,
    sample_unit_sphere,
    save_matrix,
)
from smalleig.verify.montecarlo import dkw_margin, sphere_first_coordinate_cdf

from conftest import complex_matrix


# ---------------------------------------------------------------- streams


def test_stream_determinism():
    a = RngStream(5, (1, 2)).standard_complex_normal(4)
    b = RngStream(5, (1, 2)).standard_complex_normal(4)
    c = RngStream(5, (1, 3)).standard_complex_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert RngStream(5).child(1, 2).path == (1, 2)


# ---------------------------------------------------------------- sphere


def test_sphere_small_cases():
    u = sample_unit_sphere(1, RngStream(1))
    assert abs(abs(u[0]) - 1) < 1e-15
    v = sample_unit_sphere(4, RngStream(2))
    assert np.array_equal(v, sample_unit_sphere(4, RngStream(2)))
    assert abs(np.linalg.norm(v) - 1) <= 1e-14


def test_sphere_anticoncentration_and_beta_law():
    n, N = 8, 100_000
    rng = RngStream(3)
    w = sample_unit_sphere(n, RngStream(4))
    U = np.array([sample_unit_sphere(n, rng) for _ in range(N)])
    overlap = np.abs(U.conj() @ w)
    for t in (0.1, 0.3, 0.5):
        assert np.mean(overlap <= t / math.sqrt(n - 1)) <= t ** 2 + 0.01
    # |u_1|^2 ~ Beta(1, n-1): compare empirical CDF to the exact one inside the DKW band
    x = np.sort(np.abs(U[:, 0]) ** 2)
    F = sphere_first_coordinate_cdf(n, x)
    ecdf_hi = np.arange(1, N + 1) / N
    ecdf_lo = np.arange(0, N) / N
    dev = max(np.max(np.abs(ecdf_hi - F)), np.max(np.abs(ecdf_lo - F)))
    assert dev <= dkw_margin(N)


# ---------------------------------------------------------------- disk and Ginibre


def test_disk_sampler():
    assert sample_disk(0.0, RngStream(1)) == 0
    rng = RngStream(2)
    w = np.array([sample_disk(1.0, rng) for _ in range(100_000)])
    assert np.all(np.abs(w) <= 1.0)
    assert abs(np.mean(np.abs(w) <= 0.5) - 0.25) <= 0.01
    z = sample_disk(3.0, RngStream(9))
    assert z == sample_disk(3.0, RngStream(9)) and abs(z) <= 3.0
    with pytest.raises(ValueError):
        sample_disk(-1.0, rng)


def test_ginibre_variance_and_norm_tail():
    rng = RngStream(5)
    z = np.array([sample_ginibre(1, rng)[0, 0] for _ in range(100_000)])
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) <= 0.02
    norms = np.array([np.linalg.norm(sample_ginibre(8, rng), 2) for _ in range(10_000)])
    assert np.mean(norms >= 2 * math.sqrt(2) + 0.5) <= 2 * math.exp(-8 * 0.25) + 0.02
    assert np.array_equal(sample_ginibre(4, RngStream(6)), sample_ginibre(4, RngStream(6)))


# ---------------------------------------------------------------- reflectors


def test_reflector_examples():
    v = np.array([1, -1], dtype=complex)
    assert np.allclose(householder_apply(v, np.array([1, 0])), [0, 1], atol=1e-15)
    g = np.random.default_rng(0)
    v = g.standard_normal(5) + 1j * g.standard_normal(5)
    assert np.allclose(householder_apply(v, v), -v, atol=1e-14)
    x = g.standard_normal(5) + 1j * g.standard_normal(5)
    x -= np.vdot(v, x) / np.vdot(v, v) * v
    assert np.allclose(householder_apply(v, x), x, atol=1e-14)
    with pytest.raises(ZeroReflectorVector):
        householder_apply(np.zeros(3), x[:3])


def test_reflector_dense_matches_apply():
    g = np.random.default_rng(1)
    v = g.standard_normal(3) + 1j * g.standard_normal(3)
    P = HouseholderReflector(v, offset=1).dense(5)
    assert np.allclose(P @ P.conj().T, np.eye(5), atol=1e-14)
    x = g.standard_normal(5) + 0j
    assert np.allclose((P @ x)[1:4], householder_apply(v, x[1:4]))
    assert np.allclose((P @ x)[[0, 4]], x[[0, 4]])


@given(st.integers(1, 64), st.integers(0, 2 ** 32 - 1))
def test_reflector_is_isometry_and_involution(n, seed):
    g = np.random.default_rng(seed)
    v = g.standard_normal(n) + 1j * g.standard_normal(n)
    x = g.standard_normal(n) + 1j * g.standard_normal(n)
    y = householder_apply(v, x)
    assert abs(np.linalg.norm(y) / np.linalg.norm(x) - 1) <= 1e-12
    assert np.linalg.norm(householder_apply(v, y) - x) <= 4 * 12 * n * 2.0 ** -52 * np.linalg.norm(x) * 10


@given(st.integers(2, 12), st.integers(0, 2 ** 32 - 1))
def test_householder_vector_targets_coordinate(n, seed):
    g = np.random.default_rng(seed)
    y = g.standard_normal(n) + 1j * g.standard_normal(n)
    k = seed % n
    z = householder_apply(householder_vector(y, k), y)
    mask = np.arange(n) != k
    assert np.max(np.abs(z[mask])) <= 1e-13 * np.linalg.norm(y)
    assert abs(abs(z[k]) - np.linalg.norm(y)) <= 1e-13 * np.linalg.norm(y)
    assert householder_vector(np.zeros(n), 0) is None


# ---------------------------------------------------------------- norms


def test_norm_estimate_examples():
    assert 1 <= operator_norm_estimate(np.eye(3)) <= 2
    assert 5 <= operator_norm_estimate(np.diag([5.0, 1.0])) <= 10
    # all-ones 2x2: M^*M = 2 * ones, eigenvalues {4, 0}, so ||M|| = 2
    assert 2 <= operator_norm_estimate(np.ones((2, 2))) <= 4
    assert operator_norm_estimate(np.zeros((3, 3))) == 0.0


@given(st.integers(1, 24), st.integers(0, 2 ** 32 - 1), st.integers(0, 3))
def test_norm_estimate_brackets_true_norm(n, seed, rank_cut):
    M = complex_matrix(n, seed)
    if rank_cut and n > rank_cut:
        M[:, :rank_cut] = 0
    true = np.linalg.norm(M, 2)
    est = operator_norm_estimate(M)
    assert true <= est <= 2 * true


# ---------------------------------------------------------------- structure and I/O


def test_hessenberg_checks():
    H = np.triu(np.ones((4, 4)), -1)
    assert is_hessenberg(H)
    H[3, 0] = 1e-300
    assert not is_hessenberg(H)
    with pytest.raises(NotHessenberg):
        check_hessenberg(H)
    with pytest.raises(MatrixFormatError):
        as_complex_matrix(np.ones((2, 3)))
    with pytest.raises(MatrixFormatError):
        as_complex_matrix([[np.nan]])


def test_json_roundtrip(tmp_path):
    M = complex_matrix(3, 4)
    p = tmp_path / "m.json"
    save_matrix(p, M, note="x")
    assert np.array_equal(load_matrix(p), M)
    assert json.loads(p.read_text())["note"] == "x"
    assert np.array_equal(matrix_from_json(matrix_to_json(M)), M)


@pytest.mark.parametrize(
    "doc,needle",
    [
        ({"n": 2, "entries": [[1, 0]] * 3}, "n^2"),
        ({"n": 0, "entries": []}, "positive integer"),
        ({"n": 1, "entries": [[1, "a"]]}, "row 0, col 0"),
        ({"n": 2, "entries": [[1, 0], [1, 0], [1, 0], [1]]}, "row 1, col 1"),
        ([1, 2], "object"),
    ],
)
def test_json_validation_messages(doc, needle):
    with pytest.raises(MatrixFormatError, match=needle.replace("^", r"\^")):
        matrix_from_json(doc)


def test_load_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 1,\n "entries": [[1, 0],]}')
    with pytest.raises(MatrixFormatError, match="line 2"):
        load_matrix(p)
