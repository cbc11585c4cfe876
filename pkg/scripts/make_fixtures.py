"""Regenerate the shipped regression fixtures (expected values from the oracle)."""

import json
from pathlib import Path

import numpy as np

from smalleig.matrix import RngStream, matrix_to_json
from smalleig.verify.oracle import oracle_eigenvalues

OUT = Path(__file__).resolve().parents[1] / "src" / "smalleig" / "fixtures"
DELTA, PHI = 0.05, 0.2


def lemma_bound(M, delta):
    n = M.shape[0]
    norm = np.linalg.norm(M, 2)
    return 4 * (2 * norm + delta * norm) ** (1 - 1 / n) * (delta * norm) ** (1 / n)


def main():
    rng = RngStream(11)
    cases = {
        "diag3": (np.diag([1.0, 2.0, 3.0]), "backward"),
        "swap2": (np.array([[0, 1], [1, 0]], dtype=complex), "backward"),
        "rotation2": (np.array([[0, 1], [-1, 0]], dtype=complex), "backward"),
        "roots_of_unity4": (np.roll(np.eye(4), 1, axis=0), "backward"),
        "gaussian5": (rng.standard_complex_normal((5, 5)), "backward"),
        "jordan3": (np.diag([1.0, 1.0], 1) + 0.5 * np.eye(3), "forward"),
    }
    OUT.mkdir(exist_ok=True)
    for name, (M, kind) in cases.items():
        M = np.asarray(M, dtype=complex)
        expected = oracle_eigenvalues(M)
        norm = float(np.linalg.norm(M, 2))
        tol = DELTA * norm if kind == "backward" else lemma_bound(M, DELTA)
        doc = matrix_to_json(
            M,
            delta=DELTA,
            phi=PHI,
            seed=7,
            tolerance=float(tol),
            expected=[[float(z.real), float(z.imag)] for z in expected],
        )
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(name, "tolerance", tol)


if __name__ == "__main__":
    main()
