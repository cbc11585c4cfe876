"""Command-line front end.

Exit codes: 0 success, 1 input or validation error, 2 retry budget
exhausted, 3 insufficient precision (theory mode), 4 a verification check
failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .distspec import build_net, dist_spec
from .driver import SolverConfig, solve
from .errors import MatrixFormatError, PrecisionInsufficient, RetryBudgetExceeded, SmallEigError
from .hessenberg import hess_bu
from .matrix import RngStream, is_hessenberg, load_matrix, matrix_from_json

EXIT_OK, EXIT_INPUT, EXIT_RETRY, EXIT_PRECISION, EXIT_CHECK = 0, 1, 2, 3, 4

log = logging.getLogger("smalleig")


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    delta: float = 0.05
    phi: float = 0.2
    beta: float | None = None
    seed: int = 0
    mode: str = "practical"
    m_cap: int = 256
    trace: bool = False

    def __post_init__(self):
        if not (0 < self.delta < 1):
            raise ValueError(f"--delta must lie in (0, 1), got {self.delta}")
        if not (0 < self.phi < 1):
            raise ValueError(f"--phi must lie in (0, 1), got {self.phi}")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("--seed must be a 64-bit unsigned integer")


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _box(text: str) -> tuple[float, float, float, float]:
    parts = [float(t) for t in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("box is xmin,xmax,ymin,ymax")
    return tuple(parts)


# --------------------------------------------------------------------------
# commands


def cmd_solve(cfg: RunConfig) -> int:
    M = load_matrix(cfg.input)
    rng = RngStream(cfg.seed)
    config = SolverConfig(mode=cfg.mode, m_cap=cfg.m_cap)
    try:
        if cfg.beta is not None:
            from .driver import forward_eig

            rep = forward_eig(M, cfg.beta, cfg.phi, rng, cfg.mode, config)
        else:
            rep = solve(M, cfg.delta, cfg.phi, rng, cfg.mode, config)
    except PrecisionInsufficient as exc:
        doc = {"n": M.shape[0], "success": False, "required_bits": exc.required_bits,
               "mode": cfg.mode, "message": str(exc)}
        _write(json.dumps(doc, indent=2) + "\n", cfg.output)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except RetryBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RETRY
    _write(rep.dumps(traces=cfg.trace), cfg.output)
    return EXIT_OK


def cmd_distspec(cfg: RunConfig, s: complex, m: int, verify: bool) -> int:
    if m < 1:
        raise ValueError(f"--m must be a positive integer, got {m}")
    M = load_matrix(cfg.input)
    H = M if is_hessenberg(M) else hess_bu(M).H
    tau = dist_spec(H, s, m)
    print(f"tau = {tau!r}")
    if verify:
        from .verify.oracle import oracle_eigenvalues

        d = float(np.min(np.abs(oracle_eigenvalues(M) - s)))
        inside = 0.9 * d <= tau <= 1.1 * d
        print(f"oracle d = {d!r}; bracket [{0.9 * d!r}, {1.1 * d!r}]; inside = {inside}")
    return EXIT_OK


def cmd_pseudospec(cfg: RunConfig, eps: float, box, step: float) -> int:
    from .verify.pseudospectra import pseudospectrum_grid, write_grid_csv

    if eps < 0:
        raise ValueError("--eps must be nonnegative")
    M = load_matrix(cfg.input)
    rows = pseudospectrum_grid(M, eps, box, step)
    if cfg.output in (None, "-"):
        write_grid_csv(rows, sys.stdout)
    else:
        with open(cfg.output, "w", newline="") as fh:
            write_grid_csv(rows, fh)
    return EXIT_OK


# --------------------------------------------------------------------------
# verification battery


def _fixture_paths(directory: str | None) -> list:
    if directory is not None:
        return sorted(Path(directory).glob("*.json"))
    root = resources.files("smalleig") / "fixtures"
    return sorted((p for p in root.iterdir() if p.name.endswith(".json")), key=lambda p: p.name)


def _check_fixture(path) -> tuple[bool, str]:
    from .verify.oracle import matching_distance

    doc = json.loads(path.read_text())
    M = matrix_from_json(doc)
    rep = solve(M, doc["delta"], doc["phi"], RngStream(doc["seed"]))
    expected = [complex(a, b) for a, b in doc["expected"]]
    d = matching_distance(rep.eigenvalues, expected)
    tol = doc.get("tolerance", 1e-8)
    return d <= tol, f"matching distance {d:.3g} (tolerance {tol:g})"


def verification_checks(trials: int, fixtures: str | None, seed: int = 2024):
    """Yield ``(name, passed, detail)`` for the reduced acceptance battery."""
    from .distspec import choose_m
    from .verify.instances import shattered_instance
    from .verify.montecarlo import ginibre_norm_tail, monte_carlo_gap_bound, sphere_anticoncentration
    from .verify.oracle import oracle_eigenvalues

    root = RngStream(seed)
    for path in _fixture_paths(fixtures):
        try:
            ok, detail = _check_fixture(path)
        except (SmallEigError, KeyError, ValueError) as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield f"fixture {path.name}", ok, detail

    big = max(trials, 1000)
    for t in (0.1, 0.3, 0.5):
        for n in (2, 8):
            est = sphere_anticoncentration(n, t, big * 10, root.child(1, n, int(t * 10)))
            yield f"sphere anti-concentration n={n} t={t}", est.empirical <= est.bound + est.stderr, \
                f"{est.empirical:.4f} <= {est.bound:.4f} + {est.stderr:.4f}"
    est = ginibre_norm_tail(8, 2 * math.sqrt(2) + 0.5, big, root.child(2))
    yield "Ginibre norm tail", est.within(), f"{est.empirical:.4f} vs bound {est.bound:.4f}"
    for t in (0.01, 0.05):
        est = monte_carlo_gap_bound(4, 1.0, t, big, root.child(3, int(t * 100)))
        yield f"gap tail t={t}", est.within(), f"{est.empirical:.4f} vs bound {est.bound:.4f}"

    pts_rng = root.child(4).generator
    r = np.sqrt(pts_rng.uniform(0.81, 1.12 ** 2, big))
    z = r * np.exp(2j * np.pi * pts_rng.uniform(size=big))
    net = build_net(0j, 1.0, 0.03, root.child(5)).points
    worst = float(np.max(np.min(np.abs(z[:, None] - net[None, :]), axis=1)))
    yield "net covering", worst <= 0.6, f"max distance {worst:.4f} <= 0.6"

    count = max(5, trials // 20)
    inside = 0
    for k in range(count):
        inst = shattered_instance(2 + k % 4, root.child(6, k))
        m = choose_m(inst.eps, inst.zeta, inst.H.shape[0], inst.p)
        s = inst.eigenvalues[0] + inst.gap / 4
        d = float(np.min(np.abs(oracle_eigenvalues(inst.H) - s)))
        inside += 0.9 * d <= dist_spec(inst.H, s, m) <= 1.1 * d
    yield "distance bracket", inside == count, f"{inside}/{count} inside [0.9d, 1.1d]"


def cmd_verify(trials: int, fixtures: str | None) -> int:
    failed = 0
    for name, ok, detail in verification_checks(trials, fixtures):
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    print(f"{'all checks passed' if not failed else f'{failed} check(s) failed'}")
    return EXIT_OK if not failed else EXIT_CHECK


# --------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with other input errors; 2 means retry budget
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="smalleig", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="eigenvalues of a matrix file")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output")
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--phi", type=float, default=0.2)
    sp.add_argument("--beta", type=float, help="forward accuracy; overrides --delta")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--mode", choices=("practical", "theory"), default="practical")
    sp.add_argument("--m-cap", type=int, default=256)
    sp.add_argument("--trace", action="store_true")

    dp = sub.add_parser("distspec", help="distance-to-spectrum estimate at a shift")
    dp.add_argument("--input", required=True)
    dp.add_argument("--s", type=_complex, required=True)
    dp.add_argument("--m", type=int, required=True)
    dp.add_argument("--verify", action="store_true")

    pp = sub.add_parser("pseudospec", help="sigma_min grid as CSV")
    pp.add_argument("--input", required=True)
    pp.add_argument("--output")
    pp.add_argument("--eps", type=float, required=True)
    pp.add_argument("--box", type=_box, required=True)
    pp.add_argument("--step", type=float, required=True)

    vp = sub.add_parser("verify", help="reduced acceptance battery")
    vp.add_argument("--trials", type=int, default=1000)
    vp.add_argument("--fixtures")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    start = time.perf_counter()
    try:
        if args.command == "solve":
            cfg = RunConfig("solve", args.input, args.output, args.delta, args.phi, args.beta,
                            args.seed, args.mode, args.m_cap, args.trace)
            code = cmd_solve(cfg)
        elif args.command == "distspec":
            code = cmd_distspec(RunConfig("distspec", args.input), args.s, args.m, args.verify)
        elif args.command == "pseudospec":
            cfg = RunConfig("pseudospec", args.input, args.output)
            code = cmd_pseudospec(cfg, args.eps, args.box, args.step)
        else:
            code = cmd_verify(args.trials, args.fixtures)
    except (OSError, MatrixFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    log.debug("%s finished in %.2fs", args.command, time.perf_counter() - start)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
