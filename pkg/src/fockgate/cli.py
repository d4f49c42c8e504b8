"""``fockgate`` command line: effective operators, reference checks, oracle cross-checks.

Exit codes: 0 success, 1 a check failed, 2 usage, parse or capacity error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .circuit import Circuit
from .dsl import ParseError, parse, parse_number
from .elements import random_unitary
from .fock import CapacityError, StateVector, enumerate_basis
from .gates import (
    BUILTINS,
    DEFAULT_CUTOFF,
    DEFAULT_TOL,
    basis_labels,
    builtin_operator,
    get_builtin,
    verify_all,
)
from .lift import lift, lift_permanent
from .postselect import EffectiveOperator, success_probability

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ORACLE_SAMPLES = 50
ORACLE_MAX_MODES = 3
ORACLE_MAX_CUTOFF = 3
# printed values below this are rounding noise at these dimensions
DISPLAY_ATOL = 1e-14


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    circuit: Path | None = None
    R: float | None = None
    cutoff: int = DEFAULT_CUTOFF
    tol: float = DEFAULT_TOL
    format: str = "text"
    input: str | None = None
    seed: int = 0


def _fmt(x: float) -> str:
    if abs(x) < DISPLAY_ATOL:
        return "0"
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def _fmt_complex(z: complex) -> str:
    return f"{_fmt(z.real)}{'+' if not _fmt(z.imag).startswith('-') else ''}{_fmt(z.imag)}j"


def _load_circuit(cfg: RunConfig) -> Circuit:
    try:
        text = cfg.circuit.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.circuit}: {exc}") from None
    return parse(text, cfg.cutoff)


def _operator(cfg: RunConfig) -> tuple[EffectiveOperator, list[str], Circuit | None]:
    if cfg.builtin is not None:
        S = builtin_operator(cfg.builtin, cfg.R, cfg.cutoff)
        return S, basis_labels(cfg.builtin, S.signal_basis), None
    if cfg.circuit is None:
        raise UsageError("choose a circuit with --builtin or --circuit")
    if cfg.R is not None:
        raise UsageError("--R only applies to builtin circuits")
    c = _load_circuit(cfg)
    S = c.effective(cfg.cutoff)
    return S, basis_labels("", S.signal_basis), c


def cmd_effop(cfg: RunConfig, out) -> int:
    S, labels, _ = _operator(cfg)
    if cfg.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        for i, a in enumerate(labels):
            for j, b in enumerate(labels):
                z = S.matrix[i, j]
                w.writerow([a, b, _fmt(z.real), _fmt(z.imag)])
        return EXIT_OK
    cells = [[_fmt_complex(complex(z)) for z in row] for row in S.matrix]
    width = max([len(c) for row in cells for c in row] + [len(x) for x in labels] + [1])
    lw = max(len(x) for x in labels) if labels else 1
    print(" " * lw + "  " + "  ".join(x.rjust(width) for x in labels), file=out)
    for label, row in zip(labels, cells):
        print(label.ljust(lw) + "  " + "  ".join(c.rjust(width) for c in row), file=out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out) -> int:
    if cfg.circuit is not None:
        raise UsageError("verify runs the builtin reference checks; use --builtin to select one")
    reports = verify_all(cfg.cutoff, cfg.tol, cfg.builtin, cfg.R)
    if cfg.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["name", "builtin", "max_abs_error", "status"])
        for r in reports:
            w.writerow([r.name, r.builtin, f"{r.max_abs_error:.3e}", "pass" if r.passed else "fail"])
    else:
        print(f"{'check':<22}{'builtin':<13}{'max_abs_error':>14}  status (tol {cfg.tol:g})", file=out)
        for r in reports:
            print(f"{r.name:<22}{r.builtin:<13}{r.max_abs_error:>14.3e}  {'PASS' if r.passed else 'FAIL'}", file=out)
        n_ok = sum(r.passed for r in reports)
        print(f"{n_ok}/{len(reports)} checks passed", file=out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _discrepancy(T: np.ndarray, cutoff: int) -> float:
    basis = enumerate_basis(T.shape[0], cutoff)
    return float(np.max(np.abs(lift(T, basis).matrix - lift_permanent(T, basis).matrix)))


def cmd_oracle(cfg: RunConfig, out) -> int:
    rows: list[tuple[str, float]] = []
    if cfg.circuit is not None:
        rows.append((str(cfg.circuit), _discrepancy(_load_circuit(cfg).transfer_matrix(), cfg.cutoff)))
    else:
        names = [cfg.builtin] if cfg.builtin else list(BUILTINS)
        for name in names:
            T = get_builtin(name).circuit(cfg.R).transfer_matrix()
            rows.append((name, _discrepancy(T, cfg.cutoff)))
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for k in range(ORACLE_SAMPLES):
        M = 1 + k % ORACLE_MAX_MODES
        worst = max(worst, _discrepancy(random_unitary(M, rng), min(cfg.cutoff, ORACLE_MAX_CUTOFF)))
    rows.append((f"random unitaries (n={ORACLE_SAMPLES}, seed={cfg.seed})", worst))
    overall = max(d for _, d in rows)
    if cfg.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["target", "max_discrepancy"])
        for name, d in rows:
            w.writerow([name, f"{d:.3e}"])
    else:
        for name, d in rows:
            print(f"{name:<40}{d:.3e}", file=out)
        status = "PASS" if overall < cfg.tol else "FAIL"
        print(f"max discrepancy {overall:.3e} (tol {cfg.tol:g}): {status}", file=out)
    return EXIT_OK if overall < cfg.tol else EXIT_FAIL


def _input_states(cfg: RunConfig, S: EffectiveOperator, circuit: Circuit | None) -> list[tuple[str, StateVector]]:
    basis = S.signal_basis
    if cfg.input is None:
        if circuit is None or not circuit.inputs:
            raise UsageError("prob needs --input (or 'input' lines in the circuit file)")
        specs = [",".join(map(str, occ)) for occ in circuit.inputs]
    else:
        specs = [cfg.input]
    enc = get_builtin(cfg.builtin).encoding if cfg.builtin else None
    states = []
    for spec in specs:
        parts = [p.strip() for p in spec.split(",")]
        if enc is not None and all(p and not p.isdigit() for p in parts):
            try:
                states.append((spec, enc.product_state(parts, basis)))
            except ValueError as exc:
                raise UsageError(f"bad input {spec!r}: {exc}") from None
            continue
        try:
            occ = tuple(int(p) for p in parts)
        except ValueError:
            raise UsageError(f"bad input {spec!r}: expected polarizations or occupations") from None
        if occ not in basis:
            raise UsageError(f"input {occ} is not in the operator's signal basis")
        states.append((spec, StateVector.basis_state(basis, occ)))
    return states


def cmd_prob(cfg: RunConfig, out) -> int:
    S, labels, circuit = _operator(cfg)
    w = csv.writer(out, lineterminator="\n")
    if cfg.format == "csv":
        w.writerow(["input", "probability", "state", "re", "im"])
    for spec, psi in _input_states(cfg, S, circuit):
        try:
            p = success_probability(S, psi, cfg.tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        result = S.apply(psi)
        if p < DISPLAY_ATOL**2:
            p = 0.0
        if cfg.format == "csv":
            amps = result.normalized().amplitudes if p > 0 else np.zeros(len(labels))
            for label, a in zip(labels, amps):
                if abs(a) > 1e-12:
                    w.writerow([spec, _fmt(p), label, _fmt(a.real), _fmt(a.imag)])
            if p == 0 or not np.any(np.abs(amps) > 1e-12):
                w.writerow([spec, _fmt(p), "", "", ""])
            continue
        print(f"input {spec}: success probability {_fmt(p)}", file=out)
        if p <= 0:
            print("  post-selection never succeeds for this input", file=out)
            continue
        print("  normalized output:", file=out)
        for label, a in zip(labels, result.normalized().amplitudes):
            if abs(a) > 1e-12:
                print(f"    {label}: {_fmt_complex(complex(a))}", file=out)
    return EXIT_OK


COMMANDS = {"effop": cmd_effop, "verify": cmd_verify, "oracle": cmd_oracle, "prob": cmd_prob}


def _number(text: str) -> float:
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fockgate", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    src = p.add_mutually_exclusive_group()
    src.add_argument("--builtin", choices=list(BUILTINS), help="builtin device")
    src.add_argument("--circuit", type=Path, help="circuit file (.lop)")
    p.add_argument("--R", type=_number, help="reflectivity override for a builtin (e.g. 1/3)")
    p.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF, help="global photon-number cutoff")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="pass/fail tolerance")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--input", help='input state, e.g. "R,L" or "0,1"')
    p.add_argument("--seed", type=int, default=0, help="seed for the random oracle unitaries")
    return p


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(**vars(args))
    if cfg.cutoff < 0:
        print("fockgate: error: --cutoff must be non-negative", file=err)
        return EXIT_USAGE
    if not cfg.tol > 0:
        print("fockgate: error: --tol must be positive", file=err)
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.command](cfg, out)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"{cfg.circuit}:{d}", file=err)
        return EXIT_USAGE
    except (UsageError, CapacityError) as exc:
        print(f"fockgate: error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
