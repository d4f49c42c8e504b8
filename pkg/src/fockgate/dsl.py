"""Line-oriented circuit description language (``.lop`` files).

One directive per line, ``#`` starts a comment::

    modes 2
    bs 0 1 R=1/4          # sqrt(R) reflection, i*sqrt(1-R) transmission
    ancilla 1 in=1 out=1  # prepare one photon, keep runs that detect one
    input 2

Mode indices are zero-based. Numbers may be decimals, fractions ``p/q``
or multiples of pi (``pi``, ``pi/2``, ``3/2*pi``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .circuit import Ancilla, Circuit
from .elements import BeamSplitter, Element, ModePermutation, PhaseShifter, PolarizingBeamSplitter

MAX_INT = 10_000
_MAX_DENOMINATOR = 64

_INT = re.compile(r"\d+")
_DECIMAL = re.compile(r"-?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_FRACTION = re.compile(r"(-?\d+)/(\d+)")
_PI = re.compile(r"(-)?(?:(\d+)(?:/(\d+))?\*)?pi(?:/(\d+))?")


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


class _LineError(Exception):
    def __init__(self, column: int, message: str):
        self.column = column
        self.message = message


# ---------------------------------------------------------------------- numbers


def parse_number(text: str) -> float:
    """Evaluate a numeric literal; raises ValueError on bad syntax or overflow."""
    try:
        if m := _PI.fullmatch(text):
            sign, num, den, div = m.groups()
            coef = Fraction(int(num or 1), int(den or 1)) / int(div or 1)
            value = float(-coef if sign else coef) * math.pi
        elif m := _FRACTION.fullmatch(text):
            value = float(Fraction(int(m.group(1)), int(m.group(2))))
        elif _DECIMAL.fullmatch(text):
            value = float(text)
        else:
            raise ValueError(f"malformed number {text!r}")
    except ZeroDivisionError:
        raise ValueError(f"division by zero in {text!r}") from None
    except OverflowError:
        raise ValueError(f"numeric literal overflow in {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"numeric literal overflow in {text!r}")
    return value


def format_number(x: float) -> str:
    """Canonical spelling of `x` that :func:`parse_number` maps back to `x` exactly."""
    if x == 0:
        return "0"
    for q in range(1, _MAX_DENOMINATOR + 1):
        p = round(x * q)
        if float(Fraction(p, q)) == x:
            return str(p) if q == 1 else f"{p}/{q}"
    for q in range(1, _MAX_DENOMINATOR + 1):
        p = round(x / math.pi * q)
        if p and float(Fraction(p, q)) * math.pi == x:
            sign = "-" if p < 0 else ""
            p = abs(p)
            if p == 1:
                return f"{sign}pi" if q == 1 else f"{sign}pi/{q}"
            return f"{sign}{p}*pi" if q == 1 else f"{sign}{p}/{q}*pi"
    return repr(x)


# ----------------------------------------------------------------------- parsing


def _tokens(line: str) -> list[tuple[int, str]]:
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


class _Parser:
    def __init__(self, cutoff: int | None):
        self.cutoff = cutoff
        self.diagnostics: list[ParseDiagnostic] = []
        self.modes: int | None = None
        self.modes_line = 0
        self.elements: list[Element] = []
        self.ancillas: list[Ancilla] = []
        self.ancilla_lines: dict[int, int] = {}
        self.inputs: list[tuple[int, tuple[int, ...], int]] = []

    def error(self, line: int, column: int, message: str) -> None:
        self.diagnostics.append(ParseDiagnostic(line, column, message))

    def warn(self, line: int, column: int, message: str) -> None:
        self.diagnostics.append(ParseDiagnostic(line, column, message, "warning"))

    # token helpers; each raises _LineError for the first problem on a line

    def integer(self, tok: tuple[int, str], what: str) -> int:
        col, text = tok
        if not _INT.fullmatch(text):
            raise _LineError(col, f"expected an integer {what}, got {text!r}")
        if len(text) > 9 or int(text) > MAX_INT:
            raise _LineError(col, f"integer literal {text} too large (limit {MAX_INT})")
        return int(text)

    def keyword(self, tok: tuple[int, str], key: str) -> tuple[int, str]:
        col, text = tok
        prefix = key + "="
        if not text.startswith(prefix):
            raise _LineError(col, f"expected {prefix}..., got {text!r}")
        return col + len(prefix), text[len(prefix):]

    def number(self, tok: tuple[int, str]) -> float:
        try:
            return parse_number(tok[1])
        except ValueError as exc:
            raise _LineError(tok[0], str(exc)) from None

    def arity(self, toks, lo: int, hi: int | None = None) -> None:
        hi = lo if hi is None else hi
        n = len(toks) - 1
        if not (lo <= n <= hi):
            want = str(lo) if lo == hi else f"{lo} to {hi}"
            col = toks[hi + 1][0] if n > hi else toks[-1][0]
            raise _LineError(col, f"{toks[0][1]!r} takes {want} arguments, got {n}")

    def mode_refs(self, lineno: int, toks) -> list[int] | None:
        # validate every mode token so one line can report several problems
        if self.modes is None:
            raise _LineError(toks[0][0], "mode indices used before the 'modes' directive")
        out, ok = [], True
        for tok in toks:
            try:
                m = self.integer(tok, "mode index")
            except _LineError as exc:
                self.error(lineno, exc.column, exc.message)
                ok = False
                continue
            if m >= self.modes:
                self.error(lineno, tok[0], f"mode {m} out of range for {self.modes} modes")
                ok = False
            out.append(m)
        if ok and len(set(out)) != len(out):
            self.error(lineno, toks[0][0], f"mode indices must be distinct, got {out}")
            ok = False
        return out if ok else None

    def statement(self, lineno: int, toks) -> None:
        head = toks[0][1]
        handler = getattr(self, "_stmt_" + head, None)
        if handler is None:
            raise _LineError(toks[0][0], f"unknown directive {head!r}")
        handler(lineno, toks)

    def _stmt_modes(self, lineno, toks):
        self.arity(toks, 1)
        if self.modes is not None:
            raise _LineError(toks[0][0], f"duplicate 'modes' directive (first on line {self.modes_line})")
        m = self.integer(toks[1], "mode count")
        if m < 1:
            raise _LineError(toks[1][0], "a circuit needs at least one mode")
        self.modes, self.modes_line = m, lineno

    def _stmt_bs(self, lineno, toks):
        self.arity(toks, 3, 4)
        adjoint = False
        if len(toks) == 5:
            if toks[4][1] != "adjoint":
                raise _LineError(toks[4][0], f"expected 'adjoint', got {toks[4][1]!r}")
            adjoint = True
        col, text = self.keyword(toks[3], "R")
        R = self.number((col, text))
        R_ok = 0.0 <= R <= 1.0
        if not R_ok:
            self.error(lineno, col, f"reflectivity must lie in [0, 1], got {text}")
        modes = self.mode_refs(lineno, toks[1:3])
        if modes is not None and R_ok:
            self.elements.append(BeamSplitter(modes[0], modes[1], R, adjoint))

    def _stmt_ps(self, lineno, toks):
        self.arity(toks, 2)
        phi = self.number(self.keyword(toks[2], "phi"))
        modes = self.mode_refs(lineno, toks[1:2])
        if modes is not None:
            self.elements.append(PhaseShifter(modes[0], phi))

    def _stmt_pbs(self, lineno, toks):
        self.arity(toks, 4)
        modes = self.mode_refs(lineno, toks[1:5])
        if modes is not None:
            self.elements.append(PolarizingBeamSplitter((modes[0], modes[1]), (modes[2], modes[3])))

    def _stmt_swap(self, lineno, toks):
        self.arity(toks, 2)
        modes = self.mode_refs(lineno, toks[1:3])
        if modes is not None:
            self.elements.append(ModePermutation.swap(modes[0], modes[1], self.modes))

    def _stmt_ancilla(self, lineno, toks):
        self.arity(toks, 3)
        n_in = self.integer(self.keyword(toks[2], "in"), "photon number")
        n_out = self.integer(self.keyword(toks[3], "out"), "photon number")
        modes = self.mode_refs(lineno, toks[1:2])
        if modes is None:
            return
        m = modes[0]
        if m in self.ancilla_lines:
            raise _LineError(toks[1][0], f"mode {m} already declared as an ancilla on line {self.ancilla_lines[m]}")
        self.ancilla_lines[m] = lineno
        self.ancillas.append(Ancilla(m, n_in, n_out))
        prepared = sum(a.n_in for a in self.ancillas)
        if self.cutoff is not None and prepared > self.cutoff:
            self.error(lineno, toks[2][0], f"ancillas prepare {prepared} photons, above the cutoff {self.cutoff}")

    def _stmt_input(self, lineno, toks):
        self.arity(toks, 1)
        col, text = toks[1]
        occ = []
        for k, part in enumerate(text.split(",")):
            occ.append(self.integer((col, part), "occupation"))
            col += len(part) + 1
        self.inputs.append((lineno, tuple(occ), toks[1][0]))

    def finish(self, n_lines: int) -> Circuit | None:
        if self.modes is None:
            if not any(d.severity == "error" for d in self.diagnostics):
                self.error(max(n_lines, 1), 1, "missing 'modes' directive")
            return None
        n_sig = self.modes - len(self.ancillas)
        n_anc = sum(a.n_in for a in self.ancillas)
        seen = {}
        for lineno, occ, col in self.inputs:
            if len(occ) != n_sig:
                self.error(lineno, col, f"input gives {len(occ)} occupations but the circuit has {n_sig} signal modes")
            elif self.cutoff is not None and sum(occ) + n_anc > self.cutoff:
                self.error(lineno, col, f"input with ancillas needs {sum(occ) + n_anc} photons, above the cutoff {self.cutoff}")
            if occ in seen:
                self.warn(lineno, col, f"input repeats line {seen[occ]}")
            seen.setdefault(occ, lineno)
        if any(d.severity == "error" for d in self.diagnostics):
            return None
        return Circuit(self.modes, tuple(self.elements), tuple(self.ancillas), tuple(o for _, o, _ in self.inputs))


def parse_with_diagnostics(source: str, cutoff: int | None = None) -> tuple[Circuit | None, list[ParseDiagnostic]]:
    """Parse `source`, collecting every diagnostic instead of stopping at the first."""
    p = _Parser(cutoff)
    lines = source.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        toks = _tokens(raw.split("#", 1)[0])
        if not toks:
            continue
        try:
            p.statement(lineno, toks)
        except _LineError as exc:
            p.error(lineno, exc.column, exc.message)
    circuit = p.finish(len(lines))
    return circuit, sorted(p.diagnostics, key=lambda d: (d.line, d.column))


def parse(source: str, cutoff: int | None = None) -> Circuit:
    """Parse circuit text; raises :class:`ParseError` carrying all error diagnostics."""
    circuit, diags = parse_with_diagnostics(source, cutoff)
    if circuit is None:
        raise ParseError([d for d in diags if d.severity == "error"])
    return circuit


# ---------------------------------------------------------------------- render


def _transpositions(perm: tuple[int, ...]) -> Iterator[tuple[int, int]]:
    # swaps whose product, applied in order, equals perm
    current = list(range(len(perm)))  # current[j]: where the photon from j now sits
    where = {m: m for m in range(len(perm))}  # which original mode sits at position m
    for j in range(len(perm)):
        target = perm[j]
        pos = current[j]
        if pos != target:
            other = where[target]
            yield (min(pos, target), max(pos, target))
            current[j], current[other] = target, pos
            where[target], where[pos] = j, other


def _render_element(e: Element) -> list[str]:
    if isinstance(e, BeamSplitter):
        line = f"bs {e.mode_a} {e.mode_b} R={format_number(e.R)}"
        return [line + " adjoint" if e.adjoint else line]
    if isinstance(e, PhaseShifter):
        return [f"ps {e.mode} phi={format_number(e.phi)}"]
    if isinstance(e, PolarizingBeamSplitter):
        return ["pbs {} {} {} {}".format(*e.rail_a, *e.rail_b)]
    if isinstance(e, ModePermutation):
        return [f"swap {a} {b}" for a, b in _transpositions(e.perm)]
    raise TypeError(f"cannot render {e!r}")


def render(c: Circuit) -> str:
    """Canonical text form of `c`; ``parse(render(c)) == c``."""
    lines = [f"modes {c.modes}"]
    for e in c.elements:
        lines.extend(_render_element(e))
    for a in c.ancillas:
        lines.append(f"ancilla {a.mode} in={a.n_in} out={a.n_out}")
    for occ in c.inputs:
        lines.append("input " + ",".join(map(str, occ)))
    return "\n".join(lines) + "\n"
