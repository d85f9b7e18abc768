"""Plain-text program files.

A file has a header of ``key: value`` lines followed by ``inputs:`` and
``steps:`` sections; ``#`` starts a comment::

    modes: 2
    cluster_db: 10
    seed: 7
    trials: 100000
    mode: corrected

    inputs:
      0 squeezed 2.718281828
      1 squeezed_db 8.686 q

    steps:
      beamsplitter pi/4 on 0 1
      displace 0.5 -0.25 on 1

Inputs not listed default to vacuum. Numbers may be written as multiples of
``pi`` such as ``-pi/2`` or ``3*pi/4``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .correction import db_to_epsilon
from .temporal import GATE_KINDS, MODES, Gate, InputSpec, Program, ProgramError

_PI_RE = re.compile(r"^([+-])?(?:(\d+(?:\.\d*)?)\*)?pi(?:/(\d+(?:\.\d*)?))?$")


_HEADER_KEYS = ("modes", "epsilon", "cluster_db", "seed", "trials", "mode")


class ProgramParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class ProgramFile:
    program: Program
    epsilon: float | None = None
    seed: int = 0
    trials: int = 100_000
    mode: str = "ideal"


def parse_number(text: str) -> float:
    m = _PI_RE.match(text)
    if m:
        import math

        sign = -1.0 if m.group(1) == "-" else 1.0
        num = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * num * math.pi / den
    return float(text)


def _tokens(line: str):
    """Tokens of a line with their 1-based start columns."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_program(text: str) -> ProgramFile:
    """Parse program-file text.

    Raises:
        ProgramParseError: with the line and column of the first problem.
    """
    header: dict = {}
    inputs: dict = {}
    steps = []
    section = "header"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        toks = _tokens(line)
        first, col = toks[0]

        def fail(message, column=col):
            raise ProgramParseError(lineno, column, message)

        low = line.strip().lower()
        if low in ("inputs:", "steps:"):
            section = low[:-1]
            continue
        if section == "header":
            if ":" not in line:
                fail(f"expected 'key: value', got {line.strip()!r}")
            key, value = (part.strip() for part in line.split(":", 1))
            after = line.index(":") + 1
            vcol = after + len(line[after:]) - len(line[after:].lstrip()) + 1
            if key in header:
                fail(f"duplicate header key {key!r}")
            if key not in _HEADER_KEYS:
                fail(f"unknown header key {key!r}")
            try:
                header[key] = _header_value(key, value)
            except ValueError as err:
                fail(str(err), vcol)
            header[f"_{key}_line"] = (lineno, col)
        elif section == "inputs":
            try:
                idx = int(first)
            except ValueError:
                fail(f"expected a mode index, got {first!r}")
            if idx in inputs:
                fail(f"input for mode {idx} given twice")
            inputs[idx] = (_parse_input(toks[1:], lineno, col), lineno, col)
        else:
            steps.append((_parse_step(toks, lineno), lineno, col))

    if "modes" not in header:
        raise ProgramParseError(1, 1, "missing 'modes:' header")
    if "epsilon" in header and "cluster_db" in header:
        line, col = header["_cluster_db_line"]
        raise ProgramParseError(line, col, "give either 'epsilon' or 'cluster_db', not both")
    n = header["modes"]
    for idx, (_, line, col) in inputs.items():
        if not 0 <= idx < n:
            raise ProgramParseError(line, col, f"mode {idx} out of range for {n} modes")
    for gate, line, col in steps:
        bad = [m for m in gate.modes if m >= n]
        if bad:
            raise ProgramParseError(line, col, f"mode {bad[0]} out of range for {n} modes")
    for k, (gate, line, col) in enumerate(steps):
        try:
            Program(n, (gate,))
        except ProgramError as err:
            raise ProgramParseError(line, col, str(err).replace("step 0", f"step {k}")) from None
    specs = tuple(inputs[i][0] if i in inputs else InputSpec() for i in range(n))
    epsilon = header.get("epsilon")
    if "cluster_db" in header:
        epsilon = db_to_epsilon(header["cluster_db"])
    return ProgramFile(
        program=Program(n, tuple(g for g, _, _ in steps), specs),
        epsilon=epsilon,
        seed=header.get("seed", 0),
        trials=header.get("trials", 100_000),
        mode=header.get("mode", "ideal"),
    )


def _header_value(key: str, value: str):
    if key == "modes":
        n = int(value)
        if n < 1:
            raise ValueError("modes must be >= 1")
        return n
    if key == "epsilon":
        e = float(value)
        if not 0.0 < e < 1.0:
            raise ValueError("epsilon must be in (0, 1)")
        return e
    if key == "cluster_db":
        d = float(value)
        if not d > 0:
            raise ValueError("cluster_db must be positive")
        return d
    if key == "seed":
        return int(value)
    if key == "trials":
        n = int(value)
        if n < 1:
            raise ValueError("trials must be >= 1")
        return n
    if key == "mode":
        if value not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        return value
    raise ValueError(f"unknown header key {key!r}")


def _parse_input(toks, lineno: int, col: int) -> InputSpec:
    if not toks:
        raise ProgramParseError(lineno, col, "missing input kind")
    kind, kcol = toks[0]
    args = toks[1:]
    try:
        if kind == "vacuum" and not args:
            return InputSpec()
        if kind == "squeezed" and len(args) == 1:
            return InputSpec("squeezed", parse_number(args[0][0]))
        if kind == "squeezed_db" and len(args) in (1, 2):
            quad = args[1][0] if len(args) == 2 else "q"
            return InputSpec("squeezed_db", parse_number(args[0][0]), quad)
    except (ValueError, ProgramError) as err:
        raise ProgramParseError(lineno, args[0][1] if args else kcol, str(err)) from None
    if kind not in ("vacuum", "squeezed", "squeezed_db"):
        raise ProgramParseError(lineno, kcol, f"unknown input kind {kind!r}")
    raise ProgramParseError(lineno, kcol, f"wrong number of arguments for {kind}")


def _parse_step(toks, lineno: int) -> Gate:
    name, col = toks[0]
    if name not in GATE_KINDS:
        raise ProgramParseError(lineno, col, f"unknown gate {name!r}")
    words = [w for w, _ in toks]
    if "on" not in words:
        raise ProgramParseError(lineno, col, "expected 'on' before the target modes")
    split = words.index("on")
    params, modes = toks[1:split], toks[split + 1 :]
    n_par, n_modes = GATE_KINDS[name]
    if len(params) != n_par:
        raise ProgramParseError(lineno, col, f"{name} takes {n_par} parameter(s), got {len(params)}")
    if len(modes) != n_modes:
        raise ProgramParseError(lineno, toks[split][1], f"{name} acts on {n_modes} mode(s), got {len(modes)}")
    values = []
    for text, c in params:
        try:
            values.append(parse_number(text))
        except ValueError:
            raise ProgramParseError(lineno, c, f"bad number {text!r}") from None
    idx = []
    for text, c in modes:
        try:
            idx.append(int(text))
        except ValueError:
            raise ProgramParseError(lineno, c, f"bad mode index {text!r}") from None
        if idx[-1] < 0:
            raise ProgramParseError(lineno, c, "mode index must be nonnegative")
    try:
        return Gate(name, tuple(values), tuple(idx))
    except ProgramError as err:
        raise ProgramParseError(lineno, col, str(err)) from None


def load_program(path) -> ProgramFile:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())
