"""Reader and writer for the line-oriented generator spec format.

Example::

    [generator]
    name = iterated beam splitter
    dimension = 2
    alphabet = 0 1
    [unitary]
    row = 0.7071067811865476+0.0i 0.7071067811865476+0.0i
    row = 0.7071067811865476+0.0i -0.7071067811865476+0.0i
    [projector 0]
    basis = 0
    [projector 1]
    basis = 1
    [protocol]
    pattern = M
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import QprocError, ValidationError
from .generator import MeasurementProtocol, QuantumGenerator, build_generator

_SECTION = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+(\S+))?\s*\]$")
_KEYVAL = re.compile(r"^([A-Za-z_]+)\s*=\s*(.*)$")
_COMPLEX = re.compile(
    r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?"
    r"([+-](\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?i)?$"
    r"|^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?i$"
)


class SpecSyntaxError(QprocError, ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}" if lineno else message)
        self.lineno = lineno


class SpecValidationError(QprocError, ValueError):
    def __init__(self, section, message, kind=None, residual=None):
        super().__init__(f"[{section}] {message}")
        self.section = section
        self.kind = kind
        self.residual = residual


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bi`` or ``bi`` with decimal ``a`` and ``b``."""
    if not _COMPLEX.match(text):
        raise ValueError(f"bad complex literal {text!r}")
    return complex(text[:-1] + "j") if text.endswith("i") else complex(float(text), 0.0)


def format_complex(z: complex) -> str:
    re_s = repr(float(z.real))
    im_s = repr(float(z.imag))
    if not im_s.startswith("-"):
        im_s = "+" + im_s
    return f"{re_s}{im_s}i"


@dataclass
class GeneratorSpecFile:
    name: str
    dimension: int
    alphabet: list
    unitary: list  # rows of complex
    projectors: dict = field(default_factory=dict)  # symbol -> ("basis", [int]) | ("rows", [[complex]])
    pattern: str = "M"

    def projector_matrix(self, symbol) -> np.ndarray:
        how, data = self.projectors[symbol]
        if how == "basis":
            return linalg.basis_projector(self.dimension, data)
        return linalg.cmatrix(data)

    def build(self) -> tuple:
        """Validated ``(generator, protocol)``."""
        try:
            u = linalg.cmatrix(self.unitary)
        except ValidationError as e:
            raise SpecValidationError("unitary", str(e), e.kind) from e
        projs = {}
        for s in self.alphabet:
            try:
                projs[s] = self.projector_matrix(s)
            except QprocError as e:
                raise SpecValidationError(f"projector {s}", str(e)) from e
        try:
            g = build_generator(u, projs, self.alphabet, self.name)
        except ValidationError as e:
            section = "unitary" if e.kind == "unitary" else "projectors"
            raise SpecValidationError(section, str(e), e.kind, e.residual) from e
        try:
            protocol = MeasurementProtocol(self.pattern)
        except ValidationError as e:
            raise SpecValidationError("protocol", str(e), e.kind) from e
        return g, protocol


def _strip(line: str) -> str:
    i = line.find("#")
    return (line if i < 0 else line[:i]).strip()


def _parse_row(value: str, dim: int, lineno: int) -> list:
    parts = value.split()
    if len(parts) != dim:
        raise SpecSyntaxError(lineno, f"row has {len(parts)} entries, expected {dim}")
    try:
        return [parse_complex(p) for p in parts]
    except ValueError as e:
        raise SpecSyntaxError(lineno, str(e)) from None


def parse_spec(text: str, validate: bool = True) -> GeneratorSpecFile:
    """Parse spec text; with ``validate`` the generator invariants are checked too."""
    header: dict = {}
    unitary: list = []
    projectors: dict = {}
    pattern = None
    section = None
    symbol = None
    seen_sections: list = []
    dim = None
    alphabet: list = []

    def need(cond, lineno, msg):
        if not cond:
            raise SpecSyntaxError(lineno, msg)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            kind, arg = m.group(1), m.group(2)
            if kind == "generator":
                need(not seen_sections, lineno, "[generator] must be the first section")
                need(arg is None, lineno, "[generator] takes no argument")
            elif kind == "unitary":
                need(seen_sections == ["generator"], lineno, "[unitary] must follow [generator]")
                need(arg is None, lineno, "[unitary] takes no argument")
                for key in ("name", "dimension", "alphabet"):
                    need(key in header, lineno, f"[generator] is missing '{key}'")
            elif kind == "projector":
                need(seen_sections and seen_sections[-1] in ("unitary", "projector"), lineno,
                     "[projector] sections must follow [unitary]")
                need(arg is not None, lineno, "[projector] needs a symbol, e.g. [projector 0]")
                need(arg in alphabet, lineno, f"projector symbol {arg!r} is not in the alphabet")
                need(arg not in projectors, lineno, f"duplicate projector section for {arg!r}")
                need(len(unitary) == dim, lineno, f"[unitary] has {len(unitary)} rows, expected {dim}")
                if symbol is not None:
                    _close_projector(projectors, symbol, dim, lineno)
                symbol = arg
                projectors[arg] = None
            elif kind == "protocol":
                need(seen_sections and seen_sections[-1] == "projector", lineno,
                     "[protocol] must follow the [projector] sections")
                need(arg is None, lineno, "[protocol] takes no argument")
                _close_projector(projectors, symbol, dim, lineno)
            else:
                raise SpecSyntaxError(lineno, f"unknown section [{kind}]")
            section = kind
            seen_sections.append(kind)
            continue

        m = _KEYVAL.match(line)
        need(m, lineno, f"expected 'key = value', got {line!r}")
        key, value = m.group(1), m.group(2).strip()
        need(section is not None, lineno, "content before the first section")
        if section == "generator":
            need(key in ("name", "dimension", "alphabet"), lineno, f"unknown key {key!r} in [generator]")
            need(key not in header, lineno, f"duplicate key {key!r}")
            if key == "dimension":
                need(re.fullmatch(r"\d+", value) and int(value) >= 1, lineno,
                     f"dimension must be a positive integer, got {value!r}")
                dim = int(value)
            elif key == "alphabet":
                alphabet = value.split()
                need(alphabet, lineno, "alphabet is empty")
                need(len(set(alphabet)) == len(alphabet), lineno, "alphabet has duplicate symbols")
            header[key] = value
        elif section == "unitary":
            need(key == "row", lineno, f"unknown key {key!r} in [unitary]")
            need(len(unitary) < dim, lineno, f"[unitary] has more than {dim} rows")
            unitary.append(_parse_row(value, dim, lineno))
        elif section == "projector":
            current = projectors[symbol]
            if key == "basis":
                need(current is None, lineno, f"projector {symbol!r} defined twice")
                try:
                    idx = [int(v) for v in value.split()]
                except ValueError:
                    raise SpecSyntaxError(lineno, f"basis indices must be integers, got {value!r}") from None
                need(all(0 <= i < dim for i in idx), lineno, f"basis index out of range for dimension {dim}")
                need(len(set(idx)) == len(idx), lineno, "duplicate basis index")
                projectors[symbol] = ("basis", idx)
            elif key == "row":
                need(current is None or current[0] == "rows", lineno, f"projector {symbol!r} mixes basis and rows")
                if current is None:
                    current = projectors[symbol] = ("rows", [])
                need(len(current[1]) < dim, lineno, f"projector {symbol!r} has more than {dim} rows")
                current[1].append(_parse_row(value, dim, lineno))
            else:
                raise SpecSyntaxError(lineno, f"unknown key {key!r} in [projector {symbol}]")
        elif section == "protocol":
            need(key == "pattern", lineno, f"unknown key {key!r} in [protocol]")
            need(pattern is None, lineno, "duplicate pattern")
            need(re.fullmatch(r"[MS]+", value) and "M" in value, lineno,
                 f"pattern must be a string over M/S containing M, got {value!r}")
            pattern = value

    end = len(text.splitlines())
    need(seen_sections, end, "empty spec")
    need(seen_sections[-1] == "protocol", end, "missing [protocol] section")
    need(pattern is not None, end, "[protocol] is missing 'pattern'")
    missing = [s for s in alphabet if s not in projectors]
    need(not missing, end, f"no projector section for symbols {missing}")

    spec = GeneratorSpecFile(header["name"], dim, alphabet, unitary, projectors, pattern)
    if validate:
        spec.build()
    return spec


def _close_projector(projectors, symbol, dim, lineno):
    current = projectors.get(symbol)
    if current is None:
        raise SpecSyntaxError(lineno, f"projector {symbol!r} has no 'basis' or 'row' entries")
    if current[0] == "rows" and len(current[1]) != dim:
        raise SpecSyntaxError(lineno, f"projector {symbol!r} has {len(current[1])} rows, expected {dim}")


def serialize_spec(spec: GeneratorSpecFile) -> str:
    lines = [
        "[generator]",
        f"name = {spec.name}",
        f"dimension = {spec.dimension}",
        f"alphabet = {' '.join(spec.alphabet)}",
        "[unitary]",
    ]
    lines += ["row = " + " ".join(format_complex(z) for z in row) for row in spec.unitary]
    for s in spec.alphabet:
        lines.append(f"[projector {s}]")
        how, data = spec.projectors[s]
        if how == "basis":
            lines.append("basis = " + " ".join(str(i) for i in data))
        else:
            lines += ["row = " + " ".join(format_complex(z) for z in row) for row in data]
    lines += ["[protocol]", f"pattern = {spec.pattern}"]
    return "\n".join(lines) + "\n"


def spec_from_generator(g: QuantumGenerator, protocol: MeasurementProtocol) -> GeneratorSpecFile:
    """Spec-file form of a generator; diagonal 0/1 projectors are written as ``basis`` lists."""
    projectors = {}
    for s, p in zip(g.alphabet, g.projectors):
        diag = np.diag(p)
        if np.array_equal(p, np.diag(diag)) and np.all((diag == 0) | (diag == 1)):
            projectors[s] = ("basis", [int(i) for i in np.flatnonzero(diag)])
        else:
            projectors[s] = ("rows", [[complex(z) for z in row] for row in p])
    return GeneratorSpecFile(
        g.name or "generator",
        g.dim,
        [str(s) for s in g.alphabet],
        [[complex(z) for z in row] for row in g.unitary],
        projectors,
        protocol.pattern,
    )
