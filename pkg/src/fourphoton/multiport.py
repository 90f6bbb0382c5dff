"""Mode-transformation unitaries: the diamond four-port array, validation, file I/O."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

UNITARY_TOL = 1e-12
LOADED_UNITARY_TOL = 1e-8


class UnitaryFileError(ValueError):
    """Raised when a unitary file cannot be parsed or fails validation.

    ``line`` and ``column`` are 1-based and point into the offending file.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class ValidationReport:
    unitary: bool
    hadamard: bool
    max_deviation: float
    unitary_deviation: float
    hadamard_deviation: float

    def as_dict(self) -> dict:
        return {
            "unitary": self.unitary,
            "hadamard": self.hadamard,
            "max_deviation": self.max_deviation,
            "unitary_deviation": self.unitary_deviation,
            "hadamard_deviation": self.hadamard_deviation,
        }


@dataclass(frozen=True)
class MultiportUnitary:
    """The four-port unitary ``U(alpha, phi)`` together with its phases."""

    matrix: np.ndarray = field(repr=False)
    alpha: float
    phi: float

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def shape(self):
        return self.matrix.shape


def build_four_port(alpha: float, phi: float) -> MultiportUnitary:
    """Diamond-shaped balanced four-port array.

    Row ``i`` holds the output amplitudes of a photon entering port ``i``.
    ``phi`` multiplies the whole first row; ``alpha`` is the enclosed phase
    acting on output ports 3 and 4 of input ports 1 and 2.
    """
    if not (math.isfinite(alpha) and math.isfinite(phi)):
        raise ValueError("alpha and phi must be finite")
    a = math.remainder(alpha, 2 * math.pi)
    p = math.remainder(phi, 2 * math.pi)
    ep = np.exp(1j * p)
    epa = np.exp(1j * (p + a))
    ea = np.exp(1j * a)
    m = 0.5 * np.array(
        [
            [ep, ep, epa, epa],
            [1, 1, -ea, -ea],
            [1, -1, 1, -1],
            [1, -1, -1, 1],
        ],
        dtype=complex,
    )
    m.setflags(write=False)
    return MultiportUnitary(matrix=m, alpha=float(alpha), phi=float(phi))


def validate(u, tol: float = UNITARY_TOL) -> ValidationReport:
    """Check unitarity and the complex-Hadamard property ``|U_jk| = 1/sqrt(N)``."""
    m = np.asarray(u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    unitary_dev = float(np.max(np.abs(m @ m.conj().T - np.eye(n))))
    hadamard_dev = float(np.max(np.abs(np.abs(m) - 1 / math.sqrt(n))))
    return ValidationReport(
        unitary=unitary_dev <= tol,
        hadamard=hadamard_dev <= tol,
        max_deviation=max(unitary_dev, hadamard_dev),
        unitary_deviation=unitary_dev,
        hadamard_deviation=hadamard_dev,
    )


@dataclass(frozen=True)
class LoadedUnitary:
    matrix: np.ndarray = field(repr=False)
    report: ValidationReport
    path: str

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    @property
    def shape(self):
        return self.matrix.shape


def parse_unitary(text: str, source: str = "<string>", tol: float = LOADED_UNITARY_TOL) -> LoadedUnitary:
    """Parse the plain-text unitary format.

    The first non-comment line holds ``N``; the next ``N`` non-comment lines
    hold ``N`` whitespace-separated complex entries such as ``0.5-0.5j``.
    Lines starting with ``#`` are ignored.
    """
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise UnitaryFileError("empty unitary file")
    no, head = lines[0]
    try:
        n = int(head)
    except ValueError:
        raise UnitaryFileError(f"expected matrix size N, got {head!r}", no, 1) from None
    if n < 1:
        raise UnitaryFileError(f"matrix size must be positive, got {n}", no, 1)
    rows = lines[1:]
    if len(rows) != n:
        line = rows[-1][0] if rows else no
        raise UnitaryFileError(f"dimension mismatch: expected {n} rows, got {len(rows)}", line)

    m = np.empty((n, n), dtype=complex)
    for r, (no, ln) in enumerate(rows):
        tokens = ln.split()
        if len(tokens) != n:
            raise UnitaryFileError(f"dimension mismatch in row {r + 1}: expected {n} entries, got {len(tokens)}", no)
        col = 1
        for c, tok in enumerate(tokens):
            col = ln.index(tok, col - 1) + 1
            try:
                m[r, c] = complex(tok)
            except ValueError:
                raise UnitaryFileError(f"malformed entry {tok!r} in row {r + 1}", no, col) from None
            if not np.isfinite(m[r, c]):
                raise UnitaryFileError(f"non-finite entry {tok!r} in row {r + 1}", no, col)
            col += len(tok)

    report = validate(m, tol=tol)
    if not report.unitary:
        raise UnitaryFileError(
            f"matrix is not unitary: max |U U^dagger - I| = {report.unitary_deviation:.3e} > {tol:.0e}"
        )
    m.setflags(write=False)
    return LoadedUnitary(matrix=m, report=report, path=source)


def load_unitary(path, tol: float = LOADED_UNITARY_TOL) -> LoadedUnitary:
    path = Path(path)
    return parse_unitary(path.read_text(), source=str(path), tol=tol)


def format_unitary(u, comment: str | None = None) -> str:
    """Serialise a matrix in the format read by :func:`load_unitary`."""
    m = np.asarray(u, dtype=complex)
    out = []
    if comment:
        out.extend(f"# {ln}" for ln in comment.splitlines())
    out.append(str(m.shape[0]))
    for row in m:
        out.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
    return "\n".join(out) + "\n"


def save_unitary(path, u, comment: str | None = None) -> None:
    Path(path).write_text(format_unitary(u, comment))
