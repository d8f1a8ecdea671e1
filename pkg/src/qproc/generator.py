"""Quantum finite-state generators and periodic measurement protocols.

A generator is a unitary ``U`` together with a complete set of orthogonal
projectors ``P(s)``, one per output symbol.  States are row vectors
(bras), so one measured step maps ``psi -> psi @ U @ P(s)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import linalg
from .errors import ShapeError, UnknownSymbolError, UnsupportedError, ValidationError, NumericalError

TOL = 1e-9
ZERO_TOL = 1e-9

MEASURE = "M"
SKIP = "S"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuantumGenerator:
    dim: int
    alphabet: tuple
    unitary: np.ndarray
    projectors: tuple
    name: str = ""

    def projector(self, symbol) -> np.ndarray:
        return self.projectors[self.index(symbol)]

    def index(self, symbol) -> int:
        try:
            return self.alphabet.index(symbol)
        except ValueError:
            raise UnknownSymbolError(f"symbol {symbol!r} not in alphabet {list(self.alphabet)}") from None

    def transition_matrices(self) -> np.ndarray:
        """Stacked ``T(s)`` for every symbol, shape ``(|A|, dim, dim)``."""
        return np.stack([self.unitary @ p for p in self.projectors])

    def relabel(self, mapping: dict) -> "QuantumGenerator":
        """Same generator with symbols renamed through ``mapping``."""
        return QuantumGenerator(
            self.dim, tuple(mapping[s] for s in self.alphabet), self.unitary, self.projectors, self.name
        )


@dataclass(frozen=True)
class MeasurementProtocol:
    """Periodic pattern of measurement acts, e.g. ``"M"`` or ``"SM"``.

    ``M`` applies ``U`` and then a measurement; ``S`` applies ``U`` with
    no measurement (the identity projector).
    """

    pattern: str = MEASURE

    def __post_init__(self):
        if not self.pattern or set(self.pattern) - {MEASURE, SKIP}:
            raise ValidationError("protocol", f"protocol pattern must be a nonempty string over M/S, got {self.pattern!r}")
        if MEASURE not in self.pattern:
            raise ValidationError("protocol", f"protocol pattern {self.pattern!r} never measures")

    @property
    def period(self) -> int:
        return len(self.pattern)

    @property
    def measures_per_period(self) -> int:
        return self.pattern.count(MEASURE)

    def acts(self):
        """Endless iterator over the periodic acts."""
        while True:
            yield from self.pattern


PROTOCOL_I = MeasurementProtocol("M")
PROTOCOL_II = MeasurementProtocol("SM")


def build_generator(unitary, projectors, alphabet=None, name: str = "") -> QuantumGenerator:
    """Validate and assemble a generator.

    ``projectors`` is either a mapping ``symbol -> matrix`` or a sequence
    aligned with ``alphabet``.  Each failed invariant raises
    :class:`ValidationError` carrying the offending residual.
    """
    u = linalg.cmatrix(unitary)
    if u.shape[0] != u.shape[1]:
        raise ShapeError(f"unitary must be square, got shape {u.shape}")
    dim = u.shape[0]

    if isinstance(projectors, dict):
        if alphabet is None:
            alphabet = list(projectors)
        projs = [projectors[s] for s in alphabet]
    else:
        projs = list(projectors)
        if alphabet is None:
            alphabet = [str(i) for i in range(len(projs))]
    alphabet = tuple(alphabet)
    if len(alphabet) != len(projs):
        raise ShapeError(f"{len(alphabet)} symbols but {len(projs)} projectors")
    if len(set(alphabet)) != len(alphabet):
        raise ValidationError("alphabet", f"duplicate symbols in alphabet {list(alphabet)}")
    if not alphabet:
        raise ValidationError("alphabet", "alphabet is empty")
    projs = [linalg.cmatrix(p) for p in projs]
    for s, p in zip(alphabet, projs):
        if p.shape != (dim, dim):
            raise ShapeError(f"projector {s!r} has shape {p.shape}, expected {(dim, dim)}")

    r = linalg.unitarity_residual(u)
    if r > TOL:
        raise ValidationError("unitary", f"matrix is not unitary: max|U U^+ - I| = {r:.3g}", r)
    for s, p in zip(alphabet, projs):
        r = linalg.projector_residual(p)
        if r > TOL:
            raise ValidationError("projector", f"P({s}) is not an orthogonal projector: residual {r:.3g}", r)
    r = linalg.max_norm(sum(projs) - linalg.identity(dim))
    if r > TOL:
        raise ValidationError("completeness", f"projectors do not sum to the identity: residual {r:.3g}", r)
    for i, (s, p) in enumerate(zip(alphabet, projs)):
        for t, q in zip(alphabet[i + 1:], projs[i + 1:]):
            r = linalg.max_norm(p @ q)
            if r > TOL:
                raise ValidationError(
                    "orthogonality", f"P({s}) and P({t}) are not orthogonal: max|P P'| = {r:.3g}", r
                )

    return QuantumGenerator(dim, alphabet, _frozen(u), tuple(_frozen(p) for p in projs), name)


def transition_matrix(g: QuantumGenerator, symbol) -> np.ndarray:
    """``T(s) = U P(s)``."""
    return g.unitary @ g.projector(symbol)


def effective_generator(g: QuantumGenerator, protocol: MeasurementProtocol) -> QuantumGenerator:
    """Fold a ``S...SM`` protocol into a generator with unitary ``U^k``.

    One observed symbol of the result corresponds to one protocol period.
    """
    p = protocol.pattern
    if p.count(MEASURE) != 1 or p[-1] != MEASURE:
        raise UnsupportedError(
            f"pattern {p!r} does not have exactly one final M per period; "
            "use word_probability_protocol for such protocols"
        )
    if len(p) == 1:
        return g
    name = f"{g.name} [{p}]" if g.name else p
    return QuantumGenerator(g.dim, g.alphabet, _frozen(linalg.mat_power(g.unitary, len(p))), g.projectors, name)


def is_deterministic(g: QuantumGenerator, zero_tol: float = ZERO_TOL) -> bool:
    """True iff every ``T(s)`` has at most one entry above ``zero_tol`` per row."""
    nonzero = np.abs(g.transition_matrices()) > zero_tol
    return bool(np.all(nonzero.sum(axis=2) <= 1))


def measurement_channel(g: QuantumGenerator, rho: np.ndarray) -> np.ndarray:
    """One step of measurement-averaged evolution, ``sum_s T(s)^+ rho T(s)``."""
    ts = g.transition_matrices()
    return np.einsum("sji,jk,skl->il", ts.conj(), rho, ts)


def stationary_density(g: QuantumGenerator, zero_tol: float = ZERO_TOL) -> np.ndarray:
    """Uniform stationary density matrix ``I/dim`` of a deterministic generator."""
    if not is_deterministic(g, zero_tol):
        raise UnsupportedError(
            f"generator {g.name!r} is not deterministic; supply an explicit initial condition"
        )
    rho = linalg.identity(g.dim) / g.dim
    r = linalg.max_norm(measurement_channel(g, rho) - rho)
    if r > TOL:
        raise NumericalError(f"uniform density is not stationary (residual {r:.3g})")
    rho.setflags(write=False)
    return rho


def skeleton_is_irreducible(g: QuantumGenerator, zero_tol: float = ZERO_TOL) -> bool:
    """Strong connectivity of the internal-state graph ``i -> j`` where ``|U_ij| > zero_tol``.

    A reducible skeleton means the uniform stationary state is a mixture of
    several ergodic components (e.g. the beam splitter measured every other pass).
    """
    adjacency = (np.abs(g.unitary) > zero_tol).astype(int)
    n, _ = connected_components(adjacency, directed=True, connection="strong")
    return n == 1


def density_from_state(psi) -> np.ndarray:
    """Density matrix of a bra ``psi`` such that ``Tr[T^+ rho T] = ||psi T||^2``."""
    v = np.asarray(psi, dtype=np.complex128)
    return np.outer(v.conj(), v)
