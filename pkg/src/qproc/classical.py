"""Classical generators equivalent to deterministic quantum generators.

The equivalent classical machine keeps the internal states and replaces
amplitudes by the unistochastic weights ``|U_ij|^2``, restricted per symbol
to the basis states each projector selects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedError, ValidationError, ShapeError
from .generator import QuantumGenerator, is_deterministic

TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ClassicalGenerator:
    """Symbol-labeled sub-stochastic matrices with a stationary row vector.

    Construction does not validate; call :meth:`validate`.
    """

    dim: int
    alphabet: tuple
    matrices: np.ndarray  # (|A|, dim, dim), real
    stationary: np.ndarray  # (dim,)

    def matrix(self, symbol) -> np.ndarray:
        return self.matrices[self.alphabet.index(symbol)]

    def validate(self, tol: float = TOL) -> None:
        m = self.matrices
        if m.shape != (len(self.alphabet), self.dim, self.dim):
            raise ShapeError(f"matrices have shape {m.shape}")
        if np.any(m < -tol):
            raise ValidationError("nonnegative", "classical matrices have negative entries")
        rows = m.sum(axis=0).sum(axis=1)
        r = float(np.max(np.abs(rows - 1)))
        if r > tol:
            raise ValidationError("stochastic", f"summed symbol matrices are not row-stochastic (residual {r:.3g})", r)
        pi = self.stationary
        if np.any(pi < -tol) or abs(pi.sum() - 1) > tol:
            raise ValidationError("stationary", "stationary vector is not a probability vector")
        r = float(np.max(np.abs(pi @ m.sum(axis=0) - pi)))
        if r > tol:
            raise ValidationError("stationary", f"stationary vector is not invariant (residual {r:.3g})", r)


def projector_supports(g: QuantumGenerator, tol: float = TOL) -> list:
    """Basis indices selected by each projector; rejects non-diagonal projectors."""
    supports = []
    for s, p in zip(g.alphabet, g.projectors):
        off = p - np.diag(np.diag(p))
        if np.max(np.abs(off)) > tol:
            raise UnsupportedError(
                f"projector P({s}) is not diagonal in the computational basis; "
                "no classical equivalent is constructed for such generators"
            )
        supports.append(np.flatnonzero(np.abs(np.diag(p)) > 0.5))
    return supports


def classical_equivalent(g: QuantumGenerator) -> ClassicalGenerator:
    if not is_deterministic(g):
        raise UnsupportedError(f"generator {g.name!r} is not deterministic; it has no classical equivalent")
    supports = projector_supports(g)
    weights = np.abs(g.unitary) ** 2
    mats = np.zeros((len(g.alphabet), g.dim, g.dim))
    for k, cols in enumerate(supports):
        mats[k][:, cols] = weights[:, cols]
    cg = ClassicalGenerator(g.dim, g.alphabet, mats, np.full(g.dim, 1.0 / g.dim))
    cg.validate()
    return cg


def classical_word_probability(cg: ClassicalGenerator, word) -> float:
    """``pi T(s_1) ... T(s_L) 1``."""
    v = cg.stationary.astype(float)
    for s in word:
        try:
            k = cg.alphabet.index(s)
        except ValueError:
            raise KeyError(f"symbol {s!r} not in alphabet {list(cg.alphabet)}") from None
        v = v @ cg.matrices[k]
    return float(v.sum())


def verify_equivalence(g: QuantumGenerator, cg: ClassicalGenerator, L: int) -> float:
    """Max ``|Pr_quantum - Pr_classical|`` over every word of length ``1..L``.

    Both sides start uniform (``I/dim`` and ``1/dim``).  No pruning: all
    ``|A|^L`` words are visited.
    """
    if g.dim != cg.dim or tuple(g.alphabet) != tuple(cg.alphabet):
        raise ShapeError("quantum and classical generators have different dimensions or alphabets")
    ts = g.transition_matrices()
    cms = cg.matrices
    ops = np.eye(g.dim, dtype=np.complex128)[None]
    vecs = cg.stationary[None].astype(float)
    gap = 0.0
    for _ in range(L):
        ops = np.einsum("nij,sjk->nsik", ops, ts).reshape(-1, g.dim, g.dim)
        vecs = np.einsum("ni,sij->nsj", vecs, cms).reshape(-1, g.dim)
        pq = np.einsum("nij,nij->n", ops.conj(), ops).real / g.dim
        pc = vecs.sum(axis=1)
        gap = max(gap, float(np.max(np.abs(pq - pc))))
    return gap
