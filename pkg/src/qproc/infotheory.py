"""Block entropies and the information measures derived from them.

All logarithms are base 2: entropies in bits, rates in bits/measurement,
transient information in bits x measurements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import UnsupportedError, ValidationError
from .generator import (
    PROTOCOL_I,
    MeasurementProtocol,
    QuantumGenerator,
    effective_generator,
    is_deterministic,
    skeleton_is_irreducible,
)
from .process import PRUNE_TOL, WordDistribution, as_density, iter_distributions, validate_density

NORMALIZATION_TOL = 1e-6
FORBIDDEN_CAP = 6

NOTES = (
    "closed-form h_mu is -(1/|Q|) sum_ij |U_ij|^2 log2 |U_ij|^2; for the spin-1 rotation "
    "it is exactly 2/3 (row contributions 1, 0, 1 bits), not 1/3.",
    "T is a truncated sum; its L_max term vanishes by construction, so the last informative "
    "term is L_max - 1 and T_tail = 2 x that term is a geometric-decay heuristic, not a bound.",
)


def _xlogx(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log2(p[pos])
    return out


def block_entropy(d: WordDistribution) -> float:
    """Shannon entropy of a word distribution, ``0 log 0 = 0``."""
    total = d.total()
    if abs(total - 1) > NORMALIZATION_TOL:
        raise ValidationError("normalization", f"word distribution sums to {total:.12g}, not 1")
    # sorted summation: result depends only on the multiset of probabilities
    return float(-np.sum(_xlogx(np.sort(d.probs))))


@dataclass(frozen=True)
class EntropyCurve:
    """Block entropies ``H[L]`` for L = 0..L_max."""

    H: np.ndarray

    @property
    def L_max(self) -> int:
        return len(self.H) - 1

    @classmethod
    def from_distributions(cls, dists) -> "EntropyCurve":
        dists = list(dists)
        if [d.length for d in dists] != list(range(len(dists))):
            raise ValueError("distributions must cover L = 0, 1, ..., L_max in order")
        H = np.array([block_entropy(d) if d.length else 0.0 for d in dists])
        return cls(H)


def entropy_rate_curve(c: EntropyCurve) -> np.ndarray:
    """``dH(L) = H(L) - H(L-1)`` for L = 1..L_max."""
    if c.L_max < 1:
        raise ValueError("entropy curve needs L_max >= 1")
    return np.diff(c.H)


def entropy_rate_closed_form(g: QuantumGenerator) -> float:
    """Entropy rate of a deterministic generator from its unitary alone.

    ``-(1/|Q|) sum_ij |U_ij|^2 log2 |U_ij|^2``
    """
    if not is_deterministic(g):
        raise UnsupportedError(f"no closed-form entropy rate for nondeterministic generator {g.name!r}")
    w = np.abs(g.unitary) ** 2
    return float(-np.sum(_xlogx(w)) / g.dim)


def excess_entropy_curve(c: EntropyCurve, h_mu: float) -> np.ndarray:
    return c.H - h_mu * np.arange(c.L_max + 1)


def excess_entropy(c: EntropyCurve, h_mu: float) -> tuple:
    """``E(L_max) = H(L_max) - h_mu L_max`` and the residual ``|E(L_max) - E(L_max-1)|``."""
    e = excess_entropy_curve(c, h_mu)
    residual = abs(e[-1] - e[-2]) if c.L_max >= 1 else float("nan")
    return float(e[-1]), float(residual)


def transient_terms(c: EntropyCurve, h_mu: float, E: float) -> np.ndarray:
    return E + h_mu * np.arange(c.L_max + 1) - c.H


def transient_information(c: EntropyCurve, h_mu: float, E: float) -> tuple:
    """Truncated ``sum_{L=0}^{L_max} [E + h_mu L - H(L)]`` and a heuristic tail.

    When ``E`` is itself the estimate at ``L_max`` the final term is zero, so
    the tail is twice the ``L_max - 1`` term.
    """
    terms = transient_terms(c, h_mu, E)
    last = terms[-2] if len(terms) > 1 else terms[-1]
    return float(np.sum(terms)), float(2 * last)


def von_neumann_entropy(rho) -> float:
    rho = np.asarray(rho, dtype=np.complex128)
    validate_density(rho)
    lam = np.clip(linalg.hermitian_eigenvalues(rho), 0.0, None)
    return float(-np.sum(_xlogx(lam)))


def density_matrix_rate(rho, L: int) -> float:
    """``S(rho^{(x)L}) / L`` for a source emitting ``rho`` at every step.

    Von Neumann entropy is additive over tensor products, so this is ``S(rho)``.
    """
    if L < 1:
        raise ValueError(f"L must be at least 1, got {L}")
    return von_neumann_entropy(rho)


def forbidden_words(dists, cap: int = FORBIDDEN_CAP) -> list:
    """Irreducible forbidden words up to length ``cap``.

    ``dists`` holds exact distributions indexed by length (``dists[L]``).
    A word is irreducible forbidden when it has probability zero but both its
    longest proper prefix and suffix occur; every proper subword lies in one
    of those two.
    """
    by_len = {d.length: d for d in dists}
    missing = [L for L in range(1, cap + 1) if L not in by_len]
    if missing:
        raise ValueError(f"need exact distributions for lengths {missing}")
    alphabet = by_len[1].alphabet
    k = len(alphabet)
    allowed = {0: {()}}
    found = []
    for L in range(1, cap + 1):
        support = {tuple(int(c) for c in row) for row in by_len[L].codes}
        allowed[L] = support
        for w in itertools.product(range(k), repeat=L):
            if w not in support and w[:-1] in allowed[L - 1] and w[1:] in allowed[L - 1]:
                found.append(tuple(alphabet[c] for c in w))
    return found


@dataclass
class InfoReport:
    name: str
    L_max: int
    deterministic: bool
    irreducible: bool
    h_mu: float
    h_mu_estimate: float
    h_mu_closed_form: float | None
    S_q: float
    E: float
    E_residual: float
    T: float
    T_last_term: float
    T_tail: float
    curve: EntropyCurve
    dH: np.ndarray
    E_curve: np.ndarray
    T_partial: np.ndarray
    forbidden_words: list
    forbidden_cap: int
    notes: tuple = field(default=NOTES)

    @property
    def h_mu_gap(self) -> float | None:
        if self.h_mu_closed_form is None:
            return None
        return abs(self.h_mu_estimate - self.h_mu_closed_form)


def analyze(
    g: QuantumGenerator,
    protocol: MeasurementProtocol = PROTOCOL_I,
    L_max: int | None = None,
    init=None,
    prune_tol: float = PRUNE_TOL,
    forbidden_cap: int = FORBIDDEN_CAP,
    max_prefixes: int | None = None,
) -> InfoReport:
    """Full information analysis of a generator observed under ``protocol``.

    Uses the closed-form entropy rate when the effective generator is
    deterministic and the last block-entropy increment otherwise.  ``init``
    defaults to the stationary density, which only exists for deterministic
    generators.
    """
    eff = effective_generator(g, protocol)
    if L_max is None:
        L_max = default_lmax(eff.dim)
    if L_max < 1:
        raise ValueError(f"L_max must be at least 1, got {L_max}")
    deterministic = is_deterministic(eff)
    rho = as_density(eff, init)

    dists = list(iter_distributions(eff, rho, L_max, prune_tol, max_prefixes))
    curve = EntropyCurve.from_distributions(dists)
    dH = entropy_rate_curve(curve)
    h_est = float(dH[-1])
    h_closed = entropy_rate_closed_form(eff) if deterministic else None
    h_mu = h_closed if h_closed is not None else h_est

    E, E_res = excess_entropy(curve, h_mu)
    terms = transient_terms(curve, h_mu, E)
    T, T_tail = transient_information(curve, h_mu, E)
    cap = min(forbidden_cap, L_max)

    return InfoReport(
        name=eff.name,
        L_max=L_max,
        deterministic=deterministic,
        irreducible=skeleton_is_irreducible(eff),
        h_mu=h_mu,
        h_mu_estimate=h_est,
        h_mu_closed_form=h_closed,
        S_q=von_neumann_entropy(rho),
        E=E,
        E_residual=E_res,
        T=T,
        T_last_term=T_tail / 2,
        T_tail=T_tail,
        curve=curve,
        dH=dH,
        E_curve=excess_entropy_curve(curve, h_mu),
        T_partial=np.cumsum(terms),
        forbidden_words=forbidden_words(dists, cap),
        forbidden_cap=cap,
    )


def default_lmax(dim: int) -> int:
    return 12 if dim <= 2 else 24
