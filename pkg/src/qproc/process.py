"""Word distributions of measured generators.

Exact distributions come from breadth-first extension of running operator
products ``T(s_1)...T(s_L)``, batched through numpy and pruned below
``prune_tol``.  An independent Monte Carlo sampler draws measurement
trajectories with explicit collapse and renormalization.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import linalg
from .errors import NumericalError, ResourceLimitError, ShapeError, ValidationError
from .generator import MEASURE, MeasurementProtocol, QuantumGenerator, density_from_state, stationary_density

PRUNE_TOL = 1e-12
DEFAULT_MAX_PREFIXES = 10**7
MAX_PREFIXES_ENV = "QPROC_MAX_PREFIXES"

EXACT = "exact"
EMPIRICAL = "empirical"


def max_prefixes_from_env() -> int:
    raw = os.environ.get(MAX_PREFIXES_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_PREFIXES
    try:
        value = int(float(raw))
    except ValueError:
        raise ValueError(f"{MAX_PREFIXES_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{MAX_PREFIXES_ENV} must be positive, got {value}")
    return value


@dataclass(eq=False)
class WordDistribution:
    """Probabilities of length-``length`` words.

    Words are stored as rows of symbol indices (``codes``) into ``alphabet``,
    in lexicographic order of those indices.  Absent words have probability 0.
    """

    length: int
    alphabet: tuple
    codes: np.ndarray
    probs: np.ndarray
    kind: str = EXACT
    sample_count: int = 0
    _entries: dict | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.probs)

    @property
    def entries(self) -> dict:
        """Mapping ``tuple of symbols -> probability``."""
        if self._entries is None:
            a = self.alphabet
            self._entries = {tuple(a[c] for c in row): float(p) for row, p in zip(self.codes, self.probs)}
        return self._entries

    def __getitem__(self, word) -> float:
        return self.entries.get(tuple(word), 0.0)

    def support(self) -> list:
        return list(self.entries)

    def total(self) -> float:
        return float(np.sum(self.probs))


@dataclass(frozen=True, eq=False)
class Trajectory:
    alphabet: tuple
    codes: np.ndarray
    seed: int
    initial_state_index: int

    @property
    def symbols(self) -> tuple:
        return tuple(self.alphabet[c] for c in self.codes)

    def __len__(self):
        return len(self.codes)


def _word(g: QuantumGenerator, word) -> list:
    return [g.index(s) for s in word]


def as_density(g: QuantumGenerator, init=None) -> np.ndarray:
    """Normalize an initial condition to a density matrix.

    ``None`` selects the stationary density; a 1-d array is a (bra) state
    vector; a 2-d array is taken as a density matrix.
    """
    if init is None:
        return stationary_density(g)
    a = np.asarray(init, dtype=np.complex128)
    if a.ndim == 1:
        if a.shape[0] != g.dim:
            raise ShapeError(f"state vector has length {a.shape[0]}, generator dimension is {g.dim}")
        norm = float(np.vdot(a, a).real)
        if abs(norm - 1) > 1e-9:
            raise ValidationError("state", f"state vector is not normalized (norm^2 = {norm:.12g})")
        return density_from_state(a)
    if a.shape != (g.dim, g.dim):
        raise ShapeError(f"density matrix has shape {a.shape}, expected {(g.dim, g.dim)}")
    validate_density(a)
    return a


def validate_density(rho: np.ndarray, tol: float = 1e-9) -> None:
    if not linalg.is_hermitian(rho, tol):
        raise ValidationError("density", "density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise ValidationError("density", f"density matrix has trace {tr:.12g}")
    lo = linalg.hermitian_eigenvalues(rho, tol)[-1]
    if lo < -tol:
        raise ValidationError("density", f"density matrix has negative eigenvalue {lo:.3g}")


def word_operator(g: QuantumGenerator, word) -> np.ndarray:
    """``T(s_1) T(s_2) ... T(s_L)``; the identity for the empty word."""
    ts = g.transition_matrices()
    op = linalg.identity(g.dim)
    for i in _word(g, word):
        op = op @ ts[i]
    return op


def _trace_prob(op: np.ndarray, rho: np.ndarray) -> float:
    return float(np.trace(op.conj().T @ rho @ op).real)


def _probability(g: QuantumGenerator, op: np.ndarray, init) -> float:
    if init is not None and np.ndim(init) == 1:
        as_density(g, init)  # validates length and normalization
        v = np.asarray(init, dtype=np.complex128) @ op
        return float(np.vdot(v, v).real)
    return _trace_prob(op, as_density(g, init))


def word_probability(g: QuantumGenerator, init, word) -> float:
    """``Tr[T(w)^+ rho T(w)]``, or ``||psi T(w)||^2`` for a state vector."""
    return _probability(g, word_operator(g, word), init)


def protocol_operator(g: QuantumGenerator, protocol: MeasurementProtocol, observed_word) -> np.ndarray:
    """Operator product for ``observed_word`` read out under a periodic protocol.

    Every act applies ``U``; measuring acts then apply the projector of the
    next observed symbol.  The product stops at the last consumed measurement.
    """
    symbols = _word(g, observed_word)
    op = linalg.identity(g.dim)
    if not symbols:
        return op
    u = g.unitary
    k = 0
    for act in protocol.acts():
        op = op @ u
        if act == MEASURE:
            op = op @ g.projectors[symbols[k]]
            k += 1
            if k == len(symbols):
                return op
    raise AssertionError("unreachable")


def word_probability_protocol(g: QuantumGenerator, protocol: MeasurementProtocol, init, observed_word) -> float:
    return _probability(g, protocol_operator(g, protocol, observed_word), init)


def iter_distributions(
    g: QuantumGenerator,
    init=None,
    max_length: int = 1,
    prune_tol: float = PRUNE_TOL,
    max_prefixes: int | None = None,
) -> Iterator[WordDistribution]:
    """Exact word distributions for L = 0, 1, ..., ``max_length``.

    Each level extends every surviving prefix by every symbol; prefixes with
    probability ``<= prune_tol`` are dropped, which is sound because prefix
    probability never increases under extension.
    """
    if max_length < 0:
        raise ValueError(f"word length must be non-negative, got {max_length}")
    cap = max_prefixes_from_env() if max_prefixes is None else max_prefixes
    rho = as_density(g, init)
    ts = g.transition_matrices()
    k = len(g.alphabet)
    ops = linalg.identity(g.dim)[None]
    codes = np.zeros((1, 0), dtype=np.int16)
    probs = np.array([float(np.trace(rho).real)])
    yield WordDistribution(0, g.alphabet, codes, probs)
    for length in range(1, max_length + 1):
        if len(ops) * k > cap:
            raise ResourceLimitError(
                f"enumeration at L={length} needs {len(ops) * k} live prefixes, cap is {cap} "
                f"(set {MAX_PREFIXES_ENV} to raise it)"
            )
        ext = np.einsum("nij,sjk->nsik", ops, ts).reshape(-1, g.dim, g.dim)
        p = np.einsum("nji,jl,nli->n", ext.conj(), rho, ext).real
        keep = p > prune_tol
        ops = ext[keep]
        parent = np.repeat(codes, k, axis=0)
        sym = np.tile(np.arange(k, dtype=np.int16), len(codes))[:, None]
        codes = np.hstack([parent, sym])[keep]
        probs = p[keep]
        yield WordDistribution(length, g.alphabet, codes, probs)


def enumerate_distribution(
    g: QuantumGenerator,
    init=None,
    length: int = 1,
    prune_tol: float = PRUNE_TOL,
    max_prefixes: int | None = None,
) -> WordDistribution:
    for d in iter_distributions(g, init, length, prune_tol, max_prefixes):
        pass
    return d


def sample_trajectory(
    g: QuantumGenerator,
    protocol: MeasurementProtocol,
    n_observed: int,
    seed: int,
    initial_state: int | None = None,
) -> Trajectory:
    """Simulate ``n_observed`` measurement outcomes with collapse.

    The initial computational basis state is drawn uniformly (sampling
    ``I/dim``) unless ``initial_state`` fixes it.  Randomness comes from
    numpy's PCG64 bit generator seeded with ``seed``: the first draw picks
    the initial state, then one uniform double per measurement picks the
    outcome by inverse CDF over the alphabet order.
    """
    if n_observed < 1:
        raise ValueError(f"number of observed symbols must be at least 1, got {n_observed}")
    rng = np.random.Generator(np.random.PCG64(seed))
    drawn = int(rng.integers(g.dim))
    start = drawn if initial_state is None else int(initial_state)
    if not 0 <= start < g.dim:
        raise ValueError(f"initial state {start} out of range for dimension {g.dim}")
    stages, head = _measurement_stages(g, protocol)
    # plain Python complex arithmetic: numpy call overhead dominates at these sizes
    stages = [_columns(st) for st in stages]
    head = _columns(head)
    state = [0j] * g.dim
    state[start] = 1 + 0j
    draws = rng.random(n_observed).tolist()
    out = np.empty(n_observed, dtype=np.int16)
    n_stages = len(stages)
    for k in range(n_observed):
        ops = head if k == 0 else stages[k % n_stages]
        branches = [[sum(a * b for a, b in zip(state, col)) for col in op] for op in ops]
        weights = [sum(z.real * z.real + z.imag * z.imag for z in br) for br in branches]
        weights = [w if w >= 1e-12 else 0.0 for w in weights]
        total = sum(weights)
        if total == 0.0:
            raise NumericalError(f"all outcome probabilities vanish at observation {k}")
        x = draws[k] * total
        s = max(j for j, w in enumerate(weights) if w > 0)
        acc = 0.0
        for j, w in enumerate(weights):
            acc += w
            if x < acc:
                s = j
                break
        out[k] = s
        norm = weights[s] ** 0.5
        state = [z / norm for z in branches[s]]
    return Trajectory(g.alphabet, out, seed, start)


def _columns(stack: np.ndarray) -> list:
    """``stack[s][:, j]`` as nested Python lists, indexed ``[s][j][i]``."""
    return [[[complex(z) for z in m[:, j]] for j in range(m.shape[1])] for m in stack]


def _measurement_stages(g: QuantumGenerator, protocol: MeasurementProtocol) -> tuple:
    """Stacked ``U^n P(s)`` for each measurement in a period.

    ``n`` counts the acts since the previous measurement.  The first
    measurement of a run sees only the leading skips (``head``); later
    periods also absorb the previous period's trailing skips.
    """
    pattern = protocol.pattern
    gaps = []
    n = 0
    for act in pattern:
        n += 1
        if act == MEASURE:
            gaps.append(n)
            n = 0
    trailing = n
    projs = np.stack(g.projectors)

    def stage(n):
        return linalg.mat_power(g.unitary, n) @ projs

    head = stage(gaps[0])
    stages = [stage(gaps[0] + trailing)] + [stage(n) for n in gaps[1:]]
    return stages, head


def _window_codes(codes: np.ndarray, length: int, base: int) -> np.ndarray:
    windows = np.lib.stride_tricks.sliding_window_view(codes.astype(np.int64), length)
    weights = base ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return windows @ weights


def _decode(keys: np.ndarray, length: int, base: int) -> np.ndarray:
    out = np.empty((len(keys), length), dtype=np.int16)
    k = keys.copy()
    for j in range(length - 1, -1, -1):
        out[:, j] = k % base
        k //= base
    return out


def empirical_distribution(trajectories: Trajectory | Sequence[Trajectory], length: int) -> WordDistribution:
    """Sliding-window block frequencies.

    Several trajectories are pooled by counting windows within each one;
    no window straddles two trajectories.
    """
    trajs = [trajectories] if isinstance(trajectories, Trajectory) else list(trajectories)
    if not trajs:
        raise ValueError("no trajectories given")
    if length < 0:
        raise ValueError(f"word length must be non-negative, got {length}")
    alphabet = trajs[0].alphabet
    base = len(alphabet)
    keys = []
    for t in trajs:
        if t.alphabet != alphabet:
            raise ValueError("trajectories have different alphabets")
        if len(t) < length:
            raise ValueError(f"trajectory of length {len(t)} is shorter than L={length}")
        if length == 0:
            keys.append(np.zeros(len(t) + 1, dtype=np.int64))
        else:
            keys.append(_window_codes(t.codes, length, base))
    allkeys = np.concatenate(keys)
    uniq, counts = np.unique(allkeys, return_counts=True)
    n = int(counts.sum())
    return WordDistribution(length, alphabet, _decode(uniq, length, base), counts / n, EMPIRICAL, n)
