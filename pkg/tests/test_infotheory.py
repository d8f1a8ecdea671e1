import functools

import numpy as np
import pytest

from qproc.errors import UnsupportedError, ValidationError
from qproc.generator import PROTOCOL_I, build_generator
from qproc.infotheory import (
    EntropyCurve,
    analyze,
    block_entropy,
    density_matrix_rate,
    entropy_rate_closed_form,
    entropy_rate_curve,
    excess_entropy,
    forbidden_words,
    transient_information,
    von_neumann_entropy,
)
from qproc.process import EXACT, WordDistribution, iter_distributions
from qproc.systems import beam_splitter, spin1

from conftest import NAMES, SYSTEMS, effective, random_unitary

LOG3 = np.log2(3)
GOLDEN_MEAN_E = LOG3 - 4 / 3
EVEN_E = LOG3 - 2 / 3


def dist(probs, L):
    probs = np.asarray(probs, dtype=float)
    return WordDistribution(L, ("0", "1"), np.zeros((len(probs), L), dtype=np.int16), probs, EXACT)


@functools.lru_cache(maxsize=None)
def curve_for(name, L_max):
    return EntropyCurve.from_distributions(iter_distributions(effective(name), None, L_max))


@functools.lru_cache(maxsize=None)
def report(name, L_max=None):
    s = SYSTEMS[name]
    return analyze(s.generator, s.protocol, L_max)


def test_block_entropy_examples():
    for L in (1, 3, 6):
        assert block_entropy(dist(np.full(2**L, 2.0**-L), L)) == pytest.approx(L, abs=1e-12)
        assert block_entropy(dist([0.5, 0.5], L)) == pytest.approx(1, abs=1e-15)
    assert block_entropy(dist([1.0], 4)) == 0.0
    assert block_entropy(dist([0.5, 0.5, 0.0], 2)) == pytest.approx(1)


def test_block_entropy_rejects_unnormalized():
    with pytest.raises(ValidationError):
        block_entropy(dist([0.5, 0.4], 1))


def test_entropy_rate_curves():
    assert np.allclose(entropy_rate_curve(curve_for("beamsplitter-i", 12)), 1, atol=1e-12, rtol=0)
    dh = entropy_rate_curve(curve_for("beamsplitter-ii", 12))
    assert dh[0] == pytest.approx(1, abs=1e-12) and np.allclose(dh[1:], 0, atol=1e-12)
    for name in ("spin1-y", "spin1-x"):
        assert entropy_rate_curve(curve_for(name, 24))[-1] == pytest.approx(2 / 3, abs=5e-3)


def test_entropy_rate_curve_requires_length():
    with pytest.raises(ValueError):
        entropy_rate_curve(EntropyCurve(np.array([0.0])))


def test_closed_form_rates():
    assert entropy_rate_closed_form(beam_splitter()) == pytest.approx(1, abs=1e-12)
    assert entropy_rate_closed_form(effective("beamsplitter-ii")) == pytest.approx(0, abs=1e-12)
    # rows of |U_ij|^2 for spin-1: (1/2, 1/2, 0), (0, 0, 1), (1/2, 1/2, 0) -> 1, 0, 1 bits
    assert entropy_rate_closed_form(spin1("y")) == pytest.approx(2 / 3, abs=1e-12)
    nd = build_generator(np.eye(2), {"0": 0.5 * np.ones((2, 2)), "1": 0.5 * np.array([[1, -1], [-1, 1]])})
    with pytest.raises(UnsupportedError):
        entropy_rate_closed_form(nd)


def test_excess_entropy_examples():
    E, res = excess_entropy(curve_for("beamsplitter-i", 12), 1.0)
    assert abs(E) <= 1e-9 and res <= 1e-9
    E, _ = excess_entropy(curve_for("beamsplitter-ii", 12), 0.0)
    assert E == pytest.approx(1, abs=1e-9)


def test_golden_mean_matches_analytic_values():
    # order-1 Markov chain: E converges at L=1 and T equals E
    c = curve_for("spin1-y", 24)
    E, res = excess_entropy(c, 2 / 3)
    assert E == pytest.approx(GOLDEN_MEAN_E, abs=1e-9) and res <= 1e-9
    T, tail = transient_information(c, 2 / 3, E)
    assert T == pytest.approx(GOLDEN_MEAN_E, abs=1e-9) and abs(tail) <= 1e-9


def test_even_process_approaches_analytic_excess_entropy():
    c = curve_for("spin1-x", 24)
    E, res = excess_entropy(c, 2 / 3)
    assert 0 < EVEN_E - E < 1e-3
    assert res < 2e-4


def test_transient_information_examples():
    T, tail = transient_information(curve_for("beamsplitter-i", 12), 1.0, 0.0)
    assert abs(T) <= 1e-9 and abs(tail) <= 1e-9
    T, tail = transient_information(curve_for("beamsplitter-ii", 12), 0.0, 1.0)
    assert T == pytest.approx(1, abs=1e-9) and abs(tail) <= 1e-9


def test_von_neumann_entropy_examples():
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1, abs=1e-12)
    assert von_neumann_entropy(np.eye(3) / 3) == pytest.approx(1.5849625007211562, abs=1e-12)
    psi = np.array([0.6, 0.8j])
    assert von_neumann_entropy(np.outer(psi.conj(), psi)) == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValidationError):
        von_neumann_entropy(np.eye(2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_von_neumann_unitary_invariance(rng, n):
    for _ in range(5):
        w = rng.random(n)
        rho = np.diag(w / w.sum()).astype(complex)
        u = random_unitary(rng, n)
        assert von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)


def _kron_power_entropy(rho, L):
    big = functools.reduce(np.kron, [rho] * L)
    lam = np.linalg.eigvalsh(big)
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log2(lam))) / L


@pytest.mark.parametrize(
    "rho",
    [np.eye(2) / 2, np.eye(3) / 3, np.diag([1.0, 0.0]), np.array([[0.7, 0.2j], [-0.2j, 0.3]])],
)
@pytest.mark.parametrize("L", [1, 2, 4])
def test_density_matrix_rate_matches_tensor_power(rho, L):
    assert density_matrix_rate(rho, L) == pytest.approx(_kron_power_entropy(rho, L), abs=1e-9)


def test_forbidden_word_examples():
    fw = lambda name: ["".join(w) for w in forbidden_words(iter_distributions(effective(name), None, 6), 6)]
    assert fw("spin1-y") == ["00"]
    assert fw("spin1-x") == ["010", "01110"]
    assert fw("beamsplitter-i") == []
    assert fw("beamsplitter-ii") == ["01", "10"]


def test_forbidden_words_needs_all_lengths():
    with pytest.raises(ValueError):
        forbidden_words(iter_distributions(beam_splitter(), None, 3), 6)


@pytest.mark.parametrize("name", NAMES)
def test_curve_invariants(name):
    L_max = 12 if effective(name).dim == 2 else 24
    c = curve_for(name, L_max)
    dh = entropy_rate_curve(c)
    assert np.all(dh >= -1e-9)
    assert np.all(np.diff(dh) <= 1e-9)
    h = entropy_rate_closed_form(effective(name))
    assert np.all(np.diff(c.H - h * np.arange(L_max + 1)) >= -1e-9)
    E, _ = excess_entropy(c, h)
    terms = E + h * np.arange(L_max + 1) - c.H
    assert np.all(terms >= -1e-9)
    assert h >= dh[-1] - 5e-3


def test_analyze_beam_splitter_protocols():
    r = report("beamsplitter-i", 12)
    assert (r.h_mu, r.S_q, r.E, r.T) == pytest.approx((1, 1, 0, 0), abs=1e-9)
    r = report("beamsplitter-ii", 12)
    assert (r.h_mu, r.S_q, r.E, r.T) == pytest.approx((0, 1, 1, 1), abs=1e-9)
    assert r.deterministic and not r.irreducible


def test_analyze_report_fields():
    r = report("spin1-y")
    assert r.L_max == 24 and r.deterministic and r.irreducible
    assert r.h_mu == r.h_mu_closed_form
    assert r.h_mu_gap == pytest.approx(abs(r.h_mu_estimate - 2 / 3))
    assert len(r.curve.H) == 25 and len(r.dH) == 24 and len(r.T_partial) == 25
    assert r.T_partial[-1] == pytest.approx(r.T)
    assert ["".join(w) for w in r.forbidden_words] == ["00"]
    assert 0 <= r.h_mu_estimate <= 1 and 0 <= r.S_q <= LOG3 + 1e-12


def test_analyze_nondeterministic_uses_estimate():
    nd = build_generator(
        random_unitary(np.random.default_rng(5), 2), {"0": 0.5 * np.ones((2, 2)), "1": 0.5 * np.array([[1, -1], [-1, 1]])}
    )
    with pytest.raises(UnsupportedError):
        analyze(nd, PROTOCOL_I, 6)
    r = analyze(nd, PROTOCOL_I, 8, init=np.eye(2) / 2)
    assert not r.deterministic and r.h_mu_closed_form is None
    assert r.h_mu == r.h_mu_estimate
    assert r.S_q == pytest.approx(1)


def test_measures_invariant_under_relabeling():
    g = spin1("x")
    h = g.relabel({"0": "1", "1": "0"})
    a, b = analyze(g, PROTOCOL_I, 14), analyze(h, PROTOCOL_I, 14)
    assert np.array_equal(a.curve.H, b.curve.H)
    assert (a.h_mu, a.E, a.T, a.S_q) == (b.h_mu, b.E, b.T, b.S_q)
