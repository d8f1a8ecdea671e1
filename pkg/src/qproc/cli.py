"""Command-line front end: ``qproc analyze|sample|compare|examples``.

Exit codes: 0 success, 1 usage/parse/validation, 2 resource cap,
3 numerical failure.  Errors are printed to stderr as one line starting
with ``qproc-error:``.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classical, infotheory, process
from .errors import NumericalError, QprocError, ResourceLimitError, UnsupportedError
from .generator import effective_generator, is_deterministic
from .specfile import parse_spec, serialize_spec, spec_from_generator
from .systems import builtin_systems, get_system

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RESOURCE = 2
EXIT_NUMERICAL = 3

DEFAULT_SAMPLE_BLOCK = 4
DEFAULT_COMPARE_LMAX = 12


class UsageError(QprocError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    l_max: int | None = None
    prune_tol: float = process.PRUNE_TOL
    seed: int = 0
    sample_length: int | None = None
    out: Path | None = None


def fmt(x) -> str:
    return f"{x:.12g}"


def _load(args):
    if args.example:
        try:
            s = get_system(args.example)
        except KeyError as e:
            raise UsageError(e.args[0]) from None
        return s.name, s.generator, s.protocol
    try:
        text = Path(args.spec).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read spec file {args.spec}: {e.strerror}") from None
    g, protocol = parse_spec(text).build()
    return Path(args.spec).stem, g, protocol


def _config(args) -> RunConfig:
    cfg = RunConfig(
        l_max=getattr(args, "lmax", None),
        prune_tol=getattr(args, "prune_tol", process.PRUNE_TOL),
        seed=getattr(args, "seed", 0),
        sample_length=getattr(args, "steps", None),
        out=Path(args.out) if getattr(args, "out", None) else None,
    )
    if cfg.l_max is not None and cfg.l_max < 1:
        raise UsageError(f"--lmax must be at least 1, got {cfg.l_max}")
    if cfg.sample_length is not None:
        if cfg.sample_length < 1:
            raise UsageError(f"--steps must be at least 1, got {cfg.sample_length}")
        if cfg.l_max is not None and cfg.sample_length < cfg.l_max:
            raise UsageError(f"--steps ({cfg.sample_length}) must be at least --lmax ({cfg.l_max})")
    if cfg.prune_tol < 0:
        raise UsageError("--prune-tol must be non-negative")
    return cfg


def _emit(cfg: RunConfig, filename: str, text: str, out) -> None:
    if cfg.out is None:
        out.write(text)
    else:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / filename).write_text(text, encoding="utf-8")


def format_report(label: str, r: infotheory.InfoReport, protocol) -> str:
    yes = {True: "yes", False: "no"}
    lines = [
        f"system: {label} ({r.name})",
        f"protocol: {protocol.pattern}",
        f"deterministic: {yes[r.deterministic]}",
        f"irreducible internal-state graph: {yes[r.irreducible]}",
        f"L_max: {r.L_max}",
    ]
    if r.h_mu_closed_form is not None:
        lines.append(f"h_mu closed form: {fmt(r.h_mu_closed_form)} bits/measurement")
    lines += [
        f"h_mu estimate dH(L_max): {fmt(r.h_mu_estimate)} bits/measurement",
        f"h_mu used: {fmt(r.h_mu)} bits/measurement",
        f"S_q: {fmt(r.S_q)} bits",
        f"E: {fmt(r.E)} bits (residual |E(L_max) - E(L_max-1)| = {fmt(r.E_residual)})",
        f"T: {fmt(r.T)} bits x measurements (last term {fmt(r.T_last_term)}, heuristic tail {fmt(r.T_tail)})",
        f"irreducible forbidden words up to length {r.forbidden_cap}: "
        + (" ".join("".join(w) for w in r.forbidden_words) if r.forbidden_words else "none"),
        "notes:",
    ]
    lines += [f"  - {n}" for n in r.notes]
    return "\n".join(lines) + "\n"


def format_table(r: infotheory.InfoReport) -> str:
    rows = ["L,H,dH,E_L,T_partial"]
    for L in range(r.L_max + 1):
        dh = fmt(r.dH[L - 1]) if L else ""
        rows.append(f"{L},{fmt(r.curve.H[L])},{dh},{fmt(r.E_curve[L])},{fmt(r.T_partial[L])}")
    return "\n".join(rows) + "\n"


def cmd_analyze(args, out=sys.stdout) -> infotheory.InfoReport:
    cfg = _config(args)
    label, g, protocol = _load(args)
    r = infotheory.analyze(g, protocol, cfg.l_max, prune_tol=cfg.prune_tol)
    summary = format_report(label, r, protocol)
    table = format_table(r)
    if cfg.out is None:
        out.write(summary + "\n" + table)
    else:
        _emit(cfg, "report.txt", summary, out)
        _emit(cfg, "entropy.csv", table, out)
        out.write(summary)
    return r


def cmd_sample(args, out=sys.stdout):
    cfg = _config(args)
    if cfg.sample_length is None:
        raise UsageError("sample needs --steps")
    label, g, protocol = _load(args)
    block = cfg.l_max if cfg.l_max is not None else min(DEFAULT_SAMPLE_BLOCK, cfg.sample_length)
    traj = process.sample_trajectory(g, protocol, cfg.sample_length, cfg.seed)
    emp = process.empirical_distribution(traj, block)
    uniform = np.eye(g.dim) / g.dim
    rows = ["word,count,empirical,exact"]
    for word, p in sorted(emp.entries.items()):
        exact = process.word_probability_protocol(g, protocol, uniform, word)
        rows.append(f"{''.join(word)},{int(round(p * emp.sample_count))},{fmt(p)},{fmt(exact)}")
    table = "\n".join(rows) + "\n"
    seq = " ".join(traj.symbols) + "\n"
    if cfg.out is None:
        out.write(f"# {label}: {len(traj)} symbols, seed {traj.seed}, initial state {traj.initial_state_index}\n")
        out.write(seq if len(traj) <= 200 else "# trajectory not shown (use --out)\n")
        out.write(table)
    else:
        _emit(cfg, "trajectory.txt", seq, out)
        _emit(cfg, "empirical.csv", table, out)
        out.write(
            f"{label}: wrote {len(traj)} symbols (seed {traj.seed}, initial state "
            f"{traj.initial_state_index}) and {len(emp)} length-{block} words to {cfg.out}\n"
        )
    return traj, emp


def _format_matrix(m) -> list:
    return ["  [" + " ".join(f"{x:.12g}" for x in row) + "]" for row in m]


def cmd_compare(args, out=sys.stdout) -> float:
    cfg = _config(args)
    label, g, protocol = _load(args)
    eff = effective_generator(g, protocol)
    if not is_deterministic(eff):
        raise UnsupportedError(
            f"{label} is not deterministic under protocol {protocol.pattern}; it has no classical equivalent"
        )
    cg = classical.classical_equivalent(eff)
    L = cfg.l_max if cfg.l_max is not None else DEFAULT_COMPARE_LMAX
    gap = classical.verify_equivalence(eff, cg, L)
    lines = [f"system: {label} ({eff.name})", f"protocol: {protocol.pattern}", "classical equivalent:"]
    for s, m in zip(cg.alphabet, cg.matrices):
        lines.append(f" T({s}) =")
        lines += _format_matrix(m)
    lines.append(" stationary = [" + " ".join(fmt(x) for x in cg.stationary) + "]")
    lines.append(f"max |Pr_quantum - Pr_classical| over words of length <= {L}: {gap:.3e}")
    text = "\n".join(lines) + "\n"
    out.write(text)
    if cfg.out is not None:
        _emit(cfg, "compare.txt", text, out)
    return gap


def cmd_examples(args, out=sys.stdout) -> None:
    systems = builtin_systems()
    for name, s in systems.items():
        out.write(f"{name:16s} {s.description} [dim {s.generator.dim}, pattern {s.protocol.pattern}]\n")
    if args.write:
        d = Path(args.write)
        d.mkdir(parents=True, exist_ok=True)
        for name, s in systems.items():
            (d / f"{name}.qgen").write_text(serialize_spec(spec_from_generator(s.generator, s.protocol)), encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qproc", description="Intrinsic computation of measured quantum finite-state generators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def source(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--example", help="built-in system name (see 'qproc examples')")
        g.add_argument("--spec", help="path to a generator spec file")
        sp.add_argument("--out", help="directory for output files (default: print to stdout)")

    a = sub.add_parser("analyze", help="block entropies, h_mu, E, T, S_q")
    source(a)
    a.add_argument("--lmax", type=int, help="longest word length (default 12 for dim <= 2, else 24)")
    a.add_argument("--prune-tol", type=float, default=process.PRUNE_TOL)

    s = sub.add_parser("sample", help="simulate a measurement trajectory")
    source(s)
    s.add_argument("--steps", type=int, required=True, help="number of observed symbols")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lmax", type=int, help=f"block length of the empirical table (default {DEFAULT_SAMPLE_BLOCK})")

    c = sub.add_parser("compare", help="classical equivalent and word-probability gap")
    source(c)
    c.add_argument("--lmax", type=int, help=f"longest word length checked (default {DEFAULT_COMPARE_LMAX})")

    e = sub.add_parser("examples", help="list built-in systems")
    e.add_argument("--write", metavar="DIR", help="also write each built-in as a spec file into DIR")
    return p


COMMANDS = {"analyze": cmd_analyze, "sample": cmd_sample, "compare": cmd_compare, "examples": cmd_examples}


def _fail(err, code: int, category: str) -> int:
    msg = " ".join(str(err).split())
    sys.stderr.write(f"qproc-error: {category}: {msg}\n")
    return code


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, out)
    except UsageError as e:
        return _fail(e, EXIT_INVALID, "usage")
    except ResourceLimitError as e:
        return _fail(e, EXIT_RESOURCE, "resource")
    except NumericalError as e:
        return _fail(e, EXIT_NUMERICAL, "numerical")
    except QprocError as e:
        return _fail(e, EXIT_INVALID, "invalid")
    except ValueError as e:
        return _fail(e, EXIT_INVALID, "invalid")
    except (FloatingPointError, np.linalg.LinAlgError) as e:
        return _fail(e, EXIT_NUMERICAL, "numerical")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
