"""``jacobi-kit``: verify structure files from the command line.

Exit codes: 0 every check passed, 1 some check failed, 2 usage or parse
error.  Reports are deterministic in (file, seed, trials, degree); wall
clock timings are only included with ``--timings``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import __version__
from .contact import (
    ContactForm,
    NotContactError,
    decompose_vf,
    induced_jacobi_pair,
    is_contact,
    reconstruct_vf,
    reeb_bracket,
    reeb_field,
    reeb_field_of,
)
from .extcalc import DiffForm, MultiVector, form_on_vf, interior, schouten
from .jacobi import (
    JacobiPair,
    check_jacobi_pair,
    find_jacobiator_witness,
    homogeneity_residual,
    jacobi_bracket,
    poissonization,
    sample_jacobiator,
)
from .jetalg import check_spencer_axioms, holonomic_bracket, pr, spencer_D
from .structfile import StructureFile, StructureFileError, bundled_names, resolve
from .symcore import Expr, ParseError, parse, random_poly

__all__ = ["Verdict", "Report", "cmd_check", "cmd_bracket", "cmd_spencer", "cmd_poissonize",
           "cmd_reeb", "cmd_decompose", "cmd_selftest", "main"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "JACOBI_KIT_SEED"


class UsageError(Exception):
    pass


@dataclass
class Verdict:
    name: str
    passed: bool
    residuals: list[str] = field(default_factory=list)
    seeds: list[int] = field(default_factory=list)
    seconds: float = 0.0

    def to_json(self, timings: bool) -> dict:
        out = {"name": self.name, "passed": self.passed, "residuals": self.residuals, "seeds": self.seeds}
        if timings:
            out["seconds"] = round(self.seconds, 6)
        return out


@dataclass
class Report:
    command: str
    target: str
    kind: str
    params: dict = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    output: list[str] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.overall else EXIT_FAIL

    def run(self, name: str, fn: Callable[[], tuple]) -> Verdict:
        """Time ``fn() -> (passed, residuals, seeds)`` and record it."""
        t0 = time.perf_counter()
        passed, residuals, seeds = fn()
        v = Verdict(name, bool(passed), [str(r) for r in residuals], list(seeds), time.perf_counter() - t0)
        self.verdicts.append(v)
        return v

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "command": self.command,
            "target": self.target,
            "kind": self.kind,
            "params": self.params,
            "output": self.output,
            "verdicts": [v.to_json(timings) for v in self.verdicts],
            "overall": self.overall,
        }
        if timings:
            out["seconds"] = round(sum(v.seconds for v in self.verdicts), 6)
        return out

    def render(self, timings: bool = False) -> str:
        params = " ".join(f"{k}={v}" for k, v in self.params.items())
        lines = [f"{self.command} {self.target} [{self.kind}]" + (f" {params}" if params else "")]
        lines += [f"  {line}" for line in self.output]
        for v in self.verdicts:
            tag = "PASS" if v.passed else "FAIL"
            extra = f"  ({v.seconds:.3f}s)" if timings else ""
            lines.append(f"  {tag}  {v.name}{extra}")
            if not v.passed:
                if v.seeds:
                    lines.append(f"        seeds: {', '.join(map(str, v.seeds))}")
                for r in v.residuals:
                    lines.append(f"        residual: {r}")
        if self.verdicts:
            lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


# ----------------------------------------------------------------- helpers

def _pair_of(sf: StructureFile) -> JacobiPair:
    if sf.kind == "jacobi_pair":
        return sf.jacobi_pair()
    return induced_jacobi_pair(sf.contact_form())


def _expr(source: str, sf: StructureFile) -> Expr:
    try:
        return parse(source, sf.chart)
    except ParseError as exc:
        raise UsageError(f"cannot parse {source!r}: {exc}") from None


def _vector(source: str, sf: StructureFile) -> MultiVector:
    """``"e1, e2, ..."`` (one per coordinate) or ``"x=e1, z=e3"``."""
    parts = [s.strip() for s in source.split(",") if s.strip()]
    chart = sf.chart
    if parts and all("=" in s for s in parts):
        comps = {}
        for s in parts:
            name, _, rhs = s.partition("=")
            name = name.strip()
            if name not in chart.names:
                raise UsageError(f"unknown coordinate {name!r} in vector field")
            if name in comps:
                raise UsageError(f"component {name!r} given twice")
            comps[name] = _expr(rhs, sf)
        return MultiVector.vector(chart, comps)
    if len(parts) != chart.dim:
        raise UsageError(f"vector field needs {chart.dim} comma-separated components, got {len(parts)}")
    return MultiVector.vector(chart, [_expr(s, sf) for s in parts])


def _report(command: str, sf: StructureFile, **params) -> Report:
    return Report(command, sf.name, sf.kind, params)


# ---------------------------------------------------------------- commands

def _check_pair(rep: Report, p: JacobiPair, seed: int, trials: int, degree: int, prefix: str = ""):
    res = check_jacobi_pair(p)
    rep.run(f"{prefix}[L,R] = 0", lambda: (res.residual_lr.is_zero, [res.residual_lr], []))
    rep.run(f"{prefix}[L,L] - 2 R^L = 0", lambda: (res.residual_ll.is_zero, [res.residual_ll], []))

    def sampled():
        bad = [(s, j) for s, j in sample_jacobiator(p, trials, degree, seed) if not j.is_zero]
        return not bad, [j for _, j in bad[:1]], [s for s, _ in bad]

    rep.run(f"{prefix}jacobiator = 0 on {trials} random triples (degree {degree})", sampled)
    if not res.is_jacobi:
        def witness():
            w = find_jacobiator_witness(p, 2)
            if w is None:
                return True, [], []
            f, g, h, j = w
            return False, [f"J({f}, {g}, {h}) = {j}"], []

        rep.run(f"{prefix}jacobiator = 0 on monomial triples (degree <= 2)", witness)


def cmd_check(sf: StructureFile, seed: int = 0, trials: int = 20, degree: int = 3) -> Report:
    rep = _report("check", sf, seed=seed, trials=trials, degree=degree)
    if sf.kind == "jacobi_pair":
        _check_pair(rep, sf.jacobi_pair(), seed, trials, degree)
        return rep
    c = sf.contact_form()
    chk = is_contact(c)
    rep.run("theta ^ dtheta^n != 0", lambda: (chk.is_contact, [chk.witness], []))
    if not chk.is_contact:
        return rep
    R = reeb_field(c)
    rep.output.append(f"R = {R}")
    rep.run("theta(R) = 1", lambda: ((r := form_on_vf(c.theta, R) - 1).is_zero, [r], []))
    rep.run("i_R dtheta = 0", lambda: ((r := interior(R, c.dtheta)).is_zero, [r], []))
    p = induced_jacobi_pair(c)
    rep.output.append(f"L = {p.lam}")
    _check_pair(rep, p, seed, trials, degree, prefix="induced ")
    return rep


def cmd_bracket(sf: StructureFile, f: str, g: str) -> Expr:
    fe, ge = _expr(f, sf), _expr(g, sf)
    if sf.kind == "jacobi_pair":
        return jacobi_bracket(sf.jacobi_pair(), fe, ge)
    return reeb_bracket(sf.contact_form(), fe, ge)


def cmd_spencer(sf: StructureFile, seed: int = 0, trials: int = 20, degree: int = 2) -> Report:
    rep = _report("spencer", sf, seed=seed, trials=trials, degree=degree)
    p = _pair_of(sf)
    t0 = time.perf_counter()
    axioms = check_spencer_axioms(p, trials=trials, seed=seed, degree=degree)
    elapsed = (time.perf_counter() - t0) / len(axioms.FAMILIES)
    for name in axioms.FAMILIES:
        res = axioms.family(name)
        bad = [r for r in res if not r.is_zero]
        labels = sorted({r.label for r in res})
        v = Verdict(
            f"{name} residuals = 0 ({', '.join(labels)})",
            not bad,
            [f"{r.label}: {r.value}" for r in bad[:1]],
            sorted({r.seed for r in bad}),
            elapsed,
        )
        rep.verdicts.append(v)

    def round_trip():
        bad_pr, bad_d = [], []
        for t in range(trials):
            s = seed * 1_000_003 + t
            u = random_poly(p.chart, degree, 2 * s)
            v = random_poly(p.chart, degree, 2 * s + 1)
            h = holonomic_bracket(p, u, v)
            if pr(h) != jacobi_bracket(p, u, v):
                bad_pr.append((s, pr(h) - jacobi_bracket(p, u, v)))
            if not spencer_D(h).is_zero:
                bad_d.append((s, spencer_D(h)))
        bad = bad_pr + bad_d
        return not bad, [r for _, r in bad[:1]], sorted({s for s, _ in bad})

    rep.run(f"pr[j1 u, j1 v] = {{u, v}} and D[j1 u, j1 v] = 0 on {trials} random pairs", round_trip)
    return rep


def cmd_poissonize(sf: StructureFile, coord: str = "t") -> Report:
    rep = _report("poissonize", sf, coord=coord)
    p = _pair_of(sf)
    if coord in p.chart.names:
        raise UsageError(f"coordinate {coord!r} already in chart {list(p.chart.names)}")
    pi = poissonization(p, coord)
    rep.output.append(f"Pi = {pi}")
    rep.run("[Pi, Pi] = 0", lambda: ((r := schouten(pi, pi)).is_zero, [r], []))
    rep.run(f"L_({coord} d_{coord}) Pi + Pi = 0", lambda: ((r := homogeneity_residual(pi, coord)).is_zero, [r], []))
    return rep


def _require_contact_file(sf: StructureFile, verb: str) -> ContactForm:
    if sf.kind != "contact_form":
        raise UsageError(f"{verb} needs a contact_form file, {sf.name} is a {sf.kind}")
    return sf.contact_form()


def cmd_reeb(sf: StructureFile, f: str = "1") -> Report:
    c = _require_contact_file(sf, "reeb")
    rep = _report("reeb", sf, f=f)
    fe = _expr(f, sf)
    Rf = reeb_field_of(c, fe)
    rep.output.append(f"R_f = {Rf}")
    rep.run("theta(R_f) = f", lambda: ((r := form_on_vf(c.theta, Rf) - fe).is_zero, [r], []))
    return rep


def cmd_decompose(sf: StructureFile, vector: str) -> Report:
    c = _require_contact_file(sf, "decompose")
    X = _vector(vector, sf)
    rep = _report("decompose", sf, X=str(X))
    dec = decompose_vf(c, X)
    rep.output.append(f"u = {dec.u}")
    rep.output.append(f"phi = {dec.phi}")
    rep.run("R_u - b(phi) = X", lambda: ((r := reconstruct_vf(c, dec) - X).is_zero, [r], []))
    return rep


def cmd_selftest(seed: int = 0, trials: int = 20, degree: int = 2) -> Report:
    rep = Report("selftest", "bundled", "-", {"seed": seed, "trials": trials, "degree": degree})
    for name in bundled_names():
        sf = resolve(name)
        expect = sf.meta.get("expect", "pass")
        sub = cmd_check(sf, seed, trials, degree)
        got = "pass" if sub.overall else "fail"
        rep.run(f"{name}: check {got}, expected {expect}", lambda: (got == expect, [], []))
    return rep


# ------------------------------------------------------------------ parser

def _env_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")

    sampled = argparse.ArgumentParser(add_help=False)
    sampled.add_argument("--seed", type=int, default=None, help=f"base seed (default ${SEED_ENV} or 0)")
    sampled.add_argument("--trials", type=_positive, default=20)
    sampled.add_argument("--degree", type=_positive, default=None)

    ap = argparse.ArgumentParser(prog="jacobi-kit", description="Exact checks for Jacobi pairs and contact forms.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True, metavar="VERB")
    file_help = "structure file path or bundled example name"

    p = sub.add_parser("check", parents=[common, sampled], help="Jacobi-pair or contact checks")
    p.add_argument("file", help=file_help)
    p = sub.add_parser("bracket", parents=[common], help="print {f, g}")
    p.add_argument("file", help=file_help)
    p.add_argument("f")
    p.add_argument("g")
    p = sub.add_parser("spencer", parents=[common, sampled], help="Spencer-operator axioms on J^1 L")
    p.add_argument("file", help=file_help)
    p = sub.add_parser("poissonize", parents=[common], help="Pi = t^-1 L + d_t ^ R and its checks")
    p.add_argument("file", help=file_help)
    p.add_argument("--coord", default="t", help="name of the added coordinate (default t)")
    p = sub.add_parser("reeb", parents=[common], help="print the Reeb field R_f of a contact form")
    p.add_argument("file", help=file_help)
    p.add_argument("f", nargs="?", default="1", help="function (default 1, the Reeb field)")
    p = sub.add_parser("decompose", parents=[common], help="split a vector field as (theta(X), phi)")
    p.add_argument("file", help=file_help)
    p.add_argument("vector", help='components "e1, e2, ..." or "x=e1, z=e3"')
    p = sub.add_parser("selftest", parents=[common, sampled], help="check every bundled example")
    sub.add_parser("examples", help="list bundled examples")
    return ap


def _emit(obj, args, text: str):
    if getattr(args, "json", False):
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(text)


def _dispatch(args) -> int:
    timings = getattr(args, "timings", False)
    if args.verb == "examples":
        for name in bundled_names():
            sf = resolve(name)
            print(f"{name:<22} {sf.kind:<13} {sf.meta.get('description', '')}")
        return EXIT_OK
    seed = args.seed if getattr(args, "seed", None) is not None else _env_seed()
    if args.verb == "selftest":
        rep = cmd_selftest(seed, args.trials, args.degree or 2)
        _emit(rep.to_json(timings), args, rep.render(timings))
        return rep.exit_code
    sf = resolve(args.file)
    if args.verb == "bracket":
        value = cmd_bracket(sf, args.f, args.g)
        _emit({"target": sf.name, "f": args.f, "g": args.g, "bracket": str(value)}, args, str(value))
        return EXIT_OK
    if args.verb == "check":
        rep = cmd_check(sf, seed, args.trials, args.degree or 3)
    elif args.verb == "spencer":
        rep = cmd_spencer(sf, seed, args.trials, args.degree or 2)
    elif args.verb == "poissonize":
        rep = cmd_poissonize(sf, args.coord)
    elif args.verb == "reeb":
        rep = cmd_reeb(sf, args.f)
    else:
        rep = cmd_decompose(sf, args.vector)
    _emit(rep.to_json(timings), args, rep.render(timings))
    return rep.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _dispatch(args)
    except (StructureFileError, UsageError) as exc:
        print(f"jacobi-kit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotContactError as exc:
        print(f"jacobi-kit: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
