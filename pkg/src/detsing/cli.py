"""Command-line front end: ``detsing check|invariants|eu FILE`` and
``detsing corpus-run``.

Input documents are JSON objects (see README for the grammar).  With
``--machine`` every command prints JSON Lines: one self-contained record per
line with sorted keys, so runs can be diffed byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import __version__, groebner
from .corpus import DEFAULT_ENTRY_WORK, find_rows, load_corpus, run_corpus, summarize
from .eids import (EidsDescriptor, check_determinantal, slice_by,
                   stratification)
from .errors import (DetsingError, MissingInput, PolySyntaxError,
                     ResourceLimit)
from .invariants import (InvariantReport, NuTrace, Provenance,
                         milnor_determinantal, multiplicity_m0, nu_vanishing,
                         polar_multiplicity_md)
from .obstruction import (corank1_residual_milnor, eu_dispatch,
                          sigma_slice_milnor, _corank1_applies)
from .poly import LinearForm, parse_poly

EXIT_OK, EXIT_FAIL, EXIT_RESOURCE, EXIT_IO = 0, 2, 3, 4

SUPPLIABLE = ("chi_tilde", "chi_link", "m0", "md", "mu", "nu", "tau")


class InputError(Exception):
    """Unreadable or malformed input document."""


@dataclass
class AnalysisRequest:
    command: str
    path: str | None
    seed: int = 0
    machine: bool = False
    max_degree: int | None = None
    max_basis: int | None = None
    max_seconds: float | None = None
    max_work: int | None = None
    jobs: int = 1
    only: tuple = ()


# ------------------------------------------------------------ documents

def load_document(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: the document must be a JSON object")
    return doc


def descriptor_from(doc: dict) -> EidsDescriptor:
    try:
        return EidsDescriptor.from_document(doc)
    except PolySyntaxError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(str(exc)) from exc


def linear_form_from(doc: dict, X: EidsDescriptor) -> LinearForm | None:
    src = doc.get("p")
    if src is None:
        return None
    p = parse_poly(src, X.ctx, doc.get("params"))
    if p.constant_term() or p.degree() != 1 or len(p.homogeneous_part(1)) != len(p):
        raise InputError(f"p = {src!r} is not a linear form")
    return LinearForm(tuple(p.linear_part()))


def split_supplied_key(key: str):
    for name in sorted(SUPPLIABLE, key=len, reverse=True):
        if key == name:
            return name, None
        if key.startswith(name + "_"):
            return name, key[len(name) + 1:]
    raise InputError(f"unknown supplied invariant {key!r}")


def supplied_from(doc: dict) -> list:
    out = []
    for key, value in sorted((doc.get("supplied") or {}).items()):
        if not isinstance(value, int) or isinstance(value, bool):
            raise InputError(f"supplied value {key!r} must be an integer")
        name, label = split_supplied_key(key)
        out.append(InvariantReport(name, value, Provenance.supplied(), label))
    return out


# ------------------------------------------------------------ output

def emit(req: AnalysisRequest, record: dict, text: str | None = None):
    if req.machine:
        record = dict(record, seed=req.seed)
        print(json.dumps(record, sort_keys=True, ensure_ascii=False))
    elif text is not None:
        print(text)


def yes_no(flag) -> str:
    return "unknown" if flag is None else ("yes" if flag else "no")


def format_report(rep: InvariantReport) -> str:
    name = rep.name + (f"[{rep.label}]" if rep.label else "")
    return f"{name} = {rep.value}  ({rep.provenance})"


# ------------------------------------------------------------ commands

def run_check(req: AnalysisRequest) -> int:
    X = descriptor_from(load_document(req.path))
    rep = check_determinantal(X, sigma=True)
    m, n, t = X.type
    strata = []
    if rep.is_determinantal:
        strata = [{"rank_below": s.index, "dim": s.dimension} for s in stratification(X).strata]
    record = {"record": "check", "type": [m, n, t], "N": X.N, "determinantal": rep.is_determinantal,
              "contains_origin": rep.contains_origin, "codim_expected": rep.codim_expected,
              "codim": rep.codim_actual, "dim": rep.dimension, "ids": rep.is_ids,
              "smoothable": rep.is_smoothable, "corank": rep.corank,
              "three_strata": rep.three_strata_ok, "sigma_icis": rep.sigma_is_icis,
              "strata": strata, "notes": list(rep.notes),
              "provenance": Provenance.computed(req.seed, "type check").as_dict()}
    if rep.is_determinantal:
        head = (f"determinantal ({m},{n},{t}), dim {rep.dimension}, IDS: {yes_no(rep.is_ids)}, "
                f"smoothable: {yes_no(rep.is_smoothable)}")
    else:
        head = f"not determinantal of type ({m},{n},{t}): codim {rep.codim_actual}, expected {rep.codim_expected}"
    lines = [head, f"ambient: C^{X.N}, corank at 0: {rep.corank}"]
    for s in strata:
        d = "empty" if s["dim"] is None else f"dim {s['dim']}"
        lines.append(f"  rank < {s['rank_below']}: {d}")
    if rep.is_determinantal and X.t >= 2:
        lines.append(f"singular set ICIS: {yes_no(rep.sigma_is_icis)}")
    lines += [f"note: {note}" for note in rep.notes]
    lines.append(f"seed: {req.seed}")
    emit(req, record, "\n".join(lines))
    return EXIT_OK if rep.is_determinantal else EXIT_FAIL


def compute_invariants(X: EidsDescriptor, seed: int = 0, p: LinearForm | None = None) -> list:
    """The invariants the engine can compute for X, as reports."""
    out = []
    d = X.dim_expected

    def add(name, value, method, label=None, s=seed):
        out.append(InvariantReport(name, int(value), Provenance.computed(s, method), label))

    add("m0", multiplicity_m0(X.ideal, d, seed), "colength with dim-many generic forms")
    if X.is_smoothable_range and d >= 1:
        trace = NuTrace()
        nu = nu_vanishing(X, seed, trace)
        add("md", trace.md[0], "polar curve colength", s=trace.seed)
        add("nu", nu, "slicing recursion")
        if d in (1, 2):
            add("mu", nu, "equals nu for curves and surfaces")
        if p is not None:
            md_p = polar_multiplicity_md(X, p, seed)
            add("md", md_p, "polar curve colength for the given p", "p")
            if d == 2:
                mu_cut = milnor_determinantal(slice_by(X, p), seed)
                add("mu", mu_cut, "Milnor number of the curve X cap {p = 0}", "p_slice")
                add("mu", md_p - mu_cut, "m_2(p) - mu(X cap {p = 0})", "le_greuel")
    elif X.t >= 2:
        dim, mu = sigma_slice_milnor(X, seed)
        if dim is not None:
            add("mu", mu, "ICIS recursion on the sliced singular set", "sigma_slice")
        if _corank1_applies(X):
            add("mu", corank1_residual_milnor(X, seed), "residual of the sliced normal form", "g_tilde")
    return out


def run_invariants(req: AnalysisRequest) -> int:
    doc = load_document(req.path)
    X = descriptor_from(doc)
    p = linear_form_from(doc, X)
    rep = check_determinantal(X, sigma=False)
    if not rep.is_determinantal:
        emit(req, {"record": "error", "error": "not determinantal"}, "not determinantal; no invariants")
        return EXIT_FAIL
    reports = compute_invariants(X, req.seed, p)
    lines = [f"type {X.type} in C^{X.N}, dim {X.dim_expected}"]
    for r in reports:
        emit(req, dict(r.as_dict(), record="invariant"))
        lines.append(format_report(r))
    lines.append(f"seed: {req.seed}")
    if not req.machine:
        print("\n".join(lines))
    return EXIT_OK


def run_eu(req: AnalysisRequest) -> int:
    doc = load_document(req.path)
    X = descriptor_from(doc)
    supplied = supplied_from(doc)
    try:
        res = eu_dispatch(X, req.seed, supplied)
    except MissingInput as exc:
        rows = find_rows(X)
        hint = "; ".join(f"{e.id}" + (" (" + ", ".join(f"{k}={v}" for k, v in sorted(params.items())) + ")"
                                       if params else "") for e, params in rows)
        hint = hint or "no corpus row matches this matrix"
        record = {"record": "error", "error": "missing input", "name": exc.name, "corpus_rows": hint}
        text = f"missing input {exc.name}: {exc.hint or ''}\ncorpus rows that could supply it: {hint}"
        emit(req, record, text)
        return EXIT_RESOURCE if isinstance(exc.__cause__, ResourceLimit) else EXIT_FAIL
    lines = [f"Eu_0(X) = {res.value}", f"regime: {res.regime}"]
    lines += ["  " + format_report(r) for r in res.inputs]
    lines.append(f"seed: {req.seed}")
    emit(req, dict(res.as_dict(), record="eu"), "\n".join(lines))
    return EXIT_OK


def run_corpus_cmd(req: AnalysisRequest) -> int:
    work = DEFAULT_ENTRY_WORK if req.max_work is None else req.max_work
    entries = load_corpus()
    if req.only:
        unknown = set(req.only) - {e.id for e in entries} - {e.label for e in entries}
        if unknown:
            raise InputError(f"no corpus row named {', '.join(sorted(unknown))}")
        entries = [e for e in entries if e.id in req.only or e.label in req.only]
    outcomes = run_corpus(req.seed, work, req.max_seconds, req.jobs, entries)
    for o in outcomes:
        params = ", ".join(f"{k}={v}" for k, v in sorted(o.params.items()))
        where = f"table {o.table} row {o.row} {o.label}" + (f" ({params})" if params else "")
        detail = f"Eu {o.value} (printed {o.expected}) via {o.regime}" if o.value is not None else \
            f"printed Eu {o.expected}"
        text = f"{o.status:<15} {where}: {detail}" + (f"; {o.note}" if o.note else "")
        emit(req, dict(o.as_dict(), record="corpus"), text)
    summary = summarize(outcomes)
    counts = ", ".join(f"{k} {v}" for k, v in summary["counts"].items())
    emit(req, dict(summary, record="summary"),
         f"{counts}; rows with a match: {summary['rows_matched']}; seed {req.seed}")
    return EXIT_FAIL if summary["mismatches"] else EXIT_OK


COMMANDS = {"check": run_check, "invariants": run_invariants, "eu": run_eu, "corpus-run": run_corpus_cmd}


# ------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="detsing", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every generic choice (default 0)")
    common.add_argument("--max-degree", type=int, help="largest polynomial degree in a basis (default 60)")
    common.add_argument("--max-basis", type=int, help="largest basis size (default 5000)")
    common.add_argument("--max-seconds", type=float, help="wall-clock budget")
    common.add_argument("--max-work", type=int, help="budget in work units (reproducible)")
    common.add_argument("--machine", action="store_true", help="JSON Lines output")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("check", "type and stratification check"),
                           ("invariants", "multiplicities, polar multiplicities, Milnor numbers"),
                           ("eu", "local Euler obstruction at the origin")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file")
    p = sub.add_parser("corpus-run", parents=[common], help="regression over the bundled tables")
    p.add_argument("--jobs", type=int, default=1, help="entries computed in parallel")
    p.add_argument("--only", action="append", default=[], metavar="ROW",
                   help="run only this row (label or table1:label); repeatable")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0:
        print("error: the seed must be non-negative", file=sys.stderr)
        return EXIT_IO
    req = AnalysisRequest(args.command, getattr(args, "file", None), args.seed, args.machine,
                          args.max_degree, args.max_basis, args.max_seconds, args.max_work,
                          getattr(args, "jobs", 1), tuple(getattr(args, "only", ())))
    limits = {"max_degree": req.max_degree, "max_basis": req.max_basis}
    if req.command != "corpus-run":
        limits.update(max_seconds=req.max_seconds, max_work=req.max_work)
    try:
        with groebner.resource_limits(**limits):
            return COMMANDS[req.command](req)
    except (InputError, PolySyntaxError) as exc:
        emit(req, {"record": "error", "error": "input", "message": str(exc),
                   "position": getattr(exc, "position", None)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ResourceLimit as exc:
        emit(req, {"record": "error", "error": "resource limit", "message": str(exc)})
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DetsingError as exc:
        emit(req, {"record": "error", "error": type(exc).__name__, "message": str(exc)})
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
