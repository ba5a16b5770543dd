"""The bundled regression corpus of 4-dimensional (2,3,2) germs in C^6.

Each row stores a matrix template with integer parameters, the printed
Tjurina number and Euler obstruction as expressions in those parameters, and
the chi-tilde of the generic hyperplane slice that the Euler obstruction
formula consumes when it cannot be computed here (provenance ``corpus``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from . import groebner
from .eids import EidsDescriptor
from .errors import DetsingError, MissingInput, ResourceLimit
from .invariants import InvariantReport, Provenance
from .obstruction import eu_dispatch
from .poly import VarContext, parse_poly

TABLES = ("table1.json", "table2.json")

# default per-entry budget in work units (see groebner.resource_limits)
DEFAULT_ENTRY_WORK = 4_000


def evaluate_expression(expr: str, params: dict) -> int:
    """Integer value of a printed expression such as "3-k"."""
    p = parse_poly(expr, VarContext(["expr_unused"]), params)
    if not p.is_constant():
        raise ValueError(f"expression {expr!r} is not constant for {params}")
    c = p.constant_term()
    if c.denominator != 1:
        raise ValueError(f"expression {expr!r} is not an integer for {params}")
    return int(c)


@dataclass(frozen=True)
class CorpusEntry:
    table: int
    row: int  # 1-based position in its table
    label: str
    vars: tuple
    matrix: tuple
    t: int
    params: dict  # parameter name -> smallest admissible value
    tau: str
    eu: str
    chi_tilde_slice: str | None = None
    suspect: bool = False
    parse_exempt: bool = False
    note: str = ""

    @property
    def id(self) -> str:
        return f"table{self.table}:{self.label}"

    def instantiations(self) -> list:
        """Parameters at their minimum, then all raised by one."""
        if not self.params:
            return [{}]
        return [dict(self.params), {k: v + 1 for k, v in self.params.items()}]

    def expected_eu(self, params: dict) -> int:
        return evaluate_expression(self.eu, params)

    def expected_tau(self, params: dict) -> int:
        return evaluate_expression(self.tau, params)

    def descriptor(self, params: dict) -> EidsDescriptor:
        if self.parse_exempt:
            raise ValueError(f"row {self.id} is exempt from parsing")
        return EidsDescriptor.from_strings(self.vars, self.matrix, self.t, params)

    def supplied(self, params: dict) -> list:
        if self.chi_tilde_slice is None:
            return []
        value = evaluate_expression(self.chi_tilde_slice, params)
        return [InvariantReport("chi_tilde", value, Provenance.corpus(self.id), "slice")]


def _entries_from(doc: dict) -> list:
    out = []
    for i, row in enumerate(doc["rows"], start=1):
        out.append(CorpusEntry(
            table=int(doc["table"]), row=i, label=row["label"], vars=tuple(doc["vars"]),
            matrix=tuple(tuple(r) for r in row["matrix"]), t=int(doc["t"]),
            params=dict(row.get("params", {})), tau=row["tau"], eu=row["eu"],
            chi_tilde_slice=row.get("chi_tilde_slice"), suspect=bool(row.get("suspect", False)),
            parse_exempt=bool(row.get("parse_exempt", False)), note=row.get("note", "")))
    return out


def load_corpus() -> list:
    entries = []
    base = resources.files("detsing") / "data"
    for name in TABLES:
        entries.extend(_entries_from(json.loads((base / name).read_text())))
    return entries


def find_rows(X: EidsDescriptor, extra: int = 3) -> list:
    """Corpus rows whose instantiation (parameters up to ``extra`` above the
    minimum) has the same matrix as X."""
    hits = []
    for entry in load_corpus():
        if entry.parse_exempt or tuple(entry.vars) != X.ctx.names or entry.t != X.t:
            continue
        names = sorted(entry.params)
        choices = [{}]
        for name in names:
            choices = [dict(c, **{name: entry.params[name] + j}) for c in choices for j in range(extra + 1)]
        for params in choices:
            try:
                Y = entry.descriptor(params)
            except DetsingError:
                continue
            if Y.F.entries == X.F.entries:
                hits.append((entry, params))
    return hits


@dataclass
class CorpusOutcome:
    table: int
    row: int
    label: str
    params: dict
    status: str  # MATCH | SUPPLIED-MATCH | MISMATCH | SKIPPED
    expected: int | None = None
    value: int | None = None
    regime: str | None = None
    inputs: list = field(default_factory=list)
    note: str = ""

    def as_dict(self):
        out = {"table": self.table, "row": self.row, "label": self.label,
               "params": dict(sorted(self.params.items())), "status": self.status}
        for key in ("expected", "value", "regime"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        if self.inputs:
            out["inputs"] = [r.as_dict() for r in self.inputs]
        if self.note:
            out["note"] = self.note
        return out


def run_entry(entry: CorpusEntry, params: dict, seed: int = 0,
              max_work: int | None = DEFAULT_ENTRY_WORK,
              max_seconds: float | None = None) -> CorpusOutcome:
    """Run the pipeline on one instantiation and compare with the table.

    The obstruction is computed first; if that exceeds the budget the
    corpus chi-tilde is used, and the outcome is then at best SUPPLIED-MATCH.
    """
    expected = entry.expected_eu(params)
    out = CorpusOutcome(entry.table, entry.row, entry.label, dict(params), "SKIPPED", expected)
    if entry.parse_exempt:
        out.note = f"parse-exempt: {entry.note}"
        return out
    if entry.suspect:
        out.note = f"suspect: {entry.note}"
        return out
    X = entry.descriptor(params)
    try:
        with groebner.resource_limits(max_work=max_work, max_seconds=max_seconds):
            res = eu_dispatch(X, seed, entry.supplied(params))
    except ResourceLimit as exc:
        out.note = f"resource limit: {exc}"
        return out
    except MissingInput as exc:
        out.note = f"missing input: {exc}"
        return out
    except DetsingError as exc:
        out.status = "MISMATCH"
        out.note = f"{type(exc).__name__}: {exc}"
        return out
    out.value, out.regime, out.inputs = res.value, str(res.regime), list(res.inputs)
    supplied = any(r.provenance.kind != "computed" for r in res.inputs)
    if res.value != expected:
        out.status = "MISMATCH"
    else:
        out.status = "SUPPLIED-MATCH" if supplied else "MATCH"
    return out


def _run_job(job):
    entry, params, seed, max_work, max_seconds = job
    return run_entry(entry, params, seed, max_work, max_seconds)


def run_corpus(seed: int = 0, max_work: int | None = DEFAULT_ENTRY_WORK,
               max_seconds: float | None = None, jobs: int = 1, entries=None) -> list:
    """Outcomes for every row and instantiation, sorted by table and row."""
    if entries is None:
        entries = load_corpus()
    work = [(e, p, seed, max_work, max_seconds) for e in entries for p in e.instantiations()]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_job, work))
    else:
        results = [_run_job(j) for j in work]
    results.sort(key=lambda o: (o.table, o.row, sorted(o.params.items())))
    return results


def summarize(outcomes: list) -> dict:
    counts = {}
    for o in outcomes:
        counts[o.status] = counts.get(o.status, 0) + 1
    good_rows = {(o.table, o.row) for o in outcomes if o.status in ("MATCH", "SUPPLIED-MATCH")}
    return {"counts": dict(sorted(counts.items())), "rows_matched": len(good_rows),
            "mismatches": sum(1 for o in outcomes if o.status == "MISMATCH")}
