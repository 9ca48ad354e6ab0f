"""Command-line front end: parse problem files, run pipelines, report.

A problem file is JSON with bit-exact rational strings ("p/q") and words as
integer arrays:

    {
      "group": {"kind": "free_abelian", "rank": 1, "xi": ["-1"],
                "phi": null},
      "cutoff": "-21/2",
      "matrices": [{"dim": 0, "rows": [[[{"coef": 1, "word": [1]}]]]}],
      "orbits": [{"word": [1], "multiplicity": 1, "sign": 1}],
      "one_parameter": {"d": [[...]], "bnd": [[...]], "excluded": [[0]]}
    }

phi is null, {"matrix": [[..]]} (free_abelian) or {"images": [[..], ..]}
(free).  At least one of matrices / orbits / one_parameter must be present
and the cutoff must be negative.  Exit codes: 0 success, 1 parse/validation
error, 2 verification mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .groupring import GroupRingElement, INT
from .groups import FREE, FREE_ABELIAN, ClassIndex, GroupError, GroupSpec, class_of
from .hochschild import EtaSeries
from .novikov import NovikovSeries
from .rationals import is_neg_inf, parse_rational, rational_str
from .zeta import (
    OrbitRecord,
    ZetaError,
    ZetaResult,
    commutative_zeta,
    commutative_zeta_determinant,
    compare_extractions,
    eta,
    nielsen_fuller,
    one_parameter_trace,
    zeta_from_matrices,
)


class ProblemError(ValueError):
    """Validation error carrying the field path it occurred at."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Problem:
    spec: GroupSpec
    cutoff: Fraction
    matrices: Optional[list]  # [(dim, rows)] with rows of GroupRingElement
    orbits: Optional[list]  # [OrbitRecord]
    one_parameter: Optional[dict]  # {"d": rows, "bnd": rows, "excluded": [ClassIndex]}


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ProblemError(path, message)


def _parse_word(spec: GroupSpec, raw, path: str):
    _expect(isinstance(raw, list), path, "word must be an integer array")
    try:
        return spec.reduce(tuple(raw))
    except GroupError as exc:
        raise ProblemError(path, str(exc)) from exc


def _parse_entry(spec: GroupSpec, raw, path: str) -> GroupRingElement:
    _expect(isinstance(raw, list), path, "entry must be a list of {coef, word} terms")
    pairs = []
    for idx, term in enumerate(raw):
        tpath = f"{path}[{idx}]"
        _expect(isinstance(term, dict), tpath, "term must be an object")
        _expect("coef" in term and "word" in term, tpath, "term needs coef and word")
        coef = term["coef"]
        _expect(isinstance(coef, int) and not isinstance(coef, bool), f"{tpath}.coef",
                "coefficient must be an integer")
        pairs.append((_parse_word(spec, term["word"], f"{tpath}.word"), coef))
    return GroupRingElement.from_terms(spec, pairs, INT)


def _parse_matrix(spec: GroupSpec, raw, path: str):
    _expect(isinstance(raw, list) and raw, path, "matrix must be a nonempty list of rows")
    rows = []
    width = None
    for i, row in enumerate(raw):
        rpath = f"{path}[{i}]"
        _expect(isinstance(row, list) and row, rpath, "row must be a nonempty list")
        if width is None:
            width = len(row)
        _expect(len(row) == width, rpath, "ragged matrix")
        rows.append([_parse_entry(spec, e, f"{rpath}[{j}]") for j, e in enumerate(row)])
    return rows


def parse_group(raw, path: str = "group") -> GroupSpec:
    _expect(isinstance(raw, dict), path, "group must be an object")
    kind = raw.get("kind")
    _expect(kind in (FREE, FREE_ABELIAN), f"{path}.kind",
            f"kind must be {FREE!r} or {FREE_ABELIAN!r}")
    rank = raw.get("rank")
    _expect(isinstance(rank, int) and rank >= 1, f"{path}.rank",
            "rank must be a positive integer")
    xi_raw = raw.get("xi")
    _expect(isinstance(xi_raw, list) and len(xi_raw) == rank, f"{path}.xi",
            "xi must list one rational per generator")
    try:
        xi = tuple(parse_rational(x) for x in xi_raw)
    except ValueError as exc:
        raise ProblemError(f"{path}.xi", str(exc)) from exc
    phi = None
    phi_raw = raw.get("phi")
    if phi_raw is not None:
        _expect(isinstance(phi_raw, dict), f"{path}.phi",
                'phi must be null, {"matrix": ...} or {"images": ...}')
        if kind == FREE_ABELIAN:
            m = phi_raw.get("matrix")
            _expect(isinstance(m, list) and len(m) == rank
                    and all(isinstance(r, list) and len(r) == rank for r in m),
                    f"{path}.phi.matrix", "phi.matrix must be an n x n integer matrix")
            _expect(all(isinstance(c, int) for r in m for c in r),
                    f"{path}.phi.matrix", "phi.matrix entries must be integers")
            phi = tuple(tuple(r) for r in m)
        else:
            imgs = phi_raw.get("images")
            _expect(isinstance(imgs, list) and len(imgs) == rank,
                    f"{path}.phi.images", "phi.images must list one word per generator")
            phi = tuple(tuple(img) for img in imgs)
    try:
        return GroupSpec(kind, rank, xi, phi)
    except GroupError as exc:
        raise ProblemError(path, str(exc)) from exc


def parse_problem(raw) -> Problem:
    _expect(isinstance(raw, dict), "$", "problem must be a JSON object")
    _expect("group" in raw, "$", "missing group")
    spec = parse_group(raw["group"])
    _expect("cutoff" in raw, "$", "missing cutoff")
    try:
        cutoff = parse_rational(raw["cutoff"])
    except ValueError as exc:
        raise ProblemError("cutoff", str(exc)) from exc
    _expect(cutoff < 0, "cutoff", "cutoff must be negative")

    matrices = None
    if raw.get("matrices") is not None:
        _expect(isinstance(raw["matrices"], list), "matrices", "must be a list")
        matrices = []
        for i, item in enumerate(raw["matrices"]):
            path = f"matrices[{i}]"
            _expect(isinstance(item, dict), path, "must be an object")
            dim = item.get("dim")
            _expect(isinstance(dim, int) and dim >= 0, f"{path}.dim",
                    "dim must be a nonnegative integer")
            rows = _parse_matrix(spec, item.get("rows"), f"{path}.rows")
            _expect(len(rows) == len(rows[0]), f"{path}.rows", "matrix must be square")
            matrices.append((dim, rows))

    orbits = None
    if raw.get("orbits") is not None:
        _expect(isinstance(raw["orbits"], list), "orbits", "must be a list")
        orbits = []
        for i, item in enumerate(raw["orbits"]):
            path = f"orbits[{i}]"
            _expect(isinstance(item, dict), path, "must be an object")
            word = _parse_word(spec, item.get("word"), f"{path}.word")
            mult = item.get("multiplicity")
            _expect(isinstance(mult, int) and mult >= 1, f"{path}.multiplicity",
                    "multiplicity must be a positive integer")
            sign = item.get("sign")
            _expect(sign in (1, -1), f"{path}.sign", "sign must be 1 or -1")
            _expect(spec.xi_value(word) < 0, f"{path}.word",
                    "closed orbits need xi < 0")
            orbits.append(OrbitRecord(word, mult, sign))

    one_parameter = None
    if raw.get("one_parameter") is not None:
        op = raw["one_parameter"]
        _expect(isinstance(op, dict), "one_parameter", "must be an object")
        d_rows = _parse_matrix(spec, op.get("d"), "one_parameter.d")
        bnd_rows = _parse_matrix(spec, op.get("bnd"), "one_parameter.bnd")
        _expect(len(d_rows[0]) == len(bnd_rows), "one_parameter",
                "D and bnd shapes are incompatible")
        _expect(len(bnd_rows[0]) == len(d_rows), "one_parameter",
                "D and bnd shapes are incompatible")
        excluded_raw = op.get("excluded", [])
        _expect(isinstance(excluded_raw, list), "one_parameter.excluded",
                "must be a list of words")
        twisted = spec.phi is not None and not spec.phi_is_identity()
        excluded = []
        for i, w in enumerate(excluded_raw):
            word = _parse_word(spec, w, f"one_parameter.excluded[{i}]")
            try:
                excluded.append(class_of(spec, word, twisted))
            except GroupError as exc:
                raise ProblemError(f"one_parameter.excluded[{i}]", str(exc)) from exc
        one_parameter = {"d": d_rows, "bnd": bnd_rows, "excluded": excluded}

    _expect(
        matrices is not None or orbits is not None or one_parameter is not None,
        "$",
        "at least one of matrices / orbits / one_parameter is required",
    )
    return Problem(spec, cutoff, matrices, orbits, one_parameter)


def load_problem(path: str) -> Problem:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ProblemError(path, "file not found") from exc
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc
    return parse_problem(raw)


# -- canonical serialization -------------------------------------------------


def _entry_to_json(e: GroupRingElement):
    return [{"coef": c, "word": list(w)} for w, c in e.sorted_terms()]


def serialize_problem(p: Problem) -> dict:
    group = {
        "kind": p.spec.kind,
        "rank": p.spec.rank,
        "xi": [rational_str(x) for x in p.spec.xi],
        "phi": None,
    }
    if p.spec.phi is not None:
        if p.spec.kind == FREE_ABELIAN:
            group["phi"] = {"matrix": [list(r) for r in p.spec.phi]}
        else:
            group["phi"] = {"images": [list(w) for w in p.spec.phi]}
    out = {"group": group, "cutoff": rational_str(p.cutoff)}
    if p.matrices is not None:
        out["matrices"] = [
            {"dim": dim, "rows": [[_entry_to_json(e) for e in row] for row in rows]}
            for dim, rows in p.matrices
        ]
    if p.orbits is not None:
        recs = sorted(
            p.orbits,
            key=lambda r: (
                -(r.multiplicity * p.spec.xi_value(r.primitive)),
                tuple(r.primitive),
                r.multiplicity,
            ),
        )
        out["orbits"] = [
            {"word": list(r.primitive), "multiplicity": r.multiplicity, "sign": r.sign}
            for r in recs
        ]
    if p.one_parameter is not None:
        op = p.one_parameter
        out["one_parameter"] = {
            "d": [[_entry_to_json(e) for e in row] for row in op["d"]],
            "bnd": [[_entry_to_json(e) for e in row] for row in op["bnd"]],
            "excluded": sorted(
                [list(c.canonical) for c in op["excluded"]]
            ),
        }
    return out


def problem_to_json(p: Problem) -> str:
    return json.dumps(serialize_problem(p), indent=2, sort_keys=True)


# -- reports -----------------------------------------------------------------


def _value_json(v):
    if isinstance(v, tuple):
        return [rational_str(x) for x in v]
    return rational_str(v)


def _value_str(v):
    if isinstance(v, tuple):
        return "(" + ", ".join(str(x) for x in v) + ")"
    return str(v)


def _class_rows(result: ZetaResult):
    rows = []
    for hv in result.classes:
        cls = hv.cls
        chain = result.chain.per_class[cls]
        rows.append(
            {
                "word": list(cls.canonical),
                "class": cls.spec.word_str(cls.canonical),
                "xi": rational_str(cls.xi),
                "value": hv.value,
                "chain": chain,
            }
        )
    return rows


def _print_result_table(result: ZetaResult, out) -> None:
    cut = "exact" if is_neg_inf(result.cutoff) else rational_str(result.cutoff)
    print(f"cutoff: {cut}", file=out)
    rows = _class_rows(result)
    if not rows:
        print("(no classes above the cutoff)", file=out)
        return
    print(f"{'class':<16} {'xi':<8} {'value':<14} chain", file=out)
    for r in rows:
        print(
            f"{r['class']:<16} {r['xi']:<8} {_value_str(r['value']):<14} {r['chain']!r}",
            file=out,
        )


def _result_machine(result: ZetaResult) -> dict:
    cut = None if is_neg_inf(result.cutoff) else rational_str(result.cutoff)
    classes = []
    for r in _class_rows(result):
        chain = r["chain"]
        classes.append(
            {
                "word": r["word"],
                "xi": r["xi"],
                "value": _value_json(r["value"]),
                "chain": [
                    {"coef": rational_str(c), "g1": list(w[0]), "g2": list(w[1])}
                    for w, c in chain.sorted_terms()
                ],
            }
        )
    return {"cutoff": cut, "classes": classes}


def _print_eta(series: EtaSeries, out, machine: bool) -> None:
    cut = None if is_neg_inf(series.cutoff) else rational_str(series.cutoff)
    if machine:
        payload = {
            "cutoff": cut,
            "classes": [
                {
                    "word": list(c.canonical),
                    "xi": rational_str(c.xi),
                    "value": rational_str(series.values[c]),
                }
                for c in series.classes()
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)
        return
    print(f"cutoff: {cut if cut is not None else 'exact'}", file=out)
    if not series.values:
        print("(zero)", file=out)
        return
    print(f"{'class':<16} {'xi':<8} value", file=out)
    for c in series.classes():
        print(
            f"{series.spec.word_str(c.canonical):<16} {rational_str(c.xi):<8} "
            f"{series.values[c]}",
            file=out,
        )


def _print_series(series: NovikovSeries, out, machine: bool) -> None:
    cut = None if series.is_exact() else rational_str(series.cutoff)
    if machine:
        payload = {
            "cutoff": cut,
            "terms": [
                {"coef": rational_str(c), "word": list(w)}
                for w, c in series.body.sorted_terms()
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)
        return
    print(f"cutoff: {cut if cut is not None else 'exact'}", file=out)
    print(repr(series.body), file=out)


# -- commands ------------------------------------------------------------------


def _pipeline_result(problem: Problem) -> ZetaResult:
    if problem.matrices is not None:
        return zeta_from_matrices(problem.spec, problem.matrices, problem.cutoff)
    if problem.orbits is not None:
        return nielsen_fuller(problem.spec, problem.orbits, problem.cutoff)
    raise ProblemError("$", "this command needs matrices or orbits")


def cmd_zeta(problem: Problem, machine: bool, out) -> int:
    result = _pipeline_result(problem)
    if machine:
        print(json.dumps(_result_machine(result), indent=2, sort_keys=True), file=out)
    else:
        _print_result_table(result, out)
    return 0


def cmd_eta(problem: Problem, machine: bool, out) -> int:
    result = _pipeline_result(problem)
    _print_eta(eta(result), out, machine)
    return 0


def cmd_commutative(problem: Problem, machine: bool, out) -> int:
    result = _pipeline_result(problem)
    series = commutative_zeta(result, problem.cutoff)
    if problem.matrices is not None:
        det = commutative_zeta_determinant(problem.spec, problem.matrices, problem.cutoff)
        if det != series:
            print("determinant route disagrees with exp(eta) route:", file=sys.stderr)
            print(f"  exp(eta): {series!r}", file=sys.stderr)
            print(f"  det:      {det!r}", file=sys.stderr)
            return 2
    _print_series(series, out, machine)
    return 0


def cmd_verify(problem: Problem, machine: bool, out) -> int:
    if problem.matrices is None or problem.orbits is None:
        raise ProblemError("$", "verify needs both matrices and orbits")
    zm = zeta_from_matrices(problem.spec, problem.matrices, problem.cutoff)
    zo = nielsen_fuller(problem.spec, problem.orbits, problem.cutoff)
    bad = compare_extractions(zm, zo)
    if machine:
        payload = {
            "cutoff": rational_str(problem.cutoff),
            "equal": not bad,
            "mismatched_classes": [list(c.canonical) for c in bad],
        }
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)
    else:
        print(f"cutoff: {rational_str(problem.cutoff)}", file=out)
        if not bad:
            n = len(zm.extractions())
            print(f"match: torsion trace and orbit series agree on {n} classes", file=out)
        else:
            print("MISMATCH at classes:", file=out)
            lmap, rmap = zm.extractions(), zo.extractions()
            for c in bad:
                print(
                    f"  {problem.spec.word_str(c.canonical)}: "
                    f"matrices={_value_str(lmap.get(c, 0))} "
                    f"orbits={_value_str(rmap.get(c, 0))}",
                    file=out,
                )
    return 0 if not bad else 2


def cmd_trace(problem: Problem, machine: bool, out) -> int:
    if problem.one_parameter is None:
        raise ProblemError("$", "trace needs a one_parameter block")
    op = problem.one_parameter
    result = one_parameter_trace(
        problem.spec, op["d"], op["bnd"], op["excluded"]
    )
    if machine:
        print(json.dumps(_result_machine(result), indent=2, sort_keys=True), file=out)
    else:
        _print_result_table(result, out)
    return 0


COMMANDS = {
    "zeta": cmd_zeta,
    "eta": cmd_eta,
    "commutative": cmd_commutative,
    "verify": cmd_verify,
    "trace": cmd_trace,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowzeta",
        description="Exact zeta functions of gradient-flow data: Dennis trace "
        "of Novikov torsion vs. closed-orbit series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("zeta", "per-class chain and homology value of the zeta function"),
        ("eta", "class-indexed rational eta function"),
        ("commutative", "commutative zeta as a truncated series (with det cross-check)"),
        ("verify", "compare the matrix and orbit pipelines per class"),
        ("trace", "one-parameter trace of homotopy data"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="problem file (JSON)")
        p.add_argument("--cutoff", help="override the file's cutoff (p/q, negative)")
        p.add_argument(
            "--output", choices=["table", "machine"], default="table",
            help="report format",
        )
        p.add_argument(
            "--bound", type=int, default=8,
            help="length bound for twisted-conjugacy searches on free groups",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        problem = load_problem(args.file)
        if args.cutoff is not None:
            cutoff = parse_rational(args.cutoff)
            if cutoff >= 0:
                raise ProblemError("--cutoff", "cutoff must be negative")
            problem.cutoff = cutoff
        return COMMANDS[args.command](problem, args.output == "machine", sys.stdout)
    except (ProblemError, ZetaError, GroupError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
