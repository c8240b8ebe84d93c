"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 method
inapplicable.
"""

import argparse
import csv
import io
import json
import os
import sys
from importlib import resources
from typing import Any, Dict, List, Optional, Sequence

from .decomposition import finest_independent_decomposition, restrict_kinetics
from .dsl import Model, parse_expression, parse_model, parse_parametrization_text, render_expr, render_network
from .errors import (ConfigurationError, CRNError, EvaluationError, MethodInapplicable, ParseError,
                     StructuralError)
from .kinetics import symbol
from .mixed import clear_denominators, solve_by_elimination
from .network import deficiency, format_complex
from .parametrization import Parametrization, parametrize
from .pipeline import SCHEMA, param_to_dict, cleared_to_dict, run_pipeline
from .translation import check_dynamic_equivalence, check_translation, search_translation, translate
from .verify import DEFAULT_SEED, parametrization_from_expressions, residual_harness

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INAPPLICABLE = 0, 1, 2, 3


def bundled_examples() -> List[str]:
    return sorted(p.name for p in resources.files("mixedcrn").joinpath("examples").iterdir()
                  if p.name.endswith(".crn"))


def resolve_path(path: str) -> str:
    """Return ``path`` if it exists, else the bundled example of that name."""
    if os.path.exists(path):
        return path
    bundled = resources.files("mixedcrn").joinpath("examples", os.path.basename(path))
    if bundled.is_file():
        return str(bundled)
    raise FileNotFoundError(path)


def _read(path: str) -> str:
    with open(resolve_path(path), encoding="utf-8") as fh:
        return fh.read()


def load_model(path: str) -> Model:
    return parse_model(_read(path))


def _constants(pairs: Sequence[str]) -> Dict[str, float]:
    out = {}
    for item in pairs or ():
        name, _, value = item.partition("=")
        if not value:
            raise ConfigurationError(f"--const expects NAME=VALUE, got {item!r}")
        out[name.strip()] = float(value)
    return out


def _table(rows: List[Sequence[Any]], header: Sequence[str], fmt: str) -> str:
    if fmt == "tsv":
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _emit(data: Dict[str, Any], fmt: str, tables: List[tuple]) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(data, indent=2) + "\n")
        return
    for title, header, rows in tables:
        if fmt == "table" and title:
            sys.stdout.write(f"{title}\n")
        sys.stdout.write(_table(rows, header, fmt))
        if fmt == "table":
            sys.stdout.write("\n")


def _param_rows(P: Parametrization) -> List[tuple]:
    return [(s, render_expr(e)) for s, e in P.items()]


def cmd_analyze(args) -> int:
    model = load_model(args.file)
    summary = deficiency(model.network)
    tags = model.kinetics.classify(model.network)
    data = {"schema": SCHEMA, "structure": summary.as_dict(),
            "kinetics": {k: v.value for k, v in tags.items()}}
    rows = [(k, v) for k, v in summary.as_dict().items()]
    counts: Dict[str, int] = {}
    for t in tags.values():
        counts[t.value] = counts.get(t.value, 0) + 1
    _emit(data, args.format, [("Structure", ("index", "value"), rows),
                              ("Kinetics", ("tag", "reactions"), sorted(counts.items()))])
    return EXIT_OK


def cmd_decompose(args) -> int:
    model = load_model(args.file)
    net = model.network
    dec = finest_independent_decomposition(net)
    parts = restrict_kinetics(net, model.kinetics, dec)
    data = {"schema": SCHEMA, "independent": dec.independent, "parts": []}
    rows = []
    for p, (part, (sub, _, pure)) in enumerate(zip(dec.partition, parts)):
        labels = [net.reactions[i].label for i in part]
        summ = dec.summaries[p]
        data["parts"].append({"index": p + 1, "reactions": labels, "rank": summ.s, "pure_mass_action": pure})
        rows.append((f"N{p + 1}", " ".join(labels), summ.s, "mass-action" if pure else "mixed"))
    total = deficiency(net).s
    data["rank"] = total
    data["rank_sum"] = sum(s.s for s in dec.summaries)
    if args.figures:
        from .plotting import write_figures
        data["figures"] = write_figures(args.figures, net, dec, [not p[2] for p in parts])
    _emit(data, args.format, [(f"Finest independent decomposition (rank {total} = "
                               f"{' + '.join(str(s.s) for s in dec.summaries)})",
                               ("part", "reactions", "rank", "kinetics"), rows)])
    return EXIT_OK


def cmd_translate(args) -> int:
    model = load_model(args.file)
    net, kin = model.network, model.kinetics
    shifts = dict(model.translations)
    if args.search:
        found = search_translation(net, kin, budget=args.budget)
        if found is None:
            sys.stderr.write(f"error: no translation found within budget {args.budget}\n")
            return EXIT_INAPPLICABLE
        shifts = found
    g = translate(net, kin, shifts)
    chk = check_translation(g)
    eq = check_dynamic_equivalence(net, kin, g)
    data = {
        "schema": SCHEMA,
        "shifts": {k: format_complex(v, net.species) for k, v in shifts.items()},
        "vertices": [{"index": v.index + 1, "stoichiometric": format_complex(v.stoich, net.species),
                      "kinetic": None if v.kinetic is None else format_complex(v.kinetic, net.species),
                      "representative": v.index in g.representatives} for v in g.vertices],
        "edges": [{"tail": e.tail + 1, "head": e.head + 1, "label": render_expr(e.label),
                   "phantom": e.phantom, "reaction": e.reaction} for e in g.edges],
        "effective_deficiency": chk.effective_deficiency,
        "kinetic_deficiency": chk.kinetic_deficiency,
        "weakly_reversible": chk.weakly_reversible,
        "v_star_directed": chk.v_star_directed,
        "dynamic_equivalence_residual": eq,
    }
    vrows = [(d["index"], d["stoichiometric"], d["kinetic"] or "-", "*" if d["representative"] else "")
             for d in data["vertices"]]
    erows = [(f"{d['tail']}->{d['head']}", d["label"], "phantom" if d["phantom"] else d["reaction"])
             for d in data["edges"]]
    srows = [(k, data[k]) for k in ("effective_deficiency", "kinetic_deficiency", "weakly_reversible",
                                    "v_star_directed", "dynamic_equivalence_residual")]
    _emit(data, args.format, [("Vertices", ("vertex", "stoichiometric", "kinetic", "rep"), vrows),
                              ("Edges", ("edge", "label", "origin"), erows),
                              ("Checks", ("check", "value"), srows)])
    return EXIT_OK if chk.ok else EXIT_INAPPLICABLE


def cmd_parametrize(args) -> int:
    model = load_model(args.file)
    net, kin = model.network, model.kinetics
    if args.part:
        dec = finest_independent_decomposition(net)
        if not 1 <= args.part <= len(dec):
            raise StructuralError(f"part must be between 1 and {len(dec)}")
        sub, sub_kin, pure = restrict_kinetics(net, kin, dec)[args.part - 1]
    else:
        sub, sub_kin, pure = net, kin, kin.is_mass_action(net)
    labels = {r.label for r in sub.reactions}
    if pure:
        shifts = {k: v for k, v in model.translations.items() if k in labels}
        if not shifts and not check_translation(translate(sub, sub_kin)).ok:
            shifts = search_translation(sub, sub_kin, budget=args.budget)
            if shifts is None:
                raise MethodInapplicable(f"no translation found within budget {args.budget}")
        g = translate(sub, sub_kin, shifts)
        pinned = [net.species_index(s) for s in model.free]
        system = parametrize(g, species=sub.involved_species(), inverse=args.inverse, pinned=pinned)
        P = system.result
        extra = {"tree_constants": [render_expr(k) for k in system.tree_constants],
                 "forest": [[t + 1, h + 1] for t, h in system.forest],
                 "M": [[str(v) for v in row] for row in system.M],
                 "H": [[str(v) for v in row] for row in system.H]}
    else:
        P, plan = solve_by_elimination(sub, sub_kin, pinned=model.free)
        extra = {"elimination": [{"species": s.species, "equation": s.equation} for s in plan.steps]}
    rep = residual_harness(sub, sub_kin, P, seed=args.seed, n=args.samples, tol=args.tol,
                           constant_values=_constants(args.const))
    data = {"schema": SCHEMA, "parametrization": param_to_dict(P), "residual": rep.to_dict(), **extra}
    _emit(data, args.format, [("Parametrization", ("species", "expression"), _param_rows(P)),
                              ("Verification", ("max_residual", "passed"), [(rep.max_residual, rep.passed)])])
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_pipeline(args) -> int:
    model = load_model(args.file)
    report = run_pipeline(model, seed=args.seed, samples=args.samples, tol=args.tol,
                          constant_values=_constants(args.const), clear=args.clear_denominators,
                          search_budget=args.budget)
    data = report.to_dict()
    if args.figures:
        from .plotting import write_figures
        data["figures"] = write_figures(args.figures, report.cleared.network if report.cleared else model.network,
                                        report.decomposition, [not p.pure for p in report.parts],
                                        report.residual.per_sample if report.residual else None, args.tol)
    tables = []
    tables.append(("Decomposition", ("part", "reactions", "method", "residual"),
                   [(f"N{p.index + 1}", " ".join(p.labels), p.method,
                     "-" if p.residual is None else f"{p.residual.max_residual:.3g}") for p in report.parts]))
    if report.parametrization is not None:
        P = report.parametrization
        free = ", ".join(s.name for s in P.free_parameters) or "none"
        tables.append((f"Merged parametrization (free: {free})",
                       ("species", "expression"), _param_rows(P)))
        tables.append(("ACR", ("species", "verdict"), [(s, "ACR" if v else "not-ACR") for s, v in report.acr.items()]))
    if report.residual is not None:
        r = report.residual
        tables.append(("Verification", ("samples", "seed", "max_residual", "median_residual", "passed"),
                       [(r.samples, r.seed, f"{r.max_residual:.3g}", f"{r.median_residual:.3g}", r.passed)]))
    for err in report.errors:
        sys.stderr.write(f"error [{err['stage']}]: {err['message']}\n")
    _emit(data, args.format, tables)
    return report.exit_code


def cmd_verify(args) -> int:
    model = load_model(args.file)
    exprs = parse_parametrization_text(_read(args.params), model.network)
    subs = {}
    for item in args.subs:
        name, _, rhs = item.partition("=")
        if not rhs:
            raise ConfigurationError(f"--subs expects NAME=EXPR, got {item!r}")
        subs[symbol(name.strip())] = parse_expression(rhs)
    if subs:
        exprs = {s: e.subs(subs) for s, e in exprs.items()}
    P = parametrization_from_expressions(model.network, model.kinetics, exprs)
    try:
        rep = residual_harness(model.network, model.kinetics, P, seed=args.seed, n=args.samples, tol=args.tol,
                               constant_values=_constants(args.const))
    except EvaluationError as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    data = {"schema": SCHEMA, "residual": rep.to_dict()}
    if args.figures:
        from .plotting import write_figures
        data["figures"] = write_figures(args.figures, model.network, residuals=rep.per_sample, tol=args.tol)
    rows = [(rep.samples, rep.seed, f"{rep.max_residual:.3g}", f"{rep.median_residual:.3g}", rep.passed,
             rep.failing_species or "")]
    _emit(data, args.format, [("Verification", ("samples", "seed", "max_residual", "median_residual", "passed",
                                                  "worst_species"), rows)])
    if not rep.passed:
        sys.stderr.write(f"verification failed: residual {rep.max_residual:.3g} > {rep.tol:g} "
                         f"at sample {rep.worst_index} (species {rep.failing_species})\n")
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_transform(args) -> int:
    model = load_model(args.file)
    cleared = clear_denominators(model.network, model.kinetics)
    data = {"schema": SCHEMA, **cleared_to_dict(cleared)}
    if args.format == "crn":
        text = render_network(cleared.network, cleared.kinetics)
        for k, v in cleared.substitutions.items():
            text += f"# {k.name} = {render_expr(v)}\n"
        sys.stdout.write(text)
        return EXIT_OK
    rows = [(line,) for line in data["reactions"]]
    subs = [(k, v) for k, v in data["substitutions"].items()]
    _emit(data, args.format, [(f"Cleared by {data['denominator']}", ("reaction",), rows),
                              ("Composite constants", ("symbol", "definition"), subs)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixedcrn", description="Positive steady-state parametrization of reaction "
                                 "networks with mixed kinetics.", epilog="exit codes: 0 ok, 1 verification failure, "
                                 "2 input error, 3 method inapplicable")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, harness=False, figures=False, formats=("table", "json", "tsv")):
        p.add_argument("file", help=".crn file (bundled examples are found by name)")
        p.add_argument("--format", choices=formats, default="table")
        if harness:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"harness seed (default {DEFAULT_SEED})")
            p.add_argument("--samples", type=int, default=100, help="harness samples (default 100)")
            p.add_argument("--tol", type=float, default=1e-9, help="relative residual tolerance (default 1e-9)")
            p.add_argument("--const", action="append", default=[], metavar="NAME=VALUE",
                           help="override a named constant")
        if figures:
            p.add_argument("--figures", metavar="DIR", help="write PNG figures into DIR")

    p = sub.add_parser("analyze", help="structural indices")
    common(p)
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("decompose", help="finest independent decomposition")
    common(p, figures=True)
    p.set_defaults(func=cmd_decompose)
    p = sub.add_parser("translate", help="generalized network and its deficiencies")
    common(p)
    p.add_argument("--search", action="store_true", help="search shifts instead of using the file's")
    p.add_argument("--budget", type=int, default=2, help="L1 size of translation shifts searched (default 2)")
    p.set_defaults(func=cmd_translate)
    p = sub.add_parser("parametrize", help="parametrize one subnetwork")
    common(p, harness=True)
    p.add_argument("--part", type=int, help="1-based part of the finest decomposition")
    p.add_argument("--inverse", choices=("pivot", "moore-penrose"), default="pivot")
    p.add_argument("--budget", type=int, default=2, help="L1 size of translation shifts searched (default 2)")
    p.set_defaults(func=cmd_parametrize)
    p = sub.add_parser("pipeline", help="decompose, parametrize, merge, verify")
    common(p, harness=True, figures=True)
    p.add_argument("--clear-denominators", action="store_true")
    p.add_argument("--budget", type=int, default=2, help="L1 size of translation shifts searched (default 2)")
    p.set_defaults(func=cmd_pipeline)
    p = sub.add_parser("verify", help="check a parametrization file against the network")
    common(p, harness=True, figures=True)
    p.add_argument("params", help="file of 'species = expr' lines")
    p.add_argument("--subs", action="append", default=[], metavar="NAME=EXPR",
                   help="define a composite constant, e.g. k2p=k2*k3")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("transform", help="clear denominators into a mass-action system")
    common(p, formats=("table", "json", "tsv", "crn"))
    p.set_defaults(func=cmd_transform)
    sub.add_parser("examples", help="list bundled example files").set_defaults(
        func=lambda a: (sys.stdout.write("\n".join(bundled_examples()) + "\n"), EXIT_OK)[1])
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        for d in exc.diagnostics:
            sys.stderr.write(f"{getattr(args, 'file', '')}:{d}\n")
        return EXIT_INPUT
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: no such file {exc.args[0]}\n")
        return EXIT_INPUT
    except MethodInapplicable as exc:
        sys.stderr.write(f"inapplicable: {exc}\n")
        return EXIT_INAPPLICABLE
    except EvaluationError as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    except (StructuralError, ConfigurationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except CRNError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
