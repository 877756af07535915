"""Command-line front end.

Exit codes: 0 success, 1 a discrepancy, rejected certificate, missing
certificate or exhausted budget, 2 a usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from .category import (
    MASKS, UniverseConfig, build_universe, export_dot, saturate,
)
from .certificate import Certificate, NoCertificate, check_certificate, extract_certificate
from .harness import Budgets, GenConfig, generate, run_diff, write_report
from .semantics import BudgetExceeded, find_model
from .syntax import (
    BOT, Ontology, ParseError, UndeclaredError, canonicalize, nnf,
    parse_concept, parse_ontology,
)
from .tableau import decide_sat, entails


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load(onto: Optional[str], *concepts: str):
    """Ontology from ``onto`` (empty when absent) and the concepts parsed in its signature."""
    text = _read(onto) if onto else ""
    o = parse_ontology(text, extra_concepts=concepts)
    return o, [parse_concept(c, o.signature) for c in concepts]


def _deadline(budgets: Budgets) -> float:
    return time.monotonic() + budgets.secs


def _cat_unsat(c, o: Ontology, budgets: Budgets, universe: str, mask: str = "full"):
    """Categorical verdict plus the saturated category."""
    extra = ()
    deadline = _deadline(budgets)
    if universe == "guided":
        v = decide_sat(c, o, deadline=deadline)
        if not v.satisfiable:
            extra = tuple(extract_certificate(v.meta_tree, c, o).concepts())
    cfg = UniverseConfig(extra, max_objects=budgets.max_objects, rule_mask=MASKS[mask],
                         deadline=deadline)
    cat = build_universe(c, o, cfg)
    saturate(cat, deadline=deadline)
    return cat.has(canonicalize(nnf(c)), BOT), cat


def cmd_check(a, budgets: Budgets) -> int:
    o, (c,) = _load(a.onto, a.concept)
    out, code = [], 0
    tab = None
    if a.mode in ("tableau", "both"):
        v = decide_sat(c, o, deadline=_deadline(budgets))
        tab = not v.satisfiable
        out.append("unsat" if tab else "sat")
        if a.trace:
            for e in v.meta_tree.trace:
                print(e)
    if a.mode in ("category", "both"):
        cat, _ = _cat_unsat(c, o, budgets, a.universe)
        out.append("unsat" if cat else "open")
        if tab is not None and cat != tab and (cat or a.universe == "guided"):
            code = 1
    print(" / ".join(out))
    if code:
        print("discrepancy: engines disagree", file=sys.stderr)
    return code


def cmd_entail(a, budgets: Budgets) -> int:
    o, (x, y) = _load(a.onto, a.sub, a.sup)
    ok = entails(o, x, y, deadline=_deadline(budgets))
    print("entailed" if ok else "not entailed")
    return 0


def cmd_extract(a, budgets: Budgets) -> int:
    o, (c,) = _load(a.onto, a.concept)
    v = decide_sat(c, o, deadline=_deadline(budgets))
    if v.satisfiable:
        print("concept is satisfiable; no certificate", file=sys.stderr)
        return 1
    cert = extract_certificate(v.meta_tree, c, o, strict=not a.macros)
    text = cert.dumps() + "\n"
    if a.output:
        with open(a.output, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"{len(cert.steps)} steps written to {a.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(a, budgets: Budgets) -> int:
    try:
        cert = Certificate.loads(_read(a.certificate))
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"malformed certificate: {e}") from None
    text = _read(a.onto) if a.onto else ""
    o = parse_ontology(text)
    c = parse_concept(a.concept, o.signature) if a.concept else cert.concept
    res = check_certificate(cert, c, o, allow_macros=not a.strict)
    print(res)
    return 0 if res else 1


def cmd_dot(a, budgets: Budgets) -> int:
    o, (c,) = _load(a.onto, a.concept)
    _, cat = _cat_unsat(c, o, budgets, a.universe, a.mask)
    text = export_dot(cat, derived=a.derived, fresh=a.fresh)
    if a.output:
        with open(a.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _weights(text: Optional[str]) -> dict:
    from .harness import DEFAULT_WEIGHTS
    w = dict(DEFAULT_WEIGHTS)
    if not text:
        return w
    for part in text.split(","):
        k, _, v = part.partition("=")
        try:
            w[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"bad weight {part!r}; expected name=number") from None
    return w


def cmd_fuzz(a, budgets: Budgets) -> int:
    try:
        cfg = GenConfig.with_weights(_weights(a.weights), seed=a.seed, count=a.count,
                                     n_concept_names=a.concepts, n_roles=a.roles,
                                     max_depth=a.depth, n_axioms=a.axioms)
    except ValueError as e:
        raise UsageError(str(e)) from None
    rep = run_diff(generate(cfg), budgets)
    rep.config["generator"] = {"seed": cfg.seed, "count": cfg.count,
                               "n_concept_names": cfg.n_concept_names, "n_roles": cfg.n_roles,
                               "max_depth": cfg.max_depth, "n_axioms": cfg.n_axioms,
                               "weights": dict(cfg.weights)}
    sys.stdout.write(rep.to_text())
    if a.report:
        for p in write_report(rep, a.report, figures=not a.no_figures):
            print(f"wrote {p}")
    return 0 if rep.ok else 1


def cmd_model(a, budgets: Budgets) -> int:
    o, (c,) = _load(a.onto, a.concept)
    m = find_model(c, o, a.max_size, cap=budgets.model_cap, deadline=_deadline(budgets))
    if m is None:
        print(f"no model up to size {a.max_size}")
        return 0
    print(f"model of size {m.domain_size}")
    if a.emit_model:
        text = json.dumps(m.to_json(), sort_keys=True, indent=1) + "\n"
        if a.emit_model == "-":
            sys.stdout.write(text)
        else:
            with open(a.emit_model, "w", encoding="utf-8") as f:
                f.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="alccat",
        description="ALC satisfiability by tableau and by categorical saturation, "
                    "with certificates linking the two.",
        epilog="Concepts use the s-expression grammar, e.g. \"(and A (some R (not B)))\". "
               "Ontology files hold 'concepts:' and 'roles:' headers and one "
               "'<concept> => <concept>' axiom per line. ALC_BUDGET_SECS sets the "
               "per-instance time budget. Exit codes: 0 ok, 1 discrepancy, rejection "
               "or exhausted budget, 2 usage error.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def instance(sp, concept=True):
        if concept:
            sp.add_argument("--concept", "-c", required=True, help="concept text")
        sp.add_argument("--onto", "-O", help="ontology file (default: empty ontology)")

    def universe(sp):
        sp.add_argument("--universe", choices=("syntactic", "guided"), default="guided",
                        help="category objects: subterm closure only, or plus the "
                             "objects of an extracted certificate (default)")

    sp = sub.add_parser("check", help="decide satisfiability of one concept")
    instance(sp)
    universe(sp)
    sp.add_argument("--mode", choices=("tableau", "category", "both"), default="tableau")
    sp.add_argument("--trace", action="store_true", help="print tableau rule applications")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("entail", help="decide whether the ontology entails X ⊑ Y")
    sp.add_argument("sub", metavar="X")
    sp.add_argument("sup", metavar="Y")
    instance(sp, concept=False)
    sp.set_defaults(func=cmd_entail)

    sp = sub.add_parser("extract-cert", help="refute a concept and print its certificate")
    instance(sp)
    sp.add_argument("--output", "-o", help="write JSON here instead of stdout")
    sp.add_argument("--macros", action="store_true",
                    help="allow the derived exist-empty and forall-exist steps")
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("verify-cert", help="check a certificate file")
    sp.add_argument("certificate", help="certificate JSON file")
    sp.add_argument("--onto", "-O", help="ontology file (default: empty ontology)")
    sp.add_argument("--concept", "-c", help="expected concept (default: the one in the file)")
    sp.add_argument("--strict", action="store_true", help="reject macro steps")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("export-dot", help="saturate and print the category as DOT")
    instance(sp)
    universe(sp)
    sp.add_argument("--mask", choices=sorted(MASKS), default="full", help="rule mask")
    sp.add_argument("--derived", action="store_true", help="include derived arrows")
    sp.add_argument("--fresh", action="store_true", help="include dom/cod objects")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_dot)

    sp = sub.add_parser("fuzz", help="differential run over random instances")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--concepts", type=int, default=3, help="concept names (1-4)")
    sp.add_argument("--roles", type=int, default=2, help="role names (1-2)")
    sp.add_argument("--depth", type=int, default=3, help="maximum concept depth (0-4)")
    sp.add_argument("--axioms", type=int, default=4, help="maximum axioms (0-5)")
    sp.add_argument("--weights", help="connective weights, e.g. and=2,or=1,not=0")
    sp.add_argument("--report", metavar="DIR", help="write JSON, CSV, text and PNG figures")
    sp.add_argument("--no-figures", action="store_true")
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("model", help="search for a finite model")
    instance(sp)
    sp.add_argument("--max-size", type=int, default=3)
    sp.add_argument("--emit-model", metavar="FILE", nargs="?", const="-",
                    help="write the model as JSON (stdout when no file is given)")
    sp.set_defaults(func=cmd_model)
    return p


def cli_main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    budgets = Budgets.from_env()
    try:
        return a.func(a, budgets)
    except (UsageError, ParseError, UndeclaredError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NoCertificate as e:
        print(f"no certificate: {e}", file=sys.stderr)
        return 1
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
