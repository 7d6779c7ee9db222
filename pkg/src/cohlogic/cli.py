"""Single command-line entry point for every pipeline in the package.

Subcommands: parse, prove, refute, eval, models, typespace, duality,
check-bc, check-frobenius, interpret, thf, roundtrip.

Exit codes: 0 = holds/proved, 1 = fails/refuted, 2 = unknown (budget ran
out), 3 = input error.  ``--json`` emits a machine-readable run report;
identical invocations produce identical reports apart from the wall-time
field.
"""

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import calculus, internal_logic, lattice, semantics, syntax, typespace

SCHEMA_VERSIONS = {
    "run-report": "1",
    "poset": "1",
    "lattice": "1",
    "model": "1",
    "derivation": "1",
    "presentation": "1",
}

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_UNKNOWN = 2
EXIT_INPUT = 3


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on bad flags; the contract wants 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


# ---------------------------------------------------------------------------
# report plumbing


def _sha256(text):
    return hashlib.sha256(text.encode()).hexdigest()


def _jsonable(x):
    if isinstance(x, (syntax.Top, syntax.Bot, syntax.Atom, syntax.Eq,
                      syntax.And, syntax.Or, syntax.Exists)):
        return syntax.print_formula(x)
    if isinstance(x, syntax.Sequent):
        return syntax.print_sequent(x)
    if isinstance(x, semantics.FiniteModel):
        return semantics.model_to_json(x)
    if isinstance(x, calculus.Derivation):
        return calculus.derivation_to_json(x)
    if isinstance(x, calculus.Proved):
        return {"verdict": "Proved"}
    if isinstance(x, calculus.Refuted):
        return {"verdict": "Refuted",
                "countermodel": semantics.model_to_json(x.model),
                "assignment": list(x.assignment)}
    if isinstance(x, calculus.Unknown):
        return {"verdict": "Unknown", "reason": x.reason}
    if isinstance(x, (frozenset, set)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _report(command, inputs, bounds, verdicts, extra=None, started=None):
    rep = {
        "schema": SCHEMA_VERSIONS["run-report"],
        "command": command,
        "inputs": {k: _sha256(v) for k, v in inputs.items()},
        "bounds": bounds,
        "verdicts": _jsonable(verdicts),
    }
    if extra:
        rep.update(_jsonable(extra))
    rep["wall_time_s"] = round(time.monotonic() - started, 3) if started else 0.0
    return rep


def _emit(args, rep, lines):
    if args.json:
        print(json.dumps(rep, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _read(path):
    p = Path(path)
    if not p.is_file():
        raise CliError(f"no such file: {path}")
    return p.read_text()


def _load_theory(path):
    return syntax.parse_theory(_read(path))


def _budgets(args):
    return calculus.Budgets(depth=args.depth, model_size=args.model_size)


def _verdict_name(v):
    if isinstance(v, calculus.Proved):
        return "Holds"
    if isinstance(v, calculus.Refuted):
        return "Fails"
    return "Unknown"


def _verdict_exit(v):
    return {"Holds": EXIT_HOLDS, "Fails": EXIT_FAILS}.get(_verdict_name(v),
                                                          EXIT_UNKNOWN)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_parse(args):
    started = time.monotonic()
    text = _read(args.theory)
    t = syntax.parse_theory(text)
    rep = _report(
        "parse", {"theory": text},
        {}, [{"verdict": "Holds"}],
        {"name": t.name,
         "relations": [list(r) for r in t.signature.relations],
         "axioms": len(t.axioms)},
        started,
    )
    return EXIT_HOLDS, rep, [syntax.print_theory(t)]


def _cmd_prove(args, want="prove"):
    started = time.monotonic()
    text = _read(args.theory)
    t = syntax.parse_theory(text)
    s = syntax.parse_sequent(args.sequent, t.signature)
    v = calculus.entails(t, s, _budgets(args))
    verdict = {"verdict": _verdict_name(v), "sequent": s}
    lines = [f"{_verdict_name(v)}: {syntax.print_sequent(s)}"]
    if isinstance(v, calculus.Proved):
        verdict["derivation"] = v.derivation
        ok = calculus.check_derivation(t, v.derivation)
        verdict["derivation_checked"] = ok
        lines.append(f"derivation checked: {ok}")
    if isinstance(v, calculus.Refuted):
        verdict["countermodel"] = v.model
        verdict["assignment"] = list(v.assignment)
        lines.append(f"countermodel of size {v.model.size} at {v.assignment}")
    rep = _report(
        want, {"theory": text, "sequent": args.sequent},
        {"depth": args.depth, "model_size": args.model_size},
        [verdict], None, started,
    )
    return _verdict_exit(v), rep, lines


def _cmd_refute(args):
    return _cmd_prove(args, want="refute")


def _cmd_eval(args):
    started = time.monotonic()
    text = _read(args.theory)
    t = syntax.parse_theory(text)
    mtext = _read(args.model)
    m = semantics.model_from_json(json.loads(mtext))
    names = [v for v in args.vars.split(",") if v] if args.vars else []
    phi = syntax.parse_formula(args.formula, names, t.signature)
    a = tuple(int(v) for v in args.args.split(",") if v) if args.args else ()
    if len(a) != len(names):
        raise CliError("--args must assign every context variable")
    if any(not 0 <= v < m.size for v in a):
        raise CliError("assignment out of carrier range")
    value = semantics.eval_formula(m, phi, a)
    rep = _report(
        "eval", {"theory": text, "model": mtext, "formula": args.formula},
        {}, [{"verdict": "Holds" if value else "Fails", "value": value}],
        None, started,
    )
    return (EXIT_HOLDS if value else EXIT_FAILS), rep, [str(value).lower()]


def _cmd_models(args):
    started = time.monotonic()
    text = _read(args.theory)
    t = syntax.parse_theory(text)
    ms = semantics.enumerate_models(t, args.bound)
    shown = ms if args.limit is None else ms[: args.limit]
    rep = _report(
        "models", {"theory": text}, {"bound": args.bound},
        [{"verdict": "Holds", "count": len(ms)}],
        {"models": shown}, started,
    )
    lines = [f"{len(ms)} models up to size {args.bound} (up to isomorphism)"]
    for m in shown:
        lines.append(json.dumps(semantics.model_to_json(m)))
    return EXIT_HOLDS, rep, lines


def _cmd_typespace(args):
    started = time.monotonic()
    text = _read(args.theory)
    t = syntax.parse_theory(text)
    a = typespace.compute_typespace(t, N=args.cutoff, B=args.bound,
                                    d=args.formula_depth)
    points = {n: len(a.points[n]) for n in range(args.cutoff + 1)}
    rep = _report(
        "typespace", {"theory": text},
        {"bound": args.bound, "formula_depth": args.formula_depth,
         "cutoff": args.cutoff},
        [{"verdict": "Holds", "points": points}],
        {"stable": a.stable, "stable_arities": list(a.stable_arities)},
        started,
    )
    lines = [f"arity {n}: {points[n]} points"
             f" ({'stable' if a.stable_arities[n] else 'not stable'})"
             for n in range(args.cutoff + 1)]
    lines.append(f"stable at every arity: {a.stable}")
    return EXIT_HOLDS, rep, lines


def _cmd_duality(args):
    started = time.monotonic()
    if (args.lattice is None) == (args.poset is None):
        raise CliError("give exactly one of --lattice or --poset")
    if args.lattice:
        text = _read(args.lattice)
        l = lattice.lattice_from_json(json.loads(text))
        ok = lattice.duality_roundtrip_lattice(l)
        kind, size = "lattice", l.n
    else:
        text = _read(args.poset)
        p = lattice.poset_from_json(json.loads(text))
        ok = lattice.duality_roundtrip_poset(p)
        kind, size = "poset", p.n
    rep = _report(
        "duality", {kind: text}, {},
        [{"verdict": "Holds" if ok else "Fails", "kind": kind, "size": size}],
        None, started,
    )
    return (EXIT_HOLDS if ok else EXIT_FAILS), rep, [
        f"{kind} round trip: {'isomorphism' if ok else 'FAILED'}"
    ]


def _parse_span(text):
    # "b<-d->c": a span d -> b, d -> c of finite sets given by their sizes
    parts = text.replace(" ", "").split("<-")
    if len(parts) == 2 and "->" in parts[1]:
        mid, right = parts[1].split("->")
        try:
            return int(mid), int(parts[0]), int(right)
        except ValueError:
            pass
    raise CliError(f"cannot parse span {text!r}; expected like '1<-0->1'")


def _parse_map(text, dn, size):
    if text is None:
        if dn == 0:
            return ()
        raise CliError("span legs with nonempty source need --left/--right")
    values = tuple(int(v) for v in text.split(","))
    if len(values) != dn or any(not 1 <= v <= size for v in values):
        raise CliError(f"map {text!r} is not a function [{dn}] -> [{size}]")
    return values


def _cmd_check_bc(args):
    started = time.monotonic()
    text = _read(args.theory)
    t = syntax.parse_theory(text)
    dn, bn, cn = _parse_span(args.pushout)
    h = _parse_map(args.left, dn, bn)
    f = _parse_map(args.right, dn, cn)
    an, u, v = internal_logic.pushout_of_span(h, f, dn, bn, cn)
    if an > args.cutoff:
        raise CliError(f"pushout has {an} elements, beyond cutoff {args.cutoff}")
    a = typespace.compute_typespace(t, N=args.cutoff, B=args.bound,
                                    d=args.formula_depth)
    out = typespace.check_functor_bc(a, h, f, dn, bn, cn, an, u, v)
    verdict = "Holds" if out["bc"] else "Fails"
    rep = _report(
        "check-bc", {"theory": text},
        {"bound": args.bound, "formula_depth": args.formula_depth,
         "cutoff": args.cutoff},
        [{"verdict": verdict, "bc": out["bc"],
          "bc_witness": out["bc_witness"],
          "universal_map_surjective": out["universal_map_surjective"],
          "missed_pair": out["missed_pair"]}],
        {"pushout": {"span": [dn, bn, cn], "apex": an,
                     "left": list(u), "right": list(v)},
         "stable_arities": list(a.stable_arities)},
        started,
    )
    lines = [
        f"beck-chevalley: {out['bc']}",
        f"universal_map_surjective: "
        f"{str(out['universal_map_surjective']).lower()}",
    ]
    if out["missed_pair"] is not None:
        lines.append(f"point pair missed by the universal map: {out['missed_pair']}")
    return (EXIT_HOLDS if out["bc"] else EXIT_FAILS), rep, lines


def _cmd_check_frobenius(args):
    started = time.monotonic()
    text = _read(args.map)
    obj = json.loads(text)
    src = lattice.poset_from_json(obj["source"])
    tgt = lattice.poset_from_json(obj["target"])
    g = lattice.MonotoneMap(src, tgt, obj["values"])
    f, *_ = lattice.dual_lattice_hom(g)
    h = lattice.left_adjoint(f)
    frob, witness = lattice.check_frobenius(h, f)
    open_ = lattice.is_open_map(g)
    verdict = "Holds" if frob else "Fails"
    rep = _report(
        "check-frobenius", {"map": text}, {},
        [{"verdict": verdict, "frobenius": frob, "witness": witness,
          "open_map": open_, "agreement": frob == open_}],
        None, started,
    )
    return (EXIT_HOLDS if frob else EXIT_FAILS), rep, [
        f"frobenius: {frob}",
        f"open map: {open_}",
    ]


def _cmd_interpret(args):
    started = time.monotonic()
    src_text = _read(args.source)
    tgt_text = _read(args.target)
    map_text = _read(args.map)
    src = syntax.parse_theory(src_text)
    tgt = syntax.parse_theory(tgt_text)
    obj = json.loads(map_text)
    k = int(obj.pop("k", 1))

    def blocks(arity):
        return [f"x{i}" for i in range(1, arity * k + 1)]

    mapping = {}
    for sym, formula_text in obj.items():
        arity = 2 if sym == "=" else src.signature.arity(sym)
        mapping[sym] = syntax.parse_formula(formula_text, blocks(arity),
                                            tgt.signature)
    g = typespace.Interpretation(src, tgt, k, mapping)
    out = typespace.check_interpretation(g, _budgets(args))
    verdict = ("Holds" if out.ok
               else "Fails" if out.refuted else "Unknown")
    rep = _report(
        "interpret",
        {"source": src_text, "target": tgt_text, "map": map_text},
        {"depth": args.depth, "model_size": args.model_size},
        [{"verdict": verdict, "proved": out.proved, "refuted": out.refuted,
          "unknown": out.unknown, "first_failure": out.first_failure}],
        {"strong": g.strong}, started,
    )
    code = (EXIT_HOLDS if out.ok
            else EXIT_FAILS if out.refuted else EXIT_UNKNOWN)
    return code, rep, [
        f"{verdict}: proved {out.proved}, refuted {out.refuted}, "
        f"unknown {out.unknown}",
    ]


def _generators(args, t):
    if not args.generators:
        return None
    obj = json.loads(_read(args.generators))
    gens = {}
    for n_text, formulas in obj.items():
        n = int(n_text)
        names = [f"x{i}" for i in range(1, n + 1)]
        gens[n] = [syntax.parse_formula(f, names, t.signature)
                   for f in formulas]
    return gens


def _export(args, t):
    a = typespace.compute_typespace(t, N=args.cutoff, B=args.bound,
                                    d=args.formula_depth,
                                    check_stability=False)
    return internal_logic.export_presentation(
        a, gen_depth=args.gen_depth, max_size=args.max_size,
        generators=_generators(args, t),
    ), a


def _cmd_thf(args):
    started = time.monotonic()
    if args.action == "validate":
        text = _read(args.input)
        pres = internal_logic.presentation_from_json(json.loads(text))
        out = internal_logic.validate_presentation(pres)
        verdict = "Holds" if out["ok"] else "Fails"
        rep = _report(
            "thf validate", {"presentation": text}, {},
            [{"verdict": verdict, "failures": out["failures"][:10]}],
            None, started,
        )
        return (EXIT_HOLDS if out["ok"] else EXIT_FAILS), rep, [
            f"presentation valid: {out['ok']}"
        ]

    text = _read(args.input)
    t = syntax.parse_theory(text)
    bounds = {"bound": args.bound, "formula_depth": args.formula_depth,
              "cutoff": args.cutoff, "gen_depth": args.gen_depth,
              "max_size": args.max_size}
    if args.action == "build":
        pres, _ = _export(args, t)
        th = internal_logic.th_of(pres)
        obj = internal_logic.presentation_to_json(pres)
        if args.out:
            Path(args.out).write_text(json.dumps(obj, indent=2, sort_keys=True))
        sizes = {n: pres.lattices[n].n for n in range(args.cutoff + 1)}
        rep = _report(
            "thf build", {"theory": text}, bounds,
            [{"verdict": "Holds", "lattice_sizes": sizes,
              "axioms": len(th.axioms)}],
            None if args.out else {"presentation": obj}, started,
        )
        lines = [f"arity {n}: lattice of {sizes[n]} opens" for n in sizes]
        lines.append(f"theory of the presentation: {len(th.axioms)} axioms")
        if args.out:
            lines.append(f"wrote {args.out}")
        return EXIT_HOLDS, rep, lines

    # action == "roundtrip": theory -> presentation -> theory comparison
    out = internal_logic.roundtrip_theory(
        t, N=args.cutoff, B=args.bound, d=args.formula_depth,
        gen_depth=args.gen_depth, cap=args.cap, max_size=args.max_size,
        generators=_generators(args, t),
    )
    verdict = ("Fails" if not out.ok
               else "Unknown" if out.unknown else "Holds")
    rep = _report(
        "thf roundtrip", {"theory": text}, dict(bounds, cap=args.cap),
        [{"verdict": verdict, "proved": out.proved, "refuted": out.refuted,
          "unknown": out.unknown, "failures": out.failures[:10]}],
        None, started,
    )
    code = {"Holds": EXIT_HOLDS, "Fails": EXIT_FAILS,
            "Unknown": EXIT_UNKNOWN}[verdict]
    return code, rep, [
        f"{verdict}: proved {out.proved}, refuted {out.refuted}, "
        f"unknown {out.unknown}",
    ]


def _cmd_roundtrip(args):
    started = time.monotonic()
    text = _read(args.theory)
    t = syntax.parse_theory(text)
    bounds = {"bound": args.bound, "formula_depth": args.formula_depth,
              "cutoff": args.cutoff, "gen_depth": args.gen_depth,
              "max_size": args.max_size, "cap": args.cap}
    verdicts = []
    code = EXIT_HOLDS
    lines = []
    if args.mode in ("theory", "both"):
        out = internal_logic.roundtrip_theory(
            t, N=args.cutoff, B=args.bound, d=args.formula_depth,
            gen_depth=args.gen_depth, cap=args.cap, max_size=args.max_size,
            generators=_generators(args, t),
        )
        verdict = ("Fails" if not out.ok
                   else "Unknown" if out.unknown else "Holds")
        verdicts.append({"verdict": verdict, "direction": "theory",
                         "proved": out.proved, "refuted": out.refuted,
                         "unknown": out.unknown,
                         "failures": out.failures[:10]})
        lines.append(f"theory round trip {verdict}: proved {out.proved}, "
                     f"refuted {out.refuted}, unknown {out.unknown}")
        if verdict == "Fails":
            code = EXIT_FAILS
        elif verdict == "Unknown" and code == EXIT_HOLDS:
            code = EXIT_UNKNOWN
    if args.mode in ("functor", "both"):
        pres, _ = _export(args, t)
        out = internal_logic.roundtrip_functor(pres)
        verdict = "Holds" if out["ok"] else "Fails"
        verdicts.append({"verdict": verdict, "direction": "functor",
                         "points": {str(n): list(v)
                                    for n, v in out["points"].items()},
                         "failures": out["failures"][:10],
                         "unrealized": out["unrealized"][:10]})
        for n, (realized, filters) in sorted(out["points"].items()):
            lines.append(f"arity {n}: {realized} realized types, "
                         f"{filters} prime filters")
        lines.append(f"functor round trip {verdict}")
        if verdict == "Fails":
            code = EXIT_FAILS
    rep = _report("roundtrip", {"theory": text}, bounds, verdicts, None,
                  started)
    return code, rep, lines


# ---------------------------------------------------------------------------
# argument wiring


def _add_bounds(p, depth=False, model_size=False, bound=False,
                formula_depth=False, cutoff=False, export=False):
    if depth:
        p.add_argument("--depth", type=int, default=8,
                       help="proof search depth (default 8)")
    if model_size:
        p.add_argument("--model-size", type=int, default=3,
                       help="countermodel size bound (default 3)")
    if bound:
        p.add_argument("--bound", type=int, default=3,
                       help="model size bound (default 3)")
    if formula_depth:
        p.add_argument("--formula-depth", type=int, default=2,
                       help="formula depth bound (default 2)")
    if cutoff:
        p.add_argument("--cutoff", type=int, default=2,
                       help="arity cutoff (default 2)")
    if export:
        p.add_argument("--gen-depth", type=int, default=1,
                       help="generator formula depth for exports (default 1)")
        p.add_argument("--max-size", type=int, default=200,
                       help="largest exported lattice allowed (default 200)")
        p.add_argument("--generators",
                       help="JSON file of generator formulas per arity, "
                       "e.g. {\"1\": [\"R(x1)\"]}; overrides --gen-depth")


def build_parser():
    parser = _Parser(
        prog="cohlogic",
        description="Workbench for positive (coherent) logic: proofs, finite "
        "models, finite Stone duality, type-space approximations.",
    )
    parser.add_argument("--version", action="version",
                        version=json.dumps(SCHEMA_VERSIONS, sort_keys=True))
    parser.add_argument("--json", action="store_true",
                        help="emit a machine-readable run report")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap (results are independent of it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print a theory file")
    p.add_argument("theory")
    p.set_defaults(run=_cmd_parse)

    for name, fn in (("prove", _cmd_prove), ("refute", _cmd_refute)):
        p = sub.add_parser(name, help=f"{name} a sequent like '[x] P(x) |- R(x)'")
        p.add_argument("theory")
        p.add_argument("sequent")
        _add_bounds(p, depth=True, model_size=True)
        p.set_defaults(run=fn)

    p = sub.add_parser("eval", help="evaluate a formula in a finite model")
    p.add_argument("theory")
    p.add_argument("model", help="model JSON file")
    p.add_argument("formula")
    p.add_argument("--vars", default="", help="context variables, e.g. 'x,y'")
    p.add_argument("--args", default="", help="assignment, e.g. '0,1'")
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("models", help="enumerate models up to isomorphism")
    p.add_argument("theory")
    p.add_argument("--limit", type=int, default=None,
                   help="print at most this many models")
    _add_bounds(p, bound=True)
    p.set_defaults(run=_cmd_models)

    p = sub.add_parser("typespace",
                       help="type-space approximation with stability flags")
    p.add_argument("theory")
    _add_bounds(p, bound=True, formula_depth=True, cutoff=True)
    p.set_defaults(run=_cmd_typespace)

    p = sub.add_parser("duality", help="finite Stone duality round trip")
    p.add_argument("--lattice", help="distributive lattice JSON file")
    p.add_argument("--poset", help="poset JSON file")
    p.add_argument("--roundtrip", action="store_true",
                   help="accepted for compatibility; always performed")
    p.set_defaults(run=_cmd_duality)

    p = sub.add_parser("check-bc",
                       help="Beck-Chevalley for a pushout square of "
                       "type-space restriction maps")
    p.add_argument("--theory", required=True)
    p.add_argument("--pushout", required=True,
                   help="span sizes like '1<-0->1'")
    p.add_argument("--left", help="left leg as 1-based values, e.g. '1,2'")
    p.add_argument("--right", help="right leg as 1-based values")
    _add_bounds(p, bound=True, formula_depth=True, cutoff=True)
    p.set_defaults(run=_cmd_check_bc)

    p = sub.add_parser("check-frobenius",
                       help="Frobenius for the preimage hom of a monotone map")
    p.add_argument("--map", required=True,
                   help="JSON file {source, target, values}")
    p.set_defaults(run=_cmd_check_frobenius)

    p = sub.add_parser("interpret", help="check an interpretation of theories")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--map", required=True,
                   help="JSON file {k, '=': formula, R: formula, ...} with "
                   "formulas over variables x1..xn")
    _add_bounds(p, depth=True, model_size=True)
    p.set_defaults(run=_cmd_interpret)

    p = sub.add_parser("thf", help="theory-of-the-type-space-functor pipeline")
    p.add_argument("action", choices=["build", "validate", "roundtrip"])
    p.add_argument("input", help="theory file (build/roundtrip) or "
                   "presentation JSON (validate)")
    p.add_argument("--out", help="write the built presentation JSON here")
    p.add_argument("--cap", type=int, default=6,
                   help="formulas per arity in round-trip comparisons")
    _add_bounds(p, bound=True, formula_depth=True, cutoff=True, export=True)
    p.set_defaults(run=_cmd_thf)

    p = sub.add_parser("roundtrip", help="theory and functor round trips")
    p.add_argument("--theory", required=True)
    p.add_argument("--mode", choices=["theory", "functor", "both"],
                   default="both")
    p.add_argument("--cap", type=int, default=6,
                   help="formulas per arity in round-trip comparisons")
    _add_bounds(p, bound=True, formula_depth=True, cutoff=True, export=True)
    p.set_defaults(run=_cmd_roundtrip)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, rep, lines = args.run(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (syntax.SyntaxError_, json.JSONDecodeError, KeyError, ValueError,
            OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (lattice.LatticeError, semantics.SemanticsError,
            typespace.TypeSpaceError,
            internal_logic.InternalLogicError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    _emit(args, rep, lines)
    return code


if __name__ == "__main__":
    sys.exit(main())
