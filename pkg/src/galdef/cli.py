"""Command-line driver: one JSON report per run.

Every subcommand builds a report dict

    {"command", "params", "result", "checks", "paper_anchor", "version"}

and writes it with sorted keys, so a fixed ``--seed`` gives a byte-identical
file.  The human summary printed afterwards is rendered from the report.
Without ``--out`` the JSON goes to standard output and the summary to
standard error.

Exit codes: 0 success, 2 usage, 3 data or schema problem, 4 invalid
parameters.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np
from sympy import isprime

from . import __version__
from .errors import GaldefError, InsufficientCoefficients, InvalidParameters, NotComparable, SchemaError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARAMS = 0, 2, 3, 4
EXHAUSTIVE_LIMIT = 300
DEFAULT_SAMPLES = 100_000


def _check(name: str, ok: bool, detail: str = "") -> dict:
    return {"name": name, "pass": bool(ok), "detail": detail}


def _prime(value: int, what: str):
    if value is None or not isprime(value):
        raise InvalidParameters(f"{what} = {value} is not prime")


def _odd_prime(value: int, what: str = "ell"):
    _prime(value, what)
    if value == 2:
        raise InvalidParameters(f"{what} must be odd")


def _positive(value: int, what: str):
    if value is None or value < 1:
        raise InvalidParameters(f"{what} must be a positive integer, got {value}")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# subcommand bodies: each returns (result, checks, paper_anchor)


def cmd_invariants(args):
    from .engine import levelraise_h0

    _odd_prime(args.ell)
    dim, tag = levelraise_h0(args.ell, args.q, args.alpha, args.beta, full_adjoint=args.full_adjoint)
    q = args.q % args.ell
    expected = sum(1 for s in (q, q * q % args.ell, 1) if s == 1)
    checks = []
    if not args.full_adjoint:
        checks.append(_check("dim equals #{s in (q, q^2, 1) : s = 1}", dim == expected, f"{dim} vs {expected}"))
        if (q * q - 1) % args.ell:
            checks.append(_check("generic case is spanned by e3", tag == "e3", tag))
    result = {"dim": dim, "generator": tag, "trace_zero": not args.full_adjoint}
    return result, checks, "level-raising local invariants"


def _sample_args(args, order):
    if args.exhaustive or order <= EXHAUSTIVE_LIMIT:
        return None, "exhaustive"
    return args.samples, f"{args.samples} seeded samples"


def cmd_cocycle(args):
    from .brauer import check_q_condition, explicit_b_table, twisted_cocycle_failure, explicit_b_cochain
    from .cohomology import is_coboundary
    from .tame import make_group

    _odd_prime(args.ell)
    check_q_condition(args.ell, args.q)
    G = make_group(args.ell, args.q)
    sample, mode = _sample_args(args, G.order)
    fail = twisted_cocycle_failure(G, sample=sample, rng=np.random.default_rng(args.seed))
    pre = is_coboundary(explicit_b_cochain(G))
    result = {"order": G.order, "m": G.m, "q": G.q, "cocycle_mode": mode,
              "first_failure": None if fail is None else list(fail), "is_coboundary": pre is not None,
              "element_order": "index = i*ell + ip"}
    if args.tables:
        result["table"] = explicit_b_table(G)
    checks = [
        _check("twisted 2-cocycle identity", fail is None, mode),
        _check("not a coboundary", pre is None, "no 1-cochain x with d1 x = b"),
    ]
    return result, checks, "explicit Brauer-class exponent formula"


def cmd_recipe(args):
    from .brauer import compare_recipe_to_formula, run_recipe

    _odd_prime(args.ell)
    cmp = compare_recipe_to_formula(args.ell, args.q)
    result = cmp.to_dict()
    if args.tables:
        result["trace"] = run_recipe(args.ell, args.q).to_dict(tables=True)
    checks = [
        _check("uniform lambda on all pairs", cmp.all_pairs_agree and cmp.lam not in (None, 0),
               f"lambda = {cmp.lam}"),
        _check("lattice a-coordinate of B vanishes", cmp.B_a_identically_zero),
        _check("recipe - lambda*b is a coboundary", bool(cmp.difference_is_coboundary)),
    ]
    return result, checks, "Brauer-class recipe"


MODULE_NAMES = ("ad0", "ad", "eps-ad0", "eps-ad", "mu", "trivial")


def _named_module(name, ell, q, alpha, beta):
    from .modules import ResidualFrobenius, build_adjoint, mu_module, trivial_module
    from .tame import make_group

    if name == "mu":
        return mu_module(make_group(ell, q))
    if name == "trivial":
        return trivial_module(make_group(ell, q).finite, ell)
    frob = ResidualFrobenius(ell, q, alpha, beta)
    return build_adjoint(frob, trace_zero=name.endswith("ad0"), twist_by_cyclotomic=name.startswith("eps"))


def cmd_cohomology(args):
    from .cohomology import cohomology_dim
    from .modules import fixed_space

    _odd_prime(args.ell)
    if args.max_degree not in (0, 1, 2):
        raise InvalidParameters("max-degree must be 0, 1 or 2")
    alpha = args.q if args.alpha is None else args.alpha
    mod = _named_module(args.module, args.ell, args.q, alpha, args.beta)
    dims = {str(n): cohomology_dim(mod, n, method=args.method) for n in range(args.max_degree + 1)}
    h0 = fixed_space(mod).shape[0]
    result = {"module": args.module, "alpha": alpha, "beta": args.beta, "order": mod.group.order,
              "dim": mod.dim, "dims": dims}
    checks = [_check("H^0 agrees with the fixed space", dims["0"] == h0, f"{dims['0']} vs {h0}")]
    return result, checks, "tame-quotient group cohomology"


def cmd_lift(args):
    from .cohomology import Cochain, coboundary, cocycle_failure, is_coboundary, is_cocycle
    from .lifting import (DualNumberRep, SetLift, adjust_lift, is_homomorphism, lift_defects,
                          obstruction_cocycle, random_section, residual_rep, teichmuller_lift)
    from .modules import ResidualFrobenius

    _odd_prime(args.ell)
    _positive(args.sections, "sections")
    alpha = args.q if args.alpha is None else args.alpha
    rng = np.random.default_rng(args.seed)
    rho = residual_rep(ResidualFrobenius(args.ell, args.q, alpha, args.beta))
    ad = rho.adjoint
    teich = teichmuller_lift(rho)

    tangent_disagree = 0
    for _ in range(args.cochains):
        b = Cochain.random(ad, 1, rng)
        if rng.random() < 0.5:
            # bias towards cocycles so both outcomes occur
            b = coboundary(Cochain.random(ad, 0, rng))
        hom, _ = is_homomorphism(DualNumberRep(rho, b))
        tangent_disagree += hom != is_cocycle(b)

    first = None
    cocycle_ok = same_class = repaired = 0
    for _ in range(args.sections):
        lift = random_section(rho, rng)
        d = obstruction_cocycle(lift)
        cocycle_ok += cocycle_failure(d) is None
        if first is None:
            first = d
        same_class += is_coboundary(d - first) is not None
        fixed = adjust_lift(lift)
        repaired += isinstance(fixed, SetLift) and not lift_defects(fixed).any()
    n = args.sections
    result = {
        "alpha": alpha,
        "beta": args.beta,
        "modulus": args.ell**2,
        "order": rho.group.order,
        "sections": n,
        "cochains": args.cochains,
        "tangent_disagreements": tangent_disagree,
        "obstruction_cocycles": cocycle_ok,
        "same_class_as_first": same_class,
        "repaired": repaired,
    }
    checks = [
        _check("Teichmueller lift is a homomorphism", not lift_defects(teich).any()),
        _check("dual-number homomorphism iff 1-cocycle", tangent_disagree == 0, f"{args.cochains} cochains"),
        _check("obstruction cochains are cocycles", cocycle_ok == n, f"{cocycle_ok}/{n}"),
        _check("obstruction class is section-independent", same_class == n, f"{same_class}/{n}"),
        _check("adjust_lift repairs every section", repaired == n, f"{repaired}/{n}"),
    ]
    return result, checks, "tangent-space criterion and small-extension obstruction"


def cmd_criteria(args):
    from .engine import (check_standing, ell_invariant_vanishes, principal_series_nonzero,
                         supercuspidal_vanishes)

    if args.which == "principal-series":
        v = principal_series_nonzero(args.p, args.ell)
        brute = any(pow(args.p, k, args.ell) == 1 for k in (1, 2, 4)) if args.ell > 2 else None
        return ({"nonzero": v}, [_check("residue scan p^k = 1 for k in (1, 2, 4)", brute == v)],
                "principal-series local criterion")
    if args.which == "supercuspidal":
        v = supercuspidal_vanishes(args.p, args.ell)
        return ({"vanishes": v}, [_check("residue scan p != 1", v == (args.p % args.ell != 1))],
                "supercuspidal local criterion")
    if args.which == "ell":
        v = ell_invariant_vanishes(args.a_ell, args.m_deg, args.ell, args.congruence_prime)
        return {"verdict": v}, [], "local criterion at p = ell"
    _positive(args.N, "N")
    viol = check_standing(args.N, args.ell)
    return {"violations": viol, "ok": not viol}, [], "standing hypotheses"


def _parse_local(spec: str):
    from .engine import LocalKind, LocalType

    parts = spec.split(":")
    if len(parts) not in (2, 3):
        raise InvalidParameters(f"local type {spec!r} is not of the form P:KIND[:key=val,...]")
    try:
        p = int(parts[0])
        kind = LocalKind(parts[1])
    except ValueError:
        raise InvalidParameters(f"local type {spec!r}: bad prime or kind "
                                f"(kinds: {', '.join(k.value for k in LocalKind)})") from None
    params = {}
    if len(parts) == 3 and parts[2]:
        for item in parts[2].split(","):
            key, _, val = item.partition("=")
            if val.lower() in ("true", "false"):
                params[key] = val.lower() == "true"
            else:
                try:
                    params[key] = int(val)
                except ValueError:
                    raise InvalidParameters(f"local type {spec!r}: {key} must be an integer or boolean") from None
    return p, LocalType(kind, params)


def cmd_classify(args):
    from .engine import ProblemInstance, classify

    _positive(args.N, "N")
    _prime(args.ell, "ell")
    local = dict(_parse_local(s) for s in args.local)
    inst = ProblemInstance.build(args.N, args.ell, local, extra_places=tuple(args.place),
                                 assume_h2_vanishing=args.assume_vanishing)
    report = classify(inst, args.sha1)
    result = {"instance": inst.to_dict(), "report": report.to_dict()}
    checks = [_check("standing hypotheses", report.standing_ok, "; ".join(report.standing_violations))]
    return result, checks, "obstruction classification through local invariants and Sha^1"


def _data_path(path: str | None) -> Path:
    if path:
        return Path(path)
    base = os.environ.get("GALDEF_DATA_DIR")
    if not base:
        raise FileNotFoundError("no --data given and GALDEF_DATA_DIR is not set")
    return Path(base) / "newforms.json"


def cmd_congruence(args):
    from .congruence import (congruence_primes, congruent_mod, load_newforms, sturm_bound)

    path = _data_path(args.data)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        forms = load_newforms(path)
    by_label = {f.label: f for f in forms}
    if args.label not in by_label:
        raise SchemaError(f"no form labelled {args.label!r}", "forms")
    f = by_label[args.label]
    result = {"data": path.name, "label": f.label, "level": f.level,
              "sturm_bound": sturm_bound(f.level, f.weight),
              "warnings": sorted(str(w.message) for w in caught)}
    checks = []
    if args.against:
        if args.against not in by_label:
            raise SchemaError(f"no form labelled {args.against!r}", "forms")
        _prime(args.ell, "ell")
        res = congruent_mod(f, by_label[args.against], args.ell)
        result.update({"against": args.against, "ell": args.ell, "congruent": res.congruent,
                       "witness": res.witness, "bound": res.bound, "compared": list(res.compared)})
    else:
        _positive(args.ell_max, "ell-max")
        found = congruence_primes(f, forms, args.ell_max, require_standing=args.require_standing)
        result.update({
            "ell_max": args.ell_max,
            "findings": [c.to_dict() for c in found],
            "strict_primes": sorted({c.ell for c in found if c.strict}),
            "congruence_primes": sorted({c.ell for c in found}),
        })
        checks.append(_check("no finding against the form's own orbit",
                             all(by_label[c.g_label].orbit_id != f.orbit_id for c in found)))
    return result, checks, "strict congruence primes and the Sturm bound"


def cmd_ars(args):
    from .congruence import ars_congruence_primes

    both, deg = ars_congruence_primes(args.N, args.m_deg)
    return ({"N": args.N, "modular_degree": args.m_deg, "primes_of_N_times_mdeg": both, "primes_of_mdeg": deg},
            [_check("primes of m_E divide N*m_E", set(deg) <= set(both))],
            "modular degree and congruence primes")


def cmd_defring(args):
    from .defring import search_family

    _odd_prime(args.ell)
    _prime(args.p, "p")
    if args.p == args.ell:
        raise InvalidParameters("p must differ from ell")
    if args.K < 1 or args.D < 1:
        raise InvalidParameters("K and D must be at least 1")
    reports = search_family(args.p, args.ell, K=args.K, D=args.D)
    matched = [r for r in reports if r.matched]
    result = {
        "p": args.p,
        "ell": args.ell,
        "K": args.K,
        "D": args.D,
        "target": "T1*T2 - T2 - p*T3*T4 + T4",
        "candidates": len(reports),
        "matched": len(matched),
        "any_generator_matches": sum(r.any_generator_matches for r in reports),
        "zero_ideal": sum(not r.generators for r in reports),
        "comparison": f"modulo (ell^K, degree > {args.D})",
    }
    if args.all_candidates:
        result["reports"] = [r.to_dict() for r in reports]
    else:
        result["matches"] = [r.to_dict() for r in matched]
    checks = [_check("every reported match has a single generator",
                     all(len(r.generators) == 1 for r in matched))]
    return result, checks, "Steinberg one-relation deformation ring"


COMMANDS = {
    "invariants": cmd_invariants,
    "cocycle": cmd_cocycle,
    "recipe": cmd_recipe,
    "cohomology": cmd_cohomology,
    "lift": cmd_lift,
    "criteria": cmd_criteria,
    "classify": cmd_classify,
    "congruence": cmd_congruence,
    "ars": cmd_ars,
    "defring": cmd_defring,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    common.add_argument("--exhaustive", action="store_true", help="never sample; check every tuple")
    common.add_argument("--out", help="write the JSON report here instead of standard output")

    parser = argparse.ArgumentParser(prog="galdef", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"galdef {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="H^0 of eps x ad0 at a level-raising prime")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--full-adjoint", action="store_true", help="use ad instead of ad0")

    p = sub.add_parser("cocycle", parents=[common], help="check the explicit exponent cocycle")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--tables", action="store_true", help="include the full exponent table")

    p = sub.add_parser("recipe", parents=[common], help="run the recipe and compare with the formula")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--tables", action="store_true", help="include every intermediate table")

    p = sub.add_parser("cohomology", parents=[common], help="H^n of a named module")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--module", choices=MODULE_NAMES, default="eps-ad0")
    p.add_argument("--alpha", type=int, help="Frobenius eigenvalue (default q)")
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--method", choices=("auto", "bar", "resolution"), default="auto")

    p = sub.add_parser("lift", parents=[common], help="tangent and obstruction demos over Z/l^2")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--alpha", type=int, help="Frobenius eigenvalue (default q)")
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--sections", type=int, default=50)
    p.add_argument("--cochains", type=int, default=200)

    p = sub.add_parser("criteria", parents=[common], help="local invariant criteria")
    crit = p.add_subparsers(dest="which", required=True)
    for name in ("principal-series", "supercuspidal"):
        c = crit.add_parser(name, parents=[common])
        c.add_argument("--p", type=int, required=True)
        c.add_argument("--ell", type=int, required=True)
    c = crit.add_parser("ell", parents=[common])
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--a-ell", type=int, required=True)
    c.add_argument("--m-deg", type=int, required=True)
    c.add_argument("--congruence-prime", action="store_true")
    c = crit.add_parser("standing", parents=[common])
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--ell", type=int, required=True)

    p = sub.add_parser("classify", parents=[common], help="obstruction classification")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--local", action="append", default=[], metavar="P:KIND[:k=v,...]",
                   help="local type, e.g. 3:LevelRaiseQ:alpha=3,beta=1 or 11:Steinberg")
    p.add_argument("--place", action="append", type=int, default=[], help="extra prime in S")
    p.add_argument("--sha1", choices=("yes", "no", "unknown"), default="unknown")
    p.add_argument("--assume-vanishing", action="store_true",
                   help="assert that H^2 over S vanishes, so only the level-raising prime contributes")

    p = sub.add_parser("congruence", parents=[common], help="Sturm-bound congruence scan")
    p.add_argument("--data", help="newform JSON file (default $GALDEF_DATA_DIR/newforms.json)")
    p.add_argument("--label", required=True)
    p.add_argument("--ell-max", type=int, default=50)
    p.add_argument("--against", help="compare with a single form instead of scanning")
    p.add_argument("--ell", type=int, help="prime for --against")
    p.add_argument("--require-standing", action="store_true")

    p = sub.add_parser("ars", parents=[common], help="prime divisors of N*m_E and m_E")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m-deg", type=int, required=True)

    p = sub.add_parser("defring", parents=[common], help="search the Steinberg candidate family")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--D", type=int, default=2)
    p.add_argument("--all-candidates", action="store_true", help="include every per-candidate report")
    return parser


def make_report(args) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}
    result, checks, anchor = COMMANDS[args.command](args)
    return _jsonable({
        "command": args.command if args.command != "criteria" else f"criteria {args.which}",
        "params": params,
        "result": result,
        "checks": checks,
        "paper_anchor": anchor,
        "version": __version__,
    })


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def summarize(report: dict) -> str:
    lines = [f"galdef {report['command']} ({report['paper_anchor']})"]
    def emit(prefix, items, depth):
        for key, val in sorted(items):
            if isinstance(val, dict) and depth == 0 and len(json.dumps(val)) > 80:
                emit(f"{prefix}{key}.", val.items(), 1)
            elif not (isinstance(val, (dict, list)) and len(json.dumps(val)) > 80):
                lines.append(f"  {prefix}{key}: {json.dumps(val)}")

    emit("", report["result"].items(), 0)
    for c in report["checks"]:
        tag = "PASS" if c["pass"] else "FAIL"
        lines.append(f"  [{tag}] {c['name']}" + (f": {c['detail']}" if c["detail"] else ""))
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        report = make_report(args)
    except (SchemaError, InsufficientCoefficients, NotComparable, FileNotFoundError, OSError) as exc:
        print(f"galdef: data error: {exc}", file=stderr)
        return EXIT_DATA
    except GaldefError as exc:
        print(f"galdef: invalid parameters: {exc}", file=stderr)
        return EXIT_PARAMS
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        stdout.write(summarize(report))
    else:
        stdout.write(text)
        stderr.write(summarize(report))
    return EXIT_OK


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
