"""Command line entry point: classify, np-solve, sweep, landscape, verify."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .connections import ansatz, classify_abelian, classify_so3, sweep
from .g2_family import G2Params
from .np_solver import NoConvergence, solutions_csv, solve_np
from .topology import char_classes, weight_bundles

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, bool) or isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0.0:
        return "0"
    return f"{x:.9g}"


def _rounded(obj):
    """Round floats to 9 significant digits for byte-stable JSON."""
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    x = float(obj)
    if not math.isfinite(x):
        return None
    return float(f"{x:.9g}")


def _dump_json(obj) -> str:
    return json.dumps(_rounded(obj), indent=2, sort_keys=True)


def _params_from(args) -> G2Params:
    if args.np_branch:
        sols = {s.branch: s.params for s in solve_np(args.k, args.l)}
        if args.np_branch not in sols:
            raise UsageError(f"no {args.np_branch} nearly parallel structure on X_{{{args.k},{args.l}}}")
        return sols[args.np_branch]
    missing = [name for name in "ABCD" if getattr(args, name) is None]
    if missing:
        raise UsageError(f"missing {', '.join('--' + m for m in missing)} (or use --np-branch)")
    return G2Params(args.k, args.l, args.A, args.B, args.C, args.D)


def _add_structure_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    for name in "ABCD":
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--np-branch", choices=("plus", "minus"),
                   help="use the nearly parallel structure of this branch instead of --A..--D")


def cmd_classify(args) -> int:
    p = _params_from(args)
    if args.n is not None:
        ns = [args.n]
    else:
        ns = sorted(set(weight_bundles(p.k, p.l)) | {0})
    reports = []
    for n in ns:
        ansatz(p.k, p.l, n)
        rep = classify_so3(p, n) if args.gauge == "so3" else classify_abelian(p, n)
        reports.append(rep)
    if args.json:
        print(_dump_json([r.to_dict() for r in reports]))
        return EXIT_OK
    first = reports[0]
    print(f"X_{{{p.k},{p.l}}}  A={fmt(p.A)} B={fmt(p.B)} C={fmt(p.C)} D={fmt(p.D)}")
    print(f"Gamma={fmt(first.gamma)} Delta={fmt(first.delta)}")
    print(f"sigma1={fmt(first.sigma1)} sigma2={fmt(first.sigma2)} sigma3={fmt(first.sigma3)}")
    for rep in reports:
        print(f"\nn={rep.n} gauge={rep.gauge} case={rep.case_id} "
              f"irreducible={len(rep.irreducible)} reducible={len(rep.reducible)}")
        for note in rep.notes:
            print(f"  note: {note}")
        for sol in rep.solutions:
            c = sol.connection
            kind = "reducible" if sol.reducible else "irreducible"
            extra = f" family_dim={sol.family_dim}" if sol.family_dim else ""
            fields = " ".join(f"{name}={fmt(getattr(c, name))}" for name in ("b", "a1", "a2", "a3")
                              if getattr(c, name) != 0.0 or name == "b")
            print(f"  {kind:11s} {fields} residual={fmt(sol.residual)}{extra}"
                  + (f"  ({sol.note})" if sol.note else ""))
    return EXIT_OK


def cmd_np_solve(args) -> int:
    try:
        sols = solve_np(args.k, args.l, args.lam, per_axis=args.starts)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        for s in exc.partial:
            print(f"  partial: {s.branch} A={fmt(s.params.A)} B={fmt(s.params.B)} "
                  f"C={fmt(s.params.C)} D={fmt(s.params.D)}", file=sys.stderr)
        return EXIT_SOLVER
    from .connections import sigmas
    out = []
    for s in sols:
        p = s.params
        sig = sigmas(p)
        weights = weight_bundles(p.k, p.l)
        bundles = []
        for i in range(3):
            if sig[i] > 0:
                cc = char_classes(p.k, p.l, weights[i])
                bundles.append({"n": weights[i], **cc.to_dict()})
        out.append({**s.row(), "sigma1": sig[0], "sigma2": sig[1], "sigma3": sig[2],
                    "instanton_bundles": bundles})
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(solutions_csv(sols))
    if args.json:
        print(_dump_json(out))
        return EXIT_OK
    for row in out:
        print(f"{row['branch']:5s} A={fmt(row['A'])} B={fmt(row['B'])} C={fmt(row['C'])} "
              f"D={fmt(row['D'])} residual={fmt(row['residual'])}")
        print(f"      sigma1={fmt(row['sigma1'])} sigma2={fmt(row['sigma2'])} sigma3={fmt(row['sigma3'])}")
        for b in row["instanton_bundles"]:
            print(f"      irreducible instantons on P_{b['n']}: w2={b['w2']} "
                  f"p1={b['p1']} (mod {b['modulus']})")
    return EXIT_OK


SWEEP_COLUMNS = ["param_value", "sigma1", "sigma2", "sigma3", "a_plus", "a_minus", "b_reducible", "def_det"]


def _parse_fix(text: str, vary: str) -> dict:
    fixed = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in item:
            raise UsageError(f"--fix entry '{item}' is not NAME=VALUE")
        name, value = item.split("=", 1)
        name = name.strip()
        if name not in "ABCD" or len(name) != 1:
            raise UsageError(f"--fix names must be among A, B, C, D (got '{name}')")
        if name in fixed:
            raise UsageError(f"{name} fixed twice")
        fixed[name] = float(value)
    needed = set("ABCD") - {vary}
    if set(fixed) != needed:
        raise UsageError(f"--fix must set exactly {', '.join(sorted(needed))} when varying {vary}")
    return fixed


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([fmt(r[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    fixed = _parse_fix(args.fix, args.vary)
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    values = np.linspace(args.start, args.stop, args.steps) if args.steps > 1 else np.array([args.start])
    rows = sweep(args.k, args.l, args.n, fixed, args.vary, values)
    text = sweep_csv(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.figure:
        from .plotting import plot_sweep
        plot_sweep(rows, args.figure, args.vary, f"P_{args.n} over X_{{{args.k},{args.l}}}")
    return EXIT_OK


def cmd_landscape(args) -> int:
    from .yang_mills import landscape_grid
    p = _params_from(args)
    ans = ansatz(p.k, p.l, args.n)
    if args.a_name not in ans.free:
        raise UsageError(f"{args.a_name} is not a free coefficient on P_{args.n} "
                         f"(free: {', '.join(ans.free)})")
    land = landscape_grid(p, args.n, args.a_name, tuple(args.a_range), tuple(args.b_range), args.resolution)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(land.to_csv())
    if args.figure:
        from .plotting import plot_landscape
        plot_landscape(land, args.figure, f"P_{args.n} over X_{{{p.k},{p.l}}}")
    crit = land.critical_json()
    if args.json:
        print(_dump_json(crit))
    else:
        print(f"{'a':>14s} {'b':>14s} {'energy':>14s} index instanton")
        for c in crit:
            print(f"{fmt(c['a']):>14s} {fmt(c['b']):>14s} {fmt(c['energy']):>14s} "
                  f"{c['index']:5d} {'yes' if c['is_instanton'] else 'no'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite
    records = run_suite(args.filter or "")
    failed = [r for r in records if r.status == "fail"]
    if args.json:
        print(_dump_json([r.to_dict() for r in records]))
    else:
        for r in records:
            print(f"{r.status.upper():8s} {r.claim_id:48s} expected={fmt(r.expected)} "
                  f"computed={fmt(r.computed)} tol={fmt(r.tolerance)}")
        flagged = [r for r in records if r.status == "flagged"]
        if flagged:
            print("\nflagged (printed value inconsistent with the computation):")
            for r in flagged:
                print(f"  {r.claim_id}: {r.note}")
        n_pass = sum(r.status == "pass" for r in records)
        print(f"\n{n_pass} pass, {len(flagged)} flagged, {len(failed)} fail")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aloff-wallach",
                                     description="Invariant G2-instantons on Aloff-Wallach spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify invariant instantons for one structure")
    _add_structure_args(p)
    p.add_argument("--n", type=int, help="bundle degree (default: 0 and the three isotropy weights)")
    p.add_argument("--gauge", choices=("u1", "so3"), default="so3")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("np-solve", help="nearly parallel structures in the family")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--starts", type=int, default=8, help="grid points per axis for Newton starts")
    p.add_argument("--csv", help="write the solutions to this CSV file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_np_solve)

    p = sub.add_parser("sweep", help="instanton data along one structure parameter")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--vary", choices=tuple("ABCD"), required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--fix", required=True, help="e.g. B=1,C=1,D=1")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--figure", help="also render the branches to this image file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("landscape", help="Yang-Mills energy on a two-coefficient plane")
    _add_structure_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a-name", default="a1", choices=("a1", "a2", "a3"))
    p.add_argument("--a-range", type=float, nargs=2, default=(-1.5, 1.5))
    p.add_argument("--b-range", type=float, nargs=2, default=(-1.5, 1.5))
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--out", help="grid CSV path")
    p.add_argument("--figure", help="render level sets to this image file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("verify", help="recompute every published value")
    p.add_argument("--filter", help="only claims whose id starts with this prefix")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
