"""Command-line front end: one JSON (or CSV) record per line on stdout."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import selftest
from .errors import (DegenerateInput, LiphaseError, NearSingular, NotContained, NotIsotropic, NotSymmetric,
                     NotSymplectic, NotTransversal, OutOfU0, RankDeficient, Unsupported, UnsupportedLift, UsageError)
from .exact import format_matrix, parse_matrix
from .lagrangian import (act_lattice, deck_offset, lift_graph, lift_skyscraper, parse_lagrangian, reference_lift,
                         skyscraper_lattice, symplectic_complete)
from .metaplectic import N_of, canonical_lift, lambda_exact, lambda_general, q_of
from .numclass import PhasePoint, charge, chi_pair, class_of, ell, mirror_integral
from .phases import phase, phase_compat, surface_bridgeland_phase
from .siegel import SpElement, delta_eval, parse_siegel, sp_act

# bad input rather than a failed check
INPUT_ERRORS = (UsageError, NotSymmetric, NotSymplectic, NotIsotropic, RankDeficient, DegenerateInput, NotContained,
                NotTransversal, OutOfU0, Unsupported, UnsupportedLift, NearSingular)


class CheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(message)


def _group(text: str) -> SpElement:
    M = parse_matrix(text)
    if M.nrows != M.ncols or M.nrows % 2:
        raise UsageError("a group element is a 2n x 2n matrix")
    return SpElement.from_matrix(M)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad complex number {text!r}") from None


def _omega(args, n: int | None = None):
    if not args.omega:
        raise UsageError("--omega is required")
    w = parse_siegel(args.omega)
    if n is not None and w.n != n:
        raise UsageError(f"omega has size {w.n}, expected {n}")
    return w


def _lift(args):
    given = [x is not None for x in (args.graph, args.lagrangian)] + [args.skyscraper]
    if sum(given) != 1:
        raise UsageError("give exactly one of --graph, --lagrangian, --skyscraper")
    if args.graph is not None:
        Lt = lift_graph(parse_matrix(args.graph))
    elif args.lagrangian is not None:
        Lt = reference_lift(parse_lagrangian(args.lagrangian))
    else:
        if args.n is None:
            raise UsageError("--skyscraper needs --n")
        Lt = lift_skyscraper(args.n)
    if args.n is not None and Lt.n != args.n:
        raise UsageError(f"object has dimension {Lt.n}, --n says {args.n}")
    return Lt.shifted(args.deck)


def _sigma(args, n: int) -> PhasePoint:
    return PhasePoint(_omega(args, n), _complex(args.z))


def _cmatrix(a):
    return [[float(x) for x in row] for row in a]


# ---------------------------------------------------------------- commands

def cmd_index(args):
    from .polypath import line_index
    x = parse_matrix(args.x)
    H = parse_matrix(args.h) if args.h else None
    yield {"index": line_index(x, H)}


def cmd_sp_act(args):
    w = sp_act(_group(args.g), _omega(args))
    yield {"re": _cmatrix(w.omega.real), "im": _cmatrix(w.omega.imag)}


def cmd_delta(args):
    v = delta_eval(_group(args.g), _omega(args))
    yield {"re": v.real, "im": v.imag}


def cmd_lambda(args):
    g1, g2 = _group(args.g1), _group(args.g2)
    rec = {"lambda": lambda_general(g1, g2)}
    if all(g.in_u0 for g in (g1, g2, g1 @ g2)):
        rec["lambda_exact"] = lambda_exact(g1, g2)
        if rec["lambda_exact"] != rec["lambda"]:
            yield rec
            raise CheckFailed("continued and exact cocycle values differ")
    yield rec


def cmd_q(args):
    yield {"q": q_of(_group(args.g))}


def cmd_N(args):
    yield {"N": N_of(_group(args.g1), _group(args.g2))}


def cmd_lift_graph(args):
    Lt = lift_graph(parse_matrix(args.phi)).shifted(args.deck)
    yield {"lattice": format_matrix(Lt.L.matrix), "base_arg": Lt.base_arg, "deck": deck_offset(Lt)}


def cmd_meta_mul(args):
    m1 = canonical_lift(_group(args.g1)).shifted(args.k1)
    m2 = canonical_lift(_group(args.g2)).shifted(args.k2)
    m = m1 @ m2
    rec = {"g": format_matrix(m.g.matrix), "base_arg": m.base_arg}
    try:
        ref = canonical_lift(m.g)
        rec["central"] = round((ref.base_arg - m.base_arg) / (2 * math.pi))
    except Unsupported:
        pass
    yield rec


def cmd_phase(args):
    Lt = _lift(args)
    yield {"phase": phase(_sigma(args, Lt.n), Lt)}


def cmd_charge(args):
    Lt = _lift(args)
    Z = charge(_sigma(args, Lt.n), Lt)
    yield {"charge_re": Z.real, "charge_im": Z.imag}


def cmd_mirror_check(args):
    Lt = _lift(args)
    w = _omega(args, Lt.n)
    mi = mirror_integral(Lt, w)
    ch = complex(chi_pair(ell(w), class_of(Lt)))
    res = abs(mi - ch) / max(abs(ch), 1e-300)
    tol = args.tol if args.tol is not None else 1e-9
    yield {"mirror_re": mi.real, "mirror_im": mi.imag, "chi_re": ch.real, "chi_im": ch.imag,
           "rel_residual": res, "compat_residual": phase_compat(PhasePoint(w), Lt), "ok": res <= tol}
    if res > tol:
        raise CheckFailed(f"mirror residual {res} exceeds {tol}")


def cmd_surface_check(args):
    Lt = _lift(args)
    if Lt.n != 2:
        raise UsageError("surface-check needs n = 2")
    w = _omega(args, 2)
    br = surface_bridgeland_phase(w, Lt)
    ph = phase(PhasePoint(w), Lt) + 1
    tol = args.tol if args.tol is not None else 1e-6
    yield {"bridgeland_phase": br, "phase_plus_one": ph, "residual": abs(br - ph), "ok": abs(br - ph) <= tol}
    if abs(br - ph) > tol:
        raise CheckFailed("surface phases disagree")


def cmd_complete_basis(args):
    L = parse_lagrangian(args.lagrangian)
    g = symplectic_complete(L)
    yield {"g": format_matrix(g.matrix), "verified": act_lattice(g, L) == skyscraper_lattice(L.n)}


def cmd_selftest(args):
    names = list(selftest.SUITES) if args.suite == "all" else [args.suite]
    if args.tol is not None:
        selftest.TOL = args.tol
    total = checks = 0
    for name in names:
        res = selftest.run_suite(name, args.seed, args.samples)
        for msg in res.failures:
            print(msg, file=sys.stderr)
        total += len(res.failures)
        checks += res.checks
        rec = res.to_json()
        del rec["seconds"]  # keep stdout byte-identical across runs
        rec.pop("messages")
        yield rec
    if len(names) > 1:
        yield {"suite": "all", "seed": args.seed, "checks": checks, "failures": total}
    if total:
        raise CheckFailed(f"{total} selftest failures")


COMMANDS = {
    "index": cmd_index, "sp-act": cmd_sp_act, "delta": cmd_delta, "lambda": cmd_lambda, "q": cmd_q, "N": cmd_N,
    "lift-graph": cmd_lift_graph, "meta-mul": cmd_meta_mul, "phase": cmd_phase, "charge": cmd_charge,
    "mirror-check": cmd_mirror_check, "surface-check": cmd_surface_check, "complete-basis": cmd_complete_basis,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="dimension")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--samples", type=int, help="sample count for selftest suites")
    common.add_argument("--tol", type=float, help="override the default check tolerance")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    lift = argparse.ArgumentParser(add_help=False)
    lift.add_argument("--graph", help="symmetric matrix phi: the bundle with slope phi")
    lift.add_argument("--lagrangian", help='"x=<matrix>;y=<matrix>"')
    lift.add_argument("--skyscraper", action="store_true", help="the point object (needs --n)")
    lift.add_argument("--deck", type=int, default=0, help="deck shift k, i.e. F[k]")
    lift.add_argument("--omega", help='"re=<matrix>;im=<matrix>"')
    lift.add_argument("--z", default="0", help="complex number, e.g. 0.5+0.1i")

    p = _Parser(prog="liphase", description="Lifted Lagrangians, metaplectic branches and phases.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("index", parents=[common], help="index of a nondegenerate symmetric matrix")
    s.add_argument("--x", required=True)
    s.add_argument("--h", help="positive definite direction (default I)")
    s = sub.add_parser("sp-act", parents=[common], help="g(w)")
    s.add_argument("--g", required=True)
    s.add_argument("--omega", required=True)
    s = sub.add_parser("delta", parents=[common], help="Delta(g)(w) = det(a + b w)^2")
    s.add_argument("--g", required=True)
    s.add_argument("--omega", required=True)
    for name, helptext in (("lambda", "cocycle of canonical lifts"), ("N", "degree ratio N(g1, g2)")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--g1", required=True)
        s.add_argument("--g2", required=True)
    s = sub.add_parser("q", parents=[common], help="q(g)")
    s.add_argument("--g", required=True)
    s = sub.add_parser("lift-graph", parents=[common], help="lift of the graph of phi")
    s.add_argument("--phi", required=True)
    s.add_argument("--deck", type=int, default=0)
    s = sub.add_parser("meta-mul", parents=[common], help="product of canonical lifts")
    s.add_argument("--g1", required=True)
    s.add_argument("--g2", required=True)
    s.add_argument("--k1", type=int, default=0, help="central shift of the first lift")
    s.add_argument("--k2", type=int, default=0)
    for name, helptext in (("phase", "phase of a lifted Lagrangian"), ("charge", "central charge"),
                           ("mirror-check", "torus integral against the pairing"),
                           ("surface-check", "tilted-heart phase against phase + 1 (n = 2)")):
        sub.add_parser(name, parents=[common, lift], help=helptext)
    s = sub.add_parser("complete-basis", parents=[common], help="integral g with g L = L_0")
    s.add_argument("--lagrangian", required=True)
    s = sub.add_parser("selftest", parents=[common], help="seeded acceptance suites")
    s.add_argument("--suite", default="all", choices=["all", *selftest.SUITES])
    return p


def _emit(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for r in records:
            out.write(json.dumps(r, sort_keys=False) + "\n")
        return
    keys: list[str] = []
    for r in records:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    out.write(buf.getvalue())


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let option values such as "-1,0;0,1" through argparse by writing them as --flag=value."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok.startswith("--") and "=" not in tok:
            nxt = next(it, None)
            if nxt is not None and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] in "./"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else list(argv))
    records: list[dict] = []
    fmt = "json"
    try:
        args = parser.parse_args(argv)
        fmt = args.format
        try:
            for rec in COMMANDS[args.command](args):
                records.append(rec)
        finally:
            _emit(records, fmt, sys.stdout)
    except INPUT_ERRORS as e:
        print(f"usage error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (CheckFailed, LiphaseError, AssertionError) as e:
        print(f"check failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
