"""Command-line front end.

Exit codes: 0 success, 1 domain or verification failure, 2 usage or parse
error.
"""

import argparse
import sys

from ._exact import fmt
from .checks import run_invariants
from .cylinder import build_cylinder, quotient_cylinder, special_and_roots
from .errors import AxiomError, InvariantError, NonpositiveLength, NotMember, ParseError, TrimspanError
from .io import (
    cylinder_json,
    dumps,
    matrix_csv,
    parse_function,
    point_json,
    quotient_dot,
    read_json,
    read_matrix_csv,
    sequence_json,
    table_json,
)
from .metric import FiniteMetricSpace, is_trim, metric_quotient, underline_d
from .tightspan import certify, decompose, is_member, project, verify_main_theorem
from .treegen import ChainSpec, chain_metric, chain_oracle, leaf_space, parse_newick, underline_d_tree_oracle
from .trimming import trimming_sequence

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load_metric(args):
    S = read_matrix_csv(args.matrix)
    if isinstance(S, FiniteMetricSpace):
        return S
    if not args.pseudometric:
        raise UsageError("input has zero off-diagonal distances; pass --pseudometric to glue them")
    return metric_quotient(S)[0]


def _emit(args, obj, text):
    print(dumps(obj) if args.format == "json" else text)


def cmd_validate(args):
    S = read_matrix_csv(args.matrix)
    kind = "metric" if isinstance(S, FiniteMetricSpace) else "pseudometric"
    ud = underline_d(S)
    trim = is_trim(S)
    obj = {"verdict": kind, "trim": trim, "underline": table_json(ud)}
    verdict = f"{kind}, {'trim' if trim else 'not trim'}"
    text = f"{verdict}, underline_d = " + ",".join(fmt(v) for v in ud.values())
    _emit(args, obj, text)
    return OK


def cmd_sequence(args):
    seq = trimming_sequence(_load_metric(args))
    lines = [f"N = {seq.N}"]
    for k, level in enumerate(seq.levels):
        ud = ", ".join(f"{x}:{fmt(v)}" for x, v in level.underline.items())
        lines.append(f"level {k}: {len(level.space)} points; underline_d {ud}")
    lines.append("sigma " + ", ".join(f"{x}:{fmt(v)}" for x, v in seq.sigma_table.items()))
    _emit(args, sequence_json(seq), "\n".join(lines))
    return OK


def cmd_cylinder(args):
    seq = trimming_sequence(_load_metric(args))
    C = build_cylinder(seq)
    Q = quotient_cylinder(C)
    if args.dot or args.format == "dot":
        sys.stdout.write(quotient_dot(Q))
        return OK
    _, roots = special_and_roots(C)
    text = (
        f"{len(C.vertices)} vertices, {len(C.component_ids)} components, {len(roots)} roots; "
        f"quotient has {len(Q.nodes)} nodes and {len(Q.edges)} edges"
    )
    _emit(args, cylinder_json(C, Q), text)
    return OK


def _membership_json(m):
    return {
        "member": m.member,
        "witnesses": dict(m.witnesses),
        "star_violation": list(m.star_violation) if m.star_violation else None,
        "slack": [m.slack[0], fmt(m.slack[1])] if m.slack else None,
    }


def cmd_tightspan(args):
    S = _load_metric(args)
    path = args.check or args.project or args.decompose
    f = parse_function(read_json(path), S)
    if args.check:
        m = is_member(S, f)
        text = "member" if m else f"not a member: {m.star_violation or m.slack}"
        _emit(args, _membership_json(m), text)
        return OK
    if args.project:
        g = project(S, f)
        obj = {"projection": table_json(g.as_dict()), "certificate": _membership_json(is_member(S, g))}
        _emit(args, obj, "projection " + ", ".join(f"{x}:{fmt(v)}" for x, v in g.as_dict().items()))
        return OK
    certify(S, f)
    seq = trimming_sequence(S)
    cls = decompose(seq, build_cylinder(seq), f)
    obj = {"kind": cls.kind, "level": cls.level}
    text = f"{cls.kind} (filtration level {cls.level})"
    if cls.point is not None:
        obj["point"] = point_json(cls.point)
        text += f" at {cls.point}"
    if cls.component is not None:
        obj["component"] = cls.component
    if cls.witness is not None:
        obj["witness"] = table_json(cls.witness.as_dict())
    _emit(args, obj, text)
    return OK


def cmd_verify(args):
    S = _load_metric(args)
    seq = trimming_sequence(S)
    C = build_cylinder(seq)
    report = verify_main_theorem(seq, C, args.samples, args.seed)
    invariants = run_invariants(S, seed=args.seed, seq=seq, C=C)
    violations = report["violations"] + [v for group in invariants.values() for v in group]
    obj = dict(report, invariants={k: len(v) for k, v in invariants.items()}, violations=violations)
    text = (
        f"{report['samples']} samples: {report['branch']} branch, {report['root']} root, "
        f"{report['tau']} tau; {len(violations)} violations"
    )
    _emit(args, obj, text)
    return OK if not violations else FAILED


def cmd_gen(args):
    if args.newick:
        with open(args.newick) as fh:
            T = parse_newick(fh.read(), pseudometric=args.pseudometric)
        S = leaf_space(T)
        if args.oracle:
            oracle = {
                x: {"bound": fmt(b), "exact": e} for x, (b, e) in underline_d_tree_oracle(T).items()
            }
    else:
        try:
            spec = ChainSpec.from_json(read_json(args.chain))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"malformed chain specification: {exc}") from None
        S = chain_metric(spec)
        if args.oracle:
            oracle = chain_oracle(spec)
    if args.oracle:
        with open(args.oracle, "w") as fh:
            fh.write(dumps(oracle) + "\n")
    out = matrix_csv(S)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="trimspan",
        description="Trimming sequences, trimming cylinders and tight spans of finite metric spaces.",
    )
    parser.add_argument("--format", choices=("json", "text", "dot"), default="text")
    parser.add_argument(
        "--pseudometric",
        action="store_true",
        help="accept zero distances between distinct points (glued before processing)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the axioms and report underline_d")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sequence", help="trimming sequence, X_inf and sigma")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("cylinder", help="trimming cylinder and its quotient")
    p.add_argument("matrix")
    p.add_argument("--dot", action="store_true", help="emit the quotient as DOT")
    p.set_defaults(func=cmd_cylinder)

    p = sub.add_parser("tightspan", help="membership, projection and decomposition")
    p.add_argument("matrix")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--check", metavar="F_JSON")
    mode.add_argument("--project", metavar="F_JSON")
    mode.add_argument("--decompose", metavar="F_JSON")
    p.set_defaults(func=cmd_tightspan)

    p = sub.add_parser("verify", help="sample the tight span and run every invariant")
    p.add_argument("matrix")
    p.add_argument("--samples", type=_positive, default=100)
    p.add_argument("--seed", type=_nonnegative, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="leaf space of a Newick tree or metric of a chain")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--newick", metavar="FILE")
    src.add_argument("--chain", metavar="FILE")
    p.add_argument("--oracle", metavar="FILE", help="also write the oracle tables as JSON")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=cmd_gen)
    return parser


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonnegative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, NonpositiveLength, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except AxiomError as exc:
        print(f"error: {exc}; witness {', '.join(exc.points)}", file=sys.stderr)
        return FAILED
    except (NotMember, TrimspanError, InvariantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
