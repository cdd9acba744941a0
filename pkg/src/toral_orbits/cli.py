"""Command line front end: ``toral-orbits <subcommand> ...``.

Exit status: 0 on success, 1 on a domain error (including exceeded caps),
2 on a usage error. Matrices are written row by row, e.g. ``-M "2,1;1,1"``;
use ``-M=-1,0;0,-1`` when the first entry is negative.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catmap as catmap_mod
from .census import DEFAULT_MAX_POINTS, enumerate_functional_graph, orbit_counts
from .errors import CapExceededError, MatrixParseError, ToralError
from .numtheory import crt_split, is_prime, parse_prime_power
from .order import is_finite_order, order_lift_profile, order_summary
from .pretail import (
    functional_graph_dot,
    kernel_chain,
    periodic_decomposition,
    pretail_tree,
    tree_dot,
    uniform_depth_check,
)
from .ring import ResidueMatrix, format_matrix, int_det, parse_matrix
from .symmetry import (
    DEFAULT_MAX_GROUP,
    build_reversor,
    classify_gl2_fp,
    conjugate_mod_n,
    mgcd,
    reversible_mod_n,
    symmetry_group,
)


class UsageError(Exception):
    pass


def _matrix(text: str):
    try:
        return parse_matrix(text)
    except MatrixParseError as exc:
        raise UsageError(f"bad matrix {text!r}: {exc}") from None


def _modulus(args) -> int:
    if getattr(args, "pp", None):
        try:
            p, r = parse_prime_power(args.pp)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return p**r
    if args.n is None:
        raise UsageError("give a modulus with -n N or -pp p^r")
    if args.n < 1:
        raise UsageError("the modulus must be at least 1")
    return args.n


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(lines))


def _residue(entries, n) -> ResidueMatrix:
    return ResidueMatrix.of(entries, n)


# --------------------------------------------------------------------------
# subcommands


def cmd_order(args) -> int:
    entries = _matrix(args.M)
    n = _modulus(args)
    M = _residue(entries, n)
    summary = order_summary(M)
    profiles = []
    if M.is_unit() and not is_finite_order(entries):
        for p, r in crt_split(n):
            prof = order_lift_profile(entries, p, max(r, args.r_max))
            profiles.append(
                {"p": p, "s": prof.s, "t": prof.t, "shape": prof.shape, "orders": list(prof.orders)}
            )
    payload = {"matrix": format_matrix(entries), "modulus": n, **summary, "profiles": profiles}
    lines = [f"ord(M, {n}) = {summary['order']}"]
    if summary["order"] == 0:
        lines[0] += "  (M is not invertible mod n)"
    for pp in summary["prime_powers"]:
        lines.append(f"  mod {pp['p']}^{pp['r']}: {pp['order']}")
    if "order_via_mgcd" in summary:
        lines.append(f"via mgcd = {mgcd(entries)}: {summary['order_via_mgcd']}")
    for prof in profiles:
        orders = ",".join(str(o) for o in prof["orders"])
        extra = f" t={prof['t']}" if prof["t"] is not None else ""
        lines.append(f"p={prof['p']}: s={prof['s']}{extra} {prof['shape']} orders {orders}")
    _emit(args, payload, lines)
    return 0


def census_payload(entries, n: int, census) -> dict:
    return {
        "matrix": format_matrix(entries),
        "modulus": n,
        "cycles": [{"length": m, "count": c} for m, c in census.cycles],
        "pretail_points": census.eventually_periodic_count,
        "zeta": str(census.zeta()),
    }


def cmd_census(args) -> int:
    entries = _matrix(args.M)
    n = _modulus(args)
    M = _residue(entries, n)
    if args.enumerate:
        census = enumerate_functional_graph(M, args.max_points).census
    else:
        census = orbit_counts(M)
    payload = census_payload(entries, n, census)
    _emit(args, payload, [payload["zeta"], f"pretail points: {payload['pretail_points']}"])
    return 0


def cmd_pretail(args) -> int:
    entries = _matrix(args.M)
    n = _modulus(args)
    M = _residue(entries, n)
    chain = kernel_chain(M)
    tree = pretail_tree(M, args.max_points)
    report = uniform_depth_check(tree, chain)
    decomp = periodic_decomposition(M)
    payload = {
        "matrix": format_matrix(entries),
        "modulus": n,
        "kernel_sizes": list(chain.sizes),
        "height": tree.height,
        "v": list(tree.v),
        "w": list(tree.w),
        "uniform_depth": report.holds,
        "periodic_points": decomp.mper_size,
        "m": decomp.m,
        "k": decomp.k,
    }
    lines = [
        f"kernel sizes: {' '.join(map(str, chain.sizes))}",
        f"tree height {tree.height}, v = {' '.join(map(str, tree.v))}, w = {' '.join(map(str, tree.w))}",
        f"all maximal pretails of equal length: {'yes' if report.holds else 'no'}",
        f"periodic points: {decomp.mper_size}, (m, k) = ({decomp.m}, {decomp.k})",
    ]
    if args.dot:
        text = tree_dot(tree) if args.tree else functional_graph_dot(M, args.max_points)
        Path(args.dot).write_text(text)
        lines.append(f"wrote {args.dot}")
        payload["dot"] = args.dot
    _emit(args, payload, lines)
    return 0


def cmd_classify(args) -> int:
    entries = _matrix(args.M)
    p = args.p
    if not is_prime(p):
        raise UsageError(f"-p needs a prime, got {p}")
    cls = classify_gl2_fp(entries, p)
    payload = {
        "matrix": format_matrix(entries),
        "p": p,
        "class": cls.class_tag,
        "parameters": cls.parameters,
        "normal_form": format_matrix(cls.normal_form),
        "basis_change": format_matrix(cls.basis_change),
        "symmetry_group": cls.sym_structure,
        "symmetry_order": cls.sym_order,
        "reversible": cls.reversible,
        "reversor": format_matrix(cls.reversor) if cls.reversor else None,
        "orbits": [{"length": m, "count": c} for m, c in cls.orbit_data],
    }
    params = ", ".join(f"{k}={v}" for k, v in cls.parameters.items())
    lines = [
        f"class {cls.class_tag} ({params}), normal form {payload['normal_form']}",
        f"S(M) ~ {cls.sym_structure}, order {cls.sym_order}",
        f"reversible: {'yes' if cls.reversible else 'no'}" + (f", reversor {payload['reversor']}" if cls.reversor else ""),
        "orbits: " + ", ".join(f"{c} x length {m}" for m, c in cls.orbit_data),
    ]
    _emit(args, payload, lines)
    return 0


def cmd_reversor(args) -> int:
    entries = _matrix(args.M)
    n = _modulus(args)
    report = reversible_mod_n(entries, n, max_group=args.max_group, exhaustive=args.exhaustive)
    verdict = {True: "reversible", False: "not reversible", None: "undecided (cap)"}[report.verdict]
    payload = {
        "matrix": format_matrix(entries),
        "modulus": n,
        "verdict": report.verdict,
        "prime_powers": [
            {"q": pp.q, "verdict": pp.verdict, "reason": pp.reason} for pp in report.per_prime_power
        ],
        "reversor": format_matrix(report.reversor) if report.reversor else None,
    }
    lines = [f"mod {n}: {verdict}"]
    for pp in report.per_prime_power:
        lines.append(f"  mod {pp.q}: {pp.verdict} ({pp.reason})")
    if report.reversor is not None:
        lines.append(f"reversor: {payload['reversor']}")
    if n > 1 and (int_det(entries) - 1) % n == 0 and mgcd(entries) != 0:
        R = build_reversor(entries, n)
        payload["involutory_reversor"] = format_matrix(R)
        lines.append(f"involutory reversor: {payload['involutory_reversor']}")
    _emit(args, payload, lines)
    return 0


def cmd_symmetries(args) -> int:
    entries = _matrix(args.M)
    n = _modulus(args)
    rep = symmetry_group(_residue(entries, n), max_group=args.max_group)
    payload = {
        "matrix": format_matrix(entries),
        "modulus": n,
        "order": rep.order,
        "method": rep.method,
        "abelian": rep.abelian,
        "invariant_factors": list(rep.invariant_factors) if rep.invariant_factors is not None else None,
        "det_one_invariant_factors": (
            list(rep.det_one_invariant_factors) if rep.det_one_invariant_factors is not None else None
        ),
        "determinant_spectrum": list(rep.determinant_spectrum),
        "generators": [format_matrix(g) for g in rep.generators],
    }
    lines = [f"|S(M)| = {rep.order} ({rep.method})"]
    if rep.invariant_factors is not None:
        lines.append("abelian, invariant factors " + " ".join(map(str, rep.invariant_factors)))
        lines.append("det-1 subgroup invariant factors " + " ".join(map(str, rep.det_one_invariant_factors)))
    lines.append("determinants " + " ".join(map(str, rep.determinant_spectrum)))
    if rep.generators:
        lines.append("generators " + "  ".join(payload["generators"]))
    _emit(args, payload, lines)
    return 0


def cmd_conjugate(args) -> int:
    A, B = _matrix(args.M), _matrix(args.N)
    n = _modulus(args)
    res = conjugate_mod_n(A, B, n, witness=args.witness, max_group=args.max_group)
    payload = {
        "matrix": format_matrix(A),
        "other": format_matrix(B),
        "modulus": n,
        "conjugate": res.verdict,
        "method": res.method,
        "witness": format_matrix(res.witness) if res.witness else None,
    }
    lines = [f"{'conjugate' if res.verdict else 'not conjugate'} mod {n} ({res.method})"]
    if res.witness is not None:
        lines.append(f"P = {payload['witness']} with P N P^-1 = M")
    _emit(args, payload, lines)
    return 0


def cmd_catmap(args) -> int:
    payload: dict = {"map": args.map}
    lines: list[str] = []
    if args.pp:
        try:
            p, r = parse_prime_power(args.pp)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        form = catmap_mod.catmap_closed_form(args.map, p, r)
        payload.update({"p": p, "r": r, "zeta": str(form), "factors": [list(f) for f in form.factors]})
        payload["period"] = catmap_mod.period(args.map, p**r)
        lines.append(str(form))
        if args.verbose:
            lines.append(f"factors: {form.unmerged_text()}")
            lines.append(f"period mod {p}^{r}: {payload['period']}")
    if args.table:
        rows = []
        header = "p per_A per_F (5/p) m_p n_p"
        for p in range(2, args.table + 1):
            if not is_prime(p):
                continue
            c = catmap_mod.catmap_constants(p)
            rows.append(
                {"p": p, "per_A": c.per_A, "per_F": c.per_F, "chi": c.chi, "m_p": c.m_p, "n_p": c.n_p}
            )
        payload["table"] = rows
        lines.append(header)
        for row in rows:
            cells = [row["p"], row["per_A"], row["per_F"], row["chi"], row["m_p"], row["n_p"]]
            lines.append(" ".join("-" if x is None else str(x) for x in cells))
    if not args.pp and not args.table:
        raise UsageError("catmap needs -pp p^r and/or --table P")
    _emit(args, payload, lines)
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok = run_selftest(stream=sys.stdout, max_points=args.max_points)
    return 0 if ok else 1


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toral-orbits", description="Orbits of integer matrices on (Z/nZ)^d.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, modulus=True, matrix=True):
        if matrix:
            p.add_argument("-M", required=True, help='matrix, rows split by ";" e.g. "2,1;1,1"')
        if modulus:
            p.add_argument("-n", type=int, help="modulus n >= 1")
            p.add_argument("-pp", help="prime power p^r instead of -n")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--max-points", type=int, default=DEFAULT_MAX_POINTS, help="enumeration cap")
        p.add_argument("--max-group", type=int, default=DEFAULT_MAX_GROUP, help="group scan cap")

    p = sub.add_parser("order", help="matrix order, per prime power, lifting profile")
    common(p)
    p.add_argument("--r-max", type=int, default=1, help="lift the profile up to this exponent")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("census", help="orbit counts and the cycle polynomial")
    common(p)
    p.add_argument("--enumerate", action="store_true", help="walk every lattice point instead")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("pretail", help="kernel chain and pretail tree, DOT export")
    common(p)
    p.add_argument("--dot", help="write the functional graph (or --tree) as DOT")
    p.add_argument("--tree", action="store_true", help="export only the tree at 0")
    p.set_defaults(func=cmd_pretail)

    p = sub.add_parser("classify", help="GL(2,F_p) conjugacy class")
    common(p, modulus=False)
    p.add_argument("-p", type=int, required=True, help="prime")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reversor", help="reversibility mod n")
    common(p)
    p.add_argument("--exhaustive", action="store_true", help="confirm by scanning all n^4 matrices")
    p.set_defaults(func=cmd_reversor)

    p = sub.add_parser("symmetries", help="symmetry group S(M) mod n")
    common(p)
    p.set_defaults(func=cmd_symmetries)

    p = sub.add_parser("conjugate", help="conjugacy of two 2x2 matrices mod n")
    common(p)
    p.add_argument("-N", required=True, help="second matrix")
    p.add_argument("--witness", action="store_true", help="also find a conjugating matrix")
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("catmap", help="Arnold / Fibonacci cat map formulas")
    p.add_argument("map", choices=sorted(catmap_mod.MAPS))
    p.add_argument("-pp", help="prime power p^r")
    p.add_argument("--table", type=int, metavar="P", help="constants for all primes up to P")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catmap)

    p = sub.add_parser("selftest", help="run the built-in oracle checks")
    p.add_argument("--max-points", type=int, default=10**5)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ToralError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
