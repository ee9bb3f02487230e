"""Command-line interface: ``zslab <command> [flags]``.

Exit codes: 0 definite answer, 2 budget exhausted / UNKNOWN (sound partial
output still printed), 1 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional, TextIO

import mpmath
import numpy as np

from . import bounds, polymethod, propd, search
from .groups import AbelianGroup, ParseError, abelian_groups, parse_group
from .search import SearchBudget, Status

GRAMMAR = "group spec grammar: <int>(^<int>)?(x<int>(^<int>)?)*   e.g. 3^2, 2x4x4, 9"
TABLES = ("egz-small", "dim-vs-bound", "petrov-caps", "propd-survey")

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    group_spec: Optional[str] = None
    budget: SearchBudget = field(default_factory=SearchBudget)
    output: str = "human"  # human | json | tsv
    seed: int = 0


def default_budget_nodes() -> int:
    raw = os.environ.get("ZSLAB_BUDGET_NODES")
    if raw is None:
        return 10**7
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"ZSLAB_BUDGET_NODES must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--budget-nodes", type=int, default=None)
    common.add_argument("--budget-seconds", type=float, default=60.0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json")
    fmt.add_argument("--tsv", dest="output", action="store_const", const="tsv")
    common.set_defaults(output="human")

    p = _Parser(prog="zslab", description="Exact and bounded Erdős–Ginzburg–Ziv constants of small abelian groups.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    for name, help_ in (("s", "exact s(A) by exhaustive search"), ("g", "exact square-free analogue g(A)"),
                        ("propd", "exhaustive Property D check for (Z_k)^n")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--group", required=True)

    sp = sub.add_parser("dim", parents=[common], help="exact monomial-space dimension")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-D", type=int, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("-k", type=int)
    g.add_argument("-m", type=int, help="use degree floor(n(D-1)/m) and compare with the closed-form bound")

    sp = sub.add_parser("petrov", parents=[common], help="sets with no non-constant zero-sum linear form")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--coeffs", required=True)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--verify", metavar="FILE")
    mode.add_argument("--search", action="store_true")

    sp = sub.add_parser("bound", parents=[common], help="certified interval for s(A) with provenance")
    sp.add_argument("--group", required=True)
    sp.add_argument("--assume-propd", action="store_true")
    sp.add_argument("--search", action="store_true", help="also run exhaustive search (small groups)")

    sp = sub.add_parser("table", parents=[common], help="reproducible TSV tables")
    sp.add_argument("name", choices=TABLES)
    sp.add_argument("--max-order", type=int, default=32)
    sp.add_argument("--n-max", type=int, default=60)
    return p


def _budget(args) -> SearchBudget:
    nodes = args.budget_nodes if args.budget_nodes is not None else default_budget_nodes()
    if nodes < 1 or args.budget_seconds <= 0 or args.threads < 1:
        raise UsageError("budgets and --threads must be positive")
    return SearchBudget(nodes, args.budget_seconds, args.threads)


def _group(spec: str) -> AbelianGroup:
    return parse_group(spec)


def _emit_json(out: TextIO, obj) -> None:
    out.write(json.dumps(obj, sort_keys=True) + "\n")


def _emit_tsv(out: TextIO, header: list[str], rows: list[list]) -> None:
    out.write("\t".join(header) + "\n")
    for r in rows:
        out.write("\t".join("" if v is None else str(v) for v in r) + "\n")


# -- commands ---------------------------------------------------------------


def cmd_exact(cfg: RunConfig, args, out: TextIO) -> int:
    G = _group(args.group)
    if G.order <= 1:
        raise bounds.DomainError("the trivial group has s = 1 by definition; nothing to search")
    fn = search.exact_s if cfg.command == "s" else search.exact_g
    res = fn(G, cfg.budget)
    certified = search.certify_witness(res, np.random.default_rng(cfg.seed))
    data = {**res.to_json(), "certified": certified}
    if cfg.output == "json":
        _emit_json(out, data)
    elif cfg.output == "tsv":
        _emit_tsv(out, ["group", "quantity", "value", "status", "nodes"],
                  [[G.spec, cfg.command, res.value, res.status.value, res.nodes_explored]])
    else:
        rel = "=" if res.status in (Status.EXACT, Status.VACUOUS) else ">="
        out.write(f"{cfg.command}({G.spec}) {rel} {res.value}  [{res.status.value}, {res.nodes_explored} nodes]\n")
        if res.witness is not None:
            out.write(f"witness: {res.witness}\n")
    return EXIT_OK if res.status in (Status.EXACT, Status.VACUOUS) else EXIT_UNKNOWN


def cmd_propd(cfg: RunConfig, args, out: TextIO) -> int:
    G = _group(args.group)
    rep = propd.check_property_d(G, cfg.budget)
    if cfg.output == "json":
        _emit_json(out, rep.to_json())
    elif cfg.output == "tsv":
        d = rep.to_json()
        _emit_tsv(out, ["group", "k", "n", "s", "holds", "orbits", "raw"],
                  [[d["group"], d["k"], d["n"], d["s"], d["holds"], d["extremal_orbits_checked"], d["raw_extremal_count"]]])
    else:
        out.write(f"Property D for {G.spec}: {rep.holds.value} (s = {rep.s_value}, "
                  f"{rep.extremal_orbits_checked} extremal orbits, {rep.raw_extremal_count} sequences)\n")
        if rep.counterexample is not None:
            out.write(f"counterexample: {rep.counterexample}\n")
    return EXIT_UNKNOWN if rep.holds is propd.PropD.UNKNOWN else EXIT_OK


def cmd_dim(cfg: RunConfig, args, out: TextIO) -> int:
    n, D = args.n, args.D
    k = args.k if args.k is not None else n * (D - 1) // args.m
    value = polymethod.dim_exact(n, D, k)
    data = {"n": n, "D": D, "k": k, "dim": value}
    if args.m is not None:
        chk = polymethod.compare_dim_to_bound(n, D, args.m, value)
        data.update(m=args.m, bound=bounds._fmt(chk.bound), status=chk.status)
    if cfg.output == "json":
        _emit_json(out, data)
    elif cfg.output == "tsv":
        _emit_tsv(out, list(data), [list(data.values())])
    else:
        out.write(f"{value}\n")
    return EXIT_OK


def _parse_coeffs(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--coeffs must be comma-separated integers, got {text!r}")


def cmd_petrov(cfg: RunConfig, args, out: TextIO) -> int:
    inst = polymethod.PetrovInstance(args.p, args.n, _parse_coeffs(args.coeffs))
    data: dict = {"p": inst.p, "n": inst.n, "coeffs": list(inst.coeffs)}
    code = EXIT_OK
    if args.verify:
        try:
            with open(args.verify) as fh:
                F = [tuple(v) for v in json.load(fh)]
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise UsageError(f"cannot read set file {args.verify}: {exc}")
        G = inst.group
        if any(len(v) != inst.n or not all(isinstance(c, int) for c in v) for v in F):
            raise UsageError(f"set file must be a JSON array of integer vectors of length {inst.n}")
        ok, wit = polymethod.petrov_verify(inst, [G.element(v) for v in F], witness=True)
        data.update(size=len(set(G.element(v) for v in F)), valid=ok,
                    violation=None if wit is None else [list(b) for b in wit])
    else:
        res = polymethod.petrov_max_search(inst, cfg.budget)
        data.update(max_size=res.value, status=res.status.value, nodes=res.nodes_explored,
                    witness=[list(c) for c in res.witness.multiplicities_flat()])
        code = EXIT_OK if res.status is Status.EXACT else EXIT_UNKNOWN
    try:
        b_dim = polymethod.petrov_cardinality_bound(inst, "EXACT_DIM")
        b_cf = polymethod.petrov_cardinality_bound(inst, "CLOSED_FORM")
        data.update(bound_exact_dim=b_dim.value_int, bound_closed_form=bounds._fmt(b_cf.value_real))
    except bounds.DomainError:
        data.update(bound_exact_dim=None, bound_closed_form=None)
    if cfg.output == "json":
        _emit_json(out, data)
    elif cfg.output == "tsv":
        _emit_tsv(out, list(data), [[json.dumps(v) if isinstance(v, list) else v for v in data.values()]])
    else:
        for key, v in data.items():
            out.write(f"{key}: {v}\n")
    return code


def cmd_bound(cfg: RunConfig, args, out: TextIO) -> int:
    G = _group(args.group)
    exact, lows, verified = {}, {}, set()
    code = EXIT_OK
    if args.search and G.order > 1:
        res = search.exact_s(G, cfg.budget)
        if res.status is Status.EXACT:
            exact[G] = res.value
        else:
            lows[G] = res.value
            code = EXIT_UNKNOWN
        if G.is_homocyclic():
            rep = propd.check_property_d(G, cfg.budget)
            if rep.holds is propd.PropD.HOLDS:
                verified.add(rep.params)
    opts = bounds.BoundOptions(assume_propd=args.assume_propd, verified_propd=frozenset(verified),
                               exact=exact, lower_witnesses=lows)
    rep = bounds.best_bounds(G, opts)
    if cfg.output == "json":
        _emit_json(out, rep.to_json())
    elif cfg.output == "tsv":
        _emit_tsv(out, ["group", "lower", "upper", "conditional_upper", "lower_source", "upper_source"],
                  [[G.spec, rep.lower.value_int, rep.upper.value_int, rep.conditional_upper.value_int,
                    rep.lower.source, rep.upper.source]])
    else:
        out.write(f"{rep.lower.value_int} <= s({G.spec}) <= {rep.upper.value_int}\n")
        out.write(f"  lower via {rep.lower.source}; upper via {rep.upper.source}\n")
        if rep.conditional_upper.value_int < rep.upper.value_int:
            out.write(f"  conditional upper {rep.conditional_upper.value_int} assuming "
                      f"{', '.join(rep.conditional_upper.conditional_on)}\n")
    return code


# -- tables -----------------------------------------------------------------


def _homocyclic_params(G: AbelianGroup):
    return (G.exponent, G.rank) if G.invariant_factors and G.is_homocyclic() else None


def table_egz_small(cfg: RunConfig, max_order: int) -> tuple[list[str], list[list], bool]:
    header = ["group", "order", "exponent", "rank", "s_exact", "s_status", "g_exact", "g_status",
              "rank2", "harborth_lower", "harborth_upper", "two_power", "prime_propd_upper",
              "capset_upper", "combine_upper", "best_lower", "best_upper", "check"]
    rows, unknown = [], False
    groups = [G for order in range(2, max_order + 1) for G in abelian_groups(order)]
    if max_order < 9:
        groups.append(AbelianGroup((3, 3)))
    for G in groups:
        s = search.exact_s(G, cfg.budget)
        g = search.exact_g(G, cfg.budget)
        unknown |= s.status is not Status.EXACT or g.status not in (Status.EXACT, Status.VACUOUS)
        cands = bounds.candidate_bounds(G)

        def pick(src):
            vals = [b.value_int for b in cands if b.source == src]
            return min(vals) if vals else None

        opts = bounds.BoundOptions(exact={G: s.value} if s.status is Status.EXACT else {},
                                   lower_witnesses={} if s.status is Status.EXACT else {G: s.value})
        rep = bounds.best_bounds(G, opts)
        check = "OK"
        if s.status is Status.EXACT:
            if any(b.kind in (bounds.Kind.UPPER, bounds.Kind.EXACT) and b.value_int < s.value for b in cands) or \
                    any(b.kind in (bounds.Kind.LOWER, bounds.Kind.EXACT) and b.value_int > s.value for b in cands):
                check = "VIOLATION"
        else:
            check = "UNKNOWN"
        rows.append([G.spec, G.order, G.exponent, G.rank, s.value, s.status.value, g.value, g.status.value,
                     pick("rank2_exact"), pick("harborth_lower"), pick("harborth_upper"), pick("two_power_exact"),
                     pick("prime_propd_upper"), pick("ternary_capset_upper"), pick("invariant_factor_combine"),
                     rep.lower.value_int, rep.upper.value_int, check])
    return header, rows, unknown


def table_dim_vs_bound(cfg: RunConfig, n_max: int) -> tuple[list[str], list[list], bool]:
    header = ["n", "D", "m", "k", "dim_exact", "bound", "status"]
    rows = []
    for c in polymethod.dim_bound_sweep(n_max):
        rows.append([c.n, c.D, c.m, c.k, c.dim, mpmath.nstr(c.bound, 12), c.status])
    rows.sort(key=lambda r: (r[1], r[2], r[0]))
    return header, rows, False


def _petrov_cases(max_size: int = 81):
    for p in (2, 3, 5, 7):
        n = 1
        while p**n <= max_size:
            yield p, n
            n += 1


def table_petrov_caps(cfg: RunConfig, max_size: int = 81) -> tuple[list[str], list[list], bool]:
    header = ["p", "n", "m", "coeffs", "max_size", "status", "bound_exact_dim", "bound_closed_form", "check"]
    rows, unknown = [], False
    for p, n in _petrov_cases(max_size):
        inst = polymethod.PetrovInstance(p, n, (1,) * p if p > 2 else (1, 1))
        res = polymethod.petrov_max_search(inst, cfg.budget)
        b1 = polymethod.petrov_cardinality_bound(inst, "EXACT_DIM").value_int
        b2 = polymethod.petrov_cardinality_bound(inst, "CLOSED_FORM").value_real
        done = res.status is Status.EXACT
        unknown |= not done
        ok = res.value <= b1 and res.value <= b2
        check = ("OK" if done else "PARTIAL") if ok else "VIOLATION"
        rows.append([p, n, inst.m, ",".join(map(str, inst.coeffs)), res.value, res.status.value, b1,
                     mpmath.nstr(b2, 12), check])
    return header, rows, unknown


PROPD_SURVEY = ["2", "2^2", "2^3", "2^4", "3", "4", "5", "6", "7", "3^2", "4^2", "3^3", "5^2"]


def table_propd_survey(cfg: RunConfig) -> tuple[list[str], list[list], bool]:
    header = ["group", "k", "n", "s", "holds", "extremal_orbits", "raw_extremal"]
    rows, unknown = [], False
    for spec in PROPD_SURVEY:
        rep = propd.check_property_d(parse_group(spec), cfg.budget)
        unknown |= rep.holds is propd.PropD.UNKNOWN
        k, n = rep.params
        rows.append([spec, k, n, rep.s_value, rep.holds.value, rep.extremal_orbits_checked, rep.raw_extremal_count])
    return header, rows, unknown


def cmd_table(cfg: RunConfig, args, out: TextIO) -> int:
    if args.name == "egz-small":
        header, rows, unknown = table_egz_small(cfg, args.max_order)
    elif args.name == "dim-vs-bound":
        header, rows, unknown = table_dim_vs_bound(cfg, args.n_max)
    elif args.name == "petrov-caps":
        header, rows, unknown = table_petrov_caps(cfg)
    else:
        header, rows, unknown = table_propd_survey(cfg)
    if cfg.output == "json":
        _emit_json(out, {"table": args.name, "columns": header, "rows": rows})
    else:
        _emit_tsv(out, header, rows)
    return EXIT_UNKNOWN if unknown else EXIT_OK


HANDLERS: dict[str, Callable] = {
    "s": cmd_exact, "g": cmd_exact, "propd": cmd_propd, "dim": cmd_dim,
    "petrov": cmd_petrov, "bound": cmd_bound, "table": cmd_table,
}


def run(argv: Optional[list[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig(args.command, getattr(args, "group", None), _budget(args), args.output, args.seed)
        return HANDLERS[cfg.command](cfg, args, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n{parser.format_usage()}{GRAMMAR}\n")
        return EXIT_ERROR
    except (ParseError, bounds.DomainError, propd.NotHomocyclic, ValueError) as exc:
        err.write(f"error: {exc}\n{GRAMMAR}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
