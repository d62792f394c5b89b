"""Command-line front end: ``choquet <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 infeasible data or
violations found, 3 internal-consistency failure.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from typing import Callable

import numpy as np

from . import io
from .axioms import (
    ORDINAL_KINDS,
    SCORE_TOL,
    FiniteRelation,
    check_convexity_axiom,
    check_lattice_axiom,
    check_ordinal_axiom,
    reverify,
    tradeoff_grid,
    triple_cancellation_violations,
)
from .capacity import (
    index_report,
    is_convex,
    is_supermodular,
    members,
    mobius,
    mobius_convexity_criterion,
    validate,
)
from .exceptions import ChoquetError, InternalConsistencyError
from .integral import (
    choquet_many,
    choquet_mobius,
    eval_lattice_poly,
    extract_dnf,
    order_statistic_capacity,
    parse_family,
)
from .joint import (
    ExperimentSpec,
    JointConfig,
    identifiability_experiment,
    learn_joint,
    sample_preferences,
    synth_model,
)
from .learn import IdentificationConfig, LearnStatus, check_fit, identify
from .values import ValueFunctionSet

EXIT_OK, EXIT_USAGE, EXIT_FOUND, EXIT_INTERNAL = 0, 1, 2, 3
AXIOMS = ("max", "min", "os", "lattice", "a10", "tc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Output:
    """Text lines for people, one JSON record per line for machines."""

    def __init__(self, fmt: str, stream=None):
        self.machine = fmt == "machine"
        self.stream = stream or sys.stdout

    def emit(self, record: dict, text: str | Callable[[], str]):
        if self.machine:
            print(io.dumps(record), file=self.stream)
        else:
            print(text() if callable(text) else text, file=self.stream)


def _g(x: float) -> str:
    return f"{x:.6g}"


def _set(mask: int) -> str:
    return "{" + ",".join(map(str, members(mask))) + "}"


def _pair(text: str) -> tuple[int, int]:
    try:
        i, j = (int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--pair: expected i,j, got {text!r}") from None
    return i, j


# --------------------------------------------------------------------------
# capacity-level commands
# --------------------------------------------------------------------------

def cmd_indices(args, out: Output) -> int:
    cap = io.read_capacity(args.capacity)
    _require_valid(cap)
    rep = index_report(cap)
    pairs = sorted(rep.pairwise_interactions.items())
    out.emit({"shapley": rep.shapley.tolist(),
              "interactions": [{"pair": list(k), "value": v} for k, v in pairs]},
             lambda: "\n".join(
                 ["shapley: " + " ".join(_g(x) for x in rep.shapley)]
                 + [f"I({i},{j}) = {_g(v)}" for (i, j), v in pairs]))
    return EXIT_OK


def _require_valid(cap):
    bad = validate(cap)
    if bad:
        raise ChoquetError("nu: not a valid capacity: " + bad[0].describe(cap.n))


def cmd_validate(args, out: Output) -> int:
    cap = io.read_capacity(args.capacity)
    bad = validate(cap)
    for v in bad:
        out.emit({"kind": v.kind, "subset": list(members(v.subset)),
                  "superset": None if v.superset is None else list(members(v.superset)),
                  "amount": v.amount}, v.describe(cap.n))
    out.emit({"valid": not bad, "violations": len(bad)},
             "OK" if not bad else f"{len(bad)} violation(s)")
    return EXIT_FOUND if bad else EXIT_OK


def cmd_mobius(args, out: Output) -> int:
    cap = io.read_capacity(args.capacity)
    m = mobius(cap)
    rows = [(a, float(m.coeffs[a])) for a in range(1, 1 << cap.n)]
    out.emit({"n": cap.n, "m": [{"set": list(members(a)), "value": v} for a, v in rows]},
             lambda: "\n".join(f"m({_set(a)}) = {_g(v)}" for a, v in rows))
    return EXIT_OK


def cmd_convexity(args, out: Output) -> int:
    cap = io.read_capacity(args.capacity)
    _require_valid(cap)
    sup = is_supermodular(cap, args.tolerance)
    mob = mobius_convexity_criterion(mobius(cap), args.tolerance)
    if sup != mob:
        raise InternalConsistencyError("supermodularity and Möbius criterion disagree")
    out.emit({"convex": sup, "supermodular": sup, "mobius_criterion": mob},
             "convex" if is_convex(cap) else "not convex")
    return EXIT_OK


def _profiles(args, n: int) -> np.ndarray:
    if args.profile:
        rows = [[float(x) for x in p.split(",")] for p in args.profile]
    else:
        doc = io.load_document(args.profiles)
        rows = doc.get("profiles")
        if not isinstance(rows, list):
            raise ChoquetError("profiles: missing or not a list")
    try:
        P = np.array(rows, dtype=float)
    except ValueError:
        raise ChoquetError("profiles: rows must be lists of reals of equal length") from None
    if P.ndim != 2 or P.shape[1] != n:
        raise ChoquetError(f"profiles: every profile needs {n} entries")
    return P


def cmd_eval(args, out: Output) -> int:
    cap = io.read_capacity(args.capacity)
    _require_valid(cap)
    P = _profiles(args, cap.n)
    if args.form == "sort":
        vals = choquet_many(cap.values, P)
    elif args.form == "mobius":
        m = mobius(cap)
        vals = np.array([choquet_mobius(m, p) for p in P])
    else:
        lp = extract_dnf(cap)
        vals = np.array([eval_lattice_poly(lp, p, args.form) for p in P])
    for p, v in zip(P, vals):
        out.emit({"profile": p.tolist(), "value": float(v)},
                 f"C({', '.join(_g(x) for x in p)}) = {_g(v)}")
    return EXIT_OK


def cmd_lattice(args, out: Output) -> int:
    cap = io.read_capacity(args.capacity)
    lp = extract_dnf(cap)
    forms = ["DNF", "CNF"] if args.form == "both" else [args.form.upper()]
    out.emit({"n": lp.n,
              "dnf": [list(members(b)) for b in lp.dnf_family],
              "cnf": [list(members(a)) for a in lp.cnf_family]},
             lambda: "\n".join(lp.render(f) for f in forms))
    return EXIT_OK


def cmd_os_capacity(args, out: Output) -> int:
    cap = order_statistic_capacity(args.n, args.k)
    io.write_capacity(cap, args.out)
    out.emit(io.capacity_to_doc(cap), f"wrote OS_{args.k} capacity for n={args.n} to {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------
# learning
# --------------------------------------------------------------------------

def cmd_learn(args, out: Output) -> int:
    data = io.read_dataset(args.data)
    if data.alternatives is None:
        raise ChoquetError("alternatives: numeric profiles are required for capacity learning")
    cfg = IdentificationConfig(k_additive=args.k_additive, objective=args.objective)
    res = identify(data, cfg)
    fit = check_fit(res.capacity, data, tol=max(args.tolerance, 1e-7))
    if res.feasible and fit.count:
        raise InternalConsistencyError(
            f"reported exact fit but {fit.count} preference(s) miss their margin")
    if args.out:
        io.write_capacity(res.capacity, args.out)
    missed = [s for s in res.slacks if s.slack > 1e-12]
    out.emit({"status": res.status.value, "total_slack": res.total_slack,
              "slacks": [{"row": s.label, "slack": s.slack} for s in missed],
              "shapley": res.index_report.shapley.tolist(),
              "capacity": io.capacity_to_doc(res.capacity)},
             lambda: "\n".join(
                 [f"status: {res.status.value}", f"total slack: {_g(res.total_slack)}"]
                 + [f"  {s.label}: slack {_g(s.slack)}" for s in missed]
                 + ["shapley: " + " ".join(_g(x) for x in res.index_report.shapley)]))
    return EXIT_OK if res.status is LearnStatus.FEASIBLE_EXACT else EXIT_FOUND


def cmd_learn_joint(args, out: Output) -> int:
    data = io.read_dataset(args.data)
    cfg = JointConfig(restarts=args.restarts, seed=args.seed, k_additive=args.k_additive)
    rep = learn_joint(data, cfg)
    if args.out_capacity:
        io.write_capacity(rep.capacity, args.out_capacity)
    if args.out_values:
        io.write_values(rep.value_functions, args.out_values)
    out.emit({"violations": rep.violations, "total_slack": rep.total_slack,
              "iterations": rep.iterations, "restarts_used": rep.restarts_used,
              "history": list(rep.history),
              "capacity": io.capacity_to_doc(rep.capacity),
              **io.values_to_doc(rep.value_functions)},
             lambda: "\n".join(
                 [f"violations: {rep.violations}", f"total slack: {_g(rep.total_slack)}",
                  f"restarts used: {rep.restarts_used}", f"iterations: {rep.iterations}"]
                 + [f"f{i}: " + ", ".join(f"{lab}->{_g(v)}" for lab, v in crit)
                    for i, crit in enumerate(rep.value_functions.pairs())]))
    return EXIT_OK if rep.violations == 0 else EXIT_FOUND


def _mode(args):
    return "all_grid_pairs" if args.pairs is None else ("random", args.pairs, args.seed)


def cmd_synth(args, out: Output) -> int:
    model = synth_model(args.n, args.levels, args.seed, args.spec)
    doc = {**io.capacity_to_doc(model.capacity), **io.values_to_doc(model.value_functions)}
    io.save_document(doc, args.out)
    if args.data_out:
        io.write_dataset(sample_preferences(model, _mode(args), args.delta), args.data_out)
    out.emit(doc, lambda: f"wrote model (n={args.n}, {args.levels} levels, {args.spec}) to {args.out}")
    return EXIT_OK


def cmd_experiment(args, out: Output) -> int:
    spec = ExperimentSpec(args.n, args.levels, args.spec, _mode(args), args.seed, args.delta)
    rep = identifiability_experiment(spec)
    doc = rep.as_dict()
    if args.report:
        io.save_document(doc, args.report)
    out.emit(doc, lambda: "\n".join([
        f"status: {rep.status}",
        f"max pair-interval width: {_g(rep.max_pair_width)}",
        f"true groups: {list(map(list, rep.truth_groups))}",
        f"detected groups (scan): {list(map(list, rep.detected_groups))}",
        f"support groups (LP): {list(map(list, rep.support_groups))}",
        f"max cross-group |I|: {_g(rep.cross_group_interaction)} restricted, "
        f"{_g(rep.cross_group_interaction_unrestricted)} unrestricted"]))
    return EXIT_OK


# --------------------------------------------------------------------------
# axiom scans
# --------------------------------------------------------------------------

def _grid_values(vf: ValueFunctionSet, grid) -> ValueFunctionSet:
    """Value functions on ``grid``: declared levels directly, other numbers by interpolation."""
    vals = []
    for i, labels in enumerate(grid):
        known = dict(zip(vf.levels[i], vf.values[i]))
        vals.append(np.array([known[x] if x in known else vf.interpolate(i, float(x))
                              for x in labels]))
    return ValueFunctionSet(tuple(grid), tuple(vals))


def cmd_check_axiom(args, out: Output) -> int:
    cap = io.read_capacity(args.model)
    _require_valid(cap)
    pair = _pair(args.pair) if args.pair else None
    if args.axiom == "a10" and args.tradeoff:
        vf = tradeoff_grid(cap, *(pair or (0, 1)))
    else:
        if not args.values:
            raise UsageError("--values is required")
        vf = io.read_values(args.values)
        if args.grid:
            vf = _grid_values(vf, io.read_grid(args.grid))
    if vf.n != cap.n:
        raise ChoquetError(f"values: {vf.n} criteria but the capacity has {cap.n}")
    tol = args.tolerance
    rel = FiniteRelation.from_model(cap, vf, tol)
    families = None
    if args.axiom in ORDINAL_KINDS:
        found = check_ordinal_axiom(rel, args.axiom, None)
        if pair:
            found = [w for w in found if set(w.criteria) <= set(pair)]
    elif args.axiom == "lattice":
        if args.cnf or args.dnf:
            if not (args.cnf and args.dnf):
                raise UsageError("--cnf and --dnf go together")
            families = (parse_family(args.cnf), parse_family(args.dnf))
        else:
            lp = extract_dnf(cap)
            families = ([list(members(a)) for a in lp.cnf_family],
                        [list(members(b)) for b in lp.dnf_family])
        found = check_lattice_axiom(rel, *families, limit=args.limit)
    elif args.axiom == "tc":
        pairs = [pair] if pair else list(itertools.permutations(range(cap.n), 2))
        found = [w for i, j in pairs for w in triple_cancellation_violations(rel, i, j)]
    else:
        found = check_convexity_axiom(cap, vf, tol, pair=pair)
    if args.limit is not None:
        found = found[: args.limit]
    for w in found:
        if not reverify(rel, w, families=families, values=vf, tol=tol):
            raise InternalConsistencyError(f"witness does not re-verify: {w.describe()}")
        out.emit({"axiom": w.axiom, "criteria": list(w.criteria),
                  "points": [list(p) for p in w.points]}, w.describe())
    out.emit({"axiom": args.axiom, "violations": len(found)},
             "OK" if not found else f"{len(found)} witness(es)")
    return EXIT_FOUND if found else EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    p.add_argument("--tolerance", type=float, default=d(SCORE_TOL),
                   help="numeric tolerance for ties and checks")
    p.add_argument("--format", choices=("text", "machine"), default=d("text"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="choquet", description="Capacities, Choquet integrals and preference learning.")
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        _globals(p, suppress=True)
        p.set_defaults(fn=fn)
        return p

    for name, fn, help in (("indices", cmd_indices, "Shapley values and pairwise interactions"),
                           ("validate", cmd_validate, "normalization and monotonicity check"),
                           ("mobius", cmd_mobius, "Möbius coefficients"),
                           ("convexity", cmd_convexity, "convexity by both criteria")):
        add(name, fn, help).add_argument("--capacity", required=True)

    p = add("eval", cmd_eval, "Choquet integral of profiles")
    p.add_argument("--capacity", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--profile", action="append", help="comma-separated values; repeatable")
    src.add_argument("--profiles", help='file with {"profiles": [[...], ...]}')
    p.add_argument("--form", choices=("sort", "mobius", "cnf", "dnf"), default="sort")

    p = add("lattice", cmd_lattice, "lattice polynomial of a 0-1 capacity")
    p.add_argument("--capacity", required=True)
    p.add_argument("--form", choices=("dnf", "cnf", "both"), default="dnf")

    p = add("os-capacity", cmd_os_capacity, "write the k-th order-statistic capacity")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("learn", cmd_learn, "capacity from preference information")
    p.add_argument("--data", required=True)
    p.add_argument("--k-additive", type=int)
    p.add_argument("--objective", choices=("feasibility", "min-slack", "max-min-slack"),
                   default="feasibility")
    p.add_argument("--out")

    p = add("learn-joint", cmd_learn_joint, "capacity and value functions together")
    p.add_argument("--data", required=True)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--k-additive", type=int)
    p.add_argument("--out-capacity")
    p.add_argument("--out-values")

    def synth_args(p):
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--levels", type=int, default=3)
        p.add_argument("--spec", default="full", help="additive, full or groups=0,1;2")
        p.add_argument("--pairs", type=int, help="sample this many random pairs instead of all")
        p.add_argument("--delta", type=float, default=1e-3)

    p = add("synth", cmd_synth, "random ground-truth model")
    synth_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--data-out", help="also write the sampled preference dataset")

    p = add("experiment", cmd_experiment, "identifiability experiment")
    p.add_argument("name", choices=("identifiability",))
    synth_args(p)
    p.add_argument("--report")

    p = add("check-axiom", cmd_check_axiom, "brute-force axiom scan on a grid")
    p.add_argument("--model", required=True, help="capacity file")
    p.add_argument("--values")
    p.add_argument("--grid")
    p.add_argument("--axiom", choices=AXIOMS, required=True)
    p.add_argument("--pair")
    p.add_argument("--cnf", help="CNF family for the lattice condition, e.g. 0,1;0,2")
    p.add_argument("--dnf", help="DNF family for the lattice condition")
    p.add_argument("--tradeoff", action="store_true",
                   help="a10: use the five-level trade-off grid for --pair")
    p.add_argument("--limit", type=int)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "fn", None):
            raise UsageError("a subcommand is required")
        return args.fn(args, Output(args.format, stdout))
    except UsageError as exc:
        print(f"choquet: usage: {exc}", file=stderr)
        return EXIT_USAGE
    except InternalConsistencyError as exc:
        print(f"choquet: internal consistency error: {exc}", file=stderr)
        return EXIT_INTERNAL
    except ChoquetError as exc:
        print(f"choquet: {exc}".splitlines()[0], file=stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
