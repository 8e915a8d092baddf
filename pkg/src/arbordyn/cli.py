"""Command-line front end: `arbordyn <subcommand>`.

Exit codes: 0 success (and all assertions passed), 1 an assertion failed, 2 usage error.
Rationals are printed as "p/q" strings. Randomised sweeps default to seed 0.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from typing import Callable

from . import arith, cp, detect, embed, geometry, returns
from .treespec import (
    EventuallyPeriodicSet,
    PeriodicSequence,
    ProfileTree,
    dumps_tree,
    full_tree,
    iter_level,
    loads_tree,
    make_configuration,
    make_named_tree,
    parse_configuration,
    splitting_levels,
)

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialisation


def to_jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, EventuallyPeriodicSet):
        return {"set": obj.to_dict(), "describe": obj.describe()}
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {(k if isinstance(k, str) else str(to_jsonable(k))): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(x) for x in items]
    return obj


def _rows(payload: dict) -> list[dict]:
    if isinstance(payload.get("rows"), list) and payload["rows"] and isinstance(payload["rows"][0], dict):
        return payload["rows"]
    return [{"key": k, "value": json.dumps(v) if isinstance(v, (dict, list)) else v} for k, v in payload.items()]


def emit(payload: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    payload = to_jsonable(payload)
    if fmt == "json":
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    rows = _rows(payload)
    cols = list(dict.fromkeys(k for r in rows for k in r))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in r.items()})
        out.write(buf.getvalue())
        return
    cells = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)) + "\n")
    for row in cells:
        out.write("  ".join(x.ljust(w) for x, w in zip(row, widths)) + "\n")


# ---------------------------------------------------------------------------
# input parsing


def _kv(text: str) -> dict:
    out = {}
    for part in filter(None, text.split(",")):
        if "=" not in part:
            raise UsageError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_tree(text: str):
    """A JSON file path, or shorthand such as T_kN:q=2,r=2,k=3 / T_eps:q=2,r=2,k=2,N=4 /
    T_E:q=4,r=3,E=2N / full:q=2 / profile:q=3,period=3.1,pre=2."""
    if os.path.exists(text):
        with open(text) as fh:
            return loads_tree(fh.read())
    name, _, rest = text.partition(":")
    params = _kv(rest)
    try:
        q = int(params.pop("q", 2))
        if name == "full":
            return full_tree(q)
        if name == "profile":
            per = tuple(int(x) for x in params["period"].split("."))
            pre = tuple(int(x) for x in params.get("pre", "").split(".") if x)
            return ProfileTree(q, PeriodicSequence(pre, per))
        r = int(params.pop("r", 2))
        if name in ("T_kN", "T_eps"):
            return make_named_tree(name, q, r, **{k: int(v) for k, v in params.items()})
        if name == "T_E":
            return make_named_tree(name, q, r, E=params["E"])
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad tree shorthand {text!r}: {exc}") from exc
    raise UsageError(f"--tree: no file {text!r} and unknown shorthand; see --help")


def parse_predicate(text: str, tree) -> geometry.VertexPredicate:
    """all | none | splitting[:r=R] | levels:<set> | states:a,b | words:,0,01 | JSON file."""
    if os.path.exists(text):
        with open(text) as fh:
            data = json.load(fh)
        kind = data["kind"]
        if kind == "level":
            return geometry.VertexPredicate.level(EventuallyPeriodicSet.from_dict(data["levels"]))
        if kind == "state":
            return geometry.VertexPredicate.state(data["states"])
        return geometry.VertexPredicate.explicit(data["words"])
    head, _, rest = text.partition(":")
    if head == "all":
        return geometry.VertexPredicate.everything()
    if head == "none":
        return geometry.VertexPredicate.nothing()
    if head == "splitting":
        if not isinstance(tree, ProfileTree):
            raise UsageError("splitting-level predicates need a profile tree")
        r = _kv(rest).get("r")
        return geometry.VertexPredicate.level(splitting_levels(tree, int(r) if r else None))
    if head == "levels":
        return geometry.VertexPredicate.level(EventuallyPeriodicSet.parse(rest))
    if head == "states":
        return geometry.VertexPredicate.state([_state_token(x) for x in rest.split(",")])
    if head == "words":
        return geometry.VertexPredicate.explicit(rest.split(","))
    raise UsageError(f"unknown predicate {text!r}")


def _state_token(x: str):
    return int(x) if x.lstrip("-").isdigit() else x


def _fraction(text: str | None) -> Fraction | None:
    if text is None:
        return None
    try:
        return Fraction(text)
    except ValueError as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


# ---------------------------------------------------------------------------
# experiment reports


@dataclasses.dataclass
class Assertion:
    name: str
    passed: bool
    value: object = None
    expected: object = None
    tolerance: str = "exact"


@dataclasses.dataclass
class ExperimentReport:
    experiment: str
    inputs: dict
    values: dict = dataclasses.field(default_factory=dict)
    assertions: list = dataclasses.field(default_factory=list)
    runtime: float = 0.0

    def check(self, name: str, passed: bool, value=None, expected=None, tolerance: str = "exact") -> None:
        self.assertions.append(Assertion(name, bool(passed), value, expected, tolerance))

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "inputs": self.inputs, "values": self.values,
                "passed": self.passed, "runtime": round(self.runtime, 3),
                "rows": [dataclasses.asdict(a) for a in self.assertions]}


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(to_jsonable(obj), sort_keys=True).encode()).hexdigest()[:16]


def _equality_grid():
    for q in (2, 3, 4):
        for r in (2, 3):
            if r > q:
                continue
            for k in (1, 2, 3, 4):
                yield q, r, k


def suite_equality_case(args) -> ExperimentReport:
    rep = ExperimentReport("equality-case", {"grid": "q in 2..4, r in 2..3, k in 1..4"})
    t = make_named_tree("T_kN", 2, 2, k=3)
    rep.inputs["T2_3N"] = digest(dumps_tree(t))
    dim = geometry.minkowski_dim(t)
    rep.check("dim T^2_3N = 1/3", dim.exact == Fraction(1, 3), dim.exact, Fraction(1, 3))
    gen = embed.generic_params(t, make_configuration("F", 2, r=2), "upper", 24)
    rep.check("generic F^2 up to 24 = 3N", gen.params == list(range(0, 25, 3)), gen.params)
    chain = cp.build_cp_chain(cp.uniform_markov_tree(t))
    spl = cp.measure_of_splitting(chain, 2)
    rep.check("nu(A_2) = 1/3", spl.measure == Fraction(1, 3), spl.measure, Fraction(1, 3))
    ent = cp.info_and_entropy(chain)
    rep.check("H(nu) = 1/3", abs(ent.total - 1 / 3) < 1e-12, ent.total, "1/3", "1e-12")
    for q, r, k in _equality_grid():
        tree = make_named_tree("T_kN", q, r, k=k)
        closed = 1 / k + (math.log(r - 1, q) if r > 2 else 0.0) * (1 - 1 / k)
        d = geometry.minkowski_dim(tree).value
        rep.check(f"dim T^{r}_{k}N q={q}", abs(d - closed) < 1e-12, d, closed, "1e-12")
        g = embed.generic_set(tree, make_configuration("F", q, r=r))
        rep.check(f"generic set q={q} r={r} k={k} = kN", g == EventuallyPeriodicSet.multiples(k), g.describe())
        rep.check(f"lower density q={q} r={r} k={k}", arith.densities(g).lower == Fraction(1, k),
                  arith.densities(g).lower, Fraction(1, k))
        ident = detect.equality_case_identities(cp.build_cp_chain(cp.uniform_markov_tree(tree)), q, r, k,
                                                n_max=2)
        rep.check(f"identities q={q} r={r} k={k}", ident.holds)
    return rep


def suite_sharpness(args) -> ExperimentReport:
    q, r, k, n_big = 2, 2, 2, 4
    tree = make_named_tree("T_eps", q, r, k=k, N=n_big)
    rep = ExperimentReport("sharpness", {"tree": digest(dumps_tree(tree)), "q": q, "r": r, "k": k, "N": n_big})
    dim = geometry.minkowski_dim(tree)
    rep.check("dim T_eps = 3/8", dim.exact == Fraction(3, 8), dim.exact, Fraction(3, 8))
    g = embed.generic_set(tree, make_configuration("F", q, r=r))
    low = arith.densities(g).lower
    rep.check("lower density of G*(F^2) = 1/2", low == Fraction(1, 2), low, Fraction(1, 2))
    ratio = low / dim.exact
    rep.check("ratio = 4/3", ratio == Fraction(4, 3), ratio, Fraction(4, 3))
    V = make_configuration("V", q, r=r, k=k, n=9)
    levels = embed.config_level_set(tree, V, 1)
    rep.check("V^{2,2,9} level set at parameter 1 is empty", levels.is_empty(), levels.describe())
    depth = args.depth if getattr(args, "depth", None) else 24
    found = [w for n in range(depth + 1) for w, _ in iter_level(tree, n) if embed.appears_at(tree, V, w, 1)]
    rep.values["vertices_searched_depth"] = depth
    rep.check(f"V^{{2,2,9}} absent at parameter 1 up to depth {depth}", not found, len(found), 0)
    return rep


def suite_phi_identities(args) -> ExperimentReport:
    rep = ExperimentReport("phi-identities", {"m_max": 8})
    for name, tau in cp.example_markov_trees().items():
        chain = cp.build_cp_chain(tau)
        rep.inputs[name] = len(chain)
        for r in range(2, tau.q + 1):
            F = make_configuration("F", tau.q, r=r)
            ok = all(detect.evaluate(detect.build_phi(F, m), chain) == detect.closed_form_F(chain, r, m)
                     for m in range(1, 9))
            rep.check(f"{name}: phi(F^{r}) = 1_A P^m 1_A, m <= 8", ok)
            D = make_configuration("D", tau.q, r=r, n=2)
            fac = math.factorial(r)
            ok = all(detect.evaluate(detect.build_phi(D, m), chain)
                     == [fac * x for x in detect.evaluate(detect.build_phi(D, m, "phi_prime"), chain)]
                     for m in range(1, 5))
            rep.check(f"{name}: phi(D^{r},2) = {fac} phi'", ok)
    return rep


def suite_returns_sweep(args) -> ExperimentReport:
    max_n = args.max_n or 8
    rep = ExperimentReport("returns-sweep", {"max_n": max_n})
    t12 = returns.partition_sweep(max_n)
    rep.values["partition_sweep"] = {k: (len(v) if isinstance(v, list) else v) for k, v in t12.items()}
    rep.check("shift partition: zero counterexamples", not t12["counterexamples"], t12["counterexamples"])
    me = returns.mean_ergodic_sweep(max_n)
    rep.values["mean_ergodic_checked"] = me["checked"]
    rep.check("lower d(R) >= nu(A)", not me["violations"], len(me["violations"]), 0)
    kn = returns.kneser_sweep(min(max_n, 10))
    rep.values["kneser_checked"] = kn["checked"]
    rep.check("Kneser inequality", not kn["violations"], len(kn["violations"]), 0)
    return rep


def suite_appendix(args) -> ExperimentReport:
    rep = ExperimentReport("appendix", {})
    cases = [("Z4 A={0}", returns.FiniteMPS.rotation(4), {0}, 4),
             ("Z6 A={0,3}", returns.FiniteMPS.rotation(6), {0, 3}, 3),
             ("Z3 A={0}", returns.FiniteMPS.rotation(3), {0}, 3)]
    for name, mps, A, k in cases:
        res = returns.verify_appendix(mps, A, eta=0)
        rep.check(f"{name}: heavy-return bound", res.heavy_holds)
        rep.check(f"{name}: triple-return bound", res.triple_holds)
        rep.check(f"{name}: small-delta returns = {k}N", res.small_delta_k == k, res.small_delta_k, k)
    mps, A = returns.nonergodic_fixture()
    res = returns.verify_appendix(mps, A)
    rep.values["nonergodic_eta"] = res.eta
    rep.check("two-cycle system: hypothesis holds with eta < 1/5", res.heavy_applicable and res.eta < Fraction(1, 5),
              res.eta)
    rep.check("two-cycle system: heavy-return bound still holds", res.heavy_holds)
    rep.check("two-cycle system: small-delta returns are not kN", res.small_delta_k is None, res.small_delta_k, None)
    part = returns.verify_thm_partition(mps, A)
    rep.check("two-cycle system: ergodic conclusion fails", not part.stability_holds)
    return rep


SUITES: dict[str, Callable] = {
    "equality-case": suite_equality_case,
    "sharpness": suite_sharpness,
    "phi-identities": suite_phi_identities,
    "returns-sweep": suite_returns_sweep,
    "appendix": suite_appendix,
}


# ---------------------------------------------------------------------------
# subcommands (each returns (payload, passed))


def cmd_dim(args):
    tree = parse_tree(args.tree)
    if args.depth is not None:
        res = geometry.minkowski_dim(tree, "estimate", args.depth)
    else:
        res = geometry.minkowski_dim(tree, "exact")
    out = {"value": res.exact if res.exact is not None else res.value, "float": res.value, "mode": res.mode,
           "certificate": res.certificate}
    if args.hausdorff:
        h = geometry.hausdorff_dim(tree, args.floor, args.horizon, args.tol)
        out["hausdorff"] = {"lo": h.lo, "hi": h.hi, "exact": h.exact, "exact_flag": h.exact_flag,
                            "floor": h.floor, "horizon": h.horizon}
    return out, True


def cmd_density(args):
    tree = parse_tree(args.tree)
    pred = parse_predicate(args.pred, tree)
    mode = "estimate" if args.depth is not None else "exact"
    res = geometry.upper_density(tree, pred, mode, args.depth or 0)
    out = {"value": res.value, "mode": res.mode}
    if res.sequence:
        out["sequence"] = res.sequence
    return out, True


def cmd_detect(args):
    tree = parse_tree(args.tree)
    conf = parse_configuration(args.config, tree.q)
    wit = embed.appears_at(tree, conf, args.at, args.m)
    return {"appears": wit is not None, "witness": wit.to_dict() if wit else None}, True


def cmd_generic(args):
    tree = parse_tree(args.tree)
    conf = parse_configuration(args.config, tree.q)
    res = embed.generic_params(tree, conf, args.mode, args.mmax, args.depth)
    return res.to_dict(), True


def _tau(args):
    tree = parse_tree(args.tree)
    return cp.uniform_markov_tree(tree)


def cmd_cp(args):
    tau = _tau(args)
    chain = cp.build_cp_chain(tau)
    ent = cp.info_and_entropy(chain)
    rows = [{"state": f"{lab}|{st}", "stationary": chain.stationary[i], "H": ent.per_state[i]}
            for i, (lab, st) in enumerate(chain.states)]
    spl = {r: cp.measure_of_splitting(chain, r) for r in range(2, tau.q + 1)}
    a_q = [i for i in range(len(chain)) if chain.n_children(i) >= tau.q]
    out = {"entropy": ent.total, "ergodic": chain.is_ergodic(),
           "splitting": {r: {"measure": s.measure, "bound": s.bound, "holds": s.holds} for r, s in spl.items()}}
    if a_q:
        out["returns_of_A_q"] = cp.return_times(chain, a_q, args.n_max).returns
    if args.report:
        out["rows"] = rows
    return out, all(s.holds for s in spl.values())


def cmd_phi(args):
    tau = _tau(args)
    chain = cp.build_cp_chain(tau)
    conf = parse_configuration(args.config, tau.q)
    variant = {"prime": "phi_prime", "phi": "phi", "varphi": "varphi"}[args.variant]
    expr = detect.build_phi(conf, args.m, variant, _fraction(args.delta))
    vals = detect.evaluate(expr, chain)
    rows = [{"state": f"{lab}|{st}", "value": v} for (lab, st), v in zip(chain.states, vals)]
    return {"rows": rows, "root": detect.evaluate_at_root(expr, chain), "stats": detect.expr_stats(expr)}, True


def cmd_returns(args):
    mps = returns.parse_system(args.n, args.perm, args.weights)
    A = returns.parse_subset(args.A)
    B = returns.parse_subset(args.B) if args.B else None
    rs = returns.return_sets(mps, A, _fraction(args.delta), _fraction(args.gamma), args.m, _fraction(args.eps), B)
    out = {"measure": rs.measure, "correlation": rs.correlation, "densities": rs.densities(),
           "R": rs.R, "kneser": returns.kneser_structure(rs.R)}
    for name in ("R_delta", "R_gamma", "R_m_delta", "R_AB"):
        if getattr(rs, name) is not None:
            out[name] = getattr(rs, name)
    out["partition"] = returns.verify_thm_partition(mps, A)
    return out, True


def cmd_sweep(args):
    n = args.max_n
    if args.check == "partition":
        res = returns.partition_sweep(n)
        ok = not res["counterexamples"]
    elif args.check == "kneser":
        res = returns.kneser_sweep(n)
        ok = not res["violations"]
    elif args.check == "sum-closure":
        res = returns.sum_closure_sweep(n)
        ok = not res["failures"]
    elif args.check == "mean-ergodic":
        res = returns.mean_ergodic_sweep(n)
        ok = not res["violations"]
    elif args.check == "transfer-probe":
        res = returns.transfer_probe_sweep(args.samples, n, args.seed)
        ok = True  # data only
    elif args.check == "cube-density":
        rows = embed.cube_density_probe(args.q, args.r, n)
        res = {"rows": [dataclasses.asdict(r) for r in rows if r.checks]}
        ok = True  # data only
    else:
        raise UsageError(f"unknown check {args.check!r}")
    res["seed"] = args.seed
    return res, ok


def cmd_verify(args):
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    start = time.perf_counter()
    rep = SUITES[args.suite](args)
    rep.runtime = time.perf_counter() - start
    return rep.to_dict(), rep.passed


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arbordyn", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub = p.add_subparsers(dest="command", required=True)

    def tree_arg(sp):
        sp.add_argument("--tree", required=True, help="JSON file or shorthand, e.g. T_kN:q=2,r=2,k=3")

    sp = sub.add_parser("dim", help="Minkowski (and optionally Hausdorff) dimension")
    tree_arg(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true")
    g.add_argument("--depth", type=int)
    sp.add_argument("--hausdorff", action="store_true")
    sp.add_argument("--horizon", type=int, default=60)
    sp.add_argument("--floor", type=int)
    sp.add_argument("--tol", type=float, default=0.02)
    sp.set_defaults(func=cmd_dim)

    sp = sub.add_parser("density", help="upper density of a vertex predicate")
    tree_arg(sp)
    sp.add_argument("--pred", required=True, help="all | none | splitting[:r=R] | levels:3N | states:.. | words:..")
    sp.add_argument("--depth", type=int)
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("detect", help="search for an affine embedding at a vertex")
    tree_arg(sp)
    sp.add_argument("--config", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--at", default="")
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("generic", help="generic parameters of a configuration")
    tree_arg(sp)
    sp.add_argument("--config", required=True)
    sp.add_argument("--mmax", type=int, default=12)
    sp.add_argument("--mode", choices=("upper", "banach"), default="upper")
    sp.add_argument("--depth", type=int, default=40)
    sp.set_defaults(func=cmd_generic)

    sp = sub.add_parser("cp", help="CP chain of the uniform Markov tree")
    tree_arg(sp)
    sp.add_argument("--n-max", type=int, default=32)
    sp.add_argument("--report", action="store_true", help="include per-state rows")
    sp.set_defaults(func=cmd_cp)

    sp = sub.add_parser("phi", help="evaluate a detecting function on the CP chain")
    tree_arg(sp)
    sp.add_argument("--config", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--variant", choices=("phi", "prime", "varphi"), default="phi")
    sp.add_argument("--delta")
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("returns", help="return-time sets of a finite system")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--perm", default="rot", help="rot | cycle lengths 2+3 | explicit images 1,0,2")
    sp.add_argument("--weights", help="comma-separated point weights")
    sp.add_argument("--A", required=True)
    sp.add_argument("--B")
    sp.add_argument("--delta")
    sp.add_argument("--gamma")
    sp.add_argument("--m", type=int)
    sp.add_argument("--eps")
    sp.set_defaults(func=cmd_returns)

    sp = sub.add_parser("sweep", help="exhaustive or randomised sweeps")
    sp.add_argument("--max-n", type=int, default=8)
    sp.add_argument("--check", required=True,
                    choices=("partition", "kneser", "sum-closure", "mean-ergodic", "transfer-probe", "cube-density"))
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--r", type=int, default=2)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="reproduction suites")
    sp.add_argument("suite", help=", ".join(SUITES))
    sp.add_argument("--max-n", type=int)
    sp.add_argument("--depth", type=int)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, ok = args.func(args)
    except UsageError as exc:
        print(f"arbordyn: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"arbordyn: {exc}", file=sys.stderr)
        return 2
    emit(payload, args.format)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
