"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; conftest.py prints them after the run, and
`python tests/test_acceptance.py` runs the criteria directly.
"""

import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from corpus import soundness_configs, soundness_trees  # noqa: E402

from arbordyn import arith, cp, detect, embed, geometry, returns  # noqa: E402
from arbordyn.treespec import (  # noqa: E402
    EventuallyPeriodicSet,
    iter_level,
    make_configuration,
    make_named_tree,
)

RESULTS: dict[int, tuple[bool, str]] = {}

GRID = [(q, r, k) for q in (2, 3, 4) for r in (2, 3) for k in (1, 2, 3, 4) if r <= q]


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    assert ok, f"criterion {n}: {detail}"


def closed_dim(q: int, r: int, k: int) -> float:
    return 1 / k + math.log(r - 1, q) * (1 - 1 / k)


def grid_trees():
    return [((q, r, k), make_named_tree("T_kN", q, r, k=k)) for q, r, k in GRID]


def test_criterion_01_equality_case_reproduction():
    start = time.perf_counter()
    bad = []
    for (q, r, k), tree in grid_trees():
        d = geometry.minkowski_dim(tree).value
        if abs(d - closed_dim(q, r, k)) >= 1e-12:
            bad.append(("dim", q, r, k, d))
        F = make_configuration("F", q, r=r)
        gen = embed.generic_params(tree, F, "upper", 6 * k)
        if gen.params != list(range(0, 6 * k + 1, k)):
            bad.append(("generic", q, r, k, gen.params))
        g = embed.generic_set(tree, F)
        if g != EventuallyPeriodicSet.multiples(k) or arith.densities(g).lower != Fraction(1, k):
            bad.append(("lower density", q, r, k, g.describe()))
    elapsed = time.perf_counter() - start
    record(1, not bad and elapsed < 10, f"{len(GRID)} trees, failures {bad}, {elapsed:.1f}s (limit 10s)")


def test_criterion_02_hausdorff_interval_contains_exact_value():
    start = time.perf_counter()
    bad = []
    for (q, r, k), tree in grid_trees():
        res = geometry.hausdorff_dim(tree, horizon=60, tol=0.02)
        exact = closed_dim(q, r, k)
        if not res.contains(exact):
            bad.append((q, r, k, res.lo, res.hi, exact))
    elapsed = time.perf_counter() - start
    record(2, not bad and elapsed < 60, f"{len(GRID)} trees, misses {bad}, {elapsed:.1f}s (limit 60s)")


def test_criterion_03_sharpness_reproduction():
    tree = make_named_tree("T_eps", 2, 2, k=2, N=4)
    dim = geometry.minkowski_dim(tree).exact
    low = arith.densities(embed.generic_set(tree, make_configuration("F", 2, r=2))).lower
    V = make_configuration("V", 2, r=2, k=2, n=9)
    found = [w for n in range(25) for w, _ in iter_level(tree, n) if embed.appears_at(tree, V, w, 1)]
    ok = dim == Fraction(3, 8) and low == Fraction(1, 2) and low / dim == Fraction(4, 3) and not found
    record(3, ok, f"dim {dim}, lower density {low}, ratio {low / dim}, V^(2,2,9) hits up to depth 24: {len(found)}")


def test_criterion_04_cp_identities():
    rng = random.Random(0)
    chains = {name: cp.build_cp_chain(tau) for name, tau in cp.example_markov_trees().items()}
    bad = []
    worst = 0.0
    for name, chain in chains.items():
        n = len(chain)
        if cp.apply_P(chain, [Fraction(1)] * n) != [Fraction(1)] * n:
            bad.append((name, "P1"))
        ext = cp.endomorphic_extension(chain, 1)
        for _ in range(100):
            f = [rng.uniform(-1, 1) for _ in range(n)]
            g = [rng.uniform(-1, 1) for _ in range(n)]
            adj = abs(cp.inner(chain, cp.apply_P(chain, f), g) - cp.inner(chain, f, cp.apply_S(chain, g)))
            fe = [rng.uniform(-1, 1) for _ in range(len(ext))]
            ge = cp.lift_function(ext, g)
            lhs = cp.apply_P(ext, [a * b for a, b in zip(fe, cp.apply_S(ext, ge))])
            rhs = [a * b for a, b in zip(ge, cp.apply_P(ext, fe))]
            lem = max(abs(a - b) for a, b in zip(lhs, rhs))
            worst = max(worst, adj, lem)
        h = [Fraction(rng.randint(-5, 5)) for _ in range(n)]
        if not cp.project_invariant(chain, h).nonincreasing:
            bad.append((name, "projection norms"))
    ok = len(chains) >= 5 and not bad and worst < 1e-12
    record(4, ok, f"{len(chains)} chains, failures {bad}, worst identity error {worst:.1e} (limit 1e-12)")


def test_criterion_05_detecting_function_identity():
    bad = []
    for name, tau in cp.example_markov_trees().items():
        chain = cp.build_cp_chain(tau)
        for r in range(2, tau.q + 1):
            F = make_configuration("F", tau.q, r=r)
            for m in range(1, 9):
                if detect.evaluate(detect.build_phi(F, m), chain) != detect.closed_form_F(chain, r, m):
                    bad.append((name, "F", r, m))
            D = make_configuration("D", tau.q, r=r, n=2)
            for m in range(1, 5):
                phi = detect.evaluate(detect.build_phi(D, m), chain)
                prime = detect.evaluate(detect.build_phi(D, m, "phi_prime"), chain)
                if phi != [math.factorial(r) * x for x in prime]:
                    bad.append((name, "D", r, m))
    record(5, not bad, f"mismatches {bad}")


def test_criterion_06_detector_soundness():
    start = time.perf_counter()
    checked, bad = 0, []
    for tau in soundness_trees():
        res = detect.corpus_agreement([(tau.automaton, tau)], soundness_configs(tau.q), range(1, 5), depth=9)
        checked += res["checked"]
        bad += res["disagreements"]
    elapsed = time.perf_counter() - start
    record(6, checked > 0 and not bad and elapsed < 120,
           f"{checked} vertex checks, {len(bad)} disagreements, {elapsed:.1f}s (limit 120s)")


def test_criterion_07_equality_case_operator_identities():
    bad = []
    for (q, r, k), tree in grid_trees():
        chain = cp.build_cp_chain(cp.uniform_markov_tree(tree))
        if not detect.equality_case_identities(chain, q, r, k).holds:
            bad.append((q, r, k))
    record(7, not bad, f"{len(GRID)} chains, failures {bad}")


def test_criterion_08_mean_ergodic_bound():
    start = time.perf_counter()
    res = returns.mean_ergodic_sweep(10)
    elapsed = time.perf_counter() - start
    record(8, not res["violations"] and elapsed < 60,
           f"{res['checked']} systems, {len(res['violations'])} violations, {elapsed:.1f}s (limit 60s)")


def test_criterion_09_partition_oracle_and_kneser():
    t12 = returns.partition_sweep(10)
    kn = returns.kneser_sweep(10)
    ok = not t12["counterexamples"] and not kn["violations"]
    record(9, ok, f"partition: {t12['applicable']} equality cases, {len(t12['counterexamples'])} counterexamples; "
                  f"Kneser: {kn['checked']} sets, {len(kn['violations'])} violations")


def test_criterion_10_appendix_suite():
    bad = []
    for n, A, k in [(4, {0}, 4), (6, {0, 3}, 3), (3, {0}, 3), (8, {0, 4}, 4), (10, {0, 5}, 5)]:
        res = returns.verify_appendix(returns.FiniteMPS.rotation(n), A, eta=0)
        if not (res.heavy_holds and res.triple_holds and res.small_delta_k == k):
            bad.append((n, sorted(A)))
    mps, A = returns.nonergodic_fixture()
    res = returns.verify_appendix(mps, A)
    part = returns.verify_thm_partition(mps, A)
    if not (res.heavy_applicable and res.heavy_holds and res.small_delta_k is None and not part.stability_holds):
        bad.append("two-cycle system")
    record(10, not bad, f"failures {bad}")


def test_criterion_11_entropy_convergence():
    worst = 0.0
    for (q, r, k), tree in grid_trees():
        P = len(tree.splitting.period)
        L = len(tree.splitting.preperiod) + 6 * P - 1
        emp = cp.empirical_distribution(tree, L)
        worst = max(worst, abs(emp.entropy - geometry.minkowski_dim(tree).value))
    record(11, worst < 1e-12, f"{len(GRID)} trees, worst error {worst:.1e} (limit 1e-12)")


def summary_lines() -> list[str]:
    return [f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
            except Exception as exc:
                RESULTS[int(name.split("_")[2])] = (False, f"error: {exc!r}")
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
