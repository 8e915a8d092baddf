"""Minkowski and Hausdorff dimensions of trees, vertex-set densities, Markov-tree dimension."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import networkx as nx

from . import arith
from .cp import FiniteStateMarkovTree, _stationary_on_class, entropy_q, log_q
from .treespec import (
    AutomatonTree,
    EventuallyPeriodicSet,
    ExplicitTree,
    ProfileTree,
    TreeSpec,
    Word,
    format_word,
    level_count,
    parse_word,
)

POWER_TOL = 1e-12
POWER_CAP = 10_000


def integer_root(n: int) -> tuple[int, int]:
    """Write n = b**e with b not a perfect power."""
    if n < 2:
        return n, 1
    for e in range(int(math.log2(n)), 1, -1):
        b = round(n ** (1.0 / e))
        for cand in (b - 1, b, b + 1):
            if cand > 1 and cand ** e == n:
                inner, e2 = integer_root(cand)
                return inner, e * e2
    return n, 1


def exact_log(q: int, value: int) -> Fraction | None:
    """log_q(value) when it is rational, else None."""
    if value < 1:
        raise ValueError("value must be positive")
    if value == 1:
        return Fraction(0)
    b, e = integer_root(q)
    f = 0
    v = value
    while v % b == 0:
        v //= b
        f += 1
    return Fraction(f, e) if v == 1 else None


@dataclass
class DimensionResult:
    value: float
    exact: Fraction | None
    mode: str
    certificate: dict = field(default_factory=dict)


def perron_eigenvalue(matrix: list[list[int]]) -> tuple[float, int, float]:
    """Power iteration on M + I from the all-ones vector.

    The shift makes an irreducible matrix primitive, so the iteration converges
    even when M is periodic; returns (eigenvalue of M, iterations, residual).
    """
    n = len(matrix)
    x = [1.0] * n
    lam = 0.0
    resid = math.inf
    prev = None
    for it in range(1, POWER_CAP + 1):
        y = [sum(matrix[i][j] * x[j] for j in range(n)) + x[i] for i in range(n)]
        scale = max(y)
        y = [v / scale for v in y]
        mx = [sum(matrix[i][j] * y[j] for j in range(n)) for i in range(n)]
        lam = sum(mx) / sum(y)
        resid = max(abs(mx[i] - lam * y[i]) for i in range(n))
        if resid < POWER_TOL:
            return lam, it, resid
        if prev is not None and it % 2 == 0:
            # average two iterates to damp a residual two-cycle
            y = [(a + b) / 2 for a, b in zip(y, prev)]
        prev = x
        x = y
    return lam, POWER_CAP, resid


def _rational_log_of_algebraic(q: int, lam: float, max_power: int) -> Fraction | None:
    """Recognise lam = q^(a/b) when lam^d is an integer for some small d."""
    for d in range(1, max_power + 1):
        val = lam ** d
        near = round(val)
        if near >= 1 and abs(val - near) <= 1e-9 * max(1.0, val):
            lg = exact_log(q, near)
            if lg is not None:
                return lg / d
    return None


def letter_count_matrix(tree: AutomatonTree, states: Sequence) -> list[list[int]]:
    idx = {s: i for i, s in enumerate(states)}
    mat = [[0] * len(states) for _ in states]
    for s in states:
        for a in tree.letters(s):
            mat[idx[s]][idx[tree.step(s, a)]] += 1
    return mat


def minkowski_dim(tree: TreeSpec, mode: str = "exact", depth: int = 60) -> DimensionResult:
    """Upper Minkowski dimension limsup log_q|T(n)| / n.

    exact: profile trees use the period average of log_q s(j); strongly connected
    automata use log_q of the Perron eigenvalue of the letter-count matrix.
    estimate: max over n in [depth/2, depth] of log_q|T(n)| / n.
    """
    q = tree.q
    if mode == "estimate":
        if isinstance(tree, ExplicitTree):
            depth = min(depth, tree.depth)
        seq = [(n, log_q(level_count(tree, n), q) / n) for n in range(max(1, depth // 2), depth + 1)]
        return DimensionResult(max(v for _, v in seq), None, "estimate", {"sequence": seq})
    if mode != "exact":
        raise ValueError("mode must be 'exact' or 'estimate'")
    if isinstance(tree, ProfileTree):
        per = tree.splitting.period
        product = math.prod(per)
        lg = exact_log(q, product)
        value = sum(log_q(s, q) for s in per) / len(per)
        exact = lg / len(per) if lg is not None else None
        return DimensionResult(value, exact, "exact",
                               {"period": list(per), "period_product": product, "period_length": len(per)})
    if isinstance(tree, AutomatonTree):
        states = tree.reachable_states()
        graph = nx.DiGraph()
        graph.add_nodes_from(states)
        graph.add_edges_from((s, tree.step(s, a)) for s in states for a in tree.letters(s))
        if not nx.is_strongly_connected(graph):
            raise ValueError("automaton is not strongly connected; use estimate mode (--depth N)")
        mat = letter_count_matrix(tree, states)
        lam, iters, resid = perron_eigenvalue(mat)
        value = log_q(lam, q)
        exact = _rational_log_of_algebraic(q, lam, 4 * len(states))
        if exact is not None and abs(float(exact) - value) > 1e-9:
            exact = None
        return DimensionResult(value, exact, "exact",
                               {"perron": lam, "iterations": iters, "residual": resid, "states": len(states)})
    raise ValueError("exact mode needs a profile tree or a strongly connected automaton; use estimate mode")


# ---------------------------------------------------------------------------
# sections


@dataclass
class SectionResult:
    value: float
    cut: dict  # (node key, level) -> True when the optimal section cuts there
    section: list[Word] | None  # explicit antichain when small enough


def section_value(tree: TreeSpec, lam: float, floor: int, horizon: int, list_limit: int = 4096) -> SectionResult:
    """min over sections with every cut level >= floor and all cuts <= horizon of sum q^{-lam l(v)}.

    g(v) = min(q^{-lam l(v)} if l(v) >= floor, sum of g over children), g = q^{-lam N} at level N.
    Vertices sharing a node state and level have equal g, so the DP runs over those pairs.
    """
    if floor > horizon:
        raise ValueError("cut floor exceeds horizon")
    if isinstance(tree, ExplicitTree) and horizon > tree.depth:
        raise ValueError("horizon exceeds the truncation depth")
    q = tree.q
    memo: dict = {}
    cut: dict = {}

    def key(state, level):
        return (tree.state_key(state), level) if not isinstance(tree, ProfileTree) else (state, level)

    def g(state, level: int) -> float:
        k = key(state, level)
        if k in memo:
            return memo[k]
        here = q ** (-lam * level)
        if level >= horizon:
            val = here
            cut[k] = True
        else:
            below = sum(g(tree.step(state, a), level + 1) for a in tree.letters(state))
            if level >= floor and here <= below:
                val = here
                cut[k] = True
            else:
                val = below
                cut[k] = False
        memo[k] = val
        return val

    # iterate levels bottom-up implicitly; recursion depth is at most horizon
    value = g(tree.root_state, 0)
    section: list[Word] | None = []

    def collect(word: Word, state, level: int) -> None:
        nonlocal section
        if section is None:
            return
        if cut[key(state, level)]:
            section.append(word)
            if len(section) > list_limit:
                section = None
            return
        for a in tree.letters(state):
            collect(word + (a,), tree.step(state, a), level + 1)

    collect((), tree.root_state, 0)
    return SectionResult(value, cut, section)


@dataclass
class HausdorffResult:
    lo: float
    hi: float
    exact: Fraction | float | None
    exact_flag: bool
    floor: int
    horizon: int

    def contains(self, x: float) -> bool:
        return self.lo - 1e-12 <= x <= self.hi + 1e-12


def balanced_start_level(tree: ProfileTree) -> int:
    """A level s past the preperiod from which every prefix of the splitting profile
    has log-average at least the dimension (cycle lemma: start after the minimum of
    the centred partial sums over one period). The subtree at level s is a scaled piece
    of T with the same Hausdorff dimension, and uniform cuts of it at depth n give
    log_q|T^v(n)| / n >= dim with equality at whole periods.
    """
    p, per = len(tree.splitting.preperiod), tree.splitting.period
    logs = [log_q(s, tree.q) for s in per]
    mean = sum(logs) / len(logs)
    acc, best, arg = 0.0, 0.0, 0
    for i, x in enumerate(logs):
        acc += x - mean
        if acc < best - 1e-12:
            best, arg = acc, i + 1
    return p + arg % len(per)


def hausdorff_dim(tree: TreeSpec, floor: int | None = None, horizon: int = 60, tol: float = 0.02,
                  guard: float = 1e-12) -> HausdorffResult:
    """Bisection for the exponent where the optimal section value drops below 1.

    Invariant: section_value(lo) >= 1 - guard > section_value(hi). The default floor
    is 3 * horizon // 4: a finite horizon biases the crossing low by roughly
    (splitting deficit) / floor, so cuts are kept as deep as the horizon allows.
    Profile trees are first replaced by the subtree at balanced_start_level, which has
    the same dimension and no deficit; the self-similar value (equal to the exact
    Minkowski dimension) is attached with exact_flag set.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    floor = 3 * horizon // 4 if floor is None else floor
    work = tree
    if isinstance(tree, ProfileTree):
        work = ProfileTree(tree.q, tree.splitting.shift(balanced_start_level(tree)))
    lo, hi = 0.0, 1.0
    if section_value(work, hi, floor, horizon).value >= 1 - guard:
        lo = hi
    elif section_value(work, lo, floor, horizon).value < 1 - guard:
        hi = lo
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if section_value(work, mid, floor, horizon).value >= 1 - guard:
            lo = mid
        else:
            hi = mid
    exact = None
    flag = False
    if isinstance(tree, ProfileTree):
        res = minkowski_dim(tree, "exact")
        exact = res.exact if res.exact is not None else res.value
        flag = True
    return HausdorffResult(lo, hi, exact, flag, floor, horizon)


# ---------------------------------------------------------------------------
# vertex predicates and densities


@dataclass(frozen=True)
class VertexPredicate:
    """kind "level" (set of levels), "state" (node-state keys) or "words" (explicit vertices)."""

    kind: str
    levels: EventuallyPeriodicSet | None = None
    states: frozenset = frozenset()
    words: frozenset = frozenset()

    def __post_init__(self) -> None:
        if self.kind not in ("level", "state", "words"):
            raise ValueError(f"unknown predicate kind {self.kind!r}")
        if self.kind == "level" and self.levels is None:
            raise ValueError("level predicate needs a level set")
        if self.kind == "words":
            object.__setattr__(self, "words", frozenset(parse_word(w) for w in self.words))

    def holds(self, word: Word, key) -> bool:
        if self.kind == "level":
            return len(word) in self.levels
        if self.kind == "state":
            return key in self.states
        return word in self.words

    @classmethod
    def level(cls, levels: EventuallyPeriodicSet) -> "VertexPredicate":
        return cls("level", levels=levels)

    @classmethod
    def state(cls, states) -> "VertexPredicate":
        return cls("state", states=frozenset(states))

    @classmethod
    def explicit(cls, words) -> "VertexPredicate":
        return cls("words", words=frozenset(words))

    @classmethod
    def everything(cls) -> "VertexPredicate":
        return cls.level(EventuallyPeriodicSet.everything())

    @classmethod
    def nothing(cls) -> "VertexPredicate":
        return cls.level(EventuallyPeriodicSet.empty())


@dataclass
class DensityEstimate:
    value: Fraction
    mode: str
    sequence: list[Fraction] = field(default_factory=list)


def ancestor_density_sequence(tree: TreeSpec, pred: VertexPredicate, depth: int) -> list[Fraction]:
    """(1/|T(n)|) sum_{v in T(n)} |V ∩ ancestors(v)| / (n+1) for n = 0..depth (ancestors include v)."""
    if isinstance(tree, ExplicitTree) and depth > tree.depth:
        raise ValueError("depth exceeds the truncation")
    by_word = pred.kind == "words"
    # node -> (number of vertices, total ancestor count); node is (word, state) or state
    root = tree.root_state
    start = ((), root) if by_word else root
    hit = int(pred.holds((), tree.state_key(root)))
    layer = {start: (1, hit)}
    out = []
    for n in range(depth + 1):
        verts = sum(c for c, _ in layer.values())
        anc = sum(a for _, a in layer.values())
        out.append(Fraction(anc, verts * (n + 1)))
        if n == depth:
            break
        nxt: dict = {}
        for node, (cnt, acc) in layer.items():
            word, s = node if by_word else ((0,) * n, node)
            for a in tree.letters(s):
                t = tree.step(s, a)
                child_word = word + (a,)
                h = int(pred.holds(child_word, tree.state_key(t)))
                child = (child_word, t) if by_word else t
                c0, a0 = nxt.get(child, (0, 0))
                nxt[child] = (c0 + cnt, a0 + acc + h * cnt)
        layer = nxt
    return out


def upper_density(tree: TreeSpec, pred: VertexPredicate, mode: str = "exact", depth: int = 60) -> DensityEstimate:
    """Upper density of a vertex set: exact for level predicates on profile trees, else the depth-n average."""
    if mode == "exact":
        if not (isinstance(tree, ProfileTree) and pred.kind == "level"):
            raise ValueError("exact mode needs a profile tree with a level predicate")
        return DensityEstimate(arith.densities(pred.levels).upper, "exact")
    if mode != "estimate":
        raise ValueError("mode must be 'exact' or 'estimate'")
    seq = ancestor_density_sequence(tree, pred, depth)
    return DensityEstimate(seq[-1], "estimate", seq)


@dataclass
class WitnessResult:
    value: Fraction
    best_vertex: Word
    values: dict


def window_average(tau: FiniteStateMarkovTree, pred: VertexPredicate, v: Sequence[int], n: int) -> Fraction:
    """(1/(n+1)) sum_{l(w) <= n} tau^v(w) 1_V(vw)."""
    v = parse_word(v)
    if tau.weight(v) == 0:
        raise ValueError(f"vertex {format_word(v)!r} is outside the support of tau")
    s0 = tau.state_of(v)
    by_word = pred.kind == "words"
    layer = {((v, s0) if by_word else s0): Fraction(1)}
    total = Fraction(0)
    for j in range(n + 1):
        for node, mass in layer.items():
            word, s = node if by_word else (v + (0,) * j, node)
            if pred.holds(word, s):
                total += mass
        if j == n:
            break
        nxt: dict = {}
        for node, mass in layer.items():
            word, s = node if by_word else (None, node)
            for a in tau.support_letters(s):
                t = tau.step(s, a)
                child = (word + (a,), t) if by_word else t
                nxt[child] = nxt.get(child, Fraction(0)) + mass * tau.probs(s)[a]
        layer = nxt
    return total / (n + 1)


def banach_density_witness(tau: FiniteStateMarkovTree, pred: VertexPredicate, vertices: Sequence, n: int,
                           check_dimension: bool = True) -> WitnessResult:
    """Best window average over the supplied vertices: a certified lower bound for d*_T(V).

    Level predicates are read off word length, which for a profile-derived automaton is the tree level.
    """
    if check_dimension and markov_dim(tau, 64).value <= 0:
        raise ValueError("witness measures need positive dimension")
    vals = {}
    for v in vertices:
        w = parse_word(v)
        vals[w] = window_average(tau, pred, w, n)
    best = max(vals, key=lambda w: (vals[w], [-len(w)] + [-a for a in w]))
    return WitnessResult(vals[best], best, vals)


# ---------------------------------------------------------------------------
# dimension of a Markov tree


@dataclass
class MarkovDimResult:
    value: float
    exact_rate: float | None
    exact_flag: bool
    sequence: list[float]


def markov_dim(tau: FiniteStateMarkovTree, horizon: int = 64) -> MarkovDimResult:
    """H_n / n along level sections; exact entropy rate when one closed class is reachable."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    q = tau.q
    states = tau.automaton.reachable_states()
    h_state = {s: entropy_q(tau.probs(s), q) for s in states}
    dist = {tau.root: Fraction(1)}
    acc = 0.0
    seq = []
    for n in range(1, horizon + 1):
        acc += sum(float(p) * h_state[s] for s, p in dist.items())
        seq.append(acc / n)
        nxt: dict = {}
        for s, p in dist.items():
            for a in tau.support_letters(s):
                t = tau.step(s, a)
                nxt[t] = nxt.get(t, Fraction(0)) + p * tau.probs(s)[a]
        dist = nxt
    tail = seq[len(seq) // 2:]
    # exact rate via the stationary law of the automaton-state chain
    idx = {s: i for i, s in enumerate(states)}
    kernel = [dict() for _ in states]
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(states)))
    for s in states:
        for a in tau.support_letters(s):
            t = idx[tau.step(s, a)]
            kernel[idx[s]][t] = kernel[idx[s]].get(t, Fraction(0)) + tau.probs(s)[a]
            graph.add_edge(idx[s], t)
    reach = nx.descendants(graph, idx[tau.root]) | {idx[tau.root]}
    sub = graph.subgraph(reach)
    cond = nx.condensation(sub)
    closed = [sorted(cond.nodes[c]["members"]) for c in cond.nodes if cond.out_degree(c) == 0]
    rate = None
    if len(closed) == 1:
        pi = _stationary_on_class(kernel, closed[0])
        rate = sum(float(p) * h_state[states[i]] for i, p in pi.items())
    return MarkovDimResult(min(tail), rate, rate is not None, seq)
