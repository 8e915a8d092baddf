"""Finite-state Markov trees and their CP chains: P, S, entropy, splitting sets, return times."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from .treespec import (
    AutomatonTree,
    EventuallyPeriodicSet,
    ExplicitTree,
    ProfileTree,
    TreeSpec,
    as_automaton,
    format_word,
    parse_word,
)

LOG_GUARD = 1e-12


def log_q(x: float, q: int) -> float:
    return math.log(x) / math.log(q)


def entropy_q(probs: Iterable, q: int) -> float:
    return 0.0 - sum(float(p) * log_q(float(p), q) for p in probs if p > 0)


# ---------------------------------------------------------------------------
# Markov trees


@dataclass(frozen=True)
class FiniteStateMarkovTree:
    """A Markov tree whose child weights depend only on an automaton state."""

    automaton: AutomatonTree
    prob: tuple  # sorted ((state, (p_0, ..., p_{q-1})), ...)

    def __post_init__(self) -> None:
        table = dict(self.prob) if not isinstance(self.prob, dict) else dict(self.prob)
        q = self.automaton.q
        clean = {}
        for s in self.automaton.reachable_states():
            if s not in table:
                raise ValueError(f"no letter probabilities for reachable state {s!r}")
        for s, vec in table.items():
            vec = tuple(Fraction(x) for x in vec)
            if len(vec) != q:
                raise ValueError(f"state {s!r}: need {q} letter probabilities")
            if any(x < 0 for x in vec) or sum(vec) != 1:
                raise ValueError(f"state {s!r}: probabilities must be nonnegative and sum to 1")
            for a, x in enumerate(vec):
                if x > 0 and a not in self.automaton.letters(s):
                    raise ValueError(f"state {s!r}: letter {a} has weight but no transition")
            clean[s] = vec
        object.__setattr__(self, "prob", tuple(sorted(clean.items(), key=lambda kv: (type(kv[0]).__name__, kv[0]))))
        object.__setattr__(self, "_table", clean)

    @property
    def q(self) -> int:
        return self.automaton.q

    @property
    def root(self):
        return self.automaton.root

    def probs(self, state) -> tuple:
        return self._table[state]

    def support_letters(self, state) -> tuple[int, ...]:
        return tuple(a for a, x in enumerate(self._table[state]) if x > 0)

    def step(self, state, letter: int):
        return self.automaton.step(state, letter)

    def state_of(self, word: Sequence[int]):
        s = self.root
        for a in word:
            s = self.automaton.step(s, a)
        return s

    def weight(self, word: Sequence[int]) -> Fraction:
        """tau(v): product of letter probabilities along v (0 outside the support)."""
        s = self.root
        out = Fraction(1)
        for a in word:
            p = self._table[s][a]
            if p == 0:
                return Fraction(0)
            out *= p
            s = self.automaton.step(s, a)
        return out

    def with_root(self, state) -> "FiniteStateMarkovTree":
        return FiniteStateMarkovTree(self.automaton.with_root(state), self.prob)

    def support_level(self, n: int) -> dict:
        """Map state -> total weight of level-n words of the support ending there."""
        dist = {self.root: Fraction(1)}
        for _ in range(n):
            nxt: dict = {}
            for s, w in dist.items():
                for a in self.support_letters(s):
                    t = self.step(s, a)
                    nxt[t] = nxt.get(t, Fraction(0)) + w * self._table[s][a]
            dist = nxt
        return dist


def uniform_markov_tree(tree: TreeSpec) -> FiniteStateMarkovTree:
    """Each vertex splits its mass equally among its children."""
    aut = as_automaton(tree)
    prob = {}
    for s in aut.reachable_states():
        letters = aut.letters(s)
        prob[s] = tuple(Fraction(1, len(letters)) if a in letters else Fraction(0) for a in range(aut.q))
    return FiniteStateMarkovTree(aut, tuple(prob.items()))


def example_markov_trees() -> dict[str, FiniteStateMarkovTree]:
    """Fixture Markov trees: uniform measures on equality and sharpness trees, a
    nonuniform measure, and a measure with two closed classes."""
    from .treespec import full_tree, make_named_tree

    out = {
        "T2_3N": uniform_markov_tree(make_named_tree("T_kN", 2, 2, k=3)),
        "full2": uniform_markov_tree(full_tree(2)),
        "T_eps": uniform_markov_tree(make_named_tree("T_eps", 2, 2, k=2, N=4)),
        "T4_E2N": uniform_markov_tree(make_named_tree("T_E", 4, 3, E="2N")),
        "T3_2N": uniform_markov_tree(make_named_tree("T_kN", 3, 2, k=2)),
    }
    aut = AutomatonTree(3, ("a", "b", "c"), "a",
                        ((("a", 0), "b"), (("a", 1), "c"), (("a", 2), "b"),
                         (("b", 0), "b"), (("b", 1), "a"), (("c", 0), "a"), (("c", 2), "c")))
    out["skewed3"] = FiniteStateMarkovTree(aut, (("a", (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6))),
                                                 ("b", (Fraction(3, 4), Fraction(1, 4), 0)),
                                                 ("c", (Fraction(2, 5), 0, Fraction(3, 5)))))
    split = AutomatonTree(2, ("r", "x", "y"), "r",
                          ((("r", 0), "x"), (("r", 1), "y"), (("x", 0), "x"), (("x", 1), "x"), (("y", 0), "y")))
    out["two_classes"] = FiniteStateMarkovTree(split, (("r", (Fraction(1, 3), Fraction(2, 3))),
                                                       ("x", (Fraction(1, 2), Fraction(1, 2))),
                                                       ("y", (1, 0))))
    return out


def conditional(tau: FiniteStateMarkovTree, v: Sequence[int]) -> FiniteStateMarkovTree:
    """tau^v(w) = tau(vw) / tau(v); for a finite-state tree only the root moves."""
    v = parse_word(v)
    if tau.weight(v) == 0:
        raise ValueError(f"tau({format_word(v)!r}) = 0")
    return tau.with_root(tau.state_of(v))


@dataclass(frozen=True)
class MetricInterval:
    partial: Fraction
    tail: Fraction

    @property
    def lo(self) -> Fraction:
        return self.partial

    @property
    def hi(self) -> Fraction:
        return self.partial + self.tail


def markov_metric(t1: FiniteStateMarkovTree, t2: FiniteStateMarkovTree, depth: int) -> MetricInterval:
    """Partial sum of q^{-l(v)} |t1(v) - t2(v)| over l(v) <= depth, plus a bound on the rest.

    Level sums of |t1 - t2| never exceed 2, so the tail is at most 2 q^{-depth} / (q - 1).
    """
    if t1.q != t2.q:
        raise ValueError("Markov trees over different alphabets")
    q = t1.q
    total = Fraction(0)
    # frontier of (word weight 1, word weight 2, state 1, state 2); None marks leaving a support
    frontier = [(Fraction(1), Fraction(1), t1.root, t2.root)]
    for level in range(depth + 1):
        scale = Fraction(1, q ** level)
        total += scale * sum(abs(a - b) for a, b, _, _ in frontier)
        if level == depth:
            break
        nxt = []
        for a, b, s1, s2 in frontier:
            for letter in range(q):
                pa = a * t1.probs(s1)[letter] if s1 is not None and a > 0 else Fraction(0)
                pb = b * t2.probs(s2)[letter] if s2 is not None and b > 0 else Fraction(0)
                if pa == 0 and pb == 0:
                    continue
                n1 = t1.step(s1, letter) if pa > 0 else None
                n2 = t2.step(s2, letter) if pb > 0 else None
                nxt.append((pa, pb, n1, n2))
        frontier = nxt
    tail = Fraction(2, q ** depth * (q - 1))
    return MetricInterval(total, tail)


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals (square, nonsingular)."""
    n = len(matrix)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular system")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def _stationary_on_class(kernel: list[dict], members: list[int]) -> dict[int, Fraction]:
    """Solve pi K = pi on a closed class, replacing one balance equation by normalization."""
    idx = {s: i for i, s in enumerate(members)}
    n = len(members)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for s in members:
        for t, p in kernel[s].items():
            rows[idx[t]][idx[s]] += p
    for i in range(n):
        rows[i][i] -= 1
    rows[-1] = [Fraction(1)] * n
    rhs = [Fraction(0)] * (n - 1) + [Fraction(1)]
    sol = solve_exact(rows, rhs)
    return {s: sol[idx[s]] for s in members}


def _cyclic_phase(kernel: list[dict], members: list[int]) -> tuple[int, dict[int, int]]:
    """Period of a closed class and the phase of each member."""
    member_set = set(members)
    level = {members[0]: 0}
    queue = [members[0]]
    while queue:
        s = queue.pop(0)
        for t in kernel[s]:
            if t in member_set and t not in level:
                level[t] = level[s] + 1
                queue.append(t)
    d = 0
    for s in members:
        for t in kernel[s]:
            if t in member_set:
                d = math.gcd(d, level[s] + 1 - level[t])
    d = abs(d) or 1
    return d, {s: level[s] % d for s in members}


# ---------------------------------------------------------------------------
# CP chain


@dataclass
class CPChain:
    """Finite Markov chain on (label, automaton state) pairs, or on windows of them.

    `kernel[i]` maps target index -> probability; `stationary` is the Cesaro limit of the
    law started from the root's children, i.e. the mixture of the per-class stationary
    distributions weighted by absorption probabilities.
    """

    q: int
    states: list
    labels: list[int]
    letter_probs: list[tuple]
    kernel: list[dict]
    initial: dict
    classes: list[list[int]] = field(default_factory=list)
    class_stationary: list[dict] = field(default_factory=list)
    absorption: list[list[Fraction]] = field(default_factory=list)
    stationary: list[Fraction] = field(default_factory=list)
    tree: FiniteStateMarkovTree | None = None
    base: "CPChain | None" = None

    def __post_init__(self) -> None:
        for row in self.kernel:
            if sum(row.values()) != 1:
                raise ValueError("kernel rows must sum to 1")
        self._analyse()

    def __len__(self) -> int:
        return len(self.states)

    def _analyse(self) -> None:
        n = len(self.states)
        graph = nx.DiGraph()
        graph.add_nodes_from(range(n))
        for s, row in enumerate(self.kernel):
            graph.add_edges_from((s, t) for t, p in row.items() if p > 0)
        cond = nx.condensation(graph)
        closed = [sorted(cond.nodes[c]["members"]) for c in cond.nodes if cond.out_degree(c) == 0]
        closed.sort()
        self.classes = closed
        self.class_stationary = [_stationary_on_class(self.kernel, c) for c in closed]
        in_class = {s: ci for ci, c in enumerate(closed) for s in c}
        transient = [s for s in range(n) if s not in in_class]
        absorption = [[Fraction(0)] * len(closed) for _ in range(n)]
        for s, ci in in_class.items():
            absorption[s][ci] = Fraction(1)
        if transient:
            tidx = {s: i for i, s in enumerate(transient)}
            m = len(transient)
            mat = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
            for s in transient:
                for t, p in self.kernel[s].items():
                    if t in tidx:
                        mat[tidx[s]][tidx[t]] -= p
            for ci in range(len(closed)):
                rhs = [sum((p for t, p in self.kernel[s].items() if in_class.get(t) == ci), Fraction(0)) for s in transient]
                sol = solve_exact(mat, rhs)
                for s in transient:
                    absorption[s][ci] = sol[tidx[s]]
        self.absorption = absorption
        weights = [sum((self.initial.get(s, Fraction(0)) * absorption[s][ci] for s in range(n)), Fraction(0))
                   for ci in range(len(closed))]
        self.class_weights = weights
        pi = [Fraction(0)] * n
        for ci, dist in enumerate(self.class_stationary):
            for s, p in dist.items():
                pi[s] += weights[ci] * p
        self.stationary = pi

    # convenience
    def index(self, state) -> int:
        return self.states.index(state)

    def mixture(self, weights: Sequence) -> list[Fraction]:
        """Stationary distribution with the given weight on each closed class."""
        pi = [Fraction(0)] * len(self.states)
        for w, dist in zip(weights, self.class_stationary):
            for s, p in dist.items():
                pi[s] += Fraction(w) * p
        return pi

    def automaton_state(self, i: int):
        st = self.states[i]
        return st[-1][1] if self.base is not None else st[1]

    def is_ergodic(self) -> bool:
        return len(self.classes) == 1

    def n_children(self, i: int) -> int:
        return sum(1 for x in self.letter_probs[i] if x > 0)

    def state_marginal(self) -> dict:
        """Stationary mass aggregated by automaton state (labels forgotten)."""
        out: dict = {}
        for i, p in enumerate(self.stationary):
            key = self.automaton_state(i)
            out[key] = out.get(key, Fraction(0)) + p
        return out


def _state_sort_key(st) -> tuple:
    label, s = st
    return (type(s).__name__, s, label)


def build_cp_chain(tau: FiniteStateMarkovTree) -> CPChain:
    """States are the reachable (label, state) pairs; a move picks child letter b with prob p_s(b)."""
    initial_pairs = {}
    for a in tau.support_letters(tau.root):
        initial_pairs[(a, tau.step(tau.root, a))] = tau.probs(tau.root)[a]
    seen = set(initial_pairs)
    queue = list(initial_pairs)
    while queue:
        label, s = queue.pop()
        for b in tau.support_letters(s):
            nxt = (b, tau.step(s, b))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    states = sorted(seen, key=_state_sort_key)
    index = {st: i for i, st in enumerate(states)}
    kernel = []
    for label, s in states:
        row: dict = {}
        for b in tau.support_letters(s):
            t = index[(b, tau.step(s, b))]
            row[t] = row.get(t, Fraction(0)) + tau.probs(s)[b]
        kernel.append(row)
    initial = {index[st]: p for st, p in initial_pairs.items()}
    return CPChain(
        q=tau.q,
        states=states,
        labels=[st[0] for st in states],
        letter_probs=[tau.probs(st[1]) for st in states],
        kernel=kernel,
        initial=initial,
        tree=tau,
    )


def endomorphic_extension(chain: CPChain, order: int = 1) -> CPChain:
    """Chain on stationary windows (x_{-order}, ..., x_0) of the base chain.

    The shift S drops x_0; a function that ignores the oldest coordinate x_{-order}
    is shifted exactly by the time-reversed kernel of this chain.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    pi = chain.stationary
    windows = [((s,), pi[s]) for s in range(len(chain)) if pi[s] > 0]
    for _ in range(order):
        nxt = []
        for w, p in windows:
            for t, k in chain.kernel[w[-1]].items():
                if k > 0:
                    nxt.append((w + (t,), p * k))
        windows = nxt
    states = sorted(w for w, _ in windows)
    mass = dict(windows)
    index = {w: i for i, w in enumerate(states)}
    kernel = []
    for w in states:
        row = {}
        for t, k in chain.kernel[w[-1]].items():
            if k > 0:
                row[index[w[1:] + (t,)]] = k
        kernel.append(row)
    ext = CPChain(
        q=chain.q,
        states=[tuple(chain.states[i] for i in w) for w in states],
        labels=[chain.labels[w[-1]] for w in states],
        letter_probs=[chain.letter_probs[w[-1]] for w in states],
        kernel=kernel,
        initial={index[w]: mass[w] for w in states},
        tree=chain.tree,
        base=chain,
    )
    ext.window_indices = states
    return ext


def lift_function(ext: CPChain, f: Sequence, lag: int = 0) -> list:
    """Function on windows given by f(x_{-lag}) for a base-chain state function f."""
    return [f[w[-1 - lag]] for w in ext.window_indices]


# ---------------------------------------------------------------------------
# operators


StateFunction = list


def indicator(chain: CPChain, pred) -> StateFunction:
    return [Fraction(1) if pred(i) else Fraction(0) for i in range(len(chain))]


def indicator_A(chain: CPChain, r: int, delta: Fraction | None = None) -> StateFunction:
    """1 on states with at least r letters of probability > delta (delta = 0 when omitted)."""
    thr = Fraction(0) if delta is None else Fraction(delta)
    return indicator(chain, lambda i: sum(1 for x in chain.letter_probs[i] if x > thr) >= r)


def indicator_B(chain: CPChain, letter: int) -> StateFunction:
    return indicator(chain, lambda i: chain.labels[i] == letter)


def apply_P(chain: CPChain, f: Sequence) -> StateFunction:
    """(Pf)(s) = sum_t K(s, t) f(t)."""
    return [sum((p * f[t] for t, p in row.items()), 0 * f[0] if f else 0) for row in chain.kernel]


def apply_P_power(chain: CPChain, f: Sequence, n: int) -> StateFunction:
    out = list(f)
    for _ in range(n):
        out = apply_P(chain, out)
    return out


def apply_S(chain: CPChain, f: Sequence, measure: Sequence | None = None) -> StateFunction:
    """Time-reversed kernel: (Sf)(t) = sum_s pi(s) K(s, t) f(s) / pi(t); 0 where pi(t) = 0."""
    pi = chain.stationary if measure is None else measure
    num = [0 * f[0] for _ in range(len(chain))] if f else []
    for s, row in enumerate(chain.kernel):
        if pi[s] == 0:
            continue
        for t, p in row.items():
            num[t] += pi[s] * p * f[s]
    return [num[t] / pi[t] if pi[t] != 0 else 0 * num[t] for t in range(len(chain))]


def inner(chain: CPChain, f: Sequence, g: Sequence, measure: Sequence | None = None):
    pi = chain.stationary if measure is None else measure
    return sum((p * a * b for p, a, b in zip(pi, f, g) if p != 0), 0 * f[0])


def norm(chain: CPChain, f: Sequence, measure: Sequence | None = None) -> float:
    return math.sqrt(float(inner(chain, f, f, measure)))


@dataclass
class ProjectionResult:
    projection: list
    norms: list[float]
    nonincreasing: bool


def project_invariant(chain: CPChain, f: Sequence, n_max: int = 20) -> ProjectionResult:
    """Conditional expectation onto the invariant functions.

    On each closed class the value is the class average of f under its stationary law;
    on transient states it is the absorption-weighted average of the class values, so
    the result is P-fixed everywhere. Also returns ||P^n f - P^n fbar|| for n <= n_max.
    """
    zero = 0 * f[0]
    averages = [sum((p * f[s] for s, p in dist.items()), zero) for dist in chain.class_stationary]
    proj = [sum((h * a for h, a in zip(chain.absorption[s], averages)), zero) for s in range(len(chain))]
    norms = _decay_norms(chain, f, proj, n_max)
    return ProjectionResult(proj, norms, all(b <= a + 1e-12 for a, b in zip(norms, norms[1:])))


def project_tail(chain: CPChain, f: Sequence, n_max: int = 20) -> ProjectionResult:
    """Average of f over each cyclic subclass of each closed class (transient states get 0).

    This is the finite-chain analogue of the projection onto the tail algebra: P and S act
    on such functions as mutually inverse phase rotations.
    """
    zero = 0 * f[0]
    proj = [zero for _ in range(len(chain))]
    for cls, dist in zip(chain.classes, chain.class_stationary):
        d, phase = _cyclic_phase(chain.kernel, cls)
        for ph in range(d):
            members = [s for s in cls if phase[s] == ph]
            mass = sum(dist[s] for s in members)
            avg = sum((dist[s] * f[s] for s in members), zero) / mass
            for s in members:
                proj[s] = avg
    norms = _decay_norms(chain, f, proj, n_max)
    return ProjectionResult(proj, norms, all(b <= a + 1e-12 for a, b in zip(norms, norms[1:])))


def _decay_norms(chain: CPChain, f: Sequence, proj: Sequence, n_max: int) -> list[float]:
    diff = [a - b for a, b in zip(f, proj)]
    out = []
    for _ in range(n_max + 1):
        out.append(norm(chain, diff))
        diff = apply_P(chain, diff)
    return out


def cyclic_phases(chain: CPChain) -> list[tuple[int, dict]]:
    return [_cyclic_phase(chain.kernel, c) for c in chain.classes]


# ---------------------------------------------------------------------------
# entropy and splitting


@dataclass
class EntropyReport:
    per_state: list[float]
    total: float


def info_and_entropy(chain: CPChain) -> EntropyReport:
    per = []
    for i, probs in enumerate(chain.letter_probs):
        h = entropy_q(probs, chain.q)
        cap = log_q(chain.n_children(i), chain.q)
        if not -LOG_GUARD <= h <= cap + LOG_GUARD:
            raise AssertionError(f"information bound violated at state {chain.states[i]!r}")
        per.append(h)
    total = sum(float(p) * h for p, h in zip(chain.stationary, per))
    return EntropyReport(per, total)


@dataclass
class SplittingReport:
    r: int
    measure: Fraction
    bound: float
    holds: bool
    equality: bool


def measure_of_splitting(chain: CPChain, r: int) -> SplittingReport:
    """nu(A_r) and the entropy lower bound (H - log_q(r-1)) / (1 - log_q(r-1))."""
    if not 2 <= r <= chain.q:
        raise ValueError("need 2 <= r <= q")
    ind = indicator_A(chain, r)
    nu = sum((p for p, x in zip(chain.stationary, ind) if x), Fraction(0))
    h = info_and_entropy(chain).total
    lg = log_q(r - 1, chain.q)
    bound = (h - lg) / (1 - lg)
    return SplittingReport(r, nu, bound, float(nu) >= bound - 1e-9, abs(float(nu) - bound) < 1e-9)


# ---------------------------------------------------------------------------
# empirical distributions along the tree


@dataclass
class EmpiricalDistribution:
    level: int
    weights: dict
    entropy: float


def empirical_distribution(tree: TreeSpec, L: int) -> EmpiricalDistribution:
    """(1/(L+1)) sum_{l(v) <= L} pi(v) delta_{state(v)} with pi uniform on T(L).

    pi(v) is the share of level-L vertices below v. Vertices at level L split
    their mass uniformly among their tree children.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    q = tree.q
    if isinstance(tree, ExplicitTree) and L > tree.depth:
        raise ValueError(f"L = {L} exceeds the truncation depth {tree.depth}")
    # below[(state, remaining)] = number of level-L descendants
    memo: dict = {}

    def below(state, remaining: int) -> int:
        if remaining == 0:
            return 1
        key = (tree.state_key(state), remaining) if not isinstance(tree, ProfileTree) else (state, remaining)
        if key not in memo:
            memo[key] = sum(below(tree.step(state, a), remaining - 1) for a in tree.letters(state))
        return memo[key]

    weights: dict = {}
    ent = 0.0
    frontier = {tree.root_state: Fraction(1)}
    for level in range(L + 1):
        nxt: dict = {}
        for s, mass in frontier.items():
            key = tree.state_key(s)
            weights[key] = weights.get(key, Fraction(0)) + mass / (L + 1)
            letters = tree.letters(s)
            if level < L:
                counts = [below(tree.step(s, a), L - level - 1) for a in letters]
                tot = sum(counts)
                child_probs = [Fraction(c, tot) for c in counts]
            else:
                child_probs = [Fraction(1, len(letters))] * len(letters) if letters else []
            ent += float(mass) / (L + 1) * entropy_q(child_probs, q)
            if level < L:
                for a, p in zip(letters, child_probs):
                    t = tree.step(s, a)
                    nxt[t] = nxt.get(t, Fraction(0)) + mass * p
        frontier = nxt
    return EmpiricalDistribution(L, weights, ent)


# ---------------------------------------------------------------------------
# return times


@dataclass
class ReturnTimes:
    correlations: list[Fraction]
    returns: EventuallyPeriodicSet
    measure_A: Fraction


def return_times(chain: CPChain, A: Iterable[int], n_max: int = 32, measure: Sequence | None = None) -> ReturnTimes:
    """nu(A ∩ S^{-n} A) = sum_{s, t in A} pi(s) K^n(s, t) for n <= n_max, and the exact set R.

    R is read off the support of the row vector pi|_A K^n; supports are subsets of a
    finite set, so the sequence is eventually periodic and the first repeat fixes R.
    """
    pi = chain.stationary if measure is None else list(measure)
    A = set(A)
    row = [pi[s] if s in A else Fraction(0) for s in range(len(chain))]
    nu_A = sum(row, Fraction(0))
    corr = []
    cur = row
    for _ in range(n_max + 1):
        corr.append(sum((cur[t] for t in A), Fraction(0)))
        nxt = [Fraction(0)] * len(chain)
        for s, v in enumerate(cur):
            if v:
                for t, p in chain.kernel[s].items():
                    nxt[t] += v * p
        cur = nxt
    support = frozenset(s for s in A if pi[s] > 0)
    seen: dict = {}
    hits: list[bool] = []
    n = 0
    while support not in seen:
        seen[support] = n
        hits.append(bool(support & A))
        support = frozenset(t for s in support for t, p in chain.kernel[s].items() if p > 0)
        n += 1
    start = seen[support]
    returns = EventuallyPeriodicSet(tuple(hits[:start]), tuple(hits[start:]))
    return ReturnTimes(corr, returns, nu_A)
