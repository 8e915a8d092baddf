"""Configuration-detecting functions on CP chains.

Expressions are built once per configuration shape and evaluated exactly on a
chain. Three families are provided:
  varphi     sum over letter subsets I and bijections I -> C(1) of
             prod_i P(1_{B_i} P^{m-1} varphi(C^{beta(i)})), base 1 for {()}
  phi        1_{A_n} times the same sum restricted to branching children;
             nonbranching configurations give 1
  phi_prime  R_{n,m} f = sum_{|I|=n} prod_i P(1_{B_i} P^{m-1} f) applied to the
             common child detector; 1_{A_n} when every child is a path
A threshold delta replaces 1_{A_n} by the indicator of "at least n letters of
probability > delta".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .cp import CPChain, build_cp_chain, uniform_markov_tree
from .embed import brute_force_oracle
from .treespec import Configuration, ExplicitTree, TreeSpec, make_configuration, truncate, tree_depth


# ---------------------------------------------------------------------------
# expression nodes (compared by identity; shared subexpressions are reused)


class Expr:
    __slots__ = ()


@dataclass(eq=False)
class Const(Expr):
    value: Fraction


@dataclass(eq=False)
class IndA(Expr):
    r: int
    delta: Fraction | None = None


@dataclass(eq=False)
class IndB(Expr):
    letter: int


@dataclass(eq=False)
class Prod(Expr):
    terms: tuple


@dataclass(eq=False)
class Sum(Expr):
    terms: tuple


@dataclass(eq=False)
class Pow(Expr):
    power: int
    inner: Expr


ONE = Const(Fraction(1))


def _branch_term(letter: int, m: int, f: Expr) -> Expr:
    """P(1_{B_i} P^{m-1} f)."""
    inner = f if m == 1 else Pow(m - 1, f)
    return Pow(1, Prod((IndB(letter), inner)))


def _shape_table(config: Configuration) -> tuple[int, dict[int, tuple[int, ...]]]:
    """Intern subconfiguration shapes: id -> sorted tuple of child ids."""
    kids: dict = {}
    for w in config.words:
        if w:
            kids.setdefault(w[:-1], []).append(w)
    intern: dict = {}
    table: dict = {}
    node_id: dict = {}
    for w in sorted(config.words, key=len, reverse=True):
        key = tuple(sorted(node_id[c] for c in kids.get(w, ())))
        if key not in intern:
            intern[key] = len(intern)
            table[intern[key]] = key
        node_id[w] = intern[key]
    return node_id[()], table


def build_phi(config: Configuration, m: int, variant: str = "phi", delta: Fraction | None = None) -> Expr:
    if m < 1:
        raise ValueError("parameter m must be at least 1")
    if variant not in ("phi", "phi_prime", "varphi"):
        raise ValueError(f"unknown variant {variant!r}")
    delta = None if delta is None else Fraction(delta)
    q = config.q
    root, table = _shape_table(config)
    branching: dict = {}

    def is_branching(i: int) -> bool:
        if i not in branching:
            ch = table[i]
            branching[i] = len(ch) > 1 or any(is_branching(c) for c in ch)
        return branching[i]

    def bijection_sum(children: list[int], build) -> Expr:
        n = len(children)
        terms = []
        for letters in itertools.combinations(range(q), n):
            for perm in itertools.permutations(children):
                terms.append(Prod(tuple(_branch_term(a, m, build(c)) for a, c in zip(letters, perm))))
        return Sum(tuple(terms))

    memo: dict = {}

    def varphi(i: int) -> Expr:
        if i not in memo:
            ch = list(table[i])
            memo[i] = ONE if not ch else bijection_sum(ch, varphi)
        return memo[i]

    def phi(i: int) -> Expr:
        if i not in memo:
            ch = list(table[i])
            if not is_branching(i):
                memo[i] = ONE
            else:
                br = [c for c in ch if is_branching(c)]
                memo[i] = Prod((IndA(len(ch), delta), bijection_sum(br, phi)))
        return memo[i]

    def phi_prime(i: int) -> Expr:
        if i not in memo:
            ch = list(table[i])
            if not is_branching(i):
                memo[i] = ONE
            elif not any(is_branching(c) for c in ch):
                memo[i] = IndA(len(ch), delta)
            else:
                if len(set(ch)) != 1:
                    raise ValueError("phi_prime needs isomorphic child configurations")
                f = phi_prime(ch[0])
                n = len(ch)
                memo[i] = Sum(tuple(Prod(tuple(_branch_term(a, m, f) for a in letters))
                                    for letters in itertools.combinations(range(q), n)))
        return memo[i]

    return {"varphi": varphi, "phi": phi, "phi_prime": phi_prime}[variant](root)


def expr_stats(expr: Expr) -> dict:
    """Distinct node count and the largest total P-power along any path."""
    seen: dict = {}

    def depth(e: Expr) -> int:
        if id(e) in seen:
            return seen[id(e)]
        if isinstance(e, Pow):
            d = e.power + depth(e.inner)
        elif isinstance(e, (Prod, Sum)):
            d = max((depth(t) for t in e.terms), default=0)
        else:
            d = 0
        seen[id(e)] = d
        return d

    d = depth(expr)
    return {"nodes": len(seen), "p_depth": d}


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class _Domain:
    labels: list
    letter_probs: list
    kernel: list


def _domain(chain: CPChain, with_root: bool) -> _Domain:
    labels = list(chain.labels)
    probs = list(chain.letter_probs)
    kernel = list(chain.kernel)
    if with_root:
        tau = chain.tree
        labels.append(None)
        probs.append(tau.probs(tau.root))
        kernel.append(dict(chain.initial))
    return _Domain(labels, probs, kernel)


def _evaluate(expr: Expr, dom: _Domain) -> list[Fraction]:
    n = len(dom.labels)
    cache: dict = {}

    def ev(e: Expr) -> list[Fraction]:
        key = id(e)
        if key in cache:
            return cache[key]
        if isinstance(e, Const):
            out = [e.value] * n
        elif isinstance(e, IndA):
            thr = Fraction(0) if e.delta is None else e.delta
            out = [Fraction(int(sum(1 for x in dom.letter_probs[s] if x > thr) >= e.r)) for s in range(n)]
        elif isinstance(e, IndB):
            out = [Fraction(int(dom.labels[s] == e.letter)) for s in range(n)]
        elif isinstance(e, Prod):
            out = [Fraction(1)] * n
            for t in e.terms:
                v = ev(t)
                out = [a * b for a, b in zip(out, v)]
        elif isinstance(e, Sum):
            out = [Fraction(0)] * n
            for t in e.terms:
                v = ev(t)
                out = [a + b for a, b in zip(out, v)]
        elif isinstance(e, Pow):
            out = ev(e.inner)
            for _ in range(e.power):
                out = [sum((p * out[t] for t, p in row.items()), Fraction(0)) for row in dom.kernel]
        else:
            raise TypeError(f"unknown expression node {e!r}")
        cache[key] = out
        return out

    return ev(expr)


def evaluate(expr: Expr, chain: CPChain) -> list[Fraction]:
    """Exact values on the chain states."""
    return _evaluate(expr, _domain(chain, False))


def evaluate_at_root(expr: Expr, chain: CPChain) -> Fraction:
    """Value at the Markov tree itself (the root vertex), which precedes the chain states."""
    return _evaluate(expr, _domain(chain, True))[-1]


def closed_form_F(chain: CPChain, r: int, m: int) -> list[Fraction]:
    """1_{A_r} * P^m 1_{A_r}."""
    a = evaluate(IndA(r), chain)
    return [x * y for x, y in zip(a, evaluate(Pow(m, IndA(r)), chain))]


# ---------------------------------------------------------------------------
# checks


@dataclass
class SoundnessReport:
    phi_root: Fraction
    embedding_exists: bool
    agree: bool


def soundness_check(tree: TreeSpec, config: Configuration, m: int, tau=None, variant: str = "phi") -> SoundnessReport:
    """Positivity of the detector at the root against exhaustive embedding search at the root."""
    need = m * config.height
    if need > tree_depth(tree):
        raise ValueError(f"insufficient horizon: need depth {need}")
    if tau is None:
        if isinstance(tree, ExplicitTree):
            raise ValueError("explicit truncations need an explicit Markov tree")
        tau = uniform_markov_tree(tree)
    chain = build_cp_chain(tau)
    val = evaluate_at_root(build_phi(config, m, variant), chain)
    trunc = tree if isinstance(tree, ExplicitTree) else truncate(tree, need)
    exists = () in brute_force_oracle(trunc, config, m)
    return SoundnessReport(val, exists, (val > 0) == exists)


@dataclass
class IdentityReport:
    q: int
    r: int
    k: int
    c1: Fraction
    c2: Fraction
    first_holds: bool
    second_holds: bool
    v_positive: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.first_holds and self.second_holds and all(self.v_positive.values())


def equality_case_identities(chain: CPChain, q: int, r: int, k: int, n_max: int = 3) -> IdentityReport:
    """On the uniform chain of T^r_{kN}:
    prod_{i} P1_{B_i} = q^{-q} 1_{A_q}, and
    1_{A_r^c} sum_{|I|=r-1} prod_{i in I} P1_{B_i} = (r-1)^{1-r} 1_{A_r^c};
    the detector of V^{r,k,kn} with parameter 1 is positive exactly on A_q for n <= n_max.
    """
    widths = {len([x for x in p if x > 0]) for p in chain.letter_probs}
    if not widths <= {q, r - 1} or chain.q != q:
        raise ValueError("chain is not from the equality family T^r_{kN}")
    c1 = Fraction(1, q ** q)
    c2 = Fraction(1, (r - 1) ** (r - 1))
    pb = [evaluate(Pow(1, IndB(i)), chain) for i in range(q)]
    a_q = evaluate(IndA(q), chain)
    a_r = evaluate(IndA(r), chain)
    n = len(chain)
    prod_all = [Fraction(1)] * n
    for v in pb:
        prod_all = [a * b for a, b in zip(prod_all, v)]
    first = prod_all == [c1 * x for x in a_q]
    partial = [Fraction(0)] * n
    for letters in itertools.combinations(range(q), r - 1):
        term = [Fraction(1)] * n
        for i in letters:
            term = [a * b for a, b in zip(term, pb[i])]
        partial = [a + b for a, b in zip(partial, term)]
    second = [(1 - x) * y for x, y in zip(a_r, partial)] == [c2 * (1 - x) for x in a_r]
    report = IdentityReport(q, r, k, c1, c2, first, second)
    for nn in range(1, n_max + 1):
        conf = make_configuration("V", q, r=r, k=k, n=k * nn)
        vals = evaluate(build_phi(conf, 1, "phi_prime"), chain)
        report.v_positive[nn] = all((v > 0) == (x == 1) for v, x in zip(vals, a_q))
    return report


def corpus_agreement(corpus: list, configs: list, m_values, depth: int = 9, variant: str = "phi") -> dict:
    """Compare detector positivity with exhaustive embedding search at every vertex with room.

    corpus holds (tree, tau) pairs of finite-state trees; the oracle runs on the depth
    truncation and the detector is evaluated at the Markov tree conditioned on each vertex.
    Returns counts and the list of disagreements (tree index, config index, m, vertex).
    """
    from .cp import conditional

    bad = []
    checked = 0
    for ti, (tree, tau) in enumerate(corpus):
        trunc = truncate(tree, depth)
        chains: dict = {}
        for ci, conf in enumerate(configs):
            for m in m_values:
                top = depth - m * conf.height
                if top < 0:
                    continue
                expr = build_phi(conf, m, variant)
                found = brute_force_oracle(trunc, conf, m)
                # the detector value depends only on the automaton state of the vertex
                positive: dict = {}
                for w in sorted(trunc.words):
                    if len(w) > top:
                        continue
                    key = tau.state_of(w)
                    if key not in chains:
                        chains[key] = build_cp_chain(conditional(tau, w))
                    if key not in positive:
                        positive[key] = evaluate_at_root(expr, chains[key]) > 0
                    pos = positive[key]
                    checked += 1
                    if pos != (w in found):
                        bad.append((ti, ci, m, w))
    return {"checked": checked, "disagreements": bad}
