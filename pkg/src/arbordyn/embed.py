"""Affine configuration embeddings and generic-parameter sets.

An embedding of a configuration C at a vertex v with parameter m is a map
iota: C -> T with iota(()) = v, l(iota(w)) = l(v) + m*l(w), that preserves
longest common prefixes: iota(w1 ^ w2) = iota(w1) ^ iota(w2).

Structural form used by the search. For m >= 1 such a map is the same thing as
a map where (a) iota(wa) extends iota(w) for every edge w -> wa of C and
(b) distinct children wa != wb of a vertex w have images whose first letters
after iota(w) differ.
  Necessity: w is a prefix of wa, so iota(w) = iota(w) ^ iota(wa), which gives (a).
  For siblings, iota(wa) ^ iota(wb) = iota(w), and both images extend iota(w)
  by m >= 1 letters, so they must already differ in the first of them, giving (b).
  Sufficiency: take w1, w2 with u = w1 ^ w2. If w1 is a prefix of w2 then by (a)
  iota(w1) is a prefix of iota(w2) and the claim holds. Otherwise w1 extends ua
  and w2 extends ub with a != b. By (a) iota(w1) extends iota(ua) and iota(w2)
  extends iota(ub). These extend iota(u) and differ right after it by (b), so
  iota(w1) ^ iota(w2) = iota(u).
For m = 0 every vertex maps to v and the map is trivially valid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import arith
from .geometry import VertexPredicate, ancestor_density_sequence, minkowski_dim
from .treespec import (
    AutomatonTree,
    Configuration,
    EventuallyPeriodicSet,
    ExplicitTree,
    PeriodicSequence,
    ProfileTree,
    TreeSpec,
    Word,
    common_prefix,
    contains,
    format_word,
    make_configuration,
    parse_word,
    splitting_levels,
    state_of,
    tree_depth,
)


@dataclass
class EmbeddingWitness:
    base: Word
    m: int
    assignment: dict  # configuration word -> tree word

    def to_dict(self) -> dict:
        return {"base": format_word(self.base), "m": self.m,
                "assignment": {format_word(w): format_word(x)
                               for w, x in sorted(self.assignment.items(), key=lambda t: (len(t[0]), t[0]))}}


def is_embedding(tree: TreeSpec, config: Configuration, assignment: dict, base: Word, m: int) -> bool:
    """Pairwise definition: levels are affine and common prefixes are preserved."""
    if set(assignment) != set(config.words) or assignment.get(()) != tuple(base):
        return False
    for w, x in assignment.items():
        if len(x) != len(base) + m * len(w) or not contains(tree, x):
            return False
    words = list(config.words)
    for w1, w2 in itertools.combinations(words, 2):
        if assignment[common_prefix(w1, w2)] != common_prefix(assignment[w1], assignment[w2]):
            return False
    return True


class _Searcher:
    """Memoised structural search for one (tree, configuration, m)."""

    def __init__(self, tree: TreeSpec, config: Configuration, m: int):
        self.tree = tree
        self.config = config
        self.m = m
        self.children = {w: config.children(w) for w in config.words}
        self.memo: dict = {}
        self.reps: dict = {}

    def descendants(self, state, d: int) -> list[tuple[Word, object]]:
        """Distinct node states at distance d with their lexicographically smallest relative word."""
        key = (self.tree.state_key(state), d)
        if key in self.reps:
            return self.reps[key]
        layer = [((), state)]
        for _ in range(d):
            seen: dict = {}
            for word, s in layer:
                for a in self.tree.letters(s):
                    t = self.tree.step(s, a)
                    k = self.tree.state_key(t)
                    if k not in seen:
                        seen[k] = (word + (a,), t)
            layer = list(seen.values())
        self.reps[key] = layer
        return layer

    def embed(self, w: Word, state) -> dict | None:
        """Relative assignment of C^w below a vertex in the given state, or None."""
        key = (w, self.tree.state_key(state))
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = None  # no cycles are possible, but keep the slot defined
        kids = self.children[w]
        letters = self.tree.letters(state)
        # options[i][a]: relative assignment for kid i placed through first letter a
        options: list[dict] = []
        for c in kids:
            opts = {}
            for a in letters:
                t = self.tree.step(state, a)
                for rel, y in self.descendants(t, self.m - 1):
                    sub = self.embed(c, y)
                    if sub is not None:
                        opts[a] = {cw: (a,) + rel + x for cw, x in sub.items()}
                        break
            if not opts:
                return None
            options.append(opts)
        chosen = self._match(options, 0, set())
        if chosen is None:
            return None
        out = {w: ()}
        for opts, a in zip(options, chosen):
            out.update(opts[a])
        self.memo[key] = out
        return out

    def _match(self, options: list[dict], i: int, used: set) -> list | None:
        if i == len(options):
            return []
        for a in sorted(options[i]):
            if a in used:
                continue
            rest = self._match(options, i + 1, used | {a})
            if rest is not None:
                return [a] + rest
        return None


def _check_horizon(tree: TreeSpec, config: Configuration, v: Word, m: int) -> None:
    if len(v) + m * config.height > tree_depth(tree):
        raise ValueError(f"horizon exceeded: l(v) + m*height = {len(v) + m * config.height} > {tree_depth(tree)}")


def appears_at(tree: TreeSpec, config: Configuration, v, m: int) -> EmbeddingWitness | None:
    """First embedding found by lexicographic backtracking, or None when there is none."""
    v = parse_word(v)
    if m < 0:
        raise ValueError("parameter must be nonnegative")
    if config.q != tree.q:
        raise ValueError("configuration and tree use different alphabets")
    if not contains(tree, v):
        raise ValueError(f"vertex {format_word(v)!r} is not in the tree")
    _check_horizon(tree, config, v, m)
    if m == 0:
        return EmbeddingWitness(v, 0, {w: v for w in config.words})
    rel = _Searcher(tree, config, m).embed((), state_of(tree, v))
    if rel is None:
        return None
    return EmbeddingWitness(v, m, {cw: v + x for cw, x in rel.items()})


def brute_force_oracle(tree: ExplicitTree, config: Configuration, m: int, method: str = "subtree") -> set[Word]:
    """Vertices v with l(v) + m*height(C) <= N where some embedding exists, by exhaustive enumeration.

    method "pairwise" assigns images in length order, each a descendant of its parent's
    image at distance m, checked pairwise against every image placed so far.
    method "subtree" decides "C^w embeds below vertex x" for every explicit vertex x,
    memoized over the whole truncation; siblings must use distinct first letters.
    Neither method uses automaton states.
    """
    if not isinstance(tree, ExplicitTree):
        raise ValueError("the oracle runs on explicit truncations")
    if method not in ("pairwise", "subtree"):
        raise ValueError(f"unknown oracle method {method!r}")
    top = tree.depth - m * config.height
    if top < 0:
        raise ValueError("horizon exceeded for every vertex")
    if method == "pairwise":
        order = config.sorted_words()
        test = lambda base: _exhaustive(tree, order, base, m)
    else:
        test = _SubtreeOracle(tree, config, m).fits
    return {base for base in sorted(tree.words) if len(base) <= top and test(base)}


def _below(tree: ExplicitTree, x: Word, m: int) -> list[Word]:
    layer = [x]
    for _ in range(m):
        layer = [y + (a,) for y in layer for a in tree.letters(y)]
    return layer


def _exhaustive(tree: ExplicitTree, order: list[Word], base: Word, m: int) -> bool:
    assigned: dict = {(): base}

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        w = order[i]
        for x in _below(tree, assigned[w[:-1]], m):
            ok = True
            for u, y in assigned.items():
                if assigned[common_prefix(u, w)] != common_prefix(x, y):
                    ok = False
                    break
            if ok:
                assigned[w] = x
                if rec(i + 1):
                    return True
                del assigned[w]
        return False

    return rec(1)


class _SubtreeOracle:
    def __init__(self, tree: ExplicitTree, config: Configuration, m: int):
        self.tree, self.m = tree, m
        self.children = {w: sorted(c for c in config.words if c[:-1] == w and len(c) == len(w) + 1)
                         for w in config.words}
        self.memo: dict = {}

    def fits(self, x: Word, w: Word = ()) -> bool:
        key = (w, x)
        if key not in self.memo:
            self.memo[key] = self._compute(w, x)
        return self.memo[key]

    def _compute(self, w: Word, x: Word) -> bool:
        kids = self.children[w]
        if not kids:
            return True
        # letters[i]: first letters below x through which kid i can be placed
        letters = []
        for c in kids:
            ok = {y[len(x)] for y in _below(self.tree, x, self.m) if self.fits(y, c)}
            if not ok:
                return False
            letters.append(ok)
        return _injective(letters, 0, frozenset())


def _injective(letters: list[set], i: int, used: frozenset) -> bool:
    if i == len(letters):
        return True
    return any(_injective(letters, i + 1, used | {a}) for a in letters[i] if a not in used)


# ---------------------------------------------------------------------------
# profile trees and generic parameters


def config_level_set(tree: ProfileTree, config: Configuration, m: int) -> EventuallyPeriodicSet:
    """Levels j whose vertices carry an embedding: s(j + m*l(w)) >= #children(w) for each inner w."""
    if not isinstance(tree, ProfileTree):
        raise ValueError("level sets are defined for profile trees only")
    if m < 0:
        raise ValueError("parameter must be nonnegative")
    if m == 0:
        return EventuallyPeriodicSet.everything()
    needs = [(len(w), len(config.children(w))) for w in config.words if config.children(w)]
    s = tree.splitting

    def ok(j: int) -> bool:
        return all(s[j + m * lw] >= c for lw, c in needs)

    return EventuallyPeriodicSet.from_predicate(ok, len(s.preperiod), len(s.period))


def generic_set(tree: ProfileTree, config: Configuration) -> EventuallyPeriodicSet:
    """All m >= 0 with C_m of positive density (upper and Banach agree here).

    For m >= 1 the level set depends on m only through m mod period.
    """
    if not isinstance(tree, ProfileTree):
        raise ValueError("exact generic sets need a profile tree")
    P = len(tree.splitting.period)
    flags = [arith.density(config_level_set(tree, config, m)) > 0 for m in range(P + 1)]
    return EventuallyPeriodicSet((flags[0],), tuple(flags[1:]))


@dataclass
class GenericResult:
    params: list[int]
    certificates: dict
    exact: bool
    mode: str

    def to_dict(self) -> dict:
        return {"params": self.params, "exact": self.exact, "mode": self.mode,
                "certificates": [dict(m=m, **c) for m, c in sorted(self.certificates.items())]}


def _vertex_predicate(tree: TreeSpec, config: Configuration, m: int, depth: int) -> tuple[VertexPredicate, int]:
    if isinstance(tree, AutomatonTree):
        states = [s for s in tree.reachable_states()
                  if m == 0 or _Searcher(tree, config, m).embed((), s) is not None]
        return VertexPredicate.state(states), depth
    top = tree.depth - m * config.height
    if top < 0:
        return VertexPredicate.nothing(), -1
    words = [w for w in tree.words if len(w) <= top and appears_at(tree, config, w, m) is not None]
    return VertexPredicate.explicit([format_word(w) for w in words]), top


def generic_params(tree: TreeSpec, config: Configuration, mode: str = "upper", m_max: int = 12,
                   depth: int = 40) -> GenericResult:
    """Parameters m <= m_max whose embedding set has positive density.

    Profile trees are decided exactly. Other trees use the depth-n ancestor average
    at the horizon and report an estimate; Banach mode then uses the same witness.
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if mode not in ("upper", "banach"):
        raise ValueError("mode must be 'upper' or 'banach'")
    params, certs = [], {}
    if isinstance(tree, ProfileTree):
        for m in range(m_max + 1):
            levels = config_level_set(tree, config, m)
            tri = arith.densities(levels)
            d = tri.upper if mode == "upper" else tri.banach
            certs[m] = {"levels": levels.describe(), "density": str(d)}
            if d > 0:
                params.append(m)
        return GenericResult(params, certs, True, mode)
    for m in range(m_max + 1):
        if m == 0:
            params.append(0)
            certs[0] = {"density": "1"}
            continue
        pred, top = _vertex_predicate(tree, config, m, depth)
        if top < 1:
            certs[m] = {"density": None, "note": "horizon exceeded"}
            continue
        seq = ancestor_density_sequence(tree, pred, top)
        certs[m] = {"density": str(seq[-1]), "depth": top, "estimate": True}
        if seq[-1] > 0:
            params.append(m)
    return GenericResult(params, certs, False, mode)


# ---------------------------------------------------------------------------
# search harness for the open question on full r-ary configurations


@dataclass
class ProbeRow:
    period: tuple
    dim: float
    normalized: float
    lower_density: Fraction
    beta: float
    k: int | None
    checks: dict = field(default_factory=dict)


def cube_density_probe(q: int, r: int, max_period: int, n_max: int = 6) -> list[ProbeRow]:
    """Enumerate purely periodic profiles with values in {r-1, q} and report, where 1 < beta < 3/2,
    whether D^{r,n}_k has positive Banach density for each n with (1 - 1/beta) n < 1.

    Reports only; no claim is attached to the outcome.
    """
    lr = math.log(r - 1, q) if r > 2 else 0.0
    rows = []
    seen = set()
    for P in range(1, max_period + 1):
        for bits in itertools.product((r - 1, q), repeat=P):
            tree = ProfileTree(q, PeriodicSequence((), bits))
            if tree.splitting in seen or q not in bits:
                continue
            seen.add(tree.splitting)
            dim = minkowski_dim(tree).value
            norm = (dim - lr) / (1 - lr)
            gstar = generic_set(tree, make_configuration("F", q, r=r))
            low = arith.densities(gstar).lower
            beta = float(low) / norm if norm > 0 else math.inf
            k = None
            for kk in range(1, len(bits) + 1):
                if all((kk * j) in gstar for j in range(2 * len(bits) + 2)):
                    k = kk
                    break
            row = ProbeRow(bits, dim, norm, low, beta, k)
            if k is not None and beta < 1.5:
                for n in range(1, n_max + 1):
                    if (1 - 1 / beta) * n < 1:
                        d_conf = make_configuration("D", q, r=r, n=n)
                        row.checks[n] = arith.density(config_level_set(tree, d_conf, k)) > 0
            rows.append(row)
    return rows


def splitting_remark_set(tree: ProfileTree, r: int, m: int) -> EventuallyPeriodicSet:
    """{j : j and j+m both have at least r children}, the level set of F^r_m."""
    E = splitting_levels(tree, r)
    return E & E.shift(m)
