"""Words, configurations, eventually periodic sets and finite-state tree specs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Sequence, Union

MAX_ALPHABET = 10

Word = tuple[int, ...]


def parse_word(text: str | Sequence[int]) -> Word:
    """Accept "0110", "" or a sequence of ints."""
    if isinstance(text, str):
        text = text.strip()
        if text in ("", "()", "root"):
            return ()
        return tuple(int(ch) for ch in text)
    return tuple(int(a) for a in text)


def format_word(word: Word) -> str:
    return "".join(str(a) for a in word)


def check_alphabet(q: int) -> None:
    if not isinstance(q, int) or q < 2 or q > MAX_ALPHABET:
        raise ValueError(f"alphabet size must be an integer in [2, {MAX_ALPHABET}], got {q!r}")


def check_word(word: Word, q: int) -> None:
    for a in word:
        if not 0 <= a < q:
            raise ValueError(f"letter {a} outside alphabet of size {q}")


def common_prefix(u: Word, v: Word) -> Word:
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return u[:n]


# ---------------------------------------------------------------------------
# eventually periodic sequences and sets


def canonical_periodic(preperiod: Sequence, period: Sequence) -> tuple[tuple, tuple]:
    """Minimal period first, then the shortest preperiod."""
    pre = tuple(preperiod)
    per = tuple(period)
    if not per:
        raise ValueError("period must be nonempty")
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and all(per[i] == per[i % d] for i in range(n)):
            per = per[:d]
            break
    # absorbing the last preperiod entry into the cycle rotates the period right
    while pre and pre[-1] == per[-1]:
        per = (per[-1],) + per[:-1]
        pre = pre[:-1]
    return pre, per


@dataclass(frozen=True)
class PeriodicSequence:
    """Integer sequence a(0), a(1), ... given by a preperiod and a repeating block."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self) -> None:
        pre, per = canonical_periodic(tuple(int(x) for x in self.preperiod), tuple(int(x) for x in self.period))
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def __getitem__(self, n: int) -> int:
        if n < 0:
            raise IndexError(n)
        if n < len(self.preperiod):
            return self.preperiod[n]
        return self.period[(n - len(self.preperiod)) % len(self.period)]

    def shift(self, k: int) -> "PeriodicSequence":
        """The sequence n -> a(n + k)."""
        p = len(self.preperiod)
        if k <= p:
            return PeriodicSequence(self.preperiod[k:], self.period)
        r = (k - p) % len(self.period)
        return PeriodicSequence((), self.period[r:] + self.period[:r])

    def head(self, n: int) -> list[int]:
        return [self[i] for i in range(n)]


@dataclass(frozen=True)
class EventuallyPeriodicSet:
    """A subset of the natural numbers (0 included) with eventually periodic indicator."""

    preperiod: tuple[bool, ...]
    period: tuple[bool, ...]

    def __post_init__(self) -> None:
        pre, per = canonical_periodic(tuple(bool(x) for x in self.preperiod), tuple(bool(x) for x in self.period))
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    # constructors
    @classmethod
    def from_predicate(cls, pred, preperiod_len: int, period_len: int) -> "EventuallyPeriodicSet":
        pre = [bool(pred(n)) for n in range(preperiod_len)]
        per = [bool(pred(n)) for n in range(preperiod_len, preperiod_len + period_len)]
        return cls(tuple(pre), tuple(per))

    @classmethod
    def multiples(cls, k: int) -> "EventuallyPeriodicSet":
        if k < 1:
            raise ValueError("k must be positive")
        return cls((), tuple(i == 0 for i in range(k)))

    @classmethod
    def residues(cls, k: int, residues: Iterable[int]) -> "EventuallyPeriodicSet":
        res = {r % k for r in residues}
        return cls((), tuple(i in res for i in range(k)))

    @classmethod
    def finite(cls, members: Iterable[int]) -> "EventuallyPeriodicSet":
        members = set(members)
        top = max(members) + 1 if members else 0
        return cls(tuple(i in members for i in range(top)), (False,))

    @classmethod
    def everything(cls) -> "EventuallyPeriodicSet":
        return cls((), (True,))

    @classmethod
    def empty(cls) -> "EventuallyPeriodicSet":
        return cls((), (False,))

    @classmethod
    def parse(cls, text: str) -> "EventuallyPeriodicSet":
        """Shorthand: "N", "3N", "2N\\8N", "3N+1", "{0,2}" or "empty"."""
        text = text.strip().replace("\\\\", "\\")
        if text in ("", "empty", "{}"):
            return cls.empty()
        if "\\" in text:
            left, right = text.split("\\", 1)
            return cls.parse(left) - cls.parse(right)
        if "|" in text:
            parts = [cls.parse(t) for t in text.split("|")]
            out = parts[0]
            for p in parts[1:]:
                out = out | p
            return out
        if text.startswith("{") and text.endswith("}"):
            inner = text[1:-1].strip()
            return cls.finite(int(t) for t in inner.split(",") if t.strip())
        if "N" in text:
            head, _, tail = text.partition("N")
            k = int(head) if head else 1
            offset = int(tail.lstrip("+")) if tail.strip() else 0
            base = cls.multiples(k)
            return base.translate(offset) if offset else base
        raise ValueError(f"cannot parse set shorthand {text!r}")

    # queries
    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        if n < len(self.preperiod):
            return self.preperiod[n]
        return self.period[(n - len(self.preperiod)) % len(self.period)]

    @property
    def period_length(self) -> int:
        return len(self.period)

    @property
    def preperiod_length(self) -> int:
        return len(self.preperiod)

    def members_below(self, n: int) -> list[int]:
        return [i for i in range(n) if i in self]

    def is_empty(self) -> bool:
        return not any(self.preperiod) and not any(self.period)

    def is_finite(self) -> bool:
        return not any(self.period)

    def periodic_residues(self) -> tuple[int, ...]:
        """Residues mod the period of members of the periodic part."""
        p, P = len(self.preperiod), len(self.period)
        return tuple(sorted((p + i) % P for i in range(P) if self.period[i]))

    # set algebra
    def _combine(self, other: "EventuallyPeriodicSet", op) -> "EventuallyPeriodicSet":
        pre = max(len(self.preperiod), len(other.preperiod))
        per = math.lcm(len(self.period), len(other.period))
        return EventuallyPeriodicSet.from_predicate(lambda n: op(n in self, n in other), pre, per)

    def __and__(self, other: "EventuallyPeriodicSet") -> "EventuallyPeriodicSet":
        return self._combine(other, lambda a, b: a and b)

    def __or__(self, other: "EventuallyPeriodicSet") -> "EventuallyPeriodicSet":
        return self._combine(other, lambda a, b: a or b)

    def __sub__(self, other: "EventuallyPeriodicSet") -> "EventuallyPeriodicSet":
        return self._combine(other, lambda a, b: a and not b)

    def complement(self) -> "EventuallyPeriodicSet":
        return EventuallyPeriodicSet(tuple(not x for x in self.preperiod), tuple(not x for x in self.period))

    def shift(self, m: int) -> "EventuallyPeriodicSet":
        """E - m = {n : n + m in E}."""
        pre = max(len(self.preperiod) - m, 0)
        return EventuallyPeriodicSet.from_predicate(lambda n: (n + m) in self, pre, len(self.period))

    def translate(self, m: int) -> "EventuallyPeriodicSet":
        """E + m = {n + m : n in E}."""
        return EventuallyPeriodicSet.from_predicate(
            lambda n: n >= m and (n - m) in self, len(self.preperiod) + m, len(self.period)
        )

    def issubset(self, other: "EventuallyPeriodicSet") -> bool:
        return (self - other).is_empty()

    # serialization
    def to_dict(self) -> dict:
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    @classmethod
    def from_dict(cls, data: dict) -> "EventuallyPeriodicSet":
        return cls(tuple(bool(x) for x in data.get("preperiod", [])), tuple(bool(x) for x in data["period"]))

    def describe(self, limit: int = 24) -> str:
        if self.is_empty():
            return "{} (empty)"
        shown = ",".join(str(n) for n in self.members_below(limit))
        return f"{{{shown},...}} (period {len(self.period)}, preperiod {len(self.preperiod)})"


# ---------------------------------------------------------------------------
# configurations


@dataclass(frozen=True)
class Configuration:
    """Finite nonempty prefix-closed word set."""

    q: int
    words: frozenset

    def __post_init__(self) -> None:
        check_alphabet(self.q)
        words = frozenset(parse_word(w) for w in self.words)
        if not words:
            raise ValueError("a configuration is nonempty")
        for w in words:
            check_word(w, self.q)
            if w and w[:-1] not in words:
                raise ValueError(f"word set is not prefix-closed: missing parent of {format_word(w)!r}")
        object.__setattr__(self, "words", words)

    @property
    def height(self) -> int:
        return max(len(w) for w in self.words)

    def level(self, n: int) -> list[Word]:
        return sorted(w for w in self.words if len(w) == n)

    def children(self, w: Word) -> list[Word]:
        return sorted(c for c in self.words if len(c) == len(w) + 1 and c[:-1] == w)

    def sub(self, v: Word) -> "Configuration":
        """C^v = {w : vw in C}."""
        v = tuple(v)
        if v not in self.words:
            raise ValueError(f"{format_word(v)!r} is not in the configuration")
        return Configuration(self.q, frozenset(w[len(v):] for w in self.words if w[: len(v)] == v))

    def is_branching(self) -> bool:
        return any(len(self.level(n)) > 1 for n in range(self.height + 1))

    def sorted_words(self) -> list[Word]:
        return sorted(self.words, key=lambda w: (len(w), w))

    def shape(self) -> tuple:
        """Letter-relabeling invariant: sorted tuple of child shapes."""
        return tuple(sorted(self.sub(c).shape() for c in self.children(())))

    def isomorphic(self, other: "Configuration") -> bool:
        return self.shape() == other.shape()

    def __len__(self) -> int:
        return len(self.words)


# ---------------------------------------------------------------------------
# tree specifications


@dataclass(frozen=True)
class ProfileTree:
    """Every vertex at level n has children 0..s(n)-1."""

    q: int
    splitting: PeriodicSequence

    def __post_init__(self) -> None:
        check_alphabet(self.q)
        for s in self.splitting.preperiod + self.splitting.period:
            if not 1 <= s <= self.q:
                raise ValueError(f"splitting numbers must lie in [1, {self.q}], got {s}")

    # uniform node interface: the node state of a profile tree is the level
    @property
    def root_state(self) -> int:
        return 0

    def letters(self, state: int) -> tuple[int, ...]:
        return tuple(range(self.splitting[state]))

    def step(self, state: int, letter: int) -> int:
        if not 0 <= letter < self.splitting[state]:
            raise KeyError(letter)
        return state + 1

    def state_key(self, state: int) -> int:
        """Collapse levels into the finitely many classes of the profile."""
        p, P = len(self.splitting.preperiod), len(self.splitting.period)
        return state if state < p else p + (state - p) % P


@dataclass(frozen=True)
class AutomatonTree:
    """Deterministic partial automaton: the tree is the language read from the root."""

    q: int
    states: tuple
    root: Hashable
    transitions: tuple  # sorted tuple of ((state, letter), state)

    def __post_init__(self) -> None:
        check_alphabet(self.q)
        trans = self.transitions
        if isinstance(trans, dict):
            trans = tuple(trans.items())
        table: dict = {}
        for (s, a), t in trans:
            if (s, a) in table and table[(s, a)] != t:
                raise ValueError(f"nondeterministic transition at {(s, a)!r}")
            if not 0 <= a < self.q:
                raise ValueError(f"letter {a} outside alphabet")
            table[(s, a)] = t
        states = tuple(sorted(set(self.states) | {self.root} | {s for s, _ in table} | set(table.values()), key=_state_order))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transitions", tuple(sorted(table.items(), key=lambda kv: (_state_order(kv[0][0]), kv[0][1]))))
        object.__setattr__(self, "_table", table)
        for s in self.reachable_states():
            if not self.letters(s):
                raise ValueError(f"reachable state {s!r} has no outgoing letter (tree would not be pruned)")

    @property
    def root_state(self):
        return self.root

    def letters(self, state) -> tuple[int, ...]:
        return tuple(a for a in range(self.q) if (state, a) in self._table)

    def step(self, state, letter: int):
        return self._table[(state, letter)]

    def state_key(self, state):
        return state

    def reachable_states(self, start=None) -> list:
        start = self.root if start is None else start
        seen = [start]
        seen_set = {start}
        i = 0
        while i < len(seen):
            s = seen[i]
            i += 1
            for a in self.letters(s):
                t = self._table[(s, a)]
                if t not in seen_set:
                    seen_set.add(t)
                    seen.append(t)
        return seen

    def with_root(self, state) -> "AutomatonTree":
        return AutomatonTree(self.q, self.states, state, self.transitions)


@dataclass(frozen=True)
class ExplicitTree:
    """Finite truncation of a tree to depth N."""

    q: int
    depth: int
    words: frozenset

    def __post_init__(self) -> None:
        check_alphabet(self.q)
        words = frozenset(parse_word(w) for w in self.words)
        if () not in words:
            raise ValueError("explicit tree must contain the root")
        for w in words:
            check_word(w, self.q)
            if len(w) > self.depth:
                raise ValueError(f"word {format_word(w)!r} deeper than the stated depth")
            if w and w[:-1] not in words:
                raise ValueError(f"word set is not prefix-closed: missing parent of {format_word(w)!r}")
        object.__setattr__(self, "words", words)
        kids: dict = {}
        for w in words:
            if w:
                kids.setdefault(w[:-1], []).append(w[-1])
        object.__setattr__(self, "_kids", {k: tuple(sorted(v)) for k, v in kids.items()})
        for w in words:
            if len(w) < self.depth and w not in self._kids:
                raise ValueError(f"word {format_word(w)!r} has no child before depth {self.depth}")

    @property
    def root_state(self) -> Word:
        return ()

    def letters(self, state: Word) -> tuple[int, ...]:
        return self._kids.get(state, ())

    def step(self, state: Word, letter: int) -> Word:
        w = state + (letter,)
        if w not in self.words:
            raise KeyError(letter)
        return w

    def state_key(self, state: Word) -> Word:
        return state


TreeSpec = Union[ProfileTree, AutomatonTree, ExplicitTree]


def _state_order(s) -> tuple:
    return (type(s).__name__, s)


# ---------------------------------------------------------------------------
# generic tree queries


def state_of(tree: TreeSpec, word: Sequence[int]):
    """Node state reached by reading the word; raises ValueError if the word is not in the tree."""
    s = tree.root_state
    for a in word:
        if a not in tree.letters(s):
            raise ValueError(f"word {format_word(tuple(word))!r} is not in the tree")
        s = tree.step(s, a)
    return s


def contains(tree: TreeSpec, word: Sequence[int]) -> bool:
    try:
        state_of(tree, word)
    except ValueError:
        return False
    return True


def iter_level(tree: TreeSpec, n: int, start: Word = ()) -> Iterator[tuple[Word, object]]:
    """Words of length l(start)+n below start with their node states, lexicographic."""
    s0 = state_of(tree, start)

    def rec(word: Word, s, k: int):
        if k == 0:
            yield word, s
            return
        for a in tree.letters(s):
            yield from rec(word + (a,), tree.step(s, a), k - 1)

    yield from rec(tuple(start), s0, n)


def iter_words(tree: TreeSpec, max_len: int) -> Iterator[Word]:
    for n in range(max_len + 1):
        for w, _ in iter_level(tree, n):
            yield w


def tree_depth(tree: TreeSpec) -> float:
    return tree.depth if isinstance(tree, ExplicitTree) else math.inf


def level_count(tree: TreeSpec, n: int) -> int:
    """Exact |T(n)|."""
    if n < 0:
        raise ValueError("level must be nonnegative")
    if isinstance(tree, ProfileTree):
        out = 1
        for j in range(n):
            out *= tree.splitting[j]
        return out
    if isinstance(tree, AutomatonTree):
        counts = {tree.root: 1}
        for _ in range(n):
            nxt: dict = {}
            for s, c in counts.items():
                for a in tree.letters(s):
                    t = tree.step(s, a)
                    nxt[t] = nxt.get(t, 0) + c
            counts = nxt
        return sum(counts.values())
    if n > tree.depth:
        raise ValueError(f"level {n} exceeds the truncation depth {tree.depth}")
    return sum(1 for w in tree.words if len(w) == n)


def subtree(tree: TreeSpec, v: Sequence[int]) -> TreeSpec:
    """T^v = {w : vw in T}."""
    v = parse_word(v)
    s = state_of(tree, v)
    if isinstance(tree, ProfileTree):
        return ProfileTree(tree.q, tree.splitting.shift(len(v)))
    if isinstance(tree, AutomatonTree):
        return tree.with_root(s)
    return ExplicitTree(tree.q, tree.depth - len(v), frozenset(w[len(v):] for w in tree.words if w[: len(v)] == v))


def truncate(tree: TreeSpec, depth: int) -> ExplicitTree:
    if depth > tree_depth(tree):
        raise ValueError("cannot truncate below the available depth")
    return ExplicitTree(tree.q, depth, frozenset(iter_words(tree, depth)))


def profile_automaton(tree: ProfileTree) -> AutomatonTree:
    """Automaton whose states are the level classes of the profile."""
    p, P = len(tree.splitting.preperiod), len(tree.splitting.period)
    trans = {}
    for i in range(p + P):
        nxt = i + 1 if i + 1 < p + P else p
        for a in range(tree.splitting[i]):
            trans[(i, a)] = nxt
    return AutomatonTree(tree.q, tuple(range(p + P)), 0, tuple(trans.items()))


def as_automaton(tree: TreeSpec) -> AutomatonTree:
    if isinstance(tree, AutomatonTree):
        return tree
    if isinstance(tree, ProfileTree):
        return profile_automaton(tree)
    raise ValueError("explicit truncations have no finite-state automaton")


def full_tree(q: int) -> ProfileTree:
    return ProfileTree(q, PeriodicSequence((), (q,)))


# ---------------------------------------------------------------------------
# named families


def make_named_tree(family: str, q: int, r: int, **params) -> ProfileTree:
    """T_E^r (params E), T_kN^r (params k) or T_eps (params k, N).

    Levels in the distinguished set get q children, all other levels r-1.
    """
    check_alphabet(q)
    if not 2 <= r <= q:
        raise ValueError(f"need 2 <= r <= q, got r={r}, q={q}")
    fam = family.replace("^r", "").replace("_", "").lower()
    if fam in ("te", "e"):
        levels = params["E"]
        if isinstance(levels, str):
            levels = EventuallyPeriodicSet.parse(levels)
    elif fam in ("tkn", "kn"):
        k = int(params["k"])
        if k < 1:
            raise ValueError("k must be at least 1")
        levels = EventuallyPeriodicSet.multiples(k)
    elif fam in ("teps", "eps"):
        k, big_n = int(params["k"]), int(params["N"])
        if k < 1 or big_n < 1:
            raise ValueError("k and N must be at least 1")
        levels = EventuallyPeriodicSet.multiples(k) - EventuallyPeriodicSet.multiples(k * big_n)
    else:
        raise ValueError(f"unknown tree family {family!r}")
    pre = tuple(q if x else r - 1 for x in levels.preperiod)
    per = tuple(q if x else r - 1 for x in levels.period)
    return ProfileTree(q, PeriodicSequence(pre, per))


def splitting_levels(tree: ProfileTree, r: int | None = None) -> EventuallyPeriodicSet:
    """Levels whose vertices have at least r children (default r = q)."""
    r = tree.q if r is None else r
    s = tree.splitting
    return EventuallyPeriodicSet(tuple(x >= r for x in s.preperiod), tuple(x >= r for x in s.period))


def make_configuration(kind: str, q: int, r: int | None = None, n: int | None = None, k: int | None = None,
                       words: Iterable | None = None) -> Configuration:
    """F^r, D^{r,n}, V^{r,k,n} or an explicit word set."""
    kind = kind.upper().replace("^", "")
    if kind in ("EXPLICIT", "WORDS"):
        return Configuration(q, frozenset(parse_word(w) for w in words or ()))
    check_alphabet(q)
    if r is None or not 2 <= r <= q:
        raise ValueError(f"need 2 <= r <= q, got r={r}, q={q}")
    if kind == "F":
        out = {()} | {(a,) for a in range(r)} | {(0, a) for a in range(r)}
    elif kind == "D":
        if n is None or n < 1:
            raise ValueError("D needs n >= 1")
        out = set()
        for i in range(n + 1):
            out |= set(_all_words(r, i))
    elif kind == "V":
        if n is None or n < 1 or k is None or k < 1:
            raise ValueError("V needs n >= 1 and k >= 1")
        out = set(iter_words(make_named_tree("T_kN", q, r, k=k), n + 1))
    else:
        raise ValueError(f"unknown configuration kind {kind!r}")
    return Configuration(q, frozenset(out))


def _all_words(r: int, n: int) -> Iterator[Word]:
    if n == 0:
        yield ()
        return
    for w in _all_words(r, n - 1):
        for a in range(r):
            yield w + (a,)


def parse_configuration(text: str, q: int) -> Configuration:
    """Shorthand "F2", "D2,3", "V2,3,3" or a comma-free word list "{,0,1,00}"."""
    t = text.strip()
    if t.startswith("{"):
        items = [x.strip() for x in t.strip("{}").split(",")]
        return Configuration(q, frozenset(parse_word(x) for x in items))
    head = t[0].upper()
    nums = [int(x) for x in t[1:].replace("^", "").split(",") if x.strip()]
    if head == "F" and len(nums) == 1:
        return make_configuration("F", q, r=nums[0])
    if head == "D" and len(nums) == 2:
        return make_configuration("D", q, r=nums[0], n=nums[1])
    if head == "V" and len(nums) == 3:
        return make_configuration("V", q, r=nums[0], k=nums[1], n=nums[2])
    raise ValueError(f"cannot parse configuration {text!r}; use F<r>, D<r>,<n>, V<r>,<k>,<n> or {{words}}")


# ---------------------------------------------------------------------------
# JSON format


def tree_to_dict(tree: TreeSpec) -> dict:
    if isinstance(tree, ProfileTree):
        return {"q": tree.q, "kind": "profile",
                "profile": {"preperiod": list(tree.splitting.preperiod), "period": list(tree.splitting.period)}}
    if isinstance(tree, AutomatonTree):
        return {"q": tree.q, "kind": "automaton",
                "automaton": {"root": tree.root, "states": list(tree.states),
                              "transitions": [[s, a, t] for (s, a), t in tree.transitions]}}
    return {"q": tree.q, "kind": "explicit", "depth": tree.depth,
            "words": [format_word(w) for w in sorted(tree.words, key=lambda w: (len(w), w))]}


def tree_from_dict(data: dict) -> TreeSpec:
    q = int(data["q"])
    kind = data["kind"]
    if kind == "profile":
        prof = data["profile"]
        return ProfileTree(q, PeriodicSequence(tuple(prof.get("preperiod", [])), tuple(prof["period"])))
    if kind == "automaton":
        aut = data["automaton"]
        trans = tuple(((s, int(a)), t) for s, a, t in aut["transitions"])
        return AutomatonTree(q, tuple(aut.get("states", [])), aut["root"], trans)
    if kind == "explicit":
        words = frozenset(parse_word(w) for w in data["words"])
        depth = int(data.get("depth", max(len(w) for w in words)))
        return ExplicitTree(q, depth, words)
    raise ValueError(f"unknown tree kind {kind!r}")


def dumps_tree(tree: TreeSpec) -> str:
    return json.dumps(tree_to_dict(tree), sort_keys=True, separators=(",", ":"))


def loads_tree(text: str) -> TreeSpec:
    return tree_from_dict(json.loads(text))
