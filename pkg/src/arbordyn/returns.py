"""Return-time sets of finite measure-preserving systems and their additive structure.

A finite system is a permutation S of {0..n-1} with positive weights constant on
each cycle, so every correlation nu(A ∩ S^{-m} B) is periodic in m with period
dividing the lcm of the cycle lengths and every density below is exact.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import arith
from .treespec import EventuallyPeriodicSet


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class FiniteMPS:
    perm: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        n = len(self.perm)
        if n == 0 or sorted(self.perm) != list(range(n)):
            raise ValueError("transformation must be a permutation of range(n)")
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != n or any(x <= 0 for x in w) or sum(w) != 1:
            raise ValueError("weights must be positive and sum to 1")
        for x in range(n):
            if w[self.perm[x]] != w[x]:
                raise ValueError("weights must be constant on cycles (invariance)")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.perm)

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for x in range(self.n):
            if x in seen:
                continue
            cyc = [x]
            seen.add(x)
            y = self.perm[x]
            while y != x:
                cyc.append(y)
                seen.add(y)
                y = self.perm[y]
            out.append(tuple(cyc))
        return out

    @property
    def period(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles()))

    def is_ergodic(self) -> bool:
        return len(self.cycles()) == 1

    def measure(self, A: Iterable[int]) -> Fraction:
        return sum((self.weights[x] for x in set(A)), Fraction(0))

    def iterate(self, x: int, m: int) -> int:
        for _ in range(m):
            x = self.perm[x]
        return x

    def preimage(self, A: Iterable[int], m: int) -> frozenset:
        """S^{-m} A = {x : S^m x in A}."""
        A = set(A)
        return frozenset(x for x in range(self.n) if self.iterate(x, m) in A)

    def check_subset(self, A: Iterable[int]) -> frozenset:
        A = frozenset(A)
        if not A <= set(range(self.n)):
            raise ValueError("subset has points outside the ground set")
        return A

    @classmethod
    def rotation(cls, n: int) -> "FiniteMPS":
        return cls(tuple((i + 1) % n for i in range(n)), tuple([Fraction(1, n)] * n))

    @classmethod
    def from_cycles(cls, lengths: Sequence[int], cycle_mass: Sequence | None = None) -> "FiniteMPS":
        """Consecutive cycles of the given lengths; cycle_mass gives each cycle's total mass (default proportional)."""
        total = sum(lengths)
        if cycle_mass is None:
            cycle_mass = [Fraction(ell, total) for ell in lengths]
        perm, weights, start = [], [], 0
        for ell, mass in zip(lengths, cycle_mass):
            for i in range(ell):
                perm.append(start + (i + 1) % ell)
                weights.append(Fraction(mass) / ell)
            start += ell
        return cls(tuple(perm), tuple(weights))


def parse_system(n: int, perm: str, weights: str | None = None) -> FiniteMPS:
    """perm is "rot", a cycle-length list "2+3", or an explicit image list "1,0,2"."""
    if perm == "rot":
        mps = FiniteMPS.rotation(n)
    elif "+" in perm or perm.isdigit():
        lengths = [int(x) for x in perm.split("+")]
        if sum(lengths) != n:
            raise ValueError("cycle lengths must add up to n")
        mps = FiniteMPS.from_cycles(lengths)
    else:
        image = tuple(int(x) for x in perm.split(","))
        if len(image) != n:
            raise ValueError("explicit permutation must list n images")
        mps = FiniteMPS(image, tuple([Fraction(1, n)] * n))
    if weights:
        w = tuple(Fraction(x) for x in weights.split(","))
        mps = FiniteMPS(mps.perm, w)
    return mps


def parse_subset(text: str) -> frozenset:
    text = text.strip().strip("{}")
    return frozenset(int(x) for x in text.split(",") if x.strip())


# ---------------------------------------------------------------------------
# correlations and return sets


def correlation(mps: FiniteMPS, A: Iterable[int], B: Iterable[int] | None = None) -> tuple[Fraction, ...]:
    """gamma(m) = nu(A ∩ S^{-m} B) for m in one period."""
    A = mps.check_subset(A)
    B = A if B is None else mps.check_subset(B)
    out = []
    for m in range(mps.period):
        out.append(sum((mps.weights[x] for x in A if mps.iterate(x, m) in B), Fraction(0)))
    return tuple(out)


def triple_correlation(mps: FiniteMPS, A: Iterable[int], m: int) -> tuple[Fraction, ...]:
    """nu(A ∩ S^{-n}A ∩ S^{-(m+n)}A) for n in one period."""
    A = mps.check_subset(A)
    return tuple(sum((mps.weights[x] for x in A
                      if mps.iterate(x, n) in A and mps.iterate(x, m + n) in A), Fraction(0))
                 for n in range(mps.period))


def threshold_set(values: Sequence[Fraction], pred) -> EventuallyPeriodicSet:
    return EventuallyPeriodicSet((), tuple(bool(pred(v)) for v in values))


@dataclass
class ReturnSets:
    measure: Fraction
    correlation: tuple
    R: EventuallyPeriodicSet
    R_delta: EventuallyPeriodicSet | None = None
    R_gamma: EventuallyPeriodicSet | None = None
    R_m_delta: EventuallyPeriodicSet | None = None
    R_AB: EventuallyPeriodicSet | None = None
    params: dict = field(default_factory=dict)

    def densities(self) -> dict:
        out = {}
        for name in ("R", "R_delta", "R_gamma", "R_m_delta", "R_AB"):
            s = getattr(self, name)
            if s is not None:
                out[name] = arith.density(s)
        return out


def return_set(mps: FiniteMPS, A) -> EventuallyPeriodicSet:
    return threshold_set(correlation(mps, A), lambda v: v > 0)


def delta_return_set(mps: FiniteMPS, A, delta) -> EventuallyPeriodicSet:
    """R^delta = {n : nu(A ∩ S^{-n}A) > delta nu(A)^2}."""
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    mu = mps.measure(A)
    return threshold_set(correlation(mps, A), lambda v: v > delta * mu * mu)


def gamma_return_set(mps: FiniteMPS, A, gamma) -> EventuallyPeriodicSet:
    """R_gamma = {n : nu(A ∩ S^{-n}A) >= (1 - gamma) nu(A)}."""
    gamma = Fraction(gamma)
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    mu = mps.measure(A)
    return threshold_set(correlation(mps, A), lambda v: v >= (1 - gamma) * mu)


def triple_return_set(mps: FiniteMPS, A, m: int, delta) -> EventuallyPeriodicSet:
    """R_m^delta = {n : nu(A ∩ S^{-n}A ∩ S^{-(m+n)}A) > delta nu(A)^3}."""
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    mu = mps.measure(A)
    return threshold_set(triple_correlation(mps, A, m), lambda v: v > delta * mu ** 3)


def transfer_set(mps: FiniteMPS, A, B, eps=0) -> EventuallyPeriodicSet:
    """R^eps_{A,B} = {n : nu(A ∩ S^{-n}B) > eps nu(A) nu(B)}; eps = 0 gives R_{A,B}."""
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    bound = eps * mps.measure(A) * mps.measure(B)
    return threshold_set(correlation(mps, A, B), lambda v: v > bound)


def return_sets(mps: FiniteMPS, A, delta=None, gamma=None, m: int | None = None, eps=None,
                B=None) -> ReturnSets:
    A = mps.check_subset(A)
    mu = mps.measure(A)
    if mu == 0:
        raise ValueError("A must have positive measure")
    out = ReturnSets(mu, correlation(mps, A), return_set(mps, A))
    if delta is not None:
        out.R_delta = delta_return_set(mps, A, delta)
        out.params["delta"] = Fraction(delta)
    if gamma is not None:
        out.R_gamma = gamma_return_set(mps, A, gamma)
        out.params["gamma"] = Fraction(gamma)
    if m is not None and delta is not None:
        out.R_m_delta = triple_return_set(mps, A, m, delta)
        out.params["m"] = m
    if B is not None:
        out.R_AB = transfer_set(mps, A, B, eps or 0)
        out.params["eps"] = Fraction(eps or 0)
    return out


def small_delta(mps: FiniteMPS, A) -> Fraction:
    """A delta below every positive correlation threshold, so R^delta = R."""
    mu = mps.measure(A)
    pos = [v for v in correlation(mps, A) if v > 0]
    return min(pos) / (2 * mu * mu)


def threshold_grid(values: Iterable[Fraction], lo: Fraction, hi: Fraction) -> list[Fraction]:
    """Distinct values and midpoints strictly inside (lo, hi)."""
    pts = sorted({v for v in values if lo < v < hi} | {lo, hi})
    mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    return sorted({v for v in pts + mids if lo < v < hi})


# ---------------------------------------------------------------------------
# Kneser data


def _mask(elems: Iterable[int], k: int) -> int:
    out = 0
    for e in elems:
        out |= 1 << (e % k)
    return out


def _rot(mask: int, g: int, k: int) -> int:
    full = (1 << k) - 1
    g %= k
    return ((mask << g) | (mask >> (k - g))) & full


def mask_sumset(a: int, b: int, k: int) -> int:
    out = 0
    for g in range(k):
        if a >> g & 1:
            out |= _rot(b, g, k)
    return out


def mask_stabilizer(a: int, k: int) -> int:
    return _mask((g for g in range(k) if _rot(a, g, k) == a), k)


def _elems(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


@dataclass
class KneserData:
    k: int
    K: tuple[int, ...]
    sumset: tuple[int, ...]
    stabilizer: tuple[int, ...]  # stabilizer of K + K
    set_stabilizer: tuple[int, ...]  # stabilizer of K
    exceptions: tuple[int, ...] = ()

    @property
    def kneser_bound(self) -> int:
        return 2 * len(self.K) - len(self.stabilizer)

    @property
    def kneser_holds(self) -> bool:
        return len(self.sumset) >= self.kneser_bound


def kneser_structure(S, k: int | None = None) -> KneserData:
    """Residue data for a subset of Z/k or an eventually periodic subset of N.

    For a set of naturals, k is the minimal period, K the residues of the periodic
    part, and members of the preperiod outside K + kN are listed as exceptions.
    """
    if isinstance(S, EventuallyPeriodicSet):
        if S.is_empty() or S.is_finite():
            raise ValueError("need an infinite eventually periodic set")
        k = S.period_length
        p = S.preperiod_length
        K = tuple(sorted({(p + i) % k for i, x in enumerate(S.period) if x}))
        exc = tuple(n for n in range(p) if n in S and n % k not in K)
    else:
        if k is None or k < 1:
            raise ValueError("subsets of Z/k need k >= 1")
        K = tuple(sorted({x % k for x in S}))
        exc = ()
        if not K:
            raise ValueError("empty input")
    a = _mask(K, k)
    ss = mask_sumset(a, a, k)
    return KneserData(k, K, _elems(ss), _elems(mask_stabilizer(ss, k)), _elems(mask_stabilizer(a, k)), exc)


def kneser_sweep(k_max: int = 10) -> dict:
    """|A+B| >= |A| + |B| - |H(A+B)| for all nonempty A, B in Z/k, k <= k_max.

    A is translated to contain 0, which changes A+B by a translation only.
    """
    checked, violations = 0, []
    for k in range(1, k_max + 1):
        full = 1 << k
        stab_cache: dict = {}
        for a in range(1, full, 2):
            size_a = bin(a).count("1")
            for b in range(1, full):
                ss = mask_sumset(a, b, k)
                if ss not in stab_cache:
                    stab_cache[ss] = bin(mask_stabilizer(ss, k)).count("1")
                checked += 1
                if bin(ss).count("1") < size_a + bin(b).count("1") - stab_cache[ss]:
                    violations.append((k, _elems(a), _elems(b)))
    return {"checked": checked, "violations": violations}


# ---------------------------------------------------------------------------
# partition statements


def _multiples_of(S: EventuallyPeriodicSet) -> int | None:
    """k with S = kN, or None."""
    for k in range(1, S.period_length + S.preperiod_length + 1):
        if S == EventuallyPeriodicSet.multiples(k):
            return k
    return None


@dataclass
class PartitionReport:
    measure: Fraction
    upper_R: Fraction
    lower_R: Fraction
    ergodic: bool
    equality_applicable: bool
    equality_k: int | None = None
    equality_holds: bool | None = None
    stability_applicable: bool = False
    R_is_kN: int | None = None
    stability_partition: bool | None = None
    stability_holds: bool | None = None
    lower_equality_candidate: bool = False


def _is_partition(mps: FiniteMPS, parts: list[frozenset]) -> bool:
    covered = [0] * mps.n
    for part in parts:
        for x in part:
            covered[x] += 1
    return all(c == 1 for c in covered)


def verify_thm_partition(mps: FiniteMPS, A) -> PartitionReport:
    """Check the structure conclusions for return times of A.

    If upper d(R) = nu(A): nu(A) = 1/k and A, S^{-1}A, ..., S^{-(k-1)}A partition X.
    If the system is ergodic with 0 < lower d(R) < (3/2) nu(A): R = kN and the sets
    S^{-i}(union_j S^{-jk}A), i < k, partition X. The second conclusion is also
    computed for non-ergodic systems so that its failure there can be observed.
    """
    A = mps.check_subset(A)
    mu = mps.measure(A)
    if mu == 0:
        raise ValueError("A must have positive measure")
    R = return_set(mps, A)
    tri = arith.densities(R)
    rep = PartitionReport(mu, tri.upper, tri.lower, mps.is_ergodic(), tri.upper == mu)
    if rep.equality_applicable:
        inv = 1 / mu
        if inv.denominator == 1:
            k = int(inv)
            rep.equality_k = k
            rep.equality_holds = _is_partition(mps, [mps.preimage(A, i) for i in range(k)])
        else:
            rep.equality_holds = False
    if tri.lower == mu and not rep.equality_holds:
        rep.lower_equality_candidate = True
    rep.stability_applicable = rep.ergodic and 0 < tri.lower < Fraction(3, 2) * mu
    k = _multiples_of(R)
    rep.R_is_kN = k
    if k is not None:
        L = mps.period
        orbit = frozenset().union(*(mps.preimage(A, j * k) for j in range(L)))
        rep.stability_partition = _is_partition(mps, [mps.preimage(orbit, i) for i in range(k)])
    rep.stability_holds = k is not None and bool(rep.stability_partition)
    return rep


# ---------------------------------------------------------------------------
# appendix statements


@dataclass
class AppendixReport:
    measure: Fraction
    eta: Fraction
    heavy_applicable: bool
    heavy_checks: dict = field(default_factory=dict)  # gamma -> (lower d(R_gamma), bound)
    heavy_holds: bool | None = None
    triple_checks: dict = field(default_factory=dict)  # (delta, m, eps) -> (lower density, bound)
    triple_holds: bool | None = None
    small_delta_applicable: bool = False
    small_delta_k: int | None = None
    small_delta_holds: bool | None = None
    ergodic: bool = True


def verify_appendix(mps: FiniteMPS, A, eta=None, deltas: Sequence | None = None, gammas: Sequence | None = None,
                    epsilons: Sequence | None = None, check_stability: bool = True) -> AppendixReport:
    """Bounds for delta-return times.

    heavy returns: if upper d(R^delta) <= (1+eta) nu(A) for all delta > 0 then
         lower d(R_gamma) >= ((gamma - eta + gamma eta)/gamma) nu(A).
    triple returns: for m in R^delta, lower d(R_m^{delta eps}) >= (1 - eps) nu(A).
    small delta: for eta < 1/5 under the heavy-return hypothesis, R^delta = kN for all small delta.
    Since R^delta decreases to R as delta -> 0, the "for all delta" hypothesis is
    exactly upper d(R) <= (1+eta) nu(A). eta defaults to the smallest admissible value.
    """
    A = mps.check_subset(A)
    mu = mps.measure(A)
    if mu == 0:
        raise ValueError("A must have positive measure")
    corr = correlation(mps, A)
    dR = arith.density(return_set(mps, A))
    eta = max(Fraction(0), dR / mu - 1) if eta is None else Fraction(eta)
    rep = AppendixReport(mu, eta, dR <= (1 + eta) * mu, ergodic=mps.is_ergodic())
    if deltas is None:
        deltas = [small_delta(mps, A)] + threshold_grid([v / (mu * mu) for v in corr], Fraction(0), 1 / mu)
    if gammas is None:
        gammas = threshold_grid([1 - v / mu for v in corr], Fraction(0), Fraction(1))
    if epsilons is None:
        epsilons = [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]
    for d in deltas:
        assert arith.density(delta_return_set(mps, A, d)) <= dR
    if rep.heavy_applicable:
        ok = True
        for g in gammas:
            low = arith.densities(gamma_return_set(mps, A, g)).lower
            bound = (g - eta + g * eta) / g * mu
            rep.heavy_checks[g] = (low, bound)
            ok = ok and low >= bound
        rep.heavy_holds = ok
    ok = True
    for d in deltas:
        Rd = delta_return_set(mps, A, d)
        for m in range(mps.period):
            if m not in Rd:
                continue
            for e in epsilons:
                low = arith.densities(triple_return_set(mps, A, m, d * e)).lower
                bound = (1 - e) * mu
                rep.triple_checks[(d, m, e)] = (low, bound)
                ok = ok and low >= bound
    rep.triple_holds = ok
    if check_stability:
        if eta >= Fraction(1, 5):
            raise ValueError("the stability statement needs eta < 1/5")
        rep.small_delta_applicable = rep.heavy_applicable
        small = delta_return_set(mps, A, small_delta(mps, A))
        rep.small_delta_k = _multiples_of(small)
        rep.small_delta_holds = rep.small_delta_k is not None
    return rep


# ---------------------------------------------------------------------------
# additive statements


@dataclass
class LemmaSumReport:
    closure_holds: bool
    closure_checked: int
    density_branch: bool
    densities: dict = field(default_factory=dict)
    density_equal: bool | None = None


def lemma_sum_check(mps: FiniteMPS, A, eps, gamma) -> LemmaSumReport:
    """m in R_eps and n in R_gamma imply m + n in R_{eps+gamma}; with upper d(R) = nu(A)
    and gamma < 1/2 also d(R_gamma + R_gamma) = d(R_gamma) = d(R)."""
    eps, gamma = Fraction(eps), Fraction(gamma)
    if eps + gamma >= 1:
        raise ValueError("need eps + gamma < 1")
    A = mps.check_subset(A)
    Re = gamma_return_set(mps, A, eps)
    Rg = gamma_return_set(mps, A, gamma)
    Reg = gamma_return_set(mps, A, eps + gamma)
    L = mps.period
    ok, checked = True, 0
    for m in range(L):
        if m not in Re:
            continue
        for n in range(L):
            if n in Rg:
                checked += 1
                ok = ok and (m + n) in Reg
    mu = mps.measure(A)
    R = return_set(mps, A)
    rep = LemmaSumReport(ok, checked, arith.density(R) == mu and 0 < gamma < Fraction(1, 2))
    if rep.density_branch:
        d_sum = arith.density(arith.sumset(Rg, Rg))
        rep.densities = {"R": arith.density(R), "R_gamma": arith.density(Rg), "R_gamma+R_gamma": d_sum}
        rep.density_equal = len(set(rep.densities.values())) == 1
    return rep


# ---------------------------------------------------------------------------
# probes and sweeps


@dataclass
class TransferProbe:
    mu_C: Fraction
    d_AB: Fraction
    d_AC: Fraction
    d_BC: Fraction

    @property
    def lhs(self) -> Fraction:
        return self.mu_C * self.d_AB

    @property
    def rhs(self) -> Fraction:
        return self.d_AC * self.d_BC

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def transfer_inequality_probe(mps: FiniteMPS, A, B, C) -> TransferProbe:
    """Evaluate both sides of mu(C) d(R_{A,B}) <= d(R_{A,C}) d(R_{B,C}); reports only."""
    d = lambda X, Y: arith.density(transfer_set(mps, X, Y))  # noqa: E731
    return TransferProbe(mps.measure(C), d(A, B), d(A, C), d(B, C))


def integer_partitions(n: int, largest: int | None = None) -> Iterable[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def _cyclic_returns(mask: int, ell: int) -> int:
    """Residues m mod ell with A ∩ (A - m) nonempty, for A ⊆ Z/ell given as a bitmask."""
    out = 0
    for m in range(ell):
        if mask & _rot(mask, ell - m, ell):
            out |= 1 << m
    return out


def mean_ergodic_sweep(max_n: int = 10) -> dict:
    """lower d(R) >= nu(A) for every finite system with n <= max_n and every A.

    R does not depend on the (positive) weights, while nu(A) is a convex combination
    of the cycle ratios |A ∩ c| / |c| weighted by cycle masses. The supremum over
    weights is therefore the largest ratio, and checking d(R) against it covers every
    weighting; systems with zero-mass cycles are the smaller systems of the sweep.
    """
    checked, violations = 0, []
    for n in range(1, max_n + 1):
        for lengths in integer_partitions(n):
            L = math.lcm(*lengths)
            per_cycle = [[(_cyclic_returns(a, ell), Fraction(bin(a).count("1"), ell)) for a in range(1 << ell)]
                         for ell in lengths]
            for combo in itertools.product(*per_cycle):
                if all(r == Fraction(0) for _, r in combo):
                    continue
                hits = 0
                for m in range(L):
                    if any(ret >> (m % ell) & 1 for (ret, _), ell in zip(combo, lengths)):
                        hits += 1
                dR = Fraction(hits, L)
                sup_mu = max(r for _, r in combo)
                checked += 1
                if dR < sup_mu:
                    violations.append((lengths, combo))
    return {"checked": checked, "violations": violations}


def partition_sweep(max_n: int = 10) -> dict:
    """All rotations Z/n with uniform measure and all nonempty A: when d(R) = nu(A) the shift partition exists."""
    checked, applicable, counter = 0, 0, []
    for n in range(1, max_n + 1):
        mps = FiniteMPS.rotation(n)
        for a in range(1, 1 << n):
            A = _elems(a)
            rep = verify_thm_partition(mps, A)
            checked += 1
            if rep.equality_applicable:
                applicable += 1
                if not rep.equality_holds:
                    counter.append((n, A))
    return {"checked": checked, "applicable": applicable, "counterexamples": counter}


def sum_closure_sweep(max_n: int = 7) -> dict:
    """Closure of gamma-return sets under addition for all cycle types, all A, and all
    thresholds realised by correlation values (plus midpoints)."""
    checked, failures = 0, []
    for n in range(1, max_n + 1):
        for lengths in integer_partitions(n):
            mps = FiniteMPS.from_cycles(lengths)
            for a in range(1, 1 << n):
                A = _elems(a)
                mu = mps.measure(A)
                grid = threshold_grid([1 - v / mu for v in correlation(mps, A)], Fraction(0), Fraction(1))
                for e in grid:
                    for g in grid:
                        if e + g >= 1:
                            continue
                        rep = lemma_sum_check(mps, A, e, g)
                        checked += 1
                        if not rep.closure_holds:
                            failures.append((lengths, A, e, g))
    return {"checked": checked, "failures": failures}


def transfer_probe_sweep(samples: int = 200, max_n: int = 8, seed: int = 0) -> dict:
    """Random rotations and subsets; counts of the transfer inequality holding. Data only."""
    rng = random.Random(seed)
    held, failed = 0, []
    for _ in range(samples):
        n = rng.randint(2, max_n)
        mps = FiniteMPS.rotation(n)
        sets = [frozenset(x for x in range(n) if rng.random() < 0.5) or frozenset({rng.randrange(n)})
                for _ in range(3)]
        probe = transfer_inequality_probe(mps, *sets)
        if probe.holds:
            held += 1
        else:
            failed.append((n, [sorted(s) for s in sets], str(probe.lhs), str(probe.rhs)))
    return {"samples": samples, "held": held, "failed": failed}


def nonergodic_fixture() -> tuple[FiniteMPS, frozenset]:
    """Two-cycle plus seven-cycle, one point of A in each, almost all mass on the two-cycle.

    nu(A) = 139/280 and R = 2N ∪ 7N with d(R) = 4/7, so d(R) <= (1+eta) nu(A) with
    eta = 21/139 < 1/5 while R is not of the form kN.
    """
    mps = FiniteMPS.from_cycles([2, 7], [Fraction(99, 100), Fraction(1, 100)])
    return mps, frozenset({0, 2})
