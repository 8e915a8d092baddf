"""Exact densities, popular differences and progression counts for eventually periodic sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .treespec import EventuallyPeriodicSet


@dataclass(frozen=True)
class DensityTriple:
    upper: Fraction
    lower: Fraction
    banach: Fraction

    def __post_init__(self) -> None:
        if not (0 <= self.lower <= self.upper <= self.banach <= 1):
            raise ValueError(f"inconsistent densities {self}")


def density(E: EventuallyPeriodicSet) -> Fraction:
    """Natural density; it exists for eventually periodic sets."""
    return Fraction(sum(E.period), len(E.period))


def densities(E: EventuallyPeriodicSet) -> DensityTriple:
    """Upper, lower and upper Banach density.

    Any window of length P (the period) lying past the preperiod holds exactly
    c = |members per period| points, and a window of length L holds at most
    c*ceil(L/P) + preperiod points, so the Banach limsup is also c/P.
    """
    d = density(E)
    return DensityTriple(d, d, d)


def window_max(E: EventuallyPeriodicSet, length: int) -> int:
    """Largest number of members in a window {M, ..., M+length-1}.

    Window counts are periodic in M once M passes the preperiod, so scanning
    M < preperiod + period covers every position.
    """
    top = len(E.preperiod) + len(E.period) + length
    prefix = [0]
    for n in range(top):
        prefix.append(prefix[-1] + (n in E))
    return max(prefix[m + length] - prefix[m] for m in range(len(E.preperiod) + len(E.period)))


def banach_window_scan(E: EventuallyPeriodicSet, max_length: int) -> list[tuple[int, Fraction]]:
    """Brute-force (length, max window average) for every window length up to max_length."""
    return [(L, Fraction(window_max(E, L), L)) for L in range(1, max_length + 1)]


def _shift_intersection(E: EventuallyPeriodicSet, m: int) -> EventuallyPeriodicSet:
    return E & E.shift(m)


def popular_differences(E: EventuallyPeriodicSet, mode: str = "upper") -> EventuallyPeriodicSet:
    """{m >= 0 : density of E ∩ (E - m) is positive}.

    Membership depends only on m mod P, so the result is periodic with period dividing P.
    Upper and Banach modes agree on eventually periodic sets because both densities
    of E ∩ (E - m) equal its natural density.
    """
    if mode not in ("upper", "banach"):
        raise ValueError("mode must be 'upper' or 'banach'")
    P = len(E.period)
    flags = tuple(density(_shift_intersection(E, m)) > 0 for m in range(P))
    return EventuallyPeriodicSet((), flags)


def progression_starts(E: EventuallyPeriodicSet, k: int, m: int) -> EventuallyPeriodicSet:
    """{n : n, n+k, ..., n+(m-1)k all in E}."""
    if k < 1 or m < 1:
        raise ValueError("need k >= 1 and m >= 1")
    out = E
    for i in range(1, m):
        out = out & E.shift(i * k)
    return out


def ap_density(E: EventuallyPeriodicSet, k: int, m: int, mode: str = "upper") -> Fraction:
    starts = progression_starts(E, k, m)
    triple = densities(starts)
    return triple.banach if mode == "banach" else triple.upper


def sumset(E: EventuallyPeriodicSet, F: EventuallyPeriodicSet) -> EventuallyPeriodicSet:
    """E + F = {a + b}; eventually periodic with period dividing lcm of the periods.

    Past pre(E) + pre(F) + L the indicator is L-periodic: a representation
    n = a + b can be moved by L on whichever summand is past its preperiod.
    """
    L = math.lcm(len(E.period), len(F.period))
    pre = len(E.preperiod) + len(F.preperiod) + 2 * L
    top = pre + L
    a_members = [a for a in range(top) if a in E]
    b_flags = [b in F for b in range(top)]
    hit = [False] * top
    for a in a_members:
        for b in range(top - a):
            if b_flags[b]:
                hit[a + b] = True
    return EventuallyPeriodicSet(tuple(hit[:pre]), tuple(hit[pre:top]))


@dataclass
class InverseReport:
    mode: str
    applicable: bool
    density: Fraction
    popular: EventuallyPeriodicSet
    popular_lower_density: Fraction
    ratio: Fraction | None = None
    k: int | None = None
    contains_kN: bool | None = None
    ap_densities: dict = field(default_factory=dict)
    conclusion_holds: bool | None = None
    note: str = ""


def _smallest_step(popular: EventuallyPeriodicSet) -> int | None:
    """Smallest k with kN contained in the popular-difference set."""
    P = len(popular.period) + len(popular.preperiod)
    for k in range(1, P + 1):
        if all((j * k) in popular for j in range(2 * P + 1)):
            return k
    return None


def verify_inverse_props(E: EventuallyPeriodicSet, mode: str = "upper", m_max: int = 10) -> InverseReport:
    """Check the inverse statements for popular differences.

    upper mode: hypothesis d(Δ) = d(E) > 0; conclusion kN ⊂ Δ, d(E) = 1/k and the
    k-step progression starts have density d(E) for every length m <= m_max.
    banach mode: hypothesis 0 < d_(Δ*) = β d*(E) with β < 3/2; conclusion kN ⊂ Δ*
    and positive Banach density of k-step progressions for (1 - 1/β)m < 1.
    """
    pop = popular_differences(E, mode)
    dE = densities(E)
    base = dE.upper if mode == "upper" else dE.banach
    dpop = densities(pop).lower
    report = InverseReport(mode, False, base, pop, dpop)
    if base == 0:
        report.note = "hypothesis not met: E has zero density"
        return report
    ratio = dpop / base
    report.ratio = ratio
    if mode == "upper":
        if densities(pop).upper != base:
            report.note = f"not applicable: density of popular differences {densities(pop).upper} != {base}"
            return report
    else:
        if not ratio < Fraction(3, 2):
            report.note = f"not applicable: ratio {ratio} >= 3/2"
            return report
    report.applicable = True
    k = _smallest_step(pop)
    report.k = k
    report.contains_kN = k is not None
    if k is None:
        report.conclusion_holds = False
        report.note = "no k with kN inside the popular differences"
        return report
    ok = True
    if mode == "upper":
        ok = base == Fraction(1, k)
    for m in range(2, m_max + 1):
        val = ap_density(E, k, m, mode)
        report.ap_densities[m] = val
        if mode == "upper":
            ok = ok and val == base
        elif (1 - 1 / ratio) * m < 1:
            ok = ok and val > 0
    report.conclusion_holds = ok
    return report
