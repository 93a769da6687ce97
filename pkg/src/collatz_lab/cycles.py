"""Rule-sequence algebra, fixed points, and exhaustive small-cycle search.

A word over {R1, R2} composes to a single affine map x -> (3^p x + a) / 2^k
where p counts the R2 steps and k is the word length.  A cycle that applies
exactly that word must start at x = a / (2^k - 3^p), so candidate cycles
can be enumerated algebraically and then screened by whether the parities
along the orbit really drive the word.  Everything here is exact integer
or rational arithmetic; no floating point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .core_map import ResidueClass, Rule, residue_class, step
from .facts import RangeReport

#: Enumeration is 2^k words per length; lengths beyond this are refused.
MAX_SEARCH_LEN = 30


@dataclass(frozen=True)
class RuleSequence:
    """A non-empty word over {R1, R2}, applied left to right."""

    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise ValueError("rule sequence must be non-empty")
        if any(not isinstance(r, Rule) for r in self.rules):
            raise TypeError("rule sequence must contain Rule members only")

    @property
    def length(self) -> int:
        return len(self.rules)

    @property
    def r1_count(self) -> int:
        return self.length - self.r2_count

    @property
    def r2_count(self) -> int:
        return sum(1 for r in self.rules if r is Rule.R2)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __str__(self) -> str:
        return "-".join(r.name for r in self.rules)


@dataclass(frozen=True)
class AffineForm:
    """Composed action of a rule word: x -> (3**pow3 * x + addend) / 2**pow2.

    addend is 0 exactly when the word contains no R2.
    """

    pow3: int
    addend: int
    pow2: int

    def apply(self, x: int) -> Fraction:
        """Exact image of x, as a rational (integral iff the word is driven by x)."""
        return Fraction(3**self.pow3 * x + self.addend, 2**self.pow2)


def _coerce(seq: RuleSequence | Iterable[Rule]) -> RuleSequence:
    return seq if isinstance(seq, RuleSequence) else RuleSequence(tuple(seq))


def affine_form(seq: RuleSequence | Iterable[Rule]) -> AffineForm:
    """Compose a rule word into its affine normal form.

    Every rule contributes one halving; the j-th R2 (1-based, at 1-based
    position s_j among all rules) contributes 3^(r2-j) * 2^(s_j - 1) to the
    addend.  Equivalently: composing ((3^b x + c) / 2^j) with R2 maps
    c -> 3c + 2^j.
    """
    seq = _coerce(seq)
    r2_total = seq.r2_count
    addend = 0
    seen = 0
    for pos, rule in enumerate(seq.rules):
        if rule is Rule.R2:
            seen += 1
            addend += 3 ** (r2_total - seen) * (1 << pos)
    return AffineForm(pow3=r2_total, addend=addend, pow2=seq.length)


def drives(seq: RuleSequence | Iterable[Rule], x: int) -> bool:
    """Whether the orbit of x actually applies the word.

    The parity of the current value must select each rule in turn; if it
    does, the final value is checked to have returned to x.
    """
    seq = _coerce(seq)
    v = x
    for rule in seq.rules:
        v, fired = step(v)
        if fired is not rule:
            return False
    return v == x


def _minimal_period(rules: tuple[Rule, ...]) -> int:
    k = len(rules)
    for p in range(1, k + 1):
        if k % p == 0 and rules == rules[:p] * (k // p):
            return p
    return k


@dataclass(frozen=True)
class CycleCandidate:
    """A positive integer solution of form(x) = x for some rule word.

    `consistent` records whether the word is actually driven by x's
    parities (the algebraic equation is necessary, not sufficient).
    `simple` is False when the word is a repetition of a shorter word,
    i.e. the same cycle traversed more than once.
    """

    seq: RuleSequence
    x: int
    consistent: bool
    simple: bool


def fixed_point(seq: RuleSequence | Iterable[Rule]) -> CycleCandidate | None:
    """Solve form(x) = x for the word's affine form.

    With d = 2**pow2 - 3**pow3, a candidate exists only when d > 0, d
    divides the addend exactly, and the quotient is at least 1.  None
    encodes d <= 0, non-divisibility, or a zero quotient.
    """
    seq = _coerce(seq)
    form = affine_form(seq)
    d = (1 << form.pow2) - 3**form.pow3
    if d <= 0:
        return None
    # d > 0 is the exact-arithmetic form of the halving/tripling balance
    # bound r1_count > r2_count * (log2(3) - 1); never evaluated in floats.
    assert (1 << seq.length) > 3**seq.r2_count
    if form.addend % d:
        return None
    x = form.addend // d
    if x < 1:
        return None
    return CycleCandidate(
        seq=seq,
        x=x,
        consistent=drives(seq, x),
        simple=_minimal_period(seq.rules) == seq.length,
    )


def _mask_to_rules(mask: int, k: int) -> tuple[Rule, ...]:
    return tuple(Rule.R2 if (mask >> j) & 1 else Rule.R1 for j in range(k))


def search_cycles(max_len: int, diagnostic: bool = False) -> list[CycleCandidate]:
    """Enumerate every rule word of length <= max_len and collect cycle candidates.

    Returns parity-consistent candidates ordered by length, then
    lexicographically with R1 < R2.  With `diagnostic`, algebraic solutions
    whose parities fail to drive the word are included too (flagged
    consistent=False).
    """
    if not 1 <= max_len <= MAX_SEARCH_LEN:
        raise ValueError(
            f"max_len must be in [1, {MAX_SEARCH_LEN}] (2^k words per length), got {max_len}"
        )
    pow3 = [3**i for i in range(max_len + 1)]
    found: list[CycleCandidate] = []
    for k in range(1, max_len + 1):
        two_k = 1 << k
        for mask in range(two_k):
            # bit j set <=> R2 at position j
            r2 = mask.bit_count()
            d = two_k - pow3[r2]
            if d <= 0:
                continue
            addend = 0
            rank = 0
            m = mask
            while m:
                pos = (m & -m).bit_length() - 1
                rank += 1
                addend += (1 << pos) * pow3[r2 - rank]
                m &= m - 1
            if addend % d:
                continue
            if addend // d < 1:
                continue
            cand = fixed_point(RuleSequence(_mask_to_rules(mask, k)))
            assert cand is not None and cand.x == addend // d
            if cand.consistent or diagnostic:
                found.append(cand)
    found.sort(
        key=lambda c: (c.seq.length, tuple(0 if r is Rule.R1 else 1 for r in c.seq.rules))
    )
    return found


def cycle_values(candidate: CycleCandidate) -> tuple[int, ...]:
    """The values a consistent candidate visits, starting at x (length = word length)."""
    if not candidate.consistent:
        raise ValueError("cycle values are defined for consistent candidates only")
    values = [candidate.x]
    v = candidate.x
    for _ in range(candidate.seq.length - 1):
        v, _rule = step(v)
        values.append(v)
    return tuple(values)


def verify_no_small_cycles(range_max: int) -> RangeReport:
    """Check there are no 1-cycles and no 2-cycles besides {1, 2} on [1, range_max].

    For every x: step(x) != x, and step(step(x)) == x only for x in
    {1, 2}, whose mutual 2-cycle is additionally confirmed intact.
    """
    if range_max < 2:
        raise ValueError(f"range_max must be >= 2, got {range_max}")
    t0 = time.perf_counter()
    violations: list[tuple[int, str]] = []
    for x in range(1, range_max + 1):
        t1, _ = step(x)
        if t1 == x:
            violations.append((x, f"step({x}) = {x}: cycle of length one"))
            continue
        t2, _ = step(t1)
        if x in (1, 2):
            if t2 != x:
                violations.append((x, f"known 2-cycle through 1 and 2 broken at {x}"))
        elif t2 == x:
            violations.append((x, f"step^2({x}) = {x}: 2-cycle outside {{1, 2}}"))
    return RangeReport(
        fact_id="no-small-cycles",
        lo=1,
        hi=range_max,
        checked=range_max,
        violations=violations,
        elapsed=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class C0Chain:
    """Decomposition x = 2**halvings * odd_part of a multiple of 3.

    The odd part keeps the factor 3 (halving cannot remove it), so the
    whole forward chain x, x/2, ..., odd_part stays inside class C0 and
    each link has exactly one predecessor.
    """

    x: int
    halvings: int
    odd_part: int

    def values(self) -> tuple[int, ...]:
        """The chain x, x/2, ..., odd_part produced by the halvings."""
        return tuple(self.x >> i for i in range(self.halvings + 1))


def c0_chain(x: int) -> C0Chain:
    """Split x in C0 (x >= 3) into 2**i times its odd part."""
    if x < 3:
        raise ValueError(f"C0 chains start at 3, got {x}")
    if residue_class(x) is not ResidueClass.C0:
        raise ValueError(f"C0 chains are defined on multiples of 3, got {x}")
    i = (x & -x).bit_length() - 1
    q = x >> i
    assert q & 1 and q % 3 == 0
    return C0Chain(x=x, halvings=i, odd_part=q)


def verify_c0_structure(range_max: int) -> RangeReport:
    """Check the doubling-chain structure of class C0 on [1, range_max].

    Two claims per start: every x in C0 (x >= 3) splits as 2^i times an odd
    multiple of 3, and along every forward orbit the C0 positions form a
    prefix — once an orbit is outside C0 it never re-enters.  The sweep is
    ascending from 1 so each orbit may stop as soon as it drops below its
    start: the tail is a previously checked orbit.
    """
    if range_max < 1:
        raise ValueError(f"range_max must be >= 1, got {range_max}")
    t0 = time.perf_counter()
    violations: list[tuple[int, str]] = []
    budget = 10**6  # pure safety net; orbits here drop below start quickly
    for x in range(1, range_max + 1):
        in_c0 = residue_class(x) is ResidueClass.C0
        if in_c0 and x >= 3:
            chain = c0_chain(x)
            if chain.odd_part % 2 == 0 or chain.odd_part % 3 != 0:
                violations.append(
                    (x, f"odd part {chain.odd_part} is not an odd multiple of 3")
                )
        left_c0 = not in_c0
        v = x
        for _ in range(budget):
            if v == 1:
                break
            v, _rule = step(v)
            if v % 3 == 0:
                if left_c0:
                    violations.append((x, f"orbit re-entered C0 at {v}"))
                    break
            else:
                left_c0 = True
            if v < x:
                break
        else:
            raise RuntimeError(f"orbit of {x} exceeded the safety budget")
    return RangeReport(
        fact_id="c0-structure",
        lo=1,
        hi=range_max,
        checked=range_max,
        violations=violations,
        elapsed=time.perf_counter() - t0,
    )
