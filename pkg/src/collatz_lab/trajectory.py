"""Forward orbits under the shortcut map and the reduced map on class C2.

`orbit` records per-step rules, step counts and peaks; `converges` is the
lean inner loop used by range sweeps; `correspondence` checks that the
reduced orbit of a C2 value is exactly the C2 subsequence of its full
orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core_map import (
    ReducedRule,
    ResidueClass,
    Rule,
    reduced_step,
    residue_class,
    step,
)

#: Orbits longer than this keep only their leading values (statistics stay exact).
DEFAULT_VALUE_CAP = 100_000


class BudgetExhaustedError(RuntimeError):
    """An orbit hit its step budget before reaching a conclusion."""


@dataclass(frozen=True)
class Trajectory:
    """An orbit together with the rule fired at each step.

    `values` includes the start and the last value reached; `rules[i]` is
    the rule applied at `values[i]`.  When the orbit outgrows the storage
    cap, `values`/`rules` keep only the leading entries (`truncated` is
    set) while `steps`, `peak` and `final` remain exact.
    """

    start: int
    values: tuple[int, ...]
    rules: tuple[Rule, ...] | tuple[ReducedRule, ...]
    steps: int
    peak: int
    final: int
    truncated: bool = False


class OrbitOutcome(Enum):
    REACHED_TARGET = "reached-target"
    DROPPED_BELOW_FLOOR = "dropped-below-floor"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class OrbitStatus:
    """Result of a convergence probe: how it stopped and where.

    `final` and `peak` let callers resume verification below a range floor
    and aggregate sweep statistics without re-running the orbit.
    """

    outcome: OrbitOutcome
    steps_used: int
    final: int
    peak: int


def orbit(x: int, budget: int, target: int, value_cap: int = DEFAULT_VALUE_CAP) -> Trajectory:
    """Iterate the forward map from x until `target` is hit or `budget` steps elapse.

    Budget exhaustion is encoded in the returned length (steps == budget
    and final != target), not raised as an error.
    """
    if x < 1:
        raise ValueError(f"map domain is x >= 1, got {x}")
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    values = [x]
    rules: list[Rule] = []
    v = x
    peak = x
    steps = 0
    truncated = False
    while v != target and steps < budget:
        v, rule = step(v)
        steps += 1
        if v > peak:
            peak = v
        if len(values) < value_cap:
            values.append(v)
            rules.append(rule)
        else:
            truncated = True
    return Trajectory(
        start=x,
        values=tuple(values),
        rules=tuple(rules),
        steps=steps,
        peak=peak,
        final=v,
        truncated=truncated,
    )


def converges(x: int, budget: int, floor: int) -> OrbitStatus:
    """Track the orbit of x until it reaches 1, drops below `floor`, or runs out of budget.

    The below-floor exit is a sound convergence proof only when every value
    below `floor` is already verified; ascending sweeps guarantee that, and
    the caller owns that guarantee.
    """
    if x < 1:
        raise ValueError(f"map domain is x >= 1, got {x}")
    v = x
    steps = 0
    peak = x
    while True:
        if v == 1:
            return OrbitStatus(OrbitOutcome.REACHED_TARGET, steps, v, peak)
        if v < floor:
            return OrbitStatus(OrbitOutcome.DROPPED_BELOW_FLOOR, steps, v, peak)
        if steps >= budget:
            return OrbitStatus(OrbitOutcome.BUDGET_EXHAUSTED, steps, v, peak)
        # Inline arithmetic: this loop dominates range sweeps.  Agreement
        # with step() is pinned by tests.
        if v & 1:
            v = (3 * v + 1) >> 1
            if v > peak:
                peak = v
        else:
            v >>= 1
        steps += 1


def reduced_orbit(x: int, budget: int, value_cap: int = DEFAULT_VALUE_CAP) -> Trajectory:
    """Iterate the reduced map from x (in C2) until 2 is hit or `budget` steps elapse."""
    if residue_class(x) is not ResidueClass.C2:
        raise ValueError(f"reduced orbits start in class C2, got {x}")
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    values = [x]
    rules: list[ReducedRule] = []
    v = x
    peak = x
    steps = 0
    truncated = False
    while v != 2 and steps < budget:
        v, rule = reduced_step(v)
        steps += 1
        if v > peak:
            peak = v
        if len(values) < value_cap:
            values.append(v)
            rules.append(rule)
        else:
            truncated = True
    return Trajectory(
        start=x,
        values=tuple(values),
        rules=tuple(rules),
        steps=steps,
        peak=peak,
        final=v,
        truncated=truncated,
    )


def correspondence(x: int, budget: int) -> bool:
    """Whether the C2 members of the full orbit of x equal its reduced orbit.

    The full orbit is run to target 2 (every orbit reaching 1 passes
    through 2 first, since 2 is the only predecessor of 1).  Both value
    sequences include the start and the terminal 2.  If either orbit fails
    to terminate within `budget`, the comparison is inconclusive and
    BudgetExhaustedError is raised — inconclusive is not false.
    """
    if residue_class(x) is not ResidueClass.C2:
        raise ValueError(f"correspondence is defined on class C2, got {x}")
    full = orbit(x, budget, 2, value_cap=budget + 1)
    if full.final != 2:
        raise BudgetExhaustedError(
            f"orbit of {x} did not reach 2 within {budget} steps"
        )
    reduced = reduced_orbit(x, budget, value_cap=budget + 1)
    if reduced.final != 2:
        raise BudgetExhaustedError(
            f"reduced orbit of {x} did not reach 2 within {budget} steps"
        )
    filtered = [v for v in full.values if v % 3 == 2]
    return filtered == list(reduced.values)
