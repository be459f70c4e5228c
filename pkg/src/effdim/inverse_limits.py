"""Exact coding of points in inverse limits of piecewise-linear interval maps.

Maps are given by rational vertex lists with no constant segment, so
evaluation, preimage enumeration and composition all stay inside
Fraction arithmetic.  A point of the inverse limit is a backward
trajectory; its branch code records the starting value, the rank of
each backward choice among the sorted preimages, and the levels at
which the trajectory passes through a critical value.
"""

from __future__ import annotations

import functools
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from ._rat import fmt
from .ball_calculus import PreconditionError


@dataclass(frozen=True)
class PLMap:
    """A piecewise-linear self-map of [0,1] through rational vertices.

    Vertices must have strictly increasing x from 0 to 1 and no two equal
    consecutive y values, which keeps the map finite-to-one.
    """

    vertices: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        verts = tuple((Fraction(x), Fraction(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise ValueError("need at least two vertices")
        xs = [x for x, _ in verts]
        if xs[0] != 0 or xs[-1] != 1:
            raise ValueError("vertex x-range must run from 0 to 1")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("vertex x values must strictly increase")
        for (_, y0), (_, y1) in zip(verts, verts[1:]):
            if y0 == y1:
                raise ValueError("constant segments are not allowed")
        if any(not 0 <= y <= 1 for _, y in verts):
            raise ValueError("values must lie in [0,1]")
        object.__setattr__(self, "_xs", xs)

    def __call__(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        if not 0 <= x <= 1:
            raise PreconditionError("argument outside [0,1]")
        verts = self.vertices
        # Compositions evaluate maps with thousands of segments, so the
        # segment lookup must not scan linearly.
        i = min(bisect_right(self._xs, x), len(verts) - 1) - 1
        i = max(i, 0)
        (x0, y0), (x1, y1) = verts[i], verts[i + 1]
        return y0 + (x - x0) * (y1 - y0) / (x1 - x0)

    def segments(self):
        return tuple(zip(self.vertices, self.vertices[1:]))


def tent_map() -> PLMap:
    return PLMap(((Fraction(0), Fraction(0)), (Fraction(1, 2), Fraction(1)), (Fraction(1), Fraction(0))))


def five_segment_map() -> PLMap:
    """An increasing interval map with two interior folds and fixed endpoints."""
    pts = ((0, 0), (Fraction(1, 5), Fraction(1, 6)), (Fraction(2, 5), Fraction(4, 5)),
           (Fraction(3, 5), Fraction(1, 5)), (Fraction(4, 5), Fraction(5, 6)), (1, 1))
    return PLMap(tuple((Fraction(x), Fraction(y)) for x, y in pts))


def extrema_of(f: PLMap) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Interior local extrema: vertices where the slope changes sign.

    Returns (ex, ex_val) sorted ascending; ex_val keeps one copy per value.
    """
    verts = f.vertices
    ex = []
    for i in range(1, len(verts) - 1):
        left = verts[i][1] - verts[i - 1][1]
        right = verts[i + 1][1] - verts[i][1]
        if (left > 0) != (right > 0):
            ex.append(verts[i][0])
    ex_vals = sorted({f(x) for x in ex})
    return tuple(ex), tuple(ex_vals)


def preimages(f: PLMap, y: Fraction) -> tuple[Fraction, ...]:
    """All exact solutions of f(x) = y, sorted ascending."""
    y = Fraction(y)
    lo = min(v for _, v in f.vertices)
    hi = max(v for _, v in f.vertices)
    if not lo <= y <= hi:
        raise PreconditionError("value outside the range of the map")
    sols = set()
    for (x0, y0), (x1, y1) in f.segments():
        if min(y0, y1) <= y <= max(y0, y1):
            x = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if x0 <= x <= x1:
                sols.add(x)
    if not sols:
        raise PreconditionError("value outside the range of the map")
    return tuple(sorted(sols))


def compose(f: PLMap, g: PLMap) -> PLMap:
    """Exact composition x -> f(g(x)) as a PLMap."""
    cuts = {x for x, _ in g.vertices}
    for bx, _ in f.vertices:
        for (x0, y0), (x1, y1) in g.segments():
            if min(y0, y1) <= bx <= max(y0, y1):
                x = x0 + (bx - y0) * (x1 - x0) / (y1 - y0)
                if x0 <= x <= x1:
                    cuts.add(x)
    xs = sorted(cuts)
    verts = []
    for x in xs:
        y = f(g(x))
        if verts and verts[-1][1] == y:
            # merging would create a constant segment; keep maps honest by
            # nudging is not an option, so reject degenerate compositions
            raise PreconditionError("composition has a constant segment")
        verts.append((x, y))
    return PLMap(tuple(verts))


def iterate_map(f: PLMap, power: int) -> PLMap:
    if power < 1:
        raise PreconditionError("power must be at least 1")
    acc = f
    for _ in range(power - 1):
        acc = compose(f, acc)
    return acc


@functools.lru_cache(maxsize=64)
def _cycles_upto(f: PLMap, max_period: int) -> tuple[tuple[Fraction, ...], ...]:
    """Exact periodic cycles with period <= max_period, via fixed points of f^p."""
    cycles: list[tuple[Fraction, ...]] = []
    known: set[Fraction] = set()
    for p in range(1, max_period + 1):
        try:
            fp = iterate_map(f, p)
        except PreconditionError:
            break
        fixed = set()
        for (x0, y0), (x1, y1) in fp.segments():
            slope = (y1 - y0) / (x1 - x0)
            if slope == 1:
                if y0 == x0:
                    fixed.add(x0)
                    fixed.add(x1)
                continue
            x = (x0 * slope - y0) / (slope - 1)
            if x0 <= x <= x1:
                fixed.add(x)
        for x in sorted(fixed):
            if x in known:
                continue
            orbit = [x]
            cur = f(x)
            while cur != x:
                orbit.append(cur)
                cur = f(cur)
            if len(orbit) == p:
                cycles.append(tuple(orbit))
                known.update(orbit)
    return tuple(cycles)


@dataclass(frozen=True)
class OrbitReport:
    """Forward-orbit classification of a rational start point.

    kind is 'Preperiodic' (exact repeat: tail and period are exact),
    'AsymptoticallyPeriodic' (certified approach to an exact cycle within
    tolerance) or 'Unknown' (budget exhausted).
    """

    kind: str
    tail: int | None = None
    period: int | None = None
    cycle: tuple[Fraction, ...] = ()
    steps: int = 0
    final_distance: Fraction | None = None

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "steps": self.steps}
        if self.kind == "Preperiodic":
            out["tail"] = self.tail
            out["period"] = self.period
        if self.cycle:
            out["cycle"] = [fmt(c) for c in self.cycle]
        if self.final_distance is not None:
            out["final_distance"] = fmt(self.final_distance)
        return out


_DENOM_BIT_CAP = 20000


@functools.lru_cache(maxsize=64)
def _cycle_point_index(f: PLMap, max_period: int):
    cycles = _cycles_upto(f, max_period)
    entries = sorted(
        (pt, idx) for idx, cycle in enumerate(cycles) for pt in cycle
    )
    values = [pt for pt, _ in entries]
    owners = [idx for _, idx in entries]
    return cycles, values, owners


def orbit_analyze(
    f: PLMap,
    x0: Fraction,
    budget: int = 10_000,
    tol: Fraction = Fraction(1, 2**40),
    max_cycle_period: int = 8,
) -> OrbitReport:
    """Classify the forward orbit of x0 under f.

    Exact repeats are found by hashing orbit values.  Failing that, the orbit
    is compared against the exactly-detected cycles of period up to
    max_cycle_period: once within tol of a cycle and not receding, the orbit
    is certified AsymptoticallyPeriodic.  Otherwise Unknown after the budget.
    """
    x0 = Fraction(x0)
    if not 0 <= x0 <= 1:
        raise PreconditionError("start point outside [0,1]")
    if budget < 1:
        raise PreconditionError("budget must be positive")
    tol = Fraction(tol)
    cycles, cyc_values, cyc_owners = _cycle_point_index(f, max_cycle_period)
    seen: dict[Fraction, int] = {}
    x = x0
    for step in range(budget + 1):
        if x in seen:
            tail = seen[x]
            return OrbitReport("Preperiodic", tail=tail, period=step - tail, steps=step)
        seen[x] = step
        # The tolerance window is tiny, so candidate cycles come from a
        # bisect window over all cycle points instead of a full scan.
        lo = bisect_right(cyc_values, x - tol)
        hi = bisect_right(cyc_values, x + tol)
        for ci in sorted({cyc_owners[i] for i in range(lo, hi)}):
            cycle = cycles[ci]
            d = min(abs(x - pt) for pt in cycle)
            if 0 < d < tol:
                nxt = f(x)
                d_next = min(abs(nxt - pt) for pt in cycle)
                if d_next <= d:
                    return OrbitReport(
                        "AsymptoticallyPeriodic",
                        cycle=cycle,
                        steps=step,
                        final_distance=d,
                    )
        if x.denominator.bit_length() > _DENOM_BIT_CAP:
            return OrbitReport("Unknown", steps=step)
        if step < budget:
            x = f(x)
    return OrbitReport("Unknown", steps=budget)


# --- inverse systems and branch codes --------------------------------------


@dataclass(frozen=True)
class InverseSystem:
    """A level-indexed family of bonding maps; level n map carries X_{n+1} to X_n."""

    map_rule: Callable[[int], PLMap]

    @staticmethod
    def constant(f: PLMap) -> "InverseSystem":
        return InverseSystem(lambda n: f)

    def at(self, level: int) -> PLMap:
        if level < 0:
            raise ValueError("level must be nonnegative")
        return self.map_rule(level)


@dataclass(frozen=True)
class BranchCode:
    """Branch coding of a backward trajectory: start, choice word, critical levels."""

    x0: Fraction
    word: tuple[int, ...]
    ex_time: frozenset[int] = frozenset()

    def to_json(self) -> dict:
        return {
            "x0": fmt(self.x0),
            "word": list(self.word),
            "ex_time": sorted(self.ex_time),
        }


def decode_point(system: InverseSystem, code: BranchCode, depth: int | None = None) -> tuple[Fraction, ...]:
    """Backward trajectory selected by a branch word.

    Level n step picks the word[n]-th preimage (ascending order) of the
    current value under the level-n map.
    """
    depth = len(code.word) if depth is None else depth
    if depth > len(code.word):
        raise PreconditionError("word shorter than requested depth")
    traj = [Fraction(code.x0)]
    for n in range(depth):
        pre = preimages(system.at(n), traj[-1])
        k = code.word[n]
        if not 0 <= k < len(pre):
            raise PreconditionError(f"branch index {k} out of range at level {n}")
        traj.append(pre[k])
    return tuple(traj)


def encode_point(system: InverseSystem, trajectory: Sequence[Fraction]) -> BranchCode:
    """Recover the branch code of an exact backward trajectory.

    Verifies f_n(x_{n+1}) = x_n at every level and ranks each x_{n+1} among
    the sorted preimages of x_n; ex_time collects the levels whose value is a
    critical value of that level's map.
    """
    traj = [Fraction(x) for x in trajectory]
    if not traj:
        raise PreconditionError("empty trajectory")
    word = []
    ex_time = set()
    for n in range(len(traj) - 1):
        f = system.at(n)
        if f(traj[n + 1]) != traj[n]:
            raise PreconditionError(f"not a backward trajectory at level {n}")
        pre = preimages(f, traj[n])
        word.append(pre.index(traj[n + 1]))
    for n in range(len(traj)):
        try:
            f = system.at(n)
        except ValueError:
            break
        _, ex_vals = extrema_of(f)
        if traj[n] in ex_vals:
            ex_time.add(n)
    return BranchCode(traj[0], tuple(word), frozenset(ex_time))


@dataclass(frozen=True)
class BranchNode:
    """A node of the backward branching tree."""

    value: Fraction
    children: tuple["BranchNode", ...] = ()

    def leaf_count(self) -> int:
        if not self.children:
            return 1
        return sum(c.leaf_count() for c in self.children)

    def arity_profile(self) -> dict[int, int]:
        """How many internal nodes have each arity."""
        profile: dict[int, int] = {}
        stack = [self]
        while stack:
            node = stack.pop()
            if node.children:
                profile[len(node.children)] = profile.get(len(node.children), 0) + 1
                stack.extend(node.children)
        return profile

    def is_full_binary(self) -> bool:
        if not self.children:
            return True
        return len(self.children) == 2 and all(c.is_full_binary() for c in self.children)


def branching_tree(system: InverseSystem, x0: Fraction, depth: int) -> BranchNode:
    """Backward preimage tree from x0: node arity is the exact preimage count."""
    if depth < 0:
        raise PreconditionError("depth must be nonnegative")

    def build(value: Fraction, level: int) -> BranchNode:
        if level == depth:
            return BranchNode(value)
        pre = preimages(system.at(level), value)
        return BranchNode(value, tuple(build(p, level + 1) for p in pre))

    return build(Fraction(x0), 0)
