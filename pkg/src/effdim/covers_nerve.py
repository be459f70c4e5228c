"""Finite open covers, nerves, and kappa-mappings with exact arithmetic.

Sets here are unions of formal balls read inside the unit box: under the
max metric a ball is an open axis cube, so every construction reduces to
rational box arithmetic.  The workhorse is the cell decomposition of a
box induced by the facets of finitely many cubes: membership in each
cube is constant on every cell, so coverage, multiplicity, intersection
and complement-distance queries are all decided exactly by inspecting
one representative per cell.

Carriers come in two kinds.  A point cloud is checked pointwise.  A
symbolic carrier is the depth-d approximant of a digit-defined
compactum, a finite union of closed grid cells, and is checked cell by
cell.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from ._lp import affine_gap
from ._rat import ZERO, ONE, max_dist, rat
from .ball_calculus import FormalBall, PreconditionError, RationalPoint
from .dimension_estimators import MengerDescriptor, PointCloud
from .fractal_spaces import BoundSeq

Bounds = tuple[tuple[Fraction, Fraction], ...]


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box given by per-axis [lo, hi] bounds."""

    bounds: Bounds

    def __post_init__(self) -> None:
        for lo, hi in self.bounds:
            if lo > hi:
                raise PreconditionError("box has an empty axis interval")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def contains(self, coords: Sequence[Fraction]) -> bool:
        return all(lo <= c <= hi for (lo, hi), c in zip(self.bounds, coords))


def _unit_bounds(dim: int) -> Bounds:
    return tuple((ZERO, ONE) for _ in range(dim))


def ball(center: Sequence, radius) -> FormalBall:
    return FormalBall(RationalPoint(tuple(rat(c) for c in center)), rat(radius))


def _cube(b: FormalBall) -> Bounds:
    return tuple((c - b.radius, c + b.radius) for c in b.center.coords)


@dataclass(frozen=True)
class OpenSet:
    """Union of formal balls, read relative to the unit box.

    The set is (union of open cubes) intersected with [0,1]^dim, hence
    open in the subspace topology even where a cube pokes past the box.
    """

    balls: tuple[FormalBall, ...]

    def __post_init__(self) -> None:
        if not self.balls:
            raise PreconditionError("an open set needs at least one ball")
        dims = {b.center.dim for b in self.balls}
        if len(dims) != 1:
            raise PreconditionError("balls of one set must share a dimension")

    @property
    def dim(self) -> int:
        return self.balls[0].center.dim

    def cubes(self) -> tuple[Bounds, ...]:
        return tuple(_cube(b) for b in self.balls)

    def contains(self, coords: Sequence[Fraction]) -> bool:
        if not all(ZERO <= c <= ONE for c in coords):
            return False
        return any(
            all(lo < c < hi for (lo, hi), c in zip(cube, coords))
            for cube in self.cubes()
        )


def open_set(*balls_: FormalBall) -> OpenSet:
    return OpenSet(tuple(balls_))


def interval_set(lo, hi) -> OpenSet:
    """The open interval (lo, hi) read inside [0,1], as a one-ball set."""
    lo, hi = rat(lo), rat(hi)
    return open_set(ball(((lo + hi) / 2,), (hi - lo) / 2))


# --- carriers --------------------------------------------------------------


@dataclass(frozen=True)
class SymbolicCarrier:
    """Depth-d approximant of a digit-defined compactum.

    The region is the union of the admissible closed grid cells at the
    stated depth; the admissible cells at shallower depths supply the
    refinement search with its width ladder.
    """

    descriptor: MengerDescriptor
    depth: int

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise PreconditionError("carrier depth must be nonnegative")

    @property
    def dim(self) -> int:
        return self.descriptor.m

    def resolution(self) -> Fraction:
        return self.descriptor.scale(self.depth)

    def width_at(self, k: int) -> Fraction:
        return self.descriptor.scale(k)

    def cells_at(self, k: int) -> tuple[Box, ...]:
        return _symbolic_cells(self.descriptor, k)

    def boxes(self) -> tuple[Box, ...]:
        return self.cells_at(self.depth)


@lru_cache(maxsize=None)
def _symbolic_cells(desc: MengerDescriptor, depth: int) -> tuple[Box, ...]:
    m, n = desc.m, desc.n
    per_level: list[list[tuple[int, ...]]] = []
    for j in range(depth):
        zj = desc.z(j)
        cols = [
            col
            for col in itertools.product(range(zj), repeat=m)
            if sum(1 for d in col if 0 < d < zj - 1) <= n
        ]
        per_level.append(cols)
    width = desc.scale(depth)
    out = []
    for combo in itertools.product(*per_level):
        lows = [ZERO] * m
        for j, col in enumerate(combo):
            s = desc.scale(j + 1)
            for i in range(m):
                lows[i] += col[i] * s
        out.append(Box(tuple((lo, lo + width) for lo in lows)))
    return tuple(out)


def interval_carrier(depth: int) -> SymbolicCarrier:
    """The unit interval presented as a dyadic grid of the given depth."""
    return SymbolicCarrier(MengerDescriptor(1, 1, BoundSeq.constant(3)), depth)


def cantor_carrier(depth: int) -> SymbolicCarrier:
    return SymbolicCarrier(MengerDescriptor(1, 0, BoundSeq.constant(3)), depth)


Carrier = PointCloud | SymbolicCarrier


def _carrier_dim(carrier: Carrier) -> int:
    return carrier.dim


# --- cell decompositions ---------------------------------------------------


def _axis_cells(lo: Fraction, hi: Fraction, cuts: Iterable[Fraction]):
    vals = sorted({lo, hi} | {c for c in cuts if lo < c < hi})
    out = []
    for t, v in enumerate(vals):
        out.append((v, v, v))
        if t + 1 < len(vals):
            nxt = vals[t + 1]
            out.append(((v + nxt) / 2, v, nxt))
    return out


def _iter_cells(box: Box, cubes: Sequence[Bounds]) -> Iterator[tuple[tuple[Fraction, ...], Bounds]]:
    """Cells of the facet arrangement of the cubes inside the box.

    Yields (representative, closure bounds); cube membership is constant
    on each cell, so the representative decides it for the whole cell.
    """
    per_axis = []
    for a, (lo, hi) in enumerate(box.bounds):
        cuts = [c[a][0] for c in cubes] + [c[a][1] for c in cubes]
        per_axis.append(_axis_cells(lo, hi, cuts))
    for combo in itertools.product(*per_axis):
        rep = tuple(c[0] for c in combo)
        closure = tuple((c[1], c[2]) for c in combo)
        yield rep, closure


def _in_cube(coords: Sequence[Fraction], cube: Bounds) -> bool:
    return all(lo < c < hi for (lo, hi), c in zip(cube, coords))


def _carrier_masks(members: Sequence[OpenSet], carrier: Carrier) -> set[frozenset[int]]:
    """Distinct membership patterns realized somewhere on the carrier."""
    all_cubes = [cube for m in members for cube in m.cubes()]
    masks: set[frozenset[int]] = set()
    if isinstance(carrier, PointCloud):
        for p in carrier.points:
            masks.add(frozenset(i for i, m in enumerate(members) if m.contains(p)))
        return masks
    for box in carrier.boxes():
        for rep, _ in _iter_cells(box, all_cubes):
            masks.add(
                frozenset(
                    i
                    for i, m in enumerate(members)
                    if any(_in_cube(rep, cube) for cube in m.cubes())
                )
            )
    return masks


def _mult_exceeds(members: Sequence[OpenSet], carrier: Carrier, limit: int) -> bool:
    """Early-exit test for some carrier point inside more than limit members."""
    if isinstance(carrier, PointCloud):
        return any(
            sum(1 for m in members if m.contains(p)) > limit for p in carrier.points
        )
    all_cubes = [cube for m in members for cube in m.cubes()]
    for box in carrier.boxes():
        for rep, _ in _iter_cells(box, all_cubes):
            hits = 0
            for m in members:
                if any(_in_cube(rep, cube) for cube in m.cubes()):
                    hits += 1
                    if hits > limit:
                        return True
    return False


def _first_uncovered(members: Sequence[OpenSet], carrier: Carrier):
    """A carrier point no member contains, or None when covered."""
    if isinstance(carrier, PointCloud):
        for p in carrier.points:
            if not any(m.contains(p) for m in members):
                return p
        return None
    all_cubes = [cube for m in members for cube in m.cubes()]
    for box in carrier.boxes():
        for rep, _ in _iter_cells(box, all_cubes):
            if not any(any(_in_cube(rep, c) for c in m.cubes()) for m in members):
                return rep
    return None


@dataclass(frozen=True)
class FiniteCover:
    """Finitely many ball-union sets covering a carrier exactly.

    Construction verifies coverage unless validate=False is passed; the
    escape hatch exists so that error paths of the cover operations can
    be exercised on deliberately broken families.
    """

    members: tuple[OpenSet, ...]
    carrier: Carrier
    parents: tuple[int, ...] | None = None
    validate: bool = True

    def __post_init__(self) -> None:
        if not self.members:
            raise PreconditionError("empty cover")
        dims = {m.dim for m in self.members} | {_carrier_dim(self.carrier)}
        if len(dims) != 1:
            raise PreconditionError("cover members and carrier disagree on dimension")
        if self.validate:
            bad = _first_uncovered(self.members, self.carrier)
            if bad is not None:
                raise PreconditionError("carrier point not covered by any member")

    @property
    def dim(self) -> int:
        return _carrier_dim(self.carrier)


# --- diameters and complements ---------------------------------------------


def _pieces_within(s: OpenSet, region: Sequence[Box]) -> list[Bounds]:
    """Closures of the nonempty (cube ∩ region-box) fragments."""
    out = []
    for box in region:
        for cube in s.cubes():
            bounds = []
            ok = True
            for (blo, bhi), (clo, chi) in zip(box.bounds, cube):
                lo, hi = max(blo, clo), min(bhi, chi)
                if lo < hi or (blo == bhi and clo < blo < chi):
                    bounds.append((lo, hi))
                else:
                    ok = False
                    break
            if ok:
                out.append(tuple(bounds))
    return out


def _diam_within(s: OpenSet, carrier: Carrier) -> Fraction:
    if isinstance(carrier, PointCloud):
        inside = [p for p in carrier.points if s.contains(p)]
        best = ZERO
        for i, p in enumerate(inside):
            for q in inside[i:]:
                best = max(best, max_dist(p, q))
        return best
    pieces = _pieces_within(s, carrier.boxes())
    best = ZERO
    for i, a in enumerate(pieces):
        for b in pieces[i:]:
            gap = max(
                max(ahi - blo, bhi - alo)
                for (alo, ahi), (blo, bhi) in zip(a, b)
            )
            best = max(best, gap)
    return best


def cover_mesh(U: FiniteCover) -> Fraction:
    """Largest member diameter measured inside the carrier region."""
    return max(_diam_within(m, U.carrier) for m in U.members)


def _dist_to_bounds(coords: Sequence[Fraction], bounds: Bounds) -> Fraction:
    d = ZERO
    for c, (lo, hi) in zip(coords, bounds):
        if c < lo:
            d = max(d, lo - c)
        elif c > hi:
            d = max(d, c - hi)
    return d


def complement_distance(coords: Sequence[Fraction], s: OpenSet, box: Box | None = None):
    """Exact distance from a point to box minus the set; None if empty.

    The complement of a cube union in a box is the union of the closures
    of the arrangement cells missed by every cube, so the minimum of the
    exact point-to-cell distances is the exact distance.
    """
    if box is None:
        box = Box(_unit_bounds(s.dim))
    cubes = s.cubes()
    if len(cubes) == 1:
        # single cube: the complement is a union of axis slabs, one per
        # cube face that has not left the box
        cube = cubes[0]
        if not all(lo < c < hi for (lo, hi), c in zip(cube, coords)):
            return ZERO
        best = None
        for a, ((clo, chi), (blo, bhi)) in enumerate(zip(cube, box.bounds)):
            if clo >= blo:
                d = coords[a] - clo
                best = d if best is None else min(best, d)
            if chi <= bhi:
                d = chi - coords[a]
                best = d if best is None else min(best, d)
        return best
    best = None
    for rep, closure in _iter_cells(box, cubes):
        if not any(_in_cube(rep, cube) for cube in cubes):
            d = _dist_to_bounds(coords, closure)
            best = d if best is None else min(best, d)
    return best


# --- cover operations ------------------------------------------------------


def cover_multiplicity(U: FiniteCover) -> int:
    """Largest number of members sharing a carrier point."""
    return max(len(mask) for mask in _carrier_masks(U.members, U.carrier))


def nerve_of(U: FiniteCover, geometry: Sequence[RationalPoint] | None = None) -> "Nerve":
    """Faces are exactly the subfamilies meeting in a carrier point."""
    masks = _carrier_masks(U.members, U.carrier)
    faces: set[frozenset[int]] = set()
    for mask in masks:
        for r in range(1, len(mask) + 1):
            faces.update(frozenset(c) for c in itertools.combinations(sorted(mask), r))
    return Nerve(len(U.members), frozenset(faces), tuple(geometry) if geometry else None)


@dataclass(frozen=True)
class Nerve:
    vertex_count: int
    faces: frozenset[frozenset[int]]
    geometry: tuple[RationalPoint, ...] | None = None

    def validate(self) -> None:
        for f in self.faces:
            if not f or not all(0 <= v < self.vertex_count for v in f):
                raise PreconditionError("face with out-of-range vertex")
            for v in f:
                if f - {v} and (f - {v}) not in self.faces:
                    raise PreconditionError("faces are not downward closed")
        for v in range(self.vertex_count):
            if frozenset({v}) not in self.faces:
                raise PreconditionError("missing singleton face")

    def dimension(self) -> int:
        return max(len(f) for f in self.faces) - 1 if self.faces else -1


def kappa_map(x, U: FiniteCover, vertices: Sequence[RationalPoint]) -> RationalPoint:
    """Convex combination of vertices weighted by depth inside each member.

    The weight of member i is the exact distance from x to the part of
    the unit box outside that member, so the support is exactly the set
    of members containing x and the weights sum to 1 after normalizing.
    """
    coords = x.coords if isinstance(x, RationalPoint) else tuple(rat(c) for c in x)
    if len(vertices) != len(U.members):
        raise PreconditionError("one vertex per cover member is required")
    weights = []
    for m in U.members:
        d = complement_distance(coords, m)
        if d is None:
            raise PreconditionError("member complement is empty; kappa weight undefined")
        weights.append(d)
    total = sum(weights)
    if total == 0:
        raise PreconditionError("uncovered point")
    tdim = vertices[0].dim
    out = [ZERO] * tdim
    for w, p in zip(weights, vertices):
        if w:
            for a in range(tdim):
                out[a] += w * p.coords[a] / total
    return RationalPoint(tuple(out))


# --- shrinkings ------------------------------------------------------------


def _shrunk_box(cube: Bounds, pull: Fraction) -> Box | None:
    bounds = []
    for lo, hi in cube:
        nlo = ZERO if lo < ZERO else lo + pull
        nhi = ONE if hi > ONE else hi - pull
        if nlo > nhi:
            return None
        bounds.append((min(max(nlo, ZERO), ONE), min(max(nhi, ZERO), ONE)))
    return Box(tuple(bounds))


def _shrunk_set(s: OpenSet, pull: Fraction) -> OpenSet | None:
    balls = [FormalBall(b.center, b.radius - pull) for b in s.balls if b.radius > pull]
    return OpenSet(tuple(balls)) if balls else None


def _closed_family_covers(family: Sequence[tuple[Box, ...]], carrier: Carrier) -> bool:
    if isinstance(carrier, PointCloud):
        return all(
            any(b.contains(p) for boxes in family for b in boxes)
            for p in carrier.points
        )
    cubes = [b.bounds for boxes in family for b in boxes]
    for box in carrier.boxes():
        for rep, _ in _iter_cells(box, cubes):
            if not any(b.contains(rep) for boxes in family for b in boxes):
                return False
    return True


def shrink_cover(U: FiniteCover) -> tuple[tuple[tuple[Box, ...], ...], tuple[OpenSet, ...]]:
    """Closed boxes F and open sets V with V_k ⊆ F_k ⊆ U_k, V covering.

    The margin is the smallest over carrier representatives of the best
    depth inside a member.  F pulls each cube face in by half the margin
    except faces already outside the unit box, which stay put; V shrinks
    every ball radius by three quarters of the margin.  Both families
    are verified to cover exactly, halving the margin when the
    representative-based estimate was too coarse.
    """
    units: list[tuple[Fraction, ...]]
    if isinstance(U.carrier, PointCloud):
        units = [p for p in U.carrier.points]
    else:
        all_cubes = [cube for m in U.members for cube in m.cubes()]
        units = [
            rep
            for box in U.carrier.boxes()
            for rep, _ in _iter_cells(box, all_cubes)
        ]
    lam = None
    for u in units:
        depth = ZERO
        for m in U.members:
            d = complement_distance(u, m)
            d = ONE if d is None else min(d, ONE)
            depth = max(depth, d)
        if depth == 0:
            raise PreconditionError("no positive margin")
        lam = depth if lam is None else min(lam, depth)
    if lam is None:
        raise PreconditionError("no positive margin")
    for _ in range(64):
        closed = []
        open_ = []
        ok = True
        for m in U.members:
            boxes = tuple(
                b for b in (_shrunk_box(cube, lam / 2) for cube in m.cubes()) if b
            )
            v = _shrunk_set(m, lam * 3 / 4)
            if not boxes or v is None:
                ok = False
                break
            closed.append(boxes)
            open_.append(v)
        if ok and _closed_family_covers(closed, U.carrier) and _first_uncovered(open_, U.carrier) is None:
            return tuple(closed), tuple(open_)
        lam /= 2
    raise PreconditionError("no positive margin")


# --- refinement search -----------------------------------------------------


def _subset_within(inner: OpenSet, outer: OpenSet, carrier: Carrier) -> bool:
    if isinstance(carrier, PointCloud):
        return all(outer.contains(p) for p in carrier.points if inner.contains(p))
    cubes = list(inner.cubes()) + list(outer.cubes())
    for box in carrier.boxes():
        for rep, _ in _iter_cells(box, cubes):
            if any(_in_cube(rep, c) for c in inner.cubes()) and not any(
                _in_cube(rep, c) for c in outer.cubes()
            ):
                return False
    return True


def _grid_cells_for_cloud(cloud: PointCloud, w: Fraction) -> list[tuple[Fraction, ...]]:
    """Lower corners of the w-grid cells that touch some cloud point."""
    top = int(1 / w) - 1
    corners = set()
    for p in cloud.points:
        ranges = []
        for c in p:
            j0 = (c / w).numerator // (c / w).denominator
            opts = [
                j
                for j in (j0 - 1, j0)
                if 0 <= j <= top and j * w <= c <= (j + 1) * w
            ]
            ranges.append(opts)
        for combo in itertools.product(*ranges):
            corners.add(tuple(k * w for k in combo))
    return sorted(corners)


def _candidate_families(U: FiniteCover, k: int) -> Iterator[tuple[OpenSet, ...]]:
    """Tight then padded ball families on the width-k grid over the carrier."""
    carrier = U.carrier
    dim = U.dim
    if isinstance(carrier, SymbolicCarrier):
        w = carrier.width_at(k)
        centers = [
            tuple((lo + hi) / 2 for lo, hi in cell.bounds)
            for cell in carrier.cells_at(k)
        ]
    else:
        w = Fraction(1, 2**k)
        centers = [
            tuple(c + w / 2 for c in corner)
            for corner in _grid_cells_for_cloud(carrier, w)
        ]
    for radius in (w / 2, w):
        members = []
        for c in centers:
            s = open_set(ball(c, radius))
            if isinstance(carrier, PointCloud):
                keep = any(s.contains(p) for p in carrier.points)
            else:
                keep = bool(_pieces_within(s, carrier.boxes()))
            if keep:
                members.append(s)
        if members:
            yield tuple(members)


def refine_cover(
    U: FiniteCover,
    target_mult: int,
    mesh: Fraction,
    budget: int | None = None,
) -> FiniteCover:
    """Search widths coarse to fine for a refinement meeting both targets.

    Every candidate family is checked exactly: coverage, mesh inside the
    carrier, multiplicity, and a parent member containing each new set.
    The width ladder bottoms out two subdivision levels past the carrier
    resolution (symbolic) or when the family budget runs out.
    """
    mesh = rat(mesh)
    if target_mult < 1:
        raise PreconditionError("target multiplicity must be at least 1")
    if budget is None:
        budget = 64
    tried = 0
    k = 0
    while True:
        if isinstance(U.carrier, SymbolicCarrier):
            if k > U.carrier.depth + 2:
                raise PreconditionError("search exhausted")
        for members in _candidate_families(U, k):
            tried += 1
            if tried > budget:
                raise PreconditionError("search exhausted")
            if _first_uncovered(members, U.carrier) is not None:
                continue
            if _mult_exceeds(members, U.carrier, target_mult):
                continue
            if any(_diam_within(s, U.carrier) > mesh for s in members):
                continue
            parents = []
            for s in members:
                parent = next(
                    (
                        i
                        for i, big in enumerate(U.members)
                        if _subset_within(s, big, U.carrier)
                    ),
                    None,
                )
                if parent is None:
                    break
                parents.append(parent)
            if len(parents) != len(members):
                continue
            return FiniteCover(members, U.carrier, parents=tuple(parents))
        k += 1
        if tried >= budget:
            raise PreconditionError("search exhausted")


# --- general position ------------------------------------------------------


def _rank(rows: list[list[Fraction]]) -> int:
    mat = [row[:] for row in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for col in range(cols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = mat[rank][col]
        mat[rank] = [v / inv for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def _affinely_independent(points: Sequence[Sequence[Fraction]]) -> bool:
    if len(points) <= 1:
        return True
    base = points[0]
    dirs = [[c - b for c, b in zip(p, base)] for p in points[1:]]
    return _rank(dirs) == len(dirs)


def _span_meets(points: Sequence[Sequence[Fraction]], sub: Sequence[Sequence[Fraction]]) -> bool:
    """Does the affine hull of the points meet the affine hull of sub?"""
    base = points[0]
    dirs = [[c - b for c, b in zip(p, base)] for p in points[1:]]
    sbase = sub[0]
    sdirs = [[c - b for c, b in zip(p, sbase)] for p in sub[1:]]
    combined = dirs + sdirs
    diff = [s - b for s, b in zip(sbase, base)]
    if not combined:
        return diff == [ZERO] * len(diff)
    return _rank(combined) == _rank(combined + [diff])


def general_position(
    points: Sequence,
    eps: Fraction,
    avoid: Sequence[Sequence[Sequence[Fraction]]] = (),
    budget: int = 200_000,
) -> tuple[RationalPoint, ...]:
    """Perturb each point by less than eps into general position.

    After the scan, every subset of at most m+1 output points is
    affinely independent, and the affine span of any at most m - dim(L)
    outputs misses each avoid flat L.  Candidates run over dyadic grids
    of increasing denominator in lexicographic order, so the result is
    deterministic.
    """
    eps = rat(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    pts = [
        list(p.coords) if isinstance(p, RationalPoint) else [rat(c) for c in p]
        for p in points
    ]
    if not pts:
        return ()
    m = len(pts[0])
    avoid_flats = [[[rat(c) for c in p] for p in flat] for flat in avoid]
    avoid_dims = []
    for flat in avoid_flats:
        base = flat[0]
        dirs = [[c - b for c, b in zip(p, base)] for p in flat[1:]]
        avoid_dims.append(_rank(dirs) if dirs else 0)

    placed: list[list[Fraction]] = []

    def admissible(candidate: list[Fraction]) -> bool:
        chosen = placed + [candidate]
        i = len(chosen) - 1
        for size in range(1, min(m + 1, len(chosen)) + 1):
            for combo in itertools.combinations(range(i), size - 1):
                subset = [chosen[c] for c in combo] + [candidate]
                if not _affinely_independent(subset):
                    return False
        for flat, fdim in zip(avoid_flats, avoid_dims):
            limit = m - fdim
            for size in range(1, min(limit, len(chosen)) + 1):
                for combo in itertools.combinations(range(i), size - 1):
                    subset = [chosen[c] for c in combo] + [candidate]
                    if _span_meets(subset, flat):
                        return False
        return True

    steps = 0
    for p in pts:
        if admissible(p):
            placed.append(p)
            continue
        found = False
        level = 2
        fresh = True
        while not found:
            denom = 2**level
            radius = math.floor(eps * denom) - 1
            if radius >= 1:
                for offs in itertools.product(range(-radius, radius + 1), repeat=m):
                    if all(o == 0 for o in offs):
                        continue
                    if not fresh and all(o % 2 == 0 for o in offs):
                        continue
                    steps += 1
                    if steps > budget:
                        raise PreconditionError("budget exceeded")
                    cand = [c + Fraction(o, denom) for c, o in zip(p, offs)]
                    if not all(ZERO <= c <= ONE for c in cand):
                        continue
                    if admissible(cand):
                        placed.append(cand)
                        found = True
                        break
                fresh = False
            level += 1
            if level > 40:
                raise PreconditionError("budget exceeded")
    return tuple(RationalPoint(tuple(p)) for p in placed)


# --- (eps; eta) certificates ----------------------------------------------


@dataclass(frozen=True)
class EpsEtaCertificate:
    """Record that close images force close sources on the checked pairs."""

    eps: Fraction
    eta: Fraction
    witness_pairs: tuple[tuple[RationalPoint, RationalPoint], ...]

    def __post_init__(self) -> None:
        if self.eps <= 0 or self.eta <= 0:
            raise PreconditionError("eps and eta must be positive")

    def to_json(self) -> dict:
        from ._rat import fmt

        return {
            "eps": fmt(self.eps),
            "eta": fmt(self.eta),
            "pairs_checked": len(self.witness_pairs),
        }


def _as_point(p) -> RationalPoint:
    return p if isinstance(p, RationalPoint) else RationalPoint(tuple(rat(c) for c in p))


def verify_eps_eta(pairs: Sequence, eps, eta):
    """Certificate when eta-close images imply eps-close sources; else a pair.

    The returned counterexample is ((x, g(x)), (y, g(y))) for a violating
    combination.
    """
    eps, eta = rat(eps), rat(eta)
    graph = [(_as_point(x), _as_point(gx)) for x, gx in pairs]
    for a in range(len(graph)):
        for b in range(a + 1, len(graph)):
            (x, gx), (y, gy) = graph[a], graph[b]
            if max_dist(gx.coords, gy.coords) < eta and not max_dist(x.coords, y.coords) < eps:
                return (graph[a], graph[b])
    return EpsEtaCertificate(eps, eta, tuple(graph))


# --- one embedding step ----------------------------------------------------


def _pow2_at_most(value: Fraction) -> int:
    """Smallest v >= 0 with 2^-v <= value; requires value > 0."""
    v = 0
    r = ONE
    while r > value:
        r /= 2
        v += 1
    return v


def embed_step(
    sample: PointCloud,
    U: FiniteCover,
    avoid: Sequence = (),
    i: int = 1,
    j: int = 1,
) -> tuple[PointCloud, EpsEtaCertificate]:
    """One kappa-step: push the sample through a low-multiplicity cover.

    Vertices are member-ball centers moved into general position away
    from the avoid flats; eta is the largest power of two below the
    smallest gap between affine spans of disjoint nerve faces, and the
    exhaustive pair check on the sample seals the certificate.
    """
    m = sample.dim
    n = (m - 1) // 2
    mult = cover_multiplicity(U)
    if mult > n + 1:
        raise PreconditionError("cover multiplicity exceeds n + 1")
    mesh = cover_mesh(U)
    target = Fraction(1, 2**j)
    if mesh >= target:
        raise PreconditionError("mesh too coarse for the requested approximation")
    centers = [mbr.balls[0].center for mbr in U.members]
    wiggle = min((target - mesh) / 2, Fraction(1, 2 ** (j + 2)))
    vertices = general_position(centers, wiggle, avoid)
    faces = [mask for mask in _carrier_masks(U.members, U.carrier) if mask]
    min_gap = None
    for a in range(len(faces)):
        for b in range(a + 1, len(faces)):
            if not (faces[a] & faces[b]):
                ga = [vertices[t].coords for t in sorted(faces[a])]
                gb = [vertices[t].coords for t in sorted(faces[b])]
                gap = affine_gap(ga, gb)
                if gap == 0:
                    raise PreconditionError("general position failed to separate spans")
                min_gap = gap if min_gap is None else min(min_gap, gap)
    v = _pow2_at_most(min_gap) if min_gap is not None else 0
    eta = Fraction(1, 2**v)
    eps = Fraction(1, 2**i)
    images = []
    for p in sample.points:
        img = kappa_map(p, U, vertices)
        if max_dist(p, img.coords) >= target:
            raise PreconditionError("kappa image drifted beyond the approximation bound")
        images.append(img)
    outcome = verify_eps_eta(
        [(RationalPoint(p), img) for p, img in zip(sample.points, images)], eps, eta
    )
    if not isinstance(outcome, EpsEtaCertificate):
        raise PreconditionError("certificate verification failed on the sample")
    return PointCloud(m, tuple(p.coords for p in images)), outcome


# --- Menger push step ------------------------------------------------------


def menger_push_step(
    points: Sequence,
    level: int,
    z: BoundSeq,
    eps: Fraction,
) -> tuple[Fraction, ...]:
    """Apply the level map pushing mass toward the outer child intervals.

    On each level interval [a, b] the map is piecewise linear through
    (a, a), (c - eps, a + 3w'/4), (c + eps, b - 3w'/4), (b, b) where c is
    the midpoint and w' the child width, so everything left of c - eps
    lands in the first child and everything right of c + eps in the
    last; grid points stay fixed and the map strictly increases.
    """
    eps = rat(eps)
    if level < 0:
        raise PreconditionError("level must be nonnegative")
    w = z.scale(level)
    if not 0 < eps < w / 2:
        raise PreconditionError("eps too large for the level width")
    zi = z(level)
    child = w / zi
    out = []
    for p in points:
        x = rat(p)
        if not ZERO <= x <= ONE:
            raise PreconditionError("points must lie in the unit interval")
        idx = min((x / w).numerator // (x / w).denominator, int(1 / w) - 1)
        a = idx * w
        b = a + w
        c = (a + b) / 2
        knots = [
            (a, a),
            (c - eps, a + 3 * child / 4),
            (c + eps, b - 3 * child / 4),
            (b, b),
        ]
        for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
            if x0 <= x <= x1:
                out.append(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
                break
    return tuple(out)
