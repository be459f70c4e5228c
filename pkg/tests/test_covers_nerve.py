"""Tests for covers, nerves, kappa maps, shrinkings and embedding steps."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from effdim import (
    BoundSeq,
    Box,
    EpsEtaCertificate,
    FiniteCover,
    Nerve,
    OpenSet,
    PointCloud,
    PreconditionError,
    RationalPoint,
    SymbolicCarrier,
    ball,
    cantor_carrier,
    carpet_descriptor,
    complement_distance,
    cover_mesh,
    cover_multiplicity,
    embed_step,
    general_position,
    interval_carrier,
    interval_set,
    kappa_map,
    menger_push_step,
    nerve_of,
    open_set,
    refine_cover,
    shrink_cover,
    verify_eps_eta,
)
from effdim._lp import affine_gap

F = Fraction


def two_sided_cover(depth: int = 2) -> FiniteCover:
    # [0, 3/5) and (2/5, 1] as balls overhanging the unit interval.
    members = (open_set(ball((0,), F(3, 5))), open_set(ball((1,), F(3, 5))))
    return FiniteCover(members, interval_carrier(depth))


class TestOpenSet:
    def test_contains_is_strict_and_clipped(self):
        s = open_set(ball((F(1, 4),), F(1, 4)))
        assert s.contains((F(1, 4),))
        assert s.contains((F(1, 8),))
        assert not s.contains((F(0),))  # boundary of the ball
        assert not s.contains((F(1, 2),))
        overhang = open_set(ball((0,), F(1, 2)))
        assert overhang.contains((F(0),))  # clipped set keeps the endpoint

    def test_needs_a_ball(self):
        with pytest.raises(PreconditionError, match="at least one ball"):
            OpenSet(())

    def test_interval_set_is_the_open_interval(self):
        s = interval_set(F(1, 4), F(3, 4))
        assert s.contains((F(1, 2),))
        assert not s.contains((F(1, 4),))
        assert not s.contains((F(3, 4),))

    def test_box_contains_is_closed(self):
        b = Box(((F(0), F(1, 3)),))
        assert b.contains((F(0),))
        assert b.contains((F(1, 3),))
        assert not b.contains((F(1, 2),))


class TestSymbolicCarrier:
    def test_interval_carrier_cells(self):
        c = interval_carrier(2)
        assert c.dim == 1
        assert c.resolution() == F(1, 9)
        assert c.width_at(1) == F(1, 3)
        level1 = [b.bounds for b in c.cells_at(1)]
        assert level1 == [
            ((F(0), F(1, 3)),),
            ((F(1, 3), F(2, 3)),),
            ((F(2, 3), F(1)),),
        ]
        assert len(c.boxes()) == 9

    def test_cantor_carrier_cells(self):
        c = cantor_carrier(2)
        got = sorted(b.bounds[0] for b in c.boxes())
        assert got == [
            (F(0), F(1, 9)),
            (F(2, 9), F(1, 3)),
            (F(2, 3), F(7, 9)),
            (F(8, 9), F(1)),
        ]

    def test_carpet_level_one(self):
        c = SymbolicCarrier(carpet_descriptor(), 1)
        assert c.dim == 2
        assert len(c.boxes()) == 8  # all 1/3-cells except the center

    def test_negative_depth_rejected(self):
        with pytest.raises(PreconditionError):
            SymbolicCarrier(carpet_descriptor(), -1)


class TestFiniteCover:
    def test_valid_cover_and_multiplicity(self):
        U = two_sided_cover()
        assert cover_multiplicity(U) == 2
        assert U.dim == 1

    def test_disjoint_cover_has_multiplicity_one(self):
        members = (
            open_set(ball((F(1, 6),), F(1, 4))),
            open_set(ball((F(5, 6),), F(1, 4))),
        )
        U = FiniteCover(members, cantor_carrier(1))
        assert cover_multiplicity(U) == 1

    def test_construction_errors(self):
        with pytest.raises(PreconditionError, match="empty cover"):
            FiniteCover((), interval_carrier(1))
        with pytest.raises(PreconditionError, match="disagree on dimension"):
            FiniteCover(
                (open_set(ball((0, 0), F(1, 2))),), interval_carrier(1)
            )
        with pytest.raises(PreconditionError, match="not covered"):
            FiniteCover((open_set(ball((0,), F(1, 4))),), interval_carrier(1))

    def test_validate_escape_hatch(self):
        U = FiniteCover(
            (open_set(ball((0,), F(1, 4))),), interval_carrier(1), validate=False
        )
        assert len(U.members) == 1

    def test_cloud_carrier(self):
        cloud = PointCloud(1, ((F(0),), (F(1, 2),), (F(1),)))
        U = FiniteCover(two_sided_cover().members, cloud)
        assert cover_multiplicity(U) == 2
        assert cover_mesh(U) == F(1, 2)


def _oracle_faces(members, carrier):
    """Brute-force nerve faces via corner/midpoint sampling.

    Cuts come from the ball cubes and from the carrier's cell bounds, so
    within each sampled arrangement cell both ball membership and region
    membership are constant; the cut values plus consecutive midpoints
    then meet every cell, and membership goes through the public
    contains() only.
    """
    dim = carrier.dim
    region = carrier.boxes()
    axis_values = []
    for a in range(dim):
        cuts = {F(0), F(1)}
        for m in members:
            for cube in m.cubes():
                lo, hi = cube[a]
                for v in (lo, hi):
                    if 0 <= v <= 1:
                        cuts.add(v)
        for b in region:
            lo, hi = b.bounds[a]
            cuts.add(lo)
            cuts.add(hi)
        cuts = sorted(cuts)
        vals = list(cuts)
        vals.extend((x + y) / 2 for x, y in zip(cuts, cuts[1:]))
        axis_values.append(sorted(vals))
    faces = set()
    for p in itertools.product(*axis_values):
        if not any(b.contains(p) for b in region):
            continue
        mask = frozenset(i for i, m in enumerate(members) if m.contains(p))
        for r in range(1, len(mask) + 1):
            faces.update(map(frozenset, itertools.combinations(sorted(mask), r)))
    return frozenset(faces)


class TestNerve:
    def test_two_member_overlap(self):
        N = nerve_of(two_sided_cover())
        assert N.vertex_count == 2
        assert N.faces == frozenset(
            {frozenset({0}), frozenset({1}), frozenset({0, 1})}
        )
        assert N.dimension() == 1
        N.validate()

    def test_disjoint_members_give_isolated_vertices(self):
        members = (
            open_set(ball((F(1, 6),), F(1, 4))),
            open_set(ball((F(5, 6),), F(1, 4))),
        )
        N = nerve_of(FiniteCover(members, cantor_carrier(1)))
        assert N.faces == frozenset({frozenset({0}), frozenset({1})})
        assert N.dimension() == 0

    def test_validate_rejects_bad_complexes(self):
        with pytest.raises(PreconditionError, match="out-of-range"):
            Nerve(1, frozenset({frozenset({3})})).validate()
        # a 2-face without its edges
        bad = Nerve(
            3,
            frozenset(
                {frozenset({0}), frozenset({1}), frozenset({2}), frozenset({0, 1, 2})}
            ),
        )
        with pytest.raises(PreconditionError, match="downward closed"):
            bad.validate()
        with pytest.raises(PreconditionError, match="missing singleton"):
            Nerve(2, frozenset({frozenset({0})})).validate()

    def test_against_sampling_oracle_interval(self):
        members = (
            open_set(ball((0,), F(2, 5))),
            open_set(ball((F(1, 2),), F(1, 4))),
            open_set(ball((1,), F(2, 5))),
        )
        U = FiniteCover(members, interval_carrier(2))
        assert nerve_of(U).faces == _oracle_faces(members, U.carrier)

    def test_against_sampling_oracle_cantor(self):
        members = (
            open_set(ball((0,), F(1, 2))),
            open_set(ball((1,), F(1, 2))),
        )
        U = FiniteCover(members, cantor_carrier(2))
        assert nerve_of(U).faces == _oracle_faces(members, U.carrier)

    def test_against_sampling_oracle_carpet(self):
        members = (
            open_set(ball((F(1, 4), F(1, 4)), F(2, 3))),
            open_set(ball((F(3, 4), F(3, 4)), F(2, 3))),
            open_set(ball((F(3, 4), F(1, 4)), F(2, 3))),
            open_set(ball((F(1, 4), F(3, 4)), F(2, 3))),
        )
        U = FiniteCover(members, SymbolicCarrier(carpet_descriptor(), 2))
        N = nerve_of(U)
        assert N.faces == _oracle_faces(members, U.carrier)
        N.validate()


class TestKappaMap:
    def test_symmetric_point_lands_midway(self):
        U = two_sided_cover()
        verts = (RationalPoint((F(0),)), RationalPoint((F(1),)))
        img = kappa_map((F(1, 2),), U, verts)
        assert img.coords == (F(1, 2),)

    def test_support_is_the_containing_members(self):
        U = two_sided_cover()
        verts = (RationalPoint((F(0),)), RationalPoint((F(1),)))
        # 1/5 lies only in the left member, so the image is its vertex.
        assert kappa_map((F(1, 5),), U, verts).coords == (F(0),)

    def test_target_dimension_follows_the_vertices(self):
        U = two_sided_cover()
        verts = (RationalPoint((F(0), F(0))), RationalPoint((F(1), F(1))))
        img = kappa_map((F(1, 2),), U, verts)
        assert img.coords == (F(1, 2), F(1, 2))

    def test_weights_reflect_complement_distances(self):
        U = two_sided_cover()
        x = (F(1, 2),)
        d0 = complement_distance(x, U.members[0])
        d1 = complement_distance(x, U.members[1])
        assert d0 == d1 == F(1, 10)

    def test_errors(self):
        U = two_sided_cover()
        verts = (RationalPoint((F(0),)),)
        with pytest.raises(PreconditionError, match="one vertex per cover member"):
            kappa_map((F(1, 2),), U, verts)
        whole = FiniteCover(
            (open_set(ball((F(1, 2),), F(2))),), interval_carrier(1)
        )
        with pytest.raises(PreconditionError, match="complement is empty"):
            kappa_map(
                (F(1, 2),), whole, (RationalPoint((F(0),)),)
            )
        partial = FiniteCover(
            (open_set(ball((0,), F(1, 4))),), interval_carrier(1), validate=False
        )
        with pytest.raises(PreconditionError, match="uncovered point"):
            kappa_map((F(3, 4),), partial, (RationalPoint((F(0),)),))


class TestShrinkCover:
    def test_two_sided_shrinking_frozen(self):
        F_fam, V_fam = shrink_cover(two_sided_cover())
        assert [tuple(b.bounds for b in part) for part in F_fam] == [
            (((F(0), F(11, 20)),),),
            (((F(9, 20), F(1)),),),
        ]
        # Open shrinking pulls radii by 3/4 of the margin.
        radii = [v.balls[0].radius for v in V_fam]
        assert radii == [F(21, 40), F(21, 40)]

    def test_closed_family_still_covers(self):
        U = two_sided_cover()
        F_fam, V_fam = shrink_cover(U)
        for cell in U.carrier.boxes():
            rep = tuple((lo + hi) / 2 for lo, hi in cell.bounds)
            assert any(b.contains(rep) for part in F_fam for b in part)
            assert any(v.contains(rep) for v in V_fam)

    def test_open_shrinking_sits_inside_the_closed_one(self):
        F_fam, V_fam = shrink_cover(two_sided_cover())
        for part, v in zip(F_fam, V_fam):
            for b in v.balls:
                lo = b.center.coords[0] - b.radius
                hi = b.center.coords[0] + b.radius
                blo, bhi = part[0].bounds[0]
                assert blo <= max(lo, 0) and min(hi, 1) <= bhi

    def test_no_margin_without_coverage(self):
        U = FiniteCover(
            (open_set(ball((0,), F(1, 4))),), interval_carrier(1), validate=False
        )
        with pytest.raises(PreconditionError, match="no positive margin"):
            shrink_cover(U)


class TestRefineCover:
    def test_interval_refinement_frozen(self):
        U = two_sided_cover()
        refined = refine_cover(U, 2, F(1, 2))
        assert len(refined.members) == 27
        assert cover_multiplicity(refined) == 2
        assert cover_mesh(refined) == F(2, 27)
        assert refined.parents is not None
        assert len(refined.parents) == 27
        for member, parent in zip(refined.members, refined.parents):
            assert parent in (0, 1)
            center = member.balls[0].center.coords
            assert complement_distance(center, U.members[parent]) > 0

    def test_cantor_multiplicity_one(self):
        U0 = FiniteCover(
            (open_set(ball((F(1, 2),), F(1))),), cantor_carrier(2)
        )
        refined = refine_cover(U0, 1, F(1, 3))
        assert cover_multiplicity(refined) == 1
        assert cover_mesh(refined) <= F(1, 3)
        centers = sorted(m.balls[0].center.coords[0] for m in refined.members)
        assert centers == [F(1, 6), F(5, 6)]

    def test_unreachable_multiplicity_exhausts(self):
        U = two_sided_cover()
        with pytest.raises(PreconditionError, match="search exhausted"):
            refine_cover(U, 1, F(1, 2))

    def test_budget_cuts_the_search(self):
        U = two_sided_cover()
        with pytest.raises(PreconditionError, match="search exhausted"):
            refine_cover(U, 2, F(1, 2), budget=1)

    def test_target_validation(self):
        with pytest.raises(PreconditionError, match="at least 1"):
            refine_cover(two_sided_cover(), 0, F(1, 2))


class TestGeneralPosition:
    def test_separated_points_pass_through(self):
        pts = ((F(0), F(0)), (F(1), F(0)), (F(0), F(1)))
        got = general_position(pts, F(1, 8))
        assert tuple(p.coords for p in got) == pts

    def test_collinear_triple_gets_perturbed(self):
        pts = ((F(0), F(0)), (F(1, 2), F(1, 2)), (F(1), F(1)))
        got = general_position(pts, F(1, 8))
        assert len(got) == 3
        (x0, y0), (x1, y1), (x2, y2) = (p.coords for p in got)
        det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        assert det != 0
        for before, after in zip(pts, got):
            assert max(abs(a - b) for a, b in zip(before, after.coords)) < F(1, 8)

    def test_avoid_flat_pushes_points_off_the_diagonal(self):
        diag = ((F(0), F(0)), (F(1), F(1)))
        pts = ((F(1, 2), F(1, 2)), (F(1, 4), F(1, 4)))
        got = general_position(pts, F(1, 16), avoid=(diag,))
        for p in got:
            x, y = p.coords
            assert x != y

    def test_eps_and_budget_validation(self):
        with pytest.raises(PreconditionError, match="eps must be positive"):
            general_position(((F(0),),), F(0))
        with pytest.raises(PreconditionError, match="budget exceeded"):
            general_position(
                ((F(1, 2),), (F(1, 2),)), F(1, 2), budget=0
            )
        # eps below every reachable grid also exhausts
        with pytest.raises(PreconditionError, match="budget exceeded"):
            general_position(((F(1, 2),), (F(1, 2),)), F(1, 2**45))

    def test_empty_input(self):
        assert general_position((), F(1, 2)) == ()


class TestEpsEta:
    def test_certificate_on_an_isometry(self):
        pairs = [((F(0),), (F(0),)), ((F(1, 2),), (F(1, 2),)), ((F(1),), (F(1),))]
        out = verify_eps_eta(pairs, F(1, 4), F(1, 4))
        assert isinstance(out, EpsEtaCertificate)
        assert out.to_json() == {"eps": "1/4", "eta": "1/4", "pairs_checked": 3}

    def test_counterexample_on_a_collapse(self):
        pairs = [((F(0),), (F(0),)), ((F(1),), (F(0),))]
        out = verify_eps_eta(pairs, F(1, 2), F(1, 2))
        assert not isinstance(out, EpsEtaCertificate)
        (x, _), (y, _) = out
        assert {x.coords[0], y.coords[0]} == {F(0), F(1)}

    def test_positivity_enforced(self):
        with pytest.raises(PreconditionError):
            EpsEtaCertificate(F(0), F(1, 2), ())


class TestAffineGap:
    def test_point_to_point_is_max_metric(self):
        assert affine_gap([(F(0), F(0))], [(F(1), F(1, 2))]) == 1

    def test_parallel_segments(self):
        a = [(F(0), F(0)), (F(1), F(0))]
        b = [(F(0), F(1, 2)), (F(1), F(1, 2))]
        assert affine_gap(a, b) == F(1, 2)

    def test_crossing_lines_touch(self):
        a = [(F(0), F(0)), (F(1), F(1))]
        b = [(F(0), F(1)), (F(1), F(0))]
        assert affine_gap(a, b) == 0


class TestEmbedStep:
    def _disjoint_cover(self):
        members = (
            open_set(ball((F(1, 6),), F(1, 4))),
            open_set(ball((F(5, 6),), F(1, 4))),
        )
        return FiniteCover(members, cantor_carrier(1))

    def test_single_step_certificate(self):
        sample = PointCloud(1, ((F(0),), (F(1, 3),), (F(1),)))
        images, cert = embed_step(sample, self._disjoint_cover())
        assert isinstance(cert, EpsEtaCertificate)
        assert images.points == ((F(1, 6),), (F(1, 6),), (F(5, 6),))
        assert cert.eps == F(1, 2)
        assert cert.eta == F(1, 2)

    def test_multiplicity_gate(self):
        sample = PointCloud(1, ((F(1, 2),),))
        with pytest.raises(PreconditionError, match="multiplicity exceeds"):
            embed_step(sample, two_sided_cover())

    def test_mesh_gate(self):
        sample = PointCloud(1, ((F(0),),))
        with pytest.raises(PreconditionError, match="mesh too coarse"):
            embed_step(sample, self._disjoint_cover(), j=2)


class TestMengerPush:
    def test_level_zero_knots(self):
        got = menger_push_step(
            (F(1, 4), F(1, 2), F(7, 8)), 0, BoundSeq.constant(3), F(1, 8)
        )
        assert got == (F(1, 6), F(1, 2), F(11, 12))

    def test_grid_points_stay_fixed(self):
        z = BoundSeq.constant(3)
        got = menger_push_step((F(0), F(1, 3), F(2, 3), F(1)), 1, z, F(1, 24))
        assert got == (F(0), F(1, 3), F(2, 3), F(1))

    def test_eps_window_validation(self):
        z = BoundSeq.constant(3)
        with pytest.raises(PreconditionError, match="eps too large"):
            menger_push_step((F(1, 2),), 1, z, F(1, 6))
        with pytest.raises(PreconditionError, match="level must be nonnegative"):
            menger_push_step((F(1, 2),), -1, z, F(1, 8))
        with pytest.raises(PreconditionError, match="unit interval"):
            menger_push_step((F(3, 2),), 0, z, F(1, 8))

    @given(
        xs=st.lists(
            st.fractions(min_value=0, max_value=1, max_denominator=54),
            min_size=2,
            max_size=8,
            unique=True,
        )
    )
    def test_strictly_monotone(self, xs):
        z = BoundSeq.constant(3)
        xs = sorted(xs)
        got = menger_push_step(xs, 1, z, F(1, 24))
        assert all(a < b for a, b in zip(got, got[1:]))
