"""Tests for stratified sampling and cultivable-land statistics.

Oracles
-------
* block clipping and densities: shapely box intersections
* largest-remainder allocation: exact Fraction-arithmetic reimplementation
* trend slope: closed-form least-squares formula
* estimator: exhaustive binary-population exact recovery, plus a seeded
  Monte Carlo unbiasedness run against the known population total
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from shapely.geometry import Polygon as ShPolygon
from shapely.geometry import box as sh_box

from landcore.errors import DataError, ValidationError
from landcore.geometry import Box2, Point2, Polygon2
from landcore.stratification import (
    HIGH,
    LOW,
    MEDIUM,
    FieldMap,
    LandStats,
    SamplePlan,
    Stratum,
    allocate_samples,
    blocks_of,
    clip_area_to_box,
    estimate_cultivable_area,
    import_requirement,
    largest_remainder,
    stratify,
    yearly_loss,
)
from .synth import rect_polygon, star_polygon

EXTENT = Box2(Point2(0.0, 0.0), Point2(8.0, 8.0))


def to_shapely(poly: Polygon2) -> ShPolygon:
    return ShPolygon(
        [(p.x, p.y) for p in poly.outer.vertices],
        [[(p.x, p.y) for p in isl.vertices] for isl in poly.islands],
    )


def shapely_density(fields, block: Box2) -> float:
    cell = sh_box(block.min.x, block.min.y, block.max.x, block.max.y)
    covered = sum(to_shapely(poly).intersection(cell).area for poly, _, _ in fields)
    return covered / cell.area


def fraction_remainder(weights, total):
    """Independent Hamilton apportionment using exact rationals."""
    ws = [Fraction(w).limit_denominator(10**12) for w in weights]
    quotas = [w * total / sum(ws) for w in ws]
    floors = [int(q) for q in quotas]
    for i in sorted(range(len(ws)), key=lambda i: (floors[i] - quotas[i], i))[
        : total - sum(floors)
    ]:
        floors[i] += 1
    return floors


class TestBlocksAndClipping:
    def test_blocks_partition_divisible_extent(self):
        blocks = blocks_of(EXTENT, 2.0)
        assert len(blocks) == 16  # [TRIVIAL] 4x4 grid
        assert math.isclose(sum(b.area() for b in blocks), EXTENT.area())
        assert blocks[0].min == Point2(0.0, 0.0)  # row-major from bottom-left
        assert blocks[1].min == Point2(2.0, 0.0)

    def test_blocks_clip_ragged_extent(self):
        blocks = blocks_of(Box2(Point2(0, 0), Point2(10.0, 7.0)), 3.0)
        assert len(blocks) == 4 * 3  # [TRIVIAL] ceil(10/3) x ceil(7/3)
        assert math.isclose(sum(b.area() for b in blocks), 70.0)
        assert blocks[-1].max == Point2(10.0, 7.0)

    def test_empty_extent_rejected(self):
        with pytest.raises(ValidationError):
            blocks_of(Box2(Point2(1.0, 1.0), Point2(1.0, 5.0)), 1.0)

    def test_clip_rectangle_corner(self):
        # [TRIVIAL] unit overlap in the corner
        poly = rect_polygon(1.0, 1.0, 3.0, 3.0)
        assert math.isclose(
            clip_area_to_box(poly, Box2(Point2(2.0, 2.0), Point2(5.0, 5.0))), 1.0
        )

    def test_clip_disjoint_is_zero(self):
        poly = rect_polygon(0.0, 0.0, 1.0, 1.0)
        assert clip_area_to_box(poly, Box2(Point2(2.0, 2.0), Point2(3.0, 3.0))) == 0.0

    def test_clip_matches_shapely_on_random_stars(self):
        # [DERIVED: shapely intersection areas]
        rng = np.random.default_rng(7)
        for _ in range(60):
            poly = star_polygon(
                rng,
                cx=float(rng.uniform(2, 6)),
                cy=float(rng.uniform(2, 6)),
                n=int(rng.integers(5, 12)),
                r_min=1.0,
                r_max=3.0,
            )
            b = Box2(
                Point2(float(rng.uniform(0, 4)), float(rng.uniform(0, 4))),
                Point2(float(rng.uniform(4, 8)), float(rng.uniform(4, 8))),
            )
            want = to_shapely(poly).intersection(
                sh_box(b.min.x, b.min.y, b.max.x, b.max.y)
            ).area
            assert math.isclose(clip_area_to_box(poly, b), want, rel_tol=1e-9, abs_tol=1e-12)

    def test_clip_subtracts_islands(self):
        # [DERIVED: shapely] donut overlapping the box edge
        rng = np.random.default_rng(11)
        poly = star_polygon(rng, cx=4.0, cy=4.0, n=10, r_min=2.0, r_max=3.5, n_islands=2)
        b = Box2(Point2(3.0, 2.5), Point2(8.0, 6.0))
        want = to_shapely(poly).intersection(sh_box(3.0, 2.5, 8.0, 6.0)).area
        assert math.isclose(clip_area_to_box(poly, b), want, rel_tol=1e-9)


class TestStratify:
    def fixture_fields(self):
        # block grid is 2.0 over an 8x8 extent; densities per block:
        #   (0,0) fully covered -> HIGH, (2,0) half -> MEDIUM,
        #   (0,2) thin sliver -> LOW, rest empty -> LOW
        return FieldMap(
            (
                (rect_polygon(0.0, 0.0, 2.0, 2.0), False, False),
                (rect_polygon(2.0, 0.0, 4.0, 1.0), False, False),
                (rect_polygon(0.0, 4.0, 2.0, 4.2), False, False),
            ),
            EXTENT,
            2.0,
        )

    def test_checkerboard_levels(self):
        strata = stratify(self.fixture_fields())
        by = {s.level: s for s in strata}
        assert Box2(Point2(0, 0), Point2(2, 2)) in by[HIGH].blocks
        assert Box2(Point2(2, 0), Point2(4, 2)) in by[MEDIUM].blocks
        assert Box2(Point2(0, 4), Point2(2, 6)) in by[LOW].blocks
        assert len(by[HIGH].blocks) == 1 and len(by[MEDIUM].blocks) == 1

    def test_levels_match_shapely_density_rule(self):
        # [DERIVED: shapely densities + threshold rule applied independently]
        rng = np.random.default_rng(23)
        fields = tuple(
            (
                star_polygon(
                    rng,
                    cx=float(rng.uniform(1, 7)),
                    cy=float(rng.uniform(1, 7)),
                    n=int(rng.integers(5, 10)),
                    r_min=0.8,
                    r_max=2.2,
                ),
                False,
                False,
            )
            for _ in range(6)
        )
        fm = FieldMap(fields, EXTENT, 2.0)
        strata = stratify(fm, thresholds=(0.55, 0.2))
        level_of = {b: s.level for s in strata for b in s.blocks}
        checked = 0
        for block in blocks_of(EXTENT, 2.0):
            density = shapely_density(fields, block)
            if density >= 0.55:
                want = HIGH
            elif density >= 0.2:
                want = MEDIUM
            else:
                want = LOW
            # skip knife-edge densities where float noise could flip the level
            if min(abs(density - 0.55), abs(density - 0.2)) > 1e-9:
                assert level_of[block] == want
                checked += 1
        assert checked >= 14
        assert {HIGH, MEDIUM} & set(level_of.values())

    def test_pivot_forces_high(self):
        fm = FieldMap(
            ((rect_polygon(5.0, 5.0, 5.4, 5.4), True, False),),  # tiny pivot field
            EXTENT,
            2.0,
        )
        strata = stratify(fm)
        by = {s.level: s for s in strata}
        assert Box2(Point2(4, 4), Point2(6, 6)) in by[HIGH].blocks
        assert len(by[HIGH].blocks) == 1  # only the block it touches

    def test_pivot_outside_block_does_not_leak(self):
        fm = FieldMap(((rect_polygon(0.1, 0.1, 0.5, 0.5), True, False),), EXTENT, 2.0)
        by = {s.level: s for s in stratify(fm)}
        assert by[HIGH].blocks == (Box2(Point2(0, 0), Point2(2, 2)),)

    def test_strata_partition_blocks(self):
        strata = stratify(self.fixture_fields())
        all_blocks = [b for s in strata for b in s.blocks]
        assert len(all_blocks) == 16
        assert len(set(all_blocks)) == 16
        assert math.isclose(sum(s.area for s in strata), EXTENT.area())

    def test_priors_attached_and_overridable(self):
        fm = self.fixture_fields()
        defaults = {s.level: s.prior_crop_probability for s in stratify(fm)}
        assert defaults == {HIGH: 0.9, MEDIUM: 0.5, LOW: 0.1}
        custom = stratify(fm, priors={HIGH: 0.8, MEDIUM: 0.4, LOW: 0.2})
        assert {s.level: s.prior_crop_probability for s in custom} == {
            HIGH: 0.8,
            MEDIUM: 0.4,
            LOW: 0.2,
        }

    def test_bad_thresholds(self):
        fm = self.fixture_fields()
        with pytest.raises(ValidationError):
            stratify(fm, thresholds=(0.3, 0.6))
        with pytest.raises(ValidationError):
            stratify(fm, thresholds=(1.2, 0.3))
        with pytest.raises(ValidationError):
            stratify(fm, thresholds=(0.6, 0.0))

    def test_stratum_validation(self):
        b = Box2(Point2(0, 0), Point2(2, 2))
        with pytest.raises(ValidationError):
            Stratum("EXTREME", (b,), 4.0, 0.5)
        with pytest.raises(ValidationError):
            Stratum(HIGH, (b,), 9.0, 0.5)  # area != block sum
        with pytest.raises(ValidationError):
            Stratum(HIGH, (b,), 4.0, 0.0)  # prior out of range


class TestAllocation:
    def strata(self):
        mk = lambda lvl, x0, n, prior: Stratum(
            lvl,
            tuple(
                Box2(Point2(x0 + 2.0 * i, 0.0), Point2(x0 + 2.0 * (i + 1), 2.0))
                for i in range(n)
            ),
            4.0 * n,
            prior,
        )
        return [mk(HIGH, 0.0, 2, 0.9), mk(MEDIUM, 4.0, 3, 0.5), mk(LOW, 10.0, 11, 0.1)]

    def test_largest_remainder_hand_case(self):
        # [DERIVED] quotas 4.8 / 3.2 / 2.0 -> floors 4,3,2 + one leftover to .8
        assert largest_remainder([48.0, 32.0, 20.0], 10) == [5, 3, 2]

    def test_largest_remainder_matches_fraction_oracle(self):
        # [DERIVED: exact-rational Hamilton reimplementation]
        rng = np.random.default_rng(3)
        for _ in range(300):
            k = int(rng.integers(2, 7))
            weights = [float(rng.uniform(0.1, 50.0)) for _ in range(k)]
            total = int(rng.integers(k, 400))
            got = largest_remainder(weights, total)
            assert got == fraction_remainder(weights, total)
            assert sum(got) == total

    def test_counts_follow_area_times_prior(self):
        strata = self.strata()
        plan = allocate_samples(strata, 100, seed=1)
        counts = dict(plan.counts)
        # weights: 7.2 / 6.0 / 4.4 -> bigger weight never gets fewer points
        assert counts[HIGH] >= counts[MEDIUM] >= counts[LOW]
        assert sum(counts.values()) == 100
        want = largest_remainder([s.area * s.prior_crop_probability for s in strata], 100)
        assert [counts[s.level] for s in strata] == want

    def test_points_inside_their_stratum(self):
        strata = self.strata()
        plan = allocate_samples(strata, 80, seed=9)
        blocks = {s.level: s.blocks for s in strata}
        assert len(plan.points) == 80
        for level, p in plan.points:
            assert any(
                b.min.x <= p.x <= b.max.x and b.min.y <= p.y <= b.max.y
                for b in blocks[level]
            )

    def test_deterministic_given_seed(self):
        strata = self.strata()
        a = allocate_samples(strata, 50, seed=42)
        b = allocate_samples(strata, 50, seed=42)
        c = allocate_samples(strata, 50, seed=43)
        assert a == b
        assert a.points != c.points
        assert a.counts == c.counts  # allocation is seed-independent

    def test_spread_over_blocks(self):
        # with many draws every block of a multi-block stratum gets hit
        strata = self.strata()
        plan = allocate_samples(strata, 600, seed=5)
        low_blocks = {s.level: s.blocks for s in strata}[LOW]
        hit = {
            b
            for _, p in plan.points
            for b in low_blocks
            if b.min.x <= p.x <= b.max.x and b.min.y <= p.y <= b.max.y
        }
        assert len(hit) == len(low_blocks)

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValidationError):
            allocate_samples(self.strata(), 2, seed=0)

    def test_all_empty_rejected(self):
        empty = [Stratum(HIGH, (), 0.0, 0.9), Stratum(LOW, (), 0.0, 0.1)]
        with pytest.raises(ValidationError):
            allocate_samples(empty, 10, seed=0)

    def test_empty_stratum_gets_zero(self):
        strata = [self.strata()[0], Stratum(LOW, (), 0.0, 0.1)]
        plan = allocate_samples(strata, 12, seed=0)
        assert dict(plan.counts) == {HIGH: 12, LOW: 0}


class TestEstimator:
    def binary_population(self):
        """Fields covering six blocks entirely; those blocks are cultivable."""
        fields = tuple(
            (rect_polygon(x, y, x + 2.0, y + 2.0), False, False)
            for x, y in [(0, 0), (2, 0), (0, 2), (4, 4), (6, 6), (2, 6)]
        )
        fm = FieldMap(fields, EXTENT, 2.0)
        strata = stratify(fm)
        cultivable = {
            Box2(Point2(x, y), Point2(x + 2.0, y + 2.0))
            for x, y in [(0, 0), (2, 0), (0, 2), (4, 4), (6, 6), (2, 6)]
        }
        truth = sum(b.area() for b in cultivable)  # 24.0
        return strata, cultivable, truth

    @staticmethod
    def observe(plan: SamplePlan, cultivable) -> list[bool]:
        out = []
        for _, p in plan.points:
            out.append(
                any(
                    b.min.x <= p.x <= b.max.x and b.min.y <= p.y <= b.max.y
                    for b in cultivable
                )
            )
        return out

    def test_exhaustive_binary_population_is_exact(self):
        # [DERIVED] every HIGH block cultivable, every LOW block not, so the
        # expansion estimate equals the cultivable area no matter the draw
        strata, cultivable, truth = self.binary_population()
        plan = allocate_samples(strata, 160, seed=77)
        area, err = estimate_cultivable_area(strata, plan, self.observe(plan, cultivable))
        assert math.isclose(area, truth, rel_tol=1e-12)
        assert err == 0.0

    def test_monte_carlo_unbiased(self):
        # [DERIVED] truth = sum of area_h * p_h over the synthetic population
        strata = [
            Stratum(HIGH, (Box2(Point2(0, 0), Point2(4, 4)),), 16.0, 0.9),
            Stratum(MEDIUM, (Box2(Point2(4, 0), Point2(8, 4)),), 16.0, 0.5),
            Stratum(LOW, (Box2(Point2(0, 4), Point2(8, 8)),), 32.0, 0.1),
        ]
        p_true = {HIGH: 0.85, MEDIUM: 0.5, LOW: 0.07}
        truth = sum(s.area * p_true[s.level] for s in strata)
        estimates = []
        for trial in range(400):
            plan = allocate_samples(strata, 60, seed=trial)
            rng = np.random.default_rng(10_000 + trial)
            obs = [bool(rng.random() < p_true[lvl]) for lvl, _ in plan.points]
            est, _ = estimate_cultivable_area(strata, plan, obs)
            estimates.append(est)
        mean = float(np.mean(estimates))
        sem = float(np.std(estimates, ddof=1)) / math.sqrt(len(estimates))
        assert abs(mean - truth) <= 3.0 * sem

    def test_stderr_closed_form(self):
        # [DERIVED] single stratum, 3 of 4 positive:
        # sqrt(A^2 * 0.75 * 0.25 / 3)
        s = Stratum(HIGH, (Box2(Point2(0, 0), Point2(4, 4)),), 16.0, 0.9)
        plan = SamplePlan(
            ((HIGH, 4),),
            tuple((HIGH, Point2(1.0 + i, 1.0)) for i in range(4)),
            seed=0,
        )
        area, err = estimate_cultivable_area([s], plan, [True, True, True, False])
        assert math.isclose(area, 16.0 * 0.75)
        assert math.isclose(err, math.sqrt(16.0**2 * 0.75 * 0.25 / 3.0))

    def test_dict_observations(self):
        s = Stratum(HIGH, (Box2(Point2(0, 0), Point2(4, 4)),), 16.0, 0.9)
        plan = SamplePlan(((HIGH, 2),), ((HIGH, Point2(1, 1)), (HIGH, Point2(2, 2))), 0)
        area, _ = estimate_cultivable_area([s], plan, {0: True, 1: False})
        assert math.isclose(area, 8.0)

    def test_missing_outcomes_raise(self):
        s = Stratum(HIGH, (Box2(Point2(0, 0), Point2(4, 4)),), 16.0, 0.9)
        plan = SamplePlan(((HIGH, 2),), ((HIGH, Point2(1, 1)), (HIGH, Point2(2, 2))), 0)
        with pytest.raises(DataError):
            estimate_cultivable_area([s], plan, [True])
        with pytest.raises(DataError):
            estimate_cultivable_area([s], plan, {0: True})
        with pytest.raises(DataError):
            estimate_cultivable_area([s], plan, [True, False, True])

    def test_unsampled_stratum_contributes_zero(self):
        strata = [
            Stratum(HIGH, (Box2(Point2(0, 0), Point2(4, 4)),), 16.0, 0.9),
            Stratum(LOW, (Box2(Point2(4, 0), Point2(8, 4)),), 16.0, 0.1),
        ]
        plan = SamplePlan(
            ((HIGH, 2), (LOW, 0)),
            ((HIGH, Point2(1, 1)), (HIGH, Point2(2, 2))),
            0,
        )
        area, err = estimate_cultivable_area(strata, plan, [True, True])
        assert math.isclose(area, 16.0)
        assert err == 0.0


class TestTrendAndImports:
    def test_linear_series_recovers_slope(self):
        # [DERIVED] exact linear trend: both measures equal the step
        series = [(1990, 5000.0), (1991, 4950.0), (1992, 4900.0), (1993, 4850.0)]
        rep = yearly_loss(series)
        assert math.isclose(rep.latest_diff, -50.0)
        assert math.isclose(rep.slope, -50.0)
        assert math.isclose(rep.latest_diff_frac, -50.0 / 5000.0)
        assert math.isclose(rep.slope_frac, -50.0 / 5000.0)

    def test_slope_matches_closed_form(self):
        # [DERIVED: sum((x-mx)(y-my)) / sum((x-mx)^2)]
        rng = np.random.default_rng(17)
        for _ in range(50):
            n = int(rng.integers(2, 12))
            years = sorted(rng.choice(np.arange(1980, 2020), size=n, replace=False))
            areas = rng.uniform(1000.0, 9000.0, size=n)
            series = [(int(y), float(a)) for y, a in zip(years, areas)]
            mx, my = np.mean(years), np.mean(areas)
            want = float(
                np.sum((years - mx) * (areas - my)) / np.sum((years - mx) ** 2)
            )
            assert math.isclose(yearly_loss(series).slope, want, rel_tol=1e-9, abs_tol=1e-9)

    def test_unordered_input_and_latest_pair(self):
        rep = yearly_loss([(2000, 4000.0), (1990, 5000.0), (1995, 4200.0)])
        assert math.isclose(rep.latest_diff, (4000.0 - 4200.0) / 5.0)
        assert math.isclose(rep.latest_diff_frac, rep.latest_diff / 5000.0)

    def test_constant_series_is_zero(self):
        rep = yearly_loss([(1990, 1000.0), (1995, 1000.0), (2000, 1000.0)])
        assert rep.latest_diff == 0.0
        assert math.isclose(rep.slope, 0.0, abs_tol=1e-12)

    def test_bad_series(self):
        with pytest.raises(ValidationError):
            yearly_loss([(1990, 1000.0)])
        with pytest.raises(ValidationError):
            yearly_loss([(1990, 1000.0), (1990, 900.0)])

    def test_import_requirement(self):
        # [TRIVIAL] demand 1e6 * 0.4 = 4e5 vs production 3e3 * 100 = 3e5
        assert math.isclose(import_requirement(1e6, 0.4, 3000.0, 100.0), 1e5)
        assert import_requirement(100.0, 0.1, 3000.0, 100.0) == 0.0  # surplus
        with pytest.raises(ValidationError):
            import_requirement(-1.0, 0.4, 3000.0, 100.0)

    def test_landstats_validation(self):
        LandStats(1990, 5000.0, 12.0, -0.01, 0.0)
        with pytest.raises(ValidationError):
            LandStats(1990, -5.0, 12.0, 0.0, 0.0)
