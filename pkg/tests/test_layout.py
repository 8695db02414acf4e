"""Layout: constraint handling, objective behavior, geometric contracts."""

from __future__ import annotations

import itertools
import math
import random

import numpy as np
import pytest

from citemap.errors import ConsistencyError
from citemap.layout import MapLayout, layout, layout_objective

from conftest import sim


def distance(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def mean_pairwise(positions) -> float:
    pairs = list(itertools.combinations(range(len(positions)), 2))
    return sum(distance(positions[i], positions[j]) for i, j in pairs) / len(pairs)


def centroid(positions):
    xs = [p[0] for p in positions]
    ys = [p[1] for p in positions]
    return (sum(xs) / len(xs), sum(ys) / len(ys))


EQUILATERAL = sim(3, {(0, 1): 1.5, (0, 2): 1.5, (1, 2): 1.5})


class TestLayoutObjective:
    def test_coincident_points_score_zero(self):
        s = sim(3, {(0, 1): 1.0, (1, 2): 2.0})
        assert layout_objective(s, [(0.0, 0.0)] * 3) == 0.0

    def test_two_points_weighted(self):
        s = sim(2, {(0, 1): 2.0})
        assert layout_objective(s, [(0.0, 0.0), (1.0, 0.0)]) == pytest.approx(2.0)

    def test_matches_brute_force_sum(self):
        rng = random.Random(4)
        strengths = {(i, j): rng.uniform(0.1, 2.0) for i, j in itertools.combinations(range(4), 2)}
        positions = [(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(4)]
        expected = sum(
            s * ((positions[i][0] - positions[j][0]) ** 2 + (positions[i][1] - positions[j][1]) ** 2)
            for (i, j), s in strengths.items()
        )
        assert layout_objective(sim(4, strengths), positions) == pytest.approx(expected, rel=1e-12)

    def test_missing_position_rejected(self):
        with pytest.raises(ConsistencyError):
            layout_objective(sim(3, {(0, 1): 1.0}), [(0.0, 0.0), (1.0, 0.0)])

    def test_invariant_under_rotation_and_translation(self):
        rng = random.Random(6)
        strengths = {(i, j): rng.uniform(0.1, 2.0) for i, j in itertools.combinations(range(5), 2)}
        s = sim(5, strengths)
        positions = [(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(5)]
        theta = 1.234
        rotated = [
            (
                math.cos(theta) * x - math.sin(theta) * y + 5.0,
                math.sin(theta) * x + math.cos(theta) * y - 2.5,
            )
            for x, y in positions
        ]
        assert abs(layout_objective(s, positions) - layout_objective(s, rotated)) < 1e-9


class TestLayout:
    def test_single_term_at_origin(self):
        result = layout(sim(1, {}), seed=42)
        assert result.positions == ((0.0, 0.0),)
        assert result.objective == 0.0 and result.converged

    def test_two_points_at_unit_distance(self):
        result = layout(sim(2, {(0, 1): 1.0}), seed=42)
        assert abs(distance(result.positions[0], result.positions[1]) - 1.0) < 1e-9

    def test_equilateral_triangle(self):
        result = layout(EQUILATERAL, seed=42, tol=1e-13)
        d = [distance(result.positions[a], result.positions[b]) for a, b in ((0, 1), (0, 2), (1, 2))]
        assert max(d) - min(d) < 1e-6
        assert abs(sum(d) / 3 - 1.0) < 1e-9  # constraint fixes the mean side

    def test_equilateral_beats_perturbations(self):
        result = layout(EQUILATERAL, seed=7, tol=1e-13)
        base = layout_objective(EQUILATERAL, result.positions)
        rng = random.Random(0)
        for _ in range(25):
            jittered = np.array(result.positions) + np.array(
                [[rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)] for _ in range(3)]
            )
            jittered -= jittered.mean(axis=0)
            jittered /= mean_pairwise([tuple(p) for p in jittered])
            assert layout_objective(EQUILATERAL, [tuple(p) for p in jittered]) >= base - 1e-9

    def test_path_geometry(self):
        s = sim(3, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 0.01})
        for seed in range(100):
            result = layout(s, seed=seed)
            d_ab = distance(result.positions[0], result.positions[1])
            d_bc = distance(result.positions[1], result.positions[2])
            d_ac = distance(result.positions[0], result.positions[2])
            assert d_ab < d_ac and d_bc < d_ac
            assert abs(d_ab - d_bc) < 1e-3

    def test_constraint_residual_and_centroid(self):
        rng = random.Random(12)
        strengths = {}
        for i, j in itertools.combinations(range(9), 2):
            if rng.random() < 0.5:
                strengths[(i, j)] = rng.uniform(0.2, 2.0)
        result = layout(sim(9, strengths), seed=3)
        assert abs(mean_pairwise(result.positions) - 1.0) < 1e-9
        cx, cy = centroid(result.positions)
        assert abs(cx) < 1e-9 and abs(cy) < 1e-9

    def test_objective_sequence_non_increasing(self):
        rng = random.Random(2)
        strengths = {(i, i + 1): rng.uniform(0.2, 2.0) for i in range(9)}  # spanning path
        for i, j in itertools.combinations(range(10), 2):
            if (i, j) not in strengths and rng.random() < 0.4:
                strengths[(i, j)] = rng.uniform(0.2, 2.0)
        trace: list[float] = []
        layout(sim(10, strengths), seed=5, trace=trace)
        assert len(trace) > 2
        assert all(later <= earlier for earlier, later in zip(trace, trace[1:]))

    def test_deterministic_bit_for_bit(self):
        rng = random.Random(17)
        strengths = {}
        for i, j in itertools.combinations(range(8), 2):
            if rng.random() < 0.6:
                strengths[(i, j)] = rng.uniform(0.2, 2.0)
        s = sim(8, strengths)
        first = layout(s, seed=99)
        second = layout(s, seed=99)
        assert first.positions == second.positions
        assert first.objective == second.objective

    def test_non_finite_similarity_rejected(self):
        with pytest.raises(ValueError):
            layout(sim(2, {(0, 1): float("nan")}), seed=1)

    def test_disconnected_components_gridded(self):
        # a pair plus a triangle, no edges between them
        s = sim(5, {(0, 1): 1.0, (2, 3): 1.0, (2, 4): 1.0, (3, 4): 1.0})
        result = layout(s, seed=42)
        assert abs(mean_pairwise(result.positions) - 1.0) < 1e-9
        cx, cy = centroid(result.positions)
        assert abs(cx) < 1e-9 and abs(cy) < 1e-9
        # the two components do not overlap
        pair = result.positions[:2]
        triangle = result.positions[2:]
        gap = min(distance(p, q) for p in pair for q in triangle)
        internal = max(
            max(distance(pair[0], pair[1]), 0.0),
            max(distance(a, b) for a, b in itertools.combinations(triangle, 2)),
        )
        assert gap > internal / 2

    def test_all_isolated_nodes_still_satisfy_constraint(self):
        result = layout(sim(3, {}), seed=42)
        assert abs(mean_pairwise(result.positions) - 1.0) < 1e-9

    def test_returns_maplayout(self):
        result = layout(sim(2, {(0, 1): 1.0}), seed=0)
        assert isinstance(result, MapLayout)
        assert result.iterations_used >= 1
