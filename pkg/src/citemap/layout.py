"""Similarity-weighted 2D layout under a unit mean-distance constraint.

Positions minimize V(x) = sum over pairs of s_ij * ||x_i - x_j||^2 subject
to a mean pairwise Euclidean distance of exactly 1, so strongly related
terms sit close together while the constraint stops the trivial collapse.
Optimization is projected gradient descent: a gradient step on V, then
re-centering and rescaling onto the constraint, with the step halved until
the projected objective does not increase. Disconnected inputs are laid out
one component at a time and arranged on a grid before the final projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, ConsistencyError
from .network import SimilarityMatrix

_COMPONENT_GAP = 2.0  # spacing between component bounding boxes, pre-projection


@dataclass(frozen=True)
class MapLayout:
    """2D positions, centered at the origin, mean pairwise distance 1."""

    positions: tuple[tuple[float, float], ...]
    objective: float
    converged: bool
    iterations_used: int


def layout_objective(sim: SimilarityMatrix, positions: Sequence[Sequence[float]]) -> float:
    """V(x) = sum of s_ij * squared distance over co-occurring pairs."""
    if len(positions) != len(sim.terms):
        raise ConsistencyError(f"{len(positions)} positions for {len(sim.terms)} terms")
    value = 0.0
    for (i, j), s in sorted(sim.strengths.items()):
        dx = positions[i][0] - positions[j][0]
        dy = positions[i][1] - positions[j][1]
        value += s * (dx * dx + dy * dy)
    return value


def _mean_pairwise_distance(x: np.ndarray) -> float:
    n = len(x)
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=-1))
    return float(dist[np.triu_indices(n, k=1)].mean())


def _project(x: np.ndarray) -> np.ndarray:
    """Center at the origin and rescale to mean pairwise distance 1."""
    x = x - x.mean(axis=0)
    d = _mean_pairwise_distance(x)
    if d == 0.0:
        # all points coincident: spread on a tiny circle, then normalize
        n = len(x)
        angles = 2.0 * math.pi * np.arange(n) / n
        x = x + 1e-6 * np.column_stack([np.cos(angles), np.sin(angles)])
        x = x - x.mean(axis=0)
        d = _mean_pairwise_distance(x)
    return x / d


def _constraint_normal(x: np.ndarray) -> np.ndarray:
    """Gradient of the mean pairwise distance (up to the constant factor)."""
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=-1))
    np.fill_diagonal(dist, 1.0)  # diagonal diffs are zero anyway
    dist = np.maximum(dist, 1e-12)
    return (diff / dist[:, :, None]).sum(axis=1)


def _optimize(strengths: dict[tuple[int, int], float], n: int, seed: int, max_iter: int, tol: float,
              trace: list[float] | None) -> tuple[np.ndarray, float, bool, int]:
    rng = np.random.default_rng(seed)
    x = _project(rng.uniform(-0.5, 0.5, size=(n, 2)))
    laplacian = np.zeros((n, n))
    for (i, j), s in sorted(strengths.items()):
        laplacian[i, j] -= s
        laplacian[j, i] -= s
        laplacian[i, i] += s
        laplacian[j, j] += s

    def objective(y: np.ndarray) -> float:
        return float(np.einsum("ij,ij->", y, laplacian @ y))

    value = objective(x)
    if trace is not None:
        trace.append(value)
    max_degree = float(laplacian.diagonal().max())
    step = 0.25 / max_degree if max_degree > 0 else 0.25
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        gradient = 2.0 * (laplacian @ x)
        # keep only the component tangential to the constraint manifold:
        # the raw gradient can be a pure dilation (exactly what the rescale
        # undoes), so stepping along it would stall at the start shape
        normal = _constraint_normal(x)
        normal_norm = float(np.einsum("ij,ij->", normal, normal))
        if normal_norm > 0:
            gradient = gradient - (float(np.einsum("ij,ij->", gradient, normal)) / normal_norm) * normal
        step *= 2.0  # grow the accepted step; halving brings it back down
        while True:
            candidate = _project(x - step * gradient)
            candidate_value = objective(candidate)
            if candidate_value <= value:
                break
            step *= 0.5
            if step < 1e-20:
                candidate, candidate_value = x, value
                break
        drop = value - candidate_value
        x, value = candidate, candidate_value
        if trace is not None:
            trace.append(value)
        if drop <= tol * max(abs(value), 1e-30):
            converged = True
            break
    return x, value, converged, iterations


def _components(n: int, strengths: dict[tuple[int, int], float]) -> list[list[int]]:
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for i, j in strengths:
        adjacency[i].append(j)
        adjacency[j].append(i)
    seen = [False] * n
    components = []
    for start in range(n):
        if seen[start]:
            continue
        stack, members = [start], []
        seen[start] = True
        while stack:
            v = stack.pop()
            members.append(v)
            for u in sorted(adjacency[v]):
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        components.append(sorted(members))
    return components


def layout(
    sim: SimilarityMatrix,
    seed: int = 42,
    max_iter: int = 10_000,
    tol: float = 1e-8,
    trace: list[float] | None = None,
) -> MapLayout:
    """Compute the 2D map for a similarity matrix.

    Stops when the relative objective decrease falls below ``tol`` or after
    ``max_iter`` iterations. A single term sits at the origin with a vacuous
    constraint. ``trace``, when given, collects the objective value after
    every projection step (test hook); for disconnected inputs only the
    final assembled objective is traced.
    """
    n = len(sim.terms)
    if n < 1:
        raise ValueError("layout needs at least one term")
    if max_iter < 1:
        raise ConfigError(f"max_iter must be >= 1, got {max_iter}")
    for pair, s in sim.strengths.items():
        if not math.isfinite(s):
            raise ValueError(f"non-finite similarity {s!r} on pair {pair}")
    if n == 1:
        return MapLayout(((0.0, 0.0),), 0.0, True, 0)

    components = _components(n, sim.strengths)
    if len(components) == 1:
        x, value, converged, iterations = _optimize(sim.strengths, n, seed, max_iter, tol, trace)
        return MapLayout(tuple((float(px), float(py)) for px, py in x), value, converged, iterations)

    # lay out each component independently, then place on a grid
    placed = np.zeros((n, 2))
    extents = []
    sub_results = []
    for members in components:
        local = {member: k for k, member in enumerate(members)}
        local_strengths = {
            (local[i], local[j]): s for (i, j), s in sorted(sim.strengths.items()) if i in local and j in local
        }
        if len(members) == 1:
            sub = (np.zeros((1, 2)), 0.0, True, 0)
        else:
            sub = _optimize(local_strengths, len(members), seed, max_iter, tol, None)
        sub_results.append((members, sub))
        coords = sub[0]
        width = float(coords[:, 0].max() - coords[:, 0].min()) if len(members) > 1 else 0.0
        height = float(coords[:, 1].max() - coords[:, 1].min()) if len(members) > 1 else 0.0
        extents.append(max(width, height))
    pitch = max(extents) + _COMPONENT_GAP
    columns = math.ceil(math.sqrt(len(components)))
    for k, (members, (coords, _, _, _)) in enumerate(sub_results):
        offset = np.array([(k % columns) * pitch, -(k // columns) * pitch])
        for row, member in enumerate(members):
            placed[member] = coords[row] + offset
    placed = _project(placed)
    value = layout_objective(sim, placed)
    if trace is not None:
        trace.append(value)
    converged = all(sub[2] for _, sub in sub_results)
    iterations = max(sub[3] for _, sub in sub_results)
    return MapLayout(tuple((float(px), float(py)) for px, py in placed), value, converged, iterations)
