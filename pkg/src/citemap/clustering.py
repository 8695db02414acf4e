"""Resolution-parameterized clustering by iterated local moving.

The quality of a partition is Q = sum over same-cluster pairs i<j of
(s_ij - resolution), where s_ij is 0 for non-co-occurring pairs. Larger
resolutions penalize big clusters and yield more of them.

Optimization is smart local moving: single-node moves run until no move
improves Q; each cluster's induced subnetwork is then re-clustered from
singletons, so a bad merge can split again; the refined partition is
collapsed into an aggregate network that starts from the unrefined clusters
and is optimized recursively. Once that cycle stalls, variable-depth chain
passes (forced best moves with the best prefix kept) try to escape traps
that no single improving move can leave. The best of ``restarts`` seeded
runs wins, ties going to the earliest restart, so results are fully
deterministic for a fixed (seed, restarts).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, ConsistencyError
from .network import SimilarityMatrix

_MAX_ROUNDS = 1000  # safety stop; local moving terminates long before this
_CHAIN_PATIENCE = 8  # failed variable-depth attempts per restart before giving up


@dataclass(frozen=True)
class Clustering:
    """Cluster ids are contiguous and 1-based; one entry per term."""

    assignment: tuple[int, ...]
    resolution: float
    seed: int
    quality: float

    @property
    def n_clusters(self) -> int:
        return max(self.assignment) if self.assignment else 0

    def members(self, cluster_id: int) -> list[int]:
        return [i for i, c in enumerate(self.assignment) if c == cluster_id]


def quality(sim: SimilarityMatrix, clustering: Clustering | Sequence[int], resolution: float) -> float:
    """Q = sum over same-cluster pairs of (s_ij - resolution)."""
    labels = clustering.assignment if isinstance(clustering, Clustering) else tuple(clustering)
    n = len(sim.terms)
    if len(labels) != n:
        raise ConsistencyError(f"{len(labels)} labels for {n} terms")
    edge_part = 0.0
    for (i, j), s in sorted(sim.strengths.items()):
        if labels[i] == labels[j]:
            edge_part += s
    sizes: dict[int, int] = {}
    for label in labels:
        sizes[label] = sizes.get(label, 0) + 1
    pairs = sum(size * (size - 1) // 2 for size in sizes.values())
    return edge_part - resolution * pairs


def _local_move(adj: list[dict[int, float]], sizes: list[int], labels: list[int],
                resolution: float, rng: random.Random) -> bool:
    """Single-node moves until a full pass makes none. Returns True if any moved.

    Moving v into cluster C is worth conn(v, C) - resolution * size_v * size_C.
    Each visit takes one target drawn at random among the strictly improving
    ones (not the single best), so restarts explore different basins; the
    fixpoint criterion is the same either way: no single move improves Q.
    """
    n = len(adj)
    cluster_size: dict[int, int] = {}
    for v in range(n):
        cluster_size[labels[v]] = cluster_size.get(labels[v], 0) + sizes[v]
    next_label = max(labels) + 1
    moved_any = False
    for _ in range(_MAX_ROUNDS):
        improved = False
        order = list(range(n))
        rng.shuffle(order)
        for v in order:
            home = labels[v]
            connection: dict[int, float] = {}
            for u in sorted(adj[v]):
                label = labels[u]
                connection[label] = connection.get(label, 0.0) + adj[v][u]
            stay = connection.get(home, 0.0) - resolution * sizes[v] * (cluster_size[home] - sizes[v])
            improving = [
                label
                for label in sorted(connection)
                if label != home
                and connection[label] - resolution * sizes[v] * cluster_size[label] > stay
            ]
            if 0.0 > stay:  # a fresh singleton cluster contributes nothing
                improving.append(next_label)
            if not improving:
                continue
            target = improving[0] if len(improving) == 1 else rng.choice(improving)
            cluster_size[home] -= sizes[v]
            if cluster_size[home] == 0:
                del cluster_size[home]
            cluster_size[target] = cluster_size.get(target, 0) + sizes[v]
            labels[v] = target
            if target == next_label:
                next_label += 1
            improved = True
            moved_any = True
        if not improved:
            break
    return moved_any


def _aggregate(adj: list[dict[int, float]], sizes: list[int], labels: list[int]
               ) -> tuple[list[dict[int, float]], list[int], dict[int, int]]:
    """Collapse clusters into nodes; inter-cluster weights are summed."""
    remap = {label: index for index, label in enumerate(sorted(set(labels)))}
    k = len(remap)
    new_sizes = [0] * k
    for v, label in enumerate(labels):
        new_sizes[remap[label]] += sizes[v]
    new_adj: list[dict[int, float]] = [dict() for _ in range(k)]
    for v in range(len(adj)):
        a = remap[labels[v]]
        for u in sorted(adj[v]):
            if u <= v:
                continue
            b = remap[labels[u]]
            if a == b:
                continue  # internal weight never affects a whole-node move
            new_adj[a][b] = new_adj[a].get(b, 0.0) + adj[v][u]
            new_adj[b][a] = new_adj[b].get(a, 0.0) + adj[v][u]
    return new_adj, new_sizes, remap


def _refine(adj: list[dict[int, float]], sizes: list[int], labels: list[int],
            resolution: float, rng: random.Random) -> tuple[list[int], dict[int, int]]:
    """Re-cluster each cluster's induced subnetwork from singletons.

    Returns the refined labels plus refined-label -> parent-label, so the
    aggregate network can start from the unrefined partition.
    """
    refined = [0] * len(adj)
    parent: dict[int, int] = {}
    next_label = 0
    for cluster_label in sorted(set(labels)):
        members = [v for v in range(len(adj)) if labels[v] == cluster_label]
        local = {v: k for k, v in enumerate(members)}
        sub_adj: list[dict[int, float]] = [dict() for _ in members]
        for v in members:
            for u in sorted(adj[v]):
                if u in local and local[u] > local[v]:
                    sub_adj[local[v]][local[u]] = adj[v][u]
                    sub_adj[local[u]][local[v]] = adj[v][u]
        sub_labels = list(range(len(members)))
        _local_move(sub_adj, [sizes[v] for v in members], sub_labels, resolution, rng)
        block_ids: dict[int, int] = {}
        for v in members:
            block = sub_labels[local[v]]
            if block not in block_ids:
                block_ids[block] = next_label
                parent[next_label] = cluster_label
                next_label += 1
            refined[v] = block_ids[block]
    return refined, parent


def _slm(adj: list[dict[int, float]], sizes: list[int], resolution: float,
         rng: random.Random, init_labels: list[int]) -> list[int]:
    labels = list(init_labels)
    _local_move(adj, sizes, labels, resolution, rng)
    if len(set(labels)) == len(adj):
        return labels
    refined, parent = _refine(adj, sizes, labels, resolution, rng)
    agg_adj, agg_sizes, remap = _aggregate(adj, sizes, refined)
    if len(agg_adj) == len(adj):
        # refinement split everything back to singletons: the aggregate is
        # this graph again and its local move already ran to a fixpoint
        return labels
    agg_init = [0] * len(agg_adj)
    for refined_label, agg_node in remap.items():
        agg_init[agg_node] = parent[refined_label]
    agg_labels = _slm(agg_adj, agg_sizes, resolution, rng, agg_init)
    return [agg_labels[remap[refined[v]]] for v in range(len(adj))]


def _chain_pass(adj: list[dict[int, float]], sizes: list[int], labels: list[int],
                resolution: float, rng: random.Random) -> bool:
    """Variable-depth pass: escape traps no single improving move can leave.

    Every node, in random order, makes its best move away from its cluster
    even when that loses quality; the best prefix of the move chain is kept
    and the rest reverted. Returns True when the kept prefix improved Q, so
    callers retry with fresh orders until a pass yields nothing.
    """
    n = len(adj)
    cluster_size: dict[int, int] = {}
    for v in range(n):
        cluster_size[labels[v]] = cluster_size.get(labels[v], 0) + sizes[v]
    next_label = max(labels) + 1
    order = list(range(n))
    rng.shuffle(order)
    chain: list[tuple[int, int]] = []
    cum, best_cum, best_len = 0.0, 0.0, 0
    for v in order:
        home = labels[v]
        connection: dict[int, float] = {}
        for u in sorted(adj[v]):
            label = labels[u]
            connection[label] = connection.get(label, 0.0) + adj[v][u]
        stay = connection.get(home, 0.0) - resolution * sizes[v] * (cluster_size[home] - sizes[v])
        best_label, best_value = next_label, 0.0  # fresh singleton fallback
        for label in sorted(connection):
            if label == home:
                continue
            value = connection[label] - resolution * sizes[v] * cluster_size[label]
            if value > best_value:
                best_label, best_value = label, value
        cum += best_value - stay
        cluster_size[home] -= sizes[v]
        if cluster_size[home] == 0:
            del cluster_size[home]
        cluster_size[best_label] = cluster_size.get(best_label, 0) + sizes[v]
        labels[v] = best_label
        if best_label == next_label:
            next_label += 1
        chain.append((v, home))
        if cum > best_cum + 1e-12:
            best_cum, best_len = cum, len(chain)
    for v, old in reversed(chain[best_len:]):
        cluster_size[labels[v]] -= sizes[v]
        if cluster_size[labels[v]] == 0:
            del cluster_size[labels[v]]
        cluster_size[old] = cluster_size.get(old, 0) + sizes[v]
        labels[v] = old
    return best_cum > 1e-12


def _quality_raw(adj: list[dict[int, float]], labels: list[int], resolution: float) -> float:
    edge_part = 0.0
    for v in range(len(adj)):
        for u in sorted(adj[v]):
            if u > v and labels[u] == labels[v]:
                edge_part += adj[v][u]
    sizes: dict[int, int] = {}
    for label in labels:
        sizes[label] = sizes.get(label, 0) + 1
    return edge_part - resolution * sum(s * (s - 1) // 2 for s in sizes.values())


def _canonical(labels: list[int]) -> tuple[int, ...]:
    """Relabel clusters 1..K in order of first appearance."""
    mapping: dict[int, int] = {}
    out = []
    for label in labels:
        if label not in mapping:
            mapping[label] = len(mapping) + 1
        out.append(mapping[label])
    return tuple(out)


def cluster(sim: SimilarityMatrix, resolution: float = 1.0, seed: int = 42, restarts: int = 10) -> Clustering:
    """Maximize Q by smart local moving; best of ``restarts`` seeded runs."""
    n = len(sim.terms)
    if n == 0:
        raise ValueError("cannot cluster an empty similarity matrix")
    if resolution <= 0:
        raise ConfigError(f"resolution must be > 0, got {resolution}")
    if restarts < 1:
        raise ConfigError(f"restarts must be >= 1, got {restarts}")
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for (i, j), s in sorted(sim.strengths.items()):
        adj[i][j] = s
        adj[j][i] = s
    best_labels: list[int] | None = None
    best_quality = float("-inf")
    for restart in range(restarts):
        rng = random.Random(f"{seed}:{restart}")
        labels = list(range(n))
        current = _quality_raw(adj, labels, resolution)
        failures = 0
        for _ in range(_MAX_ROUNDS):  # iterate the full cycle while Q improves
            candidate = _slm(adj, [1] * n, resolution, rng, labels)
            candidate_quality = _quality_raw(adj, candidate, resolution)
            if candidate_quality > current:
                labels, current = candidate, candidate_quality
                failures = 0
                continue
            escaped = list(labels)
            if _chain_pass(adj, [1] * n, escaped, resolution, rng):
                escaped_quality = _quality_raw(adj, escaped, resolution)
                if escaped_quality > current:
                    labels, current = escaped, escaped_quality
                    failures = 0
                    continue
            failures += 1
            if failures >= _CHAIN_PATIENCE:
                break
        if current > best_quality:
            best_labels, best_quality = labels, current
    assert best_labels is not None
    return Clustering(_canonical(best_labels), resolution, seed, best_quality)
