"""Co-occurrence network construction, association strength, relevance.

Edges count units in which two terms co-occur (binary) or, in full mode,
the per-unit minimum of the two terms' occurrence counts. Association
strength normalizes a count by both node strengths so that the expected
value under independent attachment is 1; relevance scores a term by how far
its co-occurrence profile diverges from the background strength
distribution, so generic terms score near 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import CitemapWarning, ConfigError, ConsistencyError
from .terms import Lexicon, TextUnit

BINARY = "binary"
FULL = "full"


@dataclass(frozen=True)
class TermNode:
    term: str
    occurrences: int


@dataclass(frozen=True)
class CoocNetwork:
    """Symmetric co-occurrence network; each unordered pair stored once."""

    terms: tuple[TermNode, ...]
    edges: dict[tuple[int, int], int]
    counting_mode: str
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        n = len(self.terms)
        for (i, j), count in self.edges.items():
            if not (0 <= i < j < n):
                raise ConsistencyError(f"edge ({i}, {j}) is not an ordered pair of term indices")
            if count <= 0:
                raise ConsistencyError(f"edge ({i}, {j}) has non-positive count {count}")

    @property
    def term_strings(self) -> tuple[str, ...]:
        return tuple(node.term for node in self.terms)

    def node_strengths(self) -> list[int]:
        """w_i = sum of co-occurrence counts on edges at i."""
        w = [0] * len(self.terms)
        for (i, j), count in self.edges.items():
            w[i] += count
            w[j] += count
        return w

    def subnetwork(self, indices: Sequence[int]) -> "CoocNetwork":
        """Restriction to the given term indices (ascending), edges remapped."""
        indices = sorted(indices)
        remap = {old: new for new, old in enumerate(indices)}
        terms = tuple(self.terms[i] for i in indices)
        edges = {
            (remap[i], remap[j]): c
            for (i, j), c in sorted(self.edges.items())
            if i in remap and j in remap
        }
        return CoocNetwork(terms, edges, self.counting_mode, dict(self.provenance))


@dataclass(frozen=True)
class SimilarityMatrix:
    """Association strengths for every co-occurring pair."""

    terms: tuple[str, ...]
    strengths: dict[tuple[int, int], float]
    node_strengths: tuple[int, ...]
    total: int  # T = half the sum of node strengths = sum of edge counts


@dataclass(frozen=True)
class RelevanceScores:
    values: tuple[float, ...]


def count_cooccurrences(units: Sequence[TextUnit], lexicon: Lexicon, counting: str = BINARY) -> CoocNetwork:
    """Build the co-occurrence network of the lexicon's terms over the units.

    Binary counting adds 1 per unit containing both terms; full counting
    adds min(times_i, times_j) per unit. The lexicon must have been built
    from the same units.
    """
    if counting not in (BINARY, FULL):
        raise ConfigError(f"counting must be '{BINARY}' or '{FULL}', got {counting!r}")
    unit_ids = [u.unit_id for u in units]
    known_units = set(unit_ids)
    terms = tuple(TermNode(e.term, e.occurrence_count) for e in lexicon)
    unit_terms: dict[str, list[tuple[int, int]]] = {}
    for index, entry in enumerate(lexicon):
        if not entry.unit_counts:
            raise ConsistencyError(f"term {entry.term!r} is in the lexicon but matched no unit")
        stray = sorted(set(entry.unit_counts) - known_units)
        if stray:
            raise ConsistencyError(f"term {entry.term!r} counts unknown unit(s) {stray}")
        for unit_id, times in entry.unit_counts.items():
            unit_terms.setdefault(unit_id, []).append((index, times))
    edges: dict[tuple[int, int], int] = {}
    for unit_id in unit_ids:
        present = sorted(unit_terms.get(unit_id, ()))
        for (i, times_i), (j, times_j) in combinations(present, 2):
            weight = 1 if counting == BINARY else min(times_i, times_j)
            edges[(i, j)] = edges.get((i, j), 0) + weight
    source = {u.source for u in units}
    provenance = {
        "source": source.pop() if len(source) == 1 else "mixed",
        "n_units": len(units),
        "counting": counting,
        "min_occurrences": lexicon.min_occurrences,
    }
    return CoocNetwork(terms, dict(sorted(edges.items())), counting, provenance)


def association_strength(net: CoocNetwork) -> SimilarityMatrix:
    """s_ij = 2*T*c_ij / (w_i*w_j); isolated terms are excluded with a warning.

    Computed from integers before a single float division, so scaling all
    counts by a constant leaves every strength bit-identical.
    """
    if not net.edges:
        raise ValueError("association strength needs at least one edge")
    w = net.node_strengths()
    total = sum(net.edges.values())
    isolated = [i for i, weight in enumerate(w) if weight == 0]
    if isolated:
        names = [net.terms[i].term for i in isolated]
        warnings.warn(f"excluding {len(isolated)} isolated term(s) from similarity matrix: {names}", CitemapWarning, stacklevel=2)
    keep = [i for i in range(len(net.terms)) if w[i] > 0]
    remap = {old: new for new, old in enumerate(keep)}
    strengths = {
        (remap[i], remap[j]): (2 * total * c) / (w[i] * w[j])
        for (i, j), c in sorted(net.edges.items())
    }
    return SimilarityMatrix(
        terms=tuple(net.terms[i].term for i in keep),
        strengths=strengths,
        node_strengths=tuple(w[i] for i in keep),
        total=total,
    )


def profile_divergence(profile: dict[int, float], background: dict[int, float]) -> float:
    """sum_j p(j) * ln(p(j) / q(j)) over the profile's support."""
    return sum(p * math.log(p / background[j]) for j, p in sorted(profile.items()) if p > 0)


def relevance_scores(net: CoocNetwork) -> RelevanceScores:
    """Divergence of each term's co-occurrence profile from the background.

    With p_i(j) = c_ij / w_i and q(j) = w_j / (2T), the score is
    sum_j p_i(j) * ln(p_i(j) / q(j)) over co-occurring j. Isolated terms
    score 0.
    """
    w = net.node_strengths()
    if sum(1 for weight in w if weight > 0) < 2:
        raise ValueError("relevance scores need at least 2 terms with positive strength")
    total = sum(net.edges.values())
    neighbors: dict[int, dict[int, int]] = {}
    for (i, j), c in net.edges.items():
        neighbors.setdefault(i, {})[j] = c
        neighbors.setdefault(j, {})[i] = c
    background = {j: w[j] / (2 * total) for j in range(len(net.terms)) if w[j] > 0}
    values = []
    for i in range(len(net.terms)):
        if w[i] == 0:
            values.append(0.0)
            continue
        profile = {j: c / w[i] for j, c in neighbors[i].items()}
        # mathematically >= 0; the floor only absorbs float round-off
        values.append(max(0.0, profile_divergence(profile, background)))
    return RelevanceScores(tuple(values))


def select_top_terms(
    net: CoocNetwork,
    scores: RelevanceScores,
    fraction: float,
    exclusions: Iterable[str] = (),
) -> CoocNetwork:
    """Keep the floor(fraction * n) most relevant terms, then drop exclusions.

    Ties break toward higher occurrence count, then lexicographically
    ascending. Edges are restricted to the retained terms; the provenance
    records the retained counts before and after exclusions.
    """
    if not 0 < fraction <= 1:
        raise ConfigError(f"fraction must be in (0, 1], got {fraction}")
    n = len(net.terms)
    if len(scores.values) != n:
        raise ConsistencyError(f"{len(scores.values)} scores for {n} terms")
    # exact rational floor: 0.6 of 15 terms is 9, not floor(8.999...)
    k = int(Fraction(str(fraction)) * n)
    if k == 0:
        raise ValueError("fraction too small for lexicon")
    order = sorted(
        range(n),
        key=lambda i: (-scores.values[i], -net.terms[i].occurrences, net.terms[i].term),
    )
    retained = sorted(order[:k])
    exclusion_set = frozenset(exclusions)
    final = [i for i in retained if net.terms[i].term not in exclusion_set]
    sub = net.subnetwork(final)
    sub.provenance.update(
        {
            "relevance_fraction": fraction,
            "retained_before_exclusions": k,
            "retained_after_exclusions": len(final),
        }
    )
    return sub
