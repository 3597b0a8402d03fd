"""Contribution similarity: weighted Jaccard over (predicate, object) features.

A contribution's feature set is extracted from its outgoing subtree
(class-typing statements excluded); retrieval goes through an inverted
feature index so only candidates sharing at least one feature are scored.
Weights default to 1.0 per predicate, which reduces to plain Jaccard.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import IndexStale, NotAContribution
from .graph_store import GraphStore, NodeKind, Statement, node_sort_key

CONTRIBUTION_CLASS = "Contribution"


@dataclass(frozen=True)
class Feature:
    """One (predicate, object) pair; literals key by ``lit:<label>``."""

    predicate: str
    object_key: str


@dataclass(frozen=True)
class FeatureSet:
    contribution: str
    features: frozenset[Feature]


@dataclass(frozen=True)
class IndexStats:
    contribution_count: int
    feature_count: int


@dataclass(frozen=True)
class _Snapshot:
    """Immutable index state; swapped in a single attribute assignment."""

    version: int | None = None
    postings: dict[Feature, frozenset[str]] = field(default_factory=dict)
    feature_sets: dict[str, frozenset[Feature]] = field(default_factory=dict)
    totals: dict[str, float] = field(default_factory=dict)


def _feature_of(stmt: Statement, store: GraphStore) -> Feature:
    target = store.get_node(stmt.object)
    if target.kind is NodeKind.LITERAL:
        key = "lit:" + target.label.casefold()
    else:
        key = target.id
    return Feature(predicate=stmt.predicate, object_key=key)


def similarity_score(
    a: Iterable[Feature],
    b: Iterable[Feature],
    weights: Mapping[str, float] | None = None,
) -> float:
    """Weighted Jaccard of two feature sets; 0.0 when both are empty."""
    set_a, set_b = frozenset(a), frozenset(b)
    if not set_a and not set_b:
        return 0.0

    def weight(f: Feature) -> float:
        return weights.get(f.predicate, 1.0) if weights else 1.0

    intersection = sum(weight(f) for f in set_a & set_b)
    union = sum(weight(f) for f in set_a | set_b)
    return intersection / union if union else 0.0


class SimilarityIndex:
    """Inverted feature index over all contribution resources.

    Store writes make the index stale; with ``auto_rebuild`` (the service
    default) the next query rebuilds lazily, otherwise a stale query
    raises :class:`IndexStale`. Queries read an immutable snapshot that
    :meth:`rebuild` swaps atomically, so they may overlap a rebuild.
    """

    def __init__(
        self,
        store: GraphStore,
        *,
        depth: int = 2,
        type_predicate: str | None = None,
        weights: Mapping[str, float] | None = None,
        auto_rebuild: bool = True,
    ):
        self.store = store
        self.depth = depth
        self.type_predicate = type_predicate
        self.weights = dict(weights) if weights else {}
        self.auto_rebuild = auto_rebuild
        self._snapshot = _Snapshot()

    def _require_contribution(self, contribution: str) -> None:
        node = self.store.get_node(contribution)
        if node.kind is not NodeKind.RESOURCE or CONTRIBUTION_CLASS not in node.classes:
            raise NotAContribution(f"{contribution} is not a contribution resource")

    def extract_features(
        self, contribution: str, depth: int | None = None
    ) -> FeatureSet:
        """Distinct (predicate, object) pairs from the contribution subtree,
        skipping class-typing statements."""
        store = self.store
        with store.locked():
            self._require_contribution(contribution)
            features = set()
            for stmt in store.subtree(contribution, depth or self.depth):
                if self.type_predicate is not None and stmt.predicate == self.type_predicate:
                    continue
                features.add(_feature_of(stmt, store))
            return FeatureSet(contribution=contribution, features=frozenset(features))

    @property
    def stale(self) -> bool:
        return self._snapshot.version != self.store.version

    def rebuild(self) -> IndexStats:
        """Re-derive the index from the current graph; atomic swap."""
        store = self.store
        with store.locked():
            postings: dict[Feature, set[str]] = {}
            feature_sets: dict[str, frozenset[Feature]] = {}
            totals: dict[str, float] = {}
            for node in store.nodes(NodeKind.RESOURCE):
                if CONTRIBUTION_CLASS not in node.classes:
                    continue
                feature_set = self.extract_features(node.id)
                feature_sets[node.id] = feature_set.features
                totals[node.id] = sum(self._weight(f) for f in feature_set.features)
                for feature in feature_set.features:
                    postings.setdefault(feature, set()).add(node.id)
            version = store.version
        self._snapshot = _Snapshot(
            version=version,
            postings={f: frozenset(c) for f, c in postings.items()},
            feature_sets=feature_sets,
            totals=totals,
        )
        return IndexStats(
            contribution_count=len(feature_sets), feature_count=len(postings)
        )

    def _weight(self, feature: Feature) -> float:
        return self.weights.get(feature.predicate, 1.0)

    def top_k_similar(self, contribution: str, k: int) -> list[tuple[str, float]]:
        """The k highest-scoring other contributions with score > 0,
        descending by score, ties broken by contribution id."""
        if k < 1:
            raise ValueError("k must be >= 1")
        self._require_contribution(contribution)
        if self.stale:
            if not self.auto_rebuild:
                raise IndexStale("index out of date; rebuild required")
            self.rebuild()
        snapshot = self._snapshot
        query = snapshot.feature_sets.get(contribution, frozenset())
        intersections: dict[str, float] = {}
        for feature in query:
            for candidate in snapshot.postings.get(feature, ()):
                if candidate == contribution:
                    continue
                intersections[candidate] = intersections.get(
                    candidate, 0.0
                ) + self._weight(feature)
        query_total = snapshot.totals.get(contribution, 0.0)
        scored = []
        for candidate, shared in intersections.items():
            union = query_total + snapshot.totals[candidate] - shared
            if union <= 0:
                continue
            score = shared / union
            if score > 0:
                scored.append((candidate, score))
        scored.sort(key=lambda pair: (-pair[1], node_sort_key(pair[0])))
        return scored[:k]
