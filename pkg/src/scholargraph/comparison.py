"""Comparison tables: predicate-aligned property matrix across contributions.

Properties are gathered from each contribution's subtree (class-typing
statements excluded, since typing is structural metadata rather than a
compared property). A row survives when the property occurs on at least
``ceil(min_coverage * n)`` of the n contributions; the default coverage
keeps properties shared by two or more.

Alignment: by predicate id, or by case-folded predicate label when
``align_by_label`` is set (curation tends to create same-label predicate
duplicates). At depth > 1, nested statements flatten to "label / label"
predicate paths. The display label of a row is the lexicographically
smallest original-case path observed for its alignment key.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .contributions import TYPE, PaperCatalog
from .errors import NotAContribution, TooFewContributions
from .graph_store import GraphStore, NodeKind, statement_sort_key


@dataclass(frozen=True)
class ComparisonOptions:
    min_coverage: float | None = None  # None -> 2/n
    depth: int = 1
    align_by_label: bool = True

    def __post_init__(self) -> None:
        if self.min_coverage is not None and not (0 < self.min_coverage <= 1):
            raise ValueError("min_coverage must be in (0, 1]")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")


@dataclass(frozen=True)
class ComparisonColumn:
    contribution: str
    title: str


@dataclass
class ComparisonRow:
    label: str
    coverage: int
    cells: list[list[str]]  # per column, object labels sorted lexicographically

    def to_dict(self) -> dict:
        return {"property": self.label, "coverage": self.coverage, "cells": self.cells}


@dataclass
class ComparisonTable:
    columns: list[ComparisonColumn]
    rows: list[ComparisonRow]

    def to_dict(self) -> dict:
        return {
            "columns": [
                {"contribution": c.contribution, "title": c.title} for c in self.columns
            ],
            "rows": [r.to_dict() for r in self.rows],
        }


def _gather_properties(
    store: GraphStore,
    contribution: str,
    depth: int,
    align_by_label: bool,
    type_predicate: str | None,
) -> dict[tuple, dict]:
    """Property map for one contribution.

    Keyed by alignment key; each entry carries the observed display paths
    and the object labels. Nodes are expanded once, at their first-found
    (breadth-first, statement-id ordered) predicate path.
    """
    properties: dict[tuple, dict] = {}
    visited = {contribution}
    frontier: list[tuple[str, tuple[str, ...], tuple[str, ...]]] = [
        (contribution, (), ())
    ]
    for _ in range(depth):
        next_frontier = []
        for source, key_path, label_path in frontier:
            statements = sorted(
                store.query_statements(subject=source),
                key=lambda s: statement_sort_key(s.id),
            )
            for stmt in statements:
                if type_predicate is not None and stmt.predicate == type_predicate:
                    continue
                predicate = store.get_node(stmt.predicate)
                if align_by_label:
                    key = key_path + (predicate.label.casefold(),)
                else:
                    key = key_path + (stmt.predicate,)
                labels = label_path + (predicate.label,)
                target = store.get_node(stmt.object)
                entry = properties.setdefault(key, {"paths": set(), "values": []})
                entry["paths"].add(" / ".join(labels))
                entry["values"].append(target.label)
                if target.kind is NodeKind.RESOURCE and target.id not in visited:
                    visited.add(target.id)
                    next_frontier.append((target.id, key, labels))
        frontier = next_frontier
        if not frontier:
            break
    return properties


def compare(
    store: GraphStore,
    catalog: PaperCatalog,
    contribution_ids: list[str],
    options: ComparisonOptions | None = None,
) -> ComparisonTable:
    """Build the property-aligned comparison matrix.

    Columns keep input order; rows are ordered by coverage descending,
    then display label. Cells hold the matching object labels sorted
    lexicographically (possibly empty).
    """
    options = options or ComparisonOptions()
    n = len(contribution_ids)
    if n < 2 or len(set(contribution_ids)) != n:
        raise TooFewContributions("need at least two distinct contribution ids")
    type_predicate = catalog.vocabulary.predicates.get(TYPE)
    with store.locked():
        columns = []
        for cid in contribution_ids:
            node = store.get_node(cid)
            if not catalog.is_contribution(node):
                raise NotAContribution(f"{cid} is not a contribution resource")
            paper = catalog.paper_of_contribution(cid)
            columns.append(
                ComparisonColumn(
                    contribution=cid, title=paper.label if paper else node.label
                )
            )
        per_contribution = [
            _gather_properties(
                store, cid, options.depth, options.align_by_label, type_predicate
            )
            for cid in contribution_ids
        ]
    min_coverage = options.min_coverage if options.min_coverage is not None else 2 / n
    threshold = math.ceil(min_coverage * n)
    all_keys = set()
    for props in per_contribution:
        all_keys.update(props)
    rows = []
    for key in all_keys:
        coverage = sum(1 for props in per_contribution if key in props)
        if coverage < threshold:
            continue
        paths = set()
        for props in per_contribution:
            if key in props:
                paths.update(props[key]["paths"])
        label = min(paths)
        cells = [
            sorted(props[key]["values"]) if key in props else []
            for props in per_contribution
        ]
        rows.append(ComparisonRow(label=label, coverage=coverage, cells=cells))
    rows.sort(key=lambda r: (-r.coverage, r.label))
    return ComparisonTable(columns=columns, rows=rows)


def render_csv(table: ComparisonTable) -> bytes:
    """RFC 4180 CSV: header of paper titles, one row per property, multiple
    cell values joined by "; "."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(["Property"] + [c.title for c in table.columns])
    for row in table.rows:
        writer.writerow([row.label] + ["; ".join(cell) for cell in row.cells])
    return buffer.getvalue().encode("utf-8")
