"""Research-contribution model on top of the graph store.

A paper submission (bibliographic metadata, a research field from the
shipped taxonomy, and one or more contribution drafts) is materialized as
plain graph statements using a reserved predicate vocabulary, and read
back as structured views. Nothing is kept in side tables; the graph is
the single source of truth.

Reference semantics for drafts: ``{"id": ...}`` links an existing node
and ``{"label": ...}`` always creates a fresh node. Deduplication is the
caller's job (the UI does it through auto-completion).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources
from typing import Any, Iterator

from .errors import (
    NotAPaper,
    UnknownField,
    UnknownNode,
    UnknownNodeReference,
    ValidationFailed,
)
from .graph_store import (
    GraphStore,
    Node,
    NodeKind,
    node_sort_key,
    statement_sort_key,
)

# Predicate vocabulary created (or bound) at startup. Order is the creation
# order on a fresh store, so fixture ids stay stable.
HAS_CONTRIBUTION = "has contribution"
ADDRESSES = "addresses"
UTILIZES_METHOD = "utilizes method"
HAS_RESEARCH_FIELD = "has research field"
HAS_TITLE = "has title"
HAS_DOI = "has DOI"
HAS_AUTHOR = "has author"
HAS_PUBLICATION_YEAR = "has publication year"
HAS_VENUE = "has venue"
UTILIZES_PROGRAMMING_LANGUAGE = "utilizes programming language"
EVALUATED_ON_DATASET = "evaluated on dataset"
EVALUATION_METRIC = "evaluation metric"
APPROACH = "approach"
TYPE = "type"

RESERVED_PREDICATES = (
    HAS_CONTRIBUTION,
    ADDRESSES,
    UTILIZES_METHOD,
    HAS_RESEARCH_FIELD,
    HAS_TITLE,
    HAS_DOI,
    HAS_AUTHOR,
    HAS_PUBLICATION_YEAR,
    HAS_VENUE,
    UTILIZES_PROGRAMMING_LANGUAGE,
    EVALUATED_ON_DATASET,
    EVALUATION_METRIC,
    APPROACH,
    TYPE,
)

CLASS_PAPER = "Paper"
CLASS_CONTRIBUTION = "Contribution"
CLASS_RESEARCH_FIELD = "ResearchField"


# --- research field taxonomy --------------------------------------------------


@dataclass(frozen=True)
class ResearchField:
    id: str
    label: str
    parent_id: str | None


class ResearchFieldTaxonomy:
    """Static two-level research-field tree shipped with the package.

    Field ids and labels are globally unique; uniqueness is what lets the
    vocabulary bind field resources back to field ids after a restore.
    """

    def __init__(self, fields: list[ResearchField]):
        self._fields: dict[str, ResearchField] = {}
        self._children: dict[str, list[str]] = {}
        labels = set()
        for f in fields:
            if f.id in self._fields:
                raise ValueError(f"duplicate field id {f.id!r}")
            if f.label in labels:
                raise ValueError(f"duplicate field label {f.label!r}")
            if f.parent_id is not None and f.parent_id not in self._fields:
                raise ValueError(f"field {f.id!r} listed before parent {f.parent_id!r}")
            self._fields[f.id] = f
            labels.add(f.label)
            self._children.setdefault(f.id, [])
            if f.parent_id is not None:
                self._children[f.parent_id].append(f.id)

    @classmethod
    def from_dict(cls, data: dict) -> "ResearchFieldTaxonomy":
        fields: list[ResearchField] = []

        def walk(entry: dict, parent: str | None) -> None:
            fields.append(ResearchField(entry["id"], entry["label"], parent))
            for child in entry.get("children", []):
                walk(child, entry["id"])

        for root in data["fields"]:
            walk(root, None)
        return cls(fields)

    @classmethod
    def load_default(cls) -> "ResearchFieldTaxonomy":
        raw = resources.files("scholargraph.data").joinpath("taxonomy.json").read_text(
            "utf-8"
        )
        return cls.from_dict(json.loads(raw))

    def __contains__(self, field_id: str) -> bool:
        return field_id in self._fields

    def __iter__(self) -> Iterator[ResearchField]:
        return iter(self._fields.values())

    def get(self, field_id: str) -> ResearchField:
        if field_id not in self._fields:
            raise UnknownField(f"no research field {field_id!r}")
        return self._fields[field_id]

    def self_and_descendants(self, field_id: str) -> list[str]:
        self.get(field_id)
        out = [field_id]
        queue = list(self._children.get(field_id, []))
        while queue:
            fid = queue.pop(0)
            out.append(fid)
            queue.extend(self._children.get(fid, []))
        return out

    def to_tree(self) -> list[dict]:
        """Nested representation for API/UI consumption."""

        def build(fid: str) -> dict:
            f = self._fields[fid]
            return {
                "id": f.id,
                "label": f.label,
                "children": [build(c) for c in self._children.get(fid, [])],
            }

        return [build(f.id) for f in self._fields.values() if f.parent_id is None]


# --- vocabulary ----------------------------------------------------------------


class Vocabulary:
    """Reserved predicates, class resources and field resources.

    ``bind`` is find-or-create by label (lowest id wins), so a fresh store
    gets deterministic ids and a restored or imported store binds to the
    nodes it already contains.
    """

    def __init__(self, store: GraphStore, taxonomy: ResearchFieldTaxonomy):
        self.store = store
        self.taxonomy = taxonomy
        self.predicates: dict[str, str] = {}
        self.contribution_class: str = ""
        self.field_nodes: dict[str, str] = {}
        self._field_by_node: dict[str, str] = {}
        self._bind()

    def _bind(self) -> None:
        store = self.store
        with store.locked():
            predicate_by_label: dict[str, str] = {}
            resource_by_label: dict[str, str] = {}
            for node in store.nodes():
                if node.kind is NodeKind.PREDICATE:
                    if node.label not in predicate_by_label or node_sort_key(
                        node.id
                    ) < node_sort_key(predicate_by_label[node.label]):
                        predicate_by_label[node.label] = node.id
                elif node.kind is NodeKind.RESOURCE:
                    if node.label not in resource_by_label or node_sort_key(
                        node.id
                    ) < node_sort_key(resource_by_label[node.label]):
                        resource_by_label[node.label] = node.id
            for label in RESERVED_PREDICATES:
                node_id = predicate_by_label.get(label)
                if node_id is None:
                    node_id = store.create_node(NodeKind.PREDICATE, label)
                self.predicates[label] = node_id
            class_id = resource_by_label.get(CLASS_CONTRIBUTION)
            if class_id is None:
                class_id = store.create_node(NodeKind.RESOURCE, CLASS_CONTRIBUTION)
            self.contribution_class = class_id
            for research_field in self.taxonomy:
                node_id = resource_by_label.get(research_field.label)
                if node_id is None or CLASS_RESEARCH_FIELD not in store.get_node(
                    node_id
                ).classes:
                    matches = [
                        n
                        for n in store.nodes(NodeKind.RESOURCE)
                        if n.label == research_field.label
                        and CLASS_RESEARCH_FIELD in n.classes
                    ]
                    if matches:
                        node_id = min(matches, key=lambda n: node_sort_key(n.id)).id
                    else:
                        node_id = store.create_node(
                            NodeKind.RESOURCE,
                            research_field.label,
                            {CLASS_RESEARCH_FIELD},
                        )
                self.field_nodes[research_field.id] = node_id
                self._field_by_node[node_id] = research_field.id

    def predicate(self, label: str) -> str:
        return self.predicates[label]

    def field_node(self, field_id: str) -> str:
        if field_id not in self.field_nodes:
            raise UnknownField(f"no research field {field_id!r}")
        return self.field_nodes[field_id]

    def field_id_for_node(self, node_id: str) -> str | None:
        return self._field_by_node.get(node_id)


# --- submission types -----------------------------------------------------------


@dataclass
class BibliographicMetadata:
    title: str
    doi: str | None = None
    authors: list[str] = field(default_factory=list)
    publication_year: int | None = None
    venue: str | None = None

    def __post_init__(self) -> None:
        if not self.title or not self.title.strip():
            raise ValueError("title must be non-empty")
        if self.publication_year is not None and not (
            1600 <= self.publication_year <= 2100
        ):
            raise ValueError(f"publication_year {self.publication_year} out of range")

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "doi": self.doi,
            "authors": list(self.authors),
            "publication_year": self.publication_year,
            "venue": self.venue,
        }


@dataclass(frozen=True)
class NodeRef:
    """Link to an existing node (``id``) or a new node to create (``label``).

    Exactly one of the two is set.
    """

    id: str | None = None
    label: str | None = None

    def __post_init__(self) -> None:
        if (self.id is None) == (self.label is None):
            raise ValueError("exactly one of id/label must be set")

    def to_dict(self) -> dict:
        return {"id": self.id} if self.id is not None else {"label": self.label}


@dataclass
class PropertyGroup:
    predicate: NodeRef
    values: list[NodeRef]


@dataclass
class ContributionDraft:
    name: str
    problem: NodeRef | None
    method: NodeRef | None = None
    results: list[PropertyGroup] = field(default_factory=list)


@dataclass
class PaperSubmission:
    metadata: BibliographicMetadata
    research_field: str
    contributions: list[ContributionDraft]
    submitted_by: str


# --- validation -------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    message: str
    path: str

    def to_dict(self) -> dict:
        return {"severity": self.severity, "message": self.message, "path": self.path}


@dataclass(frozen=True)
class ValidationReport:
    status: str  # "valid" | "invalid"
    issues: tuple[ValidationIssue, ...]

    @classmethod
    def from_issues(cls, issues: list[ValidationIssue]) -> "ValidationReport":
        status = "invalid" if any(i.severity == "error" for i in issues) else "valid"
        return cls(status=status, issues=tuple(issues))

    @property
    def valid(self) -> bool:
        return self.status == "valid"

    def to_dict(self) -> dict:
        return {"status": self.status, "issues": [i.to_dict() for i in self.issues]}


def validate_contribution(draft: ContributionDraft, path: str = "") -> ValidationReport:
    """Check the research-problem / method / results shape of one draft.

    A missing problem or an empty results list is an error; a missing
    method is only a warning.
    """
    issues: list[ValidationIssue] = []
    if draft.problem is None:
        issues.append(
            ValidationIssue("error", "a research problem is required", f"{path}problem")
        )
    if not draft.results:
        issues.append(
            ValidationIssue(
                "error", "at least one result is required", f"{path}results"
            )
        )
    for i, group in enumerate(draft.results):
        if not group.values:
            issues.append(
                ValidationIssue(
                    "error",
                    "property group needs at least one value",
                    f"{path}results[{i}]",
                )
            )
    if draft.method is None:
        issues.append(
            ValidationIssue("warning", "no research method given", f"{path}method")
        )
    return ValidationReport.from_issues(issues)


# --- submission parsing (shared by API and CLI) --------------------------------


def _shape_error(message: str, path: str) -> ValidationFailed:
    report = ValidationReport.from_issues([ValidationIssue("error", message, path)])
    return ValidationFailed(report, message)


def _parse_ref(obj: Any, path: str) -> NodeRef:
    if not isinstance(obj, dict):
        raise _shape_error("node reference must be an object", path)
    has_id = isinstance(obj.get("id"), str) and obj["id"]
    has_label = isinstance(obj.get("label"), str) and obj["label"].strip()
    if has_id == has_label:
        raise _shape_error("exactly one of id/label required", path)
    if has_id:
        return NodeRef(id=obj["id"])
    return NodeRef(label=obj["label"])


def parse_submission(payload: Any) -> PaperSubmission:
    """Build a PaperSubmission from its JSON form; shape problems raise
    :class:`ValidationFailed` with an explanatory report."""
    if not isinstance(payload, dict):
        raise _shape_error("submission must be an object", "")
    meta = payload.get("metadata")
    if not isinstance(meta, dict):
        raise _shape_error("metadata object required", "metadata")
    title = meta.get("title")
    if not isinstance(title, str) or not title.strip():
        raise _shape_error("metadata.title required", "metadata.title")
    doi = meta.get("doi")
    if doi is not None and not isinstance(doi, str):
        raise _shape_error("doi must be a string", "metadata.doi")
    authors = meta.get("authors", [])
    if not isinstance(authors, list) or not all(isinstance(a, str) for a in authors):
        raise _shape_error("authors must be a list of strings", "metadata.authors")
    year = meta.get("publication_year")
    if year is not None and (isinstance(year, bool) or not isinstance(year, int)):
        raise _shape_error("publication_year must be an integer", "metadata.publication_year")
    venue = meta.get("venue")
    if venue is not None and not isinstance(venue, str):
        raise _shape_error("venue must be a string", "metadata.venue")
    try:
        metadata = BibliographicMetadata(
            title=title, doi=doi, authors=list(authors), publication_year=year, venue=venue
        )
    except ValueError as exc:
        raise _shape_error(str(exc), "metadata") from exc
    research_field = payload.get("research_field")
    if not isinstance(research_field, str) or not research_field:
        raise _shape_error("research_field required", "research_field")
    raw_contributions = payload.get("contributions")
    if not isinstance(raw_contributions, list) or not raw_contributions:
        raise _shape_error(
            "at least one contribution required", "contributions"
        )
    contributions = []
    for i, raw in enumerate(raw_contributions):
        cpath = f"contributions[{i}]"
        if not isinstance(raw, dict):
            raise _shape_error("contribution must be an object", cpath)
        name = raw.get("name") or f"Contribution {i + 1}"
        if not isinstance(name, str):
            raise _shape_error("name must be a string", f"{cpath}.name")
        problem = raw.get("problem")
        problem_ref = _parse_ref(problem, f"{cpath}.problem") if problem is not None else None
        method = raw.get("method")
        method_ref = _parse_ref(method, f"{cpath}.method") if method is not None else None
        raw_results = raw.get("results", [])
        if not isinstance(raw_results, list):
            raise _shape_error("results must be a list", f"{cpath}.results")
        results = []
        for j, group in enumerate(raw_results):
            gpath = f"{cpath}.results[{j}]"
            if not isinstance(group, dict):
                raise _shape_error("property group must be an object", gpath)
            predicate = _parse_ref(group.get("predicate"), f"{gpath}.predicate")
            raw_values = group.get("values")
            if not isinstance(raw_values, list):
                raise _shape_error("values must be a list", f"{gpath}.values")
            values = [
                _parse_ref(v, f"{gpath}.values[{k}]") for k, v in enumerate(raw_values)
            ]
            results.append(PropertyGroup(predicate=predicate, values=values))
        contributions.append(
            ContributionDraft(
                name=name, problem=problem_ref, method=method_ref, results=results
            )
        )
    submitted_by = payload.get("submitted_by")
    if not isinstance(submitted_by, str) or not submitted_by:
        raise _shape_error("submitted_by required", "submitted_by")
    return PaperSubmission(
        metadata=metadata,
        research_field=research_field,
        contributions=contributions,
        submitted_by=submitted_by,
    )


def submission_to_dict(submission: PaperSubmission) -> dict:
    return {
        "metadata": submission.metadata.to_dict(),
        "research_field": submission.research_field,
        "contributions": [
            {
                "name": c.name,
                "problem": c.problem.to_dict() if c.problem else None,
                "method": c.method.to_dict() if c.method else None,
                "results": [
                    {
                        "predicate": g.predicate.to_dict(),
                        "values": [v.to_dict() for v in g.values],
                    }
                    for g in c.results
                ],
            }
            for c in submission.contributions
        ],
        "submitted_by": submission.submitted_by,
    }


# --- views -----------------------------------------------------------------------


@dataclass
class PropertyView:
    predicate_id: str
    predicate_label: str
    values: list[tuple[str, str]]  # (node id, label)

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate_id,
            "label": self.predicate_label,
            "values": [{"id": i, "label": l} for i, l in self.values],
        }


@dataclass
class ContributionView:
    id: str
    name: str
    problem: tuple[str, str] | None
    method: tuple[str, str] | None
    properties: list[PropertyView]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "problem": {"id": self.problem[0], "label": self.problem[1]}
            if self.problem
            else None,
            "method": {"id": self.method[0], "label": self.method[1]}
            if self.method
            else None,
            "properties": [p.to_dict() for p in self.properties],
        }


@dataclass
class PaperView:
    id: str
    metadata: BibliographicMetadata
    research_field: str | None
    contributions: list[ContributionView]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "metadata": self.metadata.to_dict(),
            "research_field": self.research_field,
            "contributions": [c.to_dict() for c in self.contributions],
        }


# --- catalog ---------------------------------------------------------------------


class PaperCatalog:
    """Materializes paper submissions as statements and reads them back."""

    def __init__(self, store: GraphStore, vocabulary: Vocabulary):
        self.store = store
        self.vocabulary = vocabulary

    # -- write side

    def validate_submission(self, submission: PaperSubmission) -> ValidationReport:
        issues: list[ValidationIssue] = []
        if not submission.contributions:
            issues.append(
                ValidationIssue(
                    "error", "at least one contribution required", "contributions"
                )
            )
        for i, draft in enumerate(submission.contributions):
            report = validate_contribution(draft, path=f"contributions[{i}].")
            issues.extend(report.issues)
        return ValidationReport.from_issues(issues)

    def ingest_paper(
        self,
        submission: PaperSubmission,
        *,
        created_at: datetime | None = None,
    ) -> str:
        """Create the full statement batch for one submission; returns the
        paper resource id. Atomic: on any error nothing is stored."""
        report = self.validate_submission(submission)
        if not report.valid:
            raise ValidationFailed(report)
        if submission.research_field not in self.vocabulary.taxonomy:
            raise UnknownField(f"no research field {submission.research_field!r}")
        store = self.store
        vocab = self.vocabulary
        by = submission.submitted_by
        with store.transaction():
            meta = submission.metadata
            paper = store.create_node(NodeKind.RESOURCE, meta.title, {CLASS_PAPER})

            def literal_stmt(predicate_label: str, value: str) -> None:
                literal = store.create_node(NodeKind.LITERAL, value)
                store.add_statement(
                    paper, vocab.predicate(predicate_label), literal, by,
                    created_at=created_at,
                )

            literal_stmt(HAS_TITLE, meta.title)
            if meta.doi:
                literal_stmt(HAS_DOI, meta.doi)
            for author in meta.authors:
                literal_stmt(HAS_AUTHOR, author)
            if meta.publication_year is not None:
                literal_stmt(HAS_PUBLICATION_YEAR, str(meta.publication_year))
            if meta.venue:
                literal_stmt(HAS_VENUE, meta.venue)
            store.add_statement(
                paper,
                vocab.predicate(HAS_RESEARCH_FIELD),
                vocab.field_node(submission.research_field),
                by,
                created_at=created_at,
            )
            for draft in submission.contributions:
                contribution = store.create_node(
                    NodeKind.RESOURCE, draft.name, {CLASS_CONTRIBUTION}
                )
                store.add_statement(
                    paper, vocab.predicate(HAS_CONTRIBUTION), contribution, by,
                    created_at=created_at,
                )
                store.add_statement(
                    contribution,
                    vocab.predicate(TYPE),
                    vocab.contribution_class,
                    by,
                    created_at=created_at,
                )
                assert draft.problem is not None  # guaranteed by validation
                problem = self._resolve(draft.problem, NodeKind.RESOURCE)
                store.add_statement(
                    contribution, vocab.predicate(ADDRESSES), problem, by,
                    created_at=created_at,
                )
                if draft.method is not None:
                    method = self._resolve(draft.method, NodeKind.RESOURCE)
                    store.add_statement(
                        contribution, vocab.predicate(UTILIZES_METHOD), method, by,
                        created_at=created_at,
                    )
                for group in draft.results:
                    predicate = self._resolve(group.predicate, NodeKind.PREDICATE)
                    for value in group.values:
                        obj = self._resolve(
                            value, NodeKind.RESOURCE, allow_literal=True
                        )
                        store.add_statement(
                            contribution, predicate, obj, by, created_at=created_at
                        )
            return paper

    def _resolve(
        self, ref: NodeRef, create_kind: NodeKind, allow_literal: bool = False
    ) -> str:
        if ref.label is not None:
            return self.store.create_node(create_kind, ref.label)
        try:
            node = self.store.get_node(ref.id)  # type: ignore[arg-type]
        except UnknownNode as exc:
            raise UnknownNodeReference(f"no node {ref.id!r}") from exc
        allowed = {create_kind}
        if allow_literal:
            allowed.add(NodeKind.LITERAL)
        if node.kind not in allowed:
            raise UnknownNodeReference(
                f"{ref.id} is a {node.kind.value}; expected "
                + " or ".join(sorted(k.value for k in allowed))
            )
        return node.id

    # -- read side

    def is_contribution(self, node: Node) -> bool:
        return node.kind is NodeKind.RESOURCE and CLASS_CONTRIBUTION in node.classes

    def get_paper(self, paper_id: str) -> PaperView:
        """Rebuild the submission view purely from statements."""
        store = self.store
        vocab = self.vocabulary
        with store.locked():
            node = store.get_node(paper_id)
            if node.kind is not NodeKind.RESOURCE or CLASS_PAPER not in node.classes:
                raise NotAPaper(f"{paper_id} is not a paper resource")
            outgoing = store.query_statements(subject=paper_id)

            def objects_of(predicate_label: str) -> list[str]:
                pid = vocab.predicate(predicate_label)
                return [s.object for s in outgoing if s.predicate == pid]

            def first_label(predicate_label: str) -> str | None:
                objs = objects_of(predicate_label)
                return store.get_node(objs[0]).label if objs else None

            year_raw = first_label(HAS_PUBLICATION_YEAR)
            try:
                year = int(year_raw) if year_raw is not None else None
            except ValueError:
                year = None
            metadata = BibliographicMetadata(
                title=first_label(HAS_TITLE) or node.label,
                doi=first_label(HAS_DOI),
                authors=[store.get_node(o).label for o in objects_of(HAS_AUTHOR)],
                publication_year=year,
                venue=first_label(HAS_VENUE),
            )
            field_objs = objects_of(HAS_RESEARCH_FIELD)
            research_field = (
                vocab.field_id_for_node(field_objs[0]) if field_objs else None
            )
            contributions = [
                self.get_contribution(cid) for cid in objects_of(HAS_CONTRIBUTION)
            ]
            return PaperView(
                id=paper_id,
                metadata=metadata,
                research_field=research_field,
                contributions=contributions,
            )

    def get_contribution(self, contribution_id: str) -> ContributionView:
        store = self.store
        vocab = self.vocabulary
        with store.locked():
            node = store.get_node(contribution_id)
            outgoing = store.query_statements(subject=contribution_id)
            structural = {
                vocab.predicate(ADDRESSES): "problem",
                vocab.predicate(UTILIZES_METHOD): "method",
                vocab.predicate(TYPE): "type",
            }
            problem = method = None
            grouped: dict[str, PropertyView] = {}
            for stmt in outgoing:
                target = store.get_node(stmt.object)
                role = structural.get(stmt.predicate)
                if role == "problem" and problem is None:
                    problem = (target.id, target.label)
                elif role == "method" and method is None:
                    method = (target.id, target.label)
                elif role is None:
                    view = grouped.get(stmt.predicate)
                    if view is None:
                        view = PropertyView(
                            predicate_id=stmt.predicate,
                            predicate_label=store.get_node(stmt.predicate).label,
                            values=[],
                        )
                        grouped[stmt.predicate] = view
                    view.values.append((target.id, target.label))
            return ContributionView(
                id=contribution_id,
                name=node.label,
                problem=problem,
                method=method,
                properties=list(grouped.values()),
            )

    def paper_of_contribution(self, contribution_id: str) -> Node | None:
        """The unique paper linking the contribution, if there is one."""
        store = self.store
        with store.locked():
            incoming = store.query_statements(
                predicate=self.vocabulary.predicate(HAS_CONTRIBUTION),
                object=contribution_id,
            )
            papers = [
                store.get_node(s.subject)
                for s in incoming
                if CLASS_PAPER in store.get_node(s.subject).classes
            ]
            return papers[0] if len(papers) == 1 else None

    def list_papers(self) -> list[str]:
        with self.store.locked():
            ids = [
                n.id
                for n in self.store.nodes(NodeKind.RESOURCE)
                if CLASS_PAPER in n.classes
            ]
            return sorted(ids, key=node_sort_key)

    def list_papers_by_field(
        self, field_id: str, include_descendants: bool = False
    ) -> list[str]:
        """Papers whose research-field statement targets the field (or any
        descendant when the flag is set), ordered by paper id."""
        vocab = self.vocabulary
        if include_descendants:
            field_ids = vocab.taxonomy.self_and_descendants(field_id)
        else:
            vocab.taxonomy.get(field_id)
            field_ids = [field_id]
        targets = {vocab.field_node(fid) for fid in field_ids}
        store = self.store
        with store.locked():
            paper_ids = set()
            for target in targets:
                for stmt in store.query_statements(
                    predicate=vocab.predicate(HAS_RESEARCH_FIELD), object=target
                ):
                    subject = store.get_node(stmt.subject)
                    if CLASS_PAPER in subject.classes:
                        paper_ids.add(subject.id)
            return sorted(paper_ids, key=node_sort_key)


def expected_statement_count(submission: PaperSubmission) -> int:
    """Closed-form statement budget for one submission."""
    meta = submission.metadata
    m = (
        1
        + (1 if meta.doi else 0)
        + len(meta.authors)
        + (1 if meta.publication_year is not None else 0)
        + (1 if meta.venue else 0)
    )
    total = m + 1
    for draft in submission.contributions:
        links = 1 + (1 if draft.method is not None else 0)
        total += 2 + links
        total += sum(len(g.values) for g in draft.results)
    return total
