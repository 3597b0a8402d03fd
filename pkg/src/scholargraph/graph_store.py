"""In-memory, index-backed store for an annotated-statement graph.

The data model is RDF-like: resources, predicates and literals are nodes;
a statement is a directed (subject, predicate, object) edge. Unlike plain
RDF triples, statements carry an annotation map whose reserved keys
``created_at``/``created_by`` mirror immutable provenance.

Identifier scheme: "R{n}" resources, "P{n}" predicates, "L{n}" literals,
"S{n}" statements, with per-kind counters that never reuse a number.
Cross-kind orderings (dump files, tie-breaks) rank resources before
predicates before literals, then numerically.

Concurrency: one re-entrant lock serializes writes; readers take the same
lock, so no caller ever observes a partially applied write batch. Use
:meth:`GraphStore.transaction` to make a multi-operation write atomic.
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import BinaryIO, Callable, Iterable, Iterator

from .errors import (
    ClassesOnNonResource,
    DuplicateTriple,
    EmptyLabel,
    ForwardReference,
    IdCollision,
    KindViolation,
    MalformedRecord,
    NotAResource,
    ReservedKey,
    SinkFailure,
    UnknownNode,
    UnknownStatement,
)


class NodeKind(str, Enum):
    RESOURCE = "resource"
    PREDICATE = "predicate"
    LITERAL = "literal"


_ID_PREFIX = {
    NodeKind.RESOURCE: "R",
    NodeKind.PREDICATE: "P",
    NodeKind.LITERAL: "L",
}
_KIND_RANK = {NodeKind.RESOURCE: 0, NodeKind.PREDICATE: 1, NodeKind.LITERAL: 2}
_PREFIX_RANK = {"R": 0, "P": 1, "L": 2}

RESERVED_ANNOTATION_KEYS = frozenset({"created_at", "created_by"})

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def utc_now() -> datetime:
    """Current UTC time truncated to whole seconds."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)


def parse_timestamp(raw: str) -> datetime:
    return datetime.strptime(raw, TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc)


def node_sort_key(node_id: str) -> tuple[int, int]:
    """Total order over node ids: resources, then predicates, then literals,
    numerically within each kind."""
    return (_PREFIX_RANK[node_id[0]], int(node_id[1:]))


def statement_sort_key(statement_id: str) -> int:
    return int(statement_id[1:])


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    label: str
    classes: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Provenance:
    created_at: datetime
    created_by: str


@dataclass
class Statement:
    """A directed edge with an annotation map.

    ``annotations`` always contains the mirrored provenance keys; the rest
    is free-form string-to-string curator metadata.
    """

    id: str
    subject: str
    predicate: str
    object: str
    annotations: dict[str, str]
    provenance: Provenance

    def user_annotations(self) -> dict[str, str]:
        """Annotations without the mirrored provenance keys."""
        return {
            k: v
            for k, v in self.annotations.items()
            if k not in RESERVED_ANNOTATION_KEYS
        }

    def copy(self) -> "Statement":
        return replace(self, annotations=dict(self.annotations))


@dataclass(frozen=True)
class StatementFilter:
    """Optional subject/predicate/object constraints; all-empty = full scan."""

    subject: str | None = None
    predicate: str | None = None
    object: str | None = None


def _coerce_timestamp(ts: datetime | None) -> datetime:
    if ts is None:
        return utc_now()
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


class GraphStore:
    """Annotated-statement graph with subject/predicate/object indexes."""

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._nodes: dict[str, Node] = {}
        self._statements: dict[str, Statement] = {}
        self._node_counters: dict[NodeKind, int] = {k: 0 for k in NodeKind}
        self._statement_counter = 0
        self._by_subject: dict[str, set[str]] = defaultdict(set)
        self._by_predicate: dict[str, set[str]] = defaultdict(set)
        self._by_object: dict[str, set[str]] = defaultdict(set)
        self._triples: dict[tuple[str, str, str], str] = {}
        self._creation_order: list[str] = []
        self._version = 0
        self._undo: list[Callable[[], None]] | None = None

    # --- locking / transactions ------------------------------------------

    @property
    def lock(self) -> threading.RLock:
        return self._lock

    @contextmanager
    def locked(self) -> Iterator[None]:
        with self._lock:
            yield

    @contextmanager
    def transaction(self) -> Iterator[None]:
        """All-or-nothing write batch.

        On exception every mutation made inside the block is rolled back in
        reverse order. Nested transactions join the outermost one.
        """
        with self._lock:
            if self._undo is not None:
                yield
                return
            self._undo = []
            try:
                yield
            except BaseException:
                for undo in reversed(self._undo):
                    undo()
                raise
            finally:
                self._undo = None

    def _record_undo(self, undo: Callable[[], None]) -> None:
        if self._undo is not None:
            self._undo.append(undo)

    @property
    def version(self) -> int:
        """Monotonic write counter; bumps on every successful mutation."""
        return self._version

    # --- nodes -------------------------------------------------------------

    def create_node(
        self,
        kind: NodeKind,
        label: str,
        classes: Iterable[str] = (),
    ) -> str:
        kind = NodeKind(kind)
        label = label.strip()
        if not label:
            raise EmptyLabel("node label must be non-empty after trimming")
        class_set = frozenset(classes)
        if class_set and kind is not NodeKind.RESOURCE:
            raise ClassesOnNonResource(
                f"classes are only allowed on resources, not {kind.value}s"
            )
        with self._lock:
            self._node_counters[kind] += 1
            node_id = f"{_ID_PREFIX[kind]}{self._node_counters[kind]}"
            node = Node(id=node_id, kind=kind, label=label, classes=class_set)
            self._nodes[node_id] = node
            self._creation_order.append(node_id)
            self._version += 1

            def undo() -> None:
                del self._nodes[node_id]
                self._creation_order.remove(node_id)
                self._node_counters[kind] -= 1

            self._record_undo(undo)
            return node_id

    def get_node(self, node_id: str) -> Node:
        with self._lock:
            node = self._nodes.get(node_id)
            if node is None:
                raise UnknownNode(f"no node {node_id!r}")
            return node

    def has_node(self, node_id: str) -> bool:
        with self._lock:
            return node_id in self._nodes

    def nodes(self, kind: NodeKind | None = None) -> list[Node]:
        with self._lock:
            if kind is None:
                return list(self._nodes.values())
            return [n for n in self._nodes.values() if n.kind is kind]

    @property
    def node_count(self) -> int:
        with self._lock:
            return len(self._nodes)

    def find_nodes(
        self,
        query: str,
        kind: NodeKind | None = None,
        limit: int = 10,
    ) -> list[Node]:
        """Case-insensitive substring search over node labels.

        Results order: prefix matches first, then shorter labels, then id.
        A blank query returns the most recently created nodes up to ``limit``.
        """
        if limit < 1:
            raise ValueError("limit must be >= 1")
        needle = query.strip().casefold()
        with self._lock:
            if not needle:
                recent = []
                for node_id in reversed(self._creation_order):
                    node = self._nodes[node_id]
                    if kind is None or node.kind is kind:
                        recent.append(node)
                        if len(recent) == limit:
                            break
                return recent
            matches = [
                node
                for node in self._nodes.values()
                if (kind is None or node.kind is kind)
                and needle in node.label.casefold()
            ]
            matches.sort(
                key=lambda n: (
                    0 if n.label.casefold().startswith(needle) else 1,
                    len(n.label),
                    node_sort_key(n.id),
                )
            )
            return matches[:limit]

    # --- statements ----------------------------------------------------------

    def add_statement(
        self,
        subject: str,
        predicate: str,
        object: str,
        created_by: str,
        *,
        created_at: datetime | None = None,
        statement_id: str | None = None,
        annotations: dict[str, str] | None = None,
    ) -> str:
        """Store a (subject, predicate, object) edge with provenance.

        ``created_at``/``statement_id``/``annotations`` overrides exist for
        deterministic replay and dump import; normal callers leave them unset.
        """
        with self._lock:
            for node_id, wanted in (
                (subject, (NodeKind.RESOURCE,)),
                (predicate, (NodeKind.PREDICATE,)),
                (object, (NodeKind.RESOURCE, NodeKind.LITERAL)),
            ):
                node = self._nodes.get(node_id)
                if node is None:
                    raise UnknownNode(f"no node {node_id!r}")
                if node.kind not in wanted:
                    raise KindViolation(
                        f"{node_id} is a {node.kind.value}; expected "
                        + " or ".join(k.value for k in wanted)
                    )
            triple = (subject, predicate, object)
            if triple in self._triples:
                raise DuplicateTriple(
                    f"triple already stated by {self._triples[triple]}"
                )
            ts = _coerce_timestamp(created_at)
            old_counter = self._statement_counter
            if statement_id is None:
                self._statement_counter += 1
                sid = f"S{self._statement_counter}"
            else:
                if statement_id in self._statements:
                    raise IdCollision(f"statement id {statement_id} already used")
                sid = statement_id
                self._statement_counter = max(
                    self._statement_counter, statement_sort_key(sid)
                )
            all_annotations = {
                "created_at": format_timestamp(ts),
                "created_by": created_by,
            }
            if annotations:
                for key, value in annotations.items():
                    if key in RESERVED_ANNOTATION_KEYS:
                        raise ReservedKey(f"annotation key {key!r} is reserved")
                    all_annotations[key] = value
            stmt = Statement(
                id=sid,
                subject=subject,
                predicate=predicate,
                object=object,
                annotations=all_annotations,
                provenance=Provenance(created_at=ts, created_by=created_by),
            )
            self._statements[sid] = stmt
            self._by_subject[subject].add(sid)
            self._by_predicate[predicate].add(sid)
            self._by_object[object].add(sid)
            self._triples[triple] = sid
            self._version += 1

            def undo() -> None:
                self._unlink(stmt)
                self._statement_counter = old_counter

            self._record_undo(undo)
            return sid

    def _unlink(self, stmt: Statement) -> None:
        del self._statements[stmt.id]
        self._by_subject[stmt.subject].discard(stmt.id)
        self._by_predicate[stmt.predicate].discard(stmt.id)
        self._by_object[stmt.object].discard(stmt.id)
        del self._triples[(stmt.subject, stmt.predicate, stmt.object)]

    def get_statement(self, statement_id: str) -> Statement:
        with self._lock:
            stmt = self._statements.get(statement_id)
            if stmt is None:
                raise UnknownStatement(f"no statement {statement_id!r}")
            return stmt.copy()

    @property
    def statement_count(self) -> int:
        with self._lock:
            return len(self._statements)

    def annotate_statement(self, statement_id: str, key: str, value: str) -> Statement:
        """Set a non-reserved annotation; overwriting is permitted."""
        with self._lock:
            stmt = self._statements.get(statement_id)
            if stmt is None:
                raise UnknownStatement(f"no statement {statement_id!r}")
            if key in RESERVED_ANNOTATION_KEYS:
                raise ReservedKey(f"annotation key {key!r} mirrors provenance")
            had_key = key in stmt.annotations
            old_value = stmt.annotations.get(key)
            stmt.annotations[key] = value
            self._version += 1

            def undo() -> None:
                if had_key:
                    stmt.annotations[key] = old_value  # type: ignore[assignment]
                else:
                    del stmt.annotations[key]

            self._record_undo(undo)
            return stmt.copy()

    def query_statements(
        self,
        subject: str | None = None,
        predicate: str | None = None,
        object: str | None = None,
    ) -> list[Statement]:
        """Live statements matching all set filter fields, id-ascending."""
        with self._lock:
            candidate_sets = []
            if subject is not None:
                candidate_sets.append(self._by_subject.get(subject, set()))
            if predicate is not None:
                candidate_sets.append(self._by_predicate.get(predicate, set()))
            if object is not None:
                candidate_sets.append(self._by_object.get(object, set()))
            if candidate_sets:
                ids = set.intersection(*candidate_sets)
            else:
                ids = set(self._statements)
            return [
                self._statements[sid].copy()
                for sid in sorted(ids, key=statement_sort_key)
            ]

    def query(self, filter: StatementFilter) -> list[Statement]:
        return self.query_statements(filter.subject, filter.predicate, filter.object)

    def delete_statement(self, statement_id: str) -> None:
        """Remove a statement from all indexes; never cascades to nodes."""
        with self._lock:
            stmt = self._statements.get(statement_id)
            if stmt is None:
                raise UnknownStatement(f"no statement {statement_id!r}")
            self._unlink(stmt)
            self._version += 1

            def undo() -> None:
                self._statements[stmt.id] = stmt
                self._by_subject[stmt.subject].add(stmt.id)
                self._by_predicate[stmt.predicate].add(stmt.id)
                self._by_object[stmt.object].add(stmt.id)
                self._triples[(stmt.subject, stmt.predicate, stmt.object)] = stmt.id

            self._record_undo(undo)

    # --- traversal -------------------------------------------------------------

    def subtree(self, root: str, max_depth: int) -> list[Statement]:
        """Breadth-first closure of outgoing statements from ``root``.

        Follows object resources only, stops after ``max_depth`` edges and
        visits each node at most once, so cycles terminate. Returned
        statements are unique and ordered by id.
        """
        if max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        with self._lock:
            node = self._nodes.get(root)
            if node is None:
                raise UnknownNode(f"no node {root!r}")
            if node.kind is not NodeKind.RESOURCE:
                raise NotAResource(f"{root} is a {node.kind.value}")
            visited = {root}
            frontier = [root]
            collected: list[Statement] = []
            for _ in range(max_depth):
                next_frontier: list[str] = []
                for source in frontier:
                    for sid in sorted(
                        self._by_subject.get(source, ()), key=statement_sort_key
                    ):
                        stmt = self._statements[sid]
                        collected.append(stmt)
                        target = self._nodes[stmt.object]
                        if (
                            target.kind is NodeKind.RESOURCE
                            and target.id not in visited
                        ):
                            visited.add(target.id)
                            next_frontier.append(target.id)
                frontier = next_frontier
                if not frontier:
                    break
            collected.sort(key=lambda s: statement_sort_key(s.id))
            return [s.copy() for s in collected]

    # --- dump import/export -------------------------------------------------

    def export_dump(self, sink: BinaryIO) -> int:
        """Write the line-delimited JSON dump; returns the record count.

        Nodes precede statements; within each kind records are ordered by
        numeric id; annotation keys are sorted, so equal stores produce
        byte-identical dumps.
        """
        with self._lock:
            count = 0
            try:
                for kind in (NodeKind.RESOURCE, NodeKind.PREDICATE, NodeKind.LITERAL):
                    for node in sorted(
                        (n for n in self._nodes.values() if n.kind is kind),
                        key=lambda n: node_sort_key(n.id),
                    ):
                        record = {
                            "kind": node.kind.value,
                            "id": node.id,
                            "label": node.label,
                            "classes": sorted(node.classes),
                        }
                        sink.write(_dump_line(record))
                        count += 1
                for sid in sorted(self._statements, key=statement_sort_key):
                    stmt = self._statements[sid]
                    record = {
                        "kind": "statement",
                        "id": stmt.id,
                        "subject": stmt.subject,
                        "predicate": stmt.predicate,
                        "object": stmt.object,
                        "annotations": dict(
                            sorted(stmt.user_annotations().items())
                        ),
                        "created_at": format_timestamp(stmt.provenance.created_at),
                        "created_by": stmt.provenance.created_by,
                    }
                    sink.write(_dump_line(record))
                    count += 1
            except OSError as exc:
                raise SinkFailure(f"dump write failed: {exc}") from exc
            return count

    def import_dump(self, source: BinaryIO, merge: bool = False) -> int:
        """Materialize dump records with their original ids.

        The store must be empty unless ``merge=True``. Counters advance
        past the largest imported id. Atomic: a malformed dump leaves the
        store untouched.
        """
        with self._lock:
            if not merge and (self._nodes or self._statements):
                raise ValueError("store not empty; pass merge=True to merge")
            count = 0
            with self.transaction():
                for line_number, raw in enumerate(source, start=1):
                    line = raw.decode("utf-8").strip() if isinstance(raw, bytes) else raw.strip()
                    if not line:
                        continue
                    try:
                        record = json.loads(line)
                    except (ValueError, UnicodeDecodeError) as exc:
                        raise MalformedRecord(line_number, str(exc)) from exc
                    if not isinstance(record, dict):
                        raise MalformedRecord(line_number, "record is not an object")
                    self._import_record(record, line_number)
                    count += 1
                self._version += 1
            return count

    def _import_record(self, record: dict, line_number: int) -> None:
        kind = record.get("kind")
        if kind == "statement":
            self._import_statement(record, line_number)
            return
        try:
            node_kind = NodeKind(kind)
        except ValueError:
            raise MalformedRecord(line_number, f"unknown kind {kind!r}") from None
        try:
            node_id = record["id"]
            label = record["label"]
            classes = record.get("classes", [])
        except KeyError as exc:
            raise MalformedRecord(line_number, f"missing field {exc}") from exc
        if (
            not isinstance(node_id, str)
            or not node_id[1:].isdigit()
            or node_id[0] != _ID_PREFIX[node_kind]
        ):
            raise MalformedRecord(line_number, f"bad node id {node_id!r}")
        if not isinstance(label, str) or not label.strip():
            raise MalformedRecord(line_number, "blank label")
        if not isinstance(classes, list):
            raise MalformedRecord(line_number, "classes must be a list")
        if node_id in self._nodes:
            raise IdCollision(f"node id {node_id} already present")
        class_set = frozenset(classes)
        if class_set and node_kind is not NodeKind.RESOURCE:
            raise MalformedRecord(line_number, "classes on non-resource")
        node = Node(id=node_id, kind=node_kind, label=label.strip(), classes=class_set)
        self._nodes[node_id] = node
        self._creation_order.append(node_id)
        old_counter = self._node_counters[node_kind]
        self._node_counters[node_kind] = max(old_counter, int(node_id[1:]))

        def undo() -> None:
            del self._nodes[node_id]
            self._creation_order.remove(node_id)
            self._node_counters[node_kind] = old_counter

        self._record_undo(undo)

    def _import_statement(self, record: dict, line_number: int) -> None:
        try:
            sid = record["id"]
            subject = record["subject"]
            predicate = record["predicate"]
            object_ = record["object"]
            annotations = record.get("annotations", {})
            created_at = parse_timestamp(record["created_at"])
            created_by = record["created_by"]
        except KeyError as exc:
            raise MalformedRecord(line_number, f"missing field {exc}") from exc
        except ValueError as exc:
            raise MalformedRecord(line_number, f"bad timestamp: {exc}") from exc
        if not isinstance(sid, str) or not sid.startswith("S") or not sid[1:].isdigit():
            raise MalformedRecord(line_number, f"bad statement id {sid!r}")
        if not isinstance(annotations, dict):
            raise MalformedRecord(line_number, "annotations must be an object")
        for node_id in (subject, predicate, object_):
            if node_id not in self._nodes:
                raise ForwardReference(
                    line_number, f"statement {sid} references unseen node {node_id}"
                )
        try:
            self.add_statement(
                subject,
                predicate,
                object_,
                created_by,
                created_at=created_at,
                statement_id=sid,
                annotations=annotations,
            )
        except ReservedKey as exc:
            raise MalformedRecord(line_number, str(exc)) from exc

    # --- equality helper (tests, round trips) --------------------------------

    def same_content(self, other: "GraphStore") -> bool:
        """Id-preserving comparison of node sets, statement sets, annotations
        and provenance."""
        with self._lock, other._lock:
            if self._nodes != other._nodes:
                return False
            if set(self._statements) != set(other._statements):
                return False
            for sid, stmt in self._statements.items():
                theirs = other._statements[sid]
                if (
                    stmt.subject != theirs.subject
                    or stmt.predicate != theirs.predicate
                    or stmt.object != theirs.object
                    or stmt.annotations != theirs.annotations
                    or stmt.provenance != theirs.provenance
                ):
                    return False
            return True


def _dump_line(record: dict) -> bytes:
    return (json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n").encode(
        "utf-8"
    )
