"""Graph store unit and property tests, with brute-force oracles for
find_nodes and subtree."""

import io
import random
from datetime import timezone

import pytest
from hypothesis import given, settings, strategies as st

from conftest import build_random_graph, random_label
from scholargraph.errors import (
    ClassesOnNonResource,
    DuplicateTriple,
    EmptyLabel,
    ForwardReference,
    KindViolation,
    MalformedRecord,
    NotAResource,
    ReservedKey,
    SinkFailure,
    UnknownNode,
    UnknownStatement,
)
from scholargraph.graph_store import (
    GraphStore,
    NodeKind,
    node_sort_key,
    statement_sort_key,
)


# --- nodes ---------------------------------------------------------------


def test_first_resource_gets_r1(store):
    assert store.create_node(NodeKind.RESOURCE, "Java") == "R1"


def test_first_predicate_gets_p1(store):
    assert store.create_node(NodeKind.PREDICATE, "evaluation metric") == "P1"


def test_blank_label_rejected(store):
    with pytest.raises(EmptyLabel):
        store.create_node(NodeKind.RESOURCE, "  ")


def test_label_stored_trimmed(store):
    node_id = store.create_node(NodeKind.RESOURCE, "  Java  ")
    assert store.get_node(node_id).label == "Java"


def test_classes_only_on_resources(store):
    with pytest.raises(ClassesOnNonResource):
        store.create_node(NodeKind.LITERAL, "42", {"Number"})
    with pytest.raises(ClassesOnNonResource):
        store.create_node(NodeKind.PREDICATE, "p", {"X"})
    node_id = store.create_node(NodeKind.RESOURCE, "r", {"Paper"})
    assert store.get_node(node_id).classes == frozenset({"Paper"})


def test_counters_per_kind(store):
    assert store.create_node(NodeKind.RESOURCE, "a") == "R1"
    assert store.create_node(NodeKind.PREDICATE, "b") == "P1"
    assert store.create_node(NodeKind.LITERAL, "c") == "L1"
    assert store.create_node(NodeKind.RESOURCE, "d") == "R2"


# --- find_nodes -----------------------------------------------------------


def find_nodes_oracle(store, query, kind, limit):
    """Brute-force scan with the documented ordering."""
    pool = [n for n in store.nodes() if kind is None or n.kind is kind]
    needle = query.strip().casefold()
    if not needle:
        ordered = [n for n in store.nodes() if kind is None or n.kind is kind]
        # nodes() preserves creation order
        return list(reversed(ordered))[:limit]
    hits = [n for n in pool if needle in n.label.casefold()]
    hits.sort(
        key=lambda n: (
            0 if n.label.casefold().startswith(needle) else 1,
            len(n.label),
            node_sort_key(n.id),
        )
    )
    return hits[:limit]


def test_find_java_by_prefix(store):
    store.create_node(NodeKind.RESOURCE, "Java")
    store.create_node(NodeKind.RESOURCE, "JavaScript")
    found = store.find_nodes("Ja", NodeKind.RESOURCE, 5)
    assert [n.label for n in found] == ["Java", "JavaScript"]


def test_find_absent_returns_empty(store):
    store.create_node(NodeKind.RESOURCE, "Java")
    assert store.find_nodes("zzz-absent", None, 5) == []


def test_find_qa_ordering(store):
    # frozen from the substring-scan oracle below: "lc-quad" has no "qa"
    for label in ("QALD", "LC-Quad", "accuracy@k"):
        store.create_node(NodeKind.RESOURCE, label)
    found = store.find_nodes("qa", NodeKind.RESOURCE, 10)
    expected = find_nodes_oracle(store, "qa", NodeKind.RESOURCE, 10)
    assert [n.label for n in found] == [n.label for n in expected] == ["QALD"]
    found = store.find_nodes("ua", NodeKind.RESOURCE, 10)
    assert [n.label for n in found] == ["LC-Quad"]


def test_find_empty_query_most_recent_first(store):
    ids = [store.create_node(NodeKind.RESOURCE, f"node {i}") for i in range(5)]
    found = store.find_nodes("", None, 3)
    assert [n.id for n in found] == list(reversed(ids))[:3]


def test_find_limit_validated(store):
    with pytest.raises(ValueError):
        store.find_nodes("x", None, 0)


def test_find_nodes_matches_oracle_on_random_stores():
    rng = random.Random(1234)
    for round_ in range(20):
        store = build_random_graph(rng, n_nodes=80, n_statements=0)
        for _ in range(15):
            query = rng.choice(["", "a", "A ", "q", random_label(rng, 2), random_label(rng, 4)])
            kind = rng.choice([None, NodeKind.RESOURCE, NodeKind.PREDICATE, NodeKind.LITERAL])
            limit = rng.randint(1, 12)
            got = store.find_nodes(query, kind, limit)
            expected = find_nodes_oracle(store, query, kind, limit)
            assert [n.id for n in got] == [n.id for n in expected]


# --- statements -----------------------------------------------------------


@pytest.fixture
def triple_store(store):
    paper = store.create_node(NodeKind.RESOURCE, "paper")
    has_contribution = store.create_node(NodeKind.PREDICATE, "has contribution")
    contribution = store.create_node(NodeKind.RESOURCE, "contribution")
    return store, paper, has_contribution, contribution


def test_first_statement_gets_s1(triple_store):
    store, paper, pred, contribution = triple_store
    assert store.add_statement(paper, pred, contribution, "curator-1") == "S1"


def test_duplicate_triple_rejected(triple_store):
    store, paper, pred, contribution = triple_store
    store.add_statement(paper, pred, contribution, "curator-1")
    with pytest.raises(DuplicateTriple):
        store.add_statement(paper, pred, contribution, "curator-2")


def test_unknown_node_rejected(triple_store):
    store, paper, pred, _ = triple_store
    with pytest.raises(UnknownNode):
        store.add_statement(paper, pred, "R404", "curator-1")


def test_kind_violations(store):
    resource = store.create_node(NodeKind.RESOURCE, "r")
    predicate = store.create_node(NodeKind.PREDICATE, "p")
    literal = store.create_node(NodeKind.LITERAL, "l")
    with pytest.raises(KindViolation):
        store.add_statement(literal, predicate, resource, "c")  # literal subject
    with pytest.raises(KindViolation):
        store.add_statement(resource, resource, literal, "c")  # resource predicate
    with pytest.raises(KindViolation):
        store.add_statement(resource, predicate, predicate, "c")  # predicate object


def test_provenance_set_and_mirrored(triple_store):
    store, paper, pred, contribution = triple_store
    sid = store.add_statement(paper, pred, contribution, "curator-1")
    stmt = store.get_statement(sid)
    assert stmt.provenance.created_by == "curator-1"
    assert stmt.provenance.created_at.tzinfo == timezone.utc
    assert stmt.provenance.created_at.microsecond == 0
    assert stmt.annotations["created_by"] == "curator-1"
    assert stmt.annotations["created_at"].endswith("Z")


def test_annotate_and_overwrite(triple_store):
    store, paper, pred, contribution = triple_store
    sid = store.add_statement(paper, pred, contribution, "curator-1")
    stmt = store.annotate_statement(sid, "confidence", "manual")
    assert stmt.annotations["confidence"] == "manual"
    stmt = store.annotate_statement(sid, "confidence", "checked")
    assert stmt.annotations["confidence"] == "checked"


def test_reserved_keys_rejected(triple_store):
    store, paper, pred, contribution = triple_store
    sid = store.add_statement(paper, pred, contribution, "curator-1")
    for key in ("created_by", "created_at"):
        with pytest.raises(ReservedKey):
            store.annotate_statement(sid, key, "x")


def test_annotate_unknown_statement(store):
    with pytest.raises(UnknownStatement):
        store.annotate_statement("S404", "k", "v")


def test_returned_statement_is_a_copy(triple_store):
    store, paper, pred, contribution = triple_store
    sid = store.add_statement(paper, pred, contribution, "curator-1")
    stmt = store.get_statement(sid)
    stmt.annotations["created_by"] = "evil"
    assert store.get_statement(sid).annotations["created_by"] == "curator-1"


def test_query_by_each_index(store):
    s1 = store.create_node(NodeKind.RESOURCE, "s1")
    s2 = store.create_node(NodeKind.RESOURCE, "s2")
    p = store.create_node(NodeKind.PREDICATE, "p")
    o = store.create_node(NodeKind.LITERAL, "o")
    sid1 = store.add_statement(s1, p, o, "c")
    sid2 = store.add_statement(s2, p, o, "c")
    assert [s.id for s in store.query_statements(subject=s1)] == [sid1]
    assert [s.id for s in store.query_statements(predicate=p)] == [sid1, sid2]
    assert [s.id for s in store.query_statements(object=o)] == [sid1, sid2]
    assert [s.id for s in store.query_statements(subject=s2, object=o)] == [sid2]
    assert len(store.query_statements()) == 2


def test_query_empty_store(store):
    assert store.query_statements() == []


def test_delete_statement(triple_store):
    store, paper, pred, contribution = triple_store
    sid = store.add_statement(paper, pred, contribution, "curator-1")
    nodes_before = store.node_count
    store.delete_statement(sid)
    assert store.query_statements(subject=paper) == []
    assert store.node_count == nodes_before  # never cascades
    with pytest.raises(UnknownStatement):
        store.delete_statement(sid)


def test_triple_can_be_restated_after_delete(triple_store):
    store, paper, pred, contribution = triple_store
    sid = store.add_statement(paper, pred, contribution, "curator-1")
    store.delete_statement(sid)
    sid2 = store.add_statement(paper, pred, contribution, "curator-1")
    assert sid2 != sid  # statement ids are never reused


# --- subtree ----------------------------------------------------------------


def subtree_oracle(store, root, max_depth):
    """Independent check: min-distance levels, then filter statements."""
    statements = store.query_statements()
    outgoing = {}
    for stmt in statements:
        outgoing.setdefault(stmt.subject, []).append(stmt)
    distance = {root: 0}
    frontier = [root]
    while frontier:
        next_frontier = []
        for node in frontier:
            for stmt in outgoing.get(node, []):
                target = store.get_node(stmt.object)
                if target.kind is NodeKind.RESOURCE and target.id not in distance:
                    distance[target.id] = distance[node] + 1
                    next_frontier.append(target.id)
        frontier = next_frontier
    return {
        stmt.id
        for stmt in statements
        if stmt.subject in distance and distance[stmt.subject] <= max_depth - 1
    }


def test_subtree_two_cycle_terminates(store):
    a = store.create_node(NodeKind.RESOURCE, "a")
    b = store.create_node(NodeKind.RESOURCE, "b")
    p = store.create_node(NodeKind.PREDICATE, "p")
    s1 = store.add_statement(a, p, b, "c")
    s2 = store.add_statement(b, p, a, "c")
    result = store.subtree(a, 10)
    assert {s.id for s in result} == {s1, s2}


def test_subtree_isolated_resource(store):
    a = store.create_node(NodeKind.RESOURCE, "a")
    assert store.subtree(a, 3) == []


def test_subtree_depth_limit(store):
    a = store.create_node(NodeKind.RESOURCE, "a")
    b = store.create_node(NodeKind.RESOURCE, "b")
    c = store.create_node(NodeKind.RESOURCE, "c")
    p = store.create_node(NodeKind.PREDICATE, "p")
    s1 = store.add_statement(a, p, b, "x")
    s2 = store.add_statement(b, p, c, "x")
    assert {s.id for s in store.subtree(a, 1)} == {s1}
    assert {s.id for s in store.subtree(a, 2)} == {s1, s2}


def test_subtree_does_not_traverse_literals(store):
    a = store.create_node(NodeKind.RESOURCE, "a")
    lit = store.create_node(NodeKind.LITERAL, "leaf")
    p = store.create_node(NodeKind.PREDICATE, "p")
    s1 = store.add_statement(a, p, lit, "x")
    assert {s.id for s in store.subtree(a, 5)} == {s1}


def test_subtree_requires_resource_root(store):
    lit = store.create_node(NodeKind.LITERAL, "leaf")
    with pytest.raises(NotAResource):
        store.subtree(lit, 1)
    with pytest.raises(UnknownNode):
        store.subtree("R99", 1)
    a = store.create_node(NodeKind.RESOURCE, "a")
    with pytest.raises(ValueError):
        store.subtree(a, 0)


def test_subtree_matches_oracle_on_random_graphs():
    rng = random.Random(77)
    for _ in range(25):
        store = build_random_graph(rng, n_nodes=rng.randint(10, 200), n_statements=rng.randint(5, 300))
        resources = [n.id for n in store.nodes(NodeKind.RESOURCE)]
        if not resources:
            continue
        for _ in range(5):
            root = rng.choice(resources)
            depth = rng.randint(1, 6)
            got = {s.id for s in store.subtree(root, depth)}
            assert got == subtree_oracle(store, root, depth)


# --- dump round trip ------------------------------------------------------------


def test_export_empty_store(store):
    sink = io.BytesIO()
    assert store.export_dump(sink) == 0
    assert sink.getvalue() == b""


def test_export_counts_lines(store):
    a = store.create_node(NodeKind.RESOURCE, "a")
    b = store.create_node(NodeKind.RESOURCE, "b")
    p = store.create_node(NodeKind.PREDICATE, "p")
    store.add_statement(a, p, b, "c")
    sink = io.BytesIO()
    assert store.export_dump(sink) == 4
    assert len(sink.getvalue().splitlines()) == 4


def test_dump_key_order_and_sections(store):
    a = store.create_node(NodeKind.RESOURCE, "a")
    lit = store.create_node(NodeKind.LITERAL, "v")
    p = store.create_node(NodeKind.PREDICATE, "p")
    store.add_statement(a, p, lit, "c")
    sink = io.BytesIO()
    store.export_dump(sink)
    lines = sink.getvalue().decode("utf-8").splitlines()
    assert [l.split('"')[3] for l in lines] == ["resource", "predicate", "literal", "statement"]
    assert lines[0].startswith('{"kind":"resource","id":"R1","label":"a","classes":[]}')
    assert lines[3].startswith(
        '{"kind":"statement","id":"S1","subject":"R1","predicate":"P1","object":"L1",'
    )


def test_round_trip_identity_random_stores():
    rng = random.Random(99)
    for _ in range(10):
        original = build_random_graph(rng, n_nodes=40, n_statements=60)
        dump1 = io.BytesIO()
        original.export_dump(dump1)
        clone = GraphStore()
        dump1.seek(0)
        clone.import_dump(dump1)
        assert clone.same_content(original)
        dump2 = io.BytesIO()
        clone.export_dump(dump2)
        assert dump1.getvalue() == dump2.getvalue()


def test_import_advances_counters(store):
    a = store.create_node(NodeKind.RESOURCE, "a")
    p = store.create_node(NodeKind.PREDICATE, "p")
    store.add_statement(a, p, a, "c")
    sink = io.BytesIO()
    store.export_dump(sink)
    sink.seek(0)
    clone = GraphStore()
    clone.import_dump(sink)
    assert clone.create_node(NodeKind.RESOURCE, "new") == "R2"
    new_p = clone.create_node(NodeKind.PREDICATE, "p2")
    assert new_p == "P2"
    assert clone.add_statement("R2", new_p, "R2", "c") == "S2"


def test_import_requires_empty_store_unless_merge(store):
    store.create_node(NodeKind.RESOURCE, "a")
    with pytest.raises(ValueError):
        store.import_dump(io.BytesIO(b""))


def test_merge_id_collision(store):
    store.create_node(NodeKind.RESOURCE, "a")
    dump = b'{"kind":"resource","id":"R1","label":"other","classes":[]}\n'
    from scholargraph.errors import IdCollision

    with pytest.raises(IdCollision):
        store.import_dump(io.BytesIO(dump), merge=True)


def test_forward_reference_detected(store):
    dump = (
        b'{"kind":"statement","id":"S1","subject":"R1","predicate":"P1","object":"R1",'
        b'"annotations":{},"created_at":"2024-01-01T00:00:00Z","created_by":"c"}\n'
        b'{"kind":"resource","id":"R1","label":"a","classes":[]}\n'
    )
    with pytest.raises(ForwardReference) as excinfo:
        store.import_dump(io.BytesIO(dump))
    assert excinfo.value.line_number == 1
    assert store.node_count == 0  # atomic


def test_truncated_final_line_reports_line_number(store):
    dump = (
        b'{"kind":"resource","id":"R1","label":"a","classes":[]}\n'
        b'{"kind":"resource","id":"R2","lab'
    )
    with pytest.raises(MalformedRecord) as excinfo:
        store.import_dump(io.BytesIO(dump))
    assert excinfo.value.line_number == 2
    assert store.node_count == 0


def test_sink_failure_wrapped(store):
    store.create_node(NodeKind.RESOURCE, "a")

    class FailingSink:
        def write(self, data):
            raise OSError("disk full")

    with pytest.raises(SinkFailure):
        store.export_dump(FailingSink())


# --- transactions ------------------------------------------------------------


def test_transaction_rolls_back_everything(store):
    keep = store.create_node(NodeKind.RESOURCE, "keep")
    with pytest.raises(RuntimeError):
        with store.transaction():
            store.create_node(NodeKind.RESOURCE, "gone")
            p = store.create_node(NodeKind.PREDICATE, "p")
            store.add_statement(keep, p, keep, "c")
            raise RuntimeError("boom")
    assert store.node_count == 1
    assert store.statement_count == 0
    # counters rewound: the next resource id is R2 again
    assert store.create_node(NodeKind.RESOURCE, "next") == "R2"


def test_transaction_commits_on_success(store):
    with store.transaction():
        store.create_node(NodeKind.RESOURCE, "a")
    assert store.node_count == 1


# --- hypothesis property tests ---------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(
    labels=st.lists(st.text(min_size=1, max_size=12).filter(lambda s: s.strip()), min_size=1, max_size=20),
    query=st.text(max_size=4),
)
def test_find_nodes_soundness_property(labels, query):
    store = GraphStore()
    for label in labels:
        store.create_node(NodeKind.RESOURCE, label)
    found = store.find_nodes(query, None, limit=50)
    needle = query.strip().casefold()
    if needle:
        for node in found:
            assert needle in node.label.casefold()
        expected = {n.id for n in store.nodes() if needle in n.label.casefold()}
        assert {n.id for n in found} == expected


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_annotations_never_touch_provenance(data):
    store = GraphStore()
    a = store.create_node(NodeKind.RESOURCE, "a")
    p = store.create_node(NodeKind.PREDICATE, "p")
    sid = store.add_statement(a, p, a, "curator-1")
    before = store.get_statement(sid).provenance
    keys = data.draw(
        st.lists(
            st.text(min_size=1, max_size=8).filter(
                lambda k: k not in ("created_at", "created_by")
            ),
            max_size=5,
        )
    )
    for key in keys:
        store.annotate_statement(sid, key, data.draw(st.text(max_size=8)))
    after = store.get_statement(sid)
    assert after.provenance == before
    assert after.annotations["created_by"] == "curator-1"
