import json
import random
import socket
import subprocess
import sys
import time
from importlib import resources

import httpx
import pytest

from scholargraph.contributions import ResearchFieldTaxonomy, Vocabulary, PaperCatalog
from scholargraph.graph_store import GraphStore, NodeKind
from scholargraph.persistence import ApplicationState


# acceptance criterion labels, printed one per line in the terminal summary
ACCEPTANCE_CRITERIA = {
    "test_golden_fixture_ingest": "golden fixture: 9 statements with exact pair set (< 1 s)",
    "test_round_trip_thousand_statements": "round trip: 1,000-statement dump byte-identical (< 5 s)",
    "test_referential_integrity_fuzz": "fuzz: 10,000 ops, no dangling statements, no duplicate triples",
    "test_similarity_matches_exhaustive_oracle": "similarity: 20x200 stores equal exhaustive oracle, k <= 10 (< 30 s)",
    "test_comparison_matches_brute_force": "comparison: 20x50 stores equal brute-force coverage rule",
    "test_crossref_fixture_and_doi_idempotence": "crossref fixture + 1,000-DOI normalize idempotence",
    "test_durability_survives_50_kills": "durability: 50 random kills lose no acknowledged write",
    "test_concurrent_readers_never_see_partial_papers": "concurrency: 16 readers never observe a partial ingest",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome, marker in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call" and marker == "PASS":
                continue
            if "test_acceptance.py" not in report.nodeid:
                continue
            name = report.nodeid.split("::")[-1]
            label = ACCEPTANCE_CRITERIA.get(name)
            if label:
                lines.append((marker, label))
    if lines:
        terminalreporter.section("acceptance criteria")
        for marker, label in lines:
            terminalreporter.write_line(f"[{marker}] {label}")


def free_port() -> int:
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


def spawn_service(data_dir, port=None, wait=15.0):
    """Start a real service subprocess and wait until /health answers."""
    port = port or free_port()
    proc = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "scholargraph.cli",
            "serve",
            "--port",
            str(port),
            "--data-dir",
            str(data_dir),
        ],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    base_url = f"http://127.0.0.1:{port}"
    deadline = time.time() + wait
    while time.time() < deadline:
        if proc.poll() is not None:
            raise RuntimeError(f"service exited early with {proc.returncode}")
        try:
            if httpx.get(f"{base_url}/health", timeout=0.25).status_code == 200:
                return proc, base_url
        except httpx.HTTPError:
            time.sleep(0.02)
    proc.kill()
    raise RuntimeError("service did not come up")


@pytest.fixture
def store():
    return GraphStore()


@pytest.fixture
def frankenstein_payload():
    raw = resources.files("scholargraph.data").joinpath(
        "frankenstein_submission.json"
    ).read_text("utf-8")
    return json.loads(raw)


@pytest.fixture
def app_state(tmp_path):
    with ApplicationState(tmp_path / "data") as state:
        yield state


@pytest.fixture
def catalog(store):
    vocabulary = Vocabulary(store, ResearchFieldTaxonomy.load_default())
    return PaperCatalog(store, vocabulary)


# --- shared random-store builders ------------------------------------------


def random_label(rng: random.Random, length: int = 8) -> str:
    alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJQ @-_0123456789"
    return "".join(rng.choice(alphabet) for _ in range(length)).strip() or "x"


def build_random_graph(rng: random.Random, n_nodes: int = 60, n_statements: int = 120):
    """A store with random nodes, statements and annotations."""
    store = GraphStore()
    kinds = [NodeKind.RESOURCE] * 3 + [NodeKind.PREDICATE, NodeKind.LITERAL]
    nodes = {k: [] for k in NodeKind}
    for _ in range(n_nodes):
        kind = rng.choice(kinds)
        classes = (
            rng.sample(["Paper", "Contribution", "Thing"], rng.randint(0, 2))
            if kind is NodeKind.RESOURCE
            else ()
        )
        nodes[kind].append(store.create_node(kind, random_label(rng), classes))
    attempts = 0
    while store.statement_count < n_statements and attempts < n_statements * 20:
        attempts += 1
        if not nodes[NodeKind.RESOURCE] or not nodes[NodeKind.PREDICATE]:
            break
        subject = rng.choice(nodes[NodeKind.RESOURCE])
        predicate = rng.choice(nodes[NodeKind.PREDICATE])
        object_pool = nodes[NodeKind.RESOURCE] + nodes[NodeKind.LITERAL]
        target = rng.choice(object_pool)
        try:
            sid = store.add_statement(subject, predicate, target, f"curator-{rng.randint(1, 4)}")
        except Exception:
            continue
        for _ in range(rng.randint(0, 2)):
            store.annotate_statement(sid, random_label(rng, 5), random_label(rng, 6))
    return store


def build_contribution_corpus(
    rng: random.Random,
    store: GraphStore,
    n_contributions: int,
    n_predicates: int = 6,
    n_values: int = 18,
    max_features: int = 7,
    type_predicate: str | None = None,
    contribution_class: str | None = None,
):
    """Contribution resources with random shared feature statements.

    Values are drawn from a shared pool so contributions overlap; a
    class-typing statement is added when the typing ids are given.
    """
    predicates = [
        store.create_node(NodeKind.PREDICATE, f"property {i}") for i in range(n_predicates)
    ]
    values = []
    for i in range(n_values):
        if rng.random() < 0.3:
            values.append(store.create_node(NodeKind.LITERAL, f"value {i}"))
        else:
            values.append(store.create_node(NodeKind.RESOURCE, f"entity {i}"))
    contributions = []
    for i in range(n_contributions):
        cid = store.create_node(
            NodeKind.RESOURCE, f"contribution {i}", {"Contribution"}
        )
        if type_predicate and contribution_class:
            store.add_statement(cid, type_predicate, contribution_class, "gen")
        wanted = rng.randint(0, max_features)
        seen = set()
        while len(seen) < wanted:
            pair = (rng.choice(predicates), rng.choice(values))
            if pair in seen:
                continue
            seen.add(pair)
            store.add_statement(cid, pair[0], pair[1], "gen")
        contributions.append(cid)
    return contributions
