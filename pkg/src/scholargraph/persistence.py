"""Durable state for the service: append-only event log plus snapshots.

Every acknowledged write is fsynced to ``events.log`` before the caller
sees success. ``compact`` writes a full dump-format snapshot named
``snapshot-{seq}.jsonl`` (the covering sequence number lives in the file
name, so snapshot and watermark switch atomically on rename) and then
truncates the log. Startup imports the newest snapshot, binds the
vocabulary (deterministic, so a fresh store re-creates the same seed
ids), and replays every event with a higher sequence number. A torn
final log line is discarded as an unacknowledged write; anything else
malformed refuses startup.
"""

from __future__ import annotations

import fcntl
import json
import logging
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .comparison import ComparisonOptions, ComparisonTable, compare
from .contributions import (
    TYPE,
    PaperCatalog,
    ResearchFieldTaxonomy,
    Vocabulary,
    parse_submission,
)
from .errors import CorruptLog, DirectoryLocked, StorageFailure
from .graph_store import (
    GraphStore,
    NodeKind,
    Statement,
    format_timestamp,
    parse_timestamp,
    utc_now,
)
from .similarity import SimilarityIndex

log = logging.getLogger(__name__)

EVENTS_FILE = "events.log"
_SNAPSHOT_RE = re.compile(r"^snapshot-(\d+)\.jsonl$")


class DirectoryLock:
    """Exclusive advisory lock on a data directory (one service instance)."""

    def __init__(self, directory: Path):
        self.path = directory / ".lock"
        self._fh = None

    def acquire(self) -> None:
        fh = open(self.path, "a+")
        try:
            fcntl.flock(fh.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            fh.close()
            raise DirectoryLocked(f"{self.path.parent} is locked by another process")
        self._fh = fh

    def release(self) -> None:
        if self._fh is not None:
            fcntl.flock(self._fh.fileno(), fcntl.LOCK_UN)
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "DirectoryLock":
        self.acquire()
        return self

    def __exit__(self, *exc) -> None:
        self.release()


@dataclass(frozen=True)
class CompactionStats:
    snapshot_records: int
    covered_sequence: int


def _fsync_dir(directory: Path) -> None:
    fd = os.open(directory, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


class EventLog:
    """Append-only JSONL event log with fsync-per-record durability."""

    def __init__(self, path: Path):
        self.path = path
        self._fh = open(path, "ab")

    def append(self, event: dict) -> None:
        line = (json.dumps(event, ensure_ascii=False, separators=(",", ":")) + "\n").encode(
            "utf-8"
        )
        try:
            self._fh.write(line)
            self._fh.flush()
            os.fsync(self._fh.fileno())
        except OSError as exc:
            raise StorageFailure(f"event append failed: {exc}") from exc

    def truncate(self) -> None:
        try:
            self._fh.truncate(0)
            self._fh.seek(0)
            self._fh.flush()
            os.fsync(self._fh.fileno())
        except OSError as exc:
            raise StorageFailure(f"log truncate failed: {exc}") from exc

    def close(self) -> None:
        self._fh.close()

    @staticmethod
    def scan(path: Path) -> list[dict]:
        """Read all events; drop a torn final line, reject anything else."""
        if not path.exists():
            return []
        raw = path.read_bytes()
        if not raw:
            return []
        events = []
        lines = raw.split(b"\n")
        trailing = lines.pop() if lines else b""
        for i, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                event = json.loads(line)
            except ValueError as exc:
                raise CorruptLog(i, f"unreadable event: {exc}") from exc
            if not isinstance(event, dict) or not isinstance(event.get("seq"), int):
                raise CorruptLog(i, "event without sequence number")
            events.append(event)
        if trailing.strip():
            try:
                event = json.loads(trailing)
                if isinstance(event, dict) and isinstance(event.get("seq"), int):
                    events.append(event)
                else:
                    log.warning("dropping malformed final log line")
            except ValueError:
                # torn write from a crash mid-append; it was never acknowledged
                log.warning("dropping torn final log line")
        return events


def find_snapshots(data_dir: Path) -> list[tuple[int, Path]]:
    """(covered sequence, path) pairs, oldest first."""
    found = []
    for entry in data_dir.iterdir():
        match = _SNAPSHOT_RE.match(entry.name)
        if match:
            found.append((int(match.group(1)), entry))
    return sorted(found)


def initialize_from_dump(data_dir: Path, source) -> int:
    """Seed a fresh data directory from a dump stream (CLI import).

    The imported graph becomes snapshot zero; the next service start binds
    the vocabulary on top of it. Refuses directories that already hold
    state.
    """
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    with DirectoryLock(data_dir):
        events_path = data_dir / EVENTS_FILE
        if find_snapshots(data_dir) or (
            events_path.exists() and events_path.stat().st_size > 0
        ):
            raise StorageFailure(f"{data_dir} already contains state")
        store = GraphStore()
        count = store.import_dump(source)
        tmp = data_dir / ".snapshot-0.tmp"
        with open(tmp, "wb") as fh:
            store.export_dump(fh)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, data_dir / "snapshot-0.jsonl")
        _fsync_dir(data_dir)
        return count


class ApplicationState:
    """The assembled store: graph, vocabulary, catalog, similarity, log.

    All mutations must go through :meth:`commit`, which serializes the
    write, appends the event durably and rolls the in-memory change back
    if the append fails.
    """

    def __init__(
        self,
        data_dir: Path | str,
        *,
        taxonomy: ResearchFieldTaxonomy | None = None,
        similarity_depth: int = 2,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.lock = DirectoryLock(self.data_dir)
        self.lock.acquire()
        try:
            self.store = GraphStore()
            self.taxonomy = taxonomy or ResearchFieldTaxonomy.load_default()
            covered = self._load_snapshot()
            self.vocabulary = Vocabulary(self.store, self.taxonomy)
            self.catalog = PaperCatalog(self.store, self.vocabulary)
            self.sequence = self._replay(covered)
            self.similarity = SimilarityIndex(
                self.store,
                depth=similarity_depth,
                type_predicate=self.vocabulary.predicate(TYPE),
            )
            self.events = EventLog(self.data_dir / EVENTS_FILE)
        except BaseException:
            self.lock.release()
            raise

    # -- restore ---------------------------------------------------------------

    def _load_snapshot(self) -> int:
        snapshots = find_snapshots(self.data_dir)
        if not snapshots:
            return 0
        covered, path = snapshots[-1]
        with open(path, "rb") as fh:
            self.store.import_dump(fh)
        return covered

    def _replay(self, covered: int) -> int:
        last = covered
        for event in EventLog.scan(self.data_dir / EVENTS_FILE):
            seq = event["seq"]
            if seq <= covered:
                continue
            if seq != last + 1:
                raise CorruptLog(seq, f"sequence gap after {last}")
            self._apply(event)
            last = seq
        return last

    def _apply(self, event: dict) -> None:
        op = event.get("op")
        payload = event.get("payload", {})
        try:
            if op == "create_node":
                self.store.create_node(
                    payload["kind"], payload["label"], payload.get("classes", [])
                )
            elif op == "add_statement":
                self.store.add_statement(
                    payload["subject"],
                    payload["predicate"],
                    payload["object"],
                    payload["created_by"],
                    created_at=parse_timestamp(payload["created_at"]),
                )
            elif op == "annotate_statement":
                self.store.annotate_statement(
                    payload["id"], payload["key"], payload["value"]
                )
            elif op == "delete_statement":
                self.store.delete_statement(payload["id"])
            elif op == "ingest_paper":
                self.catalog.ingest_paper(
                    parse_submission(payload["submission"]),
                    created_at=parse_timestamp(payload["created_at"]),
                )
            else:
                raise CorruptLog(event["seq"], f"unknown operation {op!r}")
        except CorruptLog:
            raise
        except Exception as exc:
            raise CorruptLog(event["seq"], f"replay failed: {exc}") from exc

    # -- write path --------------------------------------------------------------

    def commit(self, op: str, payload: dict, apply) -> Any:
        """Run a write and durably log it; all-or-nothing.

        ``apply`` performs the in-memory mutation and returns the result.
        If appending the event fails, the mutation is rolled back and
        :class:`StorageFailure` propagates; the write was never visible.
        """
        with self.store.locked():
            with self.store.transaction():
                result = apply()
                self.sequence += 1
                event = {
                    "seq": self.sequence,
                    "op": op,
                    "payload": payload,
                    "ts": format_timestamp(utc_now()),
                }
                try:
                    self.events.append(event)
                except StorageFailure:
                    self.sequence -= 1
                    raise
            return result

    # -- logged write operations (shared by the API and the embedded CLI) -------

    def write_create_node(
        self, kind: NodeKind, label: str, classes: list[str] | None = None
    ) -> str:
        classes = classes or []
        return self.commit(
            "create_node",
            {"kind": NodeKind(kind).value, "label": label, "classes": sorted(set(classes))},
            lambda: self.store.create_node(kind, label, classes),
        )

    def write_add_statement(
        self, subject: str, predicate: str, object: str, curator: str
    ) -> str:
        created_at = format_timestamp(utc_now())
        return self.commit(
            "add_statement",
            {
                "subject": subject,
                "predicate": predicate,
                "object": object,
                "created_by": curator,
                "created_at": created_at,
            },
            lambda: self.store.add_statement(
                subject, predicate, object, curator,
                created_at=parse_timestamp(created_at),
            ),
        )

    def write_annotate_statement(self, statement_id: str, key: str, value: str) -> Statement:
        return self.commit(
            "annotate_statement",
            {"id": statement_id, "key": key, "value": value},
            lambda: self.store.annotate_statement(statement_id, key, value),
        )

    def write_delete_statement(self, statement_id: str) -> None:
        self.commit(
            "delete_statement",
            {"id": statement_id},
            lambda: self.store.delete_statement(statement_id),
        )

    def write_ingest_paper(self, payload: dict) -> str:
        """Parse and ingest a submission JSON payload as one logged event."""
        submission = parse_submission(payload)
        created_at = format_timestamp(utc_now())
        return self.commit(
            "ingest_paper",
            {"submission": payload, "created_at": created_at},
            lambda: self.catalog.ingest_paper(
                submission, created_at=parse_timestamp(created_at)
            ),
        )

    # -- application-level queries ------------------------------------------------

    def similar_items(self, contribution_id: str, k: int) -> list[dict]:
        """Ranked similar contributions with their owning papers."""
        ranked = self.similarity.top_k_similar(contribution_id, k)
        items = []
        for candidate, score in ranked:
            node = self.store.get_node(candidate)
            paper = self.catalog.paper_of_contribution(candidate)
            items.append(
                {
                    "contribution": candidate,
                    "label": node.label,
                    "score": score,
                    "paper": paper.id if paper else None,
                    "paper_title": paper.label if paper else None,
                }
            )
        return items

    def comparison_table(
        self, contribution_ids: list[str], options: ComparisonOptions | None = None
    ) -> ComparisonTable:
        return compare(self.store, self.catalog, contribution_ids, options)

    # -- compaction ----------------------------------------------------------------

    def compact(self) -> CompactionStats:
        """Snapshot the store, then truncate the log; restart-equivalent.

        On failure the previous snapshot is retained untouched.
        """
        with self.store.locked():
            covered = self.sequence
            target = self.data_dir / f"snapshot-{covered}.jsonl"
            tmp = self.data_dir / f".snapshot-{covered}.tmp"
            try:
                with open(tmp, "wb") as fh:
                    records = self.store.export_dump(fh)
                    fh.flush()
                    os.fsync(fh.fileno())
                os.replace(tmp, target)
                _fsync_dir(self.data_dir)
            except OSError as exc:
                tmp.unlink(missing_ok=True)
                raise StorageFailure(f"snapshot failed: {exc}") from exc
            self.events.truncate()
            for seq, path in find_snapshots(self.data_dir):
                if seq != covered:
                    path.unlink(missing_ok=True)
            return CompactionStats(snapshot_records=records, covered_sequence=covered)

    def close(self) -> None:
        self.events.close()
        self.lock.release()

    def __enter__(self) -> "ApplicationState":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
