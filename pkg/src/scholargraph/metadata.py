"""DOI normalization and Crossref-compatible metadata resolution.

Two source modes: Live issues ``GET {base}/works/{doi}`` against a
Crossref-compatible endpoint; Fixture reads pre-recorded responses from a
directory (filename = DOI with ``/`` replaced by ``_``, ``.json`` suffix)
and never touches the network.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import httpx

from .contributions import BibliographicMetadata
from .errors import (
    InvalidDoi,
    MalformedDocument,
    MetadataNotFound,
    MetadataTimeout,
    MissingTitle,
    UpstreamError,
)

_DOI_RE = re.compile(r"^10\.\d{4,}/\S+$")
_URL_PREFIXES = ("https://doi.org/", "http://dx.doi.org/", "doi:")


def normalize_doi(raw: str) -> str:
    """Strip known URL prefixes, trim and lowercase; idempotent."""
    doi = raw.strip()
    stripped = True
    while stripped:
        stripped = False
        for prefix in _URL_PREFIXES:
            if doi.lower().startswith(prefix):
                doi = doi[len(prefix):]
                stripped = True
    doi = doi.strip().lower()
    if not _DOI_RE.match(doi):
        raise InvalidDoi(f"not a DOI: {raw!r}")
    return doi


@dataclass(frozen=True)
class MetadataSource:
    """Exactly one of ``base_url`` (Live) or ``fixture_dir`` (Fixture)."""

    base_url: str | None = None
    fixture_dir: Path | None = None
    timeout: float = 10.0

    def __post_init__(self) -> None:
        if (self.base_url is None) == (self.fixture_dir is None):
            raise ValueError("set exactly one of base_url/fixture_dir")

    @property
    def live(self) -> bool:
        return self.base_url is not None

    @classmethod
    def crossref(cls, timeout: float = 10.0) -> "MetadataSource":
        return cls(base_url="https://api.crossref.org", timeout=timeout)

    @classmethod
    def fixtures(cls, directory: Path | str) -> "MetadataSource":
        return cls(fixture_dir=Path(directory))


def default_fixture_dir() -> Path:
    """Fixture directory shipped with the package."""
    return Path(str(resources.files("scholargraph.data").joinpath("crossref")))


def parse_crossref_record(document: bytes | str | dict) -> BibliographicMetadata:
    """Map the ``message`` body of a Crossref works response.

    Only title, authors, issue year, container title and DOI are mapped;
    every populated output field is traceable to a path in the input.
    """
    if isinstance(document, (bytes, str)):
        try:
            document = json.loads(document)
        except ValueError as exc:
            raise MalformedDocument(f"not JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise MalformedDocument("record is not an object")
    titles = document.get("title")
    if titles is not None and not isinstance(titles, list):
        raise MalformedDocument("title must be an array")
    if not titles or not isinstance(titles[0], str) or not titles[0].strip():
        raise MissingTitle("record has no title")

    authors = []
    raw_authors = document.get("author", [])
    if not isinstance(raw_authors, list):
        raise MalformedDocument("author must be an array")
    for entry in raw_authors:
        if not isinstance(entry, dict):
            raise MalformedDocument("author entry is not an object")
        parts = [entry.get("given"), entry.get("family")]
        name = " ".join(p for p in parts if isinstance(p, str) and p.strip())
        if not name and isinstance(entry.get("name"), str):
            name = entry["name"]
        if name:
            authors.append(name)

    year = _issued_year(document.get("issued"))

    venue = None
    containers = document.get("container-title")
    if isinstance(containers, list) and containers and isinstance(containers[0], str):
        venue = containers[0]

    doi = None
    if isinstance(document.get("DOI"), str):
        try:
            doi = normalize_doi(document["DOI"])
        except InvalidDoi as exc:
            raise MalformedDocument(str(exc)) from exc

    try:
        return BibliographicMetadata(
            title=titles[0],
            doi=doi,
            authors=authors,
            publication_year=year,
            venue=venue,
        )
    except ValueError as exc:
        raise MalformedDocument(str(exc)) from exc


def _issued_year(issued: Any) -> int | None:
    if not isinstance(issued, dict):
        return None
    parts = issued.get("date-parts")
    if (
        isinstance(parts, list)
        and parts
        and isinstance(parts[0], list)
        and parts[0]
        and isinstance(parts[0][0], int)
    ):
        return parts[0][0]
    return None


def fetch_metadata(doi: str, source: MetadataSource) -> BibliographicMetadata:
    """Resolve a normalized DOI to bibliographic metadata.

    Live mode retries once on timeout and never on 4xx.
    """
    if source.live:
        body = _fetch_live(doi, source)
    else:
        body = _read_fixture(doi, source)
    return parse_crossref_record(_unwrap_message(body))


def _unwrap_message(body: bytes) -> dict:
    try:
        data = json.loads(body)
    except ValueError as exc:
        raise MalformedDocument(f"not JSON: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("message"), dict):
        return data["message"]
    if isinstance(data, dict):
        return data
    raise MalformedDocument("response is not an object")


def _read_fixture(doi: str, source: MetadataSource) -> bytes:
    path = source.fixture_dir / f"{doi.replace('/', '_')}.json"  # type: ignore[operator]
    if not path.is_file():
        raise MetadataNotFound(f"no fixture for {doi}")
    return path.read_bytes()


def _fetch_live(doi: str, source: MetadataSource) -> bytes:
    url = f"{source.base_url.rstrip('/')}/works/{doi}"  # type: ignore[union-attr]
    headers = {"Accept": "application/json"}
    last_timeout: Exception | None = None
    for _ in range(2):  # one retry on timeout only
        try:
            response = httpx.get(url, headers=headers, timeout=source.timeout)
        except httpx.TimeoutException as exc:
            last_timeout = exc
            continue
        except httpx.HTTPError as exc:
            raise UpstreamError(f"request failed: {exc}") from exc
        if response.status_code == 404:
            raise MetadataNotFound(f"{doi} not found upstream")
        if response.status_code >= 500:
            raise UpstreamError(f"upstream returned {response.status_code}")
        if response.status_code != 200:
            raise UpstreamError(f"unexpected status {response.status_code}")
        return response.content
    raise MetadataTimeout(f"no response within {source.timeout}s") from last_timeout
