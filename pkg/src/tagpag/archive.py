"""Wayback Machine availability lookups.

One GET against the availability endpoint per URL, cached in-process for an
hour, at most four outbound requests in flight. A failed lookup is reported
as its own status, never conflated with "no snapshot exists", and is not
cached so a transient outage can recover.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional
from urllib.parse import quote

import requests

AVAILABILITY_ENDPOINT = "https://archive.org/wayback/available"

STATUS_ARCHIVED = "archived"
STATUS_NOT_ARCHIVED = "not_archived"
STATUS_LOOKUP_FAILED = "lookup_failed"

DEFAULT_TIMEOUT = 5.0
CACHE_TTL_SECONDS = 3600.0
MAX_CONCURRENT_LOOKUPS = 4

# transport(url, timeout) -> (status_code, body). Raises ConnectionError or
# TimeoutError; injection point for tests.
Transport = Callable[[str, float], tuple[int, bytes]]


@dataclass(frozen=True)
class ArchiveLookup:
    status: str
    snapshot_url: Optional[str] = None
    snapshot_timestamp: Optional[str] = None


def _requests_transport(url: str, timeout: float) -> tuple[int, bytes]:
    try:
        response = requests.get(url, timeout=timeout, headers={"User-Agent": "tagpag"})
    except requests.exceptions.Timeout as exc:
        raise TimeoutError(str(exc)) from exc
    except requests.exceptions.RequestException as exc:
        raise ConnectionError(str(exc)) from exc
    return response.status_code, response.content


def parse_availability(body: bytes) -> ArchiveLookup:
    """Map an availability response body to a lookup result."""
    try:
        payload = json.loads(body)
        if not isinstance(payload, dict):
            raise ValueError("body is not an object")
        snapshots = payload.get("archived_snapshots")
        if not isinstance(snapshots, dict):
            raise ValueError("missing archived_snapshots")
        closest = snapshots.get("closest")
        if not closest:
            return ArchiveLookup(status=STATUS_NOT_ARCHIVED)
        if not isinstance(closest, dict):
            raise ValueError("closest is not an object")
        if not closest.get("available"):
            return ArchiveLookup(status=STATUS_NOT_ARCHIVED)
        snapshot_url = closest["url"]
        timestamp = closest["timestamp"]
        if not isinstance(snapshot_url, str) or not isinstance(timestamp, str):
            raise ValueError("snapshot fields must be strings")
    except (ValueError, KeyError, TypeError):
        return ArchiveLookup(status=STATUS_LOOKUP_FAILED)
    return ArchiveLookup(
        status=STATUS_ARCHIVED,
        snapshot_url=snapshot_url,
        snapshot_timestamp=timestamp,
    )


class WaybackClient:
    """Availability lookups with caching, a concurrency cap, and one retry
    on connection errors (not on timeouts)."""

    def __init__(
        self,
        timeout: float = DEFAULT_TIMEOUT,
        transport: Optional[Transport] = None,
        cache_ttl: float = CACHE_TTL_SECONDS,
        clock: Callable[[], float] = time.monotonic,
    ):
        self._timeout = timeout
        self._transport = transport or _requests_transport
        self._cache_ttl = cache_ttl
        self._clock = clock
        self._cache: dict[str, tuple[float, ArchiveLookup]] = {}
        self._cache_lock = threading.Lock()
        self._semaphore = threading.BoundedSemaphore(MAX_CONCURRENT_LOOKUPS)

    def lookup(self, url: str) -> ArchiveLookup:
        now = self._clock()
        with self._cache_lock:
            hit = self._cache.get(url)
            if hit and hit[0] > now:
                return hit[1]

        with self._semaphore:
            result = self._fetch(url)

        if result.status != STATUS_LOOKUP_FAILED:
            with self._cache_lock:
                self._cache[url] = (self._clock() + self._cache_ttl, result)
        return result

    def _fetch(self, url: str) -> ArchiveLookup:
        request_url = f"{AVAILABILITY_ENDPOINT}?url={quote(url, safe='')}"
        for attempt in (0, 1):
            try:
                status_code, body = self._transport(request_url, self._timeout)
            except ConnectionError:
                if attempt == 0:
                    continue
                return ArchiveLookup(status=STATUS_LOOKUP_FAILED)
            except TimeoutError:
                return ArchiveLookup(status=STATUS_LOOKUP_FAILED)
            if status_code != 200:
                return ArchiveLookup(status=STATUS_LOOKUP_FAILED)
            return parse_availability(body)
        return ArchiveLookup(status=STATUS_LOOKUP_FAILED)


_default_client: Optional[WaybackClient] = None
_default_client_lock = threading.Lock()


def wayback_lookup(url: str, timeout: float = DEFAULT_TIMEOUT) -> ArchiveLookup:
    """Module-level convenience over a shared client."""
    global _default_client
    with _default_client_lock:
        if _default_client is None or _default_client._timeout != timeout:
            _default_client = WaybackClient(timeout=timeout)
        client = _default_client
    return client.lookup(url)
