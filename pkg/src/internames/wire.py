"""Wire messages, the length-prefixed codec, and CCN-side forwarding state.

The byte layout is fixed so independently written implementations can
exchange recorded message dumps: a 2-byte big-endian field count, then
per field a 1-byte tag, a 4-byte big-endian length and the raw bytes,
fields always in declared order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from functools import lru_cache
from enum import Enum

from .errors import MalformedMessage, NoFibMatch
from .names import Name, format_name, parse_name

HOP_LIMIT = 32
CONTENT_STORE_CAPACITY = 16
CCNX_SCHEME = "ccnx://"


class MessageKind(Enum):
    HTTP_GET = "HTTP_GET"
    HTTP_RESP = "HTTP_RESP"
    HTTP_PUSH = "HTTP_PUSH"
    CCN_INTEREST = "CCN_INTEREST"
    CCN_DATA = "CCN_DATA"
    ORS_QUERY = "ORS_QUERY"
    ORS_RESULT = "ORS_RESULT"
    NRS_QUERY = "NRS_QUERY"
    NRS_RESULT = "NRS_RESULT"
    SUB = "SUB"
    PUB = "PUB"


REQUEST_KINDS = {
    MessageKind.HTTP_GET,
    MessageKind.CCN_INTEREST,
    MessageKind.ORS_QUERY,
    MessageKind.NRS_QUERY,
    MessageKind.SUB,
    MessageKind.PUB,
}


@dataclass(frozen=True)
class WireMessage:
    msg_id: int
    kind: MessageKind
    target_fcn: str = ""
    target_name: Name | None = None
    source_name: Name | None = None
    body: bytes = b""
    hop_count: int = 0

    def __post_init__(self):
        if self.kind in REQUEST_KINDS and self.source_name is None:
            raise ValueError(f"{self.kind.value} requires a source_name")
        if self.hop_count > HOP_LIMIT:
            raise ValueError(f"hop_count exceeds {HOP_LIMIT}")

    def bumped(self) -> "WireMessage":
        return replace(self, hop_count=self.hop_count + 1)


_FIELD_COUNT = 7


def _name_bytes(n: Name | None) -> bytes:
    return format_name(n).encode() if n is not None else b""


def encode(m: WireMessage) -> bytes:
    fields = [
        struct.pack(">Q", m.msg_id),
        m.kind.value.encode(),
        m.target_fcn.encode(),
        _name_bytes(m.target_name),
        _name_bytes(m.source_name),
        m.body,
        struct.pack(">Q", m.hop_count),
    ]
    out = [struct.pack(">H", _FIELD_COUNT)]
    for tag, payload in enumerate(fields, start=1):
        out.append(struct.pack(">BI", tag, len(payload)))
        out.append(payload)
    return b"".join(out)


def decode(b: bytes) -> WireMessage:
    if len(b) < 2:
        raise MalformedMessage("message too short")
    (count,) = struct.unpack_from(">H", b, 0)
    if count != _FIELD_COUNT:
        raise MalformedMessage(f"unexpected field count {count}")
    offset = 2
    payloads = []
    for tag in range(1, count + 1):
        if offset + 5 > len(b):
            raise MalformedMessage("truncated field header")
        got_tag, length = struct.unpack_from(">BI", b, offset)
        if got_tag != tag:
            raise MalformedMessage(f"field tag {got_tag} out of order")
        offset += 5
        if offset + length > len(b):
            raise MalformedMessage("field payload overruns message")
        payloads.append(b[offset : offset + length])
        offset += length
    if offset != len(b):
        raise MalformedMessage("trailing bytes after last field")
    try:
        msg_id = struct.unpack(">Q", payloads[0])[0]
        kind = MessageKind(payloads[1].decode())
        target_fcn = payloads[2].decode()
        target_name = parse_name(payloads[3].decode()) if payloads[3] else None
        source_name = parse_name(payloads[4].decode()) if payloads[4] else None
        hop_count = struct.unpack(">Q", payloads[6])[0]
        return WireMessage(
            msg_id=msg_id,
            kind=kind,
            target_fcn=target_fcn,
            target_name=target_name,
            source_name=source_name,
            body=payloads[5],
            hop_count=hop_count,
        )
    except MalformedMessage:
        raise
    except Exception as exc:
        raise MalformedMessage(str(exc)) from exc


@lru_cache(maxsize=65536)
def fcn_segments(fcn: str) -> tuple[str, ...]:
    if fcn.startswith(CCNX_SCHEME):
        fcn = fcn[len(CCNX_SCHEME):]
    return tuple(seg for seg in fcn.split("/") if seg)


@dataclass(frozen=True)
class FibEntry:
    prefix: str
    next_hop: str

    @property
    def prefix_segments(self) -> tuple[str, ...]:
        return fcn_segments(self.prefix)


def fib_lookup(table: list[FibEntry], fcn: str) -> str:
    """Longest '/'-segment prefix match; length ties take the smallest next hop."""
    target = fcn_segments(fcn)
    best_len = -1
    best_hop: str | None = None
    for entry in table:
        p = entry.prefix_segments
        if len(p) > len(target) or target[: len(p)] != p:
            continue
        if len(p) > best_len or (len(p) == best_len and entry.next_hop < best_hop):
            best_len = len(p)
            best_hop = entry.next_hop
    if best_hop is None:
        raise NoFibMatch(fcn)
    return best_hop


@dataclass
class ContentStoreEntry:
    fcn: str
    body: bytes
    inserted_tick: int


class ContentStore:
    """Capacity-bounded cache with least-recently-inserted eviction."""

    def __init__(self, capacity: int = CONTENT_STORE_CAPACITY):
        self.capacity = capacity
        self._entries: dict[str, ContentStoreEntry] = {}
        self._order: list[str] = []

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, fcn: str) -> bytes | None:
        entry = self._entries.get(fcn)
        return entry.body if entry is not None else None

    def insert(self, fcn: str, body: bytes, tick: int) -> None:
        if fcn in self._entries:
            self._entries[fcn] = ContentStoreEntry(fcn, body, tick)
            return
        while len(self._entries) >= self.capacity:
            victim = self._order.pop(0)
            del self._entries[victim]
        self._entries[fcn] = ContentStoreEntry(fcn, body, tick)
        self._order.append(fcn)

    def keys(self) -> list[str]:
        return list(self._order)


class CcnRouterState:
    """Per-node CCN forwarding state: a FIB, a content store, a repository.

    There is deliberately no pending-interest table; the return path is
    addressed to the requester's name, so no per-request state exists.
    """

    def __init__(self):
        self.fib: list[FibEntry] = []
        self.content_store = ContentStore()
        self.repo: dict[str, bytes] = {}

    def pending_request_records(self) -> tuple:
        # No backing storage exists for per-request state; always empty.
        return ()
