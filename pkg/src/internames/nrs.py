"""Name Resolution Service: longest-prefix, context-aware name-to-SD mapping.

Resolution picks the records with the longest registered prefix of the
queried name whose predicate matches the caller's context, then orders
them by (priority, canonical text).  A small tick-based cache layer sits
on top; registration is restricted to administrators and name-routers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import DuplicateRecord, NotFound, NotResolvable, Unauthorized
from .names import Name, format_name

DEFAULT_TTL_TICKS = 100


class Protocol(Enum):
    HTTPISH = "HTTPISH"
    CCNISH_OVER_UDPISH = "CCNISH_OVER_UDPISH"


class NextHopTech(Enum):
    IPISH = "IPISH"
    CCNISH = "CCNISH"


class Service(Enum):
    UNICAST = "unicast"
    MULTICAST = "multicast"
    ANYCAST = "anycast"
    BROADCAST = "broadcast"


class CallerRole(Enum):
    ADMINISTRATOR = "administrator"
    NAME_ROUTER = "name_router"
    END_USER = "end_user"


_WRITER_ROLES = {CallerRole.ADMINISTRATOR, CallerRole.NAME_ROUTER}


@dataclass(frozen=True)
class ServiceDescriptor:
    """How to relay a request toward a named-entity: protocol + next hop."""

    protocol: Protocol
    fcn: str
    next_hop_tech: NextHopTech
    next_hop_address: str
    priority: int = 0
    ttl_ticks: int = DEFAULT_TTL_TICKS
    scope: str | None = None

    def __post_init__(self):
        if self.protocol is Protocol.CCNISH_OVER_UDPISH and not self.fcn:
            raise ValueError("CCNISH_OVER_UDPISH descriptors need a non-empty fcn")
        if self.priority < 0 or self.ttl_ticks < 0:
            raise ValueError("priority and ttl_ticks must be >= 0")

    @property
    def attributes(self) -> dict:
        attrs = {"priority": self.priority, "ttl_ticks": self.ttl_ticks}
        if self.scope is not None:
            attrs["scope"] = self.scope
        return attrs

    def canonical_text(self) -> str:
        text = (
            f"protocol={self.protocol.value} fcn={self.fcn or '-'}"
            f" next_hop={self.next_hop_address} tech={self.next_hop_tech.value}"
            f" priority={self.priority} ttl={self.ttl_ticks}"
        )
        if self.scope is not None:
            text += f" scope={self.scope}"
        return text


def sd_list_text(sds: list[ServiceDescriptor]) -> str:
    return " | ".join(sd.canonical_text() for sd in sds)


@dataclass(frozen=True)
class ContextPredicate:
    """Condition under which a record applies; the empty predicate matches all."""

    time_window: tuple[int, int] | None = None  # [start, end)
    location_tags: frozenset[str] = frozenset()
    context_tags: frozenset[str] = frozenset()
    service: Service | None = None

    def __post_init__(self):
        object.__setattr__(self, "location_tags", frozenset(self.location_tags))
        object.__setattr__(self, "context_tags", frozenset(self.context_tags))

    def matches(self, ctx: "ResolutionContext") -> bool:
        if self.time_window is not None:
            start, end = self.time_window
            if not (start <= ctx.now_tick < end):
                return False
        if self.location_tags and ctx.location_tag not in self.location_tags:
            return False
        if not self.context_tags <= ctx.context_tags:
            return False
        if self.service is not None and self.service is not ctx.requested_service:
            return False
        return True


@dataclass(frozen=True)
class ResolutionContext:
    now_tick: int
    location_tag: str = ""
    context_tags: frozenset[str] = frozenset()
    requested_service: Service = Service.UNICAST

    def __post_init__(self):
        if self.now_tick < 0:
            raise ValueError("now_tick must be >= 0")
        object.__setattr__(self, "context_tags", frozenset(self.context_tags))

    def cache_key_part(self) -> tuple:
        # now_tick deliberately excluded: expiry is handled by the TTL,
        # everything else keys the entry so contexts never cross-contaminate.
        return (
            self.location_tag,
            tuple(sorted(self.context_tags)),
            self.requested_service.value,
        )


@dataclass(frozen=True)
class NrsRecord:
    prefix: Name
    sd: ServiceDescriptor
    predicate: ContextPredicate = ContextPredicate()

    def key(self) -> tuple:
        return (self.prefix, self.sd.protocol, self.sd.next_hop_address, self.predicate)


class NameResolutionService:
    """The record store plus prefix-walk resolution."""

    def __init__(self):
        self._records: list[NrsRecord] = []
        self._by_prefix: dict[tuple[str, tuple[str, ...]], list[NrsRecord]] = {}

    def records(self) -> tuple[NrsRecord, ...]:
        return tuple(self._records)

    def register(self, record: NrsRecord, role: CallerRole) -> None:
        if role not in _WRITER_ROLES:
            raise Unauthorized(f"role {role.value} may not register records")
        if any(r.key() == record.key() for r in self._records):
            raise DuplicateRecord(format_name(record.prefix))
        self._records.append(record)
        bucket = self._by_prefix.setdefault(
            (record.prefix.realm_id, record.prefix.segments), []
        )
        bucket.append(record)

    def withdraw(self, prefix: Name, next_hop_address: str, role: CallerRole = CallerRole.ADMINISTRATOR) -> None:
        if role not in _WRITER_ROLES:
            raise Unauthorized(f"role {role.value} may not withdraw records")
        victims = [
            r
            for r in self._records
            if r.prefix == prefix and r.sd.next_hop_address == next_hop_address
        ]
        if not victims:
            raise NotFound(f"{format_name(prefix)} via {next_hop_address}")
        for r in victims:
            self._records.remove(r)
            bucket = self._by_prefix[(prefix.realm_id, prefix.segments)]
            bucket.remove(r)
            if not bucket:
                del self._by_prefix[(prefix.realm_id, prefix.segments)]

    def resolve(self, name: Name, ctx: ResolutionContext) -> list[ServiceDescriptor]:
        for length in range(len(name.segments), 0, -1):
            bucket = self._by_prefix.get((name.realm_id, name.segments[:length]))
            if not bucket:
                continue
            hits = [r for r in bucket if r.predicate.matches(ctx)]
            if not hits:
                continue
            sds = sorted(
                (r.sd for r in hits),
                key=lambda sd: (sd.priority, sd.canonical_text()),
            )
            if ctx.requested_service is Service.ANYCAST:
                return sds[:1]
            return sds
        raise NotResolvable(format_name(name))


@dataclass
class CacheEntry:
    sds: list[ServiceDescriptor]
    inserted_tick: int
    ttl_ticks: int

    def live_at(self, now_tick: int) -> bool:
        return now_tick < self.inserted_tick + self.ttl_ticks


class CacheStore:
    """Per-consumer cache of resolved descriptor lists, keyed by name + context."""

    def __init__(self):
        self._entries: dict[tuple, CacheEntry] = {}
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _key(name: Name, ctx: ResolutionContext) -> tuple:
        return (name,) + ctx.cache_key_part()

    def lookup(self, name: Name, ctx: ResolutionContext) -> list[ServiceDescriptor] | None:
        entry = self._entries.get(self._key(name, ctx))
        if entry is not None and entry.live_at(ctx.now_tick):
            self.hits += 1
            return list(entry.sds)
        self.misses += 1
        return None

    def store(self, name: Name, ctx: ResolutionContext, sds: list[ServiceDescriptor]) -> None:
        ttl = min((sd.ttl_ticks for sd in sds), default=DEFAULT_TTL_TICKS)
        self._entries[self._key(name, ctx)] = CacheEntry(list(sds), ctx.now_tick, ttl)


def resolve_cached(
    nrs: NameResolutionService,
    name: Name,
    ctx: ResolutionContext,
    cache: CacheStore,
) -> list[ServiceDescriptor]:
    cached = cache.lookup(name, ctx)
    if cached is not None:
        return cached
    sds = nrs.resolve(name, ctx)
    cache.store(name, ctx, sds)
    return list(sds)
