"""Realm-qualified names, name-realms, named-entities and the n2n:// URI grammar.

A name looks like ``n2n://<realm>:<seg>/<seg>/...``.  Comparison is
byte-wise and case-sensitive; percent-escapes are rejected outright so
that canonical text stays bit-exact in traces and config files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import MalformedUri

SCHEME = "n2n://"
MAX_SEGMENTS = 64
MAX_SEGMENT_BYTES = 255

_REALM_RE = re.compile(r"[A-Za-z0-9.\-]+\Z")
_SEGMENT_RE = re.compile(r"[A-Za-z0-9._\-]+\Z")


@dataclass(frozen=True, order=True)
class Name:
    """A realm-qualified hierarchical identifier."""

    realm_id: str
    segments: tuple[str, ...]

    def __post_init__(self):
        if not self.realm_id or not _REALM_RE.match(self.realm_id):
            raise MalformedUri(f"bad realm id: {self.realm_id!r}")
        if not isinstance(self.segments, tuple):
            object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise MalformedUri("a name needs at least one segment")
        if len(self.segments) > MAX_SEGMENTS:
            raise MalformedUri(f"too many segments ({len(self.segments)} > {MAX_SEGMENTS})")
        for seg in self.segments:
            if not seg or not _SEGMENT_RE.match(seg):
                raise MalformedUri(f"bad segment: {seg!r}")
            if len(seg.encode()) > MAX_SEGMENT_BYTES:
                raise MalformedUri(f"segment longer than {MAX_SEGMENT_BYTES} bytes")

    @property
    def uri(self) -> str:
        return SCHEME + self.realm_id + ":" + "/".join(self.segments)

    def __str__(self) -> str:
        return self.uri


def parse_name(uri: str) -> Name:
    """Parse a canonical ``n2n://`` URI into a Name.

    Raises MalformedUri on a bad scheme, empty realm, empty segment,
    illegal character or an exceeded length limit.
    """
    if not isinstance(uri, str):
        raise MalformedUri("uri must be text")
    if not uri.startswith(SCHEME):
        raise MalformedUri(f"scheme must be n2n: {uri!r}")
    rest = uri[len(SCHEME):]
    realm, sep, local = rest.partition(":")
    if not sep:
        raise MalformedUri(f"missing ':' between realm and local name: {uri!r}")
    if not local:
        raise MalformedUri(f"empty local name: {uri!r}")
    return Name(realm, tuple(local.split("/")))


def format_name(n: Name) -> str:
    """Render the canonical URI; inverse of parse_name."""
    return n.uri


def is_prefix_of(p: Name, n: Name) -> bool:
    """True iff p and n share a realm and p's segments lead n's."""
    return (
        p.realm_id == n.realm_id
        and len(p.segments) <= len(n.segments)
        and n.segments[: len(p.segments)] == p.segments
    )


class NamingScheme(Enum):
    HIERARCHICAL = "hierarchical"
    FLAT = "flat"


@dataclass(frozen=True)
class NameRealm:
    """An administrative container of names; realm ids are globally unique."""

    id: str
    naming_scheme: NamingScheme = NamingScheme.HIERARCHICAL
    description: str = ""

    def admits(self, name: Name) -> bool:
        if name.realm_id != self.id:
            return False
        if self.naming_scheme is NamingScheme.FLAT:
            return len(name.segments) == 1
        return True


class EntityKind(Enum):
    CONTENT = "content"
    SERVICE_ACCESS_POINT = "service_access_point"


@dataclass(frozen=True)
class NamedEntity:
    """Binding of a Name to content bytes or a service access point."""

    name: Name
    kind: EntityKind
    payload: bytes = b""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind is EntityKind.SERVICE_ACCESS_POINT and self.payload:
            raise ValueError("a service access point carries no payload")
