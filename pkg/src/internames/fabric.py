"""The simulated internetwork: realms, nodes, links, clock and trace.

Everything runs on an integer-tick, single-threaded event engine; the
trace is the canonical artifact and two runs of the same setup produce
byte-identical output.  Trace lines look like::

    t=<int> node=<id> realm=<id> event=<ENUM> msg=<int> name=<uri|-> detail=<text>

and the emitted list is totally ordered by (tick, node id, msg id).
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import (
    NoRoute,
    NotBound,
    NotResolvable,
    RealmViolation,
    UnknownNap,
    UnknownRealm,
    ValidationError,
)
from .name_router import (
    AccessPolicy,
    BridgeRule,
    PolicyAction,
    PolicyOperation,
    bridge,
    check_access,
)
from .names import Name, format_name
from .nrs import (
    CacheStore,
    CallerRole,
    ContextPredicate,
    NameResolutionService,
    NextHopTech,
    NrsRecord,
    Protocol,
    ResolutionContext,
    Service,
    ServiceDescriptor,
    resolve_cached,
    sd_list_text,
)
from .ors import ObjectResolutionService, OrsQuery, OrsResult
from .wire import (
    HOP_LIMIT,
    CcnRouterState,
    FibEntry,
    MessageKind,
    WireMessage,
    encode,
    fib_lookup,
)
from .errors import NoFibMatch


class RealmTech(Enum):
    IPISH = "IPISH"
    CCNISH = "CCNISH"


PROTOCOL_OF_TECH = {
    RealmTech.IPISH: Protocol.HTTPISH,
    RealmTech.CCNISH: Protocol.CCNISH_OVER_UDPISH,
}
NEXT_HOP_TECH_OF = {
    RealmTech.IPISH: NextHopTech.IPISH,
    RealmTech.CCNISH: NextHopTech.CCNISH,
}


class NodeKind(Enum):
    HOST = "host"
    ROUTER = "router"
    CCN_ROUTER = "ccn_router"
    REPO = "repo"
    SERVER = "server"
    NAME_ROUTER = "name_router"
    ORS = "ors"
    NRS = "nrs"
    RENDEZVOUS = "rendezvous"


class EventKind(Enum):
    SEND = "SEND"
    RECV = "RECV"
    FWD = "FWD"
    ORS_Q = "ORS_Q"
    ORS_R = "ORS_R"
    NRS_Q = "NRS_Q"
    NRS_R = "NRS_R"
    BRIDGE = "BRIDGE"
    CACHE_HIT = "CACHE_HIT"
    CS_HIT = "CS_HIT"
    DELIVER = "DELIVER"
    DROP = "DROP"
    REBIND = "REBIND"


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    node: str
    realm: str
    event: EventKind
    msg_id: int
    name: str  # canonical URI or "-"
    detail: str

    def line(self) -> str:
        return (
            f"t={self.tick} node={self.node} realm={self.realm}"
            f" event={self.event.value} msg={self.msg_id}"
            f" name={self.name} detail={self.detail}"
        )

    def sort_key(self) -> tuple:
        return (self.tick, self.node, self.msg_id)


@dataclass
class NetworkRealm:
    id: str
    technology: RealmTech
    parent_realm: str | None = None
    member_nodes: set[str] = field(default_factory=set)
    fib_registrations: list[tuple[str, str]] = field(default_factory=list)  # (prefix, registrar)


@dataclass
class NetworkAttachmentPoint:
    nap_id: str
    node_id: str
    realm_id: str
    address: str


@dataclass
class Binding:
    entity_name: Name
    naps: list[str]
    since_tick: int


@dataclass
class Link:
    a: str
    b: str
    realm: str
    delay: int = 1
    alive: bool = True

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


@dataclass
class Node:
    id: str
    kind: NodeKind
    realms: list[str]
    http_store: dict[str, bytes] = field(default_factory=dict)  # canonical uri -> bytes
    ccn: dict[str, CcnRouterState] = field(default_factory=dict)  # realm -> state
    cache: CacheStore = field(default_factory=CacheStore)
    policy: AccessPolicy = field(default_factory=AccessPolicy)


class SimClock:
    """Monotone tick clock with a (tick, sequence)-ordered pending queue."""

    def __init__(self):
        self.now_tick = 0
        self._pending: list[tuple[int, int, object]] = []
        self._seq = itertools.count()

    def schedule(self, tick: int, fn) -> None:
        if tick < self.now_tick:
            raise ValueError("cannot schedule into the past")
        heapq.heappush(self._pending, (tick, next(self._seq), fn))

    def pop_due(self, until_tick: int | None):
        while self._pending and (until_tick is None or self._pending[0][0] <= until_tick):
            tick, _, fn = heapq.heappop(self._pending)
            self.now_tick = max(self.now_tick, tick)
            yield tick, fn

    @property
    def idle(self) -> bool:
        return not self._pending


@dataclass
class CallRecord:
    call_id: int
    kind: str
    caller: Name | None
    target: str
    result: bytes | None = None
    error: str | None = None
    deliveries: list[tuple[str, Name, bytes]] = field(default_factory=list)  # (nap, name, body)
    search_result: OrsResult | None = None
    sd_texts: list[str] = field(default_factory=list)

    @property
    def delivery_count(self) -> int:
        return len(self.deliveries)

    @property
    def names_reached(self) -> int:
        return len({format_name(n) for _, n, _ in self.deliveries})


def _body_text(body: bytes) -> str:
    if not body:
        return "-"
    if all(33 <= c <= 126 for c in body):
        return body.decode("ascii")
    return "hex:" + body.hex()


_KIND_TO_OP = {
    MessageKind.HTTP_GET: PolicyOperation.PULL,
    MessageKind.CCN_INTEREST: PolicyOperation.PULL,
    MessageKind.HTTP_PUSH: PolicyOperation.PUSH,
    MessageKind.SUB: PolicyOperation.SUBSCRIBE,
    MessageKind.PUB: PolicyOperation.PUBLISH,
}

_DELIVERABLE = {MessageKind.HTTP_RESP, MessageKind.CCN_DATA, MessageKind.HTTP_PUSH}


class Fabric:
    """Topology + event engine + trace log; all module calls run inside it."""

    def __init__(self):
        self.realms: dict[str, NetworkRealm] = {}
        self.nodes: dict[str, Node] = {}
        self.naps: dict[str, NetworkAttachmentPoint] = {}
        self.links: list[Link] = []
        self.nrs = NameResolutionService()
        self.ors = ObjectResolutionService()
        self.bindings: dict[Name, list[str]] = {}
        self.known_names: set[Name] = set()
        self.topics: dict[str, set[Name]] = {}
        self.topic_home: dict[str, str] = {}
        self.node_tags: dict[str, frozenset[str]] = {}
        self.clock = SimClock()
        self.trace: list[TraceEvent] = []
        self.calls: dict[int, CallRecord] = {}
        self.messages: dict[int, WireMessage] = {}
        self.response_of: dict[int, int] = {}  # response msg -> request msg
        self.encapsulations: list[tuple[int, int, str]] = []  # (outer, inner, nested realm)
        self._msg_ids = itertools.count(1)
        self._call_ids = itertools.count(1)
        self._partitioned: set[str] = set()

    # ---------------------------------------------------------------- topology

    def add_realm(self, realm_id: str, tech: RealmTech, parent: str | None = None) -> NetworkRealm:
        if realm_id in self.realms:
            raise ValueError(f"realm {realm_id} already exists")
        if parent is not None and parent not in self.realms:
            raise UnknownRealm(parent)
        realm = NetworkRealm(realm_id, tech, parent)
        self.realms[realm_id] = realm
        return realm

    def add_node(self, node_id: str, kind: NodeKind, realm_ids: list[str]) -> Node:
        if node_id in self.nodes:
            raise ValueError(f"node {node_id} already exists")
        for rid in realm_ids:
            if rid not in self.realms:
                raise UnknownRealm(rid)
        node = Node(node_id, kind, list(realm_ids))
        self.nodes[node_id] = node
        self.node_tags[node_id] = frozenset({"normal"})
        for rid in realm_ids:
            realm = self.realms[rid]
            realm.member_nodes.add(node_id)
            nap_id = f"{node_id}.{rid}"
            self.naps[nap_id] = NetworkAttachmentPoint(nap_id, node_id, rid, nap_id)
            if realm.technology is RealmTech.CCNISH:
                node.ccn[rid] = CcnRouterState()
        return node

    def add_link(self, a: str, b: str, realm_id: str, delay: int = 1) -> Link:
        realm = self.realms.get(realm_id)
        if realm is None:
            raise UnknownRealm(realm_id)
        for n in (a, b):
            if n not in realm.member_nodes:
                raise RealmViolation(f"{n} is not a member of realm {realm_id}")
        link = Link(a, b, realm_id, delay)
        self.links.append(link)
        return link

    def host_content(self, node_id: str, name: Name, payload: bytes, fcn: str = "") -> None:
        node = self.nodes[node_id]
        node.http_store[format_name(name)] = payload
        if fcn:
            for rid, state in node.ccn.items():
                state.repo[fcn] = payload

    def build_fibs(self) -> None:
        """Populate every CCNISH realm FIB from its members' own prefixes."""
        adverts: dict[str, list[tuple[str, str]]] = {}
        for node in self.nodes.values():
            for rid, state in node.ccn.items():
                for prefix in sorted(state.repo):
                    adverts.setdefault(rid, []).append((prefix, node.id))
        for fcn, home in sorted(self.topic_home.items()):
            node = self.nodes[home]
            for rid in node.realms:
                if self.realms[rid].technology is RealmTech.CCNISH:
                    adverts.setdefault(rid, []).append((fcn, home))
        for rid, entries in sorted(adverts.items()):
            realm = self.realms[rid]
            for prefix, owner in entries:
                realm.fib_registrations.append((prefix, owner))
                for member in sorted(realm.member_nodes):
                    if member == owner:
                        continue
                    path = self._path(rid, member, owner)
                    if path is None or len(path) < 2:
                        continue
                    self.nodes[member].ccn[rid].fib.append(FibEntry(prefix, path[1]))

    # ---------------------------------------------------------------- helpers

    @property
    def now(self) -> int:
        return self.clock.now_tick

    def new_msg_id(self) -> int:
        return next(self._msg_ids)

    def _register_msg(self, msg: WireMessage) -> WireMessage:
        self.messages[msg.msg_id] = msg
        return msg

    def at(self, tick: int, fn) -> None:
        self.clock.schedule(tick, fn)

    def _emit(self, tick, node, realm, event, msg_id, name, detail) -> None:
        uri = format_name(name) if isinstance(name, Name) else (name or "-")
        self.trace.append(TraceEvent(tick, node, realm, event, msg_id, uri, detail))

    def sorted_trace(self) -> list[TraceEvent]:
        return sorted(self.trace, key=TraceEvent.sort_key)

    def trace_text(self) -> str:
        return "\n".join(ev.line() for ev in self.sorted_trace())

    def _adjacent(self, realm_id: str, node: str) -> list[tuple[str, Link]]:
        out = []
        for link in self.links:
            if link.realm != realm_id or not link.alive:
                continue
            if node in (link.a, link.b):
                out.append((link.other(node), link))
        return sorted(out, key=lambda pair: pair[0])

    def _link_between(self, realm_id: str, a: str, b: str) -> Link | None:
        for nbr, link in self._adjacent(realm_id, a):
            if nbr == b:
                return link
        return None

    def _path(self, realm_id: str, src: str, dst: str) -> list[str] | None:
        """Shortest path by total delay, ties broken by node-id order."""
        if src == dst:
            return [src]
        best: dict[str, tuple[int, tuple[str, ...]]] = {src: (0, (src,))}
        frontier = [(0, (src,), src)]
        while frontier:
            frontier.sort(key=lambda item: (item[0], item[1]))
            dist, path, node = frontier.pop(0)
            if node == dst:
                return list(path)
            if best.get(node, (dist, path)) < (dist, path):
                continue
            for nbr, link in self._adjacent(realm_id, node):
                cand = (dist + link.delay, path + (nbr,))
                if nbr not in best or cand < best[nbr]:
                    best[nbr] = cand
                    frontier.append((cand[0], cand[1], nbr))
        return None

    def _path_delay(self, path: list[str], realm_id: str) -> int:
        total = 0
        for a, b in zip(path, path[1:]):
            total += self._link_between(realm_id, a, b).delay
        return total

    def locate(self, locator: str) -> tuple[str, str | None]:
        """Map a locator to (node, realm-or-None)."""
        nap = self.naps.get(locator)
        if nap is not None:
            return nap.node_id, nap.realm_id
        if locator in self.nodes:
            return locator, None
        raise NoRoute(f"unknown locator {locator}")

    def node_ctx(self, node_id: str, location: str, tick: int,
                 service: Service = Service.UNICAST) -> ResolutionContext:
        return ResolutionContext(
            now_tick=tick,
            location_tag=location,
            context_tags=self.node_tags[node_id],
            requested_service=service,
        )

    def _nearest_server(self, node_id: str, kind: NodeKind) -> tuple[str, int, str] | None:
        """Closest reachable server of the given kind: (server, delay, realm)."""
        node = self.nodes[node_id]
        best = None
        for rid in sorted(node.realms):
            realm = self.realms[rid]
            for member in sorted(realm.member_nodes):
                if self.nodes[member].kind is not kind:
                    continue
                path = self._path(rid, node_id, member)
                if path is None:
                    continue
                cand = (self._path_delay(path, rid), rid, member)
                if best is None or cand < best:
                    best = cand
        if best is None:
            return None
        return best[2], best[0], best[1]

    def _gateways(self, realm_id: str, exclude: str | None = None) -> list[str]:
        realm = self.realms[realm_id]
        return [
            n
            for n in sorted(realm.member_nodes)
            if self.nodes[n].kind is NodeKind.NAME_ROUTER and n != exclude
        ]

    def realm_partitioned(self, realm_id: str) -> bool:
        return realm_id in self._partitioned

    # ---------------------------------------------------------------- bindings

    def bind(self, name: Name, nap_id: str, t: int) -> None:
        nap = self.naps.get(nap_id)
        if nap is None:
            raise UnknownNap(nap_id)
        if name not in self.ors and name not in self.known_names:
            raise ValidationError(f"name {format_name(name)} is neither registered nor declared")
        naps = self.bindings.setdefault(name, [])
        if nap_id in naps:
            return
        naps.append(nap_id)
        naps.sort()
        self._emit(t, nap.node_id, nap.realm_id, EventKind.REBIND, 0, name, f"bind nap={nap_id}")
        self._register_host_record(name, nap)

    def unbind(self, name: Name, nap_id: str, t: int) -> None:
        naps = self.bindings.get(name, [])
        if nap_id not in naps:
            raise NotBound(f"{format_name(name)} at {nap_id}")
        naps.remove(nap_id)
        nap = self.naps[nap_id]
        self._emit(t, nap.node_id, nap.realm_id, EventKind.REBIND, 0, name, f"unbind nap={nap_id}")
        self.nrs.withdraw(name, nap.address)

    def _register_host_record(self, name: Name, nap: NetworkAttachmentPoint) -> None:
        tech = self.realms[nap.realm_id].technology
        sd = ServiceDescriptor(
            protocol=PROTOCOL_OF_TECH[tech],
            fcn=format_name(name) if tech is RealmTech.CCNISH else "",
            next_hop_tech=NEXT_HOP_TECH_OF[tech],
            next_hop_address=nap.address,
            priority=0,
            scope=nap.realm_id,
        )
        self.nrs.register(NrsRecord(name, sd), CallerRole.ADMINISTRATOR)

    def bindings_of(self, name: Name) -> list[NetworkAttachmentPoint]:
        return [self.naps[n] for n in self.bindings.get(name, [])]

    def first_binding(self, name: Name) -> NetworkAttachmentPoint:
        naps = self.bindings_of(name)
        if not naps:
            raise NotBound(format_name(name))
        return naps[0]

    # ---------------------------------------------------------------- partition

    def partition(self, realm_id: str, t: int) -> None:
        realm = self.realms.get(realm_id)
        if realm is None:
            raise UnknownRealm(realm_id)
        for link in self.links:
            if link.realm == realm_id:
                continue
            inside = (link.a in realm.member_nodes) != (link.b in realm.member_nodes)
            if inside:
                link.alive = False
        for node in realm.member_nodes:
            self.node_tags[node] = frozenset({"disaster"})
        self._partitioned.add(realm_id)

    def heal(self, realm_id: str, t: int) -> None:
        realm = self.realms.get(realm_id)
        if realm is None:
            raise UnknownRealm(realm_id)
        for link in self.links:
            if link.realm == realm_id:
                continue
            inside = (link.a in realm.member_nodes) != (link.b in realm.member_nodes)
            if inside:
                link.alive = True
        for node in realm.member_nodes:
            self.node_tags[node] = frozenset({"normal"})
        self._partitioned.discard(realm_id)

    # ---------------------------------------------------------------- engine

    def run(self, until_tick: int | None = None) -> list[TraceEvent]:
        for _tick, fn in self.clock.pop_due(until_tick):
            fn()
        if until_tick is not None:
            self.clock.now_tick = max(self.clock.now_tick, until_tick)
        return self.sorted_trace()

    def run_until_idle(self) -> list[TraceEvent]:
        return self.run(None)

    # ---------------------------------------------------------------- transport

    def send(self, from_nap: str, to_address: str, payload: WireMessage, t: int) -> int:
        """Public single-message send; endpoints must share the realm or the
        destination must be a boundary name-router of it."""
        nap = self.naps.get(from_nap)
        if nap is None:
            raise UnknownNap(from_nap)
        dst_node, dst_realm = self.locate(to_address)
        realm = self.realms[nap.realm_id]
        if dst_node not in realm.member_nodes:
            raise RealmViolation(
                f"{to_address} is outside realm {nap.realm_id} and not a boundary router"
            )
        if dst_realm is not None and dst_realm != nap.realm_id:
            if self.nodes[dst_node].kind is not NodeKind.NAME_ROUTER:
                raise RealmViolation(f"{to_address} crosses out of realm {nap.realm_id}")
        if self._path(nap.realm_id, nap.node_id, dst_node) is None:
            raise NoRoute(f"no path from {nap.node_id} to {dst_node} in {nap.realm_id}")
        self._register_msg(payload)
        self._transmit(payload, nap.node_id, nap.realm_id, dst_node, t, EventKind.SEND, None)
        return payload.msg_id

    def _drop(self, t, node, realm_id, msg, detail, call_id) -> None:
        self._emit(t, node, realm_id, EventKind.DROP, msg.msg_id, msg.target_name, detail)
        if call_id is not None:
            call = self.calls[call_id]
            if call.error is None and call.result is None:
                call.error = detail

    def _no_path_detail(self, realm_id: str) -> str:
        severed = any(
            not l.alive for l in self.links
        )
        return "partitioned" if severed else "no-route"

    def _transmit(self, msg, src, realm_id, dst_node, t, first_event, call_id,
                  on_arrive=None, detail_extra="") -> None:
        path = self._path(realm_id, src, dst_node)
        if path is None:
            self._drop(t, src, realm_id, msg, self._no_path_detail(realm_id), call_id)
            return
        detail = f"to={dst_node} kind={msg.kind.value}"
        if detail_extra:
            detail += " " + detail_extra
        self._emit(t, src, realm_id, first_event, msg.msg_id, msg.target_name, detail)
        if len(path) == 1:
            self.at(t, lambda: self._arrive(msg, src, realm_id, call_id, on_arrive))
            return
        self._schedule_hop(msg, realm_id, path, 1, t, call_id, on_arrive)

    def _schedule_hop(self, msg, realm_id, path, i, t, call_id, on_arrive) -> None:
        prev, node = path[i - 1], path[i]
        link = self._link_between(realm_id, prev, node)
        if link is None:
            # Link died after the path was computed; recompute from prev.
            fresh = self._path(realm_id, prev, path[-1])
            if fresh is None:
                self.at(t, lambda: self._drop(t, prev, realm_id, msg,
                                              self._no_path_detail(realm_id), call_id))
                return
            self._schedule_hop(msg, realm_id, fresh, 1, t, call_id, on_arrive)
            return
        realm = self.realms[realm_id]
        if realm.parent_realm is not None:
            self._tunnel_hop(msg, realm_id, path, i, t, call_id, on_arrive, link)
            return
        arrive_t = t + link.delay

        def deliver():
            if i == len(path) - 1:
                self._arrive(msg, node, realm_id, call_id, on_arrive)
            else:
                self._emit(arrive_t, node, realm_id, EventKind.FWD, msg.msg_id,
                           msg.target_name, f"to={path[-1]} kind={msg.kind.value}")
                self._schedule_hop(msg, realm_id, path, i + 1, arrive_t, call_id, on_arrive)

        self.at(arrive_t, deliver)

    def _tunnel_hop(self, msg, realm_id, path, i, t, call_id, on_arrive, link) -> None:
        """Carry a nested-realm link hop as a payload message in the parent."""
        prev, node = path[i - 1], path[i]
        parent = self.realms[realm_id].parent_realm
        outer = self._register_msg(WireMessage(
            msg_id=self.new_msg_id(),
            kind=MessageKind.HTTP_PUSH,
            target_name=None,
            source_name=None,
            body=encode(msg),
        ))
        self.encapsulations.append((outer.msg_id, msg.msg_id, realm_id))

        def resume(arrive_t):
            self._emit(arrive_t, node, parent, EventKind.RECV, outer.msg_id, "-",
                       f"tunnel realm={realm_id} inner={msg.msg_id}")
            if i == len(path) - 1:
                self._arrive(msg, node, realm_id, call_id, on_arrive)
            else:
                self._emit(arrive_t, node, realm_id, EventKind.FWD, msg.msg_id,
                           msg.target_name, f"to={path[-1]} kind={msg.kind.value}")
                self._schedule_hop(msg, realm_id, path, i + 1, arrive_t, call_id, on_arrive)

        self._transmit(outer, prev, parent, node, t, EventKind.SEND, call_id,
                       on_arrive=resume, detail_extra=f"tunnel realm={realm_id} inner={msg.msg_id}")

    # ---------------------------------------------------------------- consults

    def consult_nrs(self, node_id: str, name: Name, location: str, t: int,
                    call_id, cont, cache: CacheStore | None = None,
                    service: Service = Service.UNICAST) -> None:
        """Resolve over the fabric: NRS_Q now, NRS_R after the round trip.

        cont receives the descriptor list, or None when unresolvable."""
        ctx0 = self.node_ctx(node_id, location, t, service)
        if cache is not None:
            hit = cache.lookup(name, ctx0)
            if hit is not None:
                mid = self.new_msg_id()
                self._emit(t, node_id, location, EventKind.CACHE_HIT, mid, name,
                           sd_list_text(hit))
                if call_id is not None:
                    self.calls[call_id].sd_texts.append(sd_list_text(hit))
                self.at(t, lambda: cont(hit))
                return
        server = self._nearest_server(node_id, NodeKind.NRS)
        if server is None:
            mid = self.new_msg_id()
            self._emit(t, node_id, location, EventKind.DROP, mid, name, "nrs-unreachable")
            if call_id is not None and self.calls[call_id].error is None:
                self.calls[call_id].error = "nrs-unreachable"
            self.at(t, lambda: cont(None))
            return
        _srv, delay, srv_realm = server
        qid = self.new_msg_id()
        self._emit(t, node_id, srv_realm, EventKind.NRS_Q, qid, name,
                   f"loc={location} tags={'+'.join(sorted(self.node_tags[node_id])) or '-'}")
        t_resp = t + 2 * delay

        def respond():
            ctx = self.node_ctx(node_id, location, t_resp, service)
            try:
                sds = self.nrs.resolve(name, ctx)
            except NotResolvable:
                self._emit(t_resp, node_id, srv_realm, EventKind.NRS_R, qid, name, "no-record")
                if call_id is not None and self.calls[call_id].error is None:
                    self.calls[call_id].error = "not-resolvable"
                cont(None)
                return
            if cache is not None:
                cache.store(name, ctx, sds)
            self._emit(t_resp, node_id, srv_realm, EventKind.NRS_R, qid, name, sd_list_text(sds))
            if call_id is not None:
                self.calls[call_id].sd_texts.append(sd_list_text(sds))
            cont(sds)

        self.at(t_resp, respond)

    def consult_ors(self, node_id: str, keywords: tuple[str, ...], t: int,
                    call_id, cont) -> None:
        server = self._nearest_server(node_id, NodeKind.ORS)
        if server is None:
            mid = self.new_msg_id()
            self._emit(t, node_id, self.nodes[node_id].realms[0], EventKind.DROP, mid,
                       "-", "ors-unreachable")
            if call_id is not None and self.calls[call_id].error is None:
                self.calls[call_id].error = "ors-unreachable"
            self.at(t, lambda: cont(None))
            return
        _srv, delay, srv_realm = server
        qid = self.new_msg_id()
        self._emit(t, node_id, srv_realm, EventKind.ORS_Q, qid, "-",
                   f"keywords={','.join(keywords) or '-'}")
        t_resp = t + 2 * delay

        def respond():
            result = self.ors.search(OrsQuery(tuple(keywords)))
            uris = ";".join(format_name(n) for n in result.names) or "-"
            self._emit(t_resp, node_id, srv_realm, EventKind.ORS_R, qid, "-",
                       f"results={uris}")
            if call_id is not None:
                self.calls[call_id].search_result = result
            cont(result)

        self.at(t_resp, respond)

    # ---------------------------------------------------------------- arrivals

    def _arrive(self, msg, node_id, realm_id, call_id, on_arrive) -> None:
        t = self.now
        if on_arrive is not None:
            on_arrive(t)
            return
        node = self.nodes[node_id]
        if msg.kind is MessageKind.CCN_DATA and realm_id in node.ccn and msg.target_fcn:
            node.ccn[realm_id].content_store.insert(msg.target_fcn, msg.body, t)
        if msg.kind in _DELIVERABLE and self._bound_here(msg.target_name, node_id, realm_id):
            self._deliver(msg, node_id, realm_id, t, call_id)
            return
        if msg.kind is MessageKind.CCN_INTEREST:
            self._ccn_arrive(msg, node_id, realm_id, t, call_id)
            return
        if node.kind is NodeKind.NAME_ROUTER:
            if msg.kind in (MessageKind.HTTP_GET,):
                self._router_ingress(msg, node_id, realm_id, t, call_id)
                return
            if msg.kind in _DELIVERABLE:
                self._router_egress(msg, node_id, realm_id, t, call_id)
                return
            if msg.kind in (MessageKind.SUB, MessageKind.PUB):
                self._router_relay_pubsub(msg, node_id, realm_id, t, call_id)
                return
        if msg.kind is MessageKind.HTTP_GET:
            self._serve_http(msg, node_id, realm_id, t, call_id)
            return
        if msg.kind in (MessageKind.SUB, MessageKind.PUB) and node.kind is NodeKind.RENDEZVOUS:
            self._rendezvous(msg, node_id, realm_id, t, call_id)
            return
        if msg.kind in _DELIVERABLE:
            self._emit(t, node_id, realm_id, EventKind.DROP, msg.msg_id, msg.target_name,
                       "unreachable-name")
            if call_id is not None and self.calls[call_id].error is None:
                self.calls[call_id].error = "unreachable-name"
            return
        self._emit(t, node_id, realm_id, EventKind.DROP, msg.msg_id, msg.target_name,
                   "unhandled")

    def _bound_here(self, name, node_id, realm_id) -> bool:
        if name is None:
            return False
        return any(
            nap.node_id == node_id and nap.realm_id == realm_id
            for nap in self.bindings_of(name)
        )

    def _deliver(self, msg, node_id, realm_id, t, call_id) -> None:
        nap_id = f"{node_id}.{realm_id}"
        self._emit(t, node_id, realm_id, EventKind.RECV, msg.msg_id, msg.target_name,
                   f"kind={msg.kind.value}")
        self._emit(t, node_id, realm_id, EventKind.DELIVER, msg.msg_id, msg.target_name,
                   f"nap={nap_id} body={_body_text(msg.body)}")
        if call_id is not None:
            call = self.calls[call_id]
            call.deliveries.append((nap_id, msg.target_name, msg.body))
            if call.kind in ("pull", "fetch") and call.result is None:
                call.result = msg.body

    # ------------------------------------------------------------ HTTP serving

    def _serve_http(self, msg, node_id, realm_id, t, call_id) -> None:
        node = self.nodes[node_id]
        self._emit(t, node_id, realm_id, EventKind.RECV, msg.msg_id, msg.target_name,
                   f"kind={msg.kind.value}")
        uri = format_name(msg.target_name) if msg.target_name else ""
        body = node.http_store.get(uri)
        if body is None:
            self._drop(t, node_id, realm_id, msg, "not-found", call_id)
            return
        resp = self._register_msg(WireMessage(
            msg_id=self.new_msg_id(),
            kind=MessageKind.HTTP_RESP,
            target_name=msg.source_name,
            source_name=msg.target_name,
            body=body,
        ))
        self.response_of[resp.msg_id] = msg.msg_id
        self.deliver_to_name(resp, node_id, realm_id, t, call_id)

    # ------------------------------------------------------------- CCN forward

    def _ccn_state(self, node_id, realm_id) -> CcnRouterState:
        return self.nodes[node_id].ccn[realm_id]

    def _synth_data(self, interest, body) -> WireMessage:
        data = self._register_msg(WireMessage(
            msg_id=self.new_msg_id(),
            kind=MessageKind.CCN_DATA,
            target_fcn=interest.target_fcn,
            target_name=interest.source_name,
            source_name=interest.target_name,
            body=body,
        ))
        self.response_of[data.msg_id] = interest.msg_id
        return data

    def ccn_start(self, interest, node_id, realm_id, t, send_event, call_id) -> None:
        """Originate (or bridge in) an interest at a CCN-capable node."""
        state = self._ccn_state(node_id, realm_id)
        fcn = interest.target_fcn
        if fcn in state.repo:
            data = self._synth_data(interest, state.repo[fcn])
            self.deliver_to_name(data, node_id, realm_id, t, call_id)
            return
        cached = state.content_store.get(fcn)
        if cached is not None:
            self._emit(t, node_id, realm_id, EventKind.CS_HIT, interest.msg_id,
                       interest.target_name, f"fcn={fcn}")
            data = self._synth_data(interest, cached)
            self.deliver_to_name(data, node_id, realm_id, t, call_id)
            return
        if interest.hop_count >= HOP_LIMIT:
            self._drop(t, node_id, realm_id, interest, "hop-limit", call_id)
            return
        try:
            next_hop = fib_lookup(state.fib, fcn)
        except NoFibMatch:
            self._drop(t, node_id, realm_id, interest, "no-fib-match", call_id)
            return
        self._transmit(interest.bumped(), node_id, realm_id, next_hop, t,
                       send_event, call_id)

    def _ccn_arrive(self, interest, node_id, realm_id, t, call_id) -> None:
        node = self.nodes[node_id]
        if realm_id not in node.ccn:
            self._drop(t, node_id, realm_id, interest, "not-a-ccn-node", call_id)
            return
        state = node.ccn[realm_id]
        fcn = interest.target_fcn
        self._emit(t, node_id, realm_id, EventKind.RECV, interest.msg_id,
                   interest.target_name, f"kind=CCN_INTEREST fcn={fcn}")
        if fcn in state.repo:
            data = self._synth_data(interest, state.repo[fcn])
            self.deliver_to_name(data, node_id, realm_id, t, call_id)
            return
        cached = state.content_store.get(fcn)
        if cached is not None:
            self._emit(t, node_id, realm_id, EventKind.CS_HIT, interest.msg_id,
                       interest.target_name, f"fcn={fcn}")
            data = self._synth_data(interest, cached)
            self.deliver_to_name(data, node_id, realm_id, t, call_id)
            return
        if interest.hop_count >= HOP_LIMIT:
            self._drop(t, node_id, realm_id, interest, "hop-limit", call_id)
            return
        try:
            next_hop = fib_lookup(state.fib, fcn)
        except NoFibMatch:
            self._drop(t, node_id, realm_id, interest, "no-fib-match", call_id)
            return
        self._transmit(interest.bumped(), node_id, realm_id, next_hop, t,
                       EventKind.FWD, call_id)

    # ------------------------------------------------------- named return path

    def deliver_to_name(self, msg, node_id, realm_id, t, call_id) -> None:
        """Forward a name-addressed message toward its target's bindings.

        Local bindings get direct copies; anything else leaves through the
        realm's boundary name-router, which re-resolves the name."""
        name = msg.target_name
        naps = self.bindings_of(name) if name is not None else []
        if not naps:
            self._drop(t, node_id, realm_id, msg, "unreachable-name", call_id)
            return
        local = [nap for nap in naps if nap.realm_id == realm_id]
        remote = [nap for nap in naps if nap.realm_id != realm_id]
        for nap in local:
            self._transmit(msg, node_id, realm_id, nap.node_id, t, EventKind.SEND, call_id)
        if remote:
            # The serving node may itself be the boundary router; sending to
            # itself just runs the egress re-resolution locally.
            gateways = [g for g in self._gateways(realm_id)
                        if self._path(realm_id, node_id, g) is not None]
            if not gateways:
                self._drop(t, node_id, realm_id, msg, "unreachable-name", call_id)
                return
            self._transmit(msg, node_id, realm_id, gateways[0], t, EventKind.SEND, call_id)

    def _router_egress(self, msg, node_id, realm_id, t, call_id) -> None:
        """A boundary router received a name-addressed message: resolve the
        name now and forward toward the current bindings, bridging protocols."""
        self._emit(t, node_id, realm_id, EventKind.RECV, msg.msg_id, msg.target_name,
                   f"kind={msg.kind.value}")
        node = self.nodes[node_id]
        if msg.kind is MessageKind.HTTP_PUSH and msg.source_name is not None:
            if check_access(node.policy, msg.source_name, PolicyOperation.PUSH) \
                    is PolicyAction.DENY:
                self._drop(t, node_id, realm_id, msg, "access-denied", call_id)
                return

        def onto(sds):
            if sds is None:
                self._drop(self.now, node_id, realm_id, msg, "unreachable-name", call_id)
                return
            t2 = self.now
            seen = set()
            for sd in sds:
                out_realm = sd.scope or realm_id
                key = (out_realm, sd.next_hop_address)
                if key in seen:
                    continue
                seen.add(key)
                if out_realm not in node.realms:
                    self._drop(t2, node_id, realm_id, msg, "unreachable-name", call_id)
                    continue
                self._forward_out(msg, sd, node_id, realm_id, out_realm, t2, call_id)

        self.consult_nrs(node_id, msg.target_name, realm_id, t, call_id, onto)

    def _forward_out(self, msg, sd, node_id, realm_in, realm_out, t, call_id) -> None:
        in_proto = PROTOCOL_OF_TECH[self.realms[realm_in].technology]
        out_proto = PROTOCOL_OF_TECH[self.realms[realm_out].technology]
        dst_node, _ = self.locate(sd.next_hop_address)
        if realm_in == realm_out or in_proto is out_proto:
            self._transmit(msg, node_id, realm_out, dst_node, t, EventKind.FWD, call_id)
            return
        rule = BridgeRule(in_proto, out_proto, realm_in, realm_out)
        out = self._register_msg(bridge(msg, rule, sd))
        self._transmit(out, node_id, realm_out, dst_node, t, EventKind.BRIDGE, call_id)

    # ------------------------------------------------------------ router paths

    def _router_ingress(self, msg, node_id, realm_id, t, call_id) -> None:
        """A pull request reached a boundary router: check access, resolve the
        target for the next realm and bridge or relay it onward."""
        node = self.nodes[node_id]
        self._emit(t, node_id, realm_id, EventKind.RECV, msg.msg_id, msg.target_name,
                   f"kind={msg.kind.value}")
        op = _KIND_TO_OP.get(msg.kind, PolicyOperation.ANY)
        if msg.source_name is not None and \
                check_access(node.policy, msg.source_name, op) is PolicyAction.DENY:
            self._drop(t, node_id, realm_id, msg, "access-denied", call_id)
            return
        others = sorted(r for r in node.realms if r != realm_id)
        if not others:
            self._serve_http(msg, node_id, realm_id, t, call_id)
            return
        self._try_realms(msg, node_id, realm_id, others, t, call_id)

    def _try_realms(self, msg, node_id, realm_in, candidates, t, call_id) -> None:
        realm_out = candidates[0]
        rest = candidates[1:]

        def onto(sds):
            t2 = self.now
            if sds is None:
                if rest:
                    self._try_realms(msg, node_id, realm_in, rest, t2, call_id)
                else:
                    self._drop(t2, node_id, realm_in, msg, "not-resolvable", call_id)
                return
            sd = sds[0]
            out_tech = self.realms[realm_out].technology
            in_proto = PROTOCOL_OF_TECH[self.realms[realm_in].technology]
            out_proto = PROTOCOL_OF_TECH[out_tech]
            if out_tech is RealmTech.CCNISH:
                rule = BridgeRule(in_proto, out_proto, realm_in, realm_out)
                interest = self._register_msg(bridge(msg, rule, sd))
                self.ccn_start(interest, node_id, realm_out, t2, EventKind.BRIDGE, call_id)
            elif msg.kind is MessageKind.CCN_INTEREST:
                rule = BridgeRule(in_proto, out_proto, realm_in, realm_out)
                out = self._register_msg(bridge(msg, rule, sd))
                dst_node, _ = self.locate(sd.next_hop_address)
                self._transmit(out, node_id, realm_out, dst_node, t2, EventKind.BRIDGE, call_id)
            else:
                dst_node, _ = self.locate(sd.next_hop_address)
                self._transmit(msg, node_id, realm_out, dst_node, t2, EventKind.FWD, call_id)

        self.consult_nrs(node_id, msg.target_name, realm_out, t, call_id, onto)

    # ------------------------------------------------------------------ pubsub

    def _router_relay_pubsub(self, msg, node_id, realm_id, t, call_id) -> None:
        node = self.nodes[node_id]
        self._emit(t, node_id, realm_id, EventKind.RECV, msg.msg_id, msg.target_name,
                   f"kind={msg.kind.value}")
        op = _KIND_TO_OP[msg.kind]
        if msg.source_name is not None and \
                check_access(node.policy, msg.source_name, op) is PolicyAction.DENY:
            self._drop(t, node_id, realm_id, msg, "access-denied", call_id)
            return
        home = self.topic_home.get(msg.target_fcn)
        if home is None:
            self._drop(t, node_id, realm_id, msg, "unknown-topic", call_id)
            return
        for rid in sorted(r for r in node.realms if r != realm_id):
            if home in self.realms[rid].member_nodes and \
                    self._path(rid, node_id, home) is not None:
                self._transmit(msg, node_id, rid, home, t, EventKind.FWD, call_id)
                return
        self._drop(t, node_id, realm_id, msg, "unreachable-topic", call_id)

    def _rendezvous(self, msg, node_id, realm_id, t, call_id) -> None:
        self._emit(t, node_id, realm_id, EventKind.RECV, msg.msg_id, msg.target_name,
                   f"kind={msg.kind.value} topic={msg.target_fcn}")
        subscribers = self.topics.setdefault(msg.target_fcn, set())
        if msg.kind is MessageKind.SUB:
            subscribers.add(msg.source_name)
            if call_id is not None:
                self.calls[call_id].result = b"subscribed"
            return
        tech = self.realms[realm_id].technology
        for sub in sorted(subscribers, key=format_name):
            kind = MessageKind.CCN_DATA if tech is RealmTech.CCNISH else MessageKind.HTTP_PUSH
            out = self._register_msg(WireMessage(
                msg_id=self.new_msg_id(),
                kind=kind,
                target_fcn=msg.target_fcn if tech is RealmTech.CCNISH else "",
                target_name=sub,
                source_name=msg.source_name,
                body=msg.body,
            ))
            self.response_of[out.msg_id] = msg.msg_id
            self.deliver_to_name(out, node_id, realm_id, t, call_id)

    # ----------------------------------------------------------------- actions

    def _new_call(self, kind: str, caller: Name | None, target: str) -> CallRecord:
        call = CallRecord(next(self._call_ids), kind, caller, target)
        self.calls[call.call_id] = call
        return call

    def start_pull(self, caller: Name, target: Name, t: int,
                   call: CallRecord | None = None) -> CallRecord:
        call = call or self._new_call("pull", caller, format_name(target))
        nap = self.first_binding(caller)
        node_id, realm_id = nap.node_id, nap.realm_id
        node = self.nodes[node_id]

        def onto(sds):
            t2 = self.now
            if sds is None:
                mid = self.new_msg_id()
                self._emit(t2, node_id, realm_id, EventKind.DROP, mid, target,
                           "not-resolvable")
                return
            sd = sds[0]
            tech = self.realms[realm_id].technology
            if tech is RealmTech.CCNISH:
                interest = self._register_msg(WireMessage(
                    msg_id=self.new_msg_id(),
                    kind=MessageKind.CCN_INTEREST,
                    target_fcn=sd.fcn,
                    target_name=target,
                    source_name=caller,
                ))
                self._call_note(call, interest)
                self.ccn_start(interest, node_id, realm_id, t2, EventKind.SEND, call.call_id)
            else:
                get = self._register_msg(WireMessage(
                    msg_id=self.new_msg_id(),
                    kind=MessageKind.HTTP_GET,
                    target_name=target,
                    source_name=caller,
                ))
                self._call_note(call, get)
                dst_node, _ = self.locate(sd.next_hop_address)
                self._transmit(get, node_id, realm_id, dst_node, t2,
                               EventKind.SEND, call.call_id)

        self.consult_nrs(node_id, target, realm_id, t, call.call_id, onto,
                         cache=node.cache)
        return call

    def _call_note(self, call, msg) -> None:
        # request message that originated this call; used by symmetry checks
        self.response_of.setdefault(msg.msg_id, msg.msg_id)

    def start_push(self, caller: Name, target: Name, body: bytes, t: int) -> CallRecord:
        call = self._new_call("push", caller, format_name(target))
        nap = self.first_binding(caller)
        node_id, realm_id = nap.node_id, nap.realm_id
        node = self.nodes[node_id]

        def onto(sds):
            t2 = self.now
            if sds is None:
                mid = self.new_msg_id()
                self._emit(t2, node_id, realm_id, EventKind.DROP, mid, target,
                           "not-resolvable")
                return
            tech = self.realms[realm_id].technology
            kind = MessageKind.CCN_DATA if tech is RealmTech.CCNISH else MessageKind.HTTP_PUSH
            push = self._register_msg(WireMessage(
                msg_id=self.new_msg_id(),
                kind=kind,
                target_fcn=format_name(target) if tech is RealmTech.CCNISH else "",
                target_name=target,
                source_name=caller,
                body=body,
            ))
            self.deliver_to_name(push, node_id, realm_id, t2, call.call_id)

        self.consult_nrs(node_id, target, realm_id, t, call.call_id, onto,
                         cache=node.cache)
        return call

    def start_subscribe(self, caller: Name, topic_fcn: str, t: int) -> CallRecord:
        call = self._new_call("subscribe", caller, topic_fcn)
        self._pubsub_send(caller, topic_fcn, MessageKind.SUB, b"", t, call)
        return call

    def start_publish(self, caller: Name, topic_fcn: str, body: bytes, t: int) -> CallRecord:
        call = self._new_call("publish", caller, topic_fcn)
        self._pubsub_send(caller, topic_fcn, MessageKind.PUB, body, t, call)
        return call

    def _pubsub_send(self, caller, topic_fcn, kind, body, t, call) -> None:
        nap = self.first_binding(caller)
        node_id, realm_id = nap.node_id, nap.realm_id
        home = self.topic_home.get(topic_fcn)
        if home is None:
            mid = self.new_msg_id()
            self._emit(t, node_id, realm_id, EventKind.DROP, mid, "-",
                       f"unknown-topic topic={topic_fcn}")
            call.error = "unknown-topic"
            return
        msg = self._register_msg(WireMessage(
            msg_id=self.new_msg_id(),
            kind=kind,
            target_fcn=topic_fcn,
            source_name=caller,
            body=body,
        ))
        if home in self.realms[realm_id].member_nodes:
            self._transmit(msg, node_id, realm_id, home, t, EventKind.SEND, call.call_id)
            return
        gateways = [g for g in self._gateways(realm_id)
                    if self._path(realm_id, node_id, g) is not None]
        if not gateways:
            self._drop(t, node_id, realm_id, msg, "unreachable-topic", call.call_id)
            return
        self._transmit(msg, node_id, realm_id, gateways[0], t, EventKind.SEND, call.call_id)

    def start_search(self, caller: Name, keywords: tuple[str, ...], t: int,
                     then_pull: bool = False) -> CallRecord:
        call = self._new_call("fetch" if then_pull else "search", caller, ",".join(keywords))
        nap = self.first_binding(caller)

        def onto(result):
            if result is None:
                return
            if then_pull and result.names:
                self.start_pull(caller, result.names[0], self.now, call=call)

        self.consult_ors(nap.node_id, tuple(keywords), t, call.call_id, onto)
        return call
