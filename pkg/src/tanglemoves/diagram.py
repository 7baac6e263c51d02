"""Oriented tangle diagrams in a disk, as combinatorial maps.

A tangle diagram lives in a disk with numbered boundary points on the rim
(counter-clockwise).  Interior structure consists of crossings (4-valent,
with over/under strand roles), trivalent vertices (sinks and sources), and
directed arcs joining node ports and boundary points.  The cyclic order of
ports around each node plus the cyclic order of boundary points is the
rotation system; it determines the embedding up to isotopy fixing the rim.

Crossing-free closed circles are not embedded; they are tracked as tagged
counters (ccw/cw), since their only observable role is circle counting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

IN = "in"
OUT = "out"
OVER = "over"
UNDER = "under"
CROSSING = "crossing"
SINK = "sink"
SOURCE = "source"

ROLE_TOKENS = {
    (OVER, IN): "oi",
    (OVER, OUT): "oo",
    (UNDER, IN): "ui",
    (UNDER, OUT): "uo",
    (None, IN): "i",
    (None, OUT): "o",
}


class DiagramError(Exception):
    """Raised when an operation receives a structurally unusable diagram."""


class UnsupportedDiagramError(DiagramError):
    """Valid input that the engine cannot handle (documented restrictions)."""


@dataclass(frozen=True, order=True)
class NodePort:
    node: str
    port: int

    def __repr__(self):
        return f"{self.node}.{self.port}"


@dataclass(frozen=True, order=True)
class BoundaryEnd:
    index: int

    def __repr__(self):
        return f"b{self.index}"


Endpoint = Union[NodePort, BoundaryEnd]


@dataclass(frozen=True)
class BoundaryPoint:
    index: int
    direction: str  # IN: strand enters the disk here; OUT: strand exits.


@dataclass(frozen=True)
class Port:
    role: Optional[str]  # OVER/UNDER at crossings, None at trivalent vertices
    flow: str            # IN: strand flows into the node; OUT: away from it


@dataclass(frozen=True)
class Node:
    id: str
    kind: str                 # CROSSING, SINK or SOURCE
    ports: tuple[Port, ...]   # counter-clockwise cyclic order

    @property
    def degree(self) -> int:
        return len(self.ports)


@dataclass(frozen=True)
class Arc:
    tail: Endpoint
    head: Endpoint

    def end(self, which: int) -> Endpoint:
        return self.tail if which == 0 else self.head


@dataclass(frozen=True)
class CanonicalCode:
    code: bytes

    def __repr__(self):
        return f"CanonicalCode({self.code[:40]!r}...)" if len(self.code) > 40 else f"CanonicalCode({self.code!r})"


def crossing_sign(node: Node) -> int:
    """Sign of a crossing from its cyclic port arrangement.

    The crossing is positive exactly when the port counter-clockwise
    adjacent to the incoming under-strand port is the outgoing over-strand
    port.
    """
    if node.kind != CROSSING:
        raise DiagramError(f"node {node.id} is not a crossing")
    for i, p in enumerate(node.ports):
        if p.role == UNDER and p.flow == IN:
            nxt = node.ports[(i + 1) % 4]
            return 1 if (nxt.role, nxt.flow) == (OVER, OUT) else -1
    raise DiagramError(f"crossing {node.id} has no under-in port")


class TangleDiagram:
    """Immutable oriented tangle diagram.

    Construct once, then treat as a value: all query structures are cached
    lazily and no mutator is provided.
    """

    __slots__ = (
        "boundary", "nodes", "arcs", "free_loops",
        "_node_by_id", "_end_map", "_code", "_traversal", "_closed_map",
    )

    def __init__(self,
                 boundary: Iterable[BoundaryPoint] = (),
                 nodes: Iterable[Node] = (),
                 arcs: Iterable[Arc] = (),
                 free_loops: tuple[int, int] = (0, 0)):
        self.boundary = tuple(sorted(boundary, key=lambda b: b.index))
        self.nodes = tuple(nodes)
        self.arcs = tuple(arcs)
        self.free_loops = (int(free_loops[0]), int(free_loops[1]))
        self._node_by_id = {n.id: n for n in self.nodes}
        self._end_map = None
        self._code = None
        self._traversal = None
        self._closed_map = None

    # -- basic queries ----------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.boundary)

    def node(self, node_id: str) -> Node:
        return self._node_by_id[node_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._node_by_id

    def crossings(self) -> list[Node]:
        return [n for n in self.nodes if n.kind == CROSSING]

    def vertices(self) -> list[Node]:
        return [n for n in self.nodes if n.kind != CROSSING]

    def crossing_count(self) -> int:
        return sum(1 for n in self.nodes if n.kind == CROSSING)

    def end_map(self) -> dict[Endpoint, tuple[int, int]]:
        """endpoint -> (arc index, end) with end 0 = tail, 1 = head."""
        if self._end_map is None:
            m: dict[Endpoint, tuple[int, int]] = {}
            for i, a in enumerate(self.arcs):
                for e, ep in ((0, a.tail), (1, a.head)):
                    if ep in m:
                        raise DiagramError(f"endpoint {ep} used twice")
                    m[ep] = (i, e)
            self._end_map = m
        return self._end_map

    def arc_at(self, ep: Endpoint) -> tuple[int, int]:
        return self.end_map()[ep]

    def is_empty(self) -> bool:
        return not self.boundary and not self.nodes and not self.arcs \
            and self.free_loops == (0, 0)

    # -- closed combinatorial map -----------------------------------------
    #
    # Darts are integers.  Each arc i contributes dart 2i (based at the tail,
    # pointing along the arc) and 2i+1 (based at the head, pointing back).
    # For k >= 1 the disk rim is closed by k circle segments; segment s joins
    # boundary point s+1 to s+2 (cyclic) and contributes darts 2A+2s (based
    # at b_{s+1}, pointing ccw) and 2A+2s+1 (based at b_{s+2}, pointing cw).
    #
    # sigma maps each dart to the next dart counter-clockwise around its base
    # vertex; alpha swaps the two darts of an edge; faces are orbits of
    # phi = sigma^{-1} o alpha, and each face lies on the LEFT of its darts.

    def closed_map(self):
        if self._closed_map is None:
            A = len(self.arcs)
            k = self.k
            ndarts = 2 * A + (2 * k if k else 0)
            alpha = list(range(ndarts))
            for i in range(A):
                alpha[2 * i] = 2 * i + 1
                alpha[2 * i + 1] = 2 * i
            for s in range(k):
                alpha[2 * A + 2 * s] = 2 * A + 2 * s + 1
                alpha[2 * A + 2 * s + 1] = 2 * A + 2 * s
            # rotation lists per vertex
            sigma = [0] * ndarts
            base: list = [None] * ndarts

            def dart_at(ep: Endpoint) -> int:
                i, e = self.arc_at(ep)
                return 2 * i + e

            for n in self.nodes:
                cyc = [dart_at(NodePort(n.id, p)) for p in range(n.degree)]
                for j, d in enumerate(cyc):
                    sigma[d] = cyc[(j + 1) % n.degree]
                    base[d] = ("n", n.id, j)
            em = self.end_map()
            for s in range(k):
                bp = self.boundary[s]
                idx = bp.index
                seg_next = 2 * A + 2 * s                      # at b_idx toward next
                seg_prev = 2 * A + 2 * ((s - 1) % k) + 1      # at b_idx toward previous
                cyc = [seg_next]
                if BoundaryEnd(idx) in em:
                    cyc.append(dart_at(BoundaryEnd(idx)))
                cyc.append(seg_prev)
                for j, d in enumerate(cyc):
                    sigma[d] = cyc[(j + 1) % len(cyc)]
                    base[d] = ("b", idx, j)
            # faces: orbits of phi = sigma_inv(alpha(d)), keeping the face on
            # the left of each dart
            sigma_inv = [0] * ndarts
            for dd in range(ndarts):
                sigma_inv[sigma[dd]] = dd
            face_of = [-1] * ndarts
            faces: list[tuple[int, ...]] = []
            for d0 in range(ndarts):
                if face_of[d0] != -1:
                    continue
                orbit = []
                d = d0
                while face_of[d] == -1:
                    face_of[d] = len(faces)
                    orbit.append(d)
                    d = sigma_inv[alpha[d]]
                faces.append(tuple(orbit))
            outer = None
            if k:
                outer = face_of[2 * A + 1]  # dart at b_2 toward b_1, outside the rim
            self._closed_map = _ClosedMap(self, alpha, sigma, face_of, faces, outer)
        return self._closed_map

    # -- canonical traversal and code --------------------------------------

    def traversal(self):
        """Deterministic traversal assigning ids to nodes and arcs.

        Nodes and arcs reachable from the boundary are numbered in
        first-visit order starting from boundary point 1.  Components not
        reachable from the boundary are numbered afterwards, each in the
        order of its lexicographically minimal independent encoding, with
        components sorted by that encoding.
        """
        if self._traversal is None:
            self._traversal = _Traversal(self)
        return self._traversal

    def canonical_code(self) -> CanonicalCode:
        if self._code is None:
            self._code = CanonicalCode(self.traversal().encoding.encode("ascii"))
        return self._code

    def __repr__(self):
        return (f"TangleDiagram(k={self.k}, nodes={len(self.nodes)}, "
                f"arcs={len(self.arcs)}, loops={self.free_loops})")


class _ClosedMap:
    __slots__ = ("diagram", "alpha", "sigma", "face_of", "faces", "outer")

    def __init__(self, diagram, alpha, sigma, face_of, faces, outer):
        self.diagram = diagram
        self.alpha = alpha
        self.sigma = sigma
        self.face_of = face_of
        self.faces = faces
        self.outer = outer

    def arc_faces(self, arc_index: int) -> tuple[int, int]:
        """(left face, right face) of the arc traversed tail -> head."""
        return self.face_of[2 * arc_index], self.face_of[2 * arc_index + 1]


class _Traversal:
    __slots__ = ("node_tid", "arc_tid", "node_order", "arc_order",
                 "arrival_port", "encoding")

    def __init__(self, d: TangleDiagram):
        arcs = d.arcs
        nodes_by_id = d._node_by_id
        pmap: dict[tuple[str, int], tuple[int, int]] = {}
        bmap: dict[int, tuple[int, int]] = {}
        for i, a in enumerate(arcs):
            for e in (0, 1):
                ep = a.tail if e == 0 else a.head
                if type(ep) is NodePort:
                    pmap[(ep.node, ep.port)] = (i, e)
                else:
                    bmap[ep.index] = (i, e)

        node_tid: dict[str, int] = {}
        arc_tid: dict[int, int] = {}
        arrival: dict[str, int] = {}
        order_nodes: list[str] = []
        order_arcs: list[int] = []

        def walk(seeds):
            queue = list(seeds)
            qi = 0
            while qi < len(queue):
                arc_i = queue[qi]
                qi += 1
                if arc_i in arc_tid:
                    continue
                arc_tid[arc_i] = len(arc_tid)
                order_arcs.append(arc_i)
                a = arcs[arc_i]
                for ep in (a.tail, a.head):
                    if type(ep) is NodePort and ep.node not in node_tid:
                        nid = ep.node
                        node_tid[nid] = len(node_tid)
                        order_nodes.append(nid)
                        arrival[nid] = ep.port
                        deg = len(nodes_by_id[nid].ports)
                        for off in range(1, deg):
                            nx = pmap.get((nid, (ep.port + off) % deg))
                            if nx is not None:
                                queue.append(nx[0])

        walk(hit[0] for bp in d.boundary
             if (hit := bmap.get(bp.index)) is not None)
        boundary_nodes = len(node_tid)

        # independent components not reachable from the boundary
        comp_encodings = []
        if boundary_nodes < len(d.nodes):
            leftovers = [n.id for n in d.nodes if n.id not in node_tid]
            while leftovers:
                comp = _component_nodes(d, leftovers[0])
                best = None
                for nid in sorted(comp):
                    n = nodes_by_id[nid]
                    for p in range(len(n.ports)):
                        got = _encode_component(d, nid, p)
                        if best is None or got[0] < best[0]:
                            best = got
                comp_encodings.append(best)
                leftovers = [x for x in leftovers if x not in comp]
            comp_encodings.sort(key=lambda t: t[0])
            for enc, norder, aorder, arr in comp_encodings:
                for nid in norder:
                    node_tid[nid] = len(node_tid)
                    order_nodes.append(nid)
                    arrival[nid] = arr[nid]
                for ai in aorder:
                    arc_tid[ai] = len(arc_tid)
                    order_arcs.append(ai)

        self.node_tid = node_tid
        self.arc_tid = arc_tid
        self.node_order = order_nodes
        self.arc_order = order_arcs
        self.arrival_port = arrival

        # encoding
        def ref(ep) -> str:
            if type(ep) is BoundaryEnd:
                return "b%d" % ep.index
            nid = ep.node
            deg = len(nodes_by_id[nid].ports)
            return "n%dp%d" % (node_tid[nid], (ep.port - arrival[nid]) % deg)

        parts = ["k%d" % d.k]
        for bp in d.boundary:
            hit = bmap.get(bp.index)
            tgt = "-"
            if hit is not None:
                a = arcs[hit[0]]
                tgt = ref(a.head if hit[1] == 0 else a.tail)
            parts.append("%d%s>%s" % (bp.index,
                                      "i" if bp.direction == IN else "o", tgt))
        kind_letter = {CROSSING: "x", SINK: "k", SOURCE: "s"}
        for nid in order_nodes[:boundary_nodes]:
            n = nodes_by_id[nid]
            deg = len(n.ports)
            arr = arrival[nid]
            toks = []
            for off in range(deg):
                p = (arr + off) % deg
                port = n.ports[p]
                hit = pmap.get((nid, p))
                if hit is None:
                    other = "-"
                else:
                    a = arcs[hit[0]]
                    other = ref(a.head if hit[1] == 0 else a.tail)
                toks.append(ROLE_TOKENS[(port.role, port.flow)] + ">" + other)
            parts.append("n%d=%s[%s]" % (node_tid[nid], kind_letter[n.kind],
                                         ",".join(toks)))
        for enc_tuple in comp_encodings:
            parts.append("C(" + enc_tuple[0] + ")")
        parts.append("L%d,%d" % d.free_loops)
        self.encoding = ";".join(parts)


def _node_token(d, nid, node_tid, arrival, ref) -> str:
    n = d.node(nid)
    em = d.end_map()
    arr = arrival[nid]
    toks = []
    for off in range(n.degree):
        p = (arr + off) % n.degree
        port = n.ports[p]
        hit = em.get(NodePort(nid, p))
        if hit is None:
            other = "-"
        else:
            a = d.arcs[hit[0]]
            other = ref(a.head if hit[1] == 0 else a.tail)
        toks.append(ROLE_TOKENS[(port.role, port.flow)] + ">" + other)
    kind = {CROSSING: "x", SINK: "k", SOURCE: "s"}[n.kind]
    return f"n{node_tid[nid]}={kind}[" + ",".join(toks) + "]"


def _component_nodes(d: TangleDiagram, start: str) -> set[str]:
    em = d.end_map()
    seen = {start}
    stack = [start]
    while stack:
        nid = stack.pop()
        n = d.node(nid)
        for p in range(n.degree):
            hit = em.get(NodePort(nid, p))
            if hit is None:
                continue
            a = d.arcs[hit[0]]
            other = a.head if hit[1] == 0 else a.tail
            if isinstance(other, NodePort) and other.node not in seen:
                seen.add(other.node)
                stack.append(other.node)
    return seen


def _encode_component(d: TangleDiagram, seed_node: str, seed_port: int):
    """Encoding of one boundary-free component from a chosen start."""
    em = d.end_map()
    node_tid: dict[str, int] = {seed_node: 0}
    arrival: dict[str, int] = {seed_node: seed_port}
    node_order = [seed_node]
    arc_order: list[int] = []
    arc_seen: set[int] = set()
    queue: list[int] = []
    n0 = d.node(seed_node)
    for off in range(n0.degree):
        p = (seed_port + off) % n0.degree
        hit = em.get(NodePort(seed_node, p))
        if hit is not None:
            queue.append(hit[0])
    qi = 0
    while qi < len(queue):
        ai = queue[qi]
        qi += 1
        if ai in arc_seen:
            continue
        arc_seen.add(ai)
        arc_order.append(ai)
        for ep in (d.arcs[ai].tail, d.arcs[ai].head):
            if isinstance(ep, NodePort) and ep.node not in node_tid:
                node_tid[ep.node] = len(node_tid)
                node_order.append(ep.node)
                arrival[ep.node] = ep.port
                n = d.node(ep.node)
                for off in range(1, n.degree):
                    p = (ep.port + off) % n.degree
                    hit = em.get(NodePort(ep.node, p))
                    if hit is not None:
                        queue.append(hit[0])

    def ref(ep: Endpoint) -> str:
        tid = node_tid[ep.node]
        arr = arrival[ep.node]
        deg = d.node(ep.node).degree
        return f"n{tid}p{(ep.port - arr) % deg}"

    toks = [_node_token(d, nid, node_tid, arrival, ref) for nid in node_order]
    return "|".join(toks), node_order, arc_order, arrival


# -- validation -----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __repr__(self):
        if self.ok:
            return "ValidationReport(ok)"
        return "ValidationReport(" + "; ".join(f"{v.code}: {v.message}" for v in self.violations) + ")"


def validate(d: TangleDiagram) -> ValidationReport:
    """Check every structural invariant; report all violations found."""
    out: list[Violation] = []

    def bad(code, msg):
        out.append(Violation(code, msg))

    idxs = [b.index for b in d.boundary]
    if idxs != list(range(1, len(idxs) + 1)):
        bad("boundary-index", f"boundary indices {idxs} are not 1..{len(idxs)}")
    for b in d.boundary:
        if b.direction not in (IN, OUT):
            bad("boundary-direction", f"boundary {b.index} has direction {b.direction!r}")

    ids = [n.id for n in d.nodes]
    if len(set(ids)) != len(ids):
        bad("node-id", "duplicate node ids")

    for n in d.nodes:
        if n.kind == CROSSING:
            if n.degree != 4:
                bad("port-count", f"crossing {n.id} has {n.degree} ports")
                continue
            roles = [p.role for p in n.ports]
            if not (roles in ([OVER, UNDER, OVER, UNDER], [UNDER, OVER, UNDER, OVER])):
                bad("port-roles", f"crossing {n.id}: opposite ports must share a strand role")
                continue
            for role in (OVER, UNDER):
                flows = sorted(p.flow for p in n.ports if p.role == role)
                if flows != [IN, OUT]:
                    bad("flow", f"crossing {n.id}: {role} strand needs one in and one out port")
        elif n.kind in (SINK, SOURCE):
            if n.degree != 3:
                bad("port-count", f"vertex {n.id} has {n.degree} ports")
                continue
            want = IN if n.kind == SINK else OUT
            for p in n.ports:
                if p.role is not None:
                    bad("port-roles", f"vertex {n.id} ports carry strand roles")
                    break
                if p.flow != want:
                    bad("flow", f"{n.kind} {n.id} must have all ports flowing {want}")
                    break
        else:
            bad("node-kind", f"node {n.id} has unknown kind {n.kind!r}")

    if d.free_loops[0] < 0 or d.free_loops[1] < 0:
        bad("free-loops", "negative free loop count")

    # endpoint usage
    usage: dict[Endpoint, int] = {}
    for a in d.arcs:
        for ep in (a.tail, a.head):
            usage[ep] = usage.get(ep, 0) + 1
            if isinstance(ep, NodePort):
                if ep.node not in d._node_by_id:
                    bad("endpoint-missing", f"arc endpoint {ep} references unknown node")
                elif not (0 <= ep.port < d.node(ep.node).degree):
                    bad("endpoint-missing", f"arc endpoint {ep} references unknown port")
            else:
                if not (1 <= ep.index <= d.k):
                    bad("endpoint-missing", f"arc endpoint {ep} references unknown boundary point")
    for ep, cnt in usage.items():
        if cnt > 1:
            bad("endpoint-conflict", f"endpoint {ep} used by {cnt} arc ends")
    for n in d.nodes:
        for p in range(n.degree):
            if NodePort(n.id, p) not in usage:
                bad("endpoint-conflict", f"port {n.id}.{p} is unused")
    for b in d.boundary:
        if BoundaryEnd(b.index) not in usage:
            bad("endpoint-conflict", f"boundary point {b.index} is unused")

    if out:
        return ValidationReport(out)  # flow/planarity checks need sound structure

    # arc direction against port flows and boundary directions
    for a in d.arcs:
        if isinstance(a.tail, NodePort):
            if d.node(a.tail.node).ports[a.tail.port].flow != OUT:
                bad("flow", f"arc tail {a.tail} is not an out-flow port")
        else:
            if d.boundary[a.tail.index - 1].direction != IN:
                bad("flow", f"arc tail {a.tail} is not an inward boundary point")
        if isinstance(a.head, NodePort):
            if d.node(a.head.node).ports[a.head.port].flow != IN:
                bad("flow", f"arc head {a.head} is not an in-flow port")
        else:
            if d.boundary[a.head.index - 1].direction != OUT:
                bad("flow", f"arc head {a.head} is not an outward boundary point")

    if out:
        return ValidationReport(out)

    # planarity: every connected component of the closed map is spherical
    cm = d.closed_map()
    ndarts = len(cm.alpha)
    if ndarts:
        comp = list(range(ndarts))

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                comp[rx] = ry

        for dd in range(ndarts):
            union(dd, cm.alpha[dd])
            union(dd, cm.sigma[dd])
        groups: dict[int, list[int]] = {}
        for dd in range(ndarts):
            groups.setdefault(find(dd), []).append(dd)
        for darts in groups.values():
            dset = set(darts)
            E = len(darts) // 2
            verts = set()
            for dd in darts:
                b = _dart_base(d, cm, dd)
                verts.add(b)
            F = len({cm.face_of[dd] for dd in dset})
            V = len(verts)
            if V - E + F != 2:
                bad("planarity", f"component has V-E+F = {V - E + F}, expected 2")

    return ValidationReport(out)


def _dart_base(d: TangleDiagram, cm, dart: int):
    A = len(d.arcs)
    if dart < 2 * A:
        a = d.arcs[dart // 2]
        ep = a.tail if dart % 2 == 0 else a.head
        if isinstance(ep, NodePort):
            return ("n", ep.node)
        return ("b", ep.index)
    s = (dart - 2 * A) // 2
    k = d.k
    if dart % 2 == 0:
        return ("b", d.boundary[s].index)
    return ("b", d.boundary[(s + 1) % k].index)


# -- faces ---------------------------------------------------------------

@dataclass(frozen=True)
class Face:
    index: int
    darts: tuple[int, ...]
    arc_sides: tuple[tuple[int, int], ...]  # (arc index, 0 fwd / 1 rev) per arc dart
    touches_boundary: bool

    @property
    def degree(self) -> int:
        return len(self.arc_sides)


@dataclass
class FaceReport:
    """Faces of the diagram inside the disk, with the outer region singled out."""
    faces: list[Face]
    outer: Optional[Face]

    def bounded(self) -> list[Face]:
        return [f for f in self.faces if not f.touches_boundary]


def faces(d: TangleDiagram) -> FaceReport:
    rep = validate(d)
    if not rep.ok:
        raise DiagramError(f"invalid diagram: {rep}")
    cm = d.closed_map()
    A = len(d.arcs)
    out: list[Face] = []
    outer_face = None
    for fi, orbit in enumerate(cm.faces):
        arc_sides = tuple((dd // 2, dd % 2) for dd in orbit if dd < 2 * A)
        touches = any(dd >= 2 * A for dd in orbit)
        face = Face(fi, tuple(orbit), arc_sides, touches)
        if cm.outer is not None and fi == cm.outer:
            outer_face = face
        else:
            out.append(face)
    return FaceReport(out, outer_face)


# -- equality -------------------------------------------------------------

def same_tangle(d1: TangleDiagram, d2: TangleDiagram) -> bool:
    """Boundary-fixing combinatorial-map equality via canonical codes."""
    for d in (d1, d2):
        rep = validate(d)
        if not rep.ok:
            raise DiagramError(f"invalid diagram: {rep}")
    return d1.canonical_code() == d2.canonical_code()
