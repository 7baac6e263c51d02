"""The oriented move catalog: 28 local rewrite rules and their application.

Each move is a pattern pair (left, right) sharing one boundary signature,
loaded from fixture data files.  Matching finds embeddings of one side in a
host diagram; applying a move replaces the embedded disk by the other side,
leaving the host unchanged outside.

Embedding semantics: node-anchored patterns (any side with nodes) match by
an injective, rotation-respecting node map; every pattern leg then cuts the
host arc attached to its image port.  Node-free sides (kink and bigon
insertions) match strand segments: a kink inserts on any arc, a bigon on an
ordered pair of segment slots bordering one face, where both slots may lie
on a single arc (a strand folded against itself).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from .diagram import (
    IN, OUT, CROSSING,
    Arc, BoundaryEnd, DiagramError, Node, NodePort,
    TangleDiagram, crossing_sign, validate,
)
from .textio import parse_tangle

FORWARD = "forward"
BACKWARD = "backward"

MOVE_NAMES = (
    "r1a", "r1b", "r1c", "r1d",
    "r2a", "r2b", "r2c", "r2d",
    "r3a", "r3b", "r3c", "r3d", "r3e", "r3f", "r3g", "r3h",
    "r4a", "r4b", "r4c", "r4d", "r4e", "r4f", "r4g", "r4h",
    "r5a", "r5b", "r5c", "r5d",
)
CLASSICAL_MOVES = MOVE_NAMES[:16]
GRAPH_MOVES = MOVE_NAMES[16:]


@dataclass(frozen=True, order=True)
class MoveId:
    name: str

    @property
    def family(self) -> int:
        return int(self.name[1])

    @property
    def variant(self) -> str:
        return self.name[2]


@dataclass(frozen=True)
class MovePattern:
    id: MoveId
    left: TangleDiagram
    right: TangleDiagram

    def side(self, direction: str) -> TangleDiagram:
        return self.left if direction == FORWARD else self.right

    def replacement(self, direction: str) -> TangleDiagram:
        return self.right if direction == FORWARD else self.left

    @property
    def signature(self) -> tuple[str, ...]:
        return tuple(b.direction for b in self.left.boundary)


@dataclass(frozen=True)
class Embedding:
    """Image of one pattern side in a host diagram.

    ``node_map`` lists (pattern node id, host node id, port shift): pattern
    port p sits at host port (p + shift) mod degree.  ``cuts`` lists, per
    pattern leg in boundary order, (host arc index, ordinal) where ordinal
    orders all cuts on that host arc from tail to head.
    """
    move: str
    direction: str
    node_map: tuple[tuple[str, str, int], ...]
    cuts: tuple[tuple[int, int], ...]

    def key(self, host: TangleDiagram) -> str:
        # rotation-invariant: alignment is expressed relative to the host
        # node's canonical arrival port, so equal-code hosts give equal keys
        tr = host.traversal()
        parts = []
        for p, h, s in self.node_map:
            deg = host.node(h).degree
            rot = (s - tr.arrival_port[h]) % deg
            parts.append(f"{p}>n{tr.node_tid[h]}r{rot}")
        nm = ",".join(parts)
        cuts = ",".join(f"a{tr.arc_tid[a]}@{o}" for a, o in self.cuts)
        return f"{self.move}:{self.direction}:[{nm}]:[{cuts}]"

    def sort_key(self, host: TangleDiagram) -> tuple:
        """Canonical anchor order: smallest host ids in traversal order."""
        tr = host.traversal()
        return (tuple((tr.arc_tid[a], o) for a, o in self.cuts),
                tuple((tr.node_tid[h], (s - tr.arrival_port[h])
                       % host.node(h).degree) for _, h, s in self.node_map))


@dataclass
class ApplyResult:
    diagram: TangleDiagram
    inverse: Optional[Embedding]        # embedding of the replacement in the result
    created_nodes: tuple[str, ...]
    arc_carry: dict[int, int]           # untouched host arc index -> result index
    # surviving piece (cut arc index, piece index) -> (result arc, chain position);
    # pieces count 0..m along the cut arc, chain position orders the merged
    # segments of the result arc from tail to head.
    stub_location: dict[tuple[int, int], tuple[int, int]]


_CATALOG: Optional[dict[str, MovePattern]] = None


def _patterns_dir() -> str:
    return os.path.join(os.path.dirname(__file__), "patterns")


def catalog() -> list[MovePattern]:
    """All 28 oriented moves, in fixed order."""
    global _CATALOG
    if _CATALOG is None:
        loaded = {}
        base = _patterns_dir()
        for name in MOVE_NAMES:
            sides = {}
            for side in ("left", "right"):
                with open(os.path.join(base, f"{name}.{side}")) as f:
                    d = parse_tangle(f.read())
                rep = validate(d)
                if not rep.ok:
                    raise DiagramError(f"pattern {name}.{side} invalid: {rep}")
                sides[side] = d
            pat = MovePattern(MoveId(name), sides["left"], sides["right"])
            sig_l = tuple(b.direction for b in pat.left.boundary)
            sig_r = tuple(b.direction for b in pat.right.boundary)
            if sig_l != sig_r:
                raise DiagramError(f"pattern {name}: boundary signatures differ")
            loaded[name] = pat
        _CATALOG = loaded
    return [_CATALOG[n] for n in MOVE_NAMES]


def get_move(name: str) -> MovePattern:
    catalog()
    try:
        return _CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown move {name!r}") from None


def move_writhe_delta(name: str) -> int:
    """Forward writhe change: total crossing sign right minus left."""
    pat = get_move(name)

    def tot(d):
        return sum(crossing_sign(n) for n in d.nodes if n.kind == CROSSING)

    return tot(pat.right) - tot(pat.left)


# -- matching ---------------------------------------------------------------

def _port_tags(n: Node) -> tuple:
    return tuple((p.role, p.flow) for p in n.ports)


def _valid_shifts(pattern_node: Node, host_node: Node) -> list[int]:
    if pattern_node.kind != host_node.kind:
        return []
    pt, ht = _port_tags(pattern_node), _port_tags(host_node)
    deg = len(pt)
    return [s for s in range(deg)
            if all(pt[j] == ht[(j + s) % deg] for j in range(deg))]


def matches(host: TangleDiagram, move: str, direction: str) -> list[Embedding]:
    """All embeddings of the move's source side in the host, in canonical order."""
    pat = get_move(move)
    side = pat.side(direction)
    if not side.nodes:
        embs = _insertion_matches(host, pat, side, move, direction)
    else:
        embs = _anchored_matches(host, pat, side, move, direction)
    uniq = {}
    for e in embs:
        uniq.setdefault(e.key(host), e)
    return sorted(uniq.values(), key=lambda e: e.sort_key(host))


def _anchored_matches(host, pat, side, move, direction) -> list[Embedding]:
    ptr = side.traversal()
    seed = ptr.node_order[0]
    seed_node = side.node(seed)
    pem = side.end_map()
    hem = host.end_map()
    out = []
    for hnode in host.nodes:
        for s0 in _valid_shifts(seed_node, hnode):
            m = _propagate(side, host, pem, hem, seed, hnode.id, s0)
            if m is None:
                continue
            emb = _finish_anchored(side, host, pem, hem, m, move, direction)
            if emb is not None:
                out.append(emb)
    return out


def _propagate(side, host, pem, hem, seed, hseed, s0):
    """Grow a node map from a seeded alignment; None on any conflict."""
    node_map = {seed: (hseed, s0)}
    used_hosts = {hseed}
    work = [seed]
    while work:
        pid = work.pop()
        hid, shift = node_map[pid]
        pnode = side.node(pid)
        hnode = host.node(hid)
        for p in range(pnode.degree):
            pref = pem.get(NodePort(pid, p))
            href = hem.get(NodePort(hid, (p + shift) % hnode.degree))
            if pref is None or href is None:
                return None
            parc_i, pend = pref
            parc = side.arcs[parc_i]
            other = parc.head if pend == 0 else parc.tail
            if not isinstance(other, NodePort):
                continue  # leg arc: host arc is cut, no constraint here
            harc_i, hend = href
            if pend != hend:
                return None
            harc = host.arcs[harc_i]
            hother = harc.head if hend == 0 else harc.tail
            if not isinstance(hother, NodePort):
                return None
            onode = side.node(other.node)
            honode = host.node(hother.node)
            if onode.kind != honode.kind or onode.degree != honode.degree:
                return None
            want_shift = (hother.port - other.port) % onode.degree
            if other.node in node_map:
                if node_map[other.node] != (hother.node, want_shift):
                    return None
            else:
                if hother.node in used_hosts:
                    return None
                if want_shift not in _valid_shifts(onode, honode):
                    return None
                node_map[other.node] = (hother.node, want_shift)
                used_hosts.add(hother.node)
                work.append(other.node)
    return node_map


def _finish_anchored(side, host, pem, hem, node_map, move, direction):
    cuts_by_arc: dict[int, list[tuple[str, int]]] = {}
    leg_cut: dict[int, int] = {}
    for bp in side.boundary:
        pref = pem.get(BoundaryEnd(bp.index))
        if pref is None:
            return None
        parc_i, pend = pref
        parc = side.arcs[parc_i]
        other = parc.head if pend == 0 else parc.tail
        if not isinstance(other, NodePort):
            return None  # node-anchored sides have no leg-to-leg arcs
        hid, shift = node_map[other.node]
        hdeg = host.node(hid).degree
        href = hem.get(NodePort(hid, (other.port + shift) % hdeg))
        if href is None:
            return None
        harc_i, hend = href
        if bp.direction == IN and hend != 1:
            return None
        if bp.direction == OUT and hend != 0:
            return None
        leg_cut[bp.index] = harc_i
        covered = "head" if bp.direction == IN else "tail"
        cuts_by_arc.setdefault(harc_i, []).append((covered, bp.index))
    ordinals: dict[int, int] = {}
    for arc_i, entries in cuts_by_arc.items():
        if len(entries) == 1:
            ordinals[entries[0][1]] = 0
        elif len(entries) == 2:
            (ca, la), (cb, lb) = entries
            if ca == cb:
                return None
            first, second = (la, lb) if ca == "tail" else (lb, la)
            ordinals[first] = 0
            ordinals[second] = 1
        else:
            return None
    cuts = tuple((leg_cut[bp.index], ordinals[bp.index]) for bp in side.boundary)
    nm = tuple(sorted((pid, h, s) for pid, (h, s) in node_map.items()))
    return Embedding(move, direction, nm, cuts)


def _strand_legs(side: TangleDiagram) -> list[tuple[int, int, int]]:
    """For node-free sides: (arc index, in leg, out leg) per strand."""
    out = []
    for i, a in enumerate(side.arcs):
        if not (isinstance(a.tail, BoundaryEnd) and isinstance(a.head, BoundaryEnd)):
            raise DiagramError("insertion side must be node-free")
        out.append((i, a.tail.index, a.head.index))
    return out


def _insertion_spec(pat: MovePattern, side: TangleDiagram):
    """Classify a node-free side; for bigons find the shared-face parities."""
    strands = _strand_legs(side)
    if len(strands) == 1:
        return ("kink", strands, None)
    cm = side.closed_map()
    shared = None
    for orbit in cm.faces:
        arcs_here: dict[int, list[int]] = {}
        for dd in orbit:
            if dd < 2 * len(side.arcs):
                arcs_here.setdefault(dd // 2, []).append(dd % 2)
        if set(arcs_here) == {0, 1}:
            if shared is not None or any(len(v) != 1 for v in arcs_here.values()):
                raise DiagramError(f"{pat.id.name}: ambiguous between-face")
            shared = (arcs_here[0][0], arcs_here[1][0])
    if shared is None:
        raise DiagramError(f"{pat.id.name}: no shared face")
    return ("bigon", strands, shared)


def _insertion_matches(host, pat, side, move, direction) -> list[Embedding]:
    kind, strands, shared = _insertion_spec(pat, side)
    out = []
    if kind == "kink":
        (_, leg_in, leg_out) = strands[0]
        for arc_i in range(len(host.arcs)):
            cuts_by_leg = {leg_in: (arc_i, 0), leg_out: (arc_i, 1)}
            out.append(_mk_insertion(move, direction, side, cuts_by_leg))
        return out
    par0, par1 = shared
    cm = host.closed_map()
    A = len(host.arcs)
    for fi, orbit in enumerate(cm.faces):
        if cm.outer is not None and fi == cm.outer:
            continue
        arc_darts = [dd for dd in orbit if dd < 2 * A]
        for x0 in arc_darts:
            if x0 % 2 != par0:
                continue
            for x1 in arc_darts:
                if x1 % 2 != par1:
                    continue
                same_arc = x0 // 2 == x1 // 2
                variants = (0, 1) if same_arc else (0,)
                for v in variants:
                    out.append(_mk_bigon(move, direction, side, strands,
                                         x0 // 2, x1 // 2, same_arc, v))
    return out


def _mk_insertion(move, direction, side, cuts_by_leg):
    cuts = tuple(cuts_by_leg[bp.index] for bp in side.boundary)
    return Embedding(move, direction, (), cuts)


def _mk_bigon(move, direction, side, strands, arc0, arc1, same_arc, variant):
    (s0, in0, out0), (s1, in1, out1) = strands
    cuts_by_leg = {}
    if not same_arc:
        cuts_by_leg[in0] = (arc0, 0)
        cuts_by_leg[out0] = (arc0, 1)
        cuts_by_leg[in1] = (arc1, 0)
        cuts_by_leg[out1] = (arc1, 1)
    else:
        first, second = ((in0, out0), (in1, out1)) if variant == 0 \
            else ((in1, out1), (in0, out0))
        cuts_by_leg[first[0]] = (arc0, 0)
        cuts_by_leg[first[1]] = (arc0, 1)
        cuts_by_leg[second[0]] = (arc0, 2)
        cuts_by_leg[second[1]] = (arc0, 3)
    return _mk_insertion(move, direction, side, cuts_by_leg)


# -- applying ---------------------------------------------------------------

def _fresh_names(host: TangleDiagram, count: int) -> list[str]:
    used = {n.id for n in host.nodes}
    out, i = [], 0
    while len(out) < count:
        name = f"g{i}"
        if name not in used:
            out.append(name)
        i += 1
    return out


def apply_move(host: TangleDiagram, move: str, direction: str,
               emb: Embedding) -> ApplyResult:
    """Rewrite the embedded disk, returning the result and bookkeeping.

    Raises DiagramError for stale embeddings and UnsupportedDiagramError
    when the rewrite would free a closed loop whose orientation the data
    model cannot determine.  When a loop is freed, no inverse embedding is
    reported (the reverse move would need to consume the loop).
    """
    pat = get_move(move)
    if emb.move != move or emb.direction != direction:
        raise DiagramError("embedding does not belong to this move")
    side = pat.side(direction)
    rep = pat.replacement(direction)
    hem = host.end_map()

    node_map = {pid: (h, s) for pid, h, s in emb.node_map}
    for pid, (h, s) in node_map.items():
        if not host.has_node(h):
            raise DiagramError(f"stale embedding: host node {h} missing")
        if s not in _valid_shifts(side.node(pid), host.node(h)):
            raise DiagramError(f"stale embedding: node {h} no longer aligns")
    removed_nodes = {h for h, _ in node_map.values()}

    def image_port(p_ep: NodePort) -> NodePort:
        h, s = node_map[p_ep.node]
        deg = host.node(h).degree
        return NodePort(h, (p_ep.port + s) % deg)

    legs = [bp.index for bp in side.boundary]
    leg_dir = {bp.index: bp.direction for bp in side.boundary}
    if len(emb.cuts) != len(legs):
        raise DiagramError("stale embedding: cut list length mismatch")
    cut_of = {leg: emb.cuts[i] for i, leg in enumerate(legs)}

    cuts_by_arc: dict[int, list[tuple[int, int]]] = {}
    for leg, (arc_i, ordn) in cut_of.items():
        if not (0 <= arc_i < len(host.arcs)):
            raise DiagramError("stale embedding: cut arc missing")
        cuts_by_arc.setdefault(arc_i, []).append((ordn, leg))
    for arc_i in cuts_by_arc:
        cuts_by_arc[arc_i].sort()
        if [o for o, _ in cuts_by_arc[arc_i]] != list(range(len(cuts_by_arc[arc_i]))):
            raise DiagramError("stale embedding: bad cut ordinals")

    internal_host_arcs = set()
    for a in side.arcs:
        if isinstance(a.tail, NodePort) and isinstance(a.head, NodePort):
            ht = hem.get(image_port(a.tail))
            hh = hem.get(image_port(a.head))
            if ht is None or hh is None or ht[0] != hh[0] or ht[1] != 0 or hh[1] != 1:
                raise DiagramError("stale embedding: internal arc mismatch")
            internal_host_arcs.add(ht[0])

    # outer stubs: the surviving pieces of the cut arcs.  Pieces alternate
    # inside/outside along each arc; the tail piece is inside exactly when
    # the arc's tail port belongs to a removed node.
    stubs: list[tuple[tuple, tuple]] = []
    stub_piece: list[tuple[int, int]] = []  # (cut arc, piece index) per stub
    for arc_i, entries in cuts_by_arc.items():
        arc = host.arcs[arc_i]
        inside = isinstance(arc.tail, NodePort) and arc.tail.node in removed_nodes
        points = [("start", None)] + [("cut", leg) for _, leg in entries] + [("end", None)]
        for j in range(len(points) - 1):
            kind_a, leg_a = points[j]
            kind_b, leg_b = points[j + 1]
            if not inside:
                fr = ("ep", arc.tail) if kind_a == "start" else ("leg", leg_a)
                to = ("ep", arc.head) if kind_b == "end" else ("leg", leg_b)
                stubs.append((fr, to))
                stub_piece.append((arc_i, j))
            if kind_b == "cut":
                inside_after = leg_dir[leg_b] == IN
                if inside == inside_after:
                    raise DiagramError("stale embedding: cut orientation clash")
                inside = inside_after

    fresh = _fresh_names(host, len(rep.nodes))
    rename = {n.id: fresh[i] for i, n in enumerate(rep.nodes)}
    new_nodes = [Node(rename[n.id], n.kind, n.ports) for n in rep.nodes]

    inner: list[tuple[tuple, tuple]] = []
    for a in rep.arcs:
        fr = ("leg", a.tail.index) if isinstance(a.tail, BoundaryEnd) \
            else ("ep", NodePort(rename[a.tail.node], a.tail.port))
        to = ("leg", a.head.index) if isinstance(a.head, BoundaryEnd) \
            else ("ep", NodePort(rename[a.head.node], a.head.port))
        inner.append((fr, to))

    # chain the directed segments through the legs: each leg joins one outer
    # and one inner segment end.
    segs = [("outer", i) for i in range(len(stubs))] + \
           [("inner", i) for i in range(len(inner))]

    def seg_ends(ref):
        kind, i = ref
        return stubs[i] if kind == "outer" else inner[i]

    start_at: dict[tuple[str, int], tuple[str, int]] = {}  # (side kind, leg) -> seg
    for ref in segs:
        fr, _ = seg_ends(ref)
        if fr[0] == "leg":
            start_at[(ref[0], fr[1])] = ref

    def next_seg(cur, leg):
        want = "inner" if cur[0] == "outer" else "outer"
        nxt = start_at.get((want, leg))
        if nxt is None:
            raise DiagramError("stale embedding: leg direction clash")
        return nxt

    consumed: set[tuple[str, int]] = set()
    merged_arcs: list[tuple] = []   # (tail ep, head ep, legs in order, chain refs)
    loops: list[list[int]] = []

    for ref in segs:
        fr, _ = seg_ends(ref)
        if ref in consumed or fr[0] != "ep":
            continue
        legs_hit: list[int] = []
        chain: list[tuple[str, int]] = []
        cur = ref
        while True:
            consumed.add(cur)
            chain.append(cur)
            _, to = seg_ends(cur)
            if to[0] == "ep":
                merged_arcs.append((fr[1], to[1], legs_hit, chain))
                break
            legs_hit.append(to[1])
            cur = next_seg(cur, to[1])

    for ref in segs:
        if ref in consumed:
            continue
        loop_legs: list[int] = []
        cur = ref
        while True:
            consumed.add(cur)
            _, to = seg_ends(cur)
            if to[0] != "leg":
                raise DiagramError("internal error: loop trace hit an endpoint")
            loop_legs.append(to[1])
            cur = next_seg(cur, to[1])
            if cur == ref:
                break
        loops.append(loop_legs)

    extra_ccw = extra_cw = 0
    if loops:
        from .looptag import freed_loop_tag
        for loop_legs in loops:
            tag = freed_loop_tag(host, side, node_map, cut_of, loop_legs)
            if tag == 1:
                extra_ccw += 1
            else:
                extra_cw += 1

    result_nodes = [n for n in host.nodes if n.id not in removed_nodes] + new_nodes
    result_arcs: list[Arc] = []
    arc_carry: dict[int, int] = {}
    for i, a in enumerate(host.arcs):
        if i in internal_host_arcs or i in cuts_by_arc:
            continue
        for ep in (a.tail, a.head):
            if isinstance(ep, NodePort) and ep.node in removed_nodes:
                raise DiagramError("stale embedding: uncut arc touches removed node")
        arc_carry[i] = len(result_arcs)
        result_arcs.append(a)
    leg_location: dict[int, tuple[int, int]] = {}
    stub_location: dict[tuple[int, int], tuple[int, int]] = {}
    for tail_ep, head_ep, legs_hit, chain in merged_arcs:
        idx = len(result_arcs)
        result_arcs.append(Arc(tail_ep, head_ep))
        for pos, leg in enumerate(legs_hit):
            leg_location[leg] = (idx, pos)
        for pos, ref in enumerate(chain):
            if ref[0] == "outer":
                stub_location[stub_piece[ref[1]]] = (idx, pos)

    result = TangleDiagram(
        host.boundary, result_nodes, result_arcs,
        (host.free_loops[0] + extra_ccw, host.free_loops[1] + extra_cw))

    inverse = None
    if not loops:
        inv_nodes = tuple(sorted((n.id, rename[n.id], 0) for n in rep.nodes))
        inv_cuts = []
        for bp in rep.boundary:
            if bp.index not in leg_location:
                raise DiagramError("internal error: leg lost during merge")
            inv_cuts.append(leg_location[bp.index])
        inverse = Embedding(move,
                            BACKWARD if direction == FORWARD else FORWARD,
                            inv_nodes, tuple(inv_cuts))
    return ApplyResult(result, inverse, tuple(rename[n.id] for n in rep.nodes),
                       arc_carry, stub_location)


def find_embedding_by_key(host: TangleDiagram, move: str, direction: str,
                          key: str) -> Embedding:
    for e in matches(host, move, direction):
        if e.key(host) == key:
            return e
    raise DiagramError(f"no embedding with key {key}")
