"""Orientation tags of embedded cycles, computed from the map structure.

A simple closed oriented curve drawn along diagram arcs (cutting through
the crossings it passes) separates the sphere; its ccw/cw tag in the disk
picture is determined by which side holds the unbounded region.  Faces are
two-colored by propagating across edges: same side across edges off the
cycle, opposite sides across its own arcs.  This needs no geometry and
covers straight passages, elbow passages, and double passages alike.
"""

from __future__ import annotations

from .diagram import (
    CROSSING, BoundaryEnd, NodePort, TangleDiagram, UnsupportedDiagramError,
)

CCW = 1
CW = -1


class _ParityUnion:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.parity = [0] * n  # parity relative to parent

    def find(self, x: int) -> tuple[int, int]:
        if self.parent[x] == x:
            return x, 0
        root, par = self.find(self.parent[x])
        self.parent[x] = root
        self.parity[x] ^= par
        return root, self.parity[x]

    def union(self, a: int, b: int, differ: bool) -> bool:
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        want = pa ^ pb ^ (1 if differ else 0)
        if ra == rb:
            return want == 0
        self.parent[rb] = ra
        self.parity[rb] = want
        return True

    def relation(self, a: int, b: int):
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra != rb:
            return None
        return pa ^ pb


def cycle_tag(d: TangleDiagram, cycle_arcs: set[int]) -> int:
    """Tag (+1 ccw, -1 cw) of the closed curve formed by the given arcs.

    The curve must traverse every listed arc once, in arc direction.  The
    unbounded region must be determined, so the diagram needs boundary
    points and the cycle must live in a boundary-connected component.
    """
    if d.k == 0:
        raise UnsupportedDiagramError(
            "cycle orientation undetermined: no boundary to anchor the outer face")
    cm = d.closed_map()
    uf = _ParityUnion(len(cm.faces))
    A = len(d.arcs)
    ok = True
    for i in range(A):
        L, R = cm.face_of[2 * i], cm.face_of[2 * i + 1]
        ok &= uf.union(L, R, differ=(i in cycle_arcs))
    for s in range(d.k):
        dd = 2 * A + 2 * s
        ok &= uf.union(cm.face_of[dd], cm.face_of[dd + 1], differ=False)
    if not ok:
        raise UnsupportedDiagramError("cycle is not a simple closed curve")
    a0 = min(cycle_arcs)
    left = cm.face_of[2 * a0]
    rel = uf.relation(left, cm.outer)
    if rel is None:
        raise UnsupportedDiagramError(
            "cycle orientation undetermined: not connected to the boundary")
    # ccw exactly when the unbounded region lies on the right of the curve
    return CCW if rel == 1 else CW


def strand_cycle_arcs(d: TangleDiagram, start_arc: int) -> set[int]:
    """Arcs of the closed strand through ``start_arc``.

    Follows the strand forward through crossings (straight across).  Raises
    if the strand hits the boundary or a trivalent vertex (not a cycle), or
    revisits a crossing (self-crossing curve, tag not determined here).
    """
    em = d.end_map()
    arcs = set()
    seen_nodes = set()
    arc_i = start_arc
    while True:
        if arc_i in arcs:
            if arc_i == start_arc:
                return arcs
            raise UnsupportedDiagramError("strand walk re-entered mid-cycle")
        arcs.add(arc_i)
        head = d.arcs[arc_i].head
        if isinstance(head, BoundaryEnd):
            raise UnsupportedDiagramError("strand reaches the boundary; not a cycle")
        node = d.node(head.node)
        if node.kind != CROSSING:
            raise UnsupportedDiagramError(
                "closed strand through a trivalent vertex cannot be freed")
        if head.node in seen_nodes:
            raise UnsupportedDiagramError(
                "freed loop crosses itself; orientation not determined")
        seen_nodes.add(head.node)
        out_port = (head.port + 2) % 4
        nxt = em.get(NodePort(head.node, out_port))
        if nxt is None:
            raise UnsupportedDiagramError("dangling port during strand walk")
        arc_i, end = nxt
        if end != 0:
            raise UnsupportedDiagramError("strand direction inconsistency")


def freed_loop_tag(host: TangleDiagram, side, node_map, cut_of, loop_legs) -> int:
    """Tag of a loop about to be freed by a rewrite, from the pre-move map."""
    leg0 = loop_legs[0]
    start_arc = cut_of[leg0][0]
    arcs = strand_cycle_arcs(host, start_arc)
    return cycle_tag(host, arcs)
