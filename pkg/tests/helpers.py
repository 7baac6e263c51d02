"""Test oracles: brute-force isomorphism and exhaustive tangle enumeration."""

from __future__ import annotations

import random
from itertools import product

from tanglemoves.diagram import (
    IN, OUT, OVER, UNDER, CROSSING, SINK, SOURCE,
    Arc, BoundaryEnd, BoundaryPoint, Node, NodePort, Port, TangleDiagram,
    validate,
)
from tanglemoves.moves import FORWARD, BACKWARD, apply_move, matches


def brute_force_isomorphic(d1: TangleDiagram, d2: TangleDiagram) -> bool:
    """Boundary-fixing combinatorial map isomorphism by exhaustive search."""
    if [(b.index, b.direction) for b in d1.boundary] != \
            [(b.index, b.direction) for b in d2.boundary]:
        return False
    if d1.free_loops != d2.free_loops or len(d1.arcs) != len(d2.arcs):
        return False
    kinds1 = sorted(n.kind for n in d1.nodes)
    kinds2 = sorted(n.kind for n in d2.nodes)
    if kinds1 != kinds2:
        return False
    nodes1 = [n.id for n in d1.nodes]
    arcset2 = set()
    for a in d2.arcs:
        arcset2.add((a.tail, a.head))

    def port_match(n1: Node, n2: Node, shift: int) -> bool:
        deg = n1.degree
        return all((n1.ports[j].role, n1.ports[j].flow)
                   == (n2.ports[(j + shift) % deg].role,
                       n2.ports[(j + shift) % deg].flow)
                   for j in range(deg))

    def translate(ep, assign):
        if isinstance(ep, BoundaryEnd):
            return ep
        n2, shift = assign[ep.node]
        deg = d1.node(ep.node).degree
        return NodePort(n2, (ep.port + shift) % deg)

    def rec(i, assign, used):
        if i == len(nodes1):
            for a in d1.arcs:
                if (translate(a.tail, assign), translate(a.head, assign)) \
                        not in arcset2:
                    return False
            return True
        nid = nodes1[i]
        n1 = d1.node(nid)
        for n2 in d2.nodes:
            if n2.id in used or n2.kind != n1.kind or n2.degree != n1.degree:
                continue
            for shift in range(n1.degree):
                if not port_match(n1, n2, shift):
                    continue
                assign[nid] = (n2.id, shift)
                if rec(i + 1, assign, used | {n2.id}):
                    return True
                del assign[nid]
        return False

    return rec(0, {}, set())


# -- exhaustive enumeration of small planar tangles ---------------------------

_CROSSING_FORMS = [
    # stored port role patterns for a crossing, ccw; all rotations of each
    # other are distinct stored forms but the enumerator fixes one per sign
    (Port(OVER, IN), Port(UNDER, IN), Port(OVER, OUT), Port(UNDER, OUT)),
    (Port(UNDER, IN), Port(OVER, IN), Port(UNDER, OUT), Port(OVER, OUT)),
    (Port(OVER, IN), Port(UNDER, OUT), Port(OVER, OUT), Port(UNDER, IN)),
    (Port(UNDER, IN), Port(OVER, OUT), Port(UNDER, OUT), Port(OVER, IN)),
]


def _node_sets(n_crossings: int, n_vertices: int):
    """All ways to type the nodes (crossing forms, vertex kinds)."""
    for forms in product(range(len(_CROSSING_FORMS)), repeat=n_crossings):
        for kinds in product((SINK, SOURCE), repeat=n_vertices):
            nodes = []
            for i, f in enumerate(forms):
                nodes.append(Node(f"c{i}", CROSSING, _CROSSING_FORMS[f]))
            for i, kind in enumerate(kinds):
                flow = IN if kind == SINK else OUT
                nodes.append(Node(f"v{i}", kind, (Port(None, flow),) * 3))
            yield nodes


def enumerate_tangles(directions: tuple[str, ...], n_crossings: int,
                      n_vertices: int = 0):
    """Every valid tangle with the given boundary and node counts.

    Planar gluing: free stubs live on faces; joining two stubs of one face
    splits it, joining stubs of different components merges their faces.
    Every emitted diagram passes validation (asserted by the caller's test).
    """
    k = len(directions)
    boundary = [BoundaryPoint(i + 1, directions[i]) for i in range(k)]
    for nodes in _node_sets(n_crossings, n_vertices):
        node_by_id = {n.id: n for n in nodes}
        # initial faces: the ring interior sees the boundary stubs in
        # clockwise index order, the lone face around an isolated node sees
        # its ports counter-clockwise (anchored by the planar star gluings)
        faces = {}
        fid = 0
        if k:
            ring = tuple(("b", boundary[i].index)
                         for i in range(k - 1, -1, -1))
            faces[fid] = (0, ring)
            fid += 1
        for ci, n in enumerate(nodes):
            ports = tuple(("n", n.id, p) for p in range(n.degree))
            faces[fid] = (ci + 1, ports)
            fid += 1

        def is_tail(slot) -> bool:
            if slot[0] == "b":
                return directions[slot[1] - 1] == IN
            return node_by_id[slot[1]].ports[slot[2]].flow == OUT

        results = []

        def emit(arcs):
            d = TangleDiagram(boundary, nodes, arcs)
            results.append(d)

        counter = [fid]

        def fresh():
            counter[0] += 1
            return counter[0]

        def rec(faces, arcs):
            first = None
            for f_id in sorted(faces):
                for slot in faces[f_id][1]:
                    if is_tail(slot):
                        first = (f_id, slot)
                        break
                if first:
                    break
            if first is None:
                if all(not f[1] for f in faces.values()):
                    emit(arcs)
                return
            f_id, tail = first
            comp_f, slots_f = faces[f_id]
            ti = slots_f.index(tail)
            # same-face partners
            for hj, head in enumerate(slots_f):
                if hj == ti or is_tail(head):
                    continue
                rest = slots_f[ti + 1:] + slots_f[:ti]  # cyclic after tail
                cut = rest.index(head)
                nf = dict(faces)
                del nf[f_id]
                nf[fresh()] = (comp_f, rest[:cut])
                nf[fresh()] = (comp_f, rest[cut + 1:])
                rec(nf, arcs + [_mk_arc(tail, head)])
            # cross-component partners
            for g_id in sorted(k2 for k2 in faces if k2 != f_id):
                comp_g, slots_g = faces[g_id]
                if comp_g == comp_f:
                    continue
                for hj, head in enumerate(slots_g):
                    if is_tail(head):
                        continue
                    merged = (slots_f[ti + 1:] + slots_f[:ti]
                              + slots_g[hj + 1:] + slots_g[:hj])
                    nf = {}
                    for k2, (c2, s2) in faces.items():
                        if k2 in (f_id, g_id):
                            continue
                        nf[k2] = (comp_f if c2 == comp_g else c2, s2)
                    nf[fresh()] = (comp_f, merged)
                    rec(nf, arcs + [_mk_arc(tail, head)])

        rec(faces, [])
        yield from results


def _mk_arc(tail_slot, head_slot) -> Arc:
    def ep(slot):
        if slot[0] == "b":
            return BoundaryEnd(slot[1])
        return NodePort(slot[1], slot[2])
    return Arc(ep(tail_slot), ep(head_slot))


def brute_force_arc_structures(directions, nodes):
    """All arc assignments ignoring planarity (reference for completeness)."""
    k = len(directions)
    boundary = [BoundaryPoint(i + 1, directions[i]) for i in range(k)]
    tails, heads = [], []
    for i in range(k):
        (tails if directions[i] == IN else heads).append(BoundaryEnd(i + 1))
    for n in nodes:
        for p in range(n.degree):
            (tails if n.ports[p].flow == OUT else heads).append(NodePort(n.id, p))
    if len(tails) != len(heads):
        return
    import itertools
    for perm in itertools.permutations(range(len(heads))):
        arcs = [Arc(tails[i], heads[perm[i]]) for i in range(len(tails))]
        yield TangleDiagram(boundary, nodes, arcs)


def random_walk_tangles(seed: int, count: int, start_diagrams,
                        moves, max_crossings: int = 6, steps: int = 3):
    """Deterministic stream of diagrams generated by random move applications."""
    rng = random.Random(seed)
    out = []
    pool = list(start_diagrams)
    while len(out) < count:
        d = rng.choice(pool)
        for _ in range(steps):
            mv = rng.choice(moves)
            direction = rng.choice((FORWARD, BACKWARD))
            embs = matches(d, mv, direction)
            if not embs:
                continue
            emb = rng.choice(embs)
            res = apply_move(d, mv, direction, emb)
            if res.inverse is None or res.diagram.crossing_count() > max_crossings:
                continue
            d = res.diagram
        out.append(d)
    return out
