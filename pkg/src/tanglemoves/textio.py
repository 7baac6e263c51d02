"""Text format for tangle diagrams.

One document per tangle, line oriented.  Blank lines and ``#`` comments are
ignored.  Grammar::

    boundary: <dir> <dir> ...            # directions of points 1..k (in|out)
    node <id> crossing <r0> <r1> <r2> <r3>   # port roles in ccw order,
                                             # each over-in|over-out|under-in|under-out
    node <id> sink                       # 3 ports, all inward
    node <id> source                     # 3 ports, all outward
    arc <endpoint> <endpoint>            # tail then head; b<i> or <node>.<port>
    loops ccw=<n> cw=<m>                 # optional crossing-free circles

Canonical serialization orders nodes by first traversal occurrence and
renames them n0, n1, ...
"""

from __future__ import annotations

from .diagram import (
    IN, OUT, OVER, UNDER, CROSSING, SINK, SOURCE,
    Arc, BoundaryEnd, BoundaryPoint, DiagramError, Endpoint, Node, NodePort,
    Port, TangleDiagram, validate,
)

_ROLE_NAMES = {
    "over-in": Port(OVER, IN),
    "over-out": Port(OVER, OUT),
    "under-in": Port(UNDER, IN),
    "under-out": Port(UNDER, OUT),
}
_ROLE_BACK = {v: k for k, v in _ROLE_NAMES.items()}


class ParseError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _parse_endpoint(tok: str, line_no: int) -> Endpoint:
    if tok.startswith("b") and tok[1:].isdigit():
        return BoundaryEnd(int(tok[1:]))
    if "." in tok:
        nid, _, port = tok.rpartition(".")
        if nid and port.isdigit():
            return NodePort(nid, int(port))
    raise ParseError(line_no, f"bad endpoint {tok!r} (want b<i> or <node>.<port>)")


def parse_tangle(text: str) -> TangleDiagram:
    boundary: list[BoundaryPoint] = []
    nodes: list[Node] = []
    arcs: list[Arc] = []
    loops = (0, 0)
    seen_boundary = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "boundary:" or head == "boundary":
            if seen_boundary:
                raise ParseError(line_no, "duplicate boundary line")
            seen_boundary = True
            dirs = parts[1:]
            for i, tok in enumerate(dirs, start=1):
                if tok not in (IN, OUT):
                    raise ParseError(line_no, f"bad direction {tok!r}")
                boundary.append(BoundaryPoint(i, tok))
        elif head == "node":
            if len(parts) < 3:
                raise ParseError(line_no, "node line needs id and kind")
            nid, kind = parts[1], parts[2]
            if kind == CROSSING:
                roles = parts[3:]
                if len(roles) != 4:
                    raise ParseError(line_no, f"crossing {nid} needs 4 port roles")
                try:
                    ports = tuple(_ROLE_NAMES[r] for r in roles)
                except KeyError as e:
                    raise ParseError(line_no, f"bad port role {e.args[0]!r}") from None
                nodes.append(Node(nid, CROSSING, ports))
            elif kind in (SINK, SOURCE):
                if len(parts) != 3:
                    raise ParseError(line_no, f"{kind} takes no port roles")
                flow = IN if kind == SINK else OUT
                nodes.append(Node(nid, kind, (Port(None, flow),) * 3))
            else:
                raise ParseError(line_no, f"unknown node kind {kind!r}")
        elif head == "arc":
            if len(parts) != 3:
                raise ParseError(line_no, "arc line needs tail and head")
            arcs.append(Arc(_parse_endpoint(parts[1], line_no),
                            _parse_endpoint(parts[2], line_no)))
        elif head == "loops":
            vals = {"ccw": 0, "cw": 0}
            for tok in parts[1:]:
                key, _, num = tok.partition("=")
                if key not in vals or not num.lstrip("-").isdigit():
                    raise ParseError(line_no, f"bad loops field {tok!r}")
                vals[key] = int(num)
            loops = (vals["ccw"], vals["cw"])
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")
    d = TangleDiagram(boundary, nodes, arcs, loops)
    rep = validate(d)
    if not rep.ok:
        raise DiagramError(f"parsed diagram invalid: {rep}")
    return d


def serialize_tangle(d: TangleDiagram, canonical: bool = True) -> str:
    """Render a diagram; canonical form renames nodes in traversal order."""
    if canonical:
        tr = d.traversal()
        rename = {nid: f"n{tr.node_tid[nid]}" for nid in tr.node_tid}
        node_order = tr.node_order
        arc_order = tr.arc_order
        leftover_arcs = [i for i in range(len(d.arcs)) if i not in tr.arc_tid]
        arc_order = list(arc_order) + leftover_arcs
    else:
        rename = {n.id: n.id for n in d.nodes}
        node_order = [n.id for n in d.nodes]
        arc_order = list(range(len(d.arcs)))

    def ep_str(ep: Endpoint) -> str:
        if isinstance(ep, BoundaryEnd):
            return f"b{ep.index}"
        return f"{rename[ep.node]}.{ep.port}"

    lines = []
    if d.boundary:
        lines.append("boundary: " + " ".join(b.direction for b in d.boundary))
    for nid in node_order:
        n = d.node(nid)
        if n.kind == CROSSING:
            roles = " ".join(_ROLE_BACK[p] for p in n.ports)
            lines.append(f"node {rename[nid]} crossing {roles}")
        else:
            lines.append(f"node {rename[nid]} {n.kind}")
    for ai in arc_order:
        a = d.arcs[ai]
        lines.append(f"arc {ep_str(a.tail)} {ep_str(a.head)}")
    if d.free_loops != (0, 0):
        lines.append(f"loops ccw={d.free_loops[0]} cw={d.free_loops[1]}")
    return "\n".join(lines) + "\n"
