"""Circle-count invariants of oriented smoothing, and move effect analysis.

Smoothing replaces every crossing by the orientation-respecting non-crossing
connection, turning a knot tangle into boundary-to-boundary arcs plus simple
circles, each counted as ccw or cw.  Closing a tangle with an exterior
non-crossing matching produces a closed diagram whose circle counts C+ and
C- (and writhe w) feed linear quantities a*C+ + b*C- + c*w.  A move's effect
on such a quantity, classified over every closure of its boundary signature,
is exact: an always-preserved quantity that some target move changes is a
sound non-generation certificate.

Circle tags arising inside the disk are computed combinatorially (side
propagation against the outer face); tags of circles formed by closing are
computed from exact turning numbers of hyperbolic-geodesic representatives,
which meet the rim radially so each composed curve is smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .diagram import (
    IN, OUT, CROSSING, BoundaryEnd, DiagramError, NodePort, TangleDiagram,
    UnsupportedDiagramError, crossing_sign, validate,
)
from .looptag import cycle_tag
from .moves import CLASSICAL_MOVES, get_move


def writhe(d: TangleDiagram) -> int:
    """Number of positive crossings minus number of negative crossings."""
    return sum(crossing_sign(n) for n in d.nodes if n.kind == CROSSING)


@dataclass(frozen=True)
class QuantityVector:
    cplus: int
    cminus: int
    w: int

    @property
    def rot(self) -> int:
        return self.cplus - self.cminus


@dataclass(frozen=True)
class SmoothedTangle:
    """Non-crossing arcs between boundary points plus tagged circles."""
    paths: tuple[tuple[int, int], ...]   # (in leg, out leg), sorted
    circles: tuple[int, int]             # (ccw count, cw count)


def smooth(d: TangleDiagram) -> SmoothedTangle:
    """Orientation-respecting smoothing of a knot-only tangle.

    Requires every node to be a crossing reachable from the boundary (tags
    of circles in unreachable components are not determined by the data
    model).
    """
    rep = validate(d)
    if not rep.ok:
        raise DiagramError(f"invalid diagram: {rep}")
    if any(n.kind != CROSSING for n in d.nodes):
        raise UnsupportedDiagramError("smoothing is undefined at trivalent vertices")
    if d.nodes and d.k == 0:
        raise UnsupportedDiagramError(
            "smoothing a closed diagram with crossings needs a boundary")
    em = d.end_map()

    def continue_port(node_id: str, in_port: int) -> int:
        node = d.node(node_id)
        nxt = (in_port + 1) % 4
        if node.ports[nxt].flow == OUT:
            return nxt
        return (in_port - 1) % 4

    def walk(start_arc: int):
        arcs = [start_arc]
        while True:
            head = d.arcs[arcs[-1]].head
            if isinstance(head, BoundaryEnd):
                return arcs, head.index
            out_port = continue_port(head.node, head.port)
            ref = em.get(NodePort(head.node, out_port))
            nxt, end = ref
            if end != 0:
                raise DiagramError("flow inconsistency during smoothing")
            if nxt == start_arc:
                return arcs, None
            arcs.append(nxt)

    visited: set[int] = set()
    paths = []
    for bp in d.boundary:
        if bp.direction != IN:
            continue
        ref = em.get(BoundaryEnd(bp.index))
        arcs, end_leg = walk(ref[0])
        if end_leg is None:
            raise DiagramError("open strand closed onto itself")
        visited.update(arcs)
        paths.append((bp.index, end_leg))
    ccw, cw = d.free_loops
    for i in range(len(d.arcs)):
        if i in visited:
            continue
        arcs, end_leg = walk(i)
        if end_leg is not None:
            raise DiagramError("circle walk reached the boundary")
        if set(arcs) & visited:
            visited.update(arcs)
            continue
        visited.update(arcs)
        if cycle_tag(d, set(arcs)) == 1:
            ccw += 1
        else:
            cw += 1
    return SmoothedTangle(tuple(sorted(paths)), (ccw, cw))


# -- closures ----------------------------------------------------------------

@dataclass(frozen=True)
class Closure:
    """Exterior non-crossing oriented matching: pairs (out leg, in leg)."""
    pairs: tuple[tuple[int, int], ...]

    def mapping(self) -> dict[int, int]:
        return dict(self.pairs)


def closures(signature: tuple[str, ...]) -> list[Closure]:
    """All exterior non-crossing matchings of out points to in points.

    Chords drawn outside the disk cross exactly when their endpoints
    interleave, as inside, so the enumeration is the classical non-crossing
    one restricted to direction-compatible pairs.
    """
    k = len(signature)
    if signature.count(IN) != signature.count(OUT):
        raise DiagramError("unbalanced boundary signature")
    if k > 12:
        raise DiagramError("signature too large")
    points = list(range(1, k + 1))

    def rec(pts: tuple[int, ...]) -> list[tuple[tuple[int, int], ...]]:
        if not pts:
            return [()]
        first = pts[0]
        out = []
        for j in range(1, len(pts)):
            other = pts[j]
            da, db = signature[first - 1], signature[other - 1]
            if da == db:
                continue
            pair = (first, other) if da == OUT else (other, first)
            for left in rec(pts[1:j]):
                for right in rec(pts[j + 1:]):
                    out.append((pair,) + left + right)
        return out

    return [Closure(tuple(sorted(m))) for m in rec(tuple(points))]


# -- composing a smoothed tangle with a closure -------------------------------

_ANGLE_OFFSETS = (0.0, 0.083, 0.131, 0.171, 0.233, 0.289,
                  0.307, 0.353, 0.401, 0.449, 0.499, 0.547)


def _leg_angles(k: int) -> list[float]:
    return [2 * math.pi * i / k + _ANGLE_OFFSETS[i] for i in range(k)]


def _geodesic_turn(ta: float, tb: float, outside: bool) -> float:
    """Signed tangent turning along the orthogonal-circle arc from ta to tb."""
    u = complex(math.cos(ta), math.sin(ta))
    v = complex(math.cos(tb), math.sin(tb))
    dot = u.real * v.real + u.imag * v.imag
    denom = 1.0 + dot
    if abs(denom) < 1e-9:
        raise DiagramError("degenerate chord (antipodal legs)")
    M = (u + v) / denom
    r2 = abs(M) ** 2 - 1.0
    if r2 <= 0:
        raise DiagramError("degenerate chord")
    r = math.sqrt(r2)
    pu = math.atan2((u - M).imag, (u - M).real)
    pv = math.atan2((v - M).imag, (v - M).real)
    dccw = (pv - pu) % (2 * math.pi)
    mid = M + r * complex(math.cos(pu + dccw / 2), math.sin(pu + dccw / 2))
    mid_inside = abs(mid) < 1.0
    if mid_inside != outside:
        return dccw
    return dccw - 2 * math.pi


def close_counts(sm: SmoothedTangle, closure: Closure, k: int) -> QuantityVector:
    """Circle counts of the smoothed tangle closed by the exterior matching."""
    interior = dict(sm.paths)
    exterior = closure.mapping()
    if sorted(interior) != sorted(exterior.values()) or \
            sorted(interior.values()) != sorted(exterior):
        raise DiagramError("closure does not fit the smoothed boundary")
    angles = {i + 1: a for i, a in enumerate(_leg_angles(k))}
    ccw, cw = sm.circles
    seen: set[int] = set()
    for start in sorted(interior):
        if start in seen:
            continue
        turn = 0.0
        leg = start
        while True:
            seen.add(leg)
            out_leg = interior[leg]
            turn += _geodesic_turn(angles[leg], angles[out_leg], outside=False)
            nxt = exterior[out_leg]
            turn += _geodesic_turn(angles[out_leg], angles[nxt], outside=True)
            leg = nxt
            if leg == start:
                break
        if abs(abs(turn) - 2 * math.pi) > 1e-6:
            raise DiagramError(f"composed curve turning {turn} is not +-2pi")
        if turn > 0:
            ccw += 1
        else:
            cw += 1
    return QuantityVector(ccw, cw, 0)


def circle_counts(d: TangleDiagram) -> QuantityVector:
    """C+, C-, and writhe of a tangle (circles only; open paths uncounted)."""
    sm = smooth(d)
    return QuantityVector(sm.circles[0], sm.circles[1], writhe(d))


# -- linear quantities and move effects ---------------------------------------

@dataclass(frozen=True, order=True)
class LinearQuantity:
    a: int  # coefficient of C+
    b: int  # coefficient of C-
    c: int  # coefficient of writhe

    def value(self, qv: QuantityVector) -> int:
        return self.a * qv.cplus + self.b * qv.cminus + self.c * qv.w

    def __str__(self):
        parts = []
        for coef, sym in ((self.a, "C+"), (self.b, "C-"), (self.c, "w")):
            if coef == 0:
                continue
            sign = "+" if coef > 0 else "-"
            mag = abs(coef)
            parts.append(f"{sign}{'' if mag == 1 else mag}{sym}")
        if not parts:
            return "0"
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


CPLUS = LinearQuantity(1, 0, 0)
CMINUS = LinearQuantity(0, 1, 0)
SUM_PLUS_W = LinearQuantity(1, 1, 1)      # C+ + C- + w
SUM_MINUS_W = LinearQuantity(1, 1, -1)    # C+ + C- - w
W_PLUS_ROT = LinearQuantity(1, -1, 1)     # w + rot
ROT_MINUS_W = LinearQuantity(1, -1, -1)   # rot - w

TABLE_QUANTITIES = (CPLUS, CMINUS, SUM_PLUS_W, SUM_MINUS_W, W_PLUS_ROT)

PRESERVED = "preserved"
CONSTANT = "constant"
CONTEXT = "context"


@dataclass(frozen=True)
class MoveEffect:
    move: str
    quantity: LinearQuantity
    kind: str                                   # preserved | constant | context
    deltas: tuple[tuple[Closure, int], ...]     # forward delta per closure

    @property
    def constant_delta(self) -> Optional[int]:
        return self.deltas[0][1] if self.kind == CONSTANT else None

    def nonzero_witness(self) -> Optional[Closure]:
        for cl, dv in self.deltas:
            if dv != 0:
                return cl
        return None


@lru_cache(maxsize=None)
def _move_closure_data(move: str):
    pat = get_move(move)
    if move not in CLASSICAL_MOVES:
        raise UnsupportedDiagramError(
            f"{move}: smoothing-based effects are defined for classical moves only")
    sm_l = smooth(pat.left)
    sm_r = smooth(pat.right)
    k = pat.left.k
    dw = writhe(pat.right) - writhe(pat.left)
    rows = []
    for cl in closures(pat.signature):
        ql = close_counts(sm_l, cl, k)
        qr = close_counts(sm_r, cl, k)
        rows.append((cl, qr.cplus - ql.cplus, qr.cminus - ql.cminus, dw))
    return tuple(rows)


@lru_cache(maxsize=None)
def move_effect(move: str, q: LinearQuantity) -> MoveEffect:
    """Exact forward effect of a classical move on a linear quantity."""
    rows = _move_closure_data(move)
    deltas = tuple((cl, q.a * dp + q.b * dm + q.c * dw) for cl, dp, dm, dw in rows)
    values = {dv for _, dv in deltas}
    if values == {0}:
        kind = PRESERVED
    elif len(values) == 1:
        kind = CONSTANT
    else:
        kind = CONTEXT
    return MoveEffect(move, q, kind, deltas)


def effect_table() -> dict[tuple[str, LinearQuantity], MoveEffect]:
    out = {}
    for mv in CLASSICAL_MOVES:
        for q in TABLE_QUANTITIES:
            out[(mv, q)] = move_effect(mv, q)
    return out


def _effect_cell(eff: MoveEffect) -> str:
    if eff.kind == PRESERVED:
        return "preserved"
    if eff.kind == CONSTANT:
        return f"delta:{eff.constant_delta:+d}"
    return "context"


def render_effect_table() -> str:
    """Stable line-record rendering of the full classification."""
    lines = ["format: tanglemoves-effects/1"]
    for mv in CLASSICAL_MOVES:
        cells = [f"{q}={_effect_cell(move_effect(mv, q))}"
                 for q in TABLE_QUANTITIES]
        lines.append(f"effect {mv} " + " ".join(cells))
    return "\n".join(lines) + "\n"


def render_effect_grid() -> str:
    """Human-readable aligned table of the same classification."""
    headers = ["move"] + [str(q) for q in TABLE_QUANTITIES]
    rows = [[mv] + [_effect_cell(move_effect(mv, q)) for q in TABLE_QUANTITIES]
            for mv in CLASSICAL_MOVES]
    widths = [max(len(r[i]) for r in [headers] + rows)
              for i in range(len(headers))]
    out = []
    for r in [headers] + rows:
        out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(r)))
    return "\n".join(out) + "\n"


def _canonical_quantities() -> list[LinearQuantity]:
    named = [CPLUS, CMINUS, W_PLUS_ROT, SUM_PLUS_W, SUM_MINUS_W, ROT_MINUS_W]
    rest = []
    seen = set(named)
    for a in range(-2, 3):
        for b in range(-2, 3):
            for c in range(-2, 3):
                if (a, b, c) == (0, 0, 0):
                    continue
                lead = next(x for x in (a, b, c) if x != 0)
                if lead < 0:
                    continue  # keep one sign per line
                q = LinearQuantity(a, b, c)
                if q not in seen:
                    seen.add(q)
                    rest.append(q)
    rest.sort(key=lambda q: (max(abs(q.a), abs(q.b), abs(q.c)), (q.a, q.b, q.c)))
    return named + rest


_QUANTITY_BOX = None


def quantity_box() -> list[LinearQuantity]:
    global _QUANTITY_BOX
    if _QUANTITY_BOX is None:
        _QUANTITY_BOX = _canonical_quantities()
    return _QUANTITY_BOX


def find_obstruction(moves: frozenset[str] | set[str],
                     target: str) -> Optional[LinearQuantity]:
    """A linear quantity every move of the set preserves in all contexts but
    the target changes in some context; sound evidence the target is not
    generated.  Coefficients are searched in the box |a|,|b|,|c| <= 2."""
    moves = frozenset(moves)
    for mv in moves | {target}:
        if mv not in CLASSICAL_MOVES:
            raise UnsupportedDiagramError("obstruction search is classical-only")
    for q in quantity_box():
        if any(move_effect(mv, q).kind != PRESERVED for mv in sorted(moves)):
            continue
        te = move_effect(target, q)
        if te.kind == CONSTANT or (te.kind == CONTEXT and te.nonzero_witness()):
            return q
    return None
