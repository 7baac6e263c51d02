import math

import pytest

from tanglemoves.diagram import (
    IN, OUT, TangleDiagram, UnsupportedDiagramError, validate,
)
from tanglemoves.invariants import (
    CMINUS, CPLUS, CONSTANT, CONTEXT, PRESERVED, ROT_MINUS_W, SUM_MINUS_W,
    SUM_PLUS_W, TABLE_QUANTITIES, W_PLUS_ROT, LinearQuantity,
    circle_counts, close_counts, closures, effect_table, find_obstruction,
    move_effect, quantity_box, render_effect_table, smooth, writhe,
)
from tanglemoves.moves import CLASSICAL_MOVES, get_move

from helpers import enumerate_tangles


def test_writhe_basics():
    assert writhe(TangleDiagram()) == 0
    assert writhe(get_move("r3a").left) == 1
    assert writhe(get_move("r3h").left) == -1


def test_smooth_single_strand():
    sm = smooth(get_move("r1a").left)
    assert sm.paths == ((1, 2),)
    assert sm.circles == (0, 0)


def test_smooth_kinks_match_loop_handedness():
    # positive kink with clockwise loop adds a cw circle; mirror for others
    assert smooth(get_move("r1a").right).circles == (0, 1)
    assert smooth(get_move("r1b").right).circles == (1, 0)
    assert smooth(get_move("r1c").right).circles == (0, 1)
    assert smooth(get_move("r1d").right).circles == (1, 0)


def test_smooth_free_loop():
    qv = circle_counts(TangleDiagram(free_loops=(1, 0)))
    assert (qv.cplus, qv.cminus) == (1, 0)
    assert qv.rot == 1


def test_smooth_rejects_vertices():
    with pytest.raises(UnsupportedDiagramError):
        smooth(get_move("r5a").left)


def test_smooth_bigon_sides():
    # co-oriented bigon smooths to the same arcs as its flat side
    assert smooth(get_move("r2a").right) == smooth(get_move("r2a").left)
    # antiparallel bigon frees one circle
    sm = smooth(get_move("r2c").right)
    assert sum(sm.circles) == 1


def test_closure_counts():
    assert len(closures((IN, OUT))) == 1
    assert len(closures(get_move("r2a").signature)) == 1
    assert len(closures(get_move("r2c").signature)) == 2
    assert len(closures(get_move("r3a").signature)) == 5


def test_closures_match_brute_force():
    # oracle: all matchings, filtered by orientation and chord interleaving
    import itertools

    def brute(signature):
        k = len(signature)
        outs = [i + 1 for i in range(k) if signature[i] == OUT]
        ins = [i + 1 for i in range(k) if signature[i] == IN]
        count = 0
        for perm in itertools.permutations(ins):
            pairs = list(zip(outs, perm))
            good = True
            for (a, b), (c, d) in itertools.combinations(pairs, 2):
                x1, y1 = sorted((a, b))
                x2, y2 = sorted((c, d))
                if (x1 < x2 < y1 < y2) or (x2 < x1 < y2 < y1):
                    good = False
                    break
            if good:
                count += 1
        return count

    for sig in [(IN, OUT), (IN, OUT, OUT, IN), (OUT, IN, OUT, IN),
                get_move("r3a").signature, get_move("r3g").signature]:
        assert len(closures(sig)) == brute(sig), sig


def test_close_counts_turning_consistency():
    # every classical pattern side composed with every closure yields
    # circles with turning exactly +-2pi (asserted internally) and
    # rot equal to C+ - C-
    for name in CLASSICAL_MOVES:
        pat = get_move(name)
        for side in (pat.left, pat.right):
            sm = smooth(side)
            for cl in closures(pat.signature):
                qv = close_counts(sm, cl, pat.left.k)
                assert qv.rot == qv.cplus - qv.cminus


def test_smoothing_commutes_with_closure():
    # circle counts via smooth-then-close agree with the tags of circles
    # computed on diagrams reached by moves (rewrite-level check): closing
    # the left and right of a writhe-0 move with the same closure preserves
    # rot deltas summing to zero for preserved quantities
    for name in ("r2a", "r2b", "r3b", "r3c", "r3d", "r3e", "r3f", "r3g"):
        pat = get_move(name)
        sml, smr = smooth(pat.left), smooth(pat.right)
        for cl in closures(pat.signature):
            ql = close_counts(sml, cl, pat.left.k)
            qr = close_counts(smr, cl, pat.left.k)
            assert (ql.cplus, ql.cminus) == (qr.cplus, qr.cminus), (name, cl)


# the published behavior of each classical move on the five quantities
PAPER_TABLE = {
    "r1a": {CPLUS: PRESERVED, CMINUS: CONSTANT, SUM_PLUS_W: CONSTANT,
            SUM_MINUS_W: PRESERVED, W_PLUS_ROT: PRESERVED},
    "r1b": {CPLUS: CONSTANT, CMINUS: PRESERVED, SUM_PLUS_W: CONSTANT,
            SUM_MINUS_W: PRESERVED, W_PLUS_ROT: CONSTANT},
    "r1c": {CPLUS: PRESERVED, CMINUS: CONSTANT, SUM_PLUS_W: PRESERVED,
            SUM_MINUS_W: CONSTANT, W_PLUS_ROT: CONSTANT},
    "r1d": {CPLUS: CONSTANT, CMINUS: PRESERVED, SUM_PLUS_W: PRESERVED,
            SUM_MINUS_W: CONSTANT, W_PLUS_ROT: PRESERVED},
    "r2a": dict.fromkeys(TABLE_QUANTITIES, PRESERVED),
    "r2b": dict.fromkeys(TABLE_QUANTITIES, PRESERVED),
    "r2c": {CPLUS: CONTEXT, CMINUS: CONTEXT, SUM_PLUS_W: CONTEXT,
            SUM_MINUS_W: CONTEXT, W_PLUS_ROT: PRESERVED},
    "r2d": {CPLUS: CONTEXT, CMINUS: CONTEXT, SUM_PLUS_W: CONTEXT,
            SUM_MINUS_W: CONTEXT, W_PLUS_ROT: PRESERVED},
    "r3a": {CPLUS: CONTEXT, CMINUS: CONTEXT, SUM_PLUS_W: CONTEXT,
            SUM_MINUS_W: CONTEXT, W_PLUS_ROT: PRESERVED},
    "r3h": {CPLUS: CONTEXT, CMINUS: CONTEXT, SUM_PLUS_W: CONTEXT,
            SUM_MINUS_W: CONTEXT, W_PLUS_ROT: PRESERVED},
}
for _v in "bcdefg":
    PAPER_TABLE[f"r3{_v}"] = dict.fromkeys(TABLE_QUANTITIES, PRESERVED)


def test_effect_table_matches_published_behavior():
    table = effect_table()
    for mv in CLASSICAL_MOVES:
        for q in TABLE_QUANTITIES:
            assert table[(mv, q)].kind == PAPER_TABLE[mv][q], (mv, str(q))


def test_kink_move_constant_deltas():
    assert move_effect("r1a", CMINUS).constant_delta == 1
    assert move_effect("r1b", CPLUS).constant_delta == 1
    assert move_effect("r1a", SUM_PLUS_W).constant_delta == 2
    assert move_effect("r1b", W_PLUS_ROT).constant_delta == 2
    assert move_effect("r1c", W_PLUS_ROT).constant_delta == -2


def test_context_moves_attain_nonzero():
    for mv in ("r2c", "r2d", "r3a", "r3h"):
        for q in (CPLUS, CMINUS, SUM_PLUS_W, SUM_MINUS_W):
            eff = move_effect(mv, q)
            assert eff.kind == CONTEXT
            assert eff.nonzero_witness() is not None, (mv, str(q))


def test_effect_rejects_graph_moves():
    with pytest.raises(UnsupportedDiagramError):
        move_effect("r4a", CPLUS)


def test_obstruction_examples():
    S = frozenset({"r1a", "r1d", "r2a", "r3a"})
    assert find_obstruction(S, "r1b") == W_PLUS_ROT
    assert find_obstruction(S, "r1c") == W_PLUS_ROT
    S2 = frozenset({"r1a", "r1c", "r2a", "r2b", "r3b"})
    assert find_obstruction(S2, "r2c") == CPLUS
    S3 = frozenset({"r1b", "r1c", "r2a", "r3b"})
    assert find_obstruction(S3, "r1a") == ROT_MINUS_W
    # a generating set admits no obstruction for any target
    SA = frozenset({"r1a", "r1b", "r2a", "r3a"})
    for target in CLASSICAL_MOVES:
        if target in SA:
            continue
        assert find_obstruction(SA, target) is None, target


def test_pair_case_analysis_quantities():
    cases = [({"r1a", "r1b"}, SUM_MINUS_W), ({"r1a", "r1c"}, CPLUS),
             ({"r1b", "r1d"}, CMINUS), ({"r1c", "r1d"}, SUM_PLUS_W)]
    for pair, q in cases:
        S = frozenset(pair | {"r2a", "r2b", "r3b"})
        for target in ("r2c", "r2d", "r3a", "r3h"):
            assert find_obstruction(S, target) == q, (pair, target)


def test_quantity_box_covers_named():
    box = quantity_box()
    for q in (CPLUS, CMINUS, SUM_PLUS_W, SUM_MINUS_W, W_PLUS_ROT,
              ROT_MINUS_W, LinearQuantity(0, 0, 1)):
        assert q in box
    assert all(max(abs(q.a), abs(q.b), abs(q.c)) <= 2 for q in box)


def test_render_effect_table_stable():
    assert render_effect_table() == render_effect_table()
    assert render_effect_table().startswith("format: tanglemoves-effects/1")


def test_rot_equals_circle_difference_on_closed_compositions():
    # closed smoothing fixtures: every pattern side closed by every closure
    for name in ("r1a", "r1b", "r2c", "r3a", "r3h"):
        pat = get_move(name)
        for side in (pat.left, pat.right):
            sm = smooth(side)
            for cl in closures(pat.signature):
                qv = close_counts(sm, cl, pat.left.k)
                assert qv.rot == qv.cplus - qv.cminus


def test_smooth_unreachable_component_unsupported():
    # a closed 1-crossing diagram has no boundary anchor for circle tags
    from tanglemoves.diagram import Arc, Node, NodePort, Port, OVER, UNDER
    c = Node("c", "crossing", (Port(OVER, OUT), Port(UNDER, OUT),
                               Port(OVER, IN), Port(UNDER, IN)))
    d = TangleDiagram([], [c], [Arc(NodePort("c", 0), NodePort("c", 3)),
                                Arc(NodePort("c", 1), NodePort("c", 2))])
    assert validate(d).ok
    with pytest.raises(UnsupportedDiagramError):
        smooth(d)
