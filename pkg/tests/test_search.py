import pytest

from tanglemoves.diagram import DiagramError, same_tangle
from tanglemoves.moves import BACKWARD, FORWARD, apply_move, get_move, matches
from tanglemoves.search import (
    Bounds, CAPPED, EXHAUSTED, FOUND, Certificate, ReplayFailure, Step,
    certificate_from_text, certificate_to_text, expand_certificate,
    generates_report, realize, replay, reverse_certificate,
)

SMALL = Bounds(max_crossings=6, max_depth=6, max_states=300_000)


def test_realize_identity_is_empty_certificate():
    d = get_move("r2a").left
    out = realize(d, d, frozenset({"r1a"}), SMALL)
    assert out.status == FOUND
    assert len(out.certificate) == 0
    assert same_tangle(replay(out.certificate), d)


def test_realize_signature_mismatch_rejected():
    with pytest.raises(DiagramError):
        realize(get_move("r1a").left, get_move("r2a").left, frozenset({"r1a"}))


def test_kink_exchange_certificates():
    # each kink move from its partner kink plus an antiparallel bigon move
    for target, moves in [("r1d", {"r1a", "r2c"}), ("r1a", {"r1d", "r2d"}),
                          ("r1b", {"r1c", "r2c"}), ("r1c", {"r1b", "r2d"})]:
        pat = get_move(target)
        out = realize(pat.left, pat.right, frozenset(moves), SMALL)
        assert out.status == FOUND, target
        assert len(out.certificate) == 2, target
        assert same_tangle(replay(out.certificate), pat.right)


def test_realize_unreachable_is_exhausted():
    # a kink cannot appear using only triangle moves (they preserve writhe)
    pat = get_move("r1a")
    out = realize(pat.left, pat.right, frozenset({"r3a"}),
                  Bounds(max_crossings=5, max_depth=4, max_states=100_000))
    assert out.status == EXHAUSTED


def test_realize_state_cap_reported():
    pat = get_move("r3g")
    out = realize(pat.left, pat.right, frozenset({"r2a", "r2b", "r2c", "r2d"}),
                  Bounds(max_crossings=9, max_depth=14, max_states=60))
    assert out.status == CAPPED


def test_certificate_tampering_detected():
    pat = get_move("r1d")
    out = realize(pat.left, pat.right, frozenset({"r1a", "r2c"}), SMALL)
    cert = out.certificate
    bad_steps = list(cert.steps)
    st = bad_steps[1]
    flipped = FORWARD if st.direction == BACKWARD else BACKWARD
    bad_steps[1] = Step(st.move, flipped, st.embedding_key)
    bad = Certificate(cert.source_text, tuple(bad_steps),
                      cert.result_code, cert.moves)
    with pytest.raises(ReplayFailure):
        replay(bad)


def test_replay_rejects_undeclared_move():
    pat = get_move("r1d")
    out = realize(pat.left, pat.right, frozenset({"r1a", "r2c"}), SMALL)
    cert = out.certificate
    bad = Certificate(cert.source_text, cert.steps, cert.result_code, ("r1a",))
    with pytest.raises(ReplayFailure):
        replay(bad)


def test_reverse_certificate_round_trip():
    pat = get_move("r2c")
    out = realize(pat.left, pat.right, frozenset({"r1a", "r2a", "r3a"}), SMALL)
    rev = reverse_certificate(out.certificate)
    assert same_tangle(replay(rev), pat.left)
    assert rev.result_code == pat.left.canonical_code().code


def test_certificate_text_round_trip():
    pat = get_move("r1d")
    out = realize(pat.left, pat.right, frozenset({"r1a", "r2c"}), SMALL)
    text = certificate_to_text(out.certificate)
    back = certificate_from_text(text)
    assert back == out.certificate
    assert same_tangle(replay(back), pat.right)


def test_shortest_length_matches_iddfs_oracle():
    # independent iterative deepening over the same successor relation
    from tanglemoves.search import _move_order, _successors

    def iddfs_length(source, target, moves, max_depth, max_crossings):
        order = _move_order(moves)
        tgt = target.canonical_code().code

        def dfs(d, depth):
            if d.canonical_code().code == tgt:
                return 0
            if depth == 0:
                return None
            for mv, direction, emb, res in _successors(d, order, max_crossings):
                sub = dfs(res.diagram, depth - 1)
                if sub is not None:
                    return sub + 1
            return None

        for limit in range(max_depth + 1):
            got = dfs(source, limit)
            if got is not None:
                return got
        return None

    cases = [("r1d", {"r1a", "r2c"}), ("r1b", {"r1c", "r2c"}),
             ("r2c", {"r1a", "r2a", "r3a"})]
    for target, moves in cases:
        pat = get_move(target)
        out = realize(pat.left, pat.right, frozenset(moves), SMALL)
        oracle = iddfs_length(pat.left, pat.right, frozenset(moves), 4, 6)
        assert out.status == FOUND
        assert len(out.certificate) == oracle, target


def test_monotonicity_in_bounds():
    pat = get_move("r2c")
    msets = frozenset({"r1a", "r2a", "r3a"})
    small = realize(pat.left, pat.right, msets,
                    Bounds(max_crossings=5, max_depth=4, max_states=100_000))
    big = realize(pat.left, pat.right, msets,
                  Bounds(max_crossings=7, max_depth=8, max_states=500_000))
    assert small.status == FOUND and big.status == FOUND
    assert len(small.certificate) == len(big.certificate)
    replay(small.certificate)
    replay(big.certificate)


def test_determinism_of_realize():
    pat = get_move("r2d")
    msets = frozenset({"r1b", "r2a", "r3a"})
    a = realize(pat.left, pat.right, msets, SMALL)
    b = realize(pat.left, pat.right, msets, SMALL)
    assert a.certificate == b.certificate


def test_expand_certificate_through_derived_move():
    # realize a kink move using a derived bigon move, then expand to base
    base = frozenset({"r1a", "r2a", "r3a"})
    r2c = get_move("r2c")
    sub = realize(r2c.left, r2c.right, base, SMALL)
    assert sub.status == FOUND
    pure = {"r2c": sub.certificate}
    r1d = get_move("r1d")
    comp = realize(r1d.left, r1d.right, base | {"r2c"}, SMALL)
    assert comp.status == FOUND
    assert any(st.move == "r2c" for st in comp.certificate.steps)
    expanded = expand_certificate(comp.certificate, base, pure)
    assert all(st.move in base for st in expanded.steps)
    assert same_tangle(replay(expanded), r1d.right)


def test_generates_report_obstruction_first():
    report = generates_report(frozenset({"r1a", "r1d", "r2a", "r3a"}),
                              Bounds(max_depth=8, max_states=20_000))
    assert report["r1b"].status == "obstructed"
    assert str(report["r1b"].obstruction) == "C+-C-+w"
    assert report["r1c"].status == "obstructed"
