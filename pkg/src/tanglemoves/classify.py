"""Classification of candidate move sets.

Enumerates 4-element classical move sets, classifies each as generating
(with replayable certificates for all 12 outside moves), not generating
(with an invariant obstruction, or by the necessary-composition rule in the
full run), or undecided within bounds.  Also verifies the trivalent-graph
realization suite and the minimal-set count for graph diagrams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .moves import CLASSICAL_MOVES, MOVE_NAMES, get_move
from .search import (
    Bounds, TargetVerdict, generates_report, realize, replay,
)

R1_MOVES = ("r1a", "r1b", "r1c", "r1d")
R2_MOVES = ("r2a", "r2b", "r2c", "r2d")
R3_MOVES = tuple(f"r3{v}" for v in "abcdefgh")

GENERATING = "generating"
NOT_GENERATING = "not-generating"
UNDECIDED = "undecided"


def minimal_generating_sets() -> list[frozenset]:
    """The twelve 4-move generating sets, grouped by their triangle move.

    Six sets carry r3a and six carry r3h; every set has two kink moves, one
    of the co-oriented bigon moves, and that one triangle move.
    """
    with_r3a = [
        {"r1a", "r1c"}, {"r1b", "r1d"}, {"r1a", "r1b"},
    ]
    with_r3h = [
        {"r1a", "r1c"}, {"r1b", "r1d"}, {"r1c", "r1d"},
    ]
    out = []
    for tri, pairs in (("r3a", with_r3a), ("r3h", with_r3h)):
        for pair in pairs:
            for bigon in ("r2a", "r2b"):
                out.append(frozenset(pair | {bigon, tri}))
    return out


def set_label(moves) -> str:
    return "+".join(m for m in MOVE_NAMES if m in moves)


def composition_ok(moves) -> bool:
    """Exactly two kink moves, one bigon move, one triangle move."""
    ms = set(moves)
    return (len(ms) == 4
            and len(ms & set(R1_MOVES)) == 2
            and len(ms & set(R2_MOVES)) == 1
            and len(ms & set(R3_MOVES)) == 1)


def candidate_sets(kind: str) -> list[frozenset]:
    if kind == "all4":
        return [frozenset(c) for c in combinations(CLASSICAL_MOVES, 4)]
    if kind == "composition":
        out = []
        for pair in combinations(R1_MOVES, 2):
            for b in R2_MOVES:
                for t in R3_MOVES:
                    out.append(frozenset(pair) | {b, t})
        return out
    raise ValueError(f"unknown candidate kind {kind!r}")


@dataclass
class SetResult:
    moves: frozenset
    verdict: str
    reason: str
    targets: dict[str, TargetVerdict] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return set_label(self.moves)


@dataclass
class ClassificationReport:
    kind: str
    bounds: Bounds
    results: list[SetResult]

    @property
    def generating(self) -> list[SetResult]:
        return [r for r in self.results if r.verdict == GENERATING]

    def counts(self) -> dict[str, int]:
        out = {GENERATING: 0, NOT_GENERATING: 0, UNDECIDED: 0}
        for r in self.results:
            out[r.verdict] += 1
        return out

    def render(self) -> str:
        lines = [
            "format: tanglemoves-classify/1",
            f"kind: {self.kind}",
            f"bounds: crossings={self.bounds.max_crossings}"
            f" depth={self.bounds.max_depth} states={self.bounds.max_states}",
        ]
        for r in self.results:
            lines.append(f"set {r.label} verdict {r.verdict} reason {r.reason}")
        c = self.counts()
        lines.append(f"generating: {c[GENERATING]}")
        lines.append(f"not-generating: {c[NOT_GENERATING]}")
        lines.append(f"undecided: {c[UNDECIDED]}")
        return "\n".join(lines) + "\n"


_CLASSIFY_MEMO: dict = {}


def classify_set(moves, bounds: Bounds = Bounds()) -> SetResult:
    """Verdict for one candidate set, searching only when unobstructed.

    Deterministic, so results are memoized per (set, bounds) within a
    process; the full-enumeration run reuses the composition run's work.
    """
    key = (frozenset(moves), bounds)
    if key in _CLASSIFY_MEMO:
        return _CLASSIFY_MEMO[key]
    res = _classify_set(moves, bounds)
    _CLASSIFY_MEMO[key] = res
    return res


def _classify_set(moves, bounds: Bounds) -> SetResult:
    report = generates_report(moves, bounds, search_unobstructed_only=True)
    obstructed = [t for t, v in report.items() if v.status == "obstructed"]
    if obstructed:
        qs = ",".join(f"{t}:{report[t].obstruction}" for t in obstructed)
        return SetResult(frozenset(moves), NOT_GENERATING,
                         f"obstructed[{qs}]", report)
    if all(v.status == "certified" for v in report.values()):
        return SetResult(frozenset(moves), GENERATING, "all targets certified",
                         report)
    missing = [t for t, v in report.items() if v.status != "certified"]
    return SetResult(frozenset(moves), UNDECIDED,
                     "unknown[" + ",".join(missing) + "]", report)


def classify_all(kind: str, bounds: Bounds = Bounds()) -> ClassificationReport:
    """Classify every candidate set of the given kind.

    The full 4-subset run prunes sets of the wrong composition first: a
    generating set needs two kink moves and one move of each other type, so
    any other composition cannot generate (the kink-move count bound plus
    one-per-type necessity); those sets are reported not-generating by
    composition without search.
    """
    results = []
    for moves in candidate_sets(kind):
        if kind == "all4" and not composition_ok(moves):
            results.append(SetResult(moves, NOT_GENERATING, "composition"))
            continue
        results.append(classify_set(moves, bounds))
    return ClassificationReport(kind, bounds, results)


# -- trivalent graph results ---------------------------------------------------

GRAPH_REALIZATIONS = (
    ("r4a", ("r4b", "r2a", "r2b", "r2c", "r2d")),
    ("r4b", ("r4a", "r2a", "r2b", "r2c", "r2d")),
    ("r4c", ("r4d", "r2a", "r2b", "r2c", "r2d")),
    ("r4d", ("r4c", "r2a", "r2b", "r2c", "r2d")),
    ("r4e", ("r4f", "r2a", "r2b", "r2c", "r2d")),
    ("r4f", ("r4e", "r2a", "r2b", "r2c", "r2d")),
    ("r4g", ("r4h", "r2a", "r2b", "r2c", "r2d")),
    ("r4h", ("r4g", "r2a", "r2b", "r2c", "r2d")),
    ("r5c", ("r5d", "r1a", "r4f")),
    ("r5d", ("r5c", "r1d", "r4e")),
    ("r5a", ("r5b", "r1b", "r4a")),
    ("r5b", ("r5a", "r1c", "r4b")),
)

VERTEX_SLIDE_PAIRS = (("r4a", "r4b"), ("r4c", "r4d"),
                      ("r4e", "r4f"), ("r4g", "r4h"))
VERTEX_TWIST_PAIRS = (("r5a", "r5b"), ("r5c", "r5d"))


def graph_fixture_suite(bounds: Bounds = Bounds(max_crossings=6, max_depth=5,
                                                max_states=100_000)):
    """Search and replay every vertex-move realization; hard-fails on any miss."""
    out = []
    for target, moves in GRAPH_REALIZATIONS:
        pat = get_move(target)
        res = realize(pat.left, pat.right, frozenset(moves), bounds)
        if res.status != "found":
            raise RuntimeError(f"graph realization {target} from {moves}: {res.status}")
        replay(res.certificate)
        out.append((target, moves, res.certificate))
    return out


def vertex_slide_choices() -> list[tuple[str, str, str, str]]:
    """All ways to pick one slide move per vertex kind and strand level."""
    out = []
    for a in VERTEX_SLIDE_PAIRS[0]:
        for b in VERTEX_SLIDE_PAIRS[1]:
            for c in VERTEX_SLIDE_PAIRS[2]:
                for d in VERTEX_SLIDE_PAIRS[3]:
                    out.append((a, b, c, d))
    return out


def graph_minimal_sets_count(classical_count: Optional[int] = None) -> int:
    """Minimal generating sets for trivalent-graph diagrams.

    Ten-move sets: a classical minimal set, one slide move from each of the
    four slide pairs, and one twist move per vertex kind.
    """
    if classical_count is None:
        classical_count = len(minimal_generating_sets())
    slide = len(vertex_slide_choices())
    twist = len(VERTEX_TWIST_PAIRS[0]) * len(VERTEX_TWIST_PAIRS[1])
    return classical_count * slide * twist
