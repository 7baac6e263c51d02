"""tanglemoves: rewriting engine for oriented tangle diagrams.

Implements oriented Reidemeister-type moves on knot and spatial trivalent
graph tangle diagrams, circle-count invariants of oriented smoothing,
bounded certificate search, and the classification of minimal generating
move sets.
"""

from .diagram import (
    IN, OUT, OVER, UNDER, CROSSING, SINK, SOURCE,
    Arc, BoundaryEnd, BoundaryPoint, CanonicalCode, DiagramError,
    Node, NodePort, Port, TangleDiagram, UnsupportedDiagramError,
    crossing_sign, faces, same_tangle, validate,
)
from .textio import ParseError, parse_tangle, serialize_tangle

__all__ = [
    "IN", "OUT", "OVER", "UNDER", "CROSSING", "SINK", "SOURCE",
    "Arc", "BoundaryEnd", "BoundaryPoint", "CanonicalCode", "DiagramError",
    "Node", "NodePort", "Port", "TangleDiagram", "UnsupportedDiagramError",
    "crossing_sign", "faces", "same_tangle", "validate",
    "ParseError", "parse_tangle", "serialize_tangle",
]

__version__ = "0.1.0"
