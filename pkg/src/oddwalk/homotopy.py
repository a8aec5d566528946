"""Walks in a graph and the three local moves that generate walk homotopy:
substitute an interior vertex for another common neighbor of its two
neighbors, insert a there-and-back detour, or delete one.

Two walks are homotopic when a finite move sequence transforms one into the
other.  Deciding this is only semi-decidable, so `are_homotopic` is total at
the price of an UNKNOWN verdict: it separates walks by cheap invariants
(endpoints, parity, the mod-2 closure functionals) and otherwise runs a
capped bidirectional search whose positive answers carry replayable move
sequences.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .closure import EdgeMultiset, GraphHom, InvariantOracle, InvariantSpec
from .errors import InputError, MoveError, ParseError, RefusalError
from .graph import Graph, is_bipartite, is_connected

SUB = "sub"
INS = "ins"
DEL = "del"

HOMOTOPIC = "HOMOTOPIC"
NOT_HOMOTOPIC = "NOT_HOMOTOPIC"
UNKNOWN = "UNKNOWN"


class Walk:
    """Oriented walk: a vertex sequence whose consecutive pairs are edges."""

    __slots__ = ("graph", "vertices")

    def __init__(self, graph: Graph, vertices: Sequence[int]):
        vertices = tuple(vertices)
        if not vertices:
            raise InputError("a walk has at least one vertex")
        for v in vertices:
            if not (0 <= v < graph.n):
                raise InputError(f"vertex {v} out of range")
        for a, b in zip(vertices, vertices[1:]):
            if not graph.has_edge(a, b):
                raise InputError(f"({a}, {b}) is not an edge")
        self.graph = graph
        self.vertices = vertices

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def is_closed(self) -> bool:
        return self.start == self.end

    def parity(self) -> int:
        return self.length % 2

    def is_cycle(self) -> bool:
        return (
            self.is_closed()
            and self.length >= 3
            and len(set(self.vertices[:-1])) == self.length
        )

    def edge_multiset(self) -> EdgeMultiset:
        return EdgeMultiset.from_walk_vertices(self.graph, self.vertices)

    def reversed(self) -> "Walk":
        return Walk(self.graph, self.vertices[::-1])

    def concat(self, other: "Walk") -> "Walk":
        if self.end != other.start:
            raise InputError("concatenation needs matching endpoints")
        return Walk(self.graph, self.vertices + other.vertices[1:])

    def __eq__(self, other):
        return (
            isinstance(other, Walk)
            and self.graph == other.graph
            and self.vertices == other.vertices
        )

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return "Walk(" + ",".join(map(str, self.vertices)) + ")"


def parse_walk(graph: Graph, literal: str) -> Walk:
    """Comma-separated vertex ids, e.g. "0,1,2,0"."""
    try:
        vertices = [int(tok) for tok in literal.split(",") if tok.strip() != ""]
    except ValueError:
        raise ParseError(f"bad walk literal {literal!r}")
    return Walk(graph, vertices)


@dataclass(frozen=True)
class Move:
    kind: str  # sub / ins / del
    index: int
    vertex: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (SUB, INS, DEL):
            raise InputError(f"unknown move kind {self.kind!r}")
        if self.kind in (SUB, INS) and self.vertex is None:
            raise InputError(f"{self.kind} move needs a vertex")

    def format(self) -> str:
        if self.kind == DEL:
            return f"del {self.index}"
        return f"{self.kind} {self.index} {self.vertex}"


def parse_moves(text: str) -> list[Move]:
    """Move log: one move per line, "sub i v" / "ins i w" / "del i"."""
    moves = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == DEL and len(parts) == 2:
                moves.append(Move(DEL, int(parts[1])))
            elif parts[0] in (SUB, INS) and len(parts) == 3:
                moves.append(Move(parts[0], int(parts[1]), int(parts[2])))
            else:
                raise ValueError
        except (ValueError, InputError):
            raise ParseError(f"line {lineno}: bad move {raw!r}")
    return moves


def apply_move(walk: Walk, move: Move) -> Walk:
    """Apply one move, checking its applicability condition.

    sub i v: 0 < i < length, v adjacent to both neighbors of position i.
    ins i w: 0 <= i <= length, w adjacent to the vertex at position i.
    del i:   0 < i < length and the two neighbors of position i coincide.
    """
    g = walk.graph
    vs = walk.vertices
    k = walk.length
    i = move.index
    if move.kind == SUB:
        if not (0 < i < k):
            raise MoveError(f"sub index {i} not interior to a length-{k} walk")
        v = move.vertex
        if v not in g.adj[vs[i - 1]] or v not in g.adj[vs[i + 1]]:
            raise MoveError(
                f"vertex {v} is not a common neighbor of positions {i - 1} and {i + 1}"
            )
        return Walk(g, vs[:i] + (v,) + vs[i + 1 :])
    if move.kind == INS:
        if not (0 <= i <= k):
            raise MoveError(f"ins index {i} outside walk of length {k}")
        w = move.vertex
        if w not in g.adj[vs[i]]:
            raise MoveError(f"vertex {w} is not a neighbor of position {i}")
        return Walk(g, vs[: i + 1] + (w, vs[i]) + vs[i + 1 :])
    # DEL
    if not (0 < i < k):
        raise MoveError(f"del index {i} not interior to a length-{k} walk")
    if vs[i - 1] != vs[i + 1]:
        raise MoveError(f"del needs equal neighbors around position {i}")
    return Walk(g, vs[:i] + vs[i + 2 :])


def replay_moves(walk: Walk, moves: Sequence[Move]) -> Walk:
    """Fold apply_move; errors carry the failing step index."""
    current = walk
    for step, move in enumerate(moves):
        try:
            current = apply_move(current, move)
        except MoveError as exc:
            raise MoveError(f"step {step}: {exc}") from exc
    return current


def inverse_move(before: Walk, move: Move) -> Move:
    """The move undoing `move` as applied to `before`."""
    if move.kind == SUB:
        return Move(SUB, move.index, before.vertices[move.index])
    if move.kind == INS:
        return Move(DEL, move.index + 1)
    return Move(INS, move.index - 1, before.vertices[move.index])


def legal_moves(walk: Walk, length_cap: int):
    """All (move, successor) pairs within the length cap, in sorted order."""
    g = walk.graph
    vs = walk.vertices
    k = walk.length
    out = []
    for i in range(1, k):
        if vs[i - 1] == vs[i + 1]:
            out.append((Move(DEL, i), Walk(g, vs[:i] + vs[i + 2 :])))
        common = g.adj[vs[i - 1]] & g.adj[vs[i + 1]]
        for v in sorted(common):
            if v != vs[i]:
                out.append((Move(SUB, i, v), Walk(g, vs[:i] + (v,) + vs[i + 1 :])))
    if k + 2 <= length_cap:
        for i in range(k + 1):
            for w in g.sorted_neighbors(vs[i]):
                out.append((Move(INS, i, w), Walk(g, vs[: i + 1] + (w, vs[i]) + vs[i + 1 :])))
    return out


@dataclass
class HomotopyVerdict:
    status: str
    moves: Optional[list[Move]] = None  # HOMOTOPIC: replayable witness
    separator: Optional[object] = None  # NOT_HOMOTOPIC: what differs
    states_explored: int = 0

    def describe(self) -> dict:
        out = {"status": self.status, "states_explored": self.states_explored}
        if self.moves is not None:
            out["moves"] = [m.format() for m in self.moves]
        if self.separator is not None:
            sep = self.separator
            out["separator"] = sep.describe() if isinstance(sep, InvariantSpec) else str(sep)
        return out


def are_homotopic(
    g: Graph,
    p: Walk,
    q: Walk,
    length_cap: Optional[int] = None,
    state_cap: int = 10**6,
) -> HomotopyVerdict:
    """Decide walk homotopy within caps.

    Endpoints and parity separate immediately; so do the single-class mod-2
    functionals of the identity homomorphism.  Otherwise a bidirectional
    breadth-first search over move-reachable walks (lengths capped) either
    meets in the middle, yielding a validated move sequence, or gives up
    with UNKNOWN once `state_cap` states have been expanded or both
    reachable sets are exhausted under the length cap.
    """
    if p.graph != g or q.graph != g:
        raise InputError("walks must live in the given graph")
    if length_cap is None:
        length_cap = max(p.length, q.length) + 6
    if (p.start, p.end) != (q.start, q.end):
        return HomotopyVerdict(NOT_HOMOTOPIC, separator="endpoints differ")
    if p.parity() != q.parity():
        return HomotopyVerdict(NOT_HOMOTOPIC, separator="parity differs")
    oracle = InvariantOracle(GraphHom.identity(g))
    spec = oracle.separating_spec(p.edge_multiset(), q.edge_multiset())
    if spec is not None:
        return HomotopyVerdict(NOT_HOMOTOPIC, separator=spec)
    if p.vertices == q.vertices:
        return HomotopyVerdict(HOMOTOPIC, moves=[])

    # bidirectional BFS; parents remember (previous state, move applied)
    sides = [
        {"seen": {p.vertices: None}, "frontier": deque([p.vertices])},
        {"seen": {q.vertices: None}, "frontier": deque([q.vertices])},
    ]
    explored = 0
    meet = None
    while meet is None and (sides[0]["frontier"] or sides[1]["frontier"]):
        if explored >= state_cap:
            return HomotopyVerdict(UNKNOWN, states_explored=explored)
        idx = 0 if len(sides[0]["frontier"]) <= len(sides[1]["frontier"]) else 1
        if not sides[idx]["frontier"]:
            idx = 1 - idx
        side, other = sides[idx], sides[1 - idx]
        for _ in range(len(side["frontier"])):
            state = side["frontier"].popleft()
            explored += 1
            if explored > state_cap:
                return HomotopyVerdict(UNKNOWN, states_explored=explored)
            walk = Walk(g, state)
            for move, succ in legal_moves(walk, length_cap):
                key = succ.vertices
                if key in side["seen"]:
                    continue
                side["seen"][key] = (state, move)
                side["frontier"].append(key)
                if key in other["seen"]:
                    meet = key
                    break
            if meet is not None:
                break
    if meet is None:
        return HomotopyVerdict(UNKNOWN, states_explored=explored)

    forward = _path_moves(g, sides[0]["seen"], meet)
    backward = _path_moves(g, sides[1]["seen"], meet)
    # invert the q-side path to continue from the meeting walk to q
    moves = [move for _, move in forward]
    current = Walk(g, meet)
    for before_vertices, move in reversed(backward):
        before = Walk(g, before_vertices)
        inv = inverse_move(before, move)
        moves.append(inv)
        current = apply_move(current, inv)
    replayed = replay_moves(p, moves)
    assert replayed == q, "witness failed to replay"
    return HomotopyVerdict(HOMOTOPIC, moves=moves, states_explored=explored)


def _path_moves(g: Graph, seen: dict, state):
    """Chain of (state before move, move) from the BFS root to `state`."""
    chain = []
    while seen[state] is not None:
        prev, move = seen[state]
        chain.append((prev, move))
        state = prev
    return chain[::-1]


SIMPLY_CONNECTED = "SIMPLY_CONNECTED"
NOT_SIMPLY_CONNECTED = "NOT"


@dataclass
class SimpleConnectivityVerdict:
    status: str
    detail: Optional[object] = None


def check_simply_connected(g: Graph, budget: int = 10**5) -> SimpleConnectivityVerdict:
    """Semi-decide whether all same-endpoint same-parity walk pairs are homotopic.

    Routes through the neighborhood complex: its fundamental group matches
    the even-walk classes for connected non-bipartite graphs.  A nonzero
    first homology certifies NOT; a presentation simplifying to the empty
    one certifies SIMPLY_CONNECTED; otherwise UNKNOWN.  Bipartite or
    disconnected inputs are refused.
    """
    from . import ncomplex  # deferred: ncomplex imports Walk from this module

    if not is_connected(g):
        raise RefusalError("graph must be connected")
    if is_bipartite(g)[0]:
        raise RefusalError("graph must be non-bipartite")
    complex_ = ncomplex.build_ncomplex(g)
    h1 = ncomplex.h1_homology(complex_)
    if h1.free_rank != 0 or h1.torsion:
        return SimpleConnectivityVerdict(NOT_SIMPLY_CONNECTED, detail=h1)
    basepoint = min(complex_.vertices())
    pres = ncomplex.edge_path_presentation(complex_, basepoint)
    reduced, status = ncomplex.tietze_simplify(pres, budget=budget)
    if status == ncomplex.TRIVIAL:
        return SimpleConnectivityVerdict(SIMPLY_CONNECTED)
    return SimpleConnectivityVerdict(UNKNOWN, detail=status)
