"""The common-neighbor complex of a graph, its first homology, and
edge-path presentations of its fundamental group.

Faces are the vertex sets admitting a common neighbor, so the maximal faces
are the maximal neighborhoods; only the 2-skeleton is ever materialized.
Even closed walks of the graph translate to edge paths of the complex by
keeping every other vertex, and back by inserting smallest common
neighbors; the two translations are mutually inverse on representatives.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InputError, RefusalError
from .graph import Graph, canon_edge
from .homotopy import Walk
from .snf import smith_normal_form

TRIVIAL = "TRIVIAL"
CYCLIC = "CYCLIC"
UNKNOWN_NONTRIVIAL_ABELIANIZATION = "UNKNOWN_NONTRIVIAL_ABELIANIZATION"
UNKNOWN = "UNKNOWN"


class SimplicialComplex:
    """Abstract complex given by its maximal faces; skeleta built on demand."""

    def __init__(self, maximal_faces: Sequence[frozenset[int]]):
        faces = sorted({frozenset(f) for f in maximal_faces if f}, key=lambda f: (len(f), sorted(f)))
        kept = [f for f in faces if not any(f < g for g in faces)]
        self.maximal_faces = tuple(sorted(kept, key=lambda f: sorted(f)))
        self._edges: Optional[tuple] = None
        self._triangles: Optional[tuple] = None

    def vertices(self) -> frozenset[int]:
        out: set[int] = set()
        for f in self.maximal_faces:
            out |= f
        return frozenset(out)

    def edges(self) -> tuple:
        if self._edges is None:
            found = set()
            for f in self.maximal_faces:
                fs = sorted(f)
                for i in range(len(fs)):
                    for j in range(i + 1, len(fs)):
                        found.add((fs[i], fs[j]))
            self._edges = tuple(sorted(found))
        return self._edges

    def triangles(self) -> tuple:
        if self._triangles is None:
            found = set()
            for f in self.maximal_faces:
                fs = sorted(f)
                for i in range(len(fs)):
                    for j in range(i + 1, len(fs)):
                        for k in range(j + 1, len(fs)):
                            found.add((fs[i], fs[j], fs[k]))
            self._triangles = tuple(sorted(found))
        return self._triangles

    def in_common_simplex(self, vertices) -> bool:
        vs = set(vertices)
        return any(vs <= f for f in self.maximal_faces)

    def components(self) -> list["SimplicialComplex"]:
        """Connected pieces (by the 1-skeleton), each as its own complex."""
        verts = sorted(self.vertices())
        adj: dict[int, set[int]] = {v: set() for v in verts}
        for a, b in self.edges():
            adj[a].add(b)
            adj[b].add(a)
        seen: set[int] = set()
        comps = []
        for v in verts:
            if v in seen:
                continue
            comp = {v}
            queue = deque([v])
            seen.add(v)
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.add(w)
                        queue.append(w)
            comps.append(comp)
        return [
            SimplicialComplex([f for f in self.maximal_faces if f <= comp]) for comp in comps
        ]

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def dump(self) -> str:
        return "\n".join(" ".join(map(str, sorted(f))) for f in self.maximal_faces) + "\n"


def build_ncomplex(g: Graph) -> SimplicialComplex:
    """Complex whose faces are the vertex sets with a common neighbor."""
    return SimplicialComplex([frozenset(g.adj[v]) for v in range(g.n) if g.adj[v]])


@dataclass
class H1Descriptor:
    free_rank: int
    torsion: tuple[int, ...]

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def describe(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def h1_homology(k: SimplicialComplex) -> H1Descriptor:
    """First homology over the integers from the 2-skeleton's boundary maps."""
    if not k.is_connected():
        raise RefusalError("complex is disconnected; compute components separately")
    verts = sorted(k.vertices())
    vidx = {v: i for i, v in enumerate(verts)}
    edges = k.edges()
    eidx = {e: i for i, e in enumerate(edges)}
    triangles = k.triangles()
    if not edges:
        return H1Descriptor(0, ())
    d1 = [[0] * len(edges) for _ in verts]
    for j, (a, b) in enumerate(edges):
        d1[vidx[a]][j] = -1
        d1[vidx[b]][j] = 1
    rank_d1 = smith_normal_form(d1).rank
    if triangles:
        d2 = [[0] * len(triangles) for _ in edges]
        for j, (a, b, c) in enumerate(triangles):
            d2[eidx[(b, c)]][j] = 1
            d2[eidx[(a, c)]][j] = -1
            d2[eidx[(a, b)]][j] = 1
        snf2 = smith_normal_form(d2)
        rank_d2 = snf2.rank
        torsion = tuple(d for d in snf2.diagonal if d > 1)
    else:
        rank_d2 = 0
        torsion = ()
    free_rank = len(edges) - rank_d1 - rank_d2
    return H1Descriptor(free_rank, torsion)


@dataclass
class EdgePath:
    """Vertex sequence whose consecutive pairs lie in a common simplex."""

    complex: SimplicialComplex
    vertices: tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise InputError("edge path needs at least one vertex")
        object.__setattr__(self, "vertices", tuple(self.vertices))
        known = self.complex.vertices()
        for v in self.vertices:
            if v not in known:
                raise InputError(f"vertex {v} not in the complex")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if a != b and not self.complex.in_common_simplex((a, b)):
                raise InputError(f"({a}, {b}) spans no simplex")

    def is_closed(self) -> bool:
        return self.vertices[0] == self.vertices[-1]


@dataclass
class GroupPresentation:
    """Relators are words over signed 1-based generator indices."""

    num_generators: int
    relators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for word in self.relators:
            for sym in word:
                if sym == 0 or abs(sym) > self.num_generators:
                    raise InputError(f"symbol {sym} references no generator")

    def dump(self) -> str:
        lines = [f"gens {self.num_generators}"]
        lines.extend(" ".join(map(str, word)) for word in self.relators)
        return "\n".join(lines) + "\n"


def edge_path_presentation(k: SimplicialComplex, v0: int) -> GroupPresentation:
    """Presentation of the complex's loop classes at v0.

    Generators: edges outside a breadth-first spanning tree of the
    1-skeleton.  Relators: the boundary word of every triangle, with tree
    edges contributing nothing.
    """
    verts = sorted(k.vertices())
    if v0 not in k.vertices():
        raise InputError(f"basepoint {v0} not in the complex")
    if not k.is_connected():
        raise RefusalError("complex is disconnected")
    adj: dict[int, set[int]] = {v: set() for v in verts}
    for a, b in k.edges():
        adj[a].add(b)
        adj[b].add(a)
    tree: set[tuple[int, int]] = set()
    seen = {v0}
    queue = deque([v0])
    while queue:
        u = queue.popleft()
        for w in sorted(adj[u]):
            if w not in seen:
                seen.add(w)
                tree.add(canon_edge(u, w))
                queue.append(w)
    gens = [e for e in k.edges() if e not in tree]
    gen_index = {e: i + 1 for i, e in enumerate(gens)}  # 1-based

    def directed_symbol(a: int, b: int) -> Optional[int]:
        e = canon_edge(a, b)
        if e in tree:
            return None
        idx = gen_index[e]
        return idx if (a, b) == e else -idx

    relators = []
    for a, b, c in k.triangles():
        word = []
        for x, y in ((a, b), (b, c), (c, a)):
            sym = directed_symbol(x, y)
            if sym is not None:
                word.append(sym)
        word = _free_reduce(tuple(word))
        if word:
            relators.append(word)
    return GroupPresentation(len(gens), tuple(relators))


def _free_reduce(word: tuple[int, ...]) -> tuple[int, ...]:
    out: list[int] = []
    for sym in word:
        if out and out[-1] == -sym:
            out.pop()
        else:
            out.append(sym)
    return tuple(out)


def _cyclic_reduce(word: tuple[int, ...]) -> tuple[int, ...]:
    word = _free_reduce(word)
    while len(word) >= 2 and word[0] == -word[-1]:
        word = _free_reduce(word[1:-1])
    return word


def tietze_simplify(
    p: GroupPresentation, budget: int = 10**5
) -> tuple[GroupPresentation, str]:
    """Deterministic simplification loop with an honest give-up.

    Priority per pass: free/cyclic reduction, drop empty and duplicate
    relators, eliminate a generator via a length-1 relator, substitute via a
    length-2 relator, then rewrite with short relators as cyclic subwords.
    Status TRIVIAL means the empty presentation was reached; CYCLIC means at
    most one generator survives with power relators; otherwise the
    abelianization (by integer SNF) distinguishes a certified-nontrivial
    UNKNOWN from a plain one.
    """
    gens = list(range(1, p.num_generators + 1))
    relators = [_cyclic_reduce(w) for w in p.relators]
    steps = 0

    def substitute(words, target, replacement):
        # replace every occurrence of generator `target` (1-based) by the word
        out = []
        for w in words:
            if all(abs(s) != target for s in w):
                out.append(w)
                continue
            new: list[int] = []
            for s in w:
                if s == target:
                    new.extend(replacement)
                elif s == -target:
                    new.extend(-x for x in reversed(replacement))
                else:
                    new.append(s)
            out.append(_cyclic_reduce(tuple(new)))
        return out

    changed = True
    while changed and steps < budget:
        changed = False
        relators = [w for w in (_cyclic_reduce(w) for w in relators) if w]
        relators = sorted(set(relators), key=lambda w: (len(w), w))
        # length-1: the generator is trivial
        length1 = next((w for w in relators if len(w) == 1), None)
        if length1 is not None:
            target = abs(length1[0])
            relators = substitute(relators, target, ())
            gens.remove(target)
            steps += 1
            changed = True
            continue
        # length-2 with distinct generators: one substitutes for the other
        length2 = next(
            (w for w in relators if len(w) == 2 and abs(w[0]) != abs(w[1])), None
        )
        if length2 is not None:
            a, b = length2
            # relator a b = 1 so gen |b| = (sign) a^{-1}
            target = abs(b)
            repl = (-a,) if b > 0 else (a,)
            relators = substitute(relators, target, repl)
            gens.remove(target)
            steps += 1
            changed = True
            continue
        # rewriting: shorten a relator using a strictly shorter one
        rewritten = False
        for short in relators:
            if rewritten:
                break
            variants = set()
            doubled = short + short
            for i in range(len(short)):
                rot = doubled[i : i + len(short)]
                variants.add(rot)
                variants.add(tuple(-s for s in reversed(rot)))
            span = len(short) // 2 + 1
            for idx, w in enumerate(relators):
                if len(w) <= len(short) or rewritten:
                    continue
                for var in variants:
                    head, tail = var[:span], var[span:]
                    for pos in range(len(w) - span + 1):
                        if tuple(w[pos : pos + span]) == head:
                            # w = x head y; head = tail^{-1} modulo the relator
                            replacement = tuple(-s for s in reversed(tail))
                            new = w[:pos] + replacement + w[pos + span :]
                            new = _cyclic_reduce(new)
                            if len(new) < len(w):
                                relators[idx] = new
                                rewritten = True
                                steps += 1
                                break
                    if rewritten:
                        break
        if rewritten:
            changed = True

    relators = [w for w in (_cyclic_reduce(w) for w in relators) if w]
    relators = sorted(set(relators), key=lambda w: (len(w), w))
    # compact generators
    remap = {old: i + 1 for i, old in enumerate(sorted(gens))}
    compact = tuple(
        tuple((1 if s > 0 else -1) * remap[abs(s)] for s in w) for w in relators
    )
    reduced = GroupPresentation(len(gens), compact)
    if not gens:
        return reduced, TRIVIAL
    if len(gens) == 1:
        return reduced, CYCLIC
    abelian = _abelianization(reduced)
    if abelian.free_rank > 0 or abelian.torsion:
        return reduced, UNKNOWN_NONTRIVIAL_ABELIANIZATION
    return reduced, UNKNOWN


def _abelianization(p: GroupPresentation) -> H1Descriptor:
    if p.num_generators == 0:
        return H1Descriptor(0, ())
    if not p.relators:
        return H1Descriptor(p.num_generators, ())
    matrix = []
    for w in p.relators:
        row = [0] * p.num_generators
        for s in w:
            row[abs(s) - 1] += 1 if s > 0 else -1
        matrix.append(row)
    snf = smith_normal_form(matrix)
    torsion = tuple(d for d in snf.diagonal if d > 1)
    return H1Descriptor(p.num_generators - snf.rank, torsion)


def presentation_abelianization(p: GroupPresentation) -> H1Descriptor:
    return _abelianization(p)


# ---------------------------------------------------------------------------
# walk <-> edge path translation


def walk_to_edgepath(p: Walk) -> EdgePath:
    """Even-index subsequence of an even closed walk, as an edge path.

    Consecutive kept vertices share the dropped intermediate neighbor, so
    the pair always spans a simplex of the neighbor complex.
    """
    if not p.is_closed() or p.parity() != 0:
        raise InputError("translation needs a closed walk of even length")
    complex_ = build_ncomplex(p.graph)
    kept = p.vertices[0:-1:2] + (p.vertices[-1],) if p.length else p.vertices
    return EdgePath(complex_, kept)


def edgepath_to_walk(q: EdgePath, g: Graph) -> Walk:
    """Interleave each consecutive pair with its smallest common neighbor."""
    vs = q.vertices
    out = [vs[0]]
    for a, b in zip(vs, vs[1:]):
        common = sorted(g.adj[a] & g.adj[b])
        if not common:
            raise InputError(f"({a}, {b}) has no common neighbor in the graph")
        out.extend([common[0], b])
    return Walk(g, out)


# ---------------------------------------------------------------------------
# edge-path equivalence moves (bounded search)


def _edgepath_moves(k: SimplicialComplex, vs: tuple[int, ...], length_cap: int):
    out = []
    n = len(vs)
    # drop a repeat: v v -> v
    for i in range(n - 1):
        if vs[i] == vs[i + 1]:
            out.append(vs[: i + 1] + vs[i + 2 :])
    # contract a simplex triple: a b c -> a c when {a,b,c} spans a simplex
    for i in range(1, n - 2):
        if k.in_common_simplex((vs[i], vs[i + 1], vs[i + 2])):
            out.append(vs[: i + 1] + vs[i + 2 :])
    if n + 1 <= length_cap:
        # duplicate a vertex: v -> v v
        for i in range(n):
            out.append(vs[: i + 1] + vs[i:])
        # insert inside a simplex: a c -> a b c
        for i in range(n - 1):
            a, c = vs[i], vs[i + 1]
            for face in k.maximal_faces:
                if a in face and c in face:
                    for b in sorted(face):
                        out.append(vs[: i + 1] + (b,) + vs[i + 1 :])
    return out


def equivalent_edge_paths(
    k: SimplicialComplex,
    q1: EdgePath,
    q2: EdgePath,
    length_cap: Optional[int] = None,
    state_cap: int = 10**5,
) -> str:
    """Bounded bidirectional search over the four edge-path moves.

    Returns HOMOTOPIC or UNKNOWN (the moves cannot certify inequivalence).
    """
    from .homotopy import HOMOTOPIC, UNKNOWN as HUNKNOWN

    if q1.vertices == q2.vertices:
        return HOMOTOPIC
    if length_cap is None:
        length_cap = max(len(q1.vertices), len(q2.vertices)) + 4
    sides = [
        {"seen": {q1.vertices}, "frontier": deque([q1.vertices])},
        {"seen": {q2.vertices}, "frontier": deque([q2.vertices])},
    ]
    explored = 0
    while sides[0]["frontier"] or sides[1]["frontier"]:
        idx = 0 if len(sides[0]["frontier"]) <= len(sides[1]["frontier"]) else 1
        if not sides[idx]["frontier"]:
            idx = 1 - idx
        side, other = sides[idx], sides[1 - idx]
        for _ in range(len(side["frontier"])):
            state = side["frontier"].popleft()
            explored += 1
            if explored > state_cap:
                return HUNKNOWN
            for succ in _edgepath_moves(k, state, length_cap):
                if succ in side["seen"]:
                    continue
                side["seen"].add(succ)
                side["frontier"].append(succ)
                if succ in other["seen"]:
                    return HOMOTOPIC
    return HUNKNOWN
