"""Edge equivalence under shared 4-cycles, its pullback along graph
homomorphisms, and the mod-2 intersection functionals built on top.

The 4-cycle relation on edges of a target graph H is generated by "lie on a
common 4-cycle".  A homomorphism phi: G -> H pulls each target class back to
an edge set of G; the connected pieces of those pullbacks partition E(G).
Unions of pieces are the "stable" sets: counting a walk's edges inside a
stable set mod 2 (optionally restricted to edges touching one target
vertex's fiber) is invariant under walk moves, which is what makes these
functionals useful as separators and as the engine of the pivot-edge search.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import HypothesisError, InputError, ParseError, ViolationError
from .graph import Graph, canon_edge, is_bipartite

C4_IN_TARGET = "C4_IN_TARGET"
PHI_IN_SOURCE = "PHI_IN_SOURCE"


@dataclass(frozen=True)
class GraphHom:
    """Vertex map source -> target sending edges to edges."""

    source: Graph
    target: Graph
    mapping: tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.source.n:
            raise InputError("homomorphism must map every source vertex")
        for x in self.mapping:
            if not (0 <= x < self.target.n):
                raise InputError(f"image vertex {x} out of range")
        for u, v in self.source.edges:
            if not self.target.has_edge(self.mapping[u], self.mapping[v]):
                raise InputError(
                    f"edge ({u}, {v}) maps to non-edge ({self.mapping[u]}, {self.mapping[v]})"
                )

    @classmethod
    def identity(cls, g: Graph) -> "GraphHom":
        return cls(g, g, tuple(range(g.n)))

    def apply(self, v: int) -> int:
        return self.mapping[v]

    def edge_image(self, e: tuple[int, int]) -> tuple[int, int]:
        return canon_edge(self.mapping[e[0]], self.mapping[e[1]])

    def fiber(self, u: int) -> frozenset[int]:
        return frozenset(v for v in range(self.source.n) if self.mapping[v] == u)


def parse_hom(text: str, source: Graph, target: Graph) -> GraphHom:
    """Parse "u -> x" lines into a validated homomorphism."""
    mapping: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace("->", " ").split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u -> x', got {raw!r}")
        try:
            u, x = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer id in {raw!r}")
        if u in mapping:
            raise ParseError(f"line {lineno}: duplicate entry for vertex {u}")
        mapping[u] = x
    missing = [v for v in range(source.n) if v not in mapping]
    if missing:
        raise ParseError(f"missing image for vertices {missing}")
    return GraphHom(source, target, tuple(mapping[v] for v in range(source.n)))


def serialize_hom(phi: GraphHom) -> str:
    return "\n".join(f"{u} -> {phi.mapping[u]}" for u in range(phi.source.n)) + "\n"


@dataclass
class EdgeMultiset:
    """Multiset of edges of one graph, keys canonical, multiplicities >= 1."""

    counts: Counter
    owner: Graph

    def __post_init__(self):
        for e, m in self.counts.items():
            if m <= 0:
                raise InputError(f"multiplicity of {e} must be positive")
            if not self.owner.has_edge(*e):
                raise InputError(f"{e} is not an edge of the owner graph")

    @classmethod
    def from_edges(cls, owner: Graph, edges: Iterable[tuple[int, int]]) -> "EdgeMultiset":
        return cls(Counter(canon_edge(*e) for e in edges), owner)

    @classmethod
    def from_walk_vertices(cls, owner: Graph, vertices) -> "EdgeMultiset":
        return cls.from_edges(owner, zip(vertices, vertices[1:]))

    def size(self) -> int:
        return sum(self.counts.values())

    def __add__(self, other: "EdgeMultiset") -> "EdgeMultiset":
        if other.owner is not self.owner and other.owner != self.owner:
            raise InputError("cannot add multisets over different graphs")
        return EdgeMultiset(self.counts + other.counts, self.owner)

    def restricted_size(self, edge_set) -> int:
        return sum(m for e, m in self.counts.items() if e in edge_set)

    def support(self) -> frozenset:
        return frozenset(self.counts)

    def without_edges(self, edge_set) -> "EdgeMultiset":
        return EdgeMultiset(
            Counter({e: m for e, m in self.counts.items() if e not in edge_set}), self.owner
        )


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic: smaller canonical key wins as representative
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class ClosurePartition:
    """Partition of a graph's edges, either by the 4-cycle relation in the
    graph itself (C4_IN_TARGET) or by pulling target classes back along a
    homomorphism and splitting into connected pieces (PHI_IN_SOURCE)."""

    kind: str
    owner: Graph
    class_of: dict
    classes: tuple[frozenset, ...]

    def class_id(self, e: tuple[int, int]) -> int:
        return self.class_of[canon_edge(*e)]

    def class_edges(self, e: tuple[int, int]) -> frozenset:
        return self.classes[self.class_id(e)]

    def is_stable(self, edge_set: frozenset) -> bool:
        """True iff the set is a union of whole classes."""
        return all(self.classes[self.class_of[e]] <= edge_set for e in edge_set)

    def dump(self) -> str:
        lines = []
        for cid, edges in enumerate(self.classes):
            body = " ".join(f"{u}-{v}" for u, v in sorted(edges))
            lines.append(f"class {cid}: {body}")
        return "\n".join(lines) + "\n"


def _finish_partition(kind: str, owner: Graph, uf: _UnionFind, keys) -> ClosurePartition:
    groups: dict = {}
    for e in keys:
        groups.setdefault(uf.find(e), []).append(e)
    ordered = sorted(groups.values(), key=lambda es: min(es))
    class_of = {}
    classes = []
    for cid, es in enumerate(ordered):
        classes.append(frozenset(es))
        for e in es:
            class_of[e] = cid
    return ClosurePartition(kind, owner, class_of, tuple(classes))


def c4_partition(h: Graph) -> ClosurePartition:
    """Edge classes generated by co-membership in a 4-cycle.

    For each vertex pair {u, w} with at least two common neighbors, every
    edge from u or w into the common neighborhood lies on a shared 4-cycle,
    so the whole bundle collapses into one class.  This generates exactly
    the same equivalence as enumerating 4-cycles, in near-linear time.
    """
    uf = _UnionFind(h.edges)
    for u in range(h.n):
        for w in range(u + 1, h.n):
            common = h.adj[u] & h.adj[w]
            if len(common) < 2:
                continue
            bundle = [canon_edge(u, x) for x in common] + [canon_edge(w, x) for x in common]
            first = bundle[0]
            for e in bundle[1:]:
                uf.union(first, e)
    return _finish_partition(C4_IN_TARGET, h, uf, h.edges)


def phi_partition(phi: GraphHom) -> ClosurePartition:
    """Connected pieces of the preimages of the target's 4-cycle classes."""
    target_classes = c4_partition(phi.target)
    uf = _UnionFind(phi.source.edges)
    # group source edges by target class, then merge along shared vertices
    by_class: dict[int, list] = {}
    for e in phi.source.edges:
        by_class.setdefault(target_classes.class_id(phi.edge_image(e)), []).append(e)
    for edges in by_class.values():
        incident: dict[int, tuple[int, int]] = {}
        for e in edges:
            for v in e:
                if v in incident:
                    uf.union(incident[v], e)
                else:
                    incident[v] = e
    return _finish_partition(PHI_IN_SOURCE, phi.source, uf, phi.source.edges)


@dataclass(frozen=True)
class InvariantSpec:
    """A stable edge set plus an optional anchor vertex of the target.

    Evaluation counts a multiset's edges inside the stable set mod 2; with an
    anchor u, only edges with an endpoint mapping to u are counted.
    """

    stable_set: frozenset
    anchor: Optional[int] = None

    def describe(self) -> dict:
        return {
            "stable_set": sorted(list(e) for e in self.stable_set),
            "anchor": self.anchor,
        }


def eval_invariant(spec: InvariantSpec, f: EdgeMultiset, phi: GraphHom) -> int:
    """Parity of |f ∩ A| (or |f ∩ A_u| with an anchor).  Requires A stable."""
    partition = phi_partition(phi)
    if not partition.is_stable(spec.stable_set):
        raise InputError("stable_set is not a union of closure classes")
    return _eval_raw(spec, f, phi)


def _eval_raw(spec: InvariantSpec, f: EdgeMultiset, phi: GraphHom) -> int:
    if spec.anchor is None:
        total = sum(m for e, m in f.counts.items() if e in spec.stable_set)
    else:
        u = spec.anchor
        total = sum(
            m
            for e, m in f.counts.items()
            if e in spec.stable_set and (phi.mapping[e[0]] == u or phi.mapping[e[1]] == u)
        )
    return total % 2


class InvariantOracle:
    """Precomputed evaluator for all single-class invariants of one hom.

    Exposes the class parities and anchored parities of a multiset in one
    pass; used by the homotopy search and the fuzz suites where calling
    eval_invariant per class would recompute the partition every time.
    """

    def __init__(self, phi: GraphHom):
        self.phi = phi
        self.partition = phi_partition(phi)

    def profile(self, f: EdgeMultiset) -> tuple:
        """(class parities, anchored parities) of f, as nested tuples."""
        k = len(self.partition.classes)
        plain = [0] * k
        anchored: Counter = Counter()
        for e, m in f.counts.items():
            cid = self.partition.class_of[e]
            plain[cid] ^= m & 1
            if m & 1:
                for u in {self.phi.mapping[e[0]], self.phi.mapping[e[1]]}:
                    anchored[(cid, u)] ^= 1
        anchored_items = tuple(sorted(k_ for k_, v in anchored.items() if v))
        return tuple(plain), anchored_items

    def separating_spec(self, f1: EdgeMultiset, f2: EdgeMultiset) -> Optional[InvariantSpec]:
        """An invariant valuing f1 and f2 differently, if one exists."""
        p1, a1 = self.profile(f1)
        p2, a2 = self.profile(f2)
        for cid, (x, y) in enumerate(zip(p1, p2)):
            if x != y:
                return InvariantSpec(self.partition.classes[cid], None)
        diff = set(a1) ^ set(a2)
        if diff:
            cid, u = min(diff)
            return InvariantSpec(self.partition.classes[cid], u)
        return None


# ---------------------------------------------------------------------------
# pivot-edge search


def _eulerian_tour(adjacency: dict[int, Counter], start: int) -> list[int]:
    """Hierholzer tour consuming the multigraph; smallest neighbor first."""
    stack = [start]
    tour: list[int] = []
    while stack:
        u = stack[-1]
        nbrs = adjacency[u]
        w = None
        for cand in sorted(nbrs):
            if nbrs[cand] > 0:
                w = cand
                break
        if w is None:
            tour.append(stack.pop())
        else:
            nbrs[w] -= 1
            adjacency[w][u] -= 1
            stack.append(w)
    return tour[::-1]


def _extract_odd_cycle(walk: list[int]) -> list[int]:
    """Odd cycle inside an odd closed walk, by splitting at the first repeat."""
    assert walk[0] == walk[-1] and (len(walk) - 1) % 2 == 1
    inner = walk[:-1]
    seen: dict[int, int] = {}
    for i, v in enumerate(inner):
        if v in seen:
            j = seen[v]
            piece1 = walk[j : i + 1]          # closed at v
            piece2 = inner[:j] + inner[i:] + [walk[0]]  # the rest, still closed
            if (len(piece1) - 1) % 2 == 1:
                return _extract_odd_cycle(piece1)
            return _extract_odd_cycle(piece2)
        seen[v] = i
    return walk


def find_pivot_edge(
    phi: GraphHom, f: EdgeMultiset
) -> tuple[tuple[int, int], InvariantSpec, list[int]]:
    """Locate an edge whose closure class carries odd intersection with f.

    Requires |f| odd and every target vertex to meet f's image evenly (both
    checked).  The image of f then decomposes into closed walks; an odd one
    yields an odd cycle in the target, one of whose edges lifts into f.  If
    no invariant of that edge's class is odd on f, the class is discarded
    from f and the search recurses on the strictly smaller remainder.

    Returns (edge, spec, odd cycle in the target as a closed vertex list)
    with eval(spec, f) = 1 and the cycle inside the support of phi(f).
    """
    if f.size() % 2 != 1:
        raise HypothesisError(
            "whole-edge-set invariant of f is 0, expected 1 (|f| must be odd)",
            certificate={"size": f.size()},
        )
    oracle = InvariantOracle(phi)
    # anchored invariants over the full edge set must all vanish
    image_degree: Counter = Counter()
    for e, m in f.counts.items():
        image_degree[phi.mapping[e[0]]] += m
        image_degree[phi.mapping[e[1]]] += m
    odd_vertices = [u for u, d in image_degree.items() if d % 2 == 1]
    if odd_vertices:
        raise HypothesisError(
            f"anchored invariant at target vertex {odd_vertices[0]} is 1, expected 0",
            certificate={"odd_anchors": sorted(odd_vertices)},
        )
    return _pivot_search(phi, f, f, oracle)


def _pivot_search(phi, f_original, f, oracle):
    if f.size() == 0:
        # cannot happen when the hypotheses hold: parity is preserved downward
        raise ViolationError("pivot recursion exhausted the multiset", witness=f_original)
    # multigraph on the target with edge multiset phi(f)
    adjacency: dict[int, Counter] = {}
    for e, m in f.counts.items():
        a, b = phi.edge_image(e)
        adjacency.setdefault(a, Counter())[b] += m
        adjacency.setdefault(b, Counter())[a] += m
    odd_cycle = None
    for start in sorted(adjacency):
        if sum(adjacency[start].values()) == 0:
            continue
        tour = _eulerian_tour(adjacency, start)
        if (len(tour) - 1) % 2 == 1:
            odd_cycle = _extract_odd_cycle(tour)
            break
    if odd_cycle is None:
        raise ViolationError("no odd closed walk in the image multigraph", witness=f)
    cycle_edges = sorted(canon_edge(a, b) for a, b in zip(odd_cycle, odd_cycle[1:]))
    # lift: smallest source edge in f mapping onto an edge of the cycle
    target_edge = None
    lifted = None
    for e in sorted(f.counts):
        img = phi.edge_image(e)
        if img in cycle_edges:
            lifted = e
            target_edge = img
            break
    assert lifted is not None, "odd cycle must be inside the image of f"
    cls = oracle.partition.class_edges(lifted)
    plain, anchored = oracle.profile(f)
    cid = oracle.partition.class_id(lifted)
    if plain[cid] == 1:
        spec = InvariantSpec(cls, None)
        return lifted, spec, odd_cycle
    anchored_hits = [u for (c, u) in anchored if c == cid]
    if anchored_hits:
        spec = InvariantSpec(cls, min(anchored_hits))
        return lifted, spec, odd_cycle
    return _pivot_search(phi, f_original, f.without_edges(cls), oracle)


def verify_bipartite_complement(phi: GraphHom, spec: InvariantSpec, cycle_vertices) -> bool:
    """Check that the source minus the stable set is bipartite.

    `cycle_vertices` must be an odd cycle of the source on which the given
    invariant evaluates to 1; with a simply connected source this
    bipartiteness is guaranteed, so the check doubles as a validation
    harness.
    """
    g = phi.source
    if cycle_vertices[0] != cycle_vertices[-1] or (len(cycle_vertices) - 1) % 2 != 1:
        raise InputError("witness walk must be an odd closed walk")
    f = EdgeMultiset.from_walk_vertices(g, cycle_vertices)
    if eval_invariant(spec, f, phi) != 1:
        raise InputError("spec does not evaluate to 1 on the witness cycle")
    complement = [e for e in g.edges if e not in spec.stable_set]
    return is_bipartite(g.subgraph_on_edges(complement))[0]
