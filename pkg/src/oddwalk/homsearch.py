"""Homomorphism existence by constraint search, and quotient hunting by
repeated identification of non-adjacent vertices.

The backtracker is exact: NONE is only reported after exhausting the
search space, TIMEOUT whenever the node budget runs out first.  The fold
search is deliberately incomplete (beam search), so its result is an upper
bound on the smallest admissible quotient, never a lower bound.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .closure import GraphHom
from .errors import InputError
from .graph import NO, UNKNOWN, YES, Graph, canon_edge, has_cycle_of_length
from .rng import Stream, derive_seed

FOUND = "FOUND"
NONE = "NONE"
TIMEOUT = "TIMEOUT"


@dataclass
class HomSearchResult:
    status: str
    hom: Optional[GraphHom] = None
    nodes: int = 0
    seconds: float = 0.0


def verify_hom(phi: GraphHom) -> bool:
    """True iff every source edge maps to a target edge."""
    for u, v in phi.source.edges:
        if not phi.target.has_edge(phi.mapping[u], phi.mapping[v]):
            return False
    return True


def hom_exists(g: Graph, h: Graph, node_budget: int = 10**6) -> HomSearchResult:
    """Backtracking search for a homomorphism g -> h.

    Values are tried by descending target degree; the next variable is the
    one with the smallest remaining domain; assigning a vertex prunes its
    neighbors' domains to the image's neighborhood (forward checking).
    """
    start = time.perf_counter()
    if g.n == 0:
        return HomSearchResult(FOUND, GraphHom(g, h, ()), 0, time.perf_counter() - start)
    if h.n == 0:
        return HomSearchResult(NONE, None, 0, time.perf_counter() - start)
    value_order = sorted(range(h.n), key=lambda x: (-h.degree(x), x))
    domains: dict[int, list[int]] = {v: list(value_order) for v in range(g.n)}
    assignment: dict[int, int] = {}
    nodes = 0

    def select() -> int:
        return min(
            (v for v in range(g.n) if v not in assignment),
            key=lambda v: (len(domains[v]), v),
        )

    def search() -> Optional[bool]:
        nonlocal nodes
        if len(assignment) == g.n:
            return True
        v = select()
        for x in list(domains[v]):
            nodes += 1
            if nodes > node_budget:
                return None  # budget exhausted
            assignment[v] = x
            trimmed: list[tuple[int, list[int]]] = []
            ok = True
            for w in g.adj[v]:
                if w in assignment:
                    if not h.has_edge(x, assignment[w]):
                        ok = False
                        break
                    continue
                allowed = [y for y in domains[w] if h.has_edge(x, y)]
                if not allowed:
                    ok = False
                    break
                trimmed.append((w, domains[w]))
                domains[w] = allowed
            if ok:
                result = search()
                if result:
                    return True
                if result is None:
                    return None
            for w, old in trimmed:
                domains[w] = old
            del assignment[v]
        return False

    outcome = search()
    elapsed = time.perf_counter() - start
    if outcome is None:
        return HomSearchResult(TIMEOUT, None, nodes, elapsed)
    if not outcome:
        return HomSearchResult(NONE, None, nodes, elapsed)
    phi = GraphHom(g, h, tuple(assignment[v] for v in range(g.n)))
    assert verify_hom(phi)
    return HomSearchResult(FOUND, phi, nodes, elapsed)


# ---------------------------------------------------------------------------
# fold search


@dataclass
class FoldStep:
    kept: int      # quotient label that absorbed the other vertex
    merged: int    # quotient label removed (labels > merged shift down by 1)
    check_log: dict


@dataclass
class FoldTrace:
    steps: list[FoldStep]
    final_graph: Graph
    mapping: tuple[int, ...]  # original vertex -> final quotient vertex
    checks: list[dict] = field(default_factory=list)

    def describe(self) -> dict:
        return {
            "merges": [[s.kept, s.merged] for s in self.steps],
            "final_vertices": self.final_graph.n,
            "final_edges": [list(e) for e in self.final_graph.edges],
            "check_log": [s.check_log for s in self.steps],
        }


def _merge(g: Graph, keep: int, drop: int) -> Graph:
    """Identify two non-adjacent vertices; labels above `drop` shift down."""
    assert keep != drop and not g.has_edge(keep, drop)

    def relabel(v: int) -> int:
        if v == drop:
            v = keep
        return v - 1 if v > drop else v

    edges = {canon_edge(relabel(u), relabel(v)) for u, v in g.edges}
    return Graph(g.n - 1, edges)


def _cycle_through_vertex_status(g: Graph, w: int, length: int, budget: int):
    """YES/NO/UNKNOWN for a simple cycle of exactly `length` through w."""
    expansions = 0
    path = [w]
    on_path = {w}

    class Budget(Exception):
        pass

    def dfs(u, remaining):
        nonlocal expansions
        expansions += 1
        if expansions > budget:
            raise Budget
        if remaining == 0:
            return w in g.adj[u]
        for x in g.sorted_neighbors(u):
            if x in on_path:
                continue
            path.append(x)
            on_path.add(x)
            if dfs(x, remaining - 1):
                return True
            path.pop()
            on_path.remove(x)
        return False

    try:
        return (YES, expansions) if dfs(w, length - 1) else (NO, expansions)
    except Budget:
        return (UNKNOWN, expansions)


def fold_search(
    g: Graph,
    forbidden_odd_lengths: set[int],
    beam: int = 4,
    budget: int = 10**6,
    seed: int = 0,
    candidate_cap: int = 64,
    input_budget: int = 10**7,
) -> FoldTrace:
    """Beam search for a small quotient avoiding the forbidden cycle lengths.

    A merge of two non-adjacent vertices is admissible when every forbidden
    length gets a clean NO from a budgeted cycle search through the merged
    vertex (UNKNOWN counts as inadmissible, keeping claimed quotients
    honest).  Candidate pairs are ranked by shared neighborhood size, with a
    seeded shuffle breaking ties, and capped per state.
    """
    for length in sorted(forbidden_odd_lengths):
        if length % 2 == 0 or length < 3:
            raise InputError("forbidden lengths must be odd and at least 3")
        check = has_cycle_of_length(g, length, budget=input_budget)
        if check.status == YES:
            raise InputError(f"input already contains a {length}-cycle")
        if check.status == UNKNOWN:
            raise InputError(f"could not certify the input {length}-cycle-free")

    stream = Stream(derive_seed(seed, "fold"))
    spent = 0

    def admissible(candidate: Graph, merged_vertex: int):
        nonlocal spent
        log = {}
        for length in sorted(forbidden_odd_lengths):
            share = max(1000, (budget - spent) // 4)
            status, used = _cycle_through_vertex_status(
                candidate, merged_vertex, length, share
            )
            spent += used
            log[str(length)] = status
            if status != NO:
                return False, log
        return True, log

    # beam state: (graph, mapping original->current, steps)
    initial = (g, tuple(range(g.n)), [])
    level = [initial]
    best = initial
    while level and spent < budget:
        next_level = []
        for graph, mapping, steps in level:
            pairs = [
                (u, v)
                for u in range(graph.n)
                for v in range(u + 1, graph.n)
                if not graph.has_edge(u, v)
            ]
            if not pairs:
                continue
            scored = sorted(
                pairs,
                key=lambda p: (
                    -len(graph.adj[p[0]] & graph.adj[p[1]]),
                    stream.next_u64(),
                ),
            )[:candidate_cap]
            for u, v in scored:
                if spent >= budget:
                    break
                candidate = _merge(graph, u, v)
                ok, log = admissible(candidate, u)
                if not ok:
                    continue
                new_mapping = []
                for orig in mapping:
                    x = u if orig == v else orig
                    new_mapping.append(x - 1 if x > v else x)
                entry = (
                    candidate,
                    tuple(new_mapping),
                    steps + [FoldStep(u, v, log)],
                )
                next_level.append(entry)
        next_level.sort(key=lambda e: (e[0].n, e[0].num_edges()))
        level = next_level[:beam]
        if level and level[0][0].n < best[0].n:
            best = level[0]
    graph, mapping, steps = best
    trace = FoldTrace(steps, graph, mapping)
    phi = GraphHom(g, graph, mapping)
    assert verify_hom(phi)
    return trace
