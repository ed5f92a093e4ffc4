"""Edge folds on labeled graphs: wedge construction, fold sequences,
extraction of the last pre-rose-lift stage with its small witness
subgraph, and arc-replacement surgery.

A fold identifies two distinct oriented edges that leave one vertex with
the same letter.  The engine below runs on a union-find structure so a
full fold sequence costs near-linear time; traces record one (kept,
removed) oriented-edge pair per fold, which is enough to replay any
intermediate stage or push a path forward through the sequence.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .graphs import (
    Arc,
    EdgePath,
    LabeledGraph,
    arc_endpoints,
    arc_interior,
    is_connected,
    is_rose,
    maximal_arcs,
)
from .words import GenTuple, Word, letter_key

POLICIES = ("least", "greatest", "defer_rose")


def wedge_of_loops(t: GenTuple) -> LabeledGraph:
    """Based wedge whose i-th petal reads the i-th tuple entry.

    Identity entries contribute no petal; they are stabilization filler
    and a degenerate loop would leave the graph unreduced.
    """
    edges: list[tuple[int, int, int]] = []
    next_vertex = 1
    for word in t.entries:
        letters = word.letters
        if not letters:
            continue
        prev = 0
        for i, letter in enumerate(letters):
            last = i == len(letters) - 1
            target = 0 if last else next_vertex
            if not last:
                next_vertex += 1
            edges.append((prev, target, letter))
            prev = target
    return LabeledGraph(t.rank, next_vertex, tuple(edges), base=0)


def petal_paths(t: GenTuple, wedge: LabeledGraph) -> list[EdgePath]:
    """The petal loops of ``wedge_of_loops(t)`` as based paths, in tuple
    order (identity entries yield length-0 paths)."""
    paths = []
    eid = 0
    for word in t.entries:
        if not word.letters:
            paths.append(EdgePath(wedge, (), 0))
            continue
        tokens = tuple(range(eid + 1, eid + 1 + len(word.letters)))
        eid += len(word.letters)
        paths.append(EdgePath(wedge, tokens, 0))
    return paths


@dataclass(frozen=True)
class FoldRecord:
    """One fold: ``kept`` and ``removed`` are oriented tokens (original
    edge ids) leaving the fold vertex with the same letter."""

    kept: int
    removed: int


class _Engine:
    """Mutable fold state over the original edge set."""

    def __init__(self, graph: LabeledGraph):
        self.graph = graph
        self.parent = list(range(graph.num_vertices))
        self.cls_min = list(range(graph.num_vertices))
        self.size = [1] * graph.num_vertices
        self.alive = [True] * graph.num_edges
        self.adj: list[dict[int, set[int]]] = [dict() for _ in range(graph.num_vertices)]
        for k, (src, dst, label) in enumerate(graph.edges):
            self.adj[src].setdefault(label, set()).add(k + 1)
            self.adj[dst].setdefault(-label, set()).add(-(k + 1))

    def clone(self) -> "_Engine":
        other = _Engine.__new__(_Engine)
        other.graph = self.graph
        other.parent = list(self.parent)
        other.cls_min = list(self.cls_min)
        other.size = list(self.size)
        other.alive = list(self.alive)
        other.adj = [
            {letter: set(toks) for letter, toks in bucket.items()} for bucket in self.adj
        ]
        return other

    def find(self, v: int) -> int:
        parent = self.parent
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def head(self, token: int) -> int:
        return self.find(self.graph.omega(token))

    def roots(self) -> list[int]:
        return [v for v in range(self.graph.num_vertices) if self.find(v) == v]

    def has_rose_lift(self) -> bool:
        rank = self.graph.rank
        for root in self.roots():
            gens = set()
            for letter, toks in self.adj[root].items():
                if letter < 0:
                    continue
                if any(self.head(tok) == root for tok in toks):
                    gens.add(letter)
            if len(gens) == rank:
                return True
        return False

    def remove_edge(self, eid: int) -> None:
        src, dst, label = self.graph.edges[eid - 1]
        rs, rd = self.find(src), self.find(dst)
        bucket = self.adj[rs].get(label)
        if bucket is not None:
            bucket.discard(eid)
            if not bucket:
                del self.adj[rs][label]
        bucket = self.adj[rd].get(-label)
        if bucket is not None:
            bucket.discard(-eid)
            if not bucket:
                del self.adj[rd][-label]
        self.alive[eid - 1] = False

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        for letter, toks in self.adj[rb].items():
            self.adj[ra].setdefault(letter, set()).update(toks)
        self.adj[rb] = {}
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.cls_min[ra] = min(self.cls_min[ra], self.cls_min[rb])
        return ra

    def foldable_letters(self, root: int) -> list[int]:
        return [letter for letter, toks in self.adj[root].items() if len(toks) >= 2]

    def fold_at(self, root: int, letter: int) -> FoldRecord:
        toks = sorted(self.adj[root][letter])
        t1, t2 = toks[0], toks[1]
        record = FoldRecord(kept=t1, removed=t2)
        h1, h2 = self.head(t1), self.head(t2)
        self.remove_edge(abs(t2))
        if h1 != h2:
            self.union(h1, h2)
        return record

    def apply_record(self, record: FoldRecord) -> None:
        h1 = self.head(record.kept)
        h2 = self.head(record.removed)
        self.remove_edge(abs(record.removed))
        if h1 != h2:
            self.union(h1, h2)

    def materialize(self) -> tuple[LabeledGraph, dict[int, int], dict[int, int]]:
        """Current graph plus vertex map (original -> new) and edge map
        (original topological id -> new topological id)."""
        g = self.graph
        roots = sorted(
            {self.find(v) for v in range(g.num_vertices)},
            key=lambda r: self.cls_min[r],
        )
        vmap_root = {r: i for i, r in enumerate(roots)}
        vmap = {v: vmap_root[self.find(v)] for v in range(g.num_vertices)}
        edges = []
        emap: dict[int, int] = {}
        for k, (src, dst, label) in enumerate(g.edges):
            if not self.alive[k]:
                continue
            emap[k] = len(edges)
            edges.append((vmap[src], vmap[dst], label))
        base = vmap[g.base] if g.base is not None else None
        return LabeledGraph(g.rank, len(roots), tuple(edges), base), vmap, emap


@dataclass(frozen=True)
class Stage:
    """A materialized fold stage, with maps from the initial graph."""

    graph: LabeledGraph
    vertex_map: dict[int, int]
    edge_map: dict[int, int]


@dataclass(frozen=True)
class FoldTrace:
    """A fold sequence from ``initial`` to the folded ``terminal``.

    Stages are replayed on demand from the records rather than stored;
    stage(0) is the initial graph and stage(len(records)) the terminal.
    ``first_lift_stage`` is the first stage containing a rose lift (only
    tracked under the defer_rose policy).
    """

    initial: LabeledGraph
    records: tuple[FoldRecord, ...]
    terminal: LabeledGraph
    policy: str
    first_lift_stage: int | None = None

    @property
    def num_folds(self) -> int:
        return len(self.records)

    @property
    def num_stages(self) -> int:
        return len(self.records) + 1

    @property
    def delta_index(self) -> int | None:
        if self.first_lift_stage is None or self.first_lift_stage == 0:
            return None
        return self.first_lift_stage - 1

    def stage(self, k: int) -> Stage:
        if not (0 <= k <= len(self.records)):
            raise IndexError("stage index out of range")
        engine = _Engine(self.initial)
        for record in self.records[:k]:
            engine.apply_record(record)
        graph, vmap, emap = engine.materialize()
        return Stage(graph, vmap, emap)

    def resolve_token(self, token: int, k: int) -> int:
        """Image of an original oriented token in stage ``k``, still in
        original edge ids."""
        replaced: dict[int, FoldRecord] = {}
        for record in self.records[:k]:
            replaced[abs(record.removed)] = record
        while abs(token) in replaced:
            record = replaced[abs(token)]
            token = record.kept if token == record.removed else -record.kept
        return token

    def push_path(self, path: EdgePath, k: int, stage: Stage | None = None) -> EdgePath:
        """Image of a path of the initial graph in stage ``k``."""
        if stage is None:
            stage = self.stage(k)
        replaced: dict[int, FoldRecord] = {}
        for record in self.records[:k]:
            replaced[abs(record.removed)] = record
        tokens = []
        for token in path.tokens:
            while abs(token) in replaced:
                record = replaced[abs(token)]
                token = record.kept if token == record.removed else -record.kept
            new_id = stage.edge_map[abs(token) - 1] + 1
            tokens.append(new_id if token > 0 else -new_id)
        return EdgePath(stage.graph, tuple(tokens), stage.vertex_map[path.start])


def _heap_key(engine: _Engine, root: int, letter: int, greatest: bool) -> tuple:
    gen, sgn = letter_key(letter)
    if greatest:
        return (-engine.cls_min[root], -gen, -sgn)
    return (engine.cls_min[root], gen, sgn)


def fold_all(g: LabeledGraph, policy: str = "least") -> FoldTrace:
    """Fold until no two edges share a source vertex and a letter.

    Policies: "least" picks the least (vertex, letter) pair, "greatest"
    the greatest; "defer_rose" picks the least pair whose fold does not
    create a vertex carrying loops for every generator, falling back to
    the least pair when every available fold creates one.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if policy == "defer_rose":
        return _fold_all_deferring(g)

    greatest = policy == "greatest"
    engine = _Engine(g)
    records: list[FoldRecord] = []
    heap: list = []
    for v in range(g.num_vertices):
        for letter in engine.foldable_letters(v):
            heapq.heappush(heap, (_heap_key(engine, v, letter, greatest), v, letter))
    while heap:
        key, root, letter = heapq.heappop(heap)
        if engine.find(root) != root:
            continue
        toks = engine.adj[root].get(letter)
        if not toks or len(toks) < 2:
            continue
        fresh = _heap_key(engine, root, letter, greatest)
        if fresh != key:
            heapq.heappush(heap, (fresh, root, letter))
            continue
        record = engine.fold_at(root, letter)
        records.append(record)
        r0 = engine.find(root)
        r1 = engine.head(record.kept)
        for r in {r0, r1}:
            for l in engine.foldable_letters(r):
                heapq.heappush(heap, (_heap_key(engine, r, l, greatest), r, l))
    terminal, _, _ = engine.materialize()
    return FoldTrace(g, tuple(records), terminal, policy, None)


def _fold_all_deferring(g: LabeledGraph) -> FoldTrace:
    """Exact (clone-and-simulate) implementation of the lift-deferring
    policy; intended for desk-scale graphs."""
    engine = _Engine(g)
    records: list[FoldRecord] = []
    first_lift: int | None = 0 if engine.has_rose_lift() else None
    while True:
        candidates = sorted(
            ((engine.cls_min[root], letter_key(letter)), root, letter)
            for root in engine.roots()
            for letter in engine.foldable_letters(root)
        )
        if not candidates:
            break
        pick = None
        if first_lift is None:
            for _, root, letter in candidates:
                probe = engine.clone()
                probe.fold_at(root, letter)
                if not probe.has_rose_lift():
                    pick = (root, letter)
                    break
        if pick is None:
            pick = (candidates[0][1], candidates[0][2])
        records.append(engine.fold_at(*pick))
        if first_lift is None and engine.has_rose_lift():
            first_lift = len(records)
    terminal, _, _ = engine.materialize()
    return FoldTrace(g, tuple(records), terminal, "defer_rose", first_lift)


def fold_once(g: LabeledGraph, policy: str = "least") -> tuple[LabeledGraph, FoldRecord] | None:
    """Apply a single fold per policy, or None when already folded."""
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    engine = _Engine(g)
    candidates = sorted(
        ((engine.cls_min[v], letter_key(letter)), v, letter)
        for v in range(g.num_vertices)
        for letter in engine.foldable_letters(v)
    )
    if not candidates:
        return None
    if policy == "greatest":
        pick = candidates[-1]
    elif policy == "defer_rose":
        pick = candidates[0]
        for cand in candidates:
            probe = engine.clone()
            probe.fold_at(cand[1], cand[2])
            if not probe.has_rose_lift():
                pick = cand
                break
    else:
        pick = candidates[0]
    record = engine.fold_at(pick[1], pick[2])
    folded, _, _ = engine.materialize()
    return folded, record


def is_folded(g: LabeledGraph) -> bool:
    for v in range(g.num_vertices):
        letters = [lab for lab, _, _ in g.adjacency[v]]
        if len(letters) != len(set(letters)):
            return False
    return True


def folds_onto_rose(g: LabeledGraph) -> bool:
    return is_rose(fold_all(g).terminal)


@dataclass(frozen=True)
class PsiWitness:
    """A small connected subgraph of the pre-lift stage that folds onto
    the rose; edge ids refer to that stage's graph."""

    edge_ids: tuple[int, ...]
    graph: LabeledGraph


@dataclass(frozen=True)
class DeltaExtraction:
    trace: FoldTrace
    delta: LabeledGraph
    delta_stage: Stage
    delta_stage_index: int
    psi: PsiWitness
    degenerate: bool


def _subgraph_view(g: LabeledGraph, edge_ids: Sequence[int]) -> LabeledGraph:
    verts = sorted({v for k in edge_ids for v in g.edges[k][:2]})
    remap = {v: i for i, v in enumerate(verts)}
    edges = tuple(
        (remap[g.edges[k][0]], remap[g.edges[k][1]], g.edges[k][2])
        for k in sorted(edge_ids)
    )
    return LabeledGraph(g.rank, max(1, len(verts)), edges, None)


def _prune_psi(delta: LabeledGraph, edge_ids: list[int]) -> list[int]:
    """Greedily drop edges while the rest stays connected and still folds
    onto the rose (breadth-first over ids, restarting after each drop)."""
    current = list(edge_ids)
    changed = True
    while changed:
        changed = False
        for k in sorted(current):
            rest = [e for e in current if e != k]
            if not rest:
                continue
            view = _subgraph_view(delta, rest)
            if is_connected(view) and is_rose(fold_all(view).terminal):
                current = rest
                changed = True
                break
    return current


def fold_to_delta(g: LabeledGraph) -> DeltaExtraction:
    """Run the lift-deferring fold sequence and extract the last stage
    with no rose lift, together with a witness subgraph of at most
    rank+2 edges that folds onto the rose.

    When the input itself already carries a rose lift there is no
    pre-lift stage; the stage before the final fold is returned instead
    and flagged degenerate (with a zero-fold sequence this is an error).
    """
    trace = fold_all(g, policy="defer_rose")
    if not is_rose(trace.terminal):
        raise ValueError("input graph does not fold onto the rose")
    n = g.rank
    degenerate = trace.first_lift_stage == 0
    if degenerate:
        if not trace.records:
            raise ValueError(
                "graph already contains a rose lift and admits no folds; "
                "no pre-lift stage exists"
            )
        delta_index = len(trace.records) - 1
    else:
        assert trace.first_lift_stage is not None
        delta_index = trace.first_lift_stage - 1
    stage = trace.stage(delta_index)
    delta = stage.graph

    if degenerate:
        lift_vertex = delta.rose_lift_vertex()
        assert lift_vertex is not None
        psi_ids = sorted(
            min(
                k
                for k, (s, d, l) in enumerate(delta.edges)
                if s == d == lift_vertex and abs(l) == gen
            )
            for gen in range(1, n + 1)
        )
    else:
        record = trace.records[delta_index]
        next_stage = trace.stage(delta_index + 1)
        lift_vertex = next_stage.graph.rose_lift_vertex()
        assert lift_vertex is not None, "fold after delta must create a lift"
        inverse_emap = {new: orig for orig, new in next_stage.edge_map.items()}
        kept_new = next_stage.edge_map[abs(record.kept) - 1]
        psi_orig = {abs(record.kept) - 1, abs(record.removed) - 1}
        for gen in range(1, n + 1):
            loop = min(
                k
                for k, (s, d, l) in enumerate(next_stage.graph.edges)
                if s == d == lift_vertex and abs(l) == gen
            )
            if loop == kept_new:
                psi_orig.add(abs(record.removed) - 1)
            psi_orig.add(inverse_emap[loop])
        psi_ids = sorted(stage.edge_map[e] for e in psi_orig)

    psi_ids = _prune_psi(delta, psi_ids)
    psi_graph = _subgraph_view(delta, psi_ids)
    assert len(psi_ids) <= n + 2, "witness subgraph exceeds rank+2 edges"
    assert is_connected(psi_graph)
    assert is_rose(fold_all(psi_graph).terminal)
    if not degenerate:
        assert not delta.has_rose_lift()
        # every fold available on delta must produce a lift
        engine = _Engine(delta)
        for root in engine.roots():
            for letter in engine.foldable_letters(root):
                probe = engine.clone()
                probe.fold_at(root, letter)
                assert probe.has_rose_lift(), "delta admits a lift-free fold"
    return DeltaExtraction(
        trace, delta, stage, delta_index, PsiWitness(tuple(psi_ids), psi_graph), degenerate
    )


# ---------------------------------------------------------------------------
# path-injective arcs and arc replacement


def traversal_counts(path: EdgePath) -> dict[int, int]:
    counts: dict[int, int] = {}
    for tok in path.tokens:
        k = abs(tok) - 1
        counts[k] = counts.get(k, 0) + 1
    return counts


def injective_arcs(path: EdgePath) -> list[Arc]:
    """Maximal arcs of the path's graph all of whose edges are traversed
    exactly once by the path."""
    counts = traversal_counts(path)
    return [
        arc
        for arc in maximal_arcs(path.graph)
        if all(counts.get(abs(tok) - 1, 0) == 1 for tok in arc.edges)
    ]


def replace_arc(g: LabeledGraph, arc: Arc, new_label: Word) -> LabeledGraph:
    """Delete the arc and glue a fresh chain reading ``new_label`` between
    the same endpoints.  The arc interior must avoid the base vertex."""
    if new_label.rank != g.rank:
        raise ValueError("rank mismatch")
    for a, b in zip(arc.edges, arc.edges[1:]):
        if g.omega(a) != g.alpha(b):
            raise ValueError("not an arc of this graph")
    interior = arc_interior(g, arc)
    for v in interior:
        if g.degree(v) != 2:
            raise ValueError("arc interior vertex has degree != 2")
        if g.base is not None and v == g.base:
            raise ValueError("arc interior contains the base vertex")
    start, end = arc_endpoints(g, arc)
    dead_edges = {abs(tok) - 1 for tok in arc.edges}
    dead_verts = set(interior)

    kept = [v for v in range(g.num_vertices) if v not in dead_verts]
    remap = {v: i for i, v in enumerate(kept)}
    edges = [
        (remap[s], remap[d], l)
        for k, (s, d, l) in enumerate(g.edges)
        if k not in dead_edges
    ]
    base = remap.get(g.base) if g.base is not None else None

    if len(new_label) == 0:
        a, b = remap[start], remap[end]
        if a != b:
            lo, hi = min(a, b), max(a, b)
            shift = lambda v: (lo if v == hi else v) - (1 if v > hi else 0)
            edges = [(shift(s), shift(d), l) for s, d, l in edges]
            if base is not None:
                base = shift(base)
            return LabeledGraph(g.rank, len(kept) - 1, tuple(edges), base)
        return LabeledGraph(g.rank, len(kept), tuple(edges), base)

    prev = remap[start]
    next_vertex = len(kept)
    for i, letter in enumerate(new_label.letters):
        last = i == len(new_label) - 1
        target = remap[end] if last else next_vertex
        if not last:
            next_vertex += 1
        edges.append((prev, target, letter))
        prev = target
    return LabeledGraph(g.rank, next_vertex, tuple(edges), base)
