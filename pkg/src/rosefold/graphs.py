"""Labeled graphs over the rank-n rose: Betti numbers, cores, arcs,
subgraph collapse, and label-preserving isomorphism.

A graph is stored with one record per topological edge: (src, dst, label),
where the label is a signed generator index giving the letter read when
the edge is traversed src -> dst.  Oriented edges are signed tokens:
+(k+1) traverses edge k forwards, -(k+1) backwards with the inverse
label.  This encodes the usual fixed-point-free involution on oriented
edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .words import Word, check_letter, format_letter, letter_key, parse_letter


@dataclass(frozen=True)
class LabeledGraph:
    rank: int
    num_vertices: int
    edges: tuple[tuple[int, int, int], ...]
    base: int | None = None

    def __post_init__(self) -> None:
        if self.num_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        for src, dst, label in self.edges:
            if not (0 <= src < self.num_vertices and 0 <= dst < self.num_vertices):
                raise ValueError("edge endpoint outside vertex range")
            check_letter(label, self.rank)
        if self.base is not None and not (0 <= self.base < self.num_vertices):
            raise ValueError("base vertex outside vertex range")

    # -- oriented edge helpers -------------------------------------------

    def topo(self, token: int) -> int:
        return abs(token) - 1

    def alpha(self, token: int) -> int:
        src, dst, _ = self.edges[abs(token) - 1]
        return src if token > 0 else dst

    def omega(self, token: int) -> int:
        src, dst, _ = self.edges[abs(token) - 1]
        return dst if token > 0 else src

    def letter(self, token: int) -> int:
        _, _, label = self.edges[abs(token) - 1]
        return label if token > 0 else -label

    def oriented_edges(self) -> Iterator[int]:
        for k in range(len(self.edges)):
            yield k + 1
            yield -(k + 1)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int, int], ...], ...]:
        """Per-vertex list of (letter, target, token), sorted for determinism."""
        out: list[list[tuple[int, int, int]]] = [[] for _ in range(self.num_vertices)]
        for k, (src, dst, label) in enumerate(self.edges):
            out[src].append((label, dst, k + 1))
            out[dst].append((-label, src, -(k + 1)))
        key = lambda rec: (letter_key(rec[0]), rec[1], rec[2])
        return tuple(tuple(sorted(lst, key=key)) for lst in out)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def out_tokens(self, v: int, letter: int) -> list[int]:
        return [tok for lab, _, tok in self.adjacency[v] if lab == letter]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def loop_generators(self, v: int) -> set[int]:
        return {abs(label) for src, dst, label in self.edges if src == dst == v}

    def has_rose_lift(self) -> bool:
        """True when some vertex carries a loop for every generator."""
        return self.rose_lift_vertex() is not None

    def rose_lift_vertex(self) -> int | None:
        for v in range(self.num_vertices):
            if len(self.loop_generators(v)) == self.rank:
                return v
        return None


def rose(rank: int, base: int | None = 0) -> LabeledGraph:
    return LabeledGraph(rank, 1, tuple((0, 0, g) for g in range(1, rank + 1)), base)


def is_rose(g: LabeledGraph) -> bool:
    return g.num_vertices == 1 and sorted(abs(l) for _, _, l in g.edges) == list(
        range(1, g.rank + 1)
    )


def _components(num_vertices: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    parent = list(range(num_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return [find(v) for v in range(num_vertices)]


def component_count(g: LabeledGraph) -> int:
    roots = _components(g.num_vertices, ((s, d) for s, d, _ in g.edges))
    return len(set(roots))


def is_connected(g: LabeledGraph) -> bool:
    return component_count(g) == 1


def betti(g: LabeledGraph) -> int:
    """First Betti number: E - V + #components (graph may be disconnected)."""
    return g.num_edges - g.num_vertices + component_count(g)


# ---------------------------------------------------------------------------
# subgraphs and collapse


@dataclass(frozen=True)
class Subgraph:
    """A subgraph selection: vertex ids plus topological edge ids."""

    vertices: frozenset[int]
    edges: frozenset[int]


def subgraph_from_edges(
    g: LabeledGraph, edge_ids: Iterable[int], extra_vertices: Iterable[int] = ()
) -> Subgraph:
    edge_ids = frozenset(edge_ids)
    verts = set(extra_vertices)
    for k in edge_ids:
        src, dst, _ = g.edges[k]
        verts.add(src)
        verts.add(dst)
    return Subgraph(frozenset(verts), edge_ids)


def check_subgraph(g: LabeledGraph, sub: Subgraph) -> None:
    for v in sub.vertices:
        if not (0 <= v < g.num_vertices):
            raise ValueError("subgraph vertex outside graph")
    for k in sub.edges:
        if not (0 <= k < g.num_edges):
            raise ValueError("subgraph edge outside graph")
        src, dst, _ = g.edges[k]
        if src not in sub.vertices or dst not in sub.vertices:
            raise ValueError("subgraph edge with endpoint outside its vertex set")


def subgraph_as_graph(g: LabeledGraph, sub: Subgraph) -> LabeledGraph:
    """The selected subgraph as a standalone graph (vertices renumbered)."""
    check_subgraph(g, sub)
    order = sorted(sub.vertices)
    remap = {v: i for i, v in enumerate(order)}
    edges = tuple(
        (remap[g.edges[k][0]], remap[g.edges[k][1]], g.edges[k][2])
        for k in sorted(sub.edges)
    )
    base = remap.get(g.base) if g.base is not None else None
    return LabeledGraph(g.rank, max(1, len(order)), edges, base)


def collapse(g: LabeledGraph, sub: Subgraph) -> LabeledGraph:
    """Quotient graph: every connected component of ``sub`` becomes a vertex."""
    check_subgraph(g, sub)
    parent = list(range(g.num_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in sub.edges:
        src, dst, _ = g.edges[k]
        ra, rb = find(src), find(dst)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(v) for v in range(g.num_vertices)})
    remap = {r: i for i, r in enumerate(roots)}
    edges = tuple(
        (remap[find(src)], remap[find(dst)], label)
        for k, (src, dst, label) in enumerate(g.edges)
        if k not in sub.edges
    )
    base = remap[find(g.base)] if g.base is not None else None
    return LabeledGraph(g.rank, len(roots), edges, base)


# ---------------------------------------------------------------------------
# cores


def core(g: LabeledGraph, relative_to: int | None = None) -> LabeledGraph:
    """Iteratively delete degree-1 vertices, sparing ``relative_to`` if given.

    Without a spared vertex the input must be non-contractible; with one,
    the result is the core pair (core graph with respect to that vertex).
    """
    alive_v = [True] * g.num_vertices
    alive_e = [True] * g.num_edges
    deg = [0] * g.num_vertices
    incident: list[list[int]] = [[] for _ in range(g.num_vertices)]
    for k, (src, dst, _) in enumerate(g.edges):
        deg[src] += 1
        deg[dst] += 1
        incident[src].append(k)
        incident[dst].append(k)

    queue = [
        v
        for v in range(g.num_vertices)
        if deg[v] <= 1 and v != relative_to
    ]
    while queue:
        v = queue.pop()
        if not alive_v[v] or deg[v] > 1 or v == relative_to:
            continue
        alive_v[v] = False
        for k in incident[v]:
            if not alive_e[k]:
                continue
            alive_e[k] = False
            src, dst, _ = g.edges[k]
            other = dst if src == v else src
            deg[src] -= 1
            deg[dst] -= 1
            if alive_v[other] and deg[other] <= 1 and other != relative_to:
                queue.append(other)

    kept = [v for v in range(g.num_vertices) if alive_v[v]]
    if not kept or not any(alive_e):
        if relative_to is None:
            raise ValueError("contractible graph has no core; pass relative_to")
        kept = [relative_to] if not kept else kept
    remap = {v: i for i, v in enumerate(kept)}
    edges = tuple(
        (remap[src], remap[dst], label)
        for k, (src, dst, label) in enumerate(g.edges)
        if alive_e[k]
    )
    base = g.base
    if relative_to is not None:
        base = relative_to
    base = remap.get(base) if base is not None and base in remap else None
    return LabeledGraph(g.rank, len(kept), edges, base)


def is_core_graph(g: LabeledGraph) -> bool:
    return all(g.degree(v) >= 2 for v in range(g.num_vertices))


# ---------------------------------------------------------------------------
# arcs


@dataclass(frozen=True)
class Arc:
    """A chain of oriented edges whose interior vertices have degree 2."""

    edges: tuple[int, ...]
    kind: str  # "maximal" | "semi-maximal" | "plain" | "circle"

    def __len__(self) -> int:
        return len(self.edges)


def arc_endpoints(g: LabeledGraph, arc: Arc) -> tuple[int, int]:
    return g.alpha(arc.edges[0]), g.omega(arc.edges[-1])


def arc_interior(g: LabeledGraph, arc: Arc) -> list[int]:
    return [g.omega(tok) for tok in arc.edges[:-1]]


def arc_label(g: LabeledGraph, arc: Arc) -> Word:
    return Word(g.rank, tuple(g.letter(tok) for tok in arc.edges))


def make_arc(g: LabeledGraph, tokens: Sequence[int], kind: str = "plain") -> Arc:
    """Validate a token chain as an arc (interior degree 2, consecutive)."""
    if not tokens:
        raise ValueError("empty arc")
    for a, b in zip(tokens, tokens[1:]):
        if g.omega(a) != g.alpha(b):
            raise ValueError("arc edges do not concatenate")
    seen = set()
    for tok in tokens:
        if abs(tok) in seen:
            raise ValueError("arc repeats a topological edge")
        seen.add(abs(tok))
    for tok in tokens[:-1]:
        if g.degree(g.omega(tok)) != 2:
            raise ValueError("arc interior vertex has degree != 2")
    return Arc(tuple(tokens), kind)


def maximal_arcs(g: LabeledGraph) -> list[Arc]:
    """Partition the topological edges of a connected graph into maximal arcs.

    A simplicially subdivided circle has no degree-!=2 vertex to cut at;
    per the design contract it is returned as a single closed arc with
    kind "circle", cut at its least vertex id.
    """
    if g.num_edges == 0:
        raise ValueError("graph has no edges")
    if not is_connected(g):
        raise ValueError("maximal_arcs expects a connected graph")
    used = [False] * g.num_edges
    arcs: list[Arc] = []

    def walk(start_tok: int) -> list[int]:
        chain = [start_tok]
        used[abs(start_tok) - 1] = True
        while True:
            v = g.omega(chain[-1])
            if g.degree(v) != 2:
                break
            nxt = [tok for _, _, tok in g.adjacency[v] if tok != -chain[-1]]
            if len(nxt) != 1:
                break
            tok = nxt[0]
            if used[abs(tok) - 1]:
                break
            chain.append(tok)
            used[abs(tok) - 1] = True
        return chain

    for v in range(g.num_vertices):
        if g.degree(v) == 2:
            continue
        for _, _, tok in g.adjacency[v]:
            if used[abs(tok) - 1]:
                continue
            arcs.append(Arc(tuple(walk(tok)), "maximal"))

    # leftovers are circle components made entirely of degree-2 vertices
    for k in range(g.num_edges):
        if used[k]:
            continue
        src, dst, _ = g.edges[k]
        start = min(src, dst)
        tok = k + 1 if src == start else -(k + 1)
        arcs.append(Arc(tuple(walk(tok)), "circle"))
    return arcs


# ---------------------------------------------------------------------------
# edge paths


@dataclass(frozen=True)
class EdgePath:
    """A combinatorial edge path; length 0 paths sit at ``start``."""

    graph: LabeledGraph
    tokens: tuple[int, ...]
    start: int

    def __post_init__(self) -> None:
        v = self.start
        for tok in self.tokens:
            if self.graph.alpha(tok) != v:
                raise ValueError("path edges do not concatenate")
            v = self.graph.omega(tok)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def end(self) -> int:
        return self.graph.omega(self.tokens[-1]) if self.tokens else self.start

    @property
    def is_reduced(self) -> bool:
        return all(a != -b for a, b in zip(self.tokens, self.tokens[1:]))

    def label_letters(self) -> tuple[int, ...]:
        return tuple(self.graph.letter(tok) for tok in self.tokens)

    def label_word(self) -> Word:
        return Word(self.graph.rank, self.label_letters())


# ---------------------------------------------------------------------------
# canonical form and isomorphism


def _encode_from(g: LabeledGraph, start: int, labeled: bool) -> tuple:
    """Least BFS encoding from ``start``.

    Vertices are numbered in discovery order.  At each vertex the label
    groups are visited in label order; when a group reaches several
    still-unnumbered targets at once the assignment is ambiguous, so all
    orders are explored and the least full encoding wins.  Tokens are
    emitted only after every target of the vertex has its final number,
    sorted by (label, number), so the encoding depends on the
    isomorphism class alone.
    """
    n = g.num_vertices
    adj = g.adjacency
    group_key = (lambda r: letter_key(r[0])) if labeled else (lambda r: (0, 0))
    best: list[tuple | None] = [None]

    def rec(order: list[int], ids: dict[int, int], qi: int, tokens: list[int]) -> None:
        while qi < len(order):
            v = order[qi]
            recs = adj[v]
            # assign discovery numbers until this vertex has none pending;
            # the first label group with several distinct unnumbered
            # targets is a branch point
            while True:
                pending: dict[tuple, list[int]] = {}
                for rec_ in recs:
                    if rec_[1] not in ids:
                        pending.setdefault(group_key(rec_), []).append(rec_[1])
                if not pending:
                    break
                key = min(pending)
                targets = sorted(set(pending[key]))
                if len(targets) == 1:
                    ids = dict(ids)
                    ids[targets[0]] = len(order)
                    order = order + [targets[0]]
                    continue
                for first in targets:
                    ids2 = dict(ids)
                    ids2[first] = len(order)
                    rec(order + [first], ids2, qi, list(tokens))
                return
            emitted = sorted(
                (group_key(r) + (ids[r[1]],) for r in recs)
            )
            tokens = list(tokens)
            for gen, sign, tid in emitted:
                tokens.extend((gen, sign, tid))
            tokens.append(-1)
            qi += 1
        if len(order) == n:
            enc = tuple(tokens)
            if best[0] is None or enc < best[0]:
                best[0] = enc

    rec([start], {start: 0}, 0, [])
    assert best[0] is not None
    return best[0]


def canonical_key(g: LabeledGraph, respect_base: bool = True, labeled: bool = True) -> tuple:
    """Canonical encoding deciding label-preserving isomorphism.

    Based graphs are encoded from the base; otherwise the least encoding
    over all start vertices is used.  Connected graphs only.
    """
    if not is_connected(g):
        raise ValueError("canonical_key expects a connected graph")
    header = (g.rank if labeled else 0, g.num_vertices, g.num_edges)
    if respect_base and g.base is not None:
        return header + (1,) + _encode_from(g, g.base, labeled)
    body = min(_encode_from(g, v, labeled) for v in range(g.num_vertices))
    return header + (0,) + body


def isomorphic_labeled(g1: LabeledGraph, g2: LabeledGraph, respect_base: bool = True) -> bool:
    """Label-preserving (and base-preserving, by default) graph isomorphism."""
    if g1.rank != g2.rank or g1.num_vertices != g2.num_vertices:
        return False
    if g1.num_edges != g2.num_edges:
        return False
    if respect_base and (g1.base is None) != (g2.base is None):
        return False
    return canonical_key(g1, respect_base) == canonical_key(g2, respect_base)


# ---------------------------------------------------------------------------
# text format


def format_graph(g: LabeledGraph) -> str:
    lines = [f"rank {g.rank}", f"vertices {g.num_vertices}"]
    if g.base is not None:
        lines.append(f"base {g.base}")
    for src, dst, label in g.edges:
        lines.append(f"edge {src} {dst} {format_letter(label)}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> LabeledGraph:
    rank: int | None = None
    num_vertices: int | None = None
    base: int | None = None
    edges: list[tuple[int, int, int]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "rank":
            rank = int(parts[1])
        elif parts[0] == "vertices":
            num_vertices = int(parts[1])
        elif parts[0] == "base":
            base = int(parts[1])
        elif parts[0] == "edge":
            if rank is None:
                raise ValueError("edge line before rank line")
            edges.append((int(parts[1]), int(parts[2]), parse_letter(parts[3], rank)))
        else:
            raise ValueError(f"unknown graph line {line!r}")
    if rank is None:
        raise ValueError("missing rank line")
    if num_vertices is None:
        num_vertices = 1 + max(
            (max(s, d) for s, d, _ in edges), default=(base if base is not None else 0)
        )
    return LabeledGraph(rank, num_vertices, tuple(edges), base)
