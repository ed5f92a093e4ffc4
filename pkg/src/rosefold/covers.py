"""Path lifting, bounded path-surjectivity, the two-vertex cover
characterization, and the exhaustive desk-scale survey that checks it.

Bounded path-surjectivity is decided by a power-set walk: track the set
of vertices at which some lift of the word read so far can end.  The
word fails to lift exactly when that set empties, so the shortest
non-lifting reduced word is a breadth-first search over (vertex set,
last letter) states; the state space is tiny for desk-scale graphs.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from typing import Iterator

from .graphs import (
    EdgePath,
    LabeledGraph,
    betti,
    canonical_key,
    format_graph,
    is_connected,
    is_core_graph,
)
from .words import Word, letter_key


def lift_paths(
    g: LabeledGraph, w: Word, start: int, max_lifts: int | None = None
) -> list[EdgePath]:
    """All paths from ``start`` reading ``w``; at most one in a folded graph."""
    if w.rank != g.rank:
        raise ValueError("rank mismatch")
    lifts: list[EdgePath] = []
    stack: list[tuple[int, tuple[int, ...]]] = [(start, ())]
    while stack:
        v, tokens = stack.pop()
        if len(tokens) == len(w):
            lifts.append(EdgePath(g, tokens, start))
            if max_lifts is not None and len(lifts) >= max_lifts:
                break
            continue
        letter = w.letters[len(tokens)]
        for lab, tgt, tok in g.adjacency[v]:
            if lab == letter:
                stack.append((tgt, tokens + (tok,)))
    return lifts


def _letters(rank: int) -> list[int]:
    out = []
    for gen in range(1, rank + 1):
        out.append(gen)
        out.append(-gen)
    return sorted(out, key=letter_key)


def shortest_non_lifting_word(g: LabeledGraph, max_len: int) -> Word | None:
    """Lexicographically least shortest reduced word with no lift anywhere
    in ``g``, or None when every reduced word of length <= max_len lifts."""
    full = frozenset(range(g.num_vertices))
    seen: set[tuple[frozenset[int], int]] = set()
    frontier: list[tuple[frozenset[int], int, tuple[int, ...]]] = [(full, 0, ())]
    letters = _letters(g.rank)
    step: dict[tuple[int, int], frozenset[int]] = {}
    for v in range(g.num_vertices):
        for lab, tgt, _ in g.adjacency[v]:
            key = (v, lab)
            step[key] = step.get(key, frozenset()) | {tgt}
    for _ in range(max_len):
        next_frontier: list[tuple[frozenset[int], int, tuple[int, ...]]] = []
        for subset, last, word in frontier:
            for letter in letters:
                if last == -letter:
                    continue
                image = frozenset().union(
                    *(step.get((v, letter), frozenset()) for v in subset)
                )
                if not image:
                    return Word(g.rank, word + (letter,))
                state = (image, letter)
                if state in seen:
                    continue
                seen.add(state)
                next_frontier.append((image, letter, word + (letter,)))
        frontier = next_frontier
        if not frontier:
            break
    return None


def is_path_surjective_up_to(g: LabeledGraph, max_len: int) -> tuple[bool, Word | None]:
    """True when every reduced word of length <= max_len lifts somewhere in
    ``g``; on failure also returns a shortest non-lifting word."""
    witness = shortest_non_lifting_word(g, max_len)
    return (witness is None, witness)


def is_two_sheeted_cover(g: LabeledGraph) -> bool:
    """Two vertices; per generator either loops at both vertices or a pair
    of opposite edges between them; at least one generator in the second
    configuration (this forces connectivity)."""
    if g.num_vertices != 2:
        return False
    per_gen: dict[int, list[tuple[int, int, int]]] = {gen: [] for gen in range(1, g.rank + 1)}
    for src, dst, label in g.edges:
        per_gen[abs(label)].append((src, dst, label))
    saw_crossing = False
    for gen in range(1, g.rank + 1):
        recs = per_gen[gen]
        if len(recs) != 2:
            return False
        loops = [r for r in recs if r[0] == r[1]]
        if len(loops) == 2:
            if {loops[0][0], loops[1][0]} != {0, 1}:
                return False
        elif len(loops) == 0:
            # normalized as traversed 0 -> 1: need letters gen and -gen
            traversed = sorted(label if src == 0 else -label for src, dst, label in recs)
            if traversed != [-gen, gen]:
                return False
            saw_crossing = True
        else:
            return False
    return saw_crossing


def two_sheeted_cover(rank: int, loop_generators: frozenset[int] = frozenset()) -> LabeledGraph:
    """Construct the degree-2 cover with loops for ``loop_generators`` and
    an opposite-edge pair for every other generator."""
    if not set(loop_generators) <= set(range(1, rank + 1)):
        raise ValueError("loop generators outside rank")
    if len(loop_generators) == rank:
        raise ValueError("all-loops configuration is disconnected")
    edges: list[tuple[int, int, int]] = []
    for gen in range(1, rank + 1):
        if gen in loop_generators:
            edges.append((0, 0, gen))
            edges.append((1, 1, gen))
        else:
            edges.append((0, 1, gen))
            edges.append((1, 0, gen))
    return LabeledGraph(rank, 2, tuple(edges))


def all_two_sheeted_covers(rank: int) -> list[LabeledGraph]:
    covers = []
    for r in range(rank):
        for combo in itertools.combinations(range(1, rank + 1), r):
            covers.append(two_sheeted_cover(rank, frozenset(combo)))
    return covers


def has_sub_cover(g: LabeledGraph, max_degree: int = 2) -> bool:
    """Does some subgraph restrict to a covering of the rose of degree 1
    or 2?  Degree 1 is a rose lift; degree 2 is a two-vertex pattern."""
    if g.has_rose_lift():
        return True
    if max_degree < 2:
        return False
    loops: list[set[int]] = [g.loop_generators(v) for v in range(g.num_vertices)]
    for v, w in itertools.combinations(range(g.num_vertices), 2):
        forward: dict[int, set[int]] = {}
        for src, dst, label in g.edges:
            if {src, dst} == {v, w}:
                as_from_v = label if src == v else -label
                forward.setdefault(abs(label), set()).add(as_from_v)
        ok = True
        crossing = False
        for gen in range(1, g.rank + 1):
            if gen in loops[v] and gen in loops[w]:
                continue
            if {gen, -gen} <= forward.get(gen, set()):
                crossing = True
                continue
            ok = False
            break
        if ok and crossing:
            return True
    return False


# ---------------------------------------------------------------------------
# isomorph-free enumeration


def _unlabeled_shapes(max_edges: int, max_betti: int) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    """Connected multigraph shapes (num_vertices, sorted edge pairs) with
    every vertex of degree >= 2, grown one edge at a time with canonical
    deduplication at each level."""
    seed = (1, ())
    level: dict[tuple, tuple[int, tuple[tuple[int, int], ...]]] = {
        _shape_key(*seed): seed
    }
    finals: dict[tuple, tuple[int, tuple[tuple[int, int], ...]]] = {}
    for _ in range(max_edges):
        next_level: dict[tuple, tuple[int, tuple[tuple[int, int], ...]]] = {}
        for nv, edges in level.values():
            for shape in _shape_children(nv, edges, max_edges, max_betti):
                snv, sedges = shape
                deficit = _degree_deficit(snv, sedges)
                if deficit > 2 * (max_edges - len(sedges)):
                    continue
                key = _shape_key(snv, sedges)
                if key in next_level:
                    continue
                next_level[key] = shape
                if deficit == 0:
                    finals.setdefault(key, shape)
        level = next_level
    return sorted(finals.values(), key=lambda s: (len(s[1]), s[0], _shape_key(*s)))


def _degree_deficit(nv: int, edges: tuple[tuple[int, int], ...]) -> int:
    deg = [0] * nv
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    return sum(max(0, 2 - d) for d in deg)


def _shape_children(
    nv: int, edges: tuple[tuple[int, int], ...], max_edges: int, max_betti: int
) -> Iterator[tuple[int, tuple[tuple[int, int], ...]]]:
    if len(edges) >= max_edges:
        return
    b = len(edges) - nv + 1  # connected throughout construction
    # edge between existing vertices (raises betti)
    if b + 1 <= max_betti:
        for a in range(nv):
            for c in range(a, nv):
                yield nv, tuple(sorted(edges + ((a, c),)))
    # edge to a brand-new vertex (keeps betti, adds a degree-1 vertex)
    if nv < max_edges:
        for a in range(nv):
            yield nv + 1, tuple(sorted(edges + ((a, nv),)))


def _shape_key(nv: int, edges: tuple[tuple[int, int], ...]) -> tuple:
    """Exact canonical key for a small multigraph: least sorted edge list
    over all vertex permutations (shapes here have at most 7 vertices)."""
    best = None
    for perm in itertools.permutations(range(nv)):
        mapped = tuple(
            sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges)
        )
        if best is None or mapped < best:
            best = mapped
    return (nv, best)


def enumerate_candidates(
    rank: int, max_edges: int, max_graphs: int | None = None
) -> Iterator[LabeledGraph]:
    """All connected core labeled graphs with at most ``max_edges``
    topological edges and Betti number at most 2*rank - 1, one per
    label-preserving isomorphism class.

    Raises RuntimeError when ``max_graphs`` distinct graphs are exceeded.
    """
    if rank < 2:
        raise ValueError("rank must be >= 2")
    max_betti = 2 * rank - 1
    emitted: set[tuple] = set()
    count = 0
    for nv, pairs in _unlabeled_shapes(max_edges, max_betti):
        label_choices: list[list[int]] = []
        for a, b in pairs:
            if a == b:
                label_choices.append(list(range(1, rank + 1)))
            else:
                label_choices.append(
                    [g for gen in range(1, rank + 1) for g in (gen, -gen)]
                )
        for assignment in itertools.product(*label_choices):
            edges = tuple((a, b, lab) for (a, b), lab in zip(pairs, assignment))
            g = LabeledGraph(rank, nv, edges)
            key = canonical_key(g, respect_base=False)
            if key in emitted:
                continue
            emitted.add(key)
            count += 1
            if max_graphs is not None and count > max_graphs:
                raise RuntimeError("enumeration exceeded the configured cap")
            yield g


def brute_force_candidates(rank: int, max_edges: int) -> list[LabeledGraph]:
    """Independent generate-and-filter oracle for small bounds: raw product
    over endpoint and label choices, naive dedup by canonical key."""
    out: dict[tuple, LabeledGraph] = {}
    max_betti = 2 * rank - 1
    for nv in range(1, max_edges + 1):
        endpoint_pairs = [(a, b) for a in range(nv) for b in range(a, nv)]
        for ne in range(1, max_edges + 1):
            for pair_combo in itertools.combinations_with_replacement(endpoint_pairs, ne):
                labels_options = []
                for a, b in pair_combo:
                    labels_options.append(
                        list(range(1, rank + 1))
                        if a == b
                        else [g for gen in range(1, rank + 1) for g in (gen, -gen)]
                    )
                for labels in itertools.product(*labels_options):
                    edges = tuple(
                        (a, b, lab) for (a, b), lab in zip(pair_combo, labels)
                    )
                    g = LabeledGraph(rank, nv, edges)
                    if not is_connected(g):
                        continue
                    if not is_core_graph(g):
                        continue
                    if betti(g) > max_betti:
                        continue
                    out.setdefault(canonical_key(g, respect_base=False), g)
    return list(out.values())


# ---------------------------------------------------------------------------
# the exhaustive survey


@dataclass
class CoverSurveyReport:
    """Outcome of classifying every enumerated candidate."""

    rank: int
    max_edges: int
    max_path_len: int
    total_candidates: int = 0
    with_rose_lift: int = 0
    two_sheeted_covers: int = 0
    witnessed: int = 0
    max_witness_length: int = 0
    violations: list[dict] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "max_edges": self.max_edges,
            "max_path_len": self.max_path_len,
            "total_candidates": self.total_candidates,
            "with_rose_lift": self.with_rose_lift,
            "two_sheeted_covers": self.two_sheeted_covers,
            "witnessed": self.witnessed,
            "max_witness_length": self.max_witness_length,
            "violations": self.violations,
            "elapsed_seconds": round(self.elapsed_seconds, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def survey_two_cover_characterization(
    rank: int, max_edges: int, max_path_len: int, max_graphs: int | None = None
) -> CoverSurveyReport:
    """Classify every candidate: graphs with no rose lift must either be
    two-sheeted covers or admit a short non-lifting reduced word.  Any
    graph admitting neither within the length bound is reported as a
    violation (none are expected)."""
    report = CoverSurveyReport(rank, max_edges, max_path_len)
    start = time.monotonic()
    for g in enumerate_candidates(rank, max_edges, max_graphs):
        report.total_candidates += 1
        if g.has_rose_lift():
            report.with_rose_lift += 1
            continue
        if is_two_sheeted_cover(g):
            report.two_sheeted_covers += 1
            continue
        witness = shortest_non_lifting_word(g, max_path_len)
        if witness is None:
            report.violations.append(
                {
                    "graph": format_graph(g),
                    "betti": betti(g),
                    "note": "path-surjective up to the bound, no lift, not a 2-cover",
                }
            )
        else:
            report.witnessed += 1
            report.max_witness_length = max(report.max_witness_length, len(witness))
    report.elapsed_seconds = time.monotonic() - start
    return report
