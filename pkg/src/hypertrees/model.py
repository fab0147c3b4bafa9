"""Configuration model for random r-regular s-uniform hypergraphs.

The probability space is built from n cells (one per vertex) holding r
points each.  A configuration is a partition of the rn points into parts
of size s; projecting each part to the multiset of cells it touches gives
an r-regular s-uniform multi-hypergraph on n vertices.  Shuffling the
points and cutting the shuffled sequence into consecutive blocks of s
produces every partition with equal probability, because every partition
arises from exactly (rn/s)! * (s!)^(rn/s) orderings.

Spanning trees here are Berge-acyclic spanning sub-hypergraphs: a set of
t = (n-1)/(s-1) edges is a spanning tree exactly when processing its edges
through a union-find structure merges s previously distinct components at
every step.  Cycle counting follows the usual loose-cycle conventions:
a 1-cycle is an edge with a repeated vertex, a loose 2-cycle is a pair of
edges whose vertex sets share exactly two vertices, and a loose j-cycle
(j >= 3) is a cyclic arrangement of j loop-free edges in which adjacent
edges share exactly one vertex and non-adjacent edges are disjoint.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BudgetExceededError,
    DivisibilityError,
    ParameterError,
    RejectionLimitError,
)

DEFAULT_ENUMERATION_BUDGET = 10**8


# ---------------------------------------------------------------------------
# parameter handling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """Degree r, edge size s, vertex count n.

    Two divisibility conditions matter.  ``divides_points`` (s | rn) is
    needed for the configuration space to be nonempty; ``divides_tree``
    ((s-1) | (n-1)) is needed for spanning trees to exist.  Parameters
    satisfying both form the admissible lattice on which the exact
    formulas operate.
    """

    r: int
    s: int
    n: int

    def __post_init__(self) -> None:
        for name, value in (("r", self.r), ("s", self.s), ("n", self.n)):
            if not isinstance(value, int):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
        if self.r < 2:
            raise ParameterError(f"degree r must be at least 2, got {self.r}")
        if self.s < 2:
            raise ParameterError(f"edge size s must be at least 2, got {self.s}")
        if self.n < 1:
            raise ParameterError(f"vertex count n must be at least 1, got {self.n}")

    @property
    def divides_points(self) -> bool:
        return (self.r * self.n) % self.s == 0

    @property
    def divides_tree(self) -> bool:
        return (self.n - 1) % (self.s - 1) == 0

    @property
    def admissible(self) -> bool:
        return self.divides_points and self.divides_tree

    @property
    def total_points(self) -> int:
        return self.r * self.n

    @property
    def num_parts(self) -> int:
        if not self.divides_points:
            raise DivisibilityError(
                f"s={self.s} does not divide r*n={self.r * self.n}"
            )
        return (self.r * self.n) // self.s

    @property
    def tree_size(self) -> int:
        """Number of edges in any spanning tree, t = (n-1)/(s-1)."""
        if not self.divides_tree:
            raise DivisibilityError(
                f"s-1={self.s - 1} does not divide n-1={self.n - 1}"
            )
        return (self.n - 1) // (self.s - 1)

    def divisibility_report(self) -> dict[str, bool]:
        return {
            "s_divides_rn": self.divides_points,
            "s_minus_1_divides_n_minus_1": self.divides_tree,
        }


def validate_params(r: int, s: int, n: int) -> ModelParams:
    """Range-check (r, s, n) and return them with divisibility flags attached.

    Raises ParameterError when a value is out of range.  Divisibility
    failures are reported through the flags, not raised, because several
    operations (sampling, cycle censuses) only need one of the conditions.
    """
    return ModelParams(r, s, n)


def admissible_orders(params_r: int, params_s: int, count: int, start: int = 1) -> list[int]:
    """The first ``count`` vertex counts n >= start with s | rn and (s-1) | (n-1)."""
    found: list[int] = []
    n = max(start, 1)
    while len(found) < count:
        if (params_r * n) % params_s == 0 and (n - 1) % (params_s - 1) == 0:
            found.append(n)
        n += 1
    return found


# ---------------------------------------------------------------------------
# core objects
# ---------------------------------------------------------------------------

Point = tuple[int, int]  # (cell index, slot index within the cell)


@dataclass(frozen=True)
class Configuration:
    """A partition of the rn points into parts of size s, in canonical form.

    Canonical form: within each part points are sorted, and parts are
    sorted among themselves, so equal partitions compare equal.
    """

    params: ModelParams
    parts: tuple[tuple[Point, ...], ...]

    def validate(self) -> None:
        p = self.params
        if len(self.parts) != p.num_parts:
            raise ParameterError(
                f"expected {p.num_parts} parts, got {len(self.parts)}"
            )
        seen: set[Point] = set()
        for part in self.parts:
            if len(part) != p.s:
                raise ParameterError(f"part {part!r} does not have size s={p.s}")
            if tuple(sorted(part)) != part:
                raise ParameterError(f"part {part!r} is not sorted")
            seen.update(part)
        if sorted(self.parts) != list(self.parts):
            raise ParameterError("parts are not in canonical sorted order")
        expected = {(c, k) for c in range(p.n) for k in range(p.r)}
        if seen != expected:
            raise ParameterError("parts do not partition the full point set")

    def to_json_dict(self) -> dict:
        return {
            "r": self.params.r,
            "s": self.params.s,
            "n": self.params.n,
            "parts": [[[c, k] for (c, k) in part] for part in self.parts],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Configuration":
        params = validate_params(int(data["r"]), int(data["s"]), int(data["n"]))
        parts = tuple(
            tuple((int(c), int(k)) for c, k in part) for part in data["parts"]
        )
        config = cls(params, parts)
        config.validate()
        return config


@dataclass(frozen=True)
class Hypergraph:
    """n vertices plus a tuple of s-uniform edges; each edge is a sorted
    multiset of vertex labels.  Loops (repeated labels inside an edge) and
    repeated edges are allowed; edge order is significant only as a way of
    indexing, not as structure."""

    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"hypergraph needs n >= 1 vertices, got {self.n}")
        sizes = {len(e) for e in self.edges}
        if len(sizes) > 1:
            raise ParameterError(f"edges are not uniform: sizes {sorted(sizes)}")
        for e in self.edges:
            if tuple(sorted(e)) != e:
                raise ParameterError(f"edge {e!r} is not sorted")
            if any(v < 0 or v >= self.n for v in e):
                raise ParameterError(f"edge {e!r} has a vertex outside range(n)")

    @property
    def edge_size(self) -> int | None:
        return len(self.edges[0]) if self.edges else None

    def to_json_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Hypergraph":
        return cls(
            int(data["n"]),
            tuple(tuple(int(v) for v in e) for e in data["edges"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "Hypergraph":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class CycleCensus:
    """Cycle counts of one configuration.

    ``counts[1]`` is the number of parts whose cell multiset has a repeat
    (every 1-cycle, loose or not); ``counts[2]`` the number of unordered
    part pairs whose projected vertex sets share exactly two vertices;
    ``counts[j]`` for j >= 3 the number of loose j-cycles.  Part pairs
    overlapping in three or more vertices (including repeated edges, which
    overlap in s) are not loose 2-cycles; they are tallied separately in
    ``overlap_pairs`` keyed by overlap size.
    """

    j_max: int
    counts: Mapping[int, int]
    overlap_pairs: Mapping[int, int] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "j_max": self.j_max,
            "counts": {str(j): c for j, c in sorted(self.counts.items())},
            "overlap_pairs": {
                str(k): v for k, v in sorted(self.overlap_pairs.items())
            },
        }


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _sample_parts(params: ModelParams, rng: np.random.Generator) -> tuple[tuple[Point, ...], ...]:
    r, s = params.r, params.s
    perm = rng.permutation(params.total_points)
    blocks = np.sort(perm.reshape(-1, s), axis=1)
    rows = blocks.tolist()
    rows.sort()
    # point id p encodes (cell, slot) as p = cell*r + slot, which sorts in
    # the same order as the pairs themselves
    return tuple(tuple((p // r, p % r) for p in row) for row in rows)


def sample_configuration(
    params: ModelParams,
    seed: int | None = None,
    *,
    rng: np.random.Generator | None = None,
) -> Configuration:
    """Draw a uniformly random configuration.

    The same seed always yields the same configuration.  A shared
    ``numpy.random.Generator`` can be passed instead of a seed when many
    draws are needed from one stream.
    """
    params.num_parts  # raises DivisibilityError when s does not divide rn
    if rng is None:
        rng = np.random.default_rng(seed)
    return Configuration(params, _sample_parts(params, rng))


def sample_simple_hypergraph(
    params: ModelParams,
    seed: int | None = None,
    max_rejects: int = 10_000,
    *,
    rng: np.random.Generator | None = None,
) -> Hypergraph:
    """Rejection-sample a uniformly random simple r-regular s-uniform hypergraph.

    Projects fresh configurations until one is simple.  The acceptance
    rate tends to exp(-(r^2-1)/4) for s = 2 and exp(-(r-1)(s-1)/2) for
    s >= 3, so the default attempt limit is generous; it exists to fail
    loudly at parameters where no simple hypergraph can appear at all.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    for _ in range(max_rejects):
        h = project(Configuration(params, _sample_parts(params, rng)))
        if is_simple(h):
            return h
    raise RejectionLimitError(
        f"no simple hypergraph found in {max_rejects} attempts at "
        f"(r={params.r}, s={params.s}, n={params.n})"
    )


# ---------------------------------------------------------------------------
# projection and structural predicates
# ---------------------------------------------------------------------------

def project(config: Configuration) -> Hypergraph:
    """Collapse each part to the sorted multiset of its cells."""
    edges = tuple(
        tuple(sorted(cell for cell, _ in part)) for part in config.parts
    )
    return Hypergraph(config.params.n, edges)


def is_simple(h: Hypergraph) -> bool:
    """No edge repeats a vertex and no two edges are equal as multisets."""
    seen: set[tuple[int, ...]] = set()
    for e in h.edges:
        if len(set(e)) != len(e):
            return False
        if e in seen:
            return False
        seen.add(e)
    return True


class _UnionFind:
    __slots__ = ("parent", "size")

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        # no path compression so that unions can be undone by the callers
        # that keep a trail; the trees stay shallow under union by size
        p = self.parent
        while p[x] != x:
            x = p[x]
        return x

    def union_root(self, ra: int, rb: int) -> int:
        """Attach the smaller root under the larger; returns the child root."""
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return rb

    def undo(self, child_root: int) -> None:
        parent = self.parent[child_root]
        self.size[parent] -= self.size[child_root]
        self.parent[child_root] = child_root


def is_connected(h: Hypergraph) -> bool:
    """Berge connectivity: every pair of vertices is joined by a walk that
    alternates vertices and edges.  Isolated vertices disconnect any
    hypergraph with n >= 2; the one-vertex hypergraph is connected."""
    if h.n == 1:
        return True
    uf = _UnionFind(h.n)
    components = h.n
    for e in h.edges:
        anchor = uf.find(e[0])
        for v in e[1:]:
            root = uf.find(v)
            if root != anchor:
                uf.union_root(anchor, root)
                anchor = uf.find(e[0])
                components -= 1
    return components == 1


def _merges_fresh_components(uf: _UnionFind, edge: Sequence[int], trail: list[int]) -> bool:
    """Union the s vertices of ``edge`` if they lie in s distinct components.

    On success appends undo handles to ``trail`` and returns True; on
    failure leaves the structure untouched and returns False.
    """
    roots = []
    for v in edge:
        root = uf.find(v)
        if root in roots:
            return False
        roots.append(root)
    base = roots[0]
    for root in roots[1:]:
        child = uf.union_root(uf.find(base), root)
        trail.append(child)
    return True


def is_spanning_tree(h: Hypergraph, subset: Sequence[int]) -> bool:
    """Whether the edges at the given positions form a spanning tree.

    Requires exactly t = (n-1)/(s-1) edges, each merging s previously
    distinct components, which makes the vertex-edge incidence graph of
    the subset a spanning tree.  Returns False when (s-1) does not divide
    (n-1); the one-vertex hypergraph is spanned by the empty subset.
    """
    subset = list(subset)
    if h.n == 1:
        return len(subset) == 0
    if not subset:
        return False
    s = h.edge_size
    if s is None or (h.n - 1) % (s - 1) != 0:
        return False
    if len(subset) != (h.n - 1) // (s - 1):
        return False
    uf = _UnionFind(h.n)
    trail: list[int] = []
    for idx in subset:
        if not _merges_fresh_components(uf, h.edges[idx], trail):
            return False
    return True


def _spanning_tree_search(h: Hypergraph, budget: int, stop_at_first: bool) -> int:
    """Backtracking count of spanning-tree subsets of edge positions."""
    if h.n == 1:
        return 1
    s = h.edge_size
    if s is None or (h.n - 1) % (s - 1) != 0:
        return 0
    t = (h.n - 1) // (s - 1)
    m = len(h.edges)
    if t > m:
        return 0
    if math.comb(m, t) > budget:
        raise BudgetExceededError(
            f"C({m},{t}) = {math.comb(m, t)} candidate subsets exceed the "
            f"budget of {budget}"
        )
    uf = _UnionFind(h.n)
    edges = h.edges
    visits = 0

    def extend(start: int, chosen: int) -> int:
        nonlocal visits
        if chosen == t:
            return 1
        total = 0
        # keep enough edges in reserve to reach t
        for idx in range(start, m - (t - chosen) + 1):
            visits += 1
            if visits > budget:
                raise BudgetExceededError(
                    f"backtracking exceeded the node budget of {budget}"
                )
            trail: list[int] = []
            if _merges_fresh_components(uf, edges[idx], trail):
                total += extend(idx + 1, chosen + 1)
                for child in reversed(trail):
                    uf.undo(child)
                if stop_at_first and total:
                    return total
        return total

    return extend(0, 0)


def count_spanning_trees(h: Hypergraph, budget: int = DEFAULT_ENUMERATION_BUDGET) -> int:
    """Number of t-subsets of edge positions that form spanning trees.

    Subsets index edge positions, so repeated edges contribute separately.
    Refuses with BudgetExceededError when the search could exceed
    ``budget`` candidate subsets.
    """
    return _spanning_tree_search(h, budget, stop_at_first=False)


def has_spanning_tree(h: Hypergraph, budget: int = DEFAULT_ENUMERATION_BUDGET) -> bool:
    return _spanning_tree_search(h, budget, stop_at_first=True) > 0


# ---------------------------------------------------------------------------
# cycle census
# ---------------------------------------------------------------------------

def census_cycles(config: Configuration, j_max: int) -> CycleCensus:
    """Count 1-cycles, loose 2-cycles, and loose j-cycles up to j_max.

    Pairs of parts overlapping in >= 3 vertices (repeated edges overlap in
    s) are recorded in ``overlap_pairs`` but are not loose 2-cycles.  For
    j >= 3 only loop-free parts can participate, since a loose j-cycle
    contains (s-1)j distinct vertices.
    """
    if j_max < 1:
        raise ParameterError(f"j_max must be at least 1, got {j_max}")
    s = config.params.s
    cells_per_part: list[tuple[int, ...]] = []
    vertex_sets: list[frozenset[int]] = []
    loops = 0
    for part in config.parts:
        cells = tuple(c for c, _ in part)
        cells_per_part.append(cells)
        vs = frozenset(cells)
        vertex_sets.append(vs)
        if len(vs) < s:
            loops += 1

    counts: dict[int, int] = {j: 0 for j in range(1, j_max + 1)}
    counts[1] = loops
    overlap_pairs: dict[int, int] = {}

    # index parts by vertex, then tally shared-vertex multiplicities per pair
    by_vertex: dict[int, list[int]] = {}
    for i, vs in enumerate(vertex_sets):
        for v in vs:
            by_vertex.setdefault(v, []).append(i)
    shared_count: dict[tuple[int, int], int] = {}
    shared_vertex: dict[tuple[int, int], int] = {}
    for v, holders in by_vertex.items():
        if len(holders) < 2:
            continue
        for a, b in itertools.combinations(holders, 2):
            key = (a, b) if a < b else (b, a)
            shared_count[key] = shared_count.get(key, 0) + 1
            shared_vertex[key] = v

    adjacency: dict[int, list[int]] = {}
    loop_free = [len(vs) == s for vs in vertex_sets]
    for (a, b), c in shared_count.items():
        if c == 2:
            counts[2] = counts.get(2, 0) + 1
        elif c >= 3:
            overlap_pairs[c] = overlap_pairs.get(c, 0) + 1
        if c == 1 and loop_free[a] and loop_free[b]:
            adjacency.setdefault(a, []).append(b)
            adjacency.setdefault(b, []).append(a)
    if j_max < 2:
        counts.pop(2, None)
        return CycleCensus(j_max, counts, overlap_pairs)

    if j_max >= 3:
        for j in range(3, j_max + 1):
            counts[j] = _count_loose_cycles(j, adjacency, vertex_sets, shared_vertex)
    return CycleCensus(j_max, counts, overlap_pairs)


def _link(shared_vertex: Mapping[tuple[int, int], int], a: int, b: int) -> int:
    return shared_vertex[(a, b) if a < b else (b, a)]


def _count_loose_cycles(
    j: int,
    adjacency: Mapping[int, list[int]],
    vertex_sets: Sequence[frozenset[int]],
    shared_vertex: Mapping[tuple[int, int], int],
) -> int:
    """Count loose j-cycles by walking the part-adjacency graph.

    Each cycle is counted once: walks start at their smallest part and the
    second part is required to be smaller than the last, which pins the
    rotation and the reflection.  Adjacency already means "shares exactly
    one vertex", so the walk only has to enforce disjointness between
    non-adjacent positions; for j = 3 the three link vertices must also be
    distinct, which for j >= 4 follows from disjointness.
    """
    total = 0

    def walk(start: int, path: list[int]) -> int:
        found = 0
        last = path[-1]
        if len(path) == j:
            if start not in adjacency.get(last, ()):
                return 0
            if path[1] > path[-1]:
                return 0
            if j == 3:
                links = {
                    _link(shared_vertex, path[0], path[1]),
                    _link(shared_vertex, path[1], path[2]),
                    _link(shared_vertex, path[2], path[0]),
                }
                if len(links) < 3:
                    return 0
            return 1
        final_position = len(path) + 1 == j
        for q in adjacency.get(last, ()):
            if q <= start or q in path:
                continue
            vq = vertex_sets[q]
            # disjoint from every earlier part except the predecessor; the
            # start is exempt only for the final part, whose single shared
            # vertex with the start is what closes the cycle
            conflict = False
            for pos, p in enumerate(path[:-1]):
                if pos == 0 and final_position:
                    continue
                if vq & vertex_sets[p]:
                    conflict = True
                    break
            if conflict:
                continue
            path.append(q)
            found += walk(start, path)
            path.pop()
        return found

    for start in sorted(adjacency):
        total += walk(start, [start])
    return total
