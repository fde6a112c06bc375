"""Finite graphs, edge paths and topological representatives.

Edges are indexed from 0; in paths an edge is written as the signed int
``+(i+1)`` (traversed forwards) or ``-(i+1)`` (backwards), the same letter
convention the word module uses for generators.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import (
    EdgeImageCollapses,
    ExponentialStratum,
    InputError,
    MalformedIncidence,
    NotAForest,
    NotAnAutomorphism,
    NotInvariant,
    PreconditionFailed,
)
from .words import Basis, Endo, Word, format_letters, free_reduce, invert_letters, parse_letters

Path = tuple  # tuple[int, ...] of signed edge letters


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    ends: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.ends) != len(self.edges):
            raise MalformedIncidence("one (initial, terminal) pair per edge")
        for a, b in self.ends:
            if not (0 <= a < len(self.vertices) and 0 <= b < len(self.vertices)):
                raise MalformedIncidence("edge endpoint is not a vertex")
        names = list(self.vertices) + list(self.edges)
        if len(set(names)) != len(names):
            raise MalformedIncidence("vertex and edge names must be distinct")

    @classmethod
    def build(cls, vertices, edges) -> "Graph":
        """``edges`` is a list of ``(name, initial, terminal)`` using vertex names."""
        vertices = tuple(vertices)
        idx = {v: i for i, v in enumerate(vertices)}
        try:
            ends = tuple((idx[a], idx[b]) for _, a, b in edges)
        except KeyError as exc:
            raise MalformedIncidence(f"unknown vertex {exc.args[0]!r}") from None
        return cls(vertices, tuple(e for e, _, _ in edges), ends)

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def rank(self) -> int:
        return self.num_edges - self.num_vertices + 1

    def init(self, x: int) -> int:
        a, b = self.ends[abs(x) - 1]
        return a if x > 0 else b

    def term(self, x: int) -> int:
        a, b = self.ends[abs(x) - 1]
        return b if x > 0 else a

    def is_loop(self, e: int) -> bool:
        a, b = self.ends[e]
        return a == b

    def valence(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b in self.ends)

    def outgoing(self, v: int) -> list[int]:
        """Signed letters starting at v, in a fixed order."""
        out = []
        for i, (a, b) in enumerate(self.ends):
            if a == v:
                out.append(i + 1)
            if b == v:
                out.append(-(i + 1))
        return out

    def vertex(self, name: str) -> int:
        try:
            return self.vertices.index(name)
        except ValueError:
            raise InputError(f"unknown vertex {name!r}") from None

    def edge(self, name: str) -> int:
        try:
            return self.edges.index(name)
        except ValueError:
            raise InputError(f"unknown edge {name!r}") from None

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {0}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for x in self.outgoing(v):
                u = self.term(x)
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == self.num_vertices

    def path_ok(self, path: Sequence[int], start: int | None = None) -> bool:
        for x in path:
            if x == 0 or abs(x) > self.num_edges:
                return False
        if start is not None and path and self.init(path[0]) != start:
            return False
        return all(self.term(x) == self.init(y) for x, y in zip(path, path[1:]))

    def parse_path(self, text: str) -> Path:
        path = tuple(parse_letters(text, self.edges))
        if not self.path_ok(path):
            raise InputError(f"{text!r} is not an edge path")
        return path

    def format_path(self, path: Sequence[int]) -> str:
        return format_letters(path, self.edges)


@dataclass(frozen=True)
class EdgePath:
    graph: Graph
    letters: tuple[int, ...]
    start: int

    def __post_init__(self):
        if not self.graph.path_ok(self.letters, self.start):
            raise MalformedIncidence(f"edges {self.letters} do not form a path")

    @property
    def end(self) -> int:
        return self.graph.term(self.letters[-1]) if self.letters else self.start

    @property
    def tight(self) -> bool:
        return all(x != -y for x, y in zip(self.letters, self.letters[1:]))

    def tightened(self) -> "EdgePath":
        return EdgePath(self.graph, free_reduce(self.letters), self.start)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return self.graph.format_path(self.letters)


@dataclass(frozen=True)
class GraphMap:
    """A graph self-map: vertex map plus one edge path per edge.

    ``strata`` is None until :func:`compute_filtration` installs it; it is a
    tuple of strata, each a tuple of edge indices, lowest first.
    """

    graph: Graph
    vmap: tuple[int, ...]
    images: tuple[Path, ...]
    strata: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        g = self.graph
        if len(self.vmap) != g.num_vertices or len(self.images) != g.num_edges:
            raise MalformedIncidence("map must give one image per vertex and per edge")
        for v in self.vmap:
            if not 0 <= v < g.num_vertices:
                raise MalformedIncidence("vertex image is not a vertex")
        for e, im in enumerate(self.images):
            a, b = g.ends[e]
            if not g.path_ok(im):
                raise MalformedIncidence(f"image of {g.edges[e]} is not an edge path")
            if im:
                if g.init(im[0]) != self.vmap[a] or g.term(im[-1]) != self.vmap[b]:
                    raise MalformedIncidence(
                        f"image of {g.edges[e]} does not join the images of its endpoints")

    def image(self, e: int) -> EdgePath:
        a, _ = self.graph.ends[e]
        return EdgePath(self.graph, self.images[e], self.vmap[a])

    def apply(self, path: Sequence[int]) -> Path:
        out: list[int] = []
        for x in path:
            piece = self.images[x - 1] if x > 0 else invert_letters(self.images[-x - 1])
            for y in piece:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    def vertex_image(self, v: int) -> int:
        return self.vmap[v]

    def stratum_of(self, e: int) -> int:
        if self.strata is None:
            raise PreconditionFailed("filtration not computed")
        for i, s in enumerate(self.strata):
            if e in s:
                return i
        raise AssertionError("edge missing from filtration")

    def height(self, path: Sequence[int]) -> int:
        return max((self.stratum_of(abs(x) - 1) for x in path), default=-1)

    def below(self, r: int) -> frozenset[int]:
        """Edges of G_{r-1}: those in strata strictly below r."""
        return frozenset(e for s in self.strata[:r] for e in s)

    def fixed_vertices(self) -> list[int]:
        return [v for v in range(self.graph.num_vertices) if self.vmap[v] == v]

    def is_fixed_edge(self, e: int) -> bool:
        return self.images[e] == (e + 1,)

    def kinds(self) -> list[str]:
        return [transition_matrix(self, i)[1] for i in range(len(self.strata))]

    def __str__(self):
        from .formats import format_graphmap

        return format_graphmap(self)


def make_graphmap(graph: Graph, vmap: dict | Sequence, images: dict | Sequence) -> GraphMap:
    """Build a map from name-based data, e.g. ``images={"b": "b a"}``."""
    if isinstance(vmap, dict):
        vmap = [graph.vertex(vmap[v]) for v in graph.vertices]
    if isinstance(images, dict):
        images = [images[e] for e in graph.edges]
    images = [graph.parse_path(im) if isinstance(im, str) else tuple(im) for im in images]
    return GraphMap(graph, tuple(vmap), tuple(images))


# -- tightening and filtration -------------------------------------------------

def tighten(m: GraphMap) -> GraphMap:
    g = m.graph
    images = []
    for e, im in enumerate(m.images):
        red = free_reduce(im)
        a, b = g.ends[e]
        if not red and m.vmap[a] != m.vmap[b]:
            raise EdgeImageCollapses(f"image of {g.edges[e]} collapses between distinct vertices")
        images.append(red)
    if tuple(images) == m.images:
        return m
    return GraphMap(g, m.vmap, tuple(images), None)


def _sccs(n: int, succ: list[set[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if root in index:
            continue
        work = [(root, iter(sorted(succ[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if u not in index:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack.add(u)
                    work.append((u, iter(sorted(succ[u]))))
                    advanced = True
                    break
                if u in on_stack:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack.discard(u)
                    comp.append(u)
                    if u == v:
                        break
                out.append(sorted(comp))
    return out


def dependencies(m: GraphMap) -> list[set[int]]:
    return [{abs(x) - 1 for x in im} for im in m.images]


def compute_filtration(m: GraphMap) -> GraphMap:
    """Install strata: SCCs of the dependency digraph in a deterministic
    topological order (lower strata first); consecutive zero SCCs with no
    dependency between them share a single zero stratum."""
    deps = dependencies(m)
    n = m.graph.num_edges
    comps = _sccs(n, deps)
    comp_of = {e: i for i, c in enumerate(comps) for e in c}
    # c must come after every component it depends on
    needs = [set() for _ in comps]
    users = [set() for _ in comps]
    for e in range(n):
        for d in deps[e]:
            ce, cd = comp_of[e], comp_of[d]
            if ce != cd:
                needs[ce].add(cd)
                users[cd].add(ce)
    remaining = [len(s) for s in needs]
    heap = [(comps[i][0], i) for i in range(len(comps)) if remaining[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, i = heapq.heappop(heap)
        order.append(i)
        for j in users[i]:
            remaining[j] -= 1
            if remaining[j] == 0:
                heapq.heappush(heap, (comps[j][0], j))

    def is_zero(i):
        c = comps[i]
        return len(c) == 1 and c[0] not in deps[c[0]]

    strata: list[list[int]] = []
    zero_group: list[int] | None = None
    for i in order:
        if is_zero(i):
            if zero_group is not None and not any(comp_of[d] in zero_group for d in deps[comps[i][0]]):
                zero_group.append(i)
                strata[-1].extend(comps[i])
                continue
            zero_group = [i]
            strata.append(list(comps[i]))
        else:
            zero_group = None
            strata.append(list(comps[i]))
    return replace(m, strata=tuple(tuple(sorted(s)) for s in strata))


def prepare(m: GraphMap) -> GraphMap:
    return compute_filtration(tighten(m))


def transition_matrix(m: GraphMap, index: int) -> tuple[list[list[int]], str]:
    if m.strata is None:
        raise PreconditionFailed("filtration not computed")
    edges = m.strata[index]
    pos = {e: i for i, e in enumerate(edges)}
    mat = [[0] * len(edges) for _ in edges]
    for i, e in enumerate(edges):
        for x in m.images[e]:
            j = pos.get(abs(x) - 1)
            if j is not None:
                mat[i][j] += 1
    if all(v == 0 for row in mat for v in row):
        kind = "zero"
    elif all(sorted(row) == [0] * (len(row) - 1) + [1] for row in mat) and all(
        sum(col) == 1 for col in zip(*mat)
    ):
        kind = "level"
    else:
        kind = "exponential"
    return mat, kind


def reject_exponential(m: GraphMap) -> None:
    for i, s in enumerate(m.strata):
        mat, kind = transition_matrix(m, i)
        if kind == "exponential":
            raise ExponentialStratum(i + 1, [m.graph.edges[e] for e in s], mat)


# -- subdivision ---------------------------------------------------------------------

def _fresh(taken: set[str], name: str) -> str:
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def subdivide_at_fixed_points(m: GraphMap) -> GraphMap:
    """Subdivide every level edge with f(E) = u1·E·u2, u1 and u2 nonempty,
    at the interior fixed point."""
    if m.strata is None:
        m = compute_filtration(m)
    g = m.graph
    targets = {}
    for i, s in enumerate(m.strata):
        if len(s) != 1 or transition_matrix(m, i)[1] != "level":
            continue
        (e,) = s
        im = m.images[e]
        k = im.index(e + 1) if (e + 1) in im else -1
        if 0 < k < len(im) - 1:
            targets[e] = (im[:k], im[k + 1:])
    if not targets:
        return m
    taken = set(g.vertices) | set(g.edges)
    vertices = list(g.vertices)
    names: list[str] = []
    ends: list[tuple[int, int]] = []
    vmap = list(m.vmap)
    new_letters: dict[int, tuple[int, ...]] = {}  # old edge -> path in new graph
    counter = 0
    for e in range(g.num_edges):
        if e in targets:
            counter += 1
            v = len(vertices)
            vertices.append(_fresh(taken, f"v_{g.edges[e]}_{counter}"))
            vmap.append(v)
            a, b = g.ends[e]
            names.append(_fresh(taken, g.edges[e] + "_1"))
            ends.append((a, v))
            names.append(_fresh(taken, g.edges[e] + "_2"))
            ends.append((v, b))
            new_letters[e] = (len(names) - 1, len(names))
        else:
            names.append(g.edges[e])
            ends.append(g.ends[e])
            new_letters[e] = (len(names),)

    def lift(path):
        out = []
        for x in path:
            piece = new_letters[abs(x) - 1]
            out.extend(piece if x > 0 else invert_letters(piece))
        return tuple(out)

    images = []
    for e in range(g.num_edges):
        if e in targets:
            u1, u2 = targets[e]
            e1, e2 = new_letters[e]
            images.append(lift(u1) + (e1,))
            images.append((e2,) + lift(u2))
        else:
            images.append(lift(m.images[e]))
    g2 = Graph(tuple(vertices), tuple(names), tuple(ends))
    return compute_filtration(GraphMap(g2, tuple(vmap), tuple(images)))


# -- markings and induced automorphisms --------------------------------------------

@dataclass(frozen=True)
class Marking:
    graph: Graph
    base: int
    tree: frozenset[int]
    basis: Basis
    basis_edges: tuple[int, ...]
    parent: tuple = field(repr=False, compare=False, default=())

    @classmethod
    def spanning(cls, graph: Graph, base: int = 0) -> "Marking":
        parent: dict[int, int | None] = {base: None}
        tree = set()
        queue = deque([base])
        while queue:
            v = queue.popleft()
            for x in graph.outgoing(v):
                u = graph.term(x)
                if u not in parent:
                    parent[u] = x
                    tree.add(abs(x) - 1)
                    queue.append(u)
        if len(parent) != graph.num_vertices:
            raise MalformedIncidence("graph is not connected")
        free = tuple(e for e in range(graph.num_edges) if e not in tree)
        if not free:
            raise InputError("graph has trivial fundamental group")
        basis = Basis(tuple(graph.edges[e] for e in free))
        par = tuple(parent.get(v) for v in range(graph.num_vertices))
        return cls(graph, base, frozenset(tree), basis, free, par)

    def tree_path(self, v: int) -> Path:
        """Tree path from the base to v."""
        out = []
        while self.parent[v] is not None:
            x = self.parent[v]
            out.append(x)
            v = self.graph.init(x)
        return tuple(reversed(out))

    def connecting(self, u: int, v: int) -> Path:
        """Tight tree path from u to v."""
        return free_reduce(invert_letters(self.tree_path(u)) + self.tree_path(v))

    def word(self, path: Sequence[int]) -> Word:
        """The element of the marking basis read off a closed path at the base."""
        pos = {e: i for i, e in enumerate(self.basis_edges)}
        out = []
        for x in path:
            i = pos.get(abs(x) - 1)
            if i is not None:
                out.append(i + 1 if x > 0 else -(i + 1))
        return Word(self.basis, free_reduce(out))

    def path(self, w: Word) -> Path:
        """Closed path at the base realising w."""
        out: list[int] = []
        for y in w.letters:
            e = self.basis_edges[abs(y) - 1]
            a, b = self.graph.ends[e]
            if y > 0:
                out += self.tree_path(a) + (e + 1,) + invert_letters(self.tree_path(b))
            else:
                out += self.tree_path(b) + (-(e + 1),) + invert_letters(self.tree_path(a))
        return free_reduce(out)

    def generator_loop(self, i: int) -> Path:
        return self.path(self.basis.gen(i))


def rose(basis: Basis, vertex: str = "v0") -> Graph:
    return Graph((vertex,), basis.names, tuple((0, 0) for _ in basis.names))


def rose_of(aut: Endo) -> tuple[GraphMap, Marking]:
    from .words import invert_automorphism

    invert_automorphism(aut)
    g = rose(aut.basis)
    m = GraphMap(g, (0,), tuple(im.letters for im in aut.images))
    return prepare(m), Marking.spanning(g, 0)


def induced_automorphism(m: GraphMap, marking: Marking, mu: Sequence[int] | None = None) -> Endo:
    """π1(f, μ): sends a closed path α at the base to [μ̄ f(α) μ].

    μ runs from f(base) to base; it may be omitted when the base is fixed.
    """
    v = marking.base
    if mu is None:
        if m.vmap[v] != v:
            raise PreconditionFailed("base vertex is not fixed and no connecting path was given")
        mu = ()
    mu = tuple(mu)
    g = m.graph
    if not g.path_ok(mu) or (mu and (g.init(mu[0]) != m.vmap[v] or g.term(mu[-1]) != v)):
        raise PreconditionFailed("connecting path must run from f(base) to base")
    images = []
    for i in range(marking.basis.rank):
        loop = marking.generator_loop(i)
        images.append(marking.word(free_reduce(invert_letters(mu) + m.apply(loop) + mu)))
    return Endo(marking.basis, tuple(images))


def standard_automorphism(m: GraphMap, base: int = 0) -> tuple[Endo, Marking]:
    """Induced automorphism at ``base`` using the tree path back to the base."""
    marking = Marking.spanning(m.graph, base)
    mu = marking.connecting(m.vmap[base], base)
    return induced_automorphism(m, marking, mu), marking


def validate_graphmap(m: GraphMap) -> GraphMap:
    """Tighten, check connectivity and that the map is a homotopy equivalence."""
    if not m.graph.is_connected():
        raise MalformedIncidence("graph is not connected")
    m = tighten(m)
    aut, _ = standard_automorphism(m)
    from .words import invert_automorphism

    try:
        invert_automorphism(aut)
    except NotAnAutomorphism as exc:
        raise NotAnAutomorphism(f"map is not a homotopy equivalence: {exc}") from None
    return compute_filtration(m)


# -- morphisms between graphs ------------------------------------------------------

@dataclass(frozen=True)
class Morphism:
    """A graph map between different graphs (used for collapse and slide)."""

    source: Graph
    target: Graph
    vmap: tuple[int, ...]
    images: tuple[Path, ...]

    def apply(self, path: Sequence[int]) -> Path:
        out: list[int] = []
        for x in path:
            piece = self.images[x - 1] if x > 0 else invert_letters(self.images[-x - 1])
            for y in piece:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    @classmethod
    def identity(cls, g: Graph) -> "Morphism":
        return cls(g, g, tuple(range(g.num_vertices)), tuple((e + 1,) for e in range(g.num_edges)))


def compose_morphisms(p: Morphism, q: Morphism) -> Morphism:
    """p then q."""
    return Morphism(p.source, q.target, tuple(q.vmap[v] for v in p.vmap),
                    tuple(q.apply(im) for im in p.images))


def commuting_witness(m1: GraphMap, m2: GraphMap, p: Morphism, tracks=None) -> int | None:
    """First edge e where p∘f1 and f2∘p disagree, or None.

    ``tracks[v]`` is a path in the target from p(f1(v)) to f2(p(v)); the
    default is the trivial track, which needs the vertex maps to agree.
    """
    g1 = m1.graph
    if tracks is None:
        for v in range(g1.num_vertices):
            if p.vmap[m1.vmap[v]] != m2.vmap[p.vmap[v]]:
                return -1
        tracks = [()] * g1.num_vertices
    for e in range(g1.num_edges):
        a, b = g1.ends[e]
        lhs = free_reduce(p.apply(m1.images[e]) + tuple(tracks[b]))
        rhs = free_reduce(tuple(tracks[a]) + m2.apply(p.images[e]))
        if lhs != rhs:
            return e
    return None


def homotopy_commutes(m1: GraphMap, m2: GraphMap, p: Morphism, tracks=None) -> bool:
    return commuting_witness(m1, m2, p, tracks) is None


# -- collapsing --------------------------------------------------------------------

def _forest_classes(g: Graph, forest: frozenset[int]):
    parent = list(range(g.num_vertices))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in sorted(forest):
        a, b = map(find, g.ends[e])
        if a == b:
            raise NotAForest(f"edge {g.edges[e]} closes a cycle in the forest")
        parent[max(a, b)] = min(a, b)
    return find


def collapse_forest(m: GraphMap, forest, prefer=None):
    """Collapse each component of ``forest`` to a vertex.

    Returns ``(new map, p, q, tracks)``: the quotient p, a homotopy inverse
    q and vertex tracks under which p commutes with the maps.  Each class is
    represented by its first vertex in ``prefer`` order (a callable key)
    when computing q.  The new map is [p f q].
    """
    g = m.graph
    forest = frozenset(forest)
    for e in forest:
        if not 0 <= e < g.num_edges:
            raise NotAForest("forest edge out of range")
    find = _forest_classes(g, forest)
    classes: dict[int, list[int]] = {}
    for v in range(g.num_vertices):
        classes.setdefault(find(v), []).append(v)
    roots = sorted(classes)
    key = prefer or (lambda v: v)
    rep = {r: min(classes[r], key=lambda v: (key(v), v)) for r in roots}
    new_index = {r: i for i, r in enumerate(roots)}
    vertices = tuple(g.vertices[rep[r]] for r in roots)
    kept = [e for e in range(g.num_edges) if e not in forest]
    edge_index = {e: i + 1 for i, e in enumerate(kept)}
    ends = tuple((new_index[find(g.ends[e][0])], new_index[find(g.ends[e][1])]) for e in kept)
    g2 = Graph(vertices, tuple(g.edges[e] for e in kept), ends)

    p_images = tuple((edge_index[e],) if e in edge_index else () for e in range(g.num_edges))
    p = Morphism(g, g2, tuple(new_index[find(v)] for v in range(g.num_vertices)), p_images)

    # tree paths inside the forest from each vertex to its representative
    to_rep: dict[int, Path] = {}
    for r in roots:
        start = rep[r]
        to_rep[start] = ()
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for x in g.outgoing(v):
                if abs(x) - 1 in forest:
                    u = g.term(x)
                    if u not in to_rep:
                        to_rep[u] = (-x,) + to_rep[v]
                        queue.append(u)
    q_images = []
    for e in kept:
        a, b = g.ends[e]
        q_images.append(free_reduce(invert_letters(to_rep[a]) + (e + 1,) + to_rep[b]))
    q = Morphism(g2, g, tuple(rep[r] for r in roots), tuple(q_images))

    images = tuple(free_reduce(p.apply(m.apply(qi))) for qi in q_images)
    vmap = tuple(p.vmap[m.vmap[rep[r]]] for r in roots)
    # p∘f and f'∘p differ by the tracks p(f(path from v to its representative))
    tracks = tuple(free_reduce(p.apply(m.apply(to_rep[v]))) for v in range(g.num_vertices))
    return compute_filtration(GraphMap(g2, vmap, images)), p, q, tracks


def collapse_invariant_forest(m: GraphMap, forest) -> tuple[GraphMap, Morphism]:
    g = m.graph
    forest = frozenset(forest)
    for e in forest:
        if g.is_loop(e):
            raise NotAForest(f"edge {g.edges[e]} is a loop")
    find = _forest_classes(g, forest)
    for e in forest:
        if any(abs(x) - 1 not in forest for x in m.images[e]):
            raise NotInvariant(f"image of {g.edges[e]} leaves the forest")
        a, b = g.ends[e]
        if find(m.vmap[a]) != find(m.vmap[b]):
            raise NotInvariant(f"image of {g.edges[e]} leaves its component")
    m2, p, _, _ = collapse_forest(m, forest)
    return m2, p


# -- homotopies and orientation -----------------------------------------------------

def move_vertices(m: GraphMap, tracks: dict[int, Path]) -> GraphMap:
    """Homotope f along vertex tracks: τ_v runs from f(v) to the new f(v)."""
    g = m.graph
    vmap = list(m.vmap)
    for v, t in tracks.items():
        t = tuple(t)
        if not g.path_ok(t, m.vmap[v]):
            raise PreconditionFailed("vertex track is not a path from f(v)")
        vmap[v] = g.term(t[-1]) if t else m.vmap[v]
    images = []
    for e, im in enumerate(m.images):
        a, b = g.ends[e]
        images.append(free_reduce(invert_letters(tuple(tracks.get(a, ()))) + im + tuple(tracks.get(b, ()))))
    return compute_filtration(tighten(GraphMap(g, tuple(vmap), tuple(images))))


def reorient(m: GraphMap, edges) -> tuple[GraphMap, Morphism]:
    """Reverse the orientation of the given edges (names unchanged)."""
    g = m.graph
    flip = set(edges)
    sign = [(-1 if e in flip else 1) for e in range(g.num_edges)]

    def conv(path):
        return tuple(x * sign[abs(x) - 1] for x in path)

    ends = tuple((b, a) if e in flip else (a, b) for e, (a, b) in enumerate(g.ends))
    g2 = Graph(g.vertices, g.edges, ends)
    images = []
    for e in range(g.num_edges):
        im = conv(m.images[e])
        images.append(invert_letters(im) if e in flip else im)
    p = Morphism(g, g2, tuple(range(g.num_vertices)), tuple(((e + 1) * sign[e],) for e in range(g.num_edges)))
    return GraphMap(g2, m.vmap, tuple(images), m.strata), p
