"""Indivisible Nielsen paths, the Nielsen graph Σ and rank reports.

The map must be prepared (tight, filtered) with zero and level strata only.
For a level edge E with f(E) = E·u the Nielsen paths of that height start
with E and continue either with a path θ satisfying [u f(θ)] = θ, or with
a closed path β at τ(E) satisfying [u f(β) ū] = β followed by Ē.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import BoundExhausted, DuplicateINP, PreconditionFailed, ScopeError
from .graphs import GraphMap, Marking, transition_matrix
from .stallings import subgroup_rank
from .words import Word, free_reduce, invert_letters

DEFAULT_BOUND = 64

FIXED_LOOP = "FixedLoop"
E_BETA = "EBeta"
E_BETA_EBAR = "EBetaEbar"


class OrientationReversing(ScopeError):
    """A level edge whose image crosses it backwards."""


@dataclass(frozen=True)
class INP:
    height: int
    path: tuple[int, ...]
    start: int
    end: int
    shape: str
    edge: int
    beta: tuple[int, ...] = ()

    def text(self, m: GraphMap) -> str:
        return m.graph.format_path(self.path)


def _key(path):
    return tuple((abs(x), x < 0) for x in path)


def canonical_loop(path: tuple[int, ...]) -> tuple[int, ...]:
    """Orientation representative of a closed path: the smaller of β and β̄."""
    inv = invert_letters(path)
    return min(path, inv, key=_key)


def path_root(path: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Primitive root of a closed tight path, keeping its base point."""
    s, n = path, len(path)
    i = 0
    while 2 * i + 1 < n and s[i] == -s[n - 1 - i]:
        i += 1
    core, conj = s[i:n - i], s[:i]
    k = len(core)
    for p in range(1, k + 1):
        if k % p == 0 and core == core[:p] * (k // p):
            return free_reduce(conj + core[:p] + invert_letters(conj)), k // p
    raise AssertionError("unreachable")


def lower_component(m: GraphMap, r: int, v: int) -> tuple[set[int], set[int]]:
    """Vertices and edges of the component of G_{r-1} containing v."""
    g = m.graph
    lower = m.below(r)
    verts, edges = {v}, set()
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in g.outgoing(x):
            e = abs(y) - 1
            if e not in lower:
                continue
            edges.add(e)
            t = g.term(y)
            if t not in verts:
                verts.add(t)
                queue.append(t)
    return verts, edges


class _Search:
    def __init__(self, m: GraphMap, r: int, lead: int, u: tuple, bound: int):
        self.m, self.r, self.lead, self.u, self.bound = m, r, lead, u, bound
        self.g = m.graph
        self.base = self.g.term(lead)
        self.ubar = invert_letters(u)
        self.verts, self.edges = lower_component(m, r, self.base)
        self.fixed = {v for v in self.verts if m.vmap[v] == v}

    def psi(self, theta):
        return free_reduce(self.u + self.m.apply(theta))

    def chi(self, beta):
        return free_reduce(self.u + self.m.apply(beta) + self.ubar)

    def end(self, path):
        return self.g.term(path[-1]) if path else self.base

    def is_theta(self, theta) -> bool:
        return self.end(theta) in self.fixed and self.psi(theta) == theta

    def is_beta(self, beta) -> bool:
        return bool(beta) and self.end(beta) == self.base and self.chi(beta) == beta

    def iterates(self):
        cap = 2 * self.bound + 16
        theta, out = (), []
        for _ in range(min(self.bound, 8)):
            theta = self.psi(theta)
            out.append(theta)
            if len(theta) > cap:
                break
        return out

    def theta_from_prefixes(self, paths):
        best = None
        for p in paths:
            for i in range(1, len(p) + 1):
                if best is not None and i >= len(best):
                    break
                pre = p[:i]
                if self.is_theta(pre):
                    best = pre
                    break
        return best

    def beta_from_periods(self, paths):
        seen = set()
        for p in paths:
            n = len(p)
            for i in range(n):
                for ln in range(1, min(64, (n - i) // 2) + 1):
                    seg = p[i:i + ln]
                    if p[i + ln:i + 2 * ln] != seg:
                        continue
                    if self.g.init(seg[0]) != self.g.term(seg[-1]):
                        continue
                    cand = free_reduce(p[:i] + seg + invert_letters(p[:i]))
                    if cand in seen:
                        continue
                    seen.add(cand)
                    if self.is_beta(cand):
                        return cand
        return None

    def bfs(self, want_theta_only=False, max_depth=None):
        """Breadth-first scan of tight paths in the lower component.

        Returns (theta, beta, exhaustive).
        """
        depth_cap = self.bound if max_depth is None else min(self.bound, max_depth)
        budget = 256 * max(self.bound, 1)
        g = self.g
        frontier = [()]
        theta = beta = None
        nodes = 0
        exhaustive = True
        for depth in range(1, depth_cap + 1):
            nxt = []
            for p in frontier:
                last = p[-1] if p else None
                here = self.end(p)
                for x in g.outgoing(here):
                    if abs(x) - 1 not in self.edges or (last is not None and x == -last):
                        continue
                    q = p + (x,)
                    nodes += 1
                    if theta is None and self.is_theta(q):
                        theta = q
                    if beta is None and not want_theta_only and self.is_beta(q):
                        beta = q
                    elif beta is not None and self.is_beta(q):
                        self.check_duplicate(beta, q)
                    nxt.append(q)
            if theta is not None:
                return theta, beta, True
            if beta is not None and depth >= 2 * len(beta) + 2:
                return None, beta, True
            frontier = nxt
            if not frontier:
                return None, beta, True
            if nodes > budget:
                exhaustive = False
                break
        else:
            exhaustive = not frontier
        return None, beta, exhaustive and not frontier

    def check_duplicate(self, beta, other):
        r1, _ = path_root(beta)
        r2, _ = path_root(other)
        if r2 not in (r1, invert_letters(r1)):
            raise DuplicateINP(
                f"height {self.r + 1}: independent Nielsen loops "
                f"{self.g.format_path(r1)} and {self.g.format_path(r2)}")


def _lead_letter(m: GraphMap, e: int):
    """Return (lead, u) with f(lead) = lead·u, or None when E sits mid-image."""
    im = m.images[e]
    x = e + 1
    if -x in im:
        raise OrientationReversing(f"edge {m.graph.edges[e]} is reversed by the map")
    if im and im[0] == x:
        return x, im[1:]
    if im and im[-1] == x:
        return -x, invert_letters(im[:-1])
    raise PreconditionFailed(f"edge {m.graph.edges[e]} needs subdividing at a fixed point")


def find_inp(m: GraphMap, r: int, bound: int = DEFAULT_BOUND) -> INP | None:
    """The indivisible Nielsen path of height r (0-based stratum index), if any."""
    _, kind = transition_matrix(m, r)
    if kind == "zero":
        return None
    if kind == "exponential":
        raise PreconditionFailed("exponential strata are not searched")
    stratum = m.strata[r]
    if len(stratum) > 1:
        return None  # a cyclically permuted stratum cannot carry a Nielsen path
    (e,) = stratum
    g = m.graph
    lead, u = _lead_letter(m, e)
    a, b = g.init(lead), g.term(lead)
    if m.vmap[a] != a:
        return None
    if not u:
        if a == b:
            return _verified(m, INP(r, (e + 1,), a, a, FIXED_LOOP, e))
        path = (lead,)
        return _verified(m, INP(r, path, a, b, E_BETA, e))
    s = _Search(m, r, lead, u, bound)
    iterates = s.iterates()
    theta = s.theta_from_prefixes(iterates)
    if theta is None:
        beta = s.beta_from_periods(iterates)
        if beta is not None:
            beta, _ = path_root(beta)
            theta = s.theta_from_prefixes([beta, invert_letters(beta)])
            if theta is None:
                theta2, _, _ = s.bfs(want_theta_only=True, max_depth=2 * len(beta) + 2)
                theta = theta2
        else:
            theta, beta, exhaustive = s.bfs()
            if theta is None and beta is None:
                if exhaustive:
                    return None
                raise BoundExhausted(f"height {r + 1}", bound)
            if beta is not None:
                beta, _ = path_root(beta)
    else:
        beta = None
    if theta is not None:
        return _verified(m, INP(r, (lead,) + theta, a, s.end(theta), E_BETA, e, theta))
    beta = canonical_loop(beta)
    return _verified(m, INP(r, (lead,) + beta + (-lead,), a, a, E_BETA_EBAR, e, beta))


def _verified(m: GraphMap, inp: INP) -> INP:
    if m.apply(inp.path) != inp.path:
        raise AssertionError(f"certificate {inp.text(m)} is not a Nielsen path")
    return inp


# -- Σ and ranks -----------------------------------------------------------------

@dataclass
class NielsenGraph:
    m: GraphMap
    vertices: list[int]
    inps: list[INP]
    component: dict[int, int] = field(default_factory=dict)

    def edges_at_height(self, r: int) -> list[INP]:
        return [p for p in self.inps if p.height <= r]

    def components(self) -> list[list[int]]:
        comps: dict[int, list[int]] = {}
        for v in self.vertices:
            comps.setdefault(self.component[v], []).append(v)
        return sorted(comps.values())

    def component_rank(self, v: int) -> int:
        c = self.component[v]
        verts = sum(1 for w in self.vertices if self.component[w] == c)
        edges = sum(1 for p in self.inps if self.component[p.start] == c)
        return edges - verts + 1


def _union_find_components(vertices, pairs):
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return {v: find(v) for v in vertices}


def build_sigma(m: GraphMap, bound: int = DEFAULT_BOUND) -> NielsenGraph:
    inps = []
    for r in range(len(m.strata)):
        p = find_inp(m, r, bound)
        if p is not None:
            inps.append(p)
    verts = m.fixed_vertices()
    comp = _union_find_components(verts, [(p.start, p.end) for p in inps])
    return NielsenGraph(m, verts, inps, comp)


def reduced_rank(ranks) -> int:
    return 1 + sum(max(0, k - 1) for k in ranks)


def _graph_component_ranks(m: GraphMap, edges) -> list[int]:
    g = m.graph
    verts = sorted({v for e in edges for v in g.ends[e]})
    comp = _union_find_components(verts, [g.ends[e] for e in edges])
    count_v: dict[int, int] = {}
    count_e: dict[int, int] = {}
    for v in verts:
        count_v[comp[v]] = count_v.get(comp[v], 0) + 1
    for e in edges:
        c = comp[g.ends[e][0]]
        count_e[c] = count_e.get(c, 0) + 1
    return [count_e.get(c, 0) - count_v[c] + 1 for c in sorted(count_v)]


def _sigma_component_ranks(sg: NielsenGraph, inps) -> list[int]:
    comp = _union_find_components(sg.vertices, [(p.start, p.end) for p in inps])
    count_v: dict[int, int] = {}
    count_e: dict[int, int] = {}
    for v in sg.vertices:
        count_v[comp[v]] = count_v.get(comp[v], 0) + 1
    for p in inps:
        count_e[comp[p.start]] = count_e.get(comp[p.start], 0) + 1
    return [count_e.get(c, 0) - count_v[c] + 1 for c in sorted(count_v)]


@dataclass
class RankReport:
    components: list[tuple[int, int]]  # (first vertex, rank)
    sigma_reduced: list[int]
    graph_reduced: list[int]
    rank: int
    s: int
    maximal: bool
    n: int


def rank_report(sg: NielsenGraph, m: GraphMap | None = None) -> RankReport:
    m = m or sg.m
    n = m.graph.rank
    comps = [(c[0], sg.component_rank(c[0])) for c in sg.components()]
    rank = reduced_rank(k for _, k in comps)
    sigma_red, graph_red = [], []
    for r in range(len(m.strata)):
        sigma_red.append(reduced_rank(_sigma_component_ranks(sg, sg.edges_at_height(r))))
        graph_red.append(reduced_rank(_graph_component_ranks(m, m.below(r + 1))))
    s = sum(1 for _, k in comps if k >= 2)
    if n == 1 and rank == 1:
        s = 1
    return RankReport(comps, sigma_red, graph_red, rank, s, rank == n, n)


def fixed_subgroup_generators(sg: NielsenGraph, v: int, marking: Marking | None = None) -> list[Word]:
    """Words in the marking basis generating Fix π1(f, v)."""
    m = sg.m
    if v not in sg.component:
        raise PreconditionFailed(f"vertex index {v} is not a fixed vertex")
    marking = marking or Marking.spanning(m.graph, v)
    c = sg.component[v]
    inps = [p for p in sg.inps if sg.component[p.start] == c]
    # spanning tree of Σ^v by breadth-first search
    to_v: dict[int, tuple] = {v: ()}
    tree = set()
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for i, p in enumerate(inps):
            for a, b, path in ((p.start, p.end, p.path), (p.end, p.start, invert_letters(p.path))):
                if a == x and b not in to_v:
                    to_v[b] = to_v[x] + path
                    tree.add(i)
                    queue.append(b)
    conj = marking.connecting(marking.base, v)
    out = []
    for i, p in enumerate(inps):
        if i in tree:
            continue
        loop = free_reduce(to_v[p.start] + p.path + invert_letters(to_v[p.end]))
        out.append(marking.word(free_reduce(conj + loop + invert_letters(conj))))
    return out


# -- analysis -------------------------------------------------------------------------

@dataclass
class Analysis:
    m: GraphMap
    kinds: list[str]
    sigma: NielsenGraph
    report: RankReport

    def format(self) -> str:
        m = self.m
        g = m.graph
        out = ["analysis"]
        for i, (s, kind) in enumerate(zip(m.strata, self.kinds)):
            out.append(f"stratum {i + 1} {kind} {' '.join(g.edges[e] for e in s)}")
        for p in self.sigma.inps:
            out.append(f"inp {p.height + 1} {p.shape} {p.text(m)}")
        for v, k in self.report.components:
            out.append(f"component {g.vertices[v]} rank {k}")
        out.append(f"rank {self.report.rank}")
        out.append(f"s {self.report.s}")
        out.append(f"maximal {'true' if self.report.maximal else 'false'}")
        out.append("end")
        return "\n".join(out) + "\n"


def analyze(m: GraphMap, bound: int = DEFAULT_BOUND) -> Analysis:
    """Full analysis of a prepared map (see graphs.prepare)."""
    from .graphs import reject_exponential, subdivide_at_fixed_points

    reject_exponential(m)
    m = subdivide_at_fixed_points(m)
    kinds = m.kinds()
    sg = build_sigma(m, bound)
    return Analysis(m, kinds, sg, rank_report(sg, m))


def induced_at(m: GraphMap, v: int):
    marking = Marking.spanning(m.graph, v)
    from .graphs import induced_automorphism

    return induced_automorphism(m, marking), marking


def sigma_rank_check(sg: NielsenGraph, v: int) -> bool:
    gens = fixed_subgroup_generators(sg, v)
    aut, _ = induced_at(sg.m, v)
    return all(aut(w) == w for w in gens) and (
        subgroup_rank(gens, aut.basis) == sg.component_rank(v))
