"""Sliding moves and the normalization pipeline to a good representative.

A good representative has every vertex fixed, fixed subgroup of rank at
least two at every vertex, and every edge either a fixed loop or mapped as
E ↦ E·β^k with β a closed Nielsen path at τ(E) in lower strata.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    BoundExhausted,
    ExponentialStratum,
    NotGoodRepresentative,
    NotMaximalRank,
    PreconditionFailed,
    ScopeError,
)
from .graphs import (
    Graph,
    GraphMap,
    Morphism,
    collapse_forest,
    collapse_invariant_forest,
    commuting_witness,
    compute_filtration,
    prepare,
    reject_exponential,
    reorient,
    rose_of,
    subdivide_at_fixed_points,
    tighten,
    transition_matrix,
    validate_graphmap,
)
from .nielsen import (
    DEFAULT_BOUND,
    E_BETA,
    E_BETA_EBAR,
    Analysis,
    analyze,
    canonical_loop,
    path_root,
)
from .stallings import subgroup_rank
from .words import Endo, conjugation, compose, free_reduce, invert_letters

DEFAULT_BUDGET = 400


# -- sliding -------------------------------------------------------------------------

def slide(m: GraphMap, e: int, alpha) -> tuple[GraphMap, Morphism]:
    """Slide the level edge e (with f(E) = E·u) along the lower path alpha.

    E is replaced by E' = E·alpha, with f'(E') = E'·[ᾱ u f(α)], and higher
    images have E rewritten as E'·ᾱ.
    """
    g = m.graph
    alpha = tuple(alpha)
    if m.strata is None:
        m = compute_filtration(m)
    r = m.stratum_of(e)
    if len(m.strata[r]) != 1 or transition_matrix(m, r)[1] != "level":
        raise PreconditionFailed(f"{g.edges[e]} is not a level edge")
    im = m.images[e]
    if not im or im[0] != e + 1:
        raise PreconditionFailed(f"image of {g.edges[e]} does not start with it")
    lower = m.below(r)
    if any(abs(x) - 1 not in lower for x in alpha):
        raise PreconditionFailed("slide path must lie in lower strata")
    a, b = g.ends[e]
    if not g.path_ok(alpha, b):
        raise PreconditionFailed("slide path must start at the terminal vertex")
    if not alpha:
        return m, Morphism.identity(g)
    end = g.term(alpha[-1])
    ends = list(g.ends)
    ends[e] = (a, end)
    g2 = Graph(g.vertices, g.edges, tuple(ends))
    abar = invert_letters(alpha)
    u = im[1:]
    x = e + 1

    def rewrite(path):
        out = []
        for y in path:
            if y == x:
                out += [x, *abar]
            elif y == -x:
                out += [*alpha, -x]
            else:
                out.append(y)
        return free_reduce(out)

    images = []
    for i, img in enumerate(m.images):
        if i == e:
            images.append((x,) + free_reduce(abar + u + m.apply(alpha)))
        else:
            images.append(rewrite(img))
    m2 = GraphMap(g2, m.vmap, tuple(images), m.strata)
    p = Morphism(g, g2, tuple(range(g.num_vertices)),
                 tuple((x,) + abar if i == e else (i + 1,) for i in range(g.num_edges)))
    return m2, p


# -- Nielsen conjugates ------------------------------------------------------------

def _is_cyclic_rotation(a, b) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = a + a
    return any(doubled[i:i + len(a)] == b for i in range(len(a)))


def _circuit(path):
    s, n = path, len(path)
    i = 0
    while 2 * i + 1 < n and s[i] == -s[n - 1 - i]:
        i += 1
    return s[:i], s[i:n - i]


def find_nielsen_conjugate(m: GraphMap, alpha, bound: int = DEFAULT_BOUND,
                           analysis: Analysis | None = None, within=None, min_rank: int = 2):
    """Path η with [η̄ α η] a closed Nielsen path at a vertex whose Nielsen
    component has rank at least ``min_rank``.  ``within`` restricts η to a
    set of edges."""
    g = m.graph
    alpha = free_reduce(tuple(alpha))
    if not alpha or g.init(alpha[0]) != g.term(alpha[-1]):
        raise PreconditionFailed("expected a nontrivial closed path")
    _, core = _circuit(alpha)
    _, fcore = _circuit(free_reduce(m.apply(alpha)))
    if not _is_cyclic_rotation(core, fcore):
        raise PreconditionFailed("the free homotopy class of the loop is not invariant")
    analysis = analysis or analyze(m, bound)
    sg = analysis.sigma

    def good(eta):
        gamma = free_reduce(invert_letters(eta) + alpha + eta)
        w = g.term(eta[-1]) if eta else g.init(alpha[0])
        return (w in sg.component and sg.component_rank(w) >= min_rank
                and m.apply(gamma) == gamma)

    start = g.init(alpha[0])
    allowed = within if within is not None else set(range(g.num_edges))
    # rotations of the cyclic core first
    pre, core = _circuit(alpha)
    cands = [()] + [free_reduce(pre + core[:i]) for i in range(1, len(core))]
    for eta in sorted(set(cands), key=lambda p: (len(p), p)):
        if all(abs(x) - 1 in allowed for x in eta) and g.path_ok(eta, start) and good(eta):
            return eta
    frontier = [()]
    budget = 256 * max(bound, 1)
    nodes = 0
    for _ in range(bound):
        nxt = []
        for p in frontier:
            here = g.term(p[-1]) if p else start
            for x in g.outgoing(here):
                if abs(x) - 1 not in allowed or (p and x == -p[-1]):
                    continue
                q = p + (x,)
                nodes += 1
                if good(q):
                    return q
                nxt.append(q)
        frontier = nxt
        if not frontier or nodes > budget:
            break
    raise BoundExhausted("Nielsen conjugate", bound)


# -- checker ----------------------------------------------------------------------

def good_problems(m: GraphMap) -> list[str]:
    """Independent check of the three good-representative properties.

    Works by direct substitution; does not use the Nielsen path search.
    """
    from .graphs import Marking

    g = m.graph
    problems = []
    m = compute_filtration(tighten(m)) if m.strata is None else m
    for v in range(g.num_vertices):
        if m.vmap[v] != v:
            problems.append(f"vertex {g.vertices[v]} is not fixed")
    loops_at: dict[int, list] = {v: [] for v in range(g.num_vertices)}
    for e in range(g.num_edges):
        name = g.edges[e]
        im = m.images[e]
        a, b = g.ends[e]
        if im == (e + 1,):
            if a != b:
                problems.append(f"fixed edge {name} is not a loop")
            else:
                loops_at[a].append((e + 1,))
            continue
        if im and im[0] == e + 1:
            lead, w = e + 1, im[1:]
        elif im and im[-1] == e + 1:
            lead, w = -(e + 1), invert_letters(im[:-1])
        else:
            problems.append(f"edge {name} is not of the form E·w")
            continue
        start, end = g.init(lead), g.term(lead)
        if not w or g.init(w[0]) != end or g.term(w[-1]) != end:
            problems.append(f"edge {name}: trailing path is not closed at its terminal vertex")
            continue
        beta, k = path_root(w)
        if m.apply(beta) != beta:
            problems.append(f"edge {name}: {g.format_path(beta)} is not a Nielsen path")
            continue
        r = m.stratum_of(e)
        if any(m.stratum_of(abs(x) - 1) >= r for x in beta):
            problems.append(f"edge {name}: {g.format_path(beta)} is not in lower strata")
            continue
        nielsen = (lead,) + beta + (-lead,)
        if m.apply(nielsen) != nielsen:
            problems.append(f"edge {name}: E β Ē is not a Nielsen path")
            continue
        loops_at[start].append(nielsen)
    if problems:
        return problems
    for v in range(g.num_vertices):
        marking = Marking.spanning(g, v)
        words = [marking.word(p) for p in loops_at[v]]
        rank = subgroup_rank(words, marking.basis) if words else 0
        if rank < 2 and g.rank >= 2:
            problems.append(f"vertex {g.vertices[v]} has fixed subgroup rank {rank}")
    return problems


def is_good(m: GraphMap) -> bool:
    return not good_problems(m)


def twist_data(m: GraphMap, e: int):
    """For an edge of a good representative: (lead letter, β, k), or None for
    a fixed loop.  β is in canonical orientation."""
    im = m.images[e]
    if im == (e + 1,):
        return None
    if im[0] == e + 1:
        lead, w = e + 1, im[1:]
    else:
        lead, w = -(e + 1), invert_letters(im[:-1])
    root, k = path_root(w)
    beta = canonical_loop(root)
    if beta != root:
        k = -k
    return lead, beta, k


# -- pipeline ------------------------------------------------------------------------

@dataclass
class Stage:
    move: str
    before: GraphMap
    after: GraphMap
    p: Morphism
    tracks: tuple | None = None

    def commutes(self) -> bool:
        return commuting_witness(self.before, self.after, self.p, self.tracks) is None


@dataclass
class Normalized:
    m: GraphMap
    log: list[str] = field(default_factory=list)
    stages: list[Stage] = field(default_factory=list)
    analysis: Analysis | None = None


class _Pipeline:
    def __init__(self, m: GraphMap, bound: int, budget: int):
        self.m = m
        self.bound = bound
        self.budget = budget
        self.log: list[str] = []
        self.stages: list[Stage] = []
        self.moves = 0

    def record(self, move, after, p, tracks=None):
        stage = Stage(move, self.m, after, p, tracks)
        if not stage.commutes():
            raise AssertionError(f"move '{move}' broke the commuting square")
        self.stages.append(stage)
        self.log.append(move)
        self.m = after
        self.moves += 1
        if self.moves > self.budget:
            raise NotGoodRepresentative(f"move budget {self.budget} exhausted")

    # moves -----------------------------------------------------------------

    def prune_valence_one(self):
        changed = True
        while changed:
            changed = False
            g = self.m.graph
            for v in range(g.num_vertices):
                if g.valence(v) == 1 and g.num_vertices > 1:
                    (x,) = g.outgoing(v)
                    e = abs(x) - 1
                    other = g.term(x)
                    m2, p, _, tracks = collapse_forest(self.m, {e}, prefer=lambda w, o=other: w != o)
                    m2 = self._reprepare(m2)
                    self.record(f"prune {g.edges[e]}", m2, p, tracks)
                    changed = True
                    break

    def _reprepare(self, m):
        m = compute_filtration(tighten(m))
        reject_exponential(m)
        return m

    def subdivide(self):
        m2 = subdivide_at_fixed_points(self.m)
        if m2.graph == self.m.graph:
            return False
        g, g2 = self.m.graph, m2.graph
        images = []
        for e, name in enumerate(g.edges):
            if name in g2.edges:
                images.append((g2.edge(name) + 1,))
            else:
                images.append((g2.edge(name + "_1") + 1, g2.edge(name + "_2") + 1))
        p = Morphism(g, g2, tuple(range(g.num_vertices)), tuple(images))
        split = [n for n in g.edges if n not in g2.edges]
        self.record("subdivide " + " ".join(split), m2, p)
        return True

    def collapse_fixed_forest(self) -> bool:
        m = self.m
        g = m.graph
        parent = list(range(g.num_vertices))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        forest = []
        for e in range(g.num_edges):
            a, b = g.ends[e]
            if a != b and m.is_fixed_edge(e) and find(a) != find(b):
                parent[find(a)] = find(b)
                forest.append(e)
        if not forest:
            return False
        m2, p = collapse_invariant_forest(m, forest)
        self.record("collapse " + " ".join(g.edges[e] for e in forest), m2, p)
        return True

    def _lead_positive(self, e):
        """Reorient e when its image ends with it."""
        im = self.m.images[e]
        if im and im[0] == e + 1:
            return
        m2, p = reorient(self.m, [e])
        self.record(f"reorient {self.m.graph.edges[e]}", m2, p)

    def slide_ebeta(self, a: Analysis) -> bool:
        for inp in a.sigma.inps:
            if inp.shape != E_BETA or len(inp.path) < 2:
                continue
            e = inp.edge
            name = self.m.graph.edges[e]
            theta = inp.beta
            if inp.path[0] != e + 1:
                self._lead_positive(e)
                theta = tuple(theta)
            m2, p = slide(self.m, e, theta)
            self.record(f"slide {name} along {self.m.graph.format_path(theta)}", m2, p)
            return True
        return False

    def reduce_vertices(self, a: Analysis) -> bool:
        """Collapse a non-loop edge at a vertex that is not fixed or carries
        a Nielsen component of rank below two; keep it only if the result is
        still a maximal-rank representative with fewer vertices."""
        m = self.m
        g = m.graph
        sg = a.sigma
        weak = [v for v in range(g.num_vertices)
                if v not in sg.component or sg.component_rank(v) < 2]
        for v in weak:
            for x in g.outgoing(v):
                e = abs(x) - 1
                if g.is_loop(e):
                    continue
                other = g.term(x)
                try:
                    m2, p, _, tracks = collapse_forest(m, {e}, prefer=lambda w, o=other: w != o)
                    m2 = self._reprepare(m2)
                    m3 = subdivide_at_fixed_points(m2)
                    if m3.graph.num_vertices >= g.num_vertices:
                        continue
                    a2 = analyze(m2, self.bound)
                    if not a2.report.maximal:
                        continue
                except (ScopeError, BoundExhausted, PreconditionFailed):
                    continue
                self.record(f"collapse-vertex {g.vertices[v]} via {g.edges[e]}", m2, p, tracks)
                return True
        return False

    def claim_slides(self, a: Analysis) -> bool:
        m = self.m
        g = m.graph
        sg = a.sigma
        for inp in sorted(a.sigma.inps, key=lambda p: -p.height):
            if inp.shape != E_BETA_EBAR:
                continue
            e = inp.edge
            beta = inp.beta
            w = g.term(inp.path[0])
            im = m.images[e]
            lead = inp.path[0]
            u = im[1:] if lead > 0 else invert_letters(im[:-1])
            fixed_beta = m.apply(beta) == beta
            in_form = fixed_beta and sg.component_rank(w) >= 2 and path_root(u)[0] in (
                beta, invert_letters(beta))
            if in_form:
                continue
            from .nielsen import lower_component

            _, edges = lower_component(m, inp.height, w)
            eta = find_nielsen_conjugate(m, beta, self.bound, a, within=edges)
            if lead < 0:
                self._lead_positive(e)
                return True
            if not eta:
                raise AssertionError("trivial conjugate for an edge not in good form")
            name = g.edges[e]
            m2, p = slide(self.m, e, eta)
            self.record(f"slide {name} along {g.format_path(eta)}", m2, p)
            return True
        return False

    def orient(self) -> bool:
        flips = [e for e in range(self.m.graph.num_edges)
                 if self.m.images[e] and self.m.images[e][0] != e + 1
                 and self.m.images[e][-1] == e + 1]
        if not flips:
            return False
        m2, p = reorient(self.m, flips)
        self.record("reorient " + " ".join(self.m.graph.edges[e] for e in flips), m2, p)
        return True

    def run(self) -> Normalized:
        self.prune_valence_one()
        self.subdivide()
        while True:
            a = analyze(self.m, self.bound)
            if not a.report.maximal:
                raise NotMaximalRank(
                    f"rank {a.report.rank} is below {a.report.n}; only maximal rank is normalized")
            if self.collapse_fixed_forest():
                continue
            if self.slide_ebeta(a):
                continue
            if self.reduce_vertices(a):
                continue
            if self.claim_slides(a):
                continue
            self.orient()
            problems = good_problems(self.m)
            if problems:
                raise NotGoodRepresentative("; ".join(problems))
            return Normalized(self.m, self.log, self.stages, analyze(self.m, self.bound))


def good_representative(m: GraphMap, bound: int = DEFAULT_BOUND,
                        budget: int = DEFAULT_BUDGET) -> Normalized:
    m = validate_graphmap(m)
    reject_exponential(m)
    if m.graph.rank == 1:
        return _rank_one(m, bound)
    return _Pipeline(m, bound, budget).run()


def _rank_one(m: GraphMap, bound: int) -> Normalized:
    from .graphs import standard_automorphism

    aut, marking = standard_automorphism(m)
    if not aut.is_identity():
        raise NotMaximalRank("rank-one input is not the identity outer class")
    g = Graph(("v0",), (marking.basis.names[0],), ((0, 0),))
    out = GraphMap(g, (0,), ((1,),))
    out = compute_filtration(out)
    return Normalized(out, ["rank-one short cut"], [], analyze(out, bound))


def normalize_inps(m: GraphMap, bound: int = DEFAULT_BOUND) -> GraphMap:
    """Slide every EBeta-type INP edge and collapse fixed non-loop edges."""
    pipe = _Pipeline(prepare(m), bound, DEFAULT_BUDGET)
    pipe.subdivide()
    while True:
        if pipe.collapse_fixed_forest():
            continue
        if pipe.slide_ebeta(analyze(pipe.m, bound)):
            continue
        return pipe.m


def reduce_complexity(m: GraphMap, bound: int = DEFAULT_BOUND) -> Normalized:
    """Vertex-reducing moves until none applies (a local fixed point)."""
    pipe = _Pipeline(prepare(m), bound, DEFAULT_BUDGET)
    while True:
        a = analyze(pipe.m, bound)
        if pipe.collapse_fixed_forest() or pipe.slide_ebeta(a) or pipe.reduce_vertices(a):
            continue
        return Normalized(pipe.m, pipe.log, pipe.stages, a)


# -- automorphism entry points ---------------------------------------------------------

def tidy_conjugation(aut: Endo) -> Endo:
    """Compose with inner automorphisms by single letters while the total
    image length drops.  The outer class is unchanged."""
    best = aut
    size = sum(len(im) for im in aut.images)
    while True:
        step = None
        for g in aut.basis.generators():
            for h in (g, g.inverse()):
                cand = compose(best, conjugation(h))
                s = sum(len(im) for im in cand.images)
                if s < size and (step is None or s < step[0]):
                    step = (s, cand)
        if step is None:
            return best
        size, best = step


def representative_of(aut: Endo) -> GraphMap:
    """Rose representative of the outer class; conjugation is tidied first
    only when the plain rose has an exponential stratum."""
    m, _ = rose_of(aut)
    try:
        reject_exponential(m)
        return m
    except ExponentialStratum:
        tidy = tidy_conjugation(aut)
        if tidy == aut:
            raise
        m2, _ = rose_of(tidy)
        reject_exponential(m2)
        return m2


def rank2_canonical(aut: Endo, bound: int = DEFAULT_BOUND) -> tuple[GraphMap, int]:
    if aut.basis.rank != 2:
        raise PreconditionFailed("rank-two automorphism expected")
    res = good_representative(representative_of(aut), bound)
    m = res.m
    if m.graph.num_vertices != 1 or m.graph.num_edges != 2:
        raise AssertionError("good rank-two representative should be a two-petal rose")
    r = 0
    for e in range(2):
        data = twist_data(m, e)
        if data is not None:
            r = data[2]
    return m, r
