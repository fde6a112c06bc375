"""Graphs of groups read off good representatives, and their Dehn twists.

Vertex groups are free on the closed indivisible Nielsen paths at the
vertex; every non-fixed edge e of a good representative, f(e) = e·β^k,
becomes an edge of the graph of groups with cyclic edge group ⟨a_e⟩,
m_e(a_e) = β (in the group at τ(e)) and m_ē(a_e) = e β ē (at ι(e)).

Path-group words alternate vertex-group elements and stable letters.
A stable letter is stored as the signed edge letter ±(e+1); ``t_e`` runs
from ι(e) to τ(e) and satisfies t_e · m_e(a) · t_e⁻¹ = m_ē(a).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedIncidence, NotGoodRepresentative, PreconditionFailed
from .graphs import GraphMap, compute_filtration, reorient, tighten
from .normalize import good_problems, twist_data
from .words import Basis, Word, free_reduce, invert_letters, proper_power_root


@dataclass(frozen=True)
class EdgeGroupData:
    edge: int
    name: str
    init: int
    term: int
    mono: tuple[int, ...]  # m_e(a_e), a word in the group at term
    comono: tuple[int, ...]  # m_ē(a_e), a word in the group at init


@dataclass
class GraphOfGroups:
    vertices: tuple[str, ...]
    groups: dict  # vertex -> tuple of generator names
    loops: dict  # vertex -> tuple of INP paths (one per generator)
    edges: list
    source: GraphMap

    def group_basis(self, v: int) -> Basis:
        return Basis(tuple(f"x{i}" for i in range(1, max(len(self.groups[v]), 1) + 1)))

    def edge_data(self, e: int) -> EdgeGroupData:
        for d in self.edges:
            if d.edge == e:
                return d
        raise KeyError(e)

    def format_element(self, v: int, word) -> str:
        if not word:
            return "1"
        names = self.groups[v]
        return " ".join(names[abs(x) - 1] + ("" if x > 0 else "^-1") for x in word)


@dataclass
class DehnTwist:
    exponents: dict  # edge -> r_e

    def negated(self) -> "DehnTwist":
        return DehnTwist({e: -r for e, r in self.exponents.items()})

    def perturbed(self, e: int, delta: int = 1) -> "DehnTwist":
        ex = dict(self.exponents)
        ex[e] = ex[e] + delta
        return DehnTwist(ex)


@dataclass(frozen=True)
class PathWord:
    """r_0 t_1 r_1 … t_q r_q starting at vertex ``start``."""

    start: int
    parts: tuple[tuple[int, ...], ...]
    stables: tuple[int, ...]

    def __post_init__(self):
        if len(self.parts) != len(self.stables) + 1:
            raise MalformedIncidence("path word needs one vertex element between stable letters")


def _generator_name(m: GraphMap, path) -> str:
    return "g_" + m.graph.format_path(path).replace(" ", "")


def _oriented(m: GraphMap) -> GraphMap:
    flips = [e for e in range(m.graph.num_edges)
             if m.images[e] != (e + 1,) and m.images[e][0] != e + 1]
    if flips:
        m, _ = reorient(m, flips)
    return m


def build_graph_of_groups(m: GraphMap) -> tuple[GraphOfGroups, DehnTwist, GraphMap]:
    """Returns the graph of groups, the twist, and the (re-oriented) good
    representative it was read from."""
    m = compute_filtration(tighten(m)) if m.strata is None else m
    problems = good_problems(m)
    if problems:
        raise NotGoodRepresentative("; ".join(problems))
    m = _oriented(m)
    g = m.graph
    loops: dict[int, list] = {v: [] for v in range(g.num_vertices)}
    twist = {}
    data = []
    for e in range(g.num_edges):
        td = twist_data(m, e)
        a, b = g.ends[e]
        if td is None:
            loops[a].append((e + 1,))
            continue
        _, beta, k = td
        loops[a].append((e + 1,) + beta + (-(e + 1),))
        twist[e] = k
        data.append((e, beta))
    groups = {v: tuple(_generator_name(m, p) for p in loops[v]) for v in loops}
    gg = GraphOfGroups(g.vertices, groups, {v: tuple(p) for v, p in loops.items()}, [], m)
    for e, beta in data:
        a, b = g.ends[e]
        mono = parse_nielsen_loop(gg, b, beta)
        comono = parse_nielsen_loop(gg, a, (e + 1,) + beta + (-(e + 1),))
        gg.edges.append(EdgeGroupData(e, g.edges[e], a, b, mono, comono))
    return gg, DehnTwist(twist), m


def parse_nielsen_loop(gg: GraphOfGroups, v: int, path) -> tuple[int, ...]:
    """Write a closed Nielsen path at v as a word in the generators of G_v."""
    m = gg.source
    index = {p: i + 1 for i, p in enumerate(gg.loops[v])}
    heads = {}
    for p, i in index.items():
        heads.setdefault(p[0], []).append((p, i))
    out = []
    s = tuple(path)
    pos = 0
    while pos < len(s):
        x = s[pos]
        step = None
        if (x,) in index:
            step = (1, index[(x,)], 1)
        elif (-x,) in index:
            step = (1, index[(-x,)], -1)
        elif x > 0 and m.graph.ends[x - 1][0] == v:
            close = _matching_close(s, pos)
            if close is not None:
                inner = s[pos + 1:close]
                for p, i in heads.get(x, []):
                    beta = p[1:-1]
                    k = _power_of(inner, beta)
                    if k is not None:
                        step = (close - pos + 1, i, k)
                        break
        if step is None:
            raise PreconditionFailed(
                f"{m.graph.format_path(s)} is not a product of Nielsen loops at {gg.vertices[v]}")
        length, i, k = step
        out.extend([i] * k if k > 0 else [-i] * -k)
        pos += length
    return free_reduce(out)


def _matching_close(s, pos):
    x = s[pos]
    for j in range(pos + 1, len(s)):
        if s[j] == -x:
            return j
        if s[j] == x:
            return None
    return None


def _power_of(inner, beta):
    if not inner:
        return None
    n, b = len(inner), len(beta)
    if n % b == 0 and inner == beta * (n // b):
        return n // b
    ib = invert_letters(beta)
    if n % b == 0 and inner == ib * (n // b):
        return -(n // b)
    return None


# -- path group words ----------------------------------------------------------------

def _cyclic_power(r: tuple, c: tuple, basis: Basis):
    """k with r = c^k in a free group, or None."""
    if not r:
        return 0
    wr, wc = Word(basis, r), Word(basis, c)
    root_r, i = proper_power_root(wr)
    root_c, j = proper_power_root(wc)
    if root_r == root_c:
        sign = 1
    elif root_r == root_c.inverse():
        sign = -1
    else:
        return None
    if i % j:
        return None
    return sign * i // j


def _power(word, k):
    if k >= 0:
        return tuple(word) * k
    return invert_letters(word) * -k


def end_vertex(gg: GraphOfGroups, w: PathWord) -> int:
    v = w.start
    g = gg.source.graph
    for t in w.stables:
        if g.init(t) != v:
            raise MalformedIncidence("stable letters do not match up")
        v = g.term(t)
    return v


def pathgroup_reduce(gg: GraphOfGroups, w: PathWord) -> PathWord:
    """Britton reduction: remove every pinch t_e·m_e(a^k)·t_e⁻¹ and
    t_e⁻¹·m_ē(a^k)·t_e."""
    end_vertex(gg, w)
    parts = [free_reduce(w.parts[0])]
    stables: list[int] = []
    for t, r in zip(w.stables, w.parts[1:]):
        stables.append(t)
        parts.append(free_reduce(r))
        while len(stables) >= 2:
            # check whether the last-but-one vertex part sits in a pinch
            t1, t2 = stables[-2], stables[-1]
            mid = parts[-2]
            if t2 != -t1:
                break
            e = abs(t1) - 1
            d = gg.edge_data(e)
            if t1 > 0:
                here, cyc, img = d.term, d.mono, d.comono
            else:
                here, cyc, img = d.init, d.comono, d.mono
            k = _cyclic_power(mid, cyc, gg.group_basis(here))
            if k is None:
                break
            merged = free_reduce(parts[-3] + _power(img, k) + parts[-1])
            del stables[-2:]
            del parts[-3:]
            parts.append(merged)
    return PathWord(w.start, tuple(parts), tuple(stables))


def path_inverse(w: PathWord, end: int) -> PathWord:
    return PathWord(end, tuple(invert_letters(p) for p in reversed(w.parts)),
                    tuple(-t for t in reversed(w.stables)))


def path_concat(a: PathWord, b: PathWord) -> PathWord:
    parts = a.parts[:-1] + (free_reduce(a.parts[-1] + b.parts[0]),) + b.parts[1:]
    return PathWord(a.start, parts, a.stables + b.stables)


def path_equal(gg: GraphOfGroups, a: PathWord, b: PathWord) -> bool:
    ea, eb = end_vertex(gg, a), end_vertex(gg, b)
    if a.start != b.start or ea != eb:
        return False
    red = pathgroup_reduce(gg, path_concat(a, path_inverse(b, eb)))
    return not red.stables and not red.parts[0]


def sigma(gg: GraphOfGroups, path, start: int) -> PathWord:
    """Image of an edge path of the good representative in the path group."""
    gen_of = {}
    for v, ps in gg.loops.items():
        for i, p in enumerate(ps):
            if len(p) == 1:
                gen_of[p[0]] = (v, i + 1)
    parts: list[list[int]] = [[]]
    stables: list[int] = []
    for x in path:
        if x in gen_of:
            parts[-1].append(gen_of[x][1])
        elif -x in gen_of:
            parts[-1].append(-gen_of[-x][1])
        else:
            stables.append(x)
            parts.append([])
    return PathWord(start, tuple(free_reduce(p) for p in parts), tuple(stables))


def sigma_inv(gg: GraphOfGroups, w: PathWord) -> tuple[int, ...]:
    out: list[int] = []
    v = w.start
    g = gg.source.graph
    for i, part in enumerate(w.parts):
        for y in part:
            p = gg.loops[v][abs(y) - 1]
            out.extend(p if y > 0 else invert_letters(p))
        if i < len(w.stables):
            t = w.stables[i]
            out.append(t)
            v = g.term(t)
    return free_reduce(out)


def twist_apply(gg: GraphOfGroups, d: DehnTwist, w: PathWord) -> PathWord:
    parts = [list(w.parts[0])]
    stables = []
    for t, r in zip(w.stables, w.parts[1:]):
        e = abs(t) - 1
        data = gg.edge_data(e)
        z = _power(data.mono, d.exponents.get(e, 0))
        if t > 0:
            stables.append(t)
            parts.append(list(z) + list(r))
        else:
            parts[-1].extend(invert_letters(z))
            stables.append(t)
            parts.append(list(r))
    return pathgroup_reduce(gg, PathWord(w.start, tuple(tuple(p) for p in parts), tuple(stables)))


def verify_twist(gg: GraphOfGroups, d: DehnTwist, m: GraphMap | None = None):
    """(True, None) if σ∘f = D∘σ on every edge, else (False, witness edge name)."""
    m = m or gg.source
    g = m.graph
    for e in range(g.num_edges):
        a, _ = g.ends[e]
        lhs = pathgroup_reduce(gg, sigma(gg, m.images[e], a))
        rhs = twist_apply(gg, d, sigma(gg, (e + 1,), a))
        if not path_equal(gg, lhs, rhs):
            return False, g.edges[e]
    return True, None


def format_pathword(gg: GraphOfGroups, w: PathWord) -> str:
    g = gg.source.graph
    tokens = []
    v = w.start
    for i, part in enumerate(w.parts):
        if part:
            tokens.append(gg.format_element(v, part))
        if i < len(w.stables):
            t = w.stables[i]
            tokens.append(f"t_{g.edges[abs(t) - 1]}" + ("" if t > 0 else "^-1"))
            v = g.term(t)
    return " ".join(tokens) if tokens else "1"


def format_gog(gg: GraphOfGroups, d: DehnTwist) -> str:
    out = ["gog"]
    for v, name in enumerate(gg.vertices):
        out.append(f"vertex {name} group {' '.join(gg.groups[v])}".rstrip())
    for data in gg.edges:
        out.append(
            f"edge {data.name} {gg.vertices[data.init]} {gg.vertices[data.term]} "
            f"mono {gg.format_element(data.term, data.mono)} "
            f"comono {gg.format_element(data.init, data.comono)} "
            f"twist {d.exponents[data.edge]}")
    out.append("end")
    return "\n".join(out) + "\n"


def rebase(gg: GraphOfGroups, w: PathWord, c: PathWord) -> PathWord:
    """The loop c·w·c⁻¹, where c runs from a new base to the base of w."""
    v = end_vertex(gg, c)
    if v != w.start or end_vertex(gg, w) != v:
        raise MalformedIncidence("w must be a loop at the end of c")
    return pathgroup_reduce(gg, path_concat(path_concat(c, w), path_inverse(c, v)))


def twist_respects_relations(gg: GraphOfGroups, d: DehnTwist) -> bool:
    """D(t_e)·m_e(a_e)·D(t_e)⁻¹ = m_ē(a_e) for every edge, so D is well defined."""
    for data in gg.edges:
        t = PathWord(data.init, ((), ()), (data.edge + 1,))
        inner = PathWord(data.term, (data.mono,), ())
        dt = twist_apply(gg, d, t)
        lhs = path_concat(path_concat(dt, inner), path_inverse(dt, data.term))
        if not path_equal(gg, lhs, PathWord(data.init, (data.comono,), ())):
            return False
    return True
