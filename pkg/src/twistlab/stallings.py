"""Stallings folding: folded core graphs of finitely generated subgroups."""

from __future__ import annotations

from collections import deque

from .words import Basis, Word, invert_letters


class SubgroupGraph:
    """Folded labelled core graph of ``<gens>`` with a base vertex.

    The base vertex is kept even when it has valence one, since membership
    queries read words from it.
    """

    def __init__(self, basis: Basis, gens=()):
        self.basis = basis
        self._parent: list[int] = [0]
        self._adj: dict[int, dict[int, int]] = {0: {}}
        self.base = 0
        for g in gens:
            self.add_generator(g)

    def _find(self, v: int) -> int:
        root = v
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[v] != root:
            self._parent[v], v = root, self._parent[v]
        return root

    def _new_vertex(self) -> int:
        v = len(self._parent)
        self._parent.append(v)
        self._adj[v] = {}
        return v

    def _merge(self, a: int, b: int):
        pending = [(a, b)]
        while pending:
            a, b = pending.pop()
            a, b = self._find(a), self._find(b)
            if a == b:
                continue
            if len(self._adj[a]) < len(self._adj[b]):
                a, b = b, a
            if b == self.base:
                self.base = a
            self._parent[b] = a
            moved = self._adj.pop(b)
            target = self._adj[a]
            for x, t in moved.items():
                if x in target:
                    pending.append((target[x], t))
                else:
                    target[x] = t

    def _add_edge(self, v: int, x: int, u: int):
        v, u = self._find(v), self._find(u)
        if x in self._adj[v]:
            self._merge(self._adj[v][x], u)
            return
        if -x in self._adj[u]:
            self._merge(self._adj[u][-x], v)
            v, u = self._find(v), self._find(u)
            if x in self._adj[v]:
                self._merge(self._adj[v][x], u)
                return
        self._adj[v][x] = u
        self._adj[u][-x] = v

    def add_generator(self, w: Word):
        if w.basis != self.basis:
            raise ValueError("generator over a different basis")
        s = w.letters
        if not s:
            return
        v = self.base
        for x in s[:-1]:
            nxt = self._adj[self._find(v)].get(x)
            if nxt is None:
                u = self._new_vertex()
                self._add_edge(v, x, u)
                v = u
            else:
                v = self._find(nxt)
        self._add_edge(v, s[-1], self.base)
        self._prune()

    def _prune(self):
        base = self._find(self.base)
        queue = deque(v for v, nbrs in self._adj.items() if len(nbrs) == 1 and v != base)
        while queue:
            v = queue.popleft()
            if v not in self._adj or len(self._adj[v]) != 1 or v == base:
                continue
            ((x, u),) = self._adj.pop(v).items()
            u = self._find(u)
            self._adj[u].pop(-x, None)
            if len(self._adj[u]) == 1 and u != base:
                queue.append(u)

    # -- queries -----------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self._adj)

    @property
    def num_edges(self) -> int:
        return sum(len(n) for n in self._adj.values()) // 2

    @property
    def rank(self) -> int:
        if self.num_edges == 0:
            return 0
        return self.num_edges - self.num_vertices + 1

    def contains(self, w: Word) -> bool:
        v = self._find(self.base)
        for x in w.letters:
            nxt = self._adj[v].get(x)
            if nxt is None:
                return False
            v = self._find(nxt)
        return v == self._find(self.base)

    __contains__ = contains

    def _canonical_order(self):
        base = self._find(self.base)
        order = {base: 0}
        queue = deque([base])
        alphabet = sorted({x for n in self._adj.values() for x in n}, key=lambda x: (abs(x), x < 0))
        while queue:
            v = queue.popleft()
            for x in alphabet:
                u = self._adj[v].get(x)
                if u is None:
                    continue
                u = self._find(u)
                if u not in order:
                    order[u] = len(order)
                    queue.append(u)
        return order, alphabet

    def canonical(self) -> tuple:
        """Hashable invariant; equal for equal subgroups."""
        order, _ = self._canonical_order()
        edges = []
        for v, nbrs in self._adj.items():
            for x, u in nbrs.items():
                if x > 0:
                    edges.append((order[v], x, order[self._find(u)]))
        return tuple(sorted(edges))

    def free_basis(self) -> list[Word]:
        """A free basis read off a breadth-first spanning tree."""
        base = self._find(self.base)
        order, alphabet = self._canonical_order()
        path = {base: ()}
        tree = set()
        queue = deque([base])
        while queue:
            v = queue.popleft()
            for x in alphabet:
                u = self._adj[v].get(x)
                if u is None:
                    continue
                u = self._find(u)
                if u not in path:
                    path[u] = path[v] + (x,)
                    tree.add((v, x))
                    tree.add((u, -x))
                    queue.append(u)
        out = []
        for v in sorted(self._adj, key=order.get):
            for x in alphabet:
                u = self._adj[v].get(x)
                if u is None or x < 0 or (v, x) in tree:
                    continue
                u = self._find(u)
                out.append(Word(self.basis, path[v] + (x,) + invert_letters(path[u])))
        return out


def subgroup_rank(gens, basis: Basis | None = None) -> int:
    gens = list(gens)
    if not gens:
        return 0
    return SubgroupGraph(basis or gens[0].basis, gens).rank


def subgroup_contains(gens, w: Word) -> bool:
    return SubgroupGraph(w.basis, gens).contains(w)
