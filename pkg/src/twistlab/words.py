"""Reduced words and endomorphisms of a free group given by basis images.

Letters are nonzero ints: ``+i`` is the i-th generator (1-based) and ``-i``
its inverse.  Automorphisms act on the left as ordinary functions, and
``compose(e1, e2)`` means "apply e1, then e2".  This matches the reading
order of automorphisms written on the right, so ``w(φψ)`` is
``compose(φ, ψ).apply(w)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import BasisMismatch, InputError, NotAnAutomorphism


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_letters(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(letters))


def format_letters(letters: Sequence[int], names: Sequence[str]) -> str:
    if not letters:
        return "1"
    return " ".join(names[abs(x) - 1] + ("" if x > 0 else "'") for x in letters)


def parse_letters(text: str, names: Sequence[str]) -> tuple[int, ...]:
    """Parse the shared surface syntax (``b a b'``, ``1`` for the identity)."""
    lookup = {name: i + 1 for i, name in enumerate(names)}
    out = []
    for tok in text.split():
        if tok == "1":
            continue
        sign = 1
        if tok.endswith("'"):
            tok, sign = tok[:-1], -1
        if tok not in lookup:
            raise InputError(f"unknown generator {tok!r}")
        out.append(sign * lookup[tok])
    return tuple(out)


@dataclass(frozen=True)
class Basis:
    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise InputError("a basis needs at least one generator")
        if len(set(self.names)) != len(self.names):
            raise InputError(f"duplicate generator names in {self.names}")
        for name in self.names:
            if not name or name == "1" or "'" in name or any(c.isspace() for c in name):
                raise InputError(f"bad generator name {name!r}")

    @classmethod
    def of(cls, names) -> "Basis":
        if isinstance(names, str):
            names = names.replace(",", " ").split()
        return cls(tuple(names))

    @property
    def rank(self) -> int:
        return len(self.names)

    def identity(self) -> "Word":
        return Word(self, ())

    def gen(self, i: int) -> "Word":
        return Word(self, (i + 1,))

    def generators(self) -> list["Word"]:
        return [self.gen(i) for i in range(self.rank)]

    def word(self, text: str) -> "Word":
        return Word(self, free_reduce(parse_letters(text, self.names)))

    def __call__(self, text: str) -> "Word":
        return self.word(text)


@dataclass(frozen=True)
class Word:
    """A freely reduced word.  Build through :func:`reduce_word` or the basis."""

    basis: Basis
    letters: tuple[int, ...]

    def __len__(self):
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def __str__(self):
        return format_letters(self.letters, self.basis.names)

    def __repr__(self):
        return f"Word({str(self)!r})"

    def _check(self, other: "Word"):
        if other.basis != self.basis:
            raise BasisMismatch(f"{self.basis.names} vs {other.basis.names}")

    def __mul__(self, other: "Word") -> "Word":
        self._check(other)
        return Word(self.basis, free_reduce(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(self.basis, invert_letters(self.letters))

    __invert__ = inverse

    def __pow__(self, k: int) -> "Word":
        if k == 0 or not self.letters:
            return self.basis.identity()
        core, conj = cyclic_reduce(self)
        body = core.letters * k if k > 0 else invert_letters(core.letters) * -k
        return Word(self.basis, invert_letters(conj.letters) + body + conj.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def sort_key(self):
        """Shortlex key: length first, then letters with ``x < x' < y``."""
        return (len(self.letters), tuple((abs(x), x < 0) for x in self.letters))


def reduce_word(raw: Iterable[int], basis: Basis) -> Word:
    raw = tuple(raw)
    for x in raw:
        if x == 0 or abs(x) > basis.rank:
            raise InputError(f"letter {x} out of range for rank {basis.rank}")
    return Word(basis, free_reduce(raw))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return ``(core, c)`` with ``w = c⁻¹ · core · c`` and core cyclically reduced."""
    s = w.letters
    i, n = 0, len(s)
    while 2 * i + 1 < n and s[i] == -s[n - 1 - i]:
        i += 1
    return Word(w.basis, s[i:n - i]), Word(w.basis, s[n - i:])


def proper_power_root(w: Word) -> tuple[Word, int]:
    if w.is_identity():
        raise InputError("the identity has no root")
    core, conj = cyclic_reduce(w)
    s, n = core.letters, len(core.letters)
    for p in range(1, n + 1):
        if n % p == 0 and s == s[:p] * (n // p):
            root = Word(w.basis, free_reduce(invert_letters(conj.letters) + s[:p] + conj.letters))
            return root, n // p
    raise AssertionError("unreachable")


def cyclic_words_equal(u: Word, v: Word) -> bool:
    """True iff u and v are conjugate."""
    cu, cv = cyclic_reduce(u)[0].letters, cyclic_reduce(v)[0].letters
    if len(cu) != len(cv):
        return False
    if not cu:
        return True
    doubled = cu + cu
    n = len(cu)
    return any(doubled[i:i + n] == cv for i in range(n))


def conjugator(u: Word, v: Word) -> Word | None:
    """Some g with ``g⁻¹ u g = v``, or None if u and v are not conjugate."""
    cu, gu = cyclic_reduce(u)
    cv, gv = cyclic_reduce(v)
    if len(cu) != len(cv):
        return None
    n = len(cu.letters)
    if n == 0:
        return u.basis.identity()
    s = cu.letters
    for i in range(n):
        if s[i:] + s[:i] == cv.letters:
            # rotating core by i letters: prefix⁻¹ · core · prefix
            return gu.inverse() * Word(u.basis, s[:i]) * gv
    return None


@dataclass(frozen=True)
class Endo:
    basis: Basis
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != self.basis.rank:
            raise InputError("need exactly one image per generator")
        for im in self.images:
            if im.basis != self.basis:
                raise BasisMismatch("image over a different basis")

    @classmethod
    def identity(cls, basis: Basis) -> "Endo":
        return cls(basis, tuple(basis.generators()))

    @classmethod
    def from_strings(cls, basis: Basis, images) -> "Endo":
        if isinstance(images, dict):
            images = [images[name] for name in basis.names]
        return cls(basis, tuple(basis.word(t) for t in images))

    def __call__(self, w: Word) -> Word:
        return self.apply(w)

    def apply(self, w: Word) -> Word:
        if w.basis != self.basis:
            raise BasisMismatch(f"{w.basis.names} vs {self.basis.names}")
        return Word(self.basis, self.apply_letters(w.letters))

    def apply_letters(self, letters: Sequence[int]) -> tuple[int, ...]:
        out: list[int] = []
        imgs = self.images
        for x in letters:
            piece = imgs[x - 1].letters if x > 0 else invert_letters(imgs[-x - 1].letters)
            for y in piece:
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)

    def then(self, other: "Endo") -> "Endo":
        return compose(self, other)

    def power(self, m: int) -> "Endo":
        if m < 0:
            return invert_automorphism(self).power(-m)
        out = Endo.identity(self.basis)
        for _ in range(m):
            out = compose(out, self)
        return out

    def is_identity(self) -> bool:
        return all(im.letters == (i + 1,) for i, im in enumerate(self.images))

    def max_image_length(self) -> int:
        return max(len(im) for im in self.images)

    def __str__(self):
        return ", ".join(f"{n} -> {im}" for n, im in zip(self.basis.names, self.images))


def compose(e1: Endo, e2: Endo) -> Endo:
    """Endomorphism applying e1 first, then e2."""
    if e1.basis != e2.basis:
        raise BasisMismatch(f"{e1.basis.names} vs {e2.basis.names}")
    return Endo(e1.basis, tuple(e2.apply(im) for im in e1.images))


def conjugation(g: Word) -> Endo:
    """The inner automorphism ``w ↦ g⁻¹ w g``."""
    gi = g.inverse()
    return Endo(g.basis, tuple(gi * x * g for x in g.basis.generators()))


def is_inner(e: Endo) -> Word | None:
    """Return h with ``e == conjugation(h)``, or None if e is not inner."""
    basis = e.basis
    x1 = basis.gen(0)
    if basis.rank == 1:
        return basis.identity() if e.images[0] == x1 else None
    h0 = conjugator(x1, e.images[0])
    if h0 is None:
        return None
    # h = x1^j · h0 since the centraliser of x1 is <x1>; pin j with x2
    s = (h0 * e.images[1] * h0.inverse()).letters
    j = 0
    if s and s[0] in (1, -1):
        run = 0
        while run < len(s) and s[run] == s[0]:
            run += 1
        j = run if s[0] == -1 else -run
    h = (x1 ** j) * h0
    return h if conjugation(h) == e else None


def _fold_with_labels(images: list[tuple[int, ...]], rank: int):
    """Stallings-fold the rose of the images, carrying on each edge the word
    in the images that it stands for.

    Returns {letter: image word} for the loops of the folded graph, or None
    when the folded graph is not the standard rose (the images do not form
    a basis).  Reading a closed path at the base and multiplying the edge
    labels gives a word w in the images with w(images) equal to what was read.
    """
    edges = []  # [tail, letter > 0, head, label]; label read along the edge
    nverts = 1
    for i, im in enumerate(images):
        if not im:
            return None
        v = 0
        for pos, x in enumerate(im):
            last = pos == len(im) - 1
            w = 0 if last else nverts
            if not last:
                nverts += 1
            label = (i + 1,) if pos == 0 else ()
            edges.append([v, x, w, label] if x > 0 else [w, -x, v, invert_letters(label)])
            v = w
    alive = set(range(len(edges)))

    def darts(u):
        for k in alive:
            t, x, h, lab = edges[k]
            if t == u:
                yield k, x, h, lab
            if h == u:
                yield k, -x, t, invert_letters(lab)

    changed = True
    while changed:
        changed = False
        for u in {edges[k][0] for k in alive} | {edges[k][2] for k in alive}:
            seen = {}
            for k, x, h, lab in darts(u):
                if x not in seen:
                    seen[x] = (k, h, lab)
                    continue
                k1, h1, lab1 = seen[x]
                if k1 == k:
                    continue
                if h == 0:  # never re-gauge the base vertex
                    k, h, lab, k1, h1, lab1 = k1, h1, lab1, k, h, lab
                delta = free_reduce(invert_letters(lab1) + lab)
                if h1 == h:
                    if delta:
                        return None  # a nontrivial word in the images reads trivially
                else:
                    # re-gauge at h so that the second dart agrees with the first
                    for j in alive:
                        t2, _, h2, lb = edges[j]
                        if t2 == h:
                            lb = free_reduce(delta + lb)
                        if h2 == h:
                            lb = free_reduce(lb + invert_letters(delta))
                        edges[j][3] = lb
                    for j in alive:
                        if edges[j][0] == h:
                            edges[j][0] = h1
                        if edges[j][2] == h:
                            edges[j][2] = h1
                alive.discard(k)
                changed = True
                break
            if changed:
                break
    out = {}
    for k in alive:
        t, x, h, lab = edges[k]
        if t != 0 or h != 0 or x in out:
            return None
        out[x] = lab
    return out if len(out) == rank else None


def invert_automorphism(e: Endo) -> Endo:
    """Inverse of an automorphism, by folding the rose of its images.

    Raises NotAnAutomorphism if the images do not form a basis.
    """
    n = e.basis.rank
    loops = _fold_with_labels([im.letters for im in e.images], n)
    if loops is None:
        raise NotAnAutomorphism(f"images {e} do not form a basis")
    out = Endo(e.basis, tuple(Word(e.basis, loops[i + 1]) for i in range(n)))
    if not compose(e, out).is_identity():
        raise NotAnAutomorphism(f"images {e} do not form a basis")
    return out


def iter_words(basis: Basis, max_len: int) -> Iterator[Word]:
    """All reduced words of length ≤ max_len in shortlex order."""
    n = basis.rank
    alphabet = [s * i for i in range(1, n + 1) for s in (1, -1)]
    level: list[tuple[int, ...]] = [()]
    yield basis.identity()
    for _ in range(max_len):
        nxt = []
        for w in level:
            for x in alphabet:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        for w in nxt:
            yield Word(basis, w)
        level = nxt
