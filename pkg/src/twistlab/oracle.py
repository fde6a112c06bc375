"""Brute-force checkers over words of bounded length.

Everything here is deliberately naive apart from one pruning rule: when
enumerating fixed words depth first, a prefix p is dropped as soon as no
extension of p can be fixed.  If w = p·s is fixed then φ(p)·φ(s) reduces
to w with at most C letters of φ(p) cancelled, where C = λ·μ bounds the
cancellation (λ, μ the longest images under φ and φ⁻¹).  So all but the
last C letters of φ(p) must agree with w, hence with p as far as p goes.
The same holds for φ⁻¹, which fixes the same words.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BoundExhausted, ClassNotInvariant, PreconditionFailed
from .stallings import SubgroupGraph, subgroup_rank
from .words import (Basis, Endo, Word, compose, conjugation, conjugator,
                    cyclic_words_equal, free_reduce, invert_automorphism,
                    invert_letters, is_inner, iter_words, proper_power_root)


def cancellation_bound(aut: Endo, inverse: Endo | None = None) -> int:
    inverse = inverse or invert_automorphism(aut)
    return aut.max_image_length() * inverse.max_image_length()


def _fixed_letters(aut: Endo, max_len: int):
    n = aut.basis.rank
    inv = invert_automorphism(aut)
    maps = [(aut, cancellation_bound(aut, inv)), (inv, cancellation_bound(inv, aut))]
    alphabet = [s * i for i in range(1, n + 1) for s in (1, -1)]
    found = []

    def viable(p):
        for phi, c in maps:
            q = phi.apply_letters(p)
            k = len(q) - c
            if k > max_len:
                return False
            k = min(k, len(p))
            if k > 0 and q[:k] != p[:k]:
                return False
        return True

    stack = [()]
    while stack:
        p = stack.pop()
        if aut.apply_letters(p) == p:
            found.append(p)
        if len(p) == max_len:
            continue
        for x in reversed(alphabet):
            if p and p[-1] == -x:
                continue
            q = p + (x,)
            if viable(q):
                stack.append(q)
    return found


def _shortlex(letters):
    return (len(letters), tuple((abs(x), x < 0) for x in letters))


def fixed_words(aut: Endo, max_len: int) -> list[Word]:
    """Every reduced word of length ≤ max_len fixed by aut, in shortlex order."""
    found = _fixed_letters(aut, max_len)
    return [Word(aut.basis, w) for w in sorted(found, key=_shortlex)]


def fixed_words_naive(aut: Endo, max_len: int) -> list[Word]:
    """Unpruned enumeration, for cross-checking the pruned one."""
    return [w for w in iter_words(aut.basis, max_len) if aut(w) == w]


def fixed_generators(aut: Endo, max_len: int) -> list[Word]:
    """Fixed words that generate the same subgroup as fixed_words(aut, max_len).

    Meet in the middle: with D(p) = p⁻¹·φ(p), D(p) = D(q) exactly when
    p·q⁻¹ is fixed.  A fixed word of length ≤ L splits as a·b⁻¹ with
    |a| ≤ ⌈L/2⌉, |b| ≤ ⌊L/2⌋ and D(a) = D(b), so it suffices to pair every
    word of length ≤ ⌈L/2⌉ with a shortest word r of its D-fibre.
    """
    short, long_ = max_len // 2, (max_len + 1) // 2
    fibres: dict[tuple, tuple] = {}
    words = list(iter_words(aut.basis, long_))
    for p in words:  # shortlex, so the first word in a fibre is shortest
        if len(p) > short:
            break
        d = free_reduce(invert_letters(p.letters) + aut.apply_letters(p.letters))
        fibres.setdefault(d, p.letters)
    gens = set()
    for p in words:
        d = free_reduce(invert_letters(p.letters) + aut.apply_letters(p.letters))
        r = fibres.get(d)
        if r is not None:
            w = free_reduce(p.letters + invert_letters(r))
            if w:
                gens.add(w)
    return [Word(aut.basis, w) for w in sorted(gens, key=_shortlex)]


def fixed_rank(aut: Endo, max_len: int) -> int:
    return subgroup_rank(fixed_generators(aut, max_len), aut.basis)


def periodic_words(aut: Endo, max_len: int, max_period: int) -> list[tuple[Word, int]]:
    """Words w with aut^m(w) = w for some 1 ≤ m ≤ max_period, with the least such m."""
    period: dict[tuple, int] = {}
    power = Endo.identity(aut.basis)
    for m in range(1, max_period + 1):
        power = compose(power, aut)
        for w in _fixed_letters(power, max_len):
            period.setdefault(w, m)
    return [(Word(aut.basis, w), period[w]) for w in sorted(period, key=_shortlex)]


def periodic_generators(aut: Endo, max_len: int, max_period: int) -> list[tuple[Word, int]]:
    """Generators of the subgroups spanned by words of length ≤ max_len fixed
    by aut^m (1 ≤ m ≤ max_period), each with its least period.

    Every periodic word up to the bounds has period 1 iff every entry here does.
    """
    out: dict[tuple, int] = {}
    powers = [Endo.identity(aut.basis)]
    for m in range(1, max_period + 1):
        powers.append(compose(powers[-1], aut))
        for w in fixed_generators(powers[m], max_len):
            if w.letters not in out:
                out[w.letters] = next(j for j in range(1, m + 1) if powers[j](w) == w)
    return [(Word(aut.basis, w), out[w]) for w in sorted(out, key=_shortlex)]


# -- similarity ------------------------------------------------------------------------

SIMILAR = "witness"
NO_WITNESS = "no-witness-within-bound"
OTHER_CLASS = "different-outer-class"


@dataclass(frozen=True)
class Similarity:
    status: str
    witness: Word | None = None

    def __bool__(self):
        return self.status == SIMILAR


def similar_under(phi: Endo, psi: Endo, g: Word) -> bool:
    """φ = γ_g ψ γ_{g⁻¹}, reading composition left to right."""
    return compose(compose(conjugation(g), psi), conjugation(g.inverse())) == phi


def similar_bounded(phi: Endo, psi: Endo, bound: int) -> Similarity:
    if phi.basis != psi.basis:
        raise PreconditionFailed("different bases")
    if is_inner(compose(invert_automorphism(psi), phi)) is None:
        return Similarity(OTHER_CLASS)
    for g in iter_words(phi.basis, bound):
        if similar_under(phi, psi, g):
            return Similarity(SIMILAR, g)
    return Similarity(NO_WITNESS)


# -- the extension construction ----------------------------------------------------------

def _extended_basis(basis: Basis, extra: int) -> Basis:
    if all(len(x) == 1 and "a" <= x <= "z" for x in basis.names):
        pool = [chr(c) for c in range(ord(max(basis.names)) + 1, ord("z") + 1)]
    else:
        pool = []
    pool += [f"x{i}" for i in range(basis.rank + 1, basis.rank + extra + 1)]
    fresh = [x for x in pool if x not in basis.names][:extra]
    return Basis(tuple(basis.names) + tuple(fresh))


def _lift(w: Word, basis: Basis) -> Word:
    return Word(basis, w.letters)


def levitt_extension(reps: list[Endo], conjugators: list[Word]) -> Endo:
    """Extend φ_1 to F_{n+k-1} by x_{n+j-1} ↦ x_{n+j-1}·g_j, given φ_j γ_{g_j} = φ_1."""
    if not reps:
        raise PreconditionFailed("at least one automorphism needed")
    if len(conjugators) != len(reps) - 1:
        raise PreconditionFailed("one conjugator per extra representative")
    first = reps[0]
    for j, (phi, g) in enumerate(zip(reps[1:], conjugators), 2):
        if compose(phi, conjugation(g)) != first:
            raise PreconditionFailed(f"representative {j} composed with its conjugator is not the first")
    basis = _extended_basis(first.basis, len(conjugators))
    n = first.basis.rank
    images = [_lift(im, basis) for im in first.images]
    for j, g in enumerate(conjugators):
        images.append(basis.gen(n + j) * _lift(g, basis))
    return Endo(basis, tuple(images))


@dataclass
class ExtensionCheck:
    fixed: list
    factor_generators: list
    all_inside: bool
    rank: int


def check_extension(ext: Endo, reps: list[Endo], max_len: int) -> ExtensionCheck:
    """Every fixed word of ext (up to max_len) lies in
    Fix φ_1 ∗ x_{n}·Fix φ_2·x_{n}⁻¹ ∗ … ; the factors are read off by
    enumeration at the same bound."""
    basis = ext.basis
    n = reps[0].basis.rank
    gens = []
    for j, phi in enumerate(reps):
        fb = SubgroupGraph(phi.basis, fixed_words(phi, max_len)).free_basis()
        for w in fb:
            lifted = _lift(w, basis)
            if j:
                x = basis.gen(n + j - 1)
                lifted = x * lifted * x.inverse()
            gens.append(lifted)
    fixed = fixed_words(ext, max_len)
    sg = SubgroupGraph(basis, gens)
    return ExtensionCheck(fixed, gens, all(sg.contains(w) for w in fixed),
                          subgroup_rank(fixed, basis))


# -- conjugacy classes ---------------------------------------------------------------------

@dataclass(frozen=True)
class ClassFix:
    g: Word  # conjugator: the fixed element is g⁻¹·w·g
    fixed: Word
    h: Word  # the representative is aut followed by conjugation by h
    rank: int


def fixes_conjugacy_class(aut: Endo, w: Word, bound: int, fix_len: int = 6) -> ClassFix:
    """Find a conjugate of w fixed by a representative aut∘γ_h whose fixed
    subgroup has rank ≥ 2 (measured by enumeration up to fix_len)."""
    if w.is_identity():
        raise PreconditionFailed("the identity is fixed by everything")
    if not cyclic_words_equal(aut(w), w):
        raise ClassNotInvariant(f"the class of {w} is not invariant")
    for g in iter_words(aut.basis, bound):
        u = g.inverse() * w * g
        h0 = conjugator(aut(u), u)
        if h0 is None:
            continue
        r_u, _ = proper_power_root(u)
        for k in sorted(range(-2, 3), key=lambda k: (abs(k), k < 0)):
            h = (r_u ** k) * h0
            psi = compose(aut, conjugation(h))
            if psi(u) != u:
                continue
            rank = fixed_rank(psi, fix_len)
            if rank >= 2:
                return ClassFix(g, u, h, rank)
    raise BoundExhausted("conjugacy class search", bound)
