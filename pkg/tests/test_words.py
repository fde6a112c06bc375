import pytest
from hypothesis import given, settings, strategies as st

from twistlab.errors import BasisMismatch, InputError, NotAnAutomorphism
from twistlab.stallings import SubgroupGraph, subgroup_contains, subgroup_rank
from twistlab.words import (
    Basis,
    Endo,
    compose,
    conjugation,
    cyclic_reduce,
    cyclic_words_equal,
    conjugator,
    invert_automorphism,
    is_inner,
    iter_words,
    proper_power_root,
    reduce_word,
)

B = Basis.of("a b")
B3 = Basis.of("a b c")
w = B.word
TWIST = Endo.from_strings(B, ["a", "b a"])


def words(basis, max_size=12):
    letters = st.integers(1, basis.rank).flatmap(lambda i: st.sampled_from([i, -i]))
    return st.lists(letters, max_size=max_size).map(lambda s: reduce_word(s, basis))


def random_aut(basis):
    """Products of elementary Nielsen moves, so always automorphisms."""
    n = basis.rank
    move = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.sampled_from([1, -1]), st.booleans())

    def build(moves):
        e = Endo.identity(basis)
        for i, j, eps, left in moves:
            if i == j:
                continue
            imgs = list(basis.generators())
            g = imgs[j] if eps == 1 else imgs[j].inverse()
            imgs[i] = g * imgs[i] if left else imgs[i] * g
            e = compose(e, Endo(basis, tuple(imgs)))
        return e

    return st.lists(move, max_size=8).map(build)


# -- reduce ---------------------------------------------------------------

def test_reduce_examples():
    assert reduce_word([1, -1], B).is_identity()
    assert reduce_word([2, -1, 1], B) == w("b")
    assert reduce_word([1, 2, -2, 1], B) == w("a a")


def test_reduce_rejects_out_of_range():
    with pytest.raises(InputError):
        reduce_word([3], B)


@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=20), st.randoms())
def test_reduce_confluent(raw, rnd):
    target = reduce_word(raw, B).letters
    # cancel adjacent pairs in random order until stuck
    s = list(raw)
    while True:
        spots = [i for i in range(len(s) - 1) if s[i] == -s[i + 1]]
        if not spots:
            break
        i = rnd.choice(spots)
        del s[i:i + 2]
    assert tuple(s) == target
    assert reduce_word(target, B).letters == target


def test_surface_syntax_round_trip():
    assert str(w("b a b'")) == "b a b'"
    assert str(B.identity()) == "1"
    assert w("1") == B.identity()
    with pytest.raises(InputError):
        w("z")


# -- cyclic reduction ---------------------------------------------------------

def test_cyclic_reduce_examples():
    assert cyclic_reduce(w("a' b a")) == (w("b"), w("a"))
    assert cyclic_reduce(w("a b")) == (w("a b"), B.identity())
    assert cyclic_reduce(w("b' a' b")) == (w("a'"), w("b"))


@given(words(B))
def test_cyclic_reduce_recomposes(x):
    core, c = cyclic_reduce(x)
    assert c.inverse() * core * c == x
    if len(core) > 1:
        assert core.letters[0] != -core.letters[-1]


# -- apply / compose --------------------------------------------------------

def test_apply_examples():
    assert TWIST(w("b a b'")) == w("b a b'")
    assert TWIST(w("b")) == w("b a")
    assert Endo.identity(B)(w("a b' a")) == w("a b' a")


def test_compose_examples():
    assert compose(Endo.identity(B), TWIST) == TWIST
    assert compose(TWIST, TWIST) == Endo.from_strings(B, ["a", "b a a"])
    g, h = w("a b"), w("b' a")
    assert compose(conjugation(g), conjugation(h)) == conjugation(g * h)


def test_basis_mismatch():
    with pytest.raises(BasisMismatch):
        TWIST(B3.word("c"))
    with pytest.raises(BasisMismatch):
        compose(TWIST, Endo.identity(B3))


@given(words(B), words(B), random_aut(B))
def test_apply_is_a_homomorphism(u, v, e):
    assert e(u * v) == e(u) * e(v)
    assert e(u.inverse()) == e(u).inverse()


@given(words(B3), random_aut(B3), random_aut(B3))
def test_compose_order(x, e1, e2):
    assert compose(e1, e2)(x) == e2(e1(x))


# -- conjugation ------------------------------------------------------------

def test_conjugation_examples():
    assert conjugation(B.identity()).is_identity()
    assert conjugation(w("a"))(w("b")) == w("a' b a")
    assert conjugation(w("a"))(w("a")) == w("a")


@given(words(B3), words(B3))
def test_conjugation_matches_formula(g, x):
    assert conjugation(g)(x) == g.inverse() * x * g


@given(random_aut(B), words(B, 6))
def test_similarity_identity(phi, x):
    # γ_x⁻¹ φ γ_x = φ γ_{(x⁻¹)φ · x}, read left to right
    lhs = compose(compose(conjugation(x.inverse()), phi), conjugation(x))
    rhs = compose(phi, conjugation(phi(x.inverse()) * x))
    assert lhs == rhs


def test_is_inner():
    for g in [B.identity(), w("a"), w("b' a a b"), w("a b a")]:
        assert is_inner(conjugation(g)) == g
    assert is_inner(TWIST) is None
    assert is_inner(Endo.identity(Basis.of("x"))).is_identity()


@given(words(B3, 8))
def test_is_inner_recovers_conjugator(g):
    assert is_inner(conjugation(g)) == g


def test_conjugator():
    g = conjugator(w("a b"), w("b a"))
    assert g.inverse() * w("a b") * g == w("b a")
    assert conjugator(w("a"), w("b")) is None
    assert cyclic_words_equal(w("a b b"), w("b' a b b b"))


# -- inversion ----------------------------------------------------------------

def test_invert_examples():
    inv = invert_automorphism(TWIST)
    assert compose(TWIST, inv).is_identity()
    assert inv == Endo.from_strings(B, ["a", "b a'"])
    assert invert_automorphism(Endo.identity(B)).is_identity()
    with pytest.raises(NotAnAutomorphism):
        invert_automorphism(Endo.from_strings(B, ["a", "a"]))
    with pytest.raises(NotAnAutomorphism):
        invert_automorphism(Endo.from_strings(B, ["a a", "b"]))


@settings(max_examples=200)
@given(random_aut(B3))
def test_invert_round_trip(e):
    inv = invert_automorphism(e)
    assert compose(e, inv).is_identity()
    assert compose(inv, e).is_identity()


# -- Stallings graphs -----------------------------------------------------------

def test_subgroup_rank_examples():
    assert subgroup_rank([w("a"), w("b a b'")]) == 2
    assert subgroup_rank([w("a a"), w("a a a")]) == 1
    assert subgroup_rank([], B) == 0


def test_subgroup_contains_examples():
    assert subgroup_contains([w("a"), w("b a b'")], w("b a b'"))
    assert not subgroup_contains([w("a")], w("b"))
    assert subgroup_contains([w("a a"), w("a a a")], w("a"))


@given(words(B3))
def test_cyclic_subgroup_rank_one(x):
    if not x.is_identity():
        assert subgroup_rank([x]) == 1
        assert subgroup_contains([x], x * x * x.inverse() * x)


def test_full_basis_rank():
    assert subgroup_rank(B3.generators()) == 3


@given(st.lists(words(B, 6), max_size=4), words(B, 6))
def test_membership_agrees_with_products(gens, x):
    g = SubgroupGraph(B, gens)
    for y in gens:
        assert g.contains(y)
        assert g.contains(y.inverse())
    if gens:
        assert g.contains(gens[0] * gens[-1].inverse())
    # a free basis spans the same subgroup
    basis = g.free_basis()
    assert len(basis) == g.rank
    assert SubgroupGraph(B, basis).canonical() == g.canonical()


# -- roots ------------------------------------------------------------------

def test_proper_power_root_examples():
    assert proper_power_root(w("a a")) == (w("a"), 2)
    assert proper_power_root(w("a b")) == (w("a b"), 1)
    assert proper_power_root(w("a b a b")) == (w("a b"), 2)
    with pytest.raises(InputError):
        proper_power_root(B.identity())


@given(words(B3, 5), st.integers(1, 4), words(B3, 4))
def test_root_of_power(x, k, c):
    x = c.inverse() * x * c
    if x.is_identity():
        return
    root, e = proper_power_root(x ** k)
    assert root ** e == x ** k
    assert e % k == 0


def test_iter_words_counts():
    assert len(list(iter_words(B, 3))) == 1 + 4 + 12 + 36
