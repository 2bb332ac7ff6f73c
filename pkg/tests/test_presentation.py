import itertools
import math
import random

import pytest

from harmonicvase.presentation import (
    EnumerationBudgetError,
    ParseError,
    Presentation,
    count_homomorphisms,
    cyclic_group,
    dihedral_group_4,
    first_homology,
    free_reduce,
    parse_presentation,
    relator_matrix,
    smith_normal_form,
    standard_oracle_groups,
    symmetric_group_3,
    truncate_presentation,
)


# ---------------------------------------------------------------- parsing

def test_parse_cube_relator():
    p = parse_presentation("gens: a\nrel: a a a")
    assert p.generator_count == 1
    assert p.relators == (((1, 1), (1, 1), (1, 1)),)


def test_parse_commutator():
    p = parse_presentation("gens: a b\nrel: a b a' b'")
    assert p.relators == (((1, 1), (2, 1), (1, -1), (2, -1)),)


def test_parse_unknown_generator():
    with pytest.raises(ParseError, match="unknown generator 'c'"):
        parse_presentation("gens: a\nrel: a c")


def test_parse_reports_location():
    with pytest.raises(ParseError) as err:
        parse_presentation("gens: a\nrel: a c")
    assert err.value.line == 2
    assert err.value.column == 8


def test_parse_comments_and_blank_lines():
    text = "# header\n\ngens: a b  # two generators\n\nrel: a b'  # word\n"
    p = parse_presentation(text)
    assert p.names == ("a", "b")
    assert p.relators == (((1, 1), (2, -1)),)


def test_parse_empty_generator_list():
    with pytest.raises(ParseError, match="empty generator list"):
        parse_presentation("gens:\nrel: a")
    with pytest.raises(ParseError, match="empty generator list"):
        parse_presentation("# nothing\n")


def test_parse_rel_before_gens():
    with pytest.raises(ParseError, match="rel: before gens:"):
        parse_presentation("rel: a\ngens: a")


def test_parse_duplicate_generator():
    with pytest.raises(ParseError, match="duplicate generator"):
        parse_presentation("gens: a a")


def test_parse_unknown_directive():
    with pytest.raises(ParseError, match="expected gens: or rel:"):
        parse_presentation("generators: a")


def test_presentation_rejects_out_of_range_letters():
    with pytest.raises(ValueError, match="out of range"):
        Presentation(names=("a",), relators=(((2, 1),),))


# ----------------------------------------------------------- free reduction

def test_free_reduce_forced_cancellation():
    word = ((1, 1), (2, 1), (2, -1), (1, -1), (1, 1))
    assert free_reduce(word) == ((1, 1),)


def test_free_reduce_empty():
    assert free_reduce(()) == ()


def test_free_reduce_fixed_point():
    word = ((1, 1), (2, 1), (1, -1))
    assert free_reduce(word) == word


def test_free_reduce_idempotent_and_nonincreasing():
    rng = random.Random(7)
    for _ in range(200):
        word = tuple(
            (rng.randint(1, 3), rng.choice((1, -1)))
            for _ in range(rng.randint(0, 12))
        )
        once = free_reduce(word)
        assert len(once) <= len(word)
        assert free_reduce(once) == once
        # no adjacent cancelling pair survives
        for (g1, s1), (g2, s2) in zip(once, once[1:]):
            assert not (g1 == g2 and s1 == -s2)


# ------------------------------------------------------------ relator matrix

def test_relator_matrix_exponent_sums():
    p = parse_presentation("gens: a b\nrel: a a b' b' b'")
    assert relator_matrix(p) == [[2, -3]]


def test_relator_matrix_cube():
    p = parse_presentation("gens: a\nrel: a a a")
    assert relator_matrix(p) == [[3]]


def test_relator_matrix_commutator_is_zero():
    p = parse_presentation("gens: a b\nrel: a b a' b'")
    assert relator_matrix(p) == [[0, 0]]


# ---------------------------------------------------------------------- SNF

def test_snf_examples():
    assert smith_normal_form([[2, -3]]) == [1]
    assert smith_normal_form([[3]]) == [3]
    assert smith_normal_form([[2, 0], [0, 4]]) == [2, 4]
    assert smith_normal_form([[0, 0]]) == [0]


def test_snf_divisibility_chain():
    rng = random.Random(11)
    for _ in range(100):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        m = [[rng.randint(-6, 6) for _ in range(cols)] for _ in range(rows)]
        diag = smith_normal_form(m)
        for a, b in zip(diag, diag[1:]):
            if a == 0:
                assert b == 0
            else:
                assert b % a == 0


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in m[1:]]
            total += (-1) ** j * m[0][j] * _det(minor)
    return total


def _minors_gcd(m, k):
    rows = range(len(m))
    cols = range(len(m[0]))
    g = 0
    for ri in itertools.combinations(rows, k):
        for ci in itertools.combinations(cols, k):
            sub = [[m[i][j] for j in ci] for i in ri]
            g = math.gcd(g, _det(sub))
    return g


def _random_unimodular_shuffle(m, rng):
    m = [row[:] for row in m]
    rows, cols = len(m), len(m[0])
    for _ in range(8):
        op = rng.randrange(4)
        if op == 0 and rows > 1:
            i, j = rng.sample(range(rows), 2)
            m[i], m[j] = m[j], m[i]
        elif op == 1 and cols > 1:
            i, j = rng.sample(range(cols), 2)
            for row in m:
                row[i], row[j] = row[j], row[i]
        elif op == 2 and rows > 1:
            i, j = rng.sample(range(rows), 2)
            c = rng.randint(-3, 3)
            m[i] = [a + c * b for a, b in zip(m[i], m[j])]
        elif op == 3 and cols > 1:
            i, j = rng.sample(range(cols), 2)
            c = rng.randint(-3, 3)
            for row in m:
                row[i] += c * row[j]
    return m


def test_snf_against_minors_gcd_oracle():
    # d1 * ... * dk equals the gcd of all k x k minors.
    rng = random.Random(23)
    for _ in range(40):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 5)
        m = [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)]
        diag = smith_normal_form(m)
        prod = 1
        for k, d in enumerate(diag, start=1):
            prod *= d
            assert prod == _minors_gcd(m, k)


def test_snf_invariant_under_unimodular_ops():
    rng = random.Random(31)
    for _ in range(30):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        m = [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)]
        shuffled = _random_unimodular_shuffle(m, rng)
        assert smith_normal_form(m) == smith_normal_form(shuffled)


# ------------------------------------------------------------ first homology

def test_first_homology_commutator():
    p = parse_presentation("gens: a b\nrel: a b a' b'")
    assert first_homology(p) == (2, [])


def test_first_homology_torsion_three():
    p = parse_presentation("gens: a\nrel: a a a")
    assert first_homology(p) == (0, [3])


def test_first_homology_trefoil_abelianization():
    p = parse_presentation("gens: a b\nrel: a a b' b' b'")
    assert first_homology(p) == (1, [])


def test_first_homology_free():
    p = parse_presentation("gens: a b c")
    assert first_homology(p) == (3, [])


# ------------------------------------------------------- homomorphism counts

def test_oracle_groups_are_groups():
    for g in standard_oracle_groups():
        g.validate()  # raises on any axiom failure
    assert [g.order for g in standard_oracle_groups()] == [6, 2, 4, 8]


def _brute_force_hom_count(pres, elements, compose, identity, inverse):
    """Independent enumeration: no package code beyond the parsed words."""
    count = 0
    for images in itertools.product(elements, repeat=pres.generator_count):
        ok = True
        for rel in pres.relators:
            acc = identity
            for gen, sign in rel:
                g = images[gen - 1]
                if sign < 0:
                    g = inverse(g)
                acc = compose(acc, g)
            if acc != identity:
                ok = False
                break
        if ok:
            count += 1
    return count


def _s3_ops():
    elements = list(itertools.permutations(range(3)))

    def compose(p, q):
        return tuple(p[q[x]] for x in range(3))

    def inverse(p):
        inv = [0] * 3
        for x in range(3):
            inv[p[x]] = x
        return tuple(inv)

    return elements, compose, (0, 1, 2), inverse


def test_count_homomorphisms_cube_into_s3():
    p = parse_presentation("gens: a\nrel: a a a")
    assert count_homomorphisms(p, symmetric_group_3()) == 3
    elements, compose, identity, inverse = _s3_ops()
    assert _brute_force_hom_count(p, elements, compose, identity, inverse) == 3


def test_count_homomorphisms_z2_into_s3():
    p = parse_presentation("gens: a b\nrel: a b a' b'")
    assert count_homomorphisms(p, symmetric_group_3()) == 18
    elements, compose, identity, inverse = _s3_ops()
    assert _brute_force_hom_count(p, elements, compose, identity, inverse) == 18


def test_count_homomorphisms_trivializing_relator():
    p = parse_presentation("gens: a\nrel: a")
    for g in standard_oracle_groups():
        assert count_homomorphisms(p, g) == 1


def test_count_homomorphisms_matches_brute_force_on_d4():
    p = parse_presentation("gens: a b\nrel: a a\nrel: b b b b")
    d4 = dihedral_group_4()
    elements = list(range(8))
    count = _brute_force_hom_count(
        p, elements, d4.mul, d4.identity, lambda x: d4.inverses[x]
    )
    assert count_homomorphisms(p, d4) == count == 48


def test_count_homomorphisms_invariances():
    g = symmetric_group_3()
    p1 = parse_presentation("gens: a b\nrel: a a b' b' b'\nrel: a b a' b'")
    p2 = parse_presentation("gens: a b\nrel: a b a' b'\nrel: a a b' b' b'")
    assert count_homomorphisms(p1, g) == count_homomorphisms(p2, g)
    unreduced = parse_presentation("gens: a b\nrel: a b b' a b' b' b'")
    reduced = Presentation(
        names=unreduced.names,
        relators=tuple(free_reduce(r) for r in unreduced.relators),
    )
    assert count_homomorphisms(unreduced, g) == count_homomorphisms(reduced, g)


def test_count_homomorphisms_budget():
    p = parse_presentation("gens: a b c d e f g h i j")
    with pytest.raises(EnumerationBudgetError):
        count_homomorphisms(p, dihedral_group_4(), budget=10**7)


def test_cyclic_group_counts():
    p = parse_presentation("gens: a\nrel: a a a")
    assert count_homomorphisms(p, cyclic_group(2)) == 1
    assert count_homomorphisms(p, cyclic_group(3)) == 3


# ------------------------------------------------------------- truncation

def test_truncate_presentation():
    p = parse_presentation("gens: a b\nrel: a a\nrel: b b")
    assert truncate_presentation(p, 1).relators == (((1, 1), (1, 1)),)
    assert truncate_presentation(p, 0).relators == ()
    assert truncate_presentation(p, 2) == p
    with pytest.raises(ValueError, match="out of range"):
        truncate_presentation(p, 3)
