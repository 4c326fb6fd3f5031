import math
from itertools import permutations

import pytest

from advbound import young
from advbound.young import Partition


def count_standard_tableaux(rows):
    """Independent oracle: enumerate standard fillings recursively."""
    if not rows:
        return 1
    total = 0
    for i in range(len(rows)):
        if rows[i] > 0 and (i == len(rows) - 1 or rows[i] > rows[i + 1]):
            shrunk = tuple(r for r in (*rows[:i], rows[i] - 1, *rows[i + 1 :]) if r > 0)
            total += count_standard_tableaux(shrunk)
    return total


def test_hook_dimension_trivial():
    for n in (1, 3, 9):
        assert young.hook_dimension(Partition(()), n) == 1


def test_hook_dimension_vs_tableau_count():
    assert young.hook_dimension(Partition((1,)), 3) == count_standard_tableaux((2, 1))
    for n in range(2, 9):
        for lam in young.enumerate_below_row(3, n):
            full = young.full_diagram(lam, n)
            assert young.hook_dimension(lam, n) == count_standard_tableaux(full)


def test_dimension_squares_sum_to_group_order():
    for n in range(1, 7):
        total = sum(
            young.hook_dimension(lam, n) ** 2 for lam in young.enumerate_below_row(n, n)
        )
        assert total == math.factorial(n)


def test_hook_dimension_invalid_diagram():
    with pytest.raises(young.DiagramError):
        young.hook_dimension(Partition((3,)), 4)  # first row would hold 1 < 3


def test_enumerate_below_row():
    assert young.enumerate_below_row(0, 5) == [Partition(())]
    got = young.enumerate_below_row(2, 10)
    assert got == [Partition(()), Partition((1,)), Partition((1, 1)), Partition((2,))]
    assert young.enumerate_below_row(1, 2) == [Partition(()), Partition((1,))]


def test_branch_add():
    got = young.branch(Partition(()), "add")
    assert (Partition(()), True) in got
    assert (Partition((1,)), False) in got
    got = young.branch(Partition((1,)), "add")
    below = {p.parts for p, first in got if not first}
    assert below == {(2,), (1, 1)}


def test_branch_remove():
    assert young.branch(Partition(()), "remove") == []
    got = young.branch(Partition((2, 1)), "remove")
    below = {p.parts for p, first in got if not first}
    assert below == {(1, 1), (2,)}


def test_branching_restriction_dimension_sums():
    for n in range(2, 13):
        for lam in young.enumerate_below_row(3, n):
            left = young.hook_dimension(lam, n)
            right = sum(
                young.hook_dimension(mu, n - 1)
                for mu in young.branching_restrictions(lam, n)
            )
            assert left == right


def permutation_character(perm_im, fixed_only=False):
    return sum(1 for i, v in enumerate(perm_im) if v == i)


def test_character_dimension_and_sign():
    assert young.character((2, 1), (1, 1, 1)) == 2
    assert young.character((1, 1), (2,)) == -1
    assert young.character((3,), (3,)) == 1


def test_character_standard_rep_bruteforce():
    # Oracle: the (2,1) irrep of S_3 is the natural permutation rep minus the
    # trivial one, so its character is (#fixed points - 1).
    reps = {(1, 1, 1): (0, 1, 2), (2, 1): (1, 0, 2), (3,): (1, 2, 0)}
    for cycle_type, perm in reps.items():
        expected = permutation_character(perm) - 1
        assert young.character((2, 1), cycle_type) == expected


def class_size(n, cycle_type):
    denom = 1
    for length in set(cycle_type):
        count = cycle_type.count(length)
        denom *= length**count * math.factorial(count)
    return math.factorial(n) // denom


def test_character_orthogonality_exact():
    for n in range(1, 7):
        parts = young._partitions_of(n)
        for la in parts:
            for mu in parts:
                total = sum(
                    class_size(n, ct) * young.character(la, ct) * young.character(mu, ct)
                    for ct in parts
                )
                assert total == (math.factorial(n) if la == mu else 0)


def test_character_size_mismatch():
    with pytest.raises(young.DiagramError):
        young.character((2, 1), (2,))


def test_census_small_cases():
    single = young.erasure_census(1, 1)
    assert len(single) == 1 and single[0].is_bad and single[0].dim == 1

    entries = young.erasure_census(2, 3)
    assert [e.dim for e in entries] == [1, 2, 2, 1]
    bad = {(e.lam_n.parts, e.lam_m.parts) for e in entries if e.is_bad}
    assert bad == {((), ()), ((1,), (1,))}


def test_census_dimension_totals():
    for n in range(1, 7):
        for m in range(n, 7):
            entries = young.erasure_census(n, m)
            assert sum(e.dim for e in entries) == math.factorial(m) // math.factorial(m - n)


def test_census_brute_force_orbit_count():
    # Oracle: the number of blocks equals the number of orbits of pairs of
    # injective maps under simultaneous relabeling of both alphabets.
    n, m = 2, 3
    funcs = list(permutations(range(m), n))
    orbits = set()
    for f in funcs:
        for g in funcs:
            canon = min(
                (
                    tuple(tau[f[pi[x]]] for x in range(n)),
                    tuple(tau[g[pi[x]]] for x in range(n)),
                )
                for pi in permutations(range(n))
                for tau in permutations(range(m))
            )
            orbits.add(canon)
    assert len(orbits) == len(young.erasure_census(n, m))


def test_census_large_entry_dimension():
    entries = young.erasure_census(10, 15)
    match = [e for e in entries if e.lam_n.parts == () and e.lam_m.parts == (1,)]
    assert len(match) == 1 and match[0].dim == 14  # one less than the big alphabet


def test_census_requires_ordering():
    with pytest.raises(young.DiagramError):
        young.erasure_census(3, 2)


def test_erasure_weights():
    w = young.erasure_weights(4)
    assert w[0] == 1.0
    assert w[1] == pytest.approx(0.5)
    assert w[2] == 0.0  # box count equals sqrt(4): weight drops to zero
    w2 = young.erasure_weights(2)
    assert w2[1] == pytest.approx(1 - 1 / math.sqrt(2))
    assert all(0.0 <= v <= 1.0 for v in w2.values())
    assert young.erasure_weights(7)[0] == 1.0
