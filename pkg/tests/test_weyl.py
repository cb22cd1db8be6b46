import math

import pytest

from kmfactor import (
    build_tables,
    enumerate_roots,
    enumerate_weyl,
    estimate_radius,
    minimal_coset_reps,
    poincare,
)
from kmfactor.errors import InsufficientData, LengthBoundTooSmall, RootTableTooShallow
from kmfactor.weyl import _mat_mul, _mat_vec


def test_rank1_two_elements(a1):
    _, table = build_tables(a1, 5)
    assert table.counts == (1, 1)
    assert table.closed
    assert {w.word for w in table.elements()} == {(), (0,)}


def test_a2_closes_at_six(a2):
    _, table = build_tables(a2, 3)
    assert table.counts == (1, 2, 2, 1)
    # closure is only observable once a shell comes back empty
    _, deeper = build_tables(a2, 4)
    assert deeper.closed
    assert deeper.counts == (1, 2, 2, 1)


def test_affine_counts(affine):
    _, table = build_tables(affine, 4)
    assert table.counts == (1, 2, 2, 2, 2)
    assert not table.closed


@pytest.mark.parametrize("fixture", ["a2", "b2", "affine"])
def test_inversion_sets_have_length_size(fixture, request):
    gcm = request.getfixturevalue(fixture)
    _, table = build_tables(gcm, 6)
    for w in table.elements():
        assert len(w.inversions) == w.length
        assert len(set(w.inversions)) == w.length


@pytest.mark.parametrize("fixture", ["a2", "b2"])
def test_inversions_match_definition(fixture, request):
    # oracle: b is an inversion of w iff the inverse root action sends it
    # negative; the inverse acts by the reversed word's matrix product
    gcm = request.getfixturevalue(fixture)
    roots, table = build_tables(gcm, 8)
    from kmfactor.weyl import _identity, root_reflection_matrix
    rmat = {i: root_reflection_matrix(gcm, i) for i in range(gcm.size)}
    for w in table.elements():
        inv_action = _identity(gcm.size)
        for i in reversed(w.word):
            inv_action = _mat_mul(inv_action, rmat[i])
        expected = {
            e.index
            for e in roots
            if any(v < 0 for v in _mat_vec(inv_action, e.n))
        }
        assert set(w.inversions) == expected


def test_action_matrices_compose(a2, affine):
    for gcm in (a2, affine):
        _, table = build_tables(gcm, 5)
        elements = list(table.elements())
        for w1 in elements[:6]:
            for w2 in elements[:6]:
                prod = _mat_mul(w1.matrix, w2.matrix)
                found = table.element(prod)
                if found is not None and w1.length + w2.length <= table.length_bound:
                    assert found.length <= w1.length + w2.length


def test_poincare_full_and_parabolic(a2, affine):
    _, table = build_tables(a2, 8)
    full = poincare(table)
    assert full.coefficients == (1, 2, 2, 1)
    assert full.exact
    sub = poincare(table, {0})
    assert sub.coefficients == (1, 1)
    assert sub.exact
    _, atable = build_tables(affine, 4)
    aff = poincare(atable)
    assert aff.coefficients == (1, 2, 2, 2, 2)
    assert not aff.exact


def test_poincare_rejects_unclosed_finite_parabolic(a2):
    _, table = build_tables(a2, 1)
    with pytest.raises(LengthBoundTooSmall):
        poincare(table, {0, 1})


def test_minimal_coset_reps_examples(a2):
    _, table = build_tables(a2, 6)
    reps = minimal_coset_reps(table, {0})
    assert [w.word for w in reps] == [(), (1,), (0, 1)]
    assert len(minimal_coset_reps(table, ())) == 6
    assert [w.word for w in minimal_coset_reps(table, {0, 1})] == [()]


@pytest.mark.parametrize("fixture,subset", [("a2", {0}), ("b2", {1}), ("affine", {0})])
def test_length_additivity_on_cosets(fixture, subset, request):
    gcm = request.getfixturevalue(fixture)
    _, table = build_tables(gcm, 8)
    reps = minimal_coset_reps(table, subset)
    sub = enumerate_weyl(gcm, table.length_bound, None, gens=subset)
    for rep in reps:
        for u in sub.elements():
            if rep.length + u.length > table.length_bound:
                continue
            prod = table.element(_mat_mul(rep.matrix, u.matrix))
            assert prod is not None
            assert prod.length == rep.length + u.length


def test_coset_partition_unique(a2, affine):
    for gcm, subset in ((a2, {0}), (affine, {1})):
        _, table = build_tables(gcm, 8)
        reps = minimal_coset_reps(table, subset)
        sub = enumerate_weyl(gcm, table.length_bound, None, gens=subset)
        limit = 5
        factored = {}
        for rep in reps:
            for u in sub.elements():
                if rep.length + u.length <= limit:
                    key = _mat_mul(rep.matrix, u.matrix)
                    assert key not in factored
                    factored[key] = (rep.word, u.word)
        short = [w for w in table.elements() if w.length <= limit]
        assert set(factored) == {w.matrix for w in short}


def test_counts_match_independent_closure(b2, g2):
    # oracle: plain matrix-product closure, no inversion machinery
    for gcm, order in ((b2, 8), (g2, 12)):
        table = enumerate_weyl(gcm, 12, None)
        assert sum(table.counts) == order
        assert table.closed


def test_radius_finite_type_is_infinite(a2):
    _, table = build_tables(a2, 8)
    assert estimate_radius(poincare(table)) == math.inf


def test_radius_affine_close_to_one(affine):
    table = enumerate_weyl(affine, 200, None)
    est = estimate_radius(poincare(table))
    assert 0.95 <= est <= 1.05


def test_radius_rank2_indefinite_matches_dihedral_growth(hyperbolic):
    # any rank-2 group is dihedral: two elements per length, so the
    # estimate comes out just below one, exactly as for the affine matrix
    table = enumerate_weyl(hyperbolic, 200, None)
    assert table.counts[1:] == (2,) * 200
    est = estimate_radius(poincare(table))
    assert 0.95 <= est <= 1.0


def test_radius_detects_exponential_growth(rank3_free):
    table = enumerate_weyl(rank3_free, 14, None)
    assert table.counts[1:5] == (3, 6, 12, 24)
    est = estimate_radius(poincare(table))
    assert est < 0.9
    assert abs(est - 0.5) < 0.1


def test_radius_needs_enough_coefficients(affine):
    table = enumerate_weyl(affine, 5, None)
    with pytest.raises(InsufficientData):
        estimate_radius(poincare(table))


def test_shallow_root_table_detected(affine):
    shallow = enumerate_roots(affine, 3)
    with pytest.raises(RootTableTooShallow):
        enumerate_weyl(affine, 6, shallow)


def test_build_tables_deepens_for_indefinite(hyperbolic):
    roots, table = build_tables(hyperbolic, 10)
    assert table.counts == (1,) + (2,) * 10
    for w in table.elements():
        assert len(w.inversions) == w.length


def test_parabolic_generator_restriction(affine_a2):
    table = enumerate_weyl(affine_a2, 8, None, gens={0, 1})
    assert table.closed
    assert table.counts == (1, 2, 2, 1)
