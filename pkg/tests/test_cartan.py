import itertools

import pytest

from kmfactor import dual, is_w_finite, load_gcm, parabolic, to_json_dict, validate_gcm
from kmfactor.errors import AxiomViolation, IndexOutOfRange, InvalidMatrix, NonSquare
from kmfactor.weyl import coroot_reflection_matrix, _identity, _mat_mul


def test_validate_accepts_symmetric_rank2(a2):
    assert a2.size == 2
    assert a2.matrix == ((2, -1), (-1, 2))


def test_validate_accepts_affine(affine):
    assert affine.matrix == ((2, -2), (-2, 2))


def test_zero_pattern_must_be_symmetric():
    with pytest.raises(AxiomViolation) as exc:
        validate_gcm([[2, -1], [0, 2]])
    assert exc.value.axiom == "R3"
    assert (exc.value.row, exc.value.col) == (2, 1)


def test_diagonal_must_be_two():
    with pytest.raises(AxiomViolation) as exc:
        validate_gcm([[1, -1], [-1, 2]])
    assert exc.value.axiom == "R1"
    assert (exc.value.row, exc.value.col) == (1, 1)


def test_off_diagonal_must_be_nonpositive():
    with pytest.raises(AxiomViolation) as exc:
        validate_gcm([[2, 1], [-1, 2]])
    assert exc.value.axiom == "R2"
    assert (exc.value.row, exc.value.col) == (1, 2)


def test_non_square_rejected():
    with pytest.raises(NonSquare):
        validate_gcm([[2, -1]])


def test_non_integer_rejected():
    with pytest.raises(InvalidMatrix):
        validate_gcm([[2.0, -1], [-1, 2]])
    with pytest.raises(InvalidMatrix):
        validate_gcm([])


def test_dual_of_symmetric_is_itself(a2):
    assert dual(a2).matrix == a2.matrix


def test_dual_transposes(b2):
    assert dual(b2).matrix == ((2, -2), (-1, 2))


def test_dual_rank1(a1):
    assert dual(a1).matrix == ((2,),)


def test_dual_involution(b2, g2, affine):
    for g in (b2, g2, affine):
        assert dual(dual(g)) == g


def test_finiteness_basic(a2, affine):
    assert is_w_finite(a2, {0, 1})
    assert not is_w_finite(affine, {0, 1})
    assert is_w_finite(affine, ())


def test_finiteness_index_check(a2):
    with pytest.raises(IndexOutOfRange):
        is_w_finite(a2, {2})


def test_parabolic_record(affine):
    p = parabolic(affine, {0})
    assert p.finite
    assert parabolic(affine, {0, 1}).finite is False


def _bfs_group_size(gcm, gens, cap=10_000):
    """Independent oracle: close the generators under multiplication."""
    mats = {i: coroot_reflection_matrix(gcm, i) for i in gens}
    seen = {_identity(gcm.size)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for m in frontier:
            for s in mats.values():
                prod = _mat_mul(m, s)
                if prod not in seen:
                    if len(seen) >= cap:
                        return None  # treated as infinite
                    seen.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return len(seen)


FAMILY = [
    [[2]],
    [[2, -1], [-1, 2]],
    [[2, -1], [-2, 2]],
    [[2, -1], [-3, 2]],
    [[2, -2], [-2, 2]],
    [[2, -3], [-3, 2]],
    [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]],
    [[2, -2, -2], [-2, 2, -2], [-2, -2, 2]],
]


@pytest.mark.parametrize("raw", FAMILY)
def test_finiteness_matches_bfs_closure(raw):
    gcm = validate_gcm(raw)
    for r in range(gcm.size + 1):
        for subset in itertools.combinations(range(gcm.size), r):
            closed = _bfs_group_size(gcm, subset)
            assert is_w_finite(gcm, subset) == (closed is not None), subset


@pytest.mark.parametrize("raw", FAMILY)
def test_finiteness_is_monotone(raw):
    gcm = validate_gcm(raw)
    subsets = [
        frozenset(s)
        for r in range(gcm.size + 1)
        for s in itertools.combinations(range(gcm.size), r)
    ]
    for big in subsets:
        if is_w_finite(gcm, big):
            for small in subsets:
                if small <= big:
                    assert is_w_finite(gcm, small)


@pytest.mark.parametrize("raw", FAMILY)
def test_dual_preserves_finiteness(raw):
    gcm = validate_gcm(raw)
    for r in range(gcm.size + 1):
        for subset in itertools.combinations(range(gcm.size), r):
            assert is_w_finite(gcm, subset) == is_w_finite(dual(gcm), subset)


def test_json_round_trip(tmp_path, b2):
    path = tmp_path / "b2.json"
    path.write_text('{"label": "B2", "matrix": [[2, -1], [-2, 2]]}')
    loaded = load_gcm(path)
    assert loaded == b2
    assert to_json_dict(loaded) == {"label": "B2", "matrix": [[2, -1], [-2, 2]]}


def test_json_requires_matrix_key():
    with pytest.raises(InvalidMatrix):
        load_gcm({"label": "x"})
