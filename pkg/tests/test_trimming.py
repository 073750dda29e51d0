from fractions import Fraction

import pytest
from hypothesis import given, settings

import oracles
from strategies import metric_tables
from trimspan.errors import NeverMeets
from trimspan.metric import validate_space
from trimspan.treegen import caterpillar, circle_space, equilateral, line_space, two_point
from trimspan.trimming import (
    congruent,
    meeting_index,
    sigma,
    sigma_levels,
    sigma_partial,
    trim_step,
    trimming_sequence,
)


@pytest.fixture(scope="module")
def cat():
    return trimming_sequence(caterpillar())


def test_trim_step_collapses_equilateral():
    T, q = trim_step(equilateral(2))
    assert len(T) == 1
    T, q = trim_step(line_space((0, 1, 3)))
    assert len(T) == 1


def test_trim_step_fixes_trim_space():
    C4 = circle_space(4, 4)
    T, q = trim_step(C4)
    assert q.is_identity and T.dist == C4.dist


def test_trim_step_needs_metric():
    with pytest.raises(TypeError):
        trim_step(validate_space([[0, 0], [0, 0]]))


def test_caterpillar_sequence(cat):
    assert cat.N == 2
    assert [len(level.space) for level in cat.levels] == [6, 2, 1]
    assert set(cat.levels[0].underline.values()) == {1}
    X1 = cat.levels[1].space
    assert X1.labels == ("a", "d")
    assert X1.d("a", "d") == 5
    assert set(cat.levels[1].underline.values()) == {Fraction(5, 2)}
    assert len(cat.x_infinity) == 1


def test_trim_input_has_N_zero():
    seq = trimming_sequence(circle_space(4, 4))
    assert seq.N == 0 and len(seq.levels) == 1


def test_two_point_has_N_one():
    seq = trimming_sequence(two_point(3))
    assert seq.N == 1 and len(seq.x_infinity) == 1


def test_meeting_index(cat):
    assert meeting_index(cat, "a", "b") == 1
    assert meeting_index(cat, "a", "d") == 2
    assert meeting_index(cat, "a", "a") == 0
    assert congruent(cat, "a", "f")


def test_never_meets_on_trim_space():
    seq = trimming_sequence(circle_space(4, 4))
    with pytest.raises(NeverMeets):
        meeting_index(seq, "N", "E")


def test_sigma_values(cat):
    assert sigma_partial(cat, "a", 0) == 0
    assert sigma_partial(cat, "a", 1) == 1
    assert sigma_partial(cat, "a", 2) == Fraction(7, 2)
    assert sigma_partial(cat, "a", 9) == Fraction(7, 2)
    assert sigma(cat, "a") == sigma(cat, "d") == Fraction(7, 2)
    X = cat.base
    assert X.d("a", "d") == sigma_partial(cat, "a", 2) + sigma_partial(cat, "d", 2)


def test_sigma_on_trim_space_vanishes():
    seq = trimming_sequence(circle_space(4, 4))
    assert all(v == 0 for row in sigma_levels(seq) for v in row.values())


def test_first_partial_sum_is_underline(cat):
    assert sigma_levels(cat)[1] == dict(cat.levels[0].underline)


def test_sigma_partial_rejects_negative(cat):
    with pytest.raises(ValueError):
        sigma_partial(cat, "a", -1)


@settings(max_examples=80, deadline=None)
@given(metric_tables())
def test_sequence_matches_brute_force(table):
    S = validate_space(table)
    seq = trimming_sequence(S)
    ref = oracles.trimming(oracles.F(table))
    assert seq.N == len(ref) - 1 <= len(S)
    for level, (D, ud, _) in zip(seq.levels, ref):
        assert [list(r) for r in level.space.dist] == D
        assert list(level.underline.values()) == ud
    assert [sigma(seq, x) for x in S.labels] == oracles.sigma(ref, len(S))


@settings(max_examples=60, deadline=None)
@given(metric_tables(min_size=2))
def test_sigma_distance_identities(table):
    S = validate_space(table)
    seq = trimming_sequence(S)
    for x, y, d in S.items():
        if congruent(seq, x, y):
            m = meeting_index(seq, x, y)
            assert d == sigma_partial(seq, x, m) + sigma_partial(seq, y, m)
        else:
            u, v = seq.to_infinity[x], seq.to_infinity[y]
            assert d == seq.d_infinity(u, v) + sigma(seq, x) + sigma(seq, y)
