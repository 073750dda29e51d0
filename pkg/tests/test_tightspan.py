import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from strategies import metric_tables
from trimspan.cylinder import EdgeInterior, Vertex, build_cylinder, rho
from trimspan.errors import BaseMismatch, NotMember, StarViolation
from trimspan.metric import drift, underline_d, validate_space
from trimspan.tightspan import (
    BRANCH,
    ROOT,
    TAU,
    TightSpanFunction,
    d_T,
    decompose,
    descend,
    f_point,
    filtration_level,
    is_member,
    kuratowski,
    lift,
    project,
    pseudo_tight_span,
    quotient_function,
    sample_members,
    tau_lift,
    verify_main_theorem,
)
from trimspan.treegen import caterpillar, circle_space, equilateral, line_space, two_point
from trimspan.trimming import trimming_sequence

H = Fraction(1, 2)


def fn(S, values):
    return TightSpanFunction(S, tuple(values))


def setup(S):
    seq = trimming_sequence(S)
    return seq, build_cylinder(seq)


def test_membership_two_point():
    S = two_point(4)
    assert is_member(S, fn(S, (1, 3)))
    bad = is_member(S, fn(S, (1, 2)))
    assert not bad and bad.star_violation == ("x", "y")
    loose = is_member(S, fn(S, (2, 3)))
    assert not loose and loose.slack[0] == "x" and loose.slack[1] == 1


def test_kuratowski_members():
    for S in (equilateral(2), line_space((0, 1, 3)), caterpillar()):
        for x in S.labels:
            assert is_member(S, kuratowski(S, x))
    assert kuratowski(equilateral(2), "x1").values == (0, 2, 2)
    assert kuratowski(line_space((0, 1, 3)), "p1").values == (1, 0, 2)
    assert kuratowski(validate_space([[0]]), "p0").values == (0,)


def test_negative_values_rejected():
    with pytest.raises(ValueError):
        fn(two_point(4), (-1, 5))


def test_d_T_needs_same_base():
    with pytest.raises(BaseMismatch):
        d_T(kuratowski(two_point(4), "x"), kuratowski(two_point(5), "x"))


def test_project_examples():
    E = equilateral(2)
    assert project(E, (2, 2, 2)).values == (0, 2, 2)
    assert project(two_point(4), (3, 3)).values == (1, 3)
    f = kuratowski(E, "x2")
    assert project(E, f.values).values == f.values


def test_project_rejects_star_violation():
    with pytest.raises(StarViolation):
        project(two_point(4), (1, 1))


def test_f_point_examples():
    seq, C = setup(caterpillar())
    assert f_point(seq, C, Vertex(1, "a")).values == (1, 1, 1, 6, 6, 6)
    assert f_point(seq, C, Vertex(0, "c")) == kuratowski(seq.base, "c")
    seq, C = setup(equilateral(2))
    assert f_point(seq, C, Vertex(1, "x1")).values == (1, 1, 1)


def test_lift_examples():
    seq, _ = setup(caterpillar())
    X1 = seq.levels[1].space
    g = kuratowski(X1, "a")
    assert g.values == (0, 5)
    assert lift(seq, 1, g).values == (1, 1, 1, 6, 6, 6)
    assert lift(seq, 0, kuratowski(seq.base, "b")) == kuratowski(seq.base, "b")
    seq, _ = setup(equilateral(2))
    top = seq.x_infinity
    assert lift(seq, 1, fn(top, (0,))).as_dict() == underline_d(seq.base)


def test_lift_rejects_nonmember():
    seq, _ = setup(caterpillar())
    with pytest.raises(NotMember):
        lift(seq, 1, fn(seq.levels[1].space, (1, 1)))


def test_descend_rejects_below_floor():
    seq, _ = setup(caterpillar())
    with pytest.raises(NotMember):
        descend(seq, 1, kuratowski(seq.base, "a"))


def test_filtration_levels():
    seq, _ = setup(caterpillar())
    sig = fn(seq.base, [seq.sigma_table[x] for x in seq.base.labels])
    assert filtration_level(seq, sig) == (2, True)
    E = equilateral(2)
    seq, _ = setup(E)
    assert filtration_level(seq, fn(E, (H, 3 * H, 3 * H))) == (0, False)
    assert filtration_level(seq, kuratowski(E, "x1")) == (0, False)


def test_tau_is_sigma_for_singleton_limit():
    seq, _ = setup(caterpillar())
    f = tau_lift(seq, fn(seq.x_infinity, (0,)))
    assert f.values == tuple([Fraction(7, 2)] * 6)


def test_decompose_branch():
    seq, C = setup(equilateral(2))
    cls = decompose(seq, C, fn(seq.base, (H, 3 * H, 3 * H)))
    assert cls.kind == BRANCH and cls.level == 0
    assert cls.point == EdgeInterior(0, "x1", H)
    assert f_point(seq, C, cls.point).values == (H, 3 * H, 3 * H)
    assert rho(C, Vertex(0, "x2"), cls.point) == 3 * H


def test_decompose_root():
    seq, C = setup(caterpillar())
    sig = fn(seq.base, [seq.sigma_table[x] for x in seq.base.labels])
    cls = decompose(seq, C, sig)
    assert cls.kind == ROOT and cls.point == Vertex(2, "a") and cls.component == "a"


def test_decompose_on_trim_space():
    S = circle_space(4, 4)
    seq, C = setup(S)
    assert decompose(seq, C, kuratowski(S, "N")).kind == ROOT
    assert decompose(seq, C, fn(S, (1, 1, 1, 1))).kind == TAU


def test_decompose_needs_member():
    seq, C = setup(two_point(4))
    with pytest.raises(NotMember):
        decompose(seq, C, fn(seq.base, (2, 3)))


def test_pseudometric_tight_span():
    E = equilateral(2)
    P = drift(E, {x: 1 for x in E.labels})
    target = validate_space([[0]], ["x1"])
    f = pseudo_tight_span(P, fn(target, (0,)))
    assert f.values == (0, 0, 0)
    assert quotient_function(P, f).values == (0,)


def test_verify_examples():
    seq, C = setup(caterpillar())
    report = verify_main_theorem(seq, C, 100, 0)
    assert report["violations"] == [] and report["tau"] == 0
    assert report["branch"] + report["root"] == 100
    seq, C = setup(circle_space(4, 4))
    report = verify_main_theorem(seq, C, 50, 0)
    assert report["violations"] == [] and report["branch"] == 0
    seq, C = setup(validate_space([[0]]))
    report = verify_main_theorem(seq, C, 10, 0)
    assert report["violations"] == [] and report["root"] == 10


@settings(max_examples=50, deadline=None)
@given(metric_tables(), st.integers(0, 2**16))
def test_projection_lands_in_tight_span(table, seed):
    S = validate_space(table)
    rng = random.Random(seed)
    D = oracles.F(table)
    for f in sample_members(S, 5, rng):
        assert oracles.in_tight_span(D, f.values)
        assert is_member(S, f)


@settings(max_examples=50, deadline=None)
@given(metric_tables(), st.lists(st.fractions(min_value=0, max_value=20, max_denominator=6), min_size=8, max_size=8))
def test_membership_agrees_with_classical_definition(table, values):
    S = validate_space(table)
    f = fn(S, values[: len(S)])
    assert bool(is_member(S, f)) == oracles.in_tight_span(oracles.F(table), f.values)


@settings(max_examples=30, deadline=None)
@given(metric_tables(min_size=2), st.integers(0, 2**16))
def test_decompose_recovers_cylinder_points(table, seed):
    seq, C = setup(validate_space(table))
    report = verify_main_theorem(seq, C, 20, seed)
    assert report["violations"] == []
