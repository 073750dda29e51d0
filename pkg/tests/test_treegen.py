import random
from fractions import Fraction

import pytest

from trimspan.errors import NoMeeting, NonpositiveLength, NotATree, ParseError, TooFewLeaves
from trimspan.metric import metric_quotient, underline_d
from trimspan.treegen import (
    ChainSpec,
    MetricTree,
    caterpillar,
    caterpillar_chain,
    caterpillar_tree,
    chain_level_metric,
    chain_metric,
    chain_oracle,
    four_point_violation,
    leaf_space,
    oracle_levels,
    parse_newick,
    perturbed_metric,
    random_suite,
    random_tree,
    sequence_chain,
    star,
    underline_d_tree_oracle,
)
from trimspan.trimming import trimming_sequence


def test_star_leaf_space():
    S = leaf_space(star(1, 2, 3))
    assert S.labels == ("l0", "l1", "l2")
    assert S.d("l0", "l1") == 3 and S.d("l0", "l2") == 4 and S.d("l1", "l2") == 5


def test_single_edge():
    S = leaf_space(MetricTree(("u", "v"), (("u", "v", 5),)))
    assert S.dist == ((0, 5), (5, 0))


def test_caterpillar_tree_leaf_space():
    assert leaf_space(caterpillar_tree()).dist == caterpillar().dist


def test_not_a_tree():
    cycle = MetricTree(("a", "b", "c"), (("a", "b", 1), ("b", "c", 1), ("c", "a", 1)))
    with pytest.raises(NotATree):
        leaf_space(cycle)
    split = MetricTree(("a", "b", "c", "d"), (("a", "b", 1), ("c", "d", 1)))
    assert not split.connected
    with pytest.raises(NotATree):
        leaf_space(split)


def test_tree_oracle_examples():
    assert all(v == (1, True) for v in underline_d_tree_oracle(caterpillar_tree()).values())
    assert list(underline_d_tree_oracle(star(1, 2, 3)).values()) == [(1, True), (2, True), (3, True)]
    path = MetricTree(("a", "b", "c", "d"), (("a", "b", 1), ("b", "c", 1), ("c", "d", 1)))
    with pytest.raises(TooFewLeaves):
        underline_d_tree_oracle(path)


def test_newick_star():
    T = parse_newick("(a:1,b:2,c:3)r;")
    assert T.leaves == ("a", "b", "c")
    assert leaf_space(T).dist == leaf_space(star(1, 2, 3)).dist


def test_newick_degree_two_root():
    T = parse_newick("(a:1,b:1);")
    assert len(T.nodes) == 3
    assert leaf_space(T).d("a", "b") == 2


def test_newick_exact_decimals_and_quotes():
    T = parse_newick(" ( 'leaf one':0.1 , b:2.5 ) ; ")
    assert leaf_space(T).d("leaf one", "b") == Fraction(13, 5)


def test_newick_zero_length():
    with pytest.raises(NonpositiveLength):
        parse_newick("(a:0,b:1);")
    T = parse_newick("(a:0,b:0,c:1);", pseudometric=True)
    P = leaf_space(T)
    assert not P.is_metric
    assert len(metric_quotient(P)[0]) == 2


@pytest.mark.parametrize(
    "text",
    ["(a:1,b:2", "(a:1,:2);", "(a,b:1);", "(a:x,b:1);", "(a:1,a:1);", "(a:1,b:1);x", ""],
)
def test_newick_errors(text):
    with pytest.raises(ParseError):
        parse_newick(text)


def test_newick_error_position():
    with pytest.raises(ParseError) as exc:
        parse_newick("(a:1,b:2")
    assert exc.value.position == 8


def test_caterpillar_chain_formula():
    S = chain_metric(caterpillar_chain())
    assert S.d("a", "b") == 2 and S.d("a", "d") == 7
    assert chain_level_metric(caterpillar_chain(), 1).d("u", "v") == 5
    assert oracle_levels(caterpillar_chain()) == [0]


def test_one_level_chain():
    spec = ChainSpec((("a", "b", "c"), ("w",)), ({"a": "w", "b": "w", "c": "w"},), ({"a": 1, "b": 1, "c": 1},))
    S = chain_metric(spec)
    assert {d for _, _, d in S.items()} == {2}
    assert len(trimming_sequence(S).levels[1].space) == 1


def test_sequence_chain_truncation():
    spec = sequence_chain("012", 3, "0", 1)
    assert [len(lvl) for lvl in spec.levels] == [9, 3, 1]
    assert oracle_levels(spec) == [0, 1]
    seq = trimming_sequence(chain_metric(spec))
    assert set(seq.levels[0].underline.values()) == {1}
    assert set(seq.levels[1].underline.values()) == {1}
    assert len(seq.x_infinity) == 1


def test_chain_validation():
    with pytest.raises(ValueError):
        ChainSpec((("a", "b"), ("u", "v")), ({"a": "u", "b": "u"},), ({"a": 1, "b": 1},))
    with pytest.raises(ValueError):
        ChainSpec((("a", "b"), ("u",)), ({"a": "u", "b": "u"},), ({"a": 0, "b": 1},))


def test_no_meeting():
    spec = ChainSpec((("a", "b"), ("u", "v")), ({"a": "u", "b": "v"},), ({"a": 1, "b": 1},))
    with pytest.raises(NoMeeting):
        chain_metric(spec)


def test_chain_json_round_trip():
    spec = caterpillar_chain()
    again = ChainSpec.from_json(spec.to_json())
    assert again == spec
    oracle = chain_oracle(spec)
    assert oracle["levels"][0]["underline"] == {x: "1" for x in "abcdef"}
    assert "underline" not in oracle["levels"][1]


def test_random_trees_agree_with_oracle():
    rng = random.Random(3)
    for _ in range(30):
        T = random_tree(rng)
        S = leaf_space(T)
        assert four_point_violation(S) is None
        ud = underline_d(S)
        for x, (bound, exact) in underline_d_tree_oracle(T).items():
            assert bound <= ud[x]
            if exact:
                assert bound == ud[x]


def test_perturbed_metrics_are_metrics():
    rng = random.Random(5)
    for n in range(2, 9):
        S = perturbed_metric(rng, n)
        assert len(S) == n and S.is_metric


def test_random_suite_is_deterministic():
    a = random_suite(seed=11, count=10)
    b = random_suite(seed=11, count=10)
    assert [s.dist for s in a] == [s.dist for s in b]
    assert all(2 <= len(s) <= 8 for s in a)
