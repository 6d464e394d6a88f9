import re

import pytest
from hypothesis import given

from troptree.newick import NewickError, parse_newick, write_newick
from troptree.torus import torus_eq
from troptree.treemetrics import EquidistantTree, random_coalescent_tree, tree_to_vector, vector_to_tree

from strategies import ultrametrics

FIVE_TEXT = "((A:8,B:8):12,(C:10,(D:5,E:5):5):10);"


def test_parse_five_leaf_tree():
    t = parse_newick(FIVE_TEXT)
    assert t.leaf_labels == ("A", "B", "C", "D", "E")
    assert t.height == 20
    assert dict(t.internal_edges) == {frozenset({1, 2}): 12, frozenset({3, 4, 5}): 10, frozenset({4, 5}): 5}
    assert tree_to_vector(t).coords.tolist() == [16, 40, 40, 40, 40, 40, 40, 20, 20, 10]


def test_write_five_leaf_tree():
    expected = "((A:8.000000,B:8.000000):12.000000,(C:10.000000,(D:5.000000,E:5.000000):5.000000):10.000000);"
    assert write_newick(parse_newick(FIVE_TEXT)) == expected


def test_child_order_does_not_matter():
    a = parse_newick(FIVE_TEXT)
    b = parse_newick("(((E:5,D:5):5,C:10):10,(B:8,A:8):12);")
    assert a == b


def test_two_leaf_and_star():
    t = parse_newick("(A:1,B:1);")
    assert t.height == 1 and not t.internal_edges
    star = EquidistantTree.from_clades({}, 1, leaf_count=3)
    assert write_newick(star) == "(1:1.000000,2:1.000000,3:1.000000);"


def test_numeric_labels_sort_numerically():
    t = parse_newick("((10:1,2:1):1,1:2);")
    assert t.leaf_labels == ("1", "2", "10")
    assert t.clades == {frozenset({2, 3})}


def test_quoted_labels_comments_and_whitespace():
    t = parse_newick(" ( 'it''s a':1 [note] , 'b c':1 ) ; ")
    assert t.leaf_labels == ("b c", "it's a")
    assert parse_newick(write_newick(t)) == t


def test_zero_internal_edges_are_contracted():
    t = parse_newick("((A:1,B:1):0,C:1);")
    assert not t.internal_edges


def test_small_rounding_is_tolerated():
    t = parse_newick("((A:0.3333333,B:0.3333333):0.6666667,C:1);")
    assert t.height == pytest.approx(1.0)


@pytest.mark.parametrize(
    "text, message",
    [
        ("((A:1,B:2):1,C:3);", "not equidistant"),
        ("((A:1,B:1):1,C:2)", "expected"),
        ("((A:1,B:1):1,C:2", "expected ',' or ')'"),
        ("((A:1,B:1),C:2);", "missing branch length"),
        ("((A:1):1,B:2);", "degree 2"),
        ("((A:1,A:1):1,C:2);", "duplicate"),
        ("((A:1,:1):1,C:2);", "unlabeled"),
        ("(A:1);", "at least two"),
        ("((A:-1,B:-1):3,C:2);", "negative"),
        ("(A:1,B:1); x", "after ';'"),
        ("('A:1,B:1);", "unterminated"),
        ("(A:1,B:1[x);", "unterminated comment"),
    ],
)
def test_rejections(text, message):
    with pytest.raises(NewickError, match=re.escape(message)):
        parse_newick(text)


def test_error_offset_is_in_bytes():
    with pytest.raises(NewickError) as info:
        parse_newick("(Ä:1,B:1)x")
    assert info.value.offset == len("(Ä:1,B:1)x".encode())


@given(ultrametrics(2, 9))
def test_write_then_parse_roundtrip(w):
    t = vector_to_tree(w)
    back = parse_newick(write_newick(t, precision=12))
    assert torus_eq(tree_to_vector(back), w, tol=1e-8)
    assert back.clades == t.clades


def test_roundtrip_keeps_coalescent_shape():
    t = random_coalescent_tree(8, 5)
    assert parse_newick(write_newick(t)).clades == t.clades
