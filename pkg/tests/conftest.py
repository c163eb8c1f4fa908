import numpy as np
import pytest

from treegraft.dataset import parse_data, parse_names
from treegraft.tree import ContinuousTest, DecisionTree, Leaf

TEN_POINT_NAMES = "+,-.\nA: continuous.\nB: continuous."
TEN_POINT_DATA = """\
1,0.5,+
3,0.2,+
4,0.8,+
6,6,-
7,8,-
8,7,-
9,9,-
7,9,-
8,3,-
9,5,-
"""


@pytest.fixture
def ten_point_schema():
    return parse_names(TEN_POINT_NAMES)


@pytest.fixture
def ten_points(ten_point_schema):
    return parse_data(TEN_POINT_DATA, ten_point_schema)


@pytest.fixture
def hand_tree(ten_point_schema):
    """Single cut at A <= 5: low branch all three +, high branch all seven -."""
    low = Leaf(0, np.array([3.0, 0.0]))
    high = Leaf(1, np.array([0.0, 7.0]))
    return DecisionTree(ContinuousTest(0, 5.0, low, high), ten_point_schema)
