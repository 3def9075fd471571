import pytest

from treewass import build_tree


@pytest.fixture
def path_tree():
    # 0 -1- 1 -2- 2
    return build_tree([(0, 1, 1.0), (1, 2, 2.0)], 0)


@pytest.fixture
def star_tree():
    return build_tree([("r", "a", 1), ("r", "b", 2), ("r", "c", 3)], "r")
