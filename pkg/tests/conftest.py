import pytest

from topopuzzles.core import PuzzleInstance


# 5x5 worked example: islands with requirements, unique solution.
WORKED_BRIDGES_BOARD = "3..1.\n..4.3\n.....\n.....\n4.4.1"
WORKED_BRIDGES_SOLUTION = '3--1.\n".4=3\n".".|\n".".|\n4=4.1'


@pytest.fixture
def bridges_example() -> PuzzleInstance:
    islands = [
        [0, 0, 3], [0, 3, 1], [1, 2, 4], [1, 4, 3],
        [4, 0, 4], [4, 2, 4], [4, 4, 1],
    ]
    return PuzzleInstance(
        family="bridges", width=5, height=5, payload={"islands": islands}
    )


@pytest.fixture
def bridges_example_solution() -> dict:
    # islands sorted by (row, col):
    # 0:(0,0)=3 1:(0,3)=1 2:(1,2)=4 3:(1,4)=3 4:(4,0)=4 5:(4,2)=4 6:(4,4)=1
    return {
        "edges": [
            [0, 1, 1],  # (0,0)-(0,3) single
            [0, 4, 2],  # (0,0)-(4,0) double
            [2, 3, 2],  # (1,2)-(1,4) double
            [2, 5, 2],  # (1,2)-(4,2) double
            [3, 6, 1],  # (1,4)-(4,4) single
            [4, 5, 2],  # (4,0)-(4,2) double
        ]
    }
