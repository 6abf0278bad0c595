"""Shared fixtures: a couple of tiny spaces and models used across modules."""

import pytest

from topodyn.models import DTModel, PDLModel, SubsetModel
from topodyn.topology import TopoSpace


@pytest.fixture
def sierpinski() -> TopoSpace:
    # two points, {1} open, {0} not
    return TopoSpace.from_opens(2, [[], [1], [0, 1]])


@pytest.fixture
def swap_dt(sierpinski) -> DTModel:
    return DTModel(sierpinski, ("a",), {"a": (1, 0)}, {"p": 0b10})


@pytest.fixture
def const1_subset(sierpinski) -> SubsetModel:
    # constant map to the dense point; open since every image is {} or {1}
    return SubsetModel(sierpinski, ("a",), {"a": (1, 1)}, {"p": 0b10})


@pytest.fixture
def two_point_pdl() -> PDLModel:
    # rand: both points reach both points; at: identity
    return PDLModel(
        2,
        ("rand", "at"),
        {"rand": (0b11, 0b11), "at": (0b01, 0b10)},
        {"zero": 0b01, "one": 0b10},
        serial_flag=True,
    )
