import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flowzeta import FREE, FREE_ABELIAN, GroupSpec


@pytest.fixture(scope="session")
def spec_z():
    return GroupSpec(FREE_ABELIAN, 1, (Fraction(-1),))


@pytest.fixture(scope="session")
def spec_z2():
    return GroupSpec(FREE_ABELIAN, 2, (Fraction(-1), Fraction(-1)))


@pytest.fixture(scope="session")
def spec_f2():
    return GroupSpec(FREE, 2, (Fraction(-1), Fraction(-3, 2)))


@pytest.fixture(scope="session")
def spec_z_double():
    # endomorphism n -> 2n
    return GroupSpec(FREE_ABELIAN, 1, (Fraction(-1),), ((2,),))


@pytest.fixture(scope="session")
def spec_z2_swap():
    # endomorphism swapping the two coordinates
    return GroupSpec(
        FREE_ABELIAN, 2, (Fraction(-1), Fraction(-1)), ((0, 1), (1, 0))
    )


@pytest.fixture(scope="session")
def spec_f2_twisted():
    # x1 -> x1 x2, x2 -> x2
    return GroupSpec(FREE, 2, (Fraction(-1), Fraction(-1)), ((1, 2), (2,)))
