import pytest

import helpers


@pytest.fixture
def ex5():
    return helpers.example5()


@pytest.fixture
def h18():
    return helpers.house18()


@pytest.fixture
def ex2():
    return helpers.example2_tally()
