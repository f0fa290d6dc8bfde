import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "latcol",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("latcol")

LONG_TESTS = os.environ.get("LATCOL_LONG_TESTS") == "1"

requires_long = pytest.mark.skipif(
    not LONG_TESTS, reason="set LATCOL_LONG_TESTS=1 to run multi-minute stretch runs")


@pytest.fixture(scope="session")
def warm_engine():
    """Compile/load the search kernel once so timed runs measure the search."""
    from latcol.fpgroup import low_index_subgroups, make_presentation

    low_index_subgroups(make_presentation(1), 2)
    return True


@pytest.fixture(scope="session")
def catalog_d1(warm_engine):
    from latcol.catalog import RunConfig, enumerate_partitions

    return enumerate_partitions(RunConfig(1, 2))


@pytest.fixture(scope="session")
def catalog_d2(warm_engine):
    from latcol.catalog import RunConfig, enumerate_partitions

    return enumerate_partitions(RunConfig(2, 2))


@pytest.fixture(scope="session")
def catalog_d3(warm_engine):
    from latcol.catalog import RunConfig, enumerate_partitions

    return enumerate_partitions(RunConfig(3, 2))


@pytest.fixture(scope="session")
def d2_subgroups_8(warm_engine):
    """All subgroup classes of the square-lattice group up to index 8."""
    from latcol.fpgroup import low_index_subgroups, make_presentation

    return low_index_subgroups(make_presentation(2), 8)
