import pytest

from pufbind.binding import bind
from pufbind.enrollment import SamplingPlan, enroll
from pufbind.fixtures import demo_table, reference_table
from pufbind.sram_sim import new_device


@pytest.fixture(scope="session")
def noiseless_device():
    return new_device(11, cell_count=256, stable_fraction=1.0, epsilon=0.0)


@pytest.fixture(scope="session")
def small_device():
    # default noise parameters, small array so enrollment stays fast
    return new_device(7, cell_count=1024)


@pytest.fixture(scope="session")
def small_record(small_device):
    return enroll(small_device, SamplingPlan(startups_per_temperature=40), sz=64, hd=2, seed=0)


@pytest.fixture(scope="session")
def reference_bundle(small_record):
    # default keep="low": the fallback reaches rows 1..c only
    return bind(reference_table(), small_record, k=3, c=2, seed=0)


@pytest.fixture(scope="session")
def demo_bundle(small_record):
    return bind(demo_table(), small_record, k=8, c=3, seed=0)
