import pytest

from config.settings import CATALOGUE_LEVELS
from src.eigenforms import load_eigenform

# 统计类测试都走 eta 后端，点计数只在后端一致性测试里跑
XMAX = 100000


@pytest.fixture(scope="session")
def form11():
    return load_eigenform("11", XMAX, backend="eta", crosscheck_limit=500)


@pytest.fixture(scope="session")
def form14():
    return load_eigenform("14", XMAX, backend="eta", crosscheck_limit=500)


@pytest.fixture(scope="session")
def form36():
    return load_eigenform("36", XMAX, backend="eta", crosscheck_limit=500)


@pytest.fixture(scope="session")
def catalogue_forms():
    return {key: load_eigenform(key, XMAX, backend="eta", crosscheck_limit=500) for key in CATALOGUE_LEVELS}
