import pytest

from fsbasis.fock import build_cocycle
from fsbasis.lattice import build_context
from fsbasis.storage import cache


@pytest.fixture
def ctx4():
    return build_context(4)


@pytest.fixture
def ctx5():
    return build_context(5)


@pytest.fixture
def ctx6():
    return build_context(6)


@pytest.fixture
def ctx7():
    return build_context(7)


@pytest.fixture
def cocycle4(ctx4):
    return build_cocycle(ctx4)


@pytest.fixture
def cocycle5(ctx5):
    return build_cocycle(ctx5)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("FS_CACHE_DIR", str(tmp_path / "cache"))
    cache.clear()
    yield
    cache.clear()
