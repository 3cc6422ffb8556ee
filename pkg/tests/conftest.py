import pytest

from deidpipe.langpack import default_packs_dir, load_pack


@pytest.fixture(scope="session")
def en_pack():
    return load_pack(default_packs_dir() / "en")


@pytest.fixture(scope="session")
def es_pack():
    return load_pack(default_packs_dir() / "es")
