"""The shipped fixture files must be exactly what the generator produces;
nothing in them is hand-entered."""

import pytest

from clusterscatter.fixtures import FILES, fixture_text, load_fixture
from clusterscatter.fixtures.generate import generate


def test_regeneration_reproduces_shipped_bytes(tmp_path):
    paths = {p.name: p for p in generate(tmp_path)}
    assert set(paths) == set(FILES)
    for name in FILES:
        assert paths[name].read_text() == fixture_text(name), name


def test_unknown_fixture_name():
    with pytest.raises(KeyError):
        fixture_text("no_such.json")


def test_loaded_fixtures_parse():
    for name in FILES:
        assert isinstance(load_fixture(name), dict)
