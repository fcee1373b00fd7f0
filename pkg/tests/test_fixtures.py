"""Golden-file check: the shipped fixtures are exactly what the generator script writes."""

import importlib.util
import pathlib

from crmw import battery

SCRIPT = pathlib.Path(__file__).resolve().parent.parent / "scripts" / "make_fixtures.py"


def test_shipped_fixtures_match_generator(tmp_path):
    loader_spec = importlib.util.spec_from_file_location("make_fixtures", SCRIPT)
    mod = importlib.util.module_from_spec(loader_spec)
    loader_spec.loader.exec_module(mod)
    names = mod.main(tmp_path)
    assert names == battery.shipped_fixture_names()
    for name in names:
        assert (tmp_path / f"{name}.json").read_bytes() == battery.shipped_fixture_path(name).read_bytes(), name


def test_every_fixture_decodes():
    fx = battery.load_shipped_fixtures()
    assert set(fx) >= {f for names in battery.CRITERION_FIXTURES.values() for f in names}
