import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisenspec.config import Config, ConfigError, parse_config_text


def test_parse_basic():
    raw = parse_config_text("# comment\nexperiment = eigen\n\ngrid.mu_max = 60  # trailing\n")
    assert raw == {"experiment": "eigen", "grid.mu_max": "60"}


@pytest.mark.parametrize("text", ["novalue\n", " = 3\n", "a = 1\na = 2\n"])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_typed_access_records_defaults():
    cfg = Config({"a": "2", "b": "0.5", "c": "yes", "d": "1, 2 3"})
    assert cfg.int("a") == 2 and cfg.float("b") == 0.5 and cfg.bool("c") is True
    assert cfg.floats("d") == [1.0, 2.0, 3.0]
    assert cfg.float("missing", 7.0) == 7.0
    assert cfg.used["missing"] == 7.0
    assert cfg.unknown_keys() == []
    with pytest.raises(ConfigError):
        Config({"a": "x"}).int("a")


keys = st.from_regex(r"[a-z][a-z_]{0,8}(\.[a-z_]{1,8})?", fullmatch=True)
values = st.from_regex(r"[A-Za-z0-9_.+\- ]{0,12}[A-Za-z0-9_.+\-]", fullmatch=True)


@given(st.dictionaries(keys, values, max_size=8))
def test_roundtrip(d):
    text = "".join(f"{k} = {v}\n" for k, v in d.items())
    assert parse_config_text(text) == {k: v.strip() for k, v in d.items()}
