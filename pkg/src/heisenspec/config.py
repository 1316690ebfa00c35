"""Flat ``key = value`` configuration files.

Blank lines and lines starting with ``#`` are ignored.  Keys may carry a
dotted section prefix (``grid.r_max = 8``); values stay strings until a
caller asks for a type.
"""

from __future__ import annotations

__all__ = ["ConfigError", "parse_config", "parse_config_text", "Config"]


class ConfigError(ValueError):
    pass


def parse_config_text(text):
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def parse_config(path):
    with open(path) as fh:
        return parse_config_text(fh.read())


class Config:
    """Typed access to a parsed config with defaults; records what was used."""

    def __init__(self, raw):
        self.raw = dict(raw)
        self.used = {}

    def _get(self, key, default, cast):
        if key in self.raw:
            try:
                value = cast(self.raw[key])
            except ValueError as exc:
                raise ConfigError(f"invalid value for {key}: {self.raw[key]!r}") from exc
        else:
            value = default
        self.used[key] = value
        return value

    def str(self, key, default=None):
        return self._get(key, default, str)

    def int(self, key, default=None):
        return self._get(key, default, int)

    def float(self, key, default=None):
        return self._get(key, default, float)

    def bool(self, key, default=False):
        def cast(v):
            low = v.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(v)

        return self._get(key, default, cast)

    def floats(self, key, default=None):
        def cast(v):
            return [float(item) for item in v.replace(",", " ").split()]

        return self._get(key, default, cast)

    def unknown_keys(self):
        return sorted(set(self.raw) - set(self.used))
