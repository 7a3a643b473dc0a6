"""Run configuration: line-oriented ``key = value`` files plus CLI overrides.

Precedence is CLI flag > config file > built-in default. Unknown keys are
rejected by name so typos never silently fall back to a default.
"""

from dataclasses import dataclass, fields


class ConfigError(ValueError):
    """Bad config key or value."""


DR_METHODS = ("tsne", "mds")
CLASSIFIERS = ("knn", "enn", "svm")
FORMATS = ("csv", "markdown", "all")


@dataclass
class RunConfig:
    manifest: str = "manifest.ini"
    datasets: tuple = ()  # empty = all datasets in the manifest
    dr: tuple = DR_METHODS
    classifiers: tuple = CLASSIFIERS
    k: int = 5
    svm_c: float = 1.0
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    test_fraction: float = 0.1
    repeats: int = 10
    seed: int = 0
    out: str = "out"
    format: str = "all"

    def validate(self):
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("test_fraction must be in (0, 1)")
        if not self.dr or not self.classifiers:
            raise ConfigError("dr and classifiers selections must be non-empty")
        for m in self.dr:
            if m not in DR_METHODS:
                raise ConfigError(f"unknown dr method {m!r}")
        for c in self.classifiers:
            if c not in CLASSIFIERS:
                raise ConfigError(f"unknown classifier {c!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.svm_c <= 0:
            raise ConfigError("svm_c must be positive")
        return self


_LIST_KEYS = {"datasets", "dr", "classifiers"}


def _convert(key, value, target_type):
    try:
        if key in _LIST_KEYS:
            return tuple(t for t in value.replace(",", " ").split() if t)
        if target_type is int:
            return int(value)
        if target_type is float:
            return float(value)
        return value
    except ValueError:
        raise ConfigError(f"malformed value for key {key!r}: {value!r}") from None


def parse_config(text="", overrides=None):
    """Build a RunConfig from config-file text and a CLI override dict."""
    known = {f.name: f.type for f in fields(RunConfig)}
    types = {f.name: type(getattr(RunConfig(), f.name)) for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _convert(key, value, types[key])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, str):
            value = _convert(key, value, types[key])
        values[key] = value
    return RunConfig(**values).validate()
