"""Configuration for the service and the curator CLI.

A TOML file supplies the settings; ``ALP_*`` environment variables
override individual keys. The documented keys:

    [store]
    root = "store"                # store directory

    [oai]
    repository_id = "alp"         # namespace part of oai:<id>:<record_id>
    repository_name = "Artist Libraries Catalog"
    base_url = "http://127.0.0.1:8000/oai"
    admin_email = "curator@example.org"

    [server]
    host = "127.0.0.1"
    port = 8000
    static_dir = "frontend/dist"  # optional; served at / when present

    [providers.gallica_like]      # one table per provider
    endpoint = "https://gallica.example.org/SRU"
    mode = "replay"               # live | replay
    rate_limit_per_s = 2.0        # live mode politeness
    fixtures_dir = "fixtures/providers/gallica_like"   # replay mode

Environment overrides name the same keys with ``__`` between path
segments, uppercased: ``ALP_STORE__ROOT``, ``ALP_OAI__REPOSITORY_ID``,
``ALP_SERVER__PORT``, ``ALP_PROVIDERS__GALLICA_LIKE__MODE``. Relative
paths in the file resolve against the file's directory; relative paths
from the environment or from defaults resolve against the working
directory. ``ALP_CONFIG`` names the file itself.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):  # pragma: no cover
    import tomllib
else:
    import tomli as tomllib

DEFAULT_CONFIG_FILENAME = "alp.toml"
PROVIDER_MODES = ("live", "replay")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    mode: str = "replay"
    rate_limit_per_s: float = 2.0
    fixtures_dir: Path = Path("fixtures/providers")

    def check(self, name: str) -> None:
        if self.mode not in PROVIDER_MODES:
            raise ConfigError(
                f"providers.{name}.mode must be one of {PROVIDER_MODES}, got {self.mode!r}"
            )
        if not self.endpoint:
            raise ConfigError(f"providers.{name}.endpoint must be non-empty")
        if self.rate_limit_per_s <= 0:
            raise ConfigError(f"providers.{name}.rate_limit_per_s must be positive")


# deterministic placeholder endpoints: replay mode never contacts them, but
# request hashes (and so fixture file names) derive from them
DEFAULT_PROVIDERS: dict[str, ProviderConfig] = {
    "gallica_like": ProviderConfig(
        endpoint="https://gallica.example.org/SRU",
        fixtures_dir=Path("fixtures/providers/gallica_like"),
    ),
    "open_library_like": ProviderConfig(
        endpoint="https://openlibrary.example.org/search.json",
        fixtures_dir=Path("fixtures/providers/open_library_like"),
    ),
}


@dataclass(frozen=True)
class Config:
    store_root: Path = Path("store")
    repository_id: str = "alp"
    repository_name: str = "Artist Libraries Catalog"
    oai_base_url: str = "http://127.0.0.1:8000/oai"
    admin_email: str = "curator@example.org"
    host: str = "127.0.0.1"
    port: int = 8000
    static_dir: Path | None = None
    providers: Mapping[str, ProviderConfig] = field(
        default_factory=lambda: dict(DEFAULT_PROVIDERS)
    )

    def check(self) -> None:
        if not (1 <= self.port <= 65535):
            raise ConfigError(f"server.port must be in 1..65535, got {self.port}")
        if not self.repository_id:
            raise ConfigError("oai.repository_id must be non-empty")
        for name, provider in self.providers.items():
            provider.check(name)


# (section, key) -> (Config attribute, coercion)
_SCALAR_KEYS: dict[tuple[str, str], tuple[str, type]] = {
    ("store", "root"): ("store_root", Path),
    ("oai", "repository_id"): ("repository_id", str),
    ("oai", "repository_name"): ("repository_name", str),
    ("oai", "base_url"): ("oai_base_url", str),
    ("oai", "admin_email"): ("admin_email", str),
    ("server", "host"): ("host", str),
    ("server", "port"): ("port", int),
    ("server", "static_dir"): ("static_dir", Path),
}

_PROVIDER_KEYS: dict[str, type] = {
    "endpoint": str,
    "mode": str,
    "rate_limit_per_s": float,
    "fixtures_dir": Path,
}


def _coerce(value: Any, kind: type, where: str) -> Any:
    try:
        if kind is Path:
            return Path(value) if isinstance(value, (str, Path)) else _fail(value)
        if kind is int:
            return int(value) if not isinstance(value, bool) else _fail(value)
        if kind is float:
            return float(value) if not isinstance(value, bool) else _fail(value)
        if kind is str:
            return value if isinstance(value, str) else _fail(value)
    except (TypeError, ValueError):
        pass
    raise ConfigError(f"{where}: cannot interpret {value!r} as {kind.__name__}")


def _fail(value: Any):
    raise ValueError(value)


def _absolutize(path: Path, base: Path) -> Path:
    return path if path.is_absolute() else base / path


def _apply_tree(config: Config, tree: Mapping[str, Any], base: Path, origin: str) -> Config:
    """Fold one settings tree (file or env) into the config."""
    updates: dict[str, Any] = {}
    providers: dict[str, ProviderConfig] = dict(config.providers)
    for section, body in tree.items():
        if not isinstance(body, Mapping):
            raise ConfigError(f"{origin}: top-level key {section!r} is not a table")
        if section == "providers":
            if origin != "environment":
                # a providers table in the file states the complete set
                providers = {}
            for name, settings in body.items():
                if not isinstance(settings, Mapping):
                    raise ConfigError(f"{origin}: providers.{name} is not a table")
                current = providers.get(name, DEFAULT_PROVIDERS.get(name))
                values: dict[str, Any] = {}
                for key, raw in settings.items():
                    if key not in _PROVIDER_KEYS:
                        raise ConfigError(f"{origin}: unknown key providers.{name}.{key}")
                    value = _coerce(raw, _PROVIDER_KEYS[key], f"providers.{name}.{key}")
                    if key == "fixtures_dir":
                        value = _absolutize(value, base)
                    values[key] = value
                if current is None and "endpoint" not in values:
                    raise ConfigError(f"{origin}: providers.{name} needs an endpoint")
                provider = replace(current, **values) if current else ProviderConfig(**values)
                providers[name] = provider
            continue
        for key, raw in body.items():
            try:
                attr, kind = _SCALAR_KEYS[(section, key)]
            except KeyError:
                raise ConfigError(f"{origin}: unknown key {section}.{key}") from None
            value = _coerce(raw, kind, f"{section}.{key}")
            if kind is Path:
                value = _absolutize(value, base)
            updates[attr] = value
    return replace(config, **updates, providers=providers)


def _env_tree(env: Mapping[str, str]) -> dict[str, Any]:
    """ALP_SECTION__KEY[__KEY] variables as a nested settings tree."""
    tree: dict[str, Any] = {}
    for name in sorted(env):
        if not name.startswith("ALP_") or name == "ALP_CONFIG":
            continue
        parts = [p.lower() for p in name[len("ALP_"):].split("__")]
        if len(parts) == 2:
            section, key = parts
            tree.setdefault(section, {})[key] = env[name]
        elif len(parts) == 3 and parts[0] == "providers":
            _, provider, key = parts
            tree.setdefault("providers", {}).setdefault(provider, {})[key] = env[name]
        else:
            raise ConfigError(f"unrecognized environment override {name}")
    return tree


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    cwd: str | Path | None = None,
) -> Config:
    """Defaults, then the TOML file (if any), then ALP_* overrides."""
    import os

    env = dict(os.environ if env is None else env)
    cwd = Path(cwd) if cwd is not None else Path.cwd()
    if path is None:
        path = env.get("ALP_CONFIG")
    if path is None and (cwd / DEFAULT_CONFIG_FILENAME).exists():
        path = cwd / DEFAULT_CONFIG_FILENAME

    config = Config(store_root=cwd / "store")
    if path is not None:
        path = _absolutize(Path(path), cwd)
        try:
            with open(path, "rb") as fh:
                tree = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config file {path.name}: {exc}") from exc
        config = _apply_tree(config, tree, path.parent, path.name)

    env_settings = _env_tree(env)
    if env_settings:
        config = _apply_tree(config, env_settings, cwd, "environment")
    config = replace(
        config,
        store_root=_absolutize(config.store_root, cwd),
        static_dir=_absolutize(config.static_dir, cwd) if config.static_dir else None,
        providers={
            name: replace(p, fixtures_dir=_absolutize(p.fixtures_dir, cwd))
            for name, p in config.providers.items()
        },
    )
    config.check()
    return config
