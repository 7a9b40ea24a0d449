"""Settings loading: defaults, TOML file, environment overrides, validation."""

from pathlib import Path

import pytest

from alp.config import Config, ConfigError, ProviderConfig, load_config


def write_toml(tmp_path, text, name="alp.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_without_file(tmp_path):
    config = load_config(env={}, cwd=tmp_path)
    assert config.store_root == tmp_path / "store"
    assert config.port == 8000
    assert config.host == "127.0.0.1"
    assert config.repository_id == "alp"
    assert config.static_dir is None
    assert set(config.providers) == {"gallica_like", "open_library_like"}
    gallica = config.providers["gallica_like"]
    assert gallica.mode == "replay"
    assert gallica.fixtures_dir == tmp_path / "fixtures/providers/gallica_like"


def test_file_named_by_argument(tmp_path):
    path = write_toml(tmp_path, '[server]\nport = 9001\n', name="custom.toml")
    config = load_config(path, env={}, cwd=tmp_path)
    assert config.port == 9001


def test_default_filename_picked_up_from_cwd(tmp_path):
    write_toml(tmp_path, '[oai]\nrepository_id = "poc"\n')
    config = load_config(env={}, cwd=tmp_path)
    assert config.repository_id == "poc"


def test_alp_config_env_names_the_file(tmp_path):
    path = write_toml(tmp_path, '[server]\nhost = "0.0.0.0"\n', name="elsewhere.toml")
    config = load_config(env={"ALP_CONFIG": str(path)}, cwd=tmp_path)
    assert config.host == "0.0.0.0"


def test_missing_explicit_file_is_an_error(tmp_path):
    with pytest.raises(ConfigError, match="config file not found"):
        load_config(tmp_path / "nope.toml", env={}, cwd=tmp_path)


def test_malformed_toml_is_a_config_error(tmp_path):
    path = write_toml(tmp_path, "[broken\n")
    with pytest.raises(ConfigError, match="alp.toml"):
        load_config(path, env={}, cwd=tmp_path)


def test_env_overrides_file(tmp_path):
    path = write_toml(tmp_path, "[server]\nport = 9001\n")
    config = load_config(path, env={"ALP_SERVER__PORT": "9002"}, cwd=tmp_path)
    assert config.port == 9002


def test_relative_paths_resolve_against_file_directory(tmp_path):
    nested = tmp_path / "conf"
    nested.mkdir()
    path = write_toml(nested, '[store]\nroot = "data"\n[server]\nstatic_dir = "site"\n')
    config = load_config(path, env={}, cwd=tmp_path)
    assert config.store_root == nested / "data"
    assert config.static_dir == nested / "site"


def test_relative_paths_from_env_resolve_against_cwd(tmp_path):
    nested = tmp_path / "conf"
    nested.mkdir()
    path = write_toml(nested, '[store]\nroot = "data"\n')
    config = load_config(path, env={"ALP_STORE__ROOT": "envdata"}, cwd=tmp_path)
    assert config.store_root == tmp_path / "envdata"


def test_absolute_paths_kept_verbatim(tmp_path):
    target = tmp_path / "abs-store"
    path = write_toml(tmp_path, f'[store]\nroot = "{target}"\n')
    config = load_config(path, env={}, cwd=tmp_path / "elsewhere")
    assert config.store_root == target


def test_provider_table_in_file_states_the_complete_set(tmp_path):
    path = write_toml(
        tmp_path,
        '[providers.local_sru]\nendpoint = "https://sru.example.net"\nmode = "live"\n',
    )
    config = load_config(path, env={}, cwd=tmp_path)
    assert set(config.providers) == {"local_sru"}
    assert config.providers["local_sru"].mode == "live"
    assert config.providers["local_sru"].rate_limit_per_s == 2.0


def test_known_provider_partial_override_merges_defaults(tmp_path):
    path = write_toml(tmp_path, '[providers.gallica_like]\nmode = "live"\n')
    config = load_config(path, env={}, cwd=tmp_path)
    assert set(config.providers) == {"gallica_like"}
    gallica = config.providers["gallica_like"]
    assert gallica.mode == "live"
    assert gallica.endpoint == "https://gallica.example.org/SRU"


def test_new_provider_requires_endpoint(tmp_path):
    path = write_toml(tmp_path, '[providers.mystery]\nmode = "replay"\n')
    with pytest.raises(ConfigError, match="providers.mystery needs an endpoint"):
        load_config(path, env={}, cwd=tmp_path)


def test_env_provider_override_merges_per_provider(tmp_path):
    config = load_config(
        env={"ALP_PROVIDERS__GALLICA_LIKE__MODE": "live"}, cwd=tmp_path
    )
    # env tweaks one provider; the other default survives
    assert set(config.providers) == {"gallica_like", "open_library_like"}
    assert config.providers["gallica_like"].mode == "live"
    assert config.providers["open_library_like"].mode == "replay"


def test_env_provider_fixtures_dir(tmp_path):
    config = load_config(
        env={"ALP_PROVIDERS__GALLICA_LIKE__FIXTURES_DIR": "captures"}, cwd=tmp_path
    )
    assert config.providers["gallica_like"].fixtures_dir == tmp_path / "captures"


@pytest.mark.parametrize(
    "toml_text, message",
    [
        ('[server]\nspeed = 3\n', "unknown key server.speed"),
        ('[tuning]\nlevel = 1\n', "unknown key tuning.level"),
        ('[providers.gallica_like]\nretries = 2\n', "unknown key providers.gallica_like.retries"),
    ],
)
def test_unknown_keys_rejected(tmp_path, toml_text, message):
    path = write_toml(tmp_path, toml_text)
    with pytest.raises(ConfigError, match=message):
        load_config(path, env={}, cwd=tmp_path)


def test_top_level_scalar_rejected(tmp_path):
    path = write_toml(tmp_path, 'port = 8000\n')
    with pytest.raises(ConfigError, match="not a table"):
        load_config(path, env={}, cwd=tmp_path)


def test_unrecognized_env_override_rejected(tmp_path):
    with pytest.raises(ConfigError, match="ALP_PORT"):
        load_config(env={"ALP_PORT": "1"}, cwd=tmp_path)


def test_bool_rejected_for_int_and_float(tmp_path):
    path = write_toml(tmp_path, "[server]\nport = true\n")
    with pytest.raises(ConfigError, match="server.port"):
        load_config(path, env={}, cwd=tmp_path)
    path = write_toml(tmp_path, "[providers.gallica_like]\nrate_limit_per_s = true\n")
    with pytest.raises(ConfigError, match="rate_limit_per_s"):
        load_config(path, env={}, cwd=tmp_path)


def test_non_numeric_env_port_rejected(tmp_path):
    with pytest.raises(ConfigError, match="server.port"):
        load_config(env={"ALP_SERVER__PORT": "soon"}, cwd=tmp_path)


@pytest.mark.parametrize("port", [0, 65536, -1])
def test_port_range_checked(tmp_path, port):
    path = write_toml(tmp_path, f"[server]\nport = {port}\n")
    with pytest.raises(ConfigError, match="server.port must be in 1..65535"):
        load_config(path, env={}, cwd=tmp_path)


def test_provider_mode_enum_checked(tmp_path):
    path = write_toml(
        tmp_path,
        '[providers.gallica_like]\nmode = "record"\n',
    )
    with pytest.raises(ConfigError, match="providers.gallica_like.mode"):
        load_config(path, env={}, cwd=tmp_path)


def test_rate_limit_must_be_positive(tmp_path):
    path = write_toml(tmp_path, "[providers.gallica_like]\nrate_limit_per_s = 0.0\n")
    with pytest.raises(ConfigError, match="rate_limit_per_s must be positive"):
        load_config(path, env={}, cwd=tmp_path)


def test_empty_repository_id_rejected(tmp_path):
    with pytest.raises(ConfigError, match="repository_id must be non-empty"):
        load_config(env={"ALP_OAI__REPOSITORY_ID": ""}, cwd=tmp_path)


def test_config_objects_are_frozen(tmp_path):
    config = load_config(env={}, cwd=tmp_path)
    with pytest.raises(AttributeError):
        config.port = 1
    with pytest.raises(AttributeError):
        config.providers["gallica_like"].mode = "live"


def test_provider_config_check_direct():
    ProviderConfig(endpoint="https://x.example").check("x")
    with pytest.raises(ConfigError):
        ProviderConfig(endpoint="").check("x")


def test_static_dir_env_override(tmp_path):
    config = load_config(env={"ALP_SERVER__STATIC_DIR": "dist"}, cwd=tmp_path)
    assert config.static_dir == tmp_path / "dist"


def test_defaults_snapshot_matches_dataclass():
    config = Config()
    assert config.repository_name == "Artist Libraries Catalog"
    assert config.oai_base_url == "http://127.0.0.1:8000/oai"
    assert config.admin_email == "curator@example.org"
    assert isinstance(config.store_root, Path)
