"""
Run configuration: command-line flags override the config file, which
overrides figure presets, which override the :class:`RunConfig` defaults.
"""
import json
import logging
import typing as t
from dataclasses import fields

from . import schemas
from .exceptions import ConfigError, SampleFileError
from .objects import RunConfig

_LOG = logging.getLogger("fracbinom.config")

# config-file and flag spellings that differ from RunConfig field names
KEY_ALIASES = {"lambda": "lam", "t-grid": "t_grid", "lambda-min": "lambda_min", "lambda-max": "lambda_max"}
COMMANDS = ("simulate", "moments", "estimate", "study", "lrd")


def normalise_keys(values: t.Dict[str, t.Any]) -> t.Dict[str, t.Any]:
    """
    Map flag-style keys (``lambda``, ``t-grid``) to :class:`RunConfig` fields.

    Raises
    ------
    :exc:`.ConfigError`
        for keys that name no field.
    """
    known = {f.name for f in fields(RunConfig)} - {"command"}
    result = {}
    for key, value in values.items():
        name = KEY_ALIASES.get(key, key)
        if name not in known:
            raise ConfigError(f"unknown config key {key!r}", key)
        result[name] = value
    return result


def load_config_file(path: str) -> t.Dict[str, t.Any]:
    """
    Read a flat JSON object of flag names to values.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise SampleFileError(f"cannot read config file: {exc.strerror}", path) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config file must hold a JSON object")
    return normalise_keys(data)


def resolve_config(command: str, flags: t.Dict[str, t.Any], config_path: t.Optional[str] = None) -> RunConfig:
    """
    Build the :class:`RunConfig` for ``command``.

    Parameters
    ---------
    command: :class:`str`
        the subcommand
    flags: :class:`dict`
        command-line values; ``None`` means the flag was not given
    config_path: :class:`str`
        optional JSON config file
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}", "command")
    given = normalise_keys({key: value for key, value in flags.items() if value is not None})
    from_file = load_config_file(config_path) if config_path else {}
    figure = given.get("figure", from_file.get("figure"))
    preset: t.Dict[str, t.Any] = {}
    if figure is not None:
        if figure not in schemas.FIGURE_PRESETS:
            raise ConfigError(f"unknown figure preset {figure!r}", "figure")
        preset = dict(schemas.FIGURE_PRESETS[figure])
    merged = {**preset, **from_file, **given}
    _LOG.debug(f"resolved {command} config from preset={bool(preset)}, file={config_path}, flags={sorted(given)}")
    return validate_config(RunConfig.from_kwargs(command=command, **merged))


def validate_config(config: RunConfig) -> RunConfig:
    """
    Reject values no command accepts before any computation starts.
    """
    positive_ints = ("paths", "J", "K", "threads")
    for name in positive_ints:
        value = getattr(config, name)
        if int(value) != value or value < 1:
            raise ConfigError(f"{name} must be a positive integer, got {value}", name)
    if config.J < 2:
        raise ConfigError(f"J must be at least 2, got {config.J}", "J")
    if config.seed < 0:
        raise ConfigError(f"seed must be non-negative, got {config.seed}", "seed")
    if config.format not in schemas.FORMATS:
        raise ConfigError(f"format must be csv or json, got {config.format!r}", "format")
    if config.events is not None and (int(config.events) != config.events or config.events < 1):
        raise ConfigError(f"events must be a positive integer, got {config.events}", "events")
    if config.tolerance is not None and not config.tolerance > 0:
        raise ConfigError(f"tolerance must be positive, got {config.tolerance}", "tolerance")
    if not 0 < config.lambda_min < config.lambda_max:
        raise ConfigError("need 0 < lambda_min < lambda_max", "lambda_min")
    return config
