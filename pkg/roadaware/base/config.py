# -*- coding: utf-8 -*-

from os import path

from decouple import Config
from decouple import Csv
from decouple import RepositoryIni
from decouple import UndefinedValueError
from django.conf import settings

from .exceptions import ConfigurationError


def load_config_file(config_path):
    """Returns a decouple config reading the [settings] section of an INI
    file. Environment variables still take precedence over the file.
    """

    if not path.isfile(config_path):
        raise ConfigurationError("Config file not found: %s" % config_path)
    try:
        return Config(RepositoryIni(config_path))
    except Exception as error:
        raise ConfigurationError("Unreadable config file %s: %s"
                                 % (config_path, error))


def get_setting(name, cast=None, overrides=None):
    """Returns a setting, optionally overridden by a config file.

    `overrides` is a decouple config returned by `load_config_file`.
    """

    try:
        default = getattr(settings, name)
    except AttributeError:
        raise ConfigurationError("Unknown setting: %s" % name)

    if overrides is None:
        return cast(default) if cast else default

    try:
        if cast is None:
            return overrides(name, default=default)
        return overrides(name, default=default, cast=cast)
    except (ValueError, UndefinedValueError) as error:
        raise ConfigurationError("Invalid value for %s: %s" % (name, error))


def as_float_list(value):
    """Casts a comma separated string (or a list) to a list of floats."""

    if isinstance(value, (list, tuple)):
        return [float(item) for item in value]
    return Csv(cast=float)(value)


def as_str_list(value):
    """Casts a comma separated string (or a list) to a list of strings."""

    if isinstance(value, (list, tuple)):
        return [str(item) for item in value]
    return Csv()(value)


def as_penalty(value):
    """Casts a penalty setting: "auto" or a nonnegative number."""

    if value is None or str(value).strip().lower() == "auto":
        return None
    penalty = float(value)
    if penalty < 0:
        raise ValueError("penalty must be nonnegative")
    return penalty
