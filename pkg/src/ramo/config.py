"""Service configuration: file sections, RAMO_* environment variables, and
explicit overrides, with precedence overrides > env > file > defaults.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from .errors import RamoError


class ConfigError(RamoError):
    pass


@dataclass
class ServiceConfig:
    listen_address: str = "127.0.0.1:8080"
    catalog_path: str = "fixtures/mini_catalog.csv"
    # "field=Header Name" pairs overriding the default CSV headers,
    # e.g. "rating=Rating,url=URL,description=Description"
    catalog_headers: str | None = None
    index_path: str | None = None
    embedder_kind: str = "deterministic"  # deterministic | remote
    embed_endpoint: str = "https://api.openai.com/v1/embeddings"
    embed_model: str = "text-embedding-ada-002"
    embed_dim: int = 256
    generator_kind: str = "scripted"  # scripted | remote
    gen_endpoint: str = "https://api.openai.com/v1/chat/completions"
    gen_model: str = "gpt-3.5-turbo"
    gen_temperature: float = 0.0
    top_k: int = 8
    token_budget: int = 4096
    prompt_order: str = "template_first"
    template_dir: str | None = None
    template_id: str = "default"
    history_turns: int = 0
    cors_allowed_origins: list[str] = field(default_factory=list)
    session_ttl_s: float = 3600.0

    def validate(self) -> "ServiceConfig":
        if self.token_budget < 1024:
            raise ConfigError("token_budget must be >= 1024")
        if self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.embedder_kind not in ("deterministic", "remote"):
            raise ConfigError(f"unknown embedder kind {self.embedder_kind!r}")
        if self.generator_kind not in ("scripted", "remote"):
            raise ConfigError(f"unknown generator kind {self.generator_kind!r}")
        if self.prompt_order not in ("template_first", "question_first"):
            raise ConfigError(f"unknown prompt_order {self.prompt_order!r}")
        if self.history_turns < 0:
            raise ConfigError("history_turns must be >= 0")
        self.header_map()  # validates the pair syntax early
        return self

    def header_map(self) -> dict[str, str] | None:
        """catalog_headers parsed into a load_catalog header map."""
        if not self.catalog_headers:
            return None
        mapping: dict[str, str] = {}
        for pair in self.catalog_headers.split(","):
            field_name, sep, header = pair.partition("=")
            if not sep or not field_name.strip() or not header.strip():
                raise ConfigError(f"catalog_headers expects field=Name pairs, got {pair!r}")
            mapping[field_name.strip()] = header.strip()
        return mapping


# Config file layout: [section] key = value, one (section, key) per field.
_FILE_LAYOUT: dict[str, tuple[str, str]] = {
    "listen_address": ("service", "listen_address"),
    "catalog_path": ("service", "catalog_path"),
    "catalog_headers": ("service", "catalog_headers"),
    "index_path": ("service", "index_path"),
    "cors_allowed_origins": ("service", "cors_allowed_origins"),
    "session_ttl_s": ("service", "session_ttl_s"),
    "embedder_kind": ("embedding", "kind"),
    "embed_endpoint": ("embedding", "endpoint"),
    "embed_model": ("embedding", "model"),
    "embed_dim": ("embedding", "dim"),
    "generator_kind": ("generation", "kind"),
    "gen_endpoint": ("generation", "endpoint"),
    "gen_model": ("generation", "model"),
    "gen_temperature": ("generation", "temperature"),
    "top_k": ("pipeline", "top_k"),
    "token_budget": ("pipeline", "token_budget"),
    "prompt_order": ("pipeline", "prompt_order"),
    "template_dir": ("pipeline", "template_dir"),
    "template_id": ("pipeline", "template_id"),
    "history_turns": ("pipeline", "history_turns"),
}

ENV_PREFIX = "RAMO_"


def _coerce(name: str, raw: str) -> Any:
    kind = ServiceConfig.__dataclass_fields__[name].type
    raw = raw.strip()
    try:
        if name == "cors_allowed_origins":
            return [o.strip() for o in raw.split(",") if o.strip()]
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> ServiceConfig:
    """Assemble the effective configuration.

    `overrides` (typically CLI flags) beat environment variables, which
    beat the config file; unset layers fall through to defaults.
    """
    values: dict[str, Any] = {}

    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(str(path), encoding="utf-8")
        if not read:
            raise ConfigError(f"config file not found: {path}")
        for name, (section, key) in _FILE_LAYOUT.items():
            if parser.has_option(section, key):
                values[name] = _coerce(name, parser.get(section, key))

    env = os.environ if env is None else env
    for field_info in fields(ServiceConfig):
        env_key = ENV_PREFIX + field_info.name.upper()
        if env_key in env:
            values[field_info.name] = _coerce(field_info.name, env[env_key])

    if overrides:
        for name, value in overrides.items():
            if value is None:
                continue
            if name not in ServiceConfig.__dataclass_fields__:
                raise ConfigError(f"unknown config field {name!r}")
            values[name] = value

    return ServiceConfig(**values).validate()


def split_listen_address(address: str) -> tuple[str, int]:
    host, sep, port = address.rpartition(":")
    if not sep:
        raise ConfigError(f"listen_address must be host:port, got {address!r}")
    try:
        return host, int(port)
    except ValueError:
        raise ConfigError(f"bad port in listen_address: {address!r}") from None
