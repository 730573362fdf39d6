"""Relay daemon: pipeline, station server, transports, configuration."""

from .config import (
    ConfigError,
    GoosePublication,
    RelayConfig,
    StationConfig,
    SvSubscription,
    TransportConfig,
    config_from_dict,
    config_to_dict,
    load_config,
    save_config,
)
from .events import EventLog, ProtectionEvent
from .goose_pub import GoosePublisher
from .relay import Relay
from .station import StationClient, StationServer

__all__ = [
    "ConfigError",
    "EventLog",
    "GoosePublication",
    "GoosePublisher",
    "ProtectionEvent",
    "Relay",
    "RelayConfig",
    "StationClient",
    "StationConfig",
    "StationServer",
    "SvSubscription",
    "TransportConfig",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "save_config",
]
