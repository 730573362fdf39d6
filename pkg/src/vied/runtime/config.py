"""Relay configuration: dataclasses mirrored one-to-one by a JSON document.

Complex impedances serialize as two-element [re, im] arrays.  Parsing is
strict: unknown keys are rejected so a typo in a settings push cannot be
silently ignored.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..protection.settings import FunctionSettings

DEFAULT_SAMPLE_RATE = 4800
DEFAULT_NOMINAL_HZ = 60.0


class ConfigError(ValueError):
    pass


@dataclass(slots=True)
class SvSubscription:
    sv_id: str = "VMU0001"
    app_id: int = 0x4000


@dataclass(slots=True)
class GoosePublication:
    go_id: str = "VIED/GO1"
    gocb_ref: str = "VIED/LLN0$GO$GO1"
    dataset_ref: str = "VIED/LLN0$Protection"
    dst_mac: str = "01:0c:cd:01:00:01"
    src_mac: str = "00:30:a7:00:00:02"
    app_id: int = 0x0001
    retransmission_ms: tuple[float, ...] = (2.0, 4.0, 8.0, 16.0)
    stable_interval_ms: float = 1000.0

    def dst_mac_bytes(self) -> bytes:
        return _mac_bytes(self.dst_mac)

    def src_mac_bytes(self) -> bytes:
        return _mac_bytes(self.src_mac)


@dataclass(slots=True)
class StationConfig:
    address: str = "127.0.0.1"
    port: int = 10102


@dataclass(slots=True)
class TransportConfig:
    mode: str = "sim"  # sim (UDP loopback) | raw (kernel packet sockets)
    # sim mode: UDP ports for the two process-bus LANs
    lan_a_port: int = 15102
    lan_b_port: int = 15103
    bind_address: str = "127.0.0.1"
    goose_host: str = "127.0.0.1"
    goose_port_a: int = 15104
    goose_port_b: int = 15105
    # raw mode: interface names
    lan_a_device: str = ""
    lan_b_device: str = ""


@dataclass(slots=True)
class RelayConfig:
    nominal_frequency_hz: float = DEFAULT_NOMINAL_HZ
    samples_per_second: int = DEFAULT_SAMPLE_RATE
    current_scale_a_per_count: float = 0.001
    voltage_scale_v_per_count: float = 0.01
    nominal_voltage_v: float = 500e3 / math.sqrt(3.0)
    nominal_current_a: float = 1000.0
    fll_gamma: float = 50.0
    phasor_process_noise_scale: float = 1e-8
    phasor_measurement_noise_scale: float = 1e-4
    # protection outputs stay disarmed for this many samples after boot
    # while the estimators acquire the signal
    boot_blanking_samples: int = 40
    settings: FunctionSettings = field(default_factory=FunctionSettings)
    sv_subscription: SvSubscription = field(default_factory=SvSubscription)
    goose_publication: GoosePublication = field(default_factory=GoosePublication)
    station: StationConfig = field(default_factory=StationConfig)
    transport: TransportConfig = field(default_factory=TransportConfig)
    event_log_path: str = ""

    def validate(self) -> None:
        spc = self.samples_per_second / self.nominal_frequency_hz
        if abs(spc - round(spc)) > 1e-9 or spc < 4:
            raise ConfigError(
                "samples_per_second must be an integer multiple of the "
                "nominal frequency"
            )
        sched = self.goose_publication.retransmission_ms
        if any(b <= a for a, b in zip(sched, sched[1:])):
            raise ConfigError("retransmission schedule must be strictly increasing")
        if self.goose_publication.stable_interval_ms <= (sched[-1] if sched else 0):
            raise ConfigError("stable interval must exceed the last burst step")
        if self.current_scale_a_per_count <= 0 or self.voltage_scale_v_per_count <= 0:
            raise ConfigError("channel scales must be positive")
        if self.transport.mode not in ("sim", "raw"):
            raise ConfigError("transport mode must be 'sim' or 'raw'")
        self.settings.validate()


def _mac_bytes(text: str) -> bytes:
    parts = text.split(":")
    if len(parts) != 6:
        raise ConfigError(f"bad MAC address {text!r}")
    try:
        return bytes(int(p, 16) for p in parts)
    except ValueError:
        raise ConfigError(f"bad MAC address {text!r}") from None


def _to_jsonable(value: Any) -> Any:
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            f.name: _to_jsonable(getattr(value, f.name))
            for f in dataclasses.fields(value)
        }
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, tuple):
        return [_to_jsonable(v) for v in value]
    return value


def _from_value(ftype: Any, value: Any, where: str) -> Any:
    if dataclasses.is_dataclass(ftype):
        if not isinstance(value, dict):
            raise ConfigError(f"{where}: expected object")
        return _from_dict(ftype, value, where)
    if ftype is complex:
        if isinstance(value, (int, float)):
            return complex(value, 0.0)
        if (
            isinstance(value, (list, tuple))
            and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)
        ):
            return complex(value[0], value[1])
        raise ConfigError(f"{where}: expected [re, im]")
    if ftype is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{where}: expected number")
        return float(value)
    if ftype is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{where}: expected integer")
        return value
    if ftype is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected boolean")
        return value
    if ftype is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected string")
        return value
    if str(ftype).startswith("tuple"):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected array")
        return tuple(value)
    raise ConfigError(f"{where}: unsupported field type {ftype}")


def _from_dict(cls: type, data: dict, where: str = "") -> Any:
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"{where or cls.__name__}: unknown field {sorted(unknown)}")
    kwargs = {}
    hints = _resolved_types(cls)
    for name, value in data.items():
        kwargs[name] = _from_value(hints[name], value, f"{where}.{name}" if where else name)
    return cls(**kwargs)


def _resolved_types(cls: type) -> dict[str, Any]:
    import typing

    return typing.get_type_hints(cls)


def update_dataclass(obj: Any, data: dict, where: str = "") -> None:
    """Strict partial update of a nested dataclass from a plain dict."""
    fields = {f.name: f for f in dataclasses.fields(obj)}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"{where or type(obj).__name__}: unknown field {sorted(unknown)}")
    hints = _resolved_types(type(obj))
    for name, value in data.items():
        current = getattr(obj, name)
        if dataclasses.is_dataclass(current) and not isinstance(current, type):
            if not isinstance(value, dict):
                raise ConfigError(f"{where}.{name}: expected object")
            update_dataclass(current, value, f"{where}.{name}" if where else name)
        else:
            setattr(
                obj,
                name,
                _from_value(hints[name], value, f"{where}.{name}" if where else name),
            )


def config_to_dict(config: RelayConfig) -> dict:
    return _to_jsonable(config)


def config_from_dict(data: dict) -> RelayConfig:
    config = _from_dict(RelayConfig, data)
    config.validate()
    return config


def load_config(path: str | Path) -> RelayConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(data)


def save_config(config: RelayConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
