"""Relay daemon entry point.

    vied --config relay.json [--transport sim|raw] [--station-port N]
         [--log events.jsonl]
    vied --dump-default-config > relay.json
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
import threading

from .config import RelayConfig, config_to_dict, load_config
from .relay import Relay
from .station import StationServer
from .transport import make_transport


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vied", description="software protection relay daemon"
    )
    p.add_argument("--config", help="relay configuration file (JSON)")
    p.add_argument(
        "--transport", choices=("sim", "raw"), help="override configured transport"
    )
    p.add_argument("--station-port", type=int, help="override station TCP port")
    p.add_argument("--log", help="append protection events to this file")
    p.add_argument(
        "--dump-default-config",
        action="store_true",
        help="print the default configuration as JSON and exit",
    )
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.dump_default_config:
        json.dump(config_to_dict(RelayConfig()), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return 0
    config = load_config(args.config) if args.config else RelayConfig()
    if args.transport:
        config.transport.mode = args.transport
    if args.station_port is not None:
        config.station.port = args.station_port
    config.validate()

    clock = "wall" if config.transport.mode == "raw" else "virtual"
    relay = Relay(config, clock=clock, event_log_path=args.log)
    station = StationServer(
        relay, config.station.address, config.station.port
    ).start()
    transport = make_transport(config.transport)
    transport.start(relay)
    print(
        f"vied: transport={config.transport.mode} "
        f"station={station.address}:{station.port}",
        flush=True,
    )

    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    signal.signal(signal.SIGTERM, lambda *_: stop.set())
    try:
        while not stop.wait(0.5):
            pass
    finally:
        transport.stop()
        station.stop()
        relay.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
