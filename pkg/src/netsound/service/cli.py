"""Command-line entry point.

    netsound replay --pcap FILE [--speed X | --offline] [--wav OUT] ...
    netsound synth --scenario SPEC.json [--wav OUT] [--listen HOST:PORT] ...
    netsound live --adapter NAME ...
    netsound validate-theme FILE

Exit codes: 0 success, 2 configuration error, 3 source error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import signal
import sys
import threading
from pathlib import Path

from ..capture import CaptureError, InvalidSpec, ScenarioSpec
from ..soundscape import ThemeError, load_theme
from .config import (
    ConfigError,
    ServiceConfig,
    SourceConfig,
    load_config,
    parse_listen,
)
from .pipeline import SonificationService

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOURCE = 3


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its fields")
    sub.add_argument("--wav", help="write the rendered soundscape to this WAV file")
    sub.add_argument("--listen", help="serve the console WebSocket on HOST:PORT")
    sub.add_argument("--theme", help="builtin theme name or theme JSON path")
    sub.add_argument("--seed", type=int, help="render seed (reproducible audio)")
    sub.add_argument("--device", help="named audio output adapter")
    sub.add_argument(
        "--console-dir", help="serve this directory as the console web app"
    )
    sub.add_argument(
        "--window", type=float, help="analysis window length in seconds"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netsound", description="network traffic sonification engine"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    replay = commands.add_parser("replay", help="sonify a pcap file")
    replay.add_argument("--pcap", required=True, help="pcap file to replay")
    pace = replay.add_mutually_exclusive_group()
    pace.add_argument("--speed", type=float, help="replay speed factor (default 1)")
    pace.add_argument(
        "--offline", action="store_true", help="process as fast as possible"
    )
    _add_common(replay)

    synth = commands.add_parser("synth", help="sonify a generated scenario")
    synth.add_argument("--scenario", required=True, help="scenario spec JSON file")
    pace = synth.add_mutually_exclusive_group()
    pace.add_argument("--speed", type=float, help="playback speed factor (default 1)")
    pace.add_argument(
        "--offline", action="store_true", help="process as fast as possible"
    )
    _add_common(synth)

    live = commands.add_parser("live", help="sonify a live capture adapter")
    live.add_argument("--adapter", required=True, help="registered adapter name")
    _add_common(live)

    check = commands.add_parser("validate-theme", help="validate a theme document")
    check.add_argument("file", help="theme JSON file (or builtin name)")
    return parser


def _source_from_args(args: argparse.Namespace) -> SourceConfig | None:
    speed = math.inf if getattr(args, "offline", False) else getattr(args, "speed", None)
    if args.command == "replay":
        return SourceConfig(
            kind="pcap", pcap_path=args.pcap, speed=speed if speed else 1.0
        )
    if args.command == "synth":
        try:
            text = Path(args.scenario).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read scenario {args.scenario}: {exc}") from exc
        spec = ScenarioSpec.from_json(text)
        return SourceConfig(kind="scenario", scenario=spec, speed=speed if speed else 1.0)
    if args.command == "live":
        return SourceConfig(kind="live", adapter=args.adapter)
    return None


def build_service_config(args: argparse.Namespace) -> ServiceConfig:
    if args.config:
        config = load_config(args.config)
    else:
        source = _source_from_args(args)
        if source is None:
            raise ConfigError("no source specified")
        config = ServiceConfig(source=source)
    # flags override config-file fields
    source_override = _source_from_args(args)
    if source_override is not None:
        config.source = source_override
    if args.wav:
        config.outputs.wav = args.wav
    if args.listen:
        config.outputs.listen = parse_listen(args.listen)
    if args.device:
        config.outputs.device = args.device
    if args.console_dir:
        config.outputs.console_dir = args.console_dir
    if args.theme:
        config.theme = args.theme
    if args.seed is not None:
        config.render = dataclasses.replace(config.render, seed=args.seed)
    if args.window is not None:
        config.analysis = dataclasses.replace(config.analysis, window_len=args.window)
    config.validate()
    return config


def _validate_theme(path: str) -> int:
    try:
        theme = load_theme(path)
    except ThemeError as exc:
        print(f"invalid theme: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(
        f"theme {theme.name!r} ok: "
        + ", ".join(f"{v.id}({v.kind})" for v in theme.voices)
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate-theme":
        return _validate_theme(args.file)

    try:
        config = build_service_config(args)
        service = SonificationService(config)
    except (ConfigError, ThemeError, InvalidSpec) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    stop = threading.Event()
    for sig in (signal.SIGINT, signal.SIGTERM):
        try:
            signal.signal(sig, lambda *_: stop.set())
        except ValueError:
            pass  # not on the main thread (e.g. under a test runner)

    server = None
    if config.outputs.listen:
        from .server import ConsoleServer

        host, port = config.outputs.listen
        server = ConsoleServer(service, host, port)
        server.start()
        if not server.wait_started():
            print(f"cannot listen on {host}:{port}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"console listening on ws://{host}:{port}/ws")

    try:
        if config.source.offline:
            summary = service.run_offline()
        else:
            summary = service.run_timed(stop)
    except (CaptureError, OSError, KeyError) as exc:
        print(f"source error: {exc}", file=sys.stderr)
        if server:
            server.stop()
        return EXIT_SOURCE

    print(summary.line())
    if server is not None:
        if not stop.is_set():
            print("source exhausted; console still serving (Ctrl-C to exit)")
            while not stop.is_set():
                stop.wait(0.5)
        server.stop()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
