"""Long-running service: pipeline orchestration, console protocol, CLI."""

from .config import ConfigError, OutputConfig, ServiceConfig, SourceConfig, load_config
from .control import ServiceState, apply_control, handle_control_text
from .pipeline import RunSummary, SonificationService, TelemetryHub
from .telemetry import (
    AlertInfo,
    TelemetryFrame,
    decode_telemetry,
    encode_telemetry,
    frame_from_aggregate,
)

__all__ = [
    "AlertInfo",
    "ConfigError",
    "OutputConfig",
    "RunSummary",
    "ServiceConfig",
    "ServiceState",
    "SonificationService",
    "SourceConfig",
    "TelemetryFrame",
    "TelemetryHub",
    "apply_control",
    "decode_telemetry",
    "encode_telemetry",
    "frame_from_aggregate",
    "handle_control_text",
    "load_config",
]
