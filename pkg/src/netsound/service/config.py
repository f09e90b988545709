"""Service configuration: one JSON file, CLI flags override fields."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..analysis import AnalysisConfig
from ..audio import RenderConfig
from ..capture import ScenarioSpec

DEFAULT_HOME_NETWORKS = ["10.0.0.0/8", "172.16.0.0/12", "192.168.0.0/16"]
DEFAULT_HISTORY_LEN = 600


class ConfigError(ValueError):
    """Configuration missing, contradictory, or malformed (exit code 2)."""


@dataclass
class SourceConfig:
    kind: str  # "pcap" | "scenario" | "live"
    pcap_path: str | None = None
    speed: float = 1.0  # math.inf in offline mode
    scenario: ScenarioSpec | None = None
    adapter: str | None = None

    @property
    def offline(self) -> bool:
        return math.isinf(self.speed)


@dataclass
class OutputConfig:
    wav: str | None = None
    device: str | None = None
    listen: tuple[str, int] | None = None
    console_dir: str | None = None

    def any_output(self) -> bool:
        return bool(self.wav or self.device or self.listen)


@dataclass
class ServiceConfig:
    source: SourceConfig
    home_networks: list[str] = field(default_factory=lambda: list(DEFAULT_HOME_NETWORKS))
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    theme: str = "abstract"
    render: RenderConfig = field(default_factory=RenderConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    history_len: int = DEFAULT_HISTORY_LEN

    def validate(self) -> None:
        if self.source.kind not in ("pcap", "scenario", "live"):
            raise ConfigError(f"unknown source kind {self.source.kind!r}")
        if self.source.kind == "pcap" and not self.source.pcap_path:
            raise ConfigError("pcap source needs a file path")
        if self.source.kind == "scenario" and self.source.scenario is None:
            raise ConfigError("scenario source needs a scenario spec")
        if self.source.kind == "live" and not self.source.adapter:
            raise ConfigError("live source needs an adapter name")
        if not (self.source.speed > 0):
            raise ConfigError("speed must be positive")
        if not self.outputs.any_output():
            raise ConfigError("configure at least one output (wav, device, or listen)")
        if self.history_len <= 0:
            raise ConfigError("history_len must be positive")


def parse_listen(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise ConfigError(f"listen address must be HOST:PORT, got {text!r}")
    try:
        return host, int(port)
    except ValueError as exc:
        raise ConfigError(f"bad listen port in {text!r}") from exc


def _source_from_dict(doc: dict) -> SourceConfig:
    keys = {k for k in ("pcap", "scenario", "live") if k in doc}
    if len(keys) != 1:
        raise ConfigError(
            f"source must name exactly one of pcap/scenario/live, got {sorted(keys) or 'none'}"
        )
    speed = doc.get("speed", 1.0)
    if speed in ("inf", "offline"):
        speed = math.inf
    speed = float(speed)
    if "pcap" in keys:
        return SourceConfig(kind="pcap", pcap_path=str(doc["pcap"]), speed=speed)
    if "scenario" in keys:
        spec_doc = doc["scenario"]
        if isinstance(spec_doc, str):
            spec = ScenarioSpec.from_json(Path(spec_doc).read_text())
        else:
            spec = ScenarioSpec.from_dict(spec_doc)
        return SourceConfig(kind="scenario", scenario=spec, speed=speed)
    return SourceConfig(kind="live", adapter=str(doc["live"]), speed=speed)


def _dataclass_from_dict(cls, doc: dict, where: str):
    try:
        return cls(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {where} section: {exc}") from exc


def config_from_dict(doc: dict) -> ServiceConfig:
    if "source" not in doc or not isinstance(doc["source"], dict):
        raise ConfigError("config needs a source object")
    outputs_doc = dict(doc.get("outputs", {}))
    listen = outputs_doc.pop("listen", None)
    outputs = _dataclass_from_dict(OutputConfig, outputs_doc, "outputs")
    if listen is not None:
        outputs.listen = parse_listen(listen) if isinstance(listen, str) else tuple(listen)
    cfg = ServiceConfig(
        source=_source_from_dict(doc["source"]),
        home_networks=list(doc.get("home_networks", DEFAULT_HOME_NETWORKS)),
        analysis=_dataclass_from_dict(AnalysisConfig, doc.get("analysis", {}), "analysis"),
        theme=doc.get("theme", "abstract"),
        render=_dataclass_from_dict(RenderConfig, doc.get("render", {}), "render"),
        outputs=outputs,
        history_len=int(doc.get("history_len", DEFAULT_HISTORY_LEN)),
    )
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> ServiceConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return config_from_dict(doc)
