"""Operator control plane: shared service state and control-message handling.

Every control message gets exactly one reply. Invalid messages (unknown
voice, bad JSON, malformed fields) produce an error reply and leave state
untouched; they never disconnect a client or kill the pipeline.
"""

from __future__ import annotations

import dataclasses
import json
import threading
import time
from collections import deque

from ..soundscape import (
    DrivenParam,
    InvalidCurve,
    Theme,
    ThemeError,
    ValidationError,
    VariableId,
    load_theme,
)
from .telemetry import TelemetryFrame, encode_telemetry


class ServiceState:
    """Mutable state shared by the pipeline thread and the control plane.

    Control handlers mutate under the lock; the pipeline snapshots what it
    needs at window boundaries, and the audio engine reads mixer fields at
    block boundaries.
    """

    def __init__(self, theme: Theme, history_len: int):
        self.lock = threading.RLock()
        self.theme = theme
        self.mixer = theme.mixer.clone()
        self.transport = "running"
        self.history: deque[TelemetryFrame] = deque(maxlen=history_len)
        self.theme_epoch = 0  # bumped when voices change, engine rebuilds
        self.resume_event = threading.Event()
        self.resume_event.set()
        self.started = time.monotonic()

    def uptime(self) -> float:
        return time.monotonic() - self.started

    def mixer_snapshot(self) -> dict:
        with self.lock:
            return self.mixer.to_dict()

    def history_snapshot(self) -> list[TelemetryFrame]:
        with self.lock:
            return list(self.history)

    def record_frame(self, frame: TelemetryFrame) -> None:
        with self.lock:
            self.history.append(frame)

    def latest_frame(self) -> TelemetryFrame | None:
        with self.lock:
            return self.history[-1] if self.history else None


def _ok(**extra) -> dict:
    return {"type": "reply", "ok": True, **extra}


def _error(message: str) -> dict:
    return {"type": "reply", "ok": False, "error": message}


def _require_voice(state: ServiceState, voice_id) -> str:
    if not isinstance(voice_id, str):
        raise ValueError("voice id must be a string")
    state.theme.voice(voice_id)  # raises KeyError for unknown ids
    return voice_id


def _field(msg: dict, name: str):
    if name not in msg:
        raise ValueError(f"missing field {name!r}")
    return msg[name]


def _swap_voice(theme: Theme, voice_id: str, new_voice) -> Theme:
    voices = tuple(new_voice if v.id == voice_id else v for v in theme.voices)
    return dataclasses.replace(theme, voices=voices)


def apply_control(msg: dict, state: ServiceState) -> dict:
    """Apply one control message; returns the reply (ok or error)."""
    if not isinstance(msg, dict):
        return _error("control message must be a JSON object")
    msg_type = msg.get("type")
    try:
        with state.lock:
            return _dispatch(msg_type, msg, state)
    except KeyError as exc:
        return _error(f"unknown voice: {exc.args[0] if exc.args else exc}")
    except (TypeError, ValueError) as exc:
        return _error(str(exc))


def _dispatch(msg_type, msg: dict, state: ServiceState) -> dict:
    if msg_type == "set_gain":
        voice = _require_voice(state, msg.get("voice"))
        state.mixer.voice(voice).gain_db = float(_field(msg, "db"))
        return _ok()

    if msg_type == "mute":
        voice = _require_voice(state, msg.get("voice"))
        state.mixer.voice(voice).mute = bool(_field(msg, "on"))
        return _ok()

    if msg_type == "solo":
        voice = _require_voice(state, msg.get("voice"))
        state.mixer.voice(voice).solo = bool(_field(msg, "on"))
        return _ok()

    if msg_type == "set_pan":
        voice = _require_voice(state, msg.get("voice"))
        pan = float(_field(msg, "pan"))
        if not -1.0 <= pan <= 1.0:
            return _error(f"pan {pan} outside [-1, 1]")
        state.mixer.voice(voice).pan_override = pan
        return _ok()

    if msg_type == "clear_pan":
        voice = _require_voice(state, msg.get("voice"))
        state.mixer.voice(voice).pan_override = None
        return _ok()

    if msg_type == "set_master":
        state.mixer.master_gain_db = float(_field(msg, "db"))
        return _ok()

    if msg_type == "set_theme":
        name = msg.get("name")
        if not isinstance(name, str):
            return _error("set_theme needs a theme name")
        try:
            theme = load_theme(name)
        except ThemeError as exc:
            return _error(f"unknown theme: {exc}")
        state.theme = theme
        state.mixer = theme.mixer.clone()
        state.theme_epoch += 1
        return _ok()

    if msg_type == "set_mapping":
        return _set_mapping(msg, state)

    if msg_type == "transport":
        action = msg.get("action")
        if action == "pause":
            state.transport = "paused"
            state.resume_event.clear()
            return _ok()
        if action == "resume":
            state.transport = "running"
            state.resume_event.set()
            return _ok()
        return _error(f"transport action must be pause or resume, got {action!r}")

    if msg_type == "snapshot_request":
        latest = state.latest_frame()
        if latest is None:
            return _ok(snapshot=None)
        doc = encode_telemetry(latest)
        # read-back discipline: the control-plane fields reflect live state,
        # not the values frozen into the last window's frame
        doc["mixer"] = state.mixer.to_dict()
        doc["theme"] = state.theme.name
        doc["transport"] = state.transport
        return _ok(snapshot=doc)

    return _error(f"unknown control type {msg_type!r}")


def _set_mapping(msg: dict, state: ServiceState) -> dict:
    from ..soundscape import MappingCurve  # local to keep module import light

    voice_id = _require_voice(state, msg.get("voice"))
    voice = state.theme.voice(voice_id)
    target = msg.get("target")
    curve_doc = msg.get("curve")
    if not isinstance(curve_doc, dict):
        return _error("set_mapping needs a curve object")
    try:
        curve = MappingCurve(
            curve_doc.get("type", "linear"),
            float(curve_doc["in"][0]),
            float(curve_doc["in"][1]),
            float(curve_doc["out"][0]),
            float(curve_doc["out"][1]),
        )
    except (KeyError, IndexError, TypeError) as exc:
        return _error(f"malformed curve: {exc}")
    except InvalidCurve as exc:
        return _error(str(exc))

    variable_name = msg.get("variable")
    driven = list(voice.driven)
    existing = next((i for i, d in enumerate(driven) if d.target == target), None)
    if variable_name is not None:
        try:
            variable = VariableId(variable_name)
        except ValueError:
            return _error(f"unknown variable {variable_name!r}")
    elif existing is not None:
        variable = driven[existing].variable
    else:
        return _error(f"voice {voice_id!r} does not drive {target!r}; supply a variable")

    new_param = DrivenParam(target, variable, curve)
    if existing is not None:
        driven[existing] = new_param
    else:
        driven.append(new_param)
    try:
        new_voice = dataclasses.replace(voice, driven=tuple(driven))
        state.theme = _swap_voice(state.theme, voice_id, new_voice)
    except ValidationError as exc:
        return _error(str(exc))
    return _ok()


def handle_control_text(text: str, state: ServiceState) -> dict:
    """Parse and apply one wire message; malformed JSON is an error reply."""
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        return _error(f"invalid JSON: {exc}")
    return apply_control(msg, state)
