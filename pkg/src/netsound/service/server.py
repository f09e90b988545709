"""Console-facing WebSocket server.

One socket per client carries both directions: the server streams
telemetry frames (history replay first, then live), the client sends
control messages and receives exactly one reply each, in receipt order.
Replies and telemetry share a single outgoing queue per client so writes
never interleave.
"""

from __future__ import annotations

import asyncio
import json
import threading
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .control import handle_control_text
from .pipeline import SonificationService
from .telemetry import encode_telemetry


def create_app(service: SonificationService) -> FastAPI:
    app = FastAPI(title="netsound console")

    @app.websocket("/ws")
    async def console_socket(websocket: WebSocket) -> None:
        await websocket.accept()
        loop = asyncio.get_running_loop()
        outgoing: asyncio.Queue[str] = asyncio.Queue()

        def on_frame(frame) -> None:
            text = json.dumps(encode_telemetry(frame))
            loop.call_soon_threadsafe(outgoing.put_nowait, text)

        # snapshot history before going live so plots start populated
        for frame in service.state.history_snapshot():
            outgoing.put_nowait(json.dumps(encode_telemetry(frame)))
        token = service.hub.subscribe(on_frame)

        async def writer() -> None:
            while True:
                await websocket.send_text(await outgoing.get())

        writer_task = asyncio.create_task(writer())
        try:
            while True:
                text = await websocket.receive_text()
                reply = handle_control_text(text, service.state)
                outgoing.put_nowait(json.dumps(reply))
        except WebSocketDisconnect:
            pass
        finally:
            service.hub.unsubscribe(token)
            writer_task.cancel()

    @app.get("/healthz")
    async def healthz() -> dict:
        return {
            "ok": True,
            "theme": service.state.theme.name,
            "transport": service.state.transport,
            "windows": len(service.state.history),
        }

    console_dir = service.config.outputs.console_dir
    if console_dir and Path(console_dir).is_dir():
        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")
    return app


class ConsoleServer:
    """uvicorn wrapper running the app on a daemon thread."""

    def __init__(self, service: SonificationService, host: str, port: int):
        import uvicorn

        self._config = uvicorn.Config(
            create_app(service), host=host, port=port, log_level="warning"
        )
        self._server = uvicorn.Server(self._config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)

    def start(self) -> None:
        self._thread.start()

    @property
    def started(self) -> bool:
        return self._server.started

    def wait_started(self, timeout: float = 5.0) -> bool:
        import time

        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            if self._server.started:
                return True
            if not self._thread.is_alive():
                return False
            time.sleep(0.02)
        return False

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=5)
