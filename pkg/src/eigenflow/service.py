"""HTTP API over one analysis session, for the interactive viewer.

Endpoints (all JSON over HTTP/1.1):

    GET  /session       full session document
    GET  /curves        decimated plot data with markers
    GET  /suggestions   advisory almost-touch candidates
    GET  /status        {"phase": str, "fraction": float}
    POST /touch         {"pairs": [[a,b], ...]} -> new ve, or 409 with the
                        offending row index
    POST /extend        {"t0": float, "tf": float} -> recompute, poll /status

One session per server instance; mutations are serialized by a lock while
reads stay concurrent.  When a static UI directory is configured, anything
that is not an API route is served from it.
"""

from __future__ import annotations

import json
import mimetypes
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import session as ses
from .crossings import suggest_touch
from .decomposition import TouchError

__all__ = ["SessionServer", "serve"]


class _State:
    def __init__(self, session: ses.Session, path: str | None):
        self.session = session
        self.path = path
        self.lock = threading.Lock()
        self.phase = "idle"
        self.fraction = 1.0

    def set_status(self, phase: str, fraction: float):
        self.phase = phase
        self.fraction = float(fraction)


class _Handler(BaseHTTPRequestHandler):
    state: _State = None
    ui_dir: str | None = None

    # --- plumbing -----------------------------------------------------
    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, code: int, payload, content_type="application/json"):
        body = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self):
        length = int(self.headers.get("Content-Length", 0))
        if length == 0:
            return {}
        return json.loads(self.rfile.read(length))

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    # --- GET ------------------------------------------------------------
    def do_GET(self):
        st = self.state
        route = self.path.split("?")[0]
        if route == "/session":
            self._send(200, ses.session_to_json(st.session))
        elif route == "/curves":
            self._send(200, ses.plot_data(st.session))
        elif route == "/suggestions":
            cands = suggest_touch(st.session.traces) if st.session.traces else []
            self._send(200, [{"i": c.i, "j": c.j, "d": c.d_min,
                              "t": c.t_min, "score": c.score} for c in cands])
        elif route == "/status":
            self._send(200, {"phase": st.phase, "fraction": st.fraction})
        elif self.ui_dir:
            self._serve_static(route)
        else:
            self._send(404, {"error": f"unknown route {route}"})

    def _serve_static(self, route: str):
        rel = route.lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(self.ui_dir, rel))
        if not full.startswith(os.path.realpath(self.ui_dir)) or not os.path.isfile(full):
            self._send(404, {"error": f"unknown route {route}"})
            return
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as f:
            self._send(200, f.read(), content_type=ctype)

    # --- POST -----------------------------------------------------------
    def do_POST(self):
        st = self.state
        route = self.path.split("?")[0]
        try:
            body = self._read_json()
        except json.JSONDecodeError as e:
            self._send(400, {"error": f"bad JSON body: {e}"})
            return

        if route == "/touch":
            pairs = body.get("pairs", [])
            with st.lock:
                try:
                    ses.set_touch(st.session, pairs)
                except TouchError as e:
                    self._send(409, {"error": str(e), "row": e.row,
                                     "pair": list(e.pair)})
                    return
                except ValueError as e:
                    self._send(400, {"error": str(e)})
                    return
                if st.path:
                    ses.save(st.session, st.path)
            self._send(200, {
                "ve": [int(v) for v in st.session.ve],
                "blocks": {"sizes": list(st.session.blocks.sizes)},
                "touch": [list(p) for p in st.session.touch]})
        elif route == "/extend":
            try:
                t0, tf = float(body["t0"]), float(body["tf"])
            except (KeyError, TypeError, ValueError):
                self._send(400, {"error": "body needs numeric t0 and tf"})
                return
            with st.lock:
                st.set_status("tracing", 0.0)
                try:
                    out = ses.extend_interval(
                        st.session, t0, tf,
                        progress=lambda f: st.set_status("tracing", 0.9 * f))
                except ValueError as e:
                    st.set_status("idle", 1.0)
                    self._send(400, {"error": str(e)})
                    return
                st.set_status("analyzing", 0.95)
                st.session = out
                if st.path:
                    ses.save(out, st.path)
                st.set_status("idle", 1.0)
            self._send(200, {
                "interval": list(out.interval),
                "ve": None if out.ve is None else [int(v) for v in out.ve],
                "blocks": None if out.blocks is None else
                    {"sizes": list(out.blocks.sizes)},
                "history": out.history,
                "notices": out.notices})
        else:
            self._send(404, {"error": f"unknown route {route}"})


class SessionServer:
    """Owns the HTTP server thread; usable as a context manager in tests."""

    def __init__(self, session: ses.Session, path: str | None = None,
                 host: str = "127.0.0.1", port: int = 0,
                 ui_dir: str | None = None):
        state = _State(session, path)
        handler = type("BoundHandler", (_Handler,),
                       {"state": state, "ui_dir": ui_dir})
        self.state = state
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def start(self):
        self.thread.start()
        return self

    def stop(self):
        self.httpd.shutdown()
        self.httpd.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def serve(session_path: str, host: str = "127.0.0.1", port: int = 8571,
          ui_dir: str | None = None) -> None:
    s = ses.load(session_path)
    if ui_dir is None:
        cand = os.path.join(os.path.dirname(session_path) or ".", "frontend", "dist")
        ui_dir = cand if os.path.isdir(cand) else None
    server = SessionServer(s, path=session_path, host=host, port=port, ui_dir=ui_dir)
    print(f"serving session {session_path} on http://{host}:{server.port}"
          + (f" with UI from {ui_dir}" if ui_dir else ""))
    try:
        server.start().thread.join()
    except KeyboardInterrupt:
        server.stop()
