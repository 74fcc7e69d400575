"""Analysis sessions: persistence, CSV export, and interval extension.

A session bundles one flow reference with everything derived from it, as a
single versioned JSON document.  Floats are serialized through Python's
shortest-roundtrip repr, so numeric payloads survive save/load bit for bit.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import crossings as cr
from . import decomposition as dec
from .flows import MatrixFlow, gallery
from .tracker import EigencurveTrace, ZNNConfig, oracle_trace, trace

__all__ = [
    "Session",
    "SessionFormatError",
    "SESSION_VERSION",
    "save",
    "load",
    "new_session",
    "run_trace",
    "run_analyze",
    "run_infer",
    "set_touch",
    "extend_interval",
    "export_traces_csv",
    "plot_data",
    "session_dir",
]

SESSION_VERSION = "1"


class SessionFormatError(ValueError):
    """Unreadable or incompatible session file."""


@dataclass
class Session:
    flow_ref: dict                      # {"name", "seed", "params"}
    interval: tuple                     # (t0, tf)
    cfg: ZNNConfig = field(default_factory=ZNNConfig)
    method: str = "znn"                 # 'znn' | 'oracle'
    traces: list | None = None
    crossings: cr.CrossingSet | None = None
    r1: np.ndarray | None = None
    rc: dict | None = None
    touch: list = field(default_factory=list)
    ve: np.ndarray | None = None
    blocks: dec.BlockStructure | None = None
    history: list = field(default_factory=list)
    notices: list = field(default_factory=list)

    def flow(self) -> MatrixFlow:
        ref = self.flow_ref
        return gallery(ref["name"], seed=ref.get("seed"),
                       n=ref.get("params", {}).get("n"))

    @property
    def n(self) -> int | None:
        return len(self.traces) if self.traces else None


def session_dir() -> str:
    return os.environ.get("EIGENCURVE_SESSION_DIR", ".")


def new_session(flow_name: str, seed: int | None, t0: float, tf: float,
                cfg: ZNNConfig | None = None, method: str = "znn",
                n: int | None = None) -> Session:
    params = {} if n is None else {"n": n}
    return Session(flow_ref={"name": flow_name, "seed": seed, "params": params},
                   interval=(float(t0), float(tf)),
                   cfg=cfg or ZNNConfig(), method=method)


# ---------------------------------------------------------------------------
# pipeline steps
# ---------------------------------------------------------------------------

def run_trace(s: Session, progress=None) -> Session:
    flow = s.flow()
    t0, tf = s.interval
    if s.method == "oracle":
        traces = oracle_trace(flow, t0, tf, s.cfg.tau, progress=progress)
    else:
        traces = trace(flow, t0, tf, s.cfg, progress=progress)
    s.traces = traces
    s.crossings = None
    s.r1 = None
    s.rc = None
    s.ve = None
    s.blocks = None
    return s


def run_analyze(s: Session) -> Session:
    if not s.traces:
        raise ValueError("session has no traces; run trace first")
    flow_struct = s.flow().structure
    if flow_struct == "hermitean":
        s.crossings = cr.detect_crossings(s.traces)
        s.r1 = cr.build_R1(s.crossings, len(s.traces))
    else:
        s.crossings = cr.CrossingSet([])
        s.r1 = cr.build_R1(s.crossings, len(s.traces))
    s.rc = cr.near_approach(s.traces)
    return s


def run_infer(s: Session, on_touch_error: str = "raise") -> Session:
    if s.r1 is None:
        raise ValueError("session has no crossing data; run analyze first")
    ve = dec.infer_labels(s.r1, len(s.traces))
    if s.touch:
        ve, dropped = dec.apply_touch(ve, s.touch, s.r1, on_error=on_touch_error)
        for row in dropped:
            s.notices.append(f"touch row {row} dropped: contradicts crossings")
    s.ve = ve
    s.blocks = dec.block_structure(ve)
    return s


def set_touch(s: Session, pairs) -> Session:
    """Replace the touch list and re-infer; raises TouchError (session
    untouched) when a row contradicts the crossing data."""
    if s.r1 is None:
        raise ValueError("session has no crossing data; run analyze first")
    base = dec.infer_labels(s.r1, len(s.traces))
    ve = dec.almost_touch(base, pairs, s.r1)   # raises TouchError on bad rows
    s.touch = [list(map(int, p)) for p in pairs]
    s.ve = ve
    s.blocks = dec.block_structure(ve)
    return s


def extend_interval(s: Session, new_t0: float, new_tf: float,
                    progress=None) -> Session:
    """Re-run the pipeline on an enlarged interval.

    Touch rows are remapped to the new curve indexing by value continuity at
    the old left edge (curve order is defined at t0, and the left edge
    moves); rows that cannot be matched are dropped with a notice.  The prior
    interval and labeling are archived in the history."""
    t0, tf = s.interval
    if new_t0 > t0 + 1e-12 or new_tf < tf - 1e-12:
        raise ValueError("extended interval must contain the current one")
    old_traces = s.traces
    old_touch = list(s.touch)
    out = replace(s)
    out.history = list(s.history) + [{
        "interval": [t0, tf],
        "ve": None if s.ve is None else [int(v) for v in s.ve],
        "touch": [list(p) for p in s.touch],
    }]
    out.interval = (float(new_t0), float(new_tf))
    out.notices = list(s.notices)
    run_trace(out, progress=progress)
    run_analyze(out)

    # remap touch rows old index -> new index via values at the old left edge
    remapped = []
    if old_touch and old_traces:
        old_vals = np.array([tr.values[0] for tr in old_traces])
        k = int(np.argmin(np.abs(out.traces[0].times - t0)))
        new_vals = np.array([tr.values[k] for tr in out.traces])
        scale = max(1.0, float(np.abs(old_vals).max()))
        mapping = {}
        for i, v in enumerate(old_vals):
            j = int(np.argmin(np.abs(new_vals - v)))
            if abs(new_vals[j] - v) > 1e-4 * scale:
                mapping[i + 1] = None
            else:
                mapping[i + 1] = j + 1
        for (a, b) in old_touch:
            na, nb = mapping.get(a), mapping.get(b)
            if na is None or nb is None or na == nb:
                out.notices.append(
                    f"touch row ({a},{b}) dropped on extension: "
                    "curve identity could not be matched at the old left edge")
                continue
            remapped.append([min(na, nb), max(na, nb)])
    out.touch = remapped
    run_infer(out, on_touch_error="drop")
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _trace_to_json(tr: EigencurveTrace, tau: float) -> dict:
    d = {
        "curve": tr.curve_index,
        "t0": float(tr.times[0]),
        "tau": float(tau),
        "count": int(len(tr.times)),
        "re": [float(x) for x in tr.values.real],
        "im": [float(x) for x in tr.values.imag],
        "provenance": tr.provenance,
        "restarts": [float(t) for t in tr.restarts],
        "degenerate": bool(tr.degenerate),
        "notes": list(tr.notes),
    }
    return d


def _trace_from_json(d: dict) -> EigencurveTrace:
    times = d["t0"] + d["tau"] * np.arange(d["count"])
    values = np.asarray(d["re"], float) + 1j * np.asarray(d["im"], float)
    return EigencurveTrace(
        curve_index=int(d["curve"]), times=times, values=values,
        provenance=d.get("provenance", "znn"),
        restarts=list(d.get("restarts", [])),
        degenerate=bool(d.get("degenerate", False)),
        notes=list(d.get("notes", [])),
    )


def session_to_json(s: Session) -> dict:
    if s.crossings is not None and s.r1 is not None and s.traces:
        rebuilt = cr.build_R1(s.crossings, len(s.traces))
        if not np.array_equal(rebuilt, np.asarray(s.r1)):
            raise SessionFormatError("session inconsistent: r1 != build_R1(crossings)")
    doc = {
        "version": SESSION_VERSION,
        "flow": s.flow_ref,
        "interval": [float(s.interval[0]), float(s.interval[1])],
        "method": s.method,
        "cfg": {
            "tau": s.cfg.tau, "eta": s.cfg.eta,
            "formula": list(s.cfg.formula),
            "restart_threshold": s.cfg.restart_threshold,
            "max_restarts_per_curve": s.cfg.max_restarts_per_curve,
            "residual_tolerance": s.cfg.residual_tolerance,
        },
        "traces": None if s.traces is None else [_trace_to_json(t, s.cfg.tau) for t in s.traces],
        "crossings": None if s.crossings is None else [
            [c.i, c.j, c.t_star, c.gap_before, c.gap_after] for c in s.crossings],
        "r1": None if s.r1 is None else np.asarray(s.r1).tolist(),
        "rc": None if s.rc is None else [
            [v.i, v.j, v.d_min, v.t_min, v.bucket] for v in s.rc.values()],
        "touch": [list(map(int, p)) for p in s.touch],
        "ve": None if s.ve is None else [int(v) for v in s.ve],
        "blocks": None if s.blocks is None else {
            "labels": [b[0] for b in s.blocks.blocks],
            "members": [list(b[1]) for b in s.blocks.blocks],
            "sizes": list(s.blocks.sizes),
        },
        "history": s.history,
        "notices": s.notices,
    }
    return doc


def session_from_json(doc: dict) -> Session:
    if not isinstance(doc, dict) or "version" not in doc:
        raise SessionFormatError("not a session document")
    if doc["version"] != SESSION_VERSION:
        raise SessionFormatError(
            f"session version {doc['version']!r} unsupported (expected {SESSION_VERSION!r})")
    try:
        cfg = doc["cfg"]
        s = Session(
            flow_ref=doc["flow"],
            interval=(float(doc["interval"][0]), float(doc["interval"][1])),
            cfg=ZNNConfig(
                tau=cfg["tau"], eta=cfg["eta"], formula=tuple(cfg["formula"]),
                restart_threshold=cfg["restart_threshold"],
                max_restarts_per_curve=cfg["max_restarts_per_curve"],
                residual_tolerance=cfg["residual_tolerance"],
            ),
            method=doc.get("method", "znn"),
            touch=[list(map(int, p)) for p in doc.get("touch", [])],
            history=list(doc.get("history", [])),
            notices=list(doc.get("notices", [])),
        )
        if doc.get("traces") is not None:
            s.traces = [_trace_from_json(d) for d in doc["traces"]]
        if doc.get("crossings") is not None:
            s.crossings = cr.CrossingSet([
                cr.Crossing(int(i), int(j), float(t), float(gb), float(ga))
                for (i, j, t, gb, ga) in doc["crossings"]])
        if doc.get("r1") is not None:
            s.r1 = np.asarray(doc["r1"], int)
        if doc.get("rc") is not None:
            s.rc = {(int(i), int(j)): cr.NearApproach(
                int(i), int(j), float(d), float(t),
                None if b is None else float(b))
                for (i, j, d, t, b) in doc["rc"]}
        if doc.get("ve") is not None:
            s.ve = np.asarray(doc["ve"], int)
            s.blocks = dec.block_structure(s.ve)
        return s
    except SessionFormatError:
        raise
    except Exception as e:
        raise SessionFormatError(f"malformed session document: {e}") from e


def save(s: Session, path: str) -> None:
    doc = session_to_json(s)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(doc, f)
    os.replace(tmp, path)


def load(path: str) -> Session:
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except FileNotFoundError:
        raise
    except (OSError, json.JSONDecodeError) as e:
        raise SessionFormatError(f"cannot read session file {path}: {e}") from e
    return session_from_json(doc)


def export_traces_csv(s: Session, outdir: str) -> list:
    """One CSV per curve with header t,re,im; returns the written paths."""
    if not s.traces:
        raise ValueError("session has no traces to export")
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for tr in s.traces:
        p = os.path.join(outdir, f"curve_{tr.curve_index:02d}.csv")
        with open(p, "w", encoding="utf-8") as f:
            f.write("t,re,im\n")
            for t, v in zip(tr.times, tr.values):
                f.write(f"{float(t)!r},{float(v.real)!r},{float(v.imag)!r}\n")
        paths.append(p)
    return paths


def plot_data(s: Session, max_points: int = 1200) -> dict:
    """Decimated curve polylines plus crossing / near-approach / suggestion
    markers; everything the viewer needs to rebuild the reference plots."""
    if not s.traces:
        raise ValueError("session has no traces")
    stride = max(1, int(np.ceil(len(s.traces[0].times) / max_points)))
    curves = []
    for tr in s.traces:
        idx = np.arange(0, len(tr.times), stride)
        if idx[-1] != len(tr.times) - 1:
            idx = np.append(idx, len(tr.times) - 1)
        curves.append({
            "index": tr.curve_index,
            "t": [float(x) for x in tr.times[idx]],
            "re": [float(x) for x in tr.values.real[idx]],
            "im": [float(x) for x in tr.values.imag[idx]],
            "degenerate": bool(tr.degenerate),
        })
    markers = []
    if s.crossings is not None:
        for c in s.crossings:
            tr = s.traces[c.i - 1]
            k = int(np.argmin(np.abs(tr.times - c.t_star)))
            markers.append({"kind": "crossing", "i": c.i, "j": c.j,
                            "t": c.t_star, "re": float(tr.values.real[k]),
                            "im": float(tr.values.imag[k])})
    near = []
    if s.rc is not None:
        for (i, j), v in sorted(s.rc.items()):
            if v.bucket is not None and v.bucket <= 1e-2:
                tr = s.traces[i - 1]
                k = int(np.argmin(np.abs(tr.times - v.t_min)))
                near.append({"kind": "near", "i": i, "j": j, "t": v.t_min,
                             "d": v.d_min, "bucket": v.bucket,
                             "re": float(tr.values.real[k]),
                             "im": float(tr.values.imag[k])})
    sugg = [
        {"i": c.i, "j": c.j, "d": c.d_min, "t": c.t_min, "score": c.score}
        for c in cr.suggest_touch(s.traces)
    ]
    return {
        "flow": s.flow_ref,
        "structure": s.flow().structure,
        "interval": [float(s.interval[0]), float(s.interval[1])],
        "curves": curves,
        "crossings": markers,
        "near_approaches": near,
        "suggestions": sugg,
        "touch": [list(p) for p in s.touch],
        "ve": None if s.ve is None else [int(v) for v in s.ve],
        "blocks": None if s.blocks is None else {
            "sizes": list(s.blocks.sizes),
            "labels": [b[0] for b in s.blocks.blocks],
            "members": [list(b[1]) for b in s.blocks.blocks],
        },
        "history": s.history,
    }
