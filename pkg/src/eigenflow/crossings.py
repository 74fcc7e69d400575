"""Eigencurve crossing detection, near-approach tables, and touch suggestions.

Crossings are sign changes of the curve-pair difference on the sample grid
(hermitean flows only; general complex eigencurves essentially never meet in
R^3 and are screened by minimal-distance tables instead).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .flows import MatrixFlow

__all__ = [
    "Crossing",
    "CrossingSet",
    "NearApproach",
    "TouchCandidate",
    "detect_crossings",
    "build_R1",
    "parse_R1",
    "near_approach",
    "suggest_touch",
    "refine_min_gap",
    "BUCKETS",
]

BUCKETS = (1.0, 1e-2, 1e-4, 1e-6)


@dataclass(frozen=True)
class Crossing:
    i: int            # 1-based curve labels, i < j
    j: int
    t_star: float     # sign-change location (linear interpolation)
    gap_before: float
    gap_after: float


@dataclass
class CrossingSet:
    crossings: list

    def pairs(self) -> set:
        return {(c.i, c.j) for c in self.crossings}

    def __len__(self):
        return len(self.crossings)

    def __iter__(self):
        return iter(self.crossings)


@dataclass(frozen=True)
class NearApproach:
    i: int
    j: int
    d_min: float
    t_min: float
    bucket: float | None    # finest threshold >= d_min, None when d_min > 1


@dataclass(frozen=True)
class TouchCandidate:
    i: int
    j: int
    d_min: float
    t_min: float
    score: float            # slope-exchange quality in [0, 1]


def _common_grid(traces):
    ts = traces[0].times
    for tr in traces[1:]:
        if len(tr.times) != len(ts) or not np.allclose(tr.times, ts):
            raise ValueError("traces must share a common sample grid")
    return ts


def detect_crossings(traces, cross_tol: float = 1e-9) -> CrossingSet:
    """One crossing per sign change of lambda_i - lambda_j between clear
    samples.  Samples with |d| <= cross_tol are ambiguous (the pair meets a
    grid point head-on) and are skipped; the sign comparison then runs
    between the nearest clear samples on either side.  Tangential touchings
    without a sign change are near-approaches, not crossings."""
    ts = _common_grid(traces)
    vals = np.stack([tr.values for tr in traces])
    if np.abs(vals.imag).max() > 1e-9:
        raise ValueError(
            "detect_crossings needs real (hermitean) traces; "
            "use near_approach for general complex flows")
    L = vals.real
    n = len(traces)
    found = []
    for a in range(n):
        for b in range(a + 1, n):
            d = L[a] - L[b]
            clear = np.where(np.abs(d) > cross_tol)[0]
            if len(clear) < 2:
                continue
            dc = d[clear]
            flips = np.where(np.sign(dc[:-1]) * np.sign(dc[1:]) < 0)[0]
            for m in flips:
                k1, k2 = clear[m], clear[m + 1]
                t_star = ts[k1] + (ts[k2] - ts[k1]) * d[k1] / (d[k1] - d[k2])
                found.append(Crossing(a + 1, b + 1, float(t_star),
                                      float(abs(d[k1])), float(abs(d[k2]))))
    found.sort(key=lambda c: (c.i, c.j, c.t_star))
    return CrossingSet(found)


def build_R1(crossings: CrossingSet, n: int) -> np.ndarray:
    """Pack the crossing partner sets into the (n-1) x (n+1) integer layout:
    row i = [i, ascending labels of curves j > i crossed by curve i, 0 pad]."""
    partners: dict[int, set] = {i: set() for i in range(1, n)}
    for c in crossings:
        if c.j > n or c.i < 1:
            raise ValueError(f"crossing ({c.i},{c.j}) out of range for n={n}")
        partners[c.i].add(c.j)
    R1 = np.zeros((n - 1, n + 1), int)
    for i in range(1, n):
        R1[i - 1, 0] = i
        row = sorted(partners[i])
        R1[i - 1, 1:1 + len(row)] = row
    return R1


def parse_R1(R1: np.ndarray) -> set:
    """Recover the crossing pair set from an R1 matrix (round-trip of build_R1)."""
    R1 = np.asarray(R1)
    pairs = set()
    for row in R1:
        i = int(row[0])
        for j in row[1:]:
            if j == 0:
                continue
            if not i < j:
                raise ValueError(f"malformed R1 row for curve {i}: partner {j}")
            pairs.add((i, int(j)))
    return pairs


def _parabolic_min(ts, d2, k):
    """Vertex of the parabola through three samples of the squared distance
    bracketing grid minimum k; clamped to the bracket."""
    t1, t2, t3 = ts[k - 1], ts[k], ts[k + 1]
    y1, y2, y3 = d2[k - 1], d2[k], d2[k + 1]
    denom = (t1 - t2) * (t1 - t3) * (t2 - t3)
    if denom == 0:
        return ts[k], d2[k]
    a = (t3 * (y2 - y1) + t2 * (y1 - y3) + t1 * (y3 - y2)) / denom
    b = (t3 * t3 * (y1 - y2) + t2 * t2 * (y3 - y1) + t1 * t1 * (y2 - y3)) / denom
    if a <= 0:
        return ts[k], d2[k]
    tv = float(np.clip(-b / (2 * a), t1, t3))
    c = y2 - a * t2 * t2 - b * t2
    return tv, max(a * tv * tv + b * tv + c, 0.0)


def _bucket(d_min: float) -> float | None:
    for theta in reversed(BUCKETS):     # finest threshold still >= d_min
        if d_min <= theta:
            return theta
    return None


def near_approach(traces) -> dict:
    """Minimal same-time distance per unordered curve pair, refined by
    parabolic interpolation of the squared distance through the three samples
    bracketing the grid minimum.  Keys are (i, j) with i < j."""
    ts = _common_grid(traces)
    vals = np.stack([tr.values for tr in traces])
    n = len(traces)
    table = {}
    for a in range(n):
        for b in range(a + 1, n):
            d2 = np.abs(vals[a] - vals[b]) ** 2
            k = int(np.argmin(d2))
            if 0 < k < len(ts) - 1:
                t_min, d2_min = _parabolic_min(ts, d2, k)
            else:
                t_min, d2_min = float(ts[k]), float(d2[k])
            d_min = float(np.sqrt(d2_min))
            table[(a + 1, b + 1)] = NearApproach(a + 1, b + 1, d_min,
                                                 float(t_min), _bucket(d_min))
    return table


def _window_slope(ts, y, k1, k2):
    # least-squares slope over samples k1..k2 inclusive
    t = ts[k1:k2 + 1]
    v = y[k1:k2 + 1]
    t = t - t.mean()
    denom = (t * t).sum()
    return (t * v).sum() / denom if denom > 0 else 0.0


def suggest_touch(traces, gap_threshold: float = 0.5,
                  angle_window: int = 40) -> list:
    """Advisory candidates for almost-touching pairs.

    A pair qualifies when (1) its minimal distance is below gap_threshold,
    (2) the difference never changes sign (no crossing), and (3) the slopes
    exchange across the closest approach the way hyperbolic avoidance does:
    the incoming slope of one curve matches the outgoing slope of the other.
    Candidates are advisory; inference only consumes pairs the user (or an
    exact reference) confirms."""
    ts = _common_grid(traces)
    vals = np.stack([tr.values for tr in traces])
    real = np.abs(vals.imag).max() <= 1e-9
    n = len(traces)
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            diff = vals[a] - vals[b]
            if real:
                clear = diff.real[np.abs(diff.real) > 1e-12]
                if len(clear) and np.any(np.sign(clear) != np.sign(clear[0])):
                    continue  # the pair crosses somewhere
            d = np.abs(diff)
            k = int(np.argmin(d))
            if d[k] > gap_threshold or k == 0 or k == len(ts) - 1:
                continue
            k1 = max(k - angle_window, 0)
            k2 = min(k + angle_window, len(ts) - 1)
            if k - k1 < 2 or k2 - k < 2:
                continue
            sa_in = _window_slope(ts, vals[a], k1, k)
            sb_in = _window_slope(ts, vals[b], k1, k)
            sa_out = _window_slope(ts, vals[a], k, k2)
            sb_out = _window_slope(ts, vals[b], k, k2)
            scale = max(*(abs(x) for x in (sa_in, sb_in, sa_out, sb_out)), 1e-9)
            q = (abs(sa_in - sb_out) + abs(sb_in - sa_out)) / (2.0 * scale)
            score = float(max(0.0, 1.0 - q))
            out.append(TouchCandidate(a + 1, b + 1, float(d[k]), float(ts[k]), score))
    out.sort(key=lambda c: (-c.score, c.d_min))
    return out


def refine_min_gap(flow: MatrixFlow, t_lo: float, t_hi: float):
    """Continuously refine the minimal pairwise spectral gap of a flow on
    [t_lo, t_hi] with fresh eigensolves.

    Bounded minimization of the squared gap, then parabola-vertex polish with
    shrinking stencils: the squared gap stays smooth even where the gap
    itself has a V-shaped zero (an exact curve contact), so the contact point
    is located to near machine precision.  Returns (t_star, gap, lam_a,
    lam_b) with the achieving eigenvalue pair ordered by descending real
    part."""
    n = flow.n

    def closest_pair(t):
        w = np.linalg.eigvals(flow.eval(t))
        D = np.abs(w[:, None] - w[None, :]) + np.diag(np.full(n, np.inf))
        i, j = np.unravel_index(np.argmin(D), D.shape)
        return D[i, j], w[i], w[j]

    def gap2(t):
        return closest_pair(t)[0] ** 2

    res = minimize_scalar(gap2, bounds=(t_lo, t_hi), method="bounded",
                          options={"xatol": 1e-12})
    t_star = float(res.x)
    h = max(1e-5 * (t_hi - t_lo), 1e-12)
    for _ in range(6):
        t1, t2, t3 = t_star - h, t_star, t_star + h
        y1, y2, y3 = gap2(t1), gap2(t2), gap2(t3)
        denom = y1 - 2.0 * y2 + y3
        if denom > 0:
            shift = 0.5 * h * (y1 - y3) / denom
            if abs(shift) <= h:
                t_star = float(np.clip(t2 + shift, t_lo, t_hi))
        h = max(h * 3e-2, 1e-13)
    gap, wa, wb = closest_pair(t_star)
    if (wa.real, wa.imag) < (wb.real, wb.imag):
        wa, wb = wb, wa
    return t_star, float(gap), complex(wa), complex(wb)
