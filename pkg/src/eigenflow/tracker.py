"""Eigencurve tracking: ZNN look-ahead propagation and a re-diagonalize oracle.

The fast path integrates the ZNN eigenpair dynamics: with state
z = (v, lambda) and error function E(z, t) = [A v - lambda v; (v*v - 1)/2],
imposing Edot = -eta E yields one bordered linear solve per curve per step,

    [A(t) - lambda I   -v ] [vdot     ]   [-Adot v - eta (A v - lambda v)]
    [      v*           0 ] [lambdadot] = [-eta (v*v - 1)/2              ],

followed by a look-ahead finite difference update.  The verification path
re-diagonalizes at every grid point and matches eigenvalues to curves by
minimal-total-distance assignment against a linear extrapolation of the
previous samples (plain value matching would silently re-sort the curves
at symmetric crossings).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .flows import MatrixFlow
from .formulas import FormulaCoefficients, best_stable, derive_formula

__all__ = [
    "ZNNConfig",
    "EigencurveTrace",
    "RestartNeeded",
    "static_eigen",
    "znn_step",
    "trace",
    "oracle_trace",
    "trace_grid",
]


class RestartNeeded(RuntimeError):
    """The bordered ZNN system is too ill-conditioned to advance this curve."""


@dataclass(frozen=True)
class ZNNConfig:
    """Tracking parameters; defaults mirror the hermitean reference runs."""

    tau: float = 1e-3
    eta: float = 50.0
    formula: tuple[int, int] = (3, 5)      # (truncation order j, past points s)
    restart_threshold: float = 1e12
    max_restarts_per_curve: int = 12
    residual_tolerance: float = 1e-6
    store_vectors: bool = False
    bootstrap_substeps: int = 16

    def __post_init__(self):
        if self.tau <= 0 or self.eta <= 0:
            raise ValueError("tau and eta must be positive")
        j, s = self.formula
        if j < 1 or s < 1:
            raise ValueError("formula signature needs j >= 1, s >= 1")

    def resolved_formula(self) -> FormulaCoefficients:
        """The stable formula actually used; falls back to a lower order with
        a warning when the requested signature has no zero-stable solution."""
        j, s = self.formula
        f = derive_formula(j, s)
        if not f.stability_ok:
            f = best_stable(j, s)
            warnings.warn(
                f"no zero-stable look-ahead formula with signature {(j, s)}; "
                f"using order {f.order} with s={s} instead", stacklevel=2)
        if self.tau * self.eta > f.eta_tau_limit + 1e-12:
            warnings.warn(
                f"tau*eta = {self.tau * self.eta:.3g} exceeds the stability "
                f"limit {f.eta_tau_limit:.3g} of formula {self.formula}",
                stacklevel=2)
        return f


@dataclass
class EigencurveTrace:
    """One eigencurve: samples of lambda(t) on a uniform grid."""

    curve_index: int                       # 1-based, descending order at t0
    times: np.ndarray
    values: np.ndarray                     # complex samples
    vectors: np.ndarray | None = None      # (nt, n) unit eigenvectors if stored
    provenance: str = "znn"                # 'znn' | 'oracle'
    restarts: list = field(default_factory=list)
    degenerate: bool = False
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)


def _phase_fix(V: np.ndarray) -> np.ndarray:
    # rotate each column so its largest-magnitude entry is real positive
    k = np.argmax(np.abs(V), axis=0)
    piv = V[k, np.arange(V.shape[1])]
    piv = np.where(np.abs(piv) == 0.0, 1.0, piv)
    return V * (np.abs(piv) / piv)


def static_eigen(M, hermitean: bool | None = None):
    """Full eigendecomposition, ordered by descending real part, ties by
    descending imaginary part.  Returns a list of (eigenvalue, unit vector)."""
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise ValueError("static_eigen needs finite matrix entries")
    if hermitean is None:
        hermitean = bool(np.allclose(M, M.conj().T, atol=1e-13 * (1 + np.abs(M).max())))
    if hermitean:
        w, V = np.linalg.eigh(M)
        w = w.astype(complex)
    else:
        w, V = np.linalg.eig(M)
    order = np.lexsort((-w.imag, -w.real))
    w, V = w[order], _phase_fix(V[:, order])
    return [(w[i], V[:, i]) for i in range(len(w))]


def _cluster_mean(w: np.ndarray, tol: float) -> np.ndarray:
    """Replace eigenvalue clusters tighter than tol by their mean.

    Near a defective point individual eigenvalues carry O(sqrt(eps)) error
    while the cluster mean is accurate to O(eps); applied only on the oracle
    path for general flows."""
    w = w.copy()
    n = len(w)
    used = np.zeros(n, bool)
    for i in range(n):
        if used[i]:
            continue
        members = [i]
        for j in range(i + 1, n):
            if not used[j] and abs(w[j] - w[i]) <= tol:
                members.append(j)
        if len(members) > 1:
            m = np.mean(w[members])
            for j in members:
                w[j] = m
                used[j] = True
    return w


def _ordered_eigvals(M, hermitean: bool) -> np.ndarray:
    if hermitean:
        return np.linalg.eigvalsh(M).astype(complex)
    return np.linalg.eigvals(M)


def trace_grid(t0: float, tf: float, tau: float) -> np.ndarray:
    nt = int(round((tf - t0) / tau))
    if nt < 1:
        raise ValueError("interval shorter than one sampling gap")
    return t0 + tau * np.arange(nt + 1)


# ---------------------------------------------------------------------------
# ZNN propagation
# ---------------------------------------------------------------------------

def _znn_rhs(A, Ad, Z, eta, n):
    """Bordered systems and residuals for all curves at one time point.

    Returns (P, rhs, resid) with an extra probe column in rhs for a cheap
    condition lower bound."""
    nc = len(Z)
    v = Z[:, :n]
    lam = Z[:, n]
    E1 = v @ A.T - lam[:, None] * v
    resid = np.linalg.norm(E1, axis=1)
    P = np.zeros((nc, n + 1, n + 1), complex)
    P[:, :n, :n] = A
    idx = np.arange(n)
    P[:, idx, idx] -= lam[:, None]
    P[:, :n, n] = -v
    P[:, n, :n] = v.conj()
    rhs = np.empty((nc, n + 1, 2), complex)
    rhs[:, :n, 0] = -(v @ Ad.T) - eta * E1
    rhs[:, n, 0] = -eta * ((v.conj() * v).sum(1).real - 1.0) / 2.0
    rhs[:, :, 1] = 1.0 / np.sqrt(n + 1)
    return P, rhs, resid


def _solve_zdot(P, rhs):
    """Batched solve; returns (zdot, cond_lower_bound)."""
    nc = P.shape[0]
    try:
        X = np.linalg.solve(P, rhs)
        zdot = X[..., 0]
        conds = (np.abs(P).sum(axis=2).max(axis=1)
                 * np.abs(X[..., 1]).sum(axis=1))
    except np.linalg.LinAlgError:
        zdot = np.empty((nc, P.shape[1]), complex)
        conds = np.empty(nc)
        for c in range(nc):
            try:
                Xc = np.linalg.solve(P[c], rhs[c])
                zdot[c] = Xc[:, 0]
                conds[c] = np.abs(P[c]).sum(1).max() * np.abs(Xc[:, 1]).sum()
            except np.linalg.LinAlgError:
                zdot[c] = np.linalg.lstsq(P[c], rhs[c, :, 0], rcond=None)[0]
                conds[c] = np.inf
    bad = ~np.isfinite(zdot).all(axis=1)
    if np.any(bad):
        conds = conds.copy()
        conds[bad] = np.inf
    return zdot, conds


def znn_step(z, t: float, flow: MatrixFlow, cfg: ZNNConfig, history) -> np.ndarray:
    """Advance one curve state z = concat(v, [lambda]) from t to t + tau.

    ``history`` holds past states, oldest first, including z itself as the
    last entry; the look-ahead formula order adapts to the available depth.
    Raises RestartNeeded when the bordered matrix is singular or its condition
    estimate exceeds the configured threshold."""
    z = np.asarray(z, complex)
    n = flow.n
    A = flow.eval(t)
    Ad = flow.deval(t)
    P, rhs, _ = _znn_rhs(A, Ad, z[None, :], cfg.eta, n)
    cond = np.linalg.cond(P[0])
    if not np.isfinite(cond) or cond > cfg.restart_threshold:
        raise RestartNeeded(f"cond(P) = {cond:.3g} at t = {t}")
    zdot = np.linalg.solve(P[0], rhs[0, :, 0])
    hist = [np.asarray(h, complex) for h in history]
    if not hist or not np.allclose(hist[-1], z):
        hist.append(z)
    j, s = cfg.formula
    f = best_stable(min(j, len(hist)), min(s, len(hist)))
    znew = cfg.tau * f.beta * zdot
    for i in range(f.s):
        znew = znew + f.alphas[i] * hist[-1 - i]
    return znew


_LADDER_CACHE: dict = {}


def _ladder(j: int, depth: int) -> FormulaCoefficients:
    key = (j, depth)
    if key not in _LADDER_CACHE:
        _LADDER_CACHE[key] = best_stable(min(j, depth), depth)
    return _LADDER_CACHE[key]


class _Engine:
    """Vectorized ZNN propagation over all curves of one flow."""

    def __init__(self, flow: MatrixFlow, cfg: ZNNConfig):
        self.flow = flow
        self.cfg = cfg
        self.n = flow.n
        self.herm = flow.structure == "hermitean"
        self.main = cfg.resolved_formula()
        self.j, self.s = self.main.order, self.main.s

    def seed(self, t: float):
        pairs = static_eigen(self.flow.eval(t), self.herm)
        Z = np.empty((self.n, self.n + 1), complex)
        for c, (lam, v) in enumerate(pairs):
            Z[c, :self.n] = v
            Z[c, self.n] = lam
        return Z

    def reseed_curve(self, Z, c, A):
        """Re-anchor curve c on the exact eigenpair nearest its current state,
        projecting the old vector into the (possibly multi-dim) eigenspace."""
        if self.herm:
            w, V = np.linalg.eigh(A)
            w = w.astype(complex)
        else:
            w, V = np.linalg.eig(A)
        i = int(np.argmin(np.abs(w - Z[c, self.n])))
        close = np.abs(w - w[i]) <= 1e-8 * (1.0 + abs(w[i]))
        W = V[:, close]
        vnew = W @ (W.conj().T @ Z[c, :self.n])
        nv = np.linalg.norm(vnew)
        Z[c, :self.n] = W[:, 0] if nv < 1e-8 else vnew / nv
        Z[c, self.n] = w[i]

    def substep_bootstrap(self, Z, t):
        """Self-start across [t, t + tau]: substeps with a fresh uniformly
        spaced history so low-order formulas inject only O((tau/m)^2)."""
        cfg = self.cfg
        m = max(1, cfg.bootstrap_substeps)
        tsub = cfg.tau / m
        hist = [Z.copy()]
        Zs = Z
        for k in range(m):
            tm = t + k * tsub
            A = self.flow.eval(tm)
            Ad = self.flow.deval(tm)
            P, rhs, _ = _znn_rhs(A, Ad, Zs, cfg.eta, self.n)
            zdot, conds = _solve_zdot(P, rhs)
            bad = (conds > cfg.restart_threshold)
            if np.any(bad) and len(hist) >= 2:
                zdot[bad] = ((hist[-1] - hist[-2]) / tsub)[bad]
            f = _ladder(self.j, min(len(hist), self.s))
            Znew = tsub * f.beta * zdot
            for i in range(f.s):
                Znew += f.alphas[i] * hist[-1 - i]
            hist.append(Znew)
            if len(hist) > self.s + 2:
                hist.pop(0)
            Zs = Znew
        return Zs


def trace(flow: MatrixFlow, t0: float, tf: float, cfg: ZNNConfig | None = None,
          progress=None):
    """Trace all n eigencurves of ``flow`` on [t0, tf] with the ZNN method.

    Returns n EigencurveTrace objects indexed by descending eigenvalue order
    at t0.  Curves restart from a fresh eigensolve when their residual leaves
    the configured tolerance; curves needing more than
    ``max_restarts_per_curve`` restarts, and curves whose terminal value
    disagrees with a terminal eigensolve, are flagged degenerate.
    ``progress(fraction)`` is called periodically when given."""
    cfg = cfg or ZNNConfig()
    if not t0 < tf:
        raise ValueError("trace needs t0 < tf")
    ts = trace_grid(t0, tf, cfg.tau)
    eng = _Engine(flow, cfg)
    n, s = flow.n, eng.s
    if len(ts) - 1 < s:
        raise ValueError(f"interval holds {len(ts)-1} steps; formula needs >= {s}")
    Z = eng.seed(t0)
    hist = [Z.copy()]
    values = np.empty((len(ts), n), complex)
    values[0] = Z[:, n]
    vectors = np.empty((len(ts), n, n), complex) if cfg.store_vectors else None

    def _unit_rows(V):
        return V / np.linalg.norm(V, axis=1, keepdims=True)

    if vectors is not None:
        vectors[0] = _unit_rows(Z[:, :n])
    restarts: list[list[float]] = [[] for _ in range(n)]
    coasts = 0

    for k in range(len(ts) - 1):
        t = ts[k]
        A = flow.eval(t)
        Ad = flow.deval(t)
        P, rhs, resid = _znn_rhs(A, Ad, Z, cfg.eta, n)
        viol = resid > cfg.residual_tolerance
        if np.any(viol) or not np.all(np.isfinite(resid)):
            viol |= ~np.isfinite(resid)
            for c in np.where(viol)[0]:
                eng.reseed_curve(Z, c, A)
                restarts[c].append(float(t))
            hist = [Z.copy()]
            values[k] = Z[:, n]          # retained sample must satisfy the invariant
            if vectors is not None:
                vectors[k] = _unit_rows(Z[:, :n])
            P, rhs, resid = _znn_rhs(A, Ad, Z, cfg.eta, n)
        zdot, conds = _solve_zdot(P, rhs)
        # coast through near-singular (coalescence) steps on the curve's own
        # momentum; a fresh eigensolve there cannot separate the paired curves
        bad = (conds > cfg.restart_threshold) | (np.abs(zdot).max(axis=1) * cfg.tau > 0.5)
        if np.any(bad) and len(hist) >= 2:
            zdot[bad] = ((hist[-1] - hist[-2]) / cfg.tau)[bad]
            coasts += int(bad.sum())
        if len(hist) < s:
            Z = eng.substep_bootstrap(Z, t)
        else:
            f = eng.main
            Znew = cfg.tau * f.beta * zdot
            for i in range(f.s):
                Znew += f.alphas[i] * hist[-1 - i]
            Z = Znew
        hist.append(Z.copy())
        if len(hist) > s:
            hist.pop(0)
        values[k + 1] = Z[:, n]
        if vectors is not None:
            vectors[k + 1] = _unit_rows(Z[:, :n])
        if progress is not None and k % 200 == 0:
            progress(k / (len(ts) - 1))

    # terminal check: does the trace set agree with a fresh eigensolve?
    wf = _ordered_eigvals(flow.eval(ts[-1]), eng.herm)
    C = np.abs(values[-1][:, None] - wf[None, :])
    rows, cols = linear_sum_assignment(C)
    term_err = C[rows, cols]
    if eng.herm:
        values = np.real(values) + 0j if np.abs(values.imag).max() < 1e-9 else values

    out = []
    for c in range(n):
        tr = EigencurveTrace(
            curve_index=c + 1,
            times=ts,
            values=values[:, c].copy(),
            vectors=vectors[:, c].copy() if vectors is not None else None,
            provenance="znn",
            restarts=restarts[c],
        )
        if len(restarts[c]) > cfg.max_restarts_per_curve:
            tr.degenerate = True
            tr.notes.append(
                f"{len(restarts[c])} restarts exceed the budget of "
                f"{cfg.max_restarts_per_curve}")
        if term_err[c] > 100 * cfg.residual_tolerance:
            tr.degenerate = True
            tr.notes.append(
                f"terminal value differs from eigensolve by {term_err[c]:.3g}; "
                "curve pair may have collapsed onto one branch")
        out.append(tr)
    if coasts:
        for tr in out:
            tr.notes.append(f"{coasts} coalescence steps coasted on extrapolation")
    return out


def oracle_trace(flow: MatrixFlow, t0: float, tf: float, tau: float,
                 store_vectors: bool = False,
                 coalesce_tol: float | None = None,
                 progress=None):
    """Verification path: full eigensolve at every grid point, eigenvalues
    assigned to curves by optimal matching against linear extrapolation
    (greedy matching beyond n = 64).

    For general (non-hermitean) flows, eigenvalue clusters tighter than
    ``coalesce_tol`` (default 100*sqrt(eps)*scale) are averaged; individual
    values inside such a cluster carry O(sqrt(eps)) noise anyway."""
    if not t0 < tf:
        raise ValueError("oracle_trace needs t0 < tf")
    ts = trace_grid(t0, tf, tau)
    n = flow.n
    herm = flow.structure == "hermitean"
    lams = np.empty((len(ts), n), complex)
    vecs = np.empty((len(ts), n, n), complex) if store_vectors else None

    for k, t in enumerate(ts):
        M = flow.eval(t)
        if store_vectors:
            pairs = static_eigen(M, herm)
            w = np.array([p[0] for p in pairs])
            V = np.stack([p[1] for p in pairs], axis=1)
        else:
            w = _ordered_eigvals(M, herm)
            V = None
        if not herm:
            tol = coalesce_tol
            if tol is None:
                tol = 100.0 * np.sqrt(np.finfo(float).eps) * max(1.0, np.abs(M).max())
            if tol > 0:
                w = _cluster_mean(w, tol)
        if k == 0:
            order = np.lexsort((-w.imag, -w.real))
        else:
            pred = lams[k - 1] if k == 1 else 2 * lams[k - 1] - lams[k - 2]
            if n <= 64:
                C = np.abs(pred[:, None] - w[None, :])
                _, order = linear_sum_assignment(C)
            else:
                order = _greedy_assign(pred, w)
        lams[k] = w[order]
        if store_vectors:
            vecs[k] = V[:, order].T
        if progress is not None and k % 500 == 0:
            progress(k / len(ts))

    out = []
    for c in range(n):
        out.append(EigencurveTrace(
            curve_index=c + 1,
            times=ts,
            values=lams[:, c].copy(),
            vectors=vecs[:, c].copy() if store_vectors else None,
            provenance="oracle",
        ))
    return out


def _greedy_assign(pred: np.ndarray, w: np.ndarray) -> np.ndarray:
    n = len(pred)
    order = np.empty(n, int)
    taken = np.zeros(n, bool)
    for i in np.argsort(np.abs(pred)):  # stable processing order
        d = np.abs(w - pred[i])
        d[taken] = np.inf
        jbest = int(np.argmin(d))
        order[i] = jbest
        taken[jbest] = True
    return order
