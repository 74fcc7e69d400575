"""Look-ahead finite difference formulas for the ZNN eigencurve integrator.

A look-ahead formula of signature (j, s) predicts the next state from the
s most recent states and the current state derivative,

    z_{k+1} = sum_{i=0}^{s-1} alpha_i z_{k-i} + tau * beta * zdot_k,

with truncation order j.  Coefficients are derived at runtime from the
Taylor order conditions; when the conditions leave free parameters, the
free directions are used to push the parasitic characteristic roots as
deep into the unit disk as possible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

__all__ = ["FormulaCoefficients", "derive_formula", "best_stable", "propagate_polynomial"]

_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class FormulaCoefficients:
    """Coefficients and stability data of one look-ahead formula."""

    alphas: tuple[float, ...]   # weights on z_k, z_{k-1}, ..., z_{k-s+1}
    beta: float                 # weight on tau * zdot_k
    order: int                  # achieved truncation order
    stability_ok: bool          # zero-stability of the characteristic polynomial
    spurious_radius: float      # largest parasitic root modulus
    eta_tau_limit: float        # largest eta*tau keeping the damped recursion contractive

    @property
    def s(self) -> int:
        return len(self.alphas)

    def characteristic_roots(self) -> np.ndarray:
        return _char_roots(np.asarray(self.alphas))


def _order_matrix(j: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    # condition m: sum_i (-i)^m alpha_i + [m == 1] beta = 1,  m = 0..j
    A = np.zeros((j + 1, s + 1))
    for m in range(j + 1):
        A[m, :s] = [(-float(i)) ** m for i in range(s)]
        if m == 1:
            A[m, s] = 1.0
    return A, np.ones(j + 1)


def _char_roots(alphas: np.ndarray) -> np.ndarray:
    coeffs = np.empty(len(alphas) + 1)
    coeffs[0] = 1.0
    coeffs[1:] = -alphas
    return np.roots(coeffs)


def _spurious_radius(alphas: np.ndarray) -> float:
    roots = _char_roots(alphas)
    k = int(np.argmin(np.abs(roots - 1.0)))  # principal (consistency) root
    rest = np.delete(roots, k)
    return float(np.max(np.abs(rest))) if len(rest) else 0.0


def _zero_stable(alphas: np.ndarray) -> bool:
    roots = _char_roots(alphas)
    mods = np.abs(roots)
    if np.any(mods > 1.0 + _BOUNDARY_TOL):
        return False
    boundary = roots[mods >= 1.0 - _BOUNDARY_TOL]
    for a, b in itertools.combinations(boundary, 2):
        if abs(a - b) < 1e-7:  # repeated boundary root
            return False
    return True


def _achieved_order(x: np.ndarray, s: int, j_min: int) -> int:
    order = j_min
    while True:
        A, rhs = _order_matrix(order + 1, s)
        if np.max(np.abs(A @ x - rhs)) > 1e-9:
            return order
        order += 1


def _damped_radius(alphas: np.ndarray, beta: float, h: float) -> float:
    # recursion applied to zdot = -eta*z, h = eta*tau:
    # zeta^s - (alpha_0 - h*beta) zeta^{s-1} - alpha_1 zeta^{s-2} - ... = 0
    a = alphas.copy()
    a[0] -= h * beta
    return float(np.max(np.abs(_char_roots(a))))


def _eta_tau_limit(alphas: np.ndarray, beta: float) -> float:
    if _damped_radius(alphas, beta, 1e-9) > 1.0 + _BOUNDARY_TOL:
        return 0.0
    lo, hi = 0.0, 4.0
    if _damped_radius(alphas, beta, hi) <= 1.0 + _BOUNDARY_TOL:
        return hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _damped_radius(alphas, beta, mid) <= 1.0 + _BOUNDARY_TOL:
            lo = mid
        else:
            hi = mid
    return lo


@lru_cache(maxsize=None)
def derive_formula(j: int, s: int) -> FormulaCoefficients:
    """Solve the order conditions for signature (j, s).

    Raises ValueError when j exceeds the maximal achievable order s.  When no
    zero-stable coefficient set exists the formula is returned with
    ``stability_ok=False`` rather than raising; callers decide the fallback.
    """
    if j < 1 or s < 1:
        raise ValueError("formula signature needs j >= 1 and s >= 1")
    if j > s:
        raise ValueError(
            f"order conditions infeasible for (j={j}, s={s}); "
            f"maximal achievable order is {s}"
        )
    A, rhs = _order_matrix(j, s)
    x0, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    _, sv, vt = np.linalg.svd(A)
    rank = int(np.sum(sv > 1e-11 * sv[0]))
    null = vt[rank:].T  # (s+1, k) free directions

    if null.shape[1] == 0:
        x = x0
    else:
        def radius_of(c: np.ndarray) -> float:
            return _spurious_radius((x0 + null @ c)[:s])

        k = null.shape[1]
        best_c, best_r = np.zeros(k), radius_of(np.zeros(k))
        if k <= 2:
            grid = np.linspace(-3.0, 3.0, 25)
            starts = [np.asarray(c) for c in itertools.product(*([grid] * k))]
        else:
            rng = np.random.default_rng(k)      # deterministic multi-start
            starts = list(rng.uniform(-3.0, 3.0, size=(400, k)))
        for cand in starts:
            r = radius_of(cand)
            if r < best_r:
                best_c, best_r = cand, r
        res = minimize(radius_of, best_c, method="Nelder-Mead",
                       options=dict(xatol=1e-13, fatol=1e-13, maxiter=6000))
        if res.fun < best_r:
            best_c = res.x
        x = x0 + null @ best_c

    alphas = x[:s]
    beta = float(x[s])
    # snap tiny coefficients produced by the optimizer to exact zero
    alphas[np.abs(alphas) < 1e-13] = 0.0
    return FormulaCoefficients(
        alphas=tuple(float(a) for a in alphas),
        beta=beta,
        order=_achieved_order(np.concatenate([alphas, [beta]]), s, j),
        stability_ok=_zero_stable(alphas),
        spurious_radius=_spurious_radius(alphas),
        eta_tau_limit=_eta_tau_limit(alphas, beta),
    )


@lru_cache(maxsize=None)
def best_stable(j: int, s: int) -> FormulaCoefficients:
    """Highest-order zero-stable formula with signature (j', s), j' <= min(j, s)."""
    for jj in range(min(j, s), 0, -1):
        f = derive_formula(jj, s)
        if f.stability_ok:
            return f
    raise ValueError(f"no zero-stable formula with s={s}")  # (1, s) is always stable


def propagate_polynomial(f: FormulaCoefficients, m: int, tau: float, steps: int) -> float:
    """Max error of the formula propagating z(t) = t**m from exact history.

    Independent exactness oracle: a formula of order j reproduces polynomial
    trajectories of degree <= j exactly up to roundoff.
    """
    s = f.s
    hist = [(-i * tau) ** m for i in range(s)][::-1]  # z_{k-s+1} .. z_k at t=0
    worst = 0.0
    for k in range(steps):
        t = k * tau
        zdot = m * t ** (m - 1) if m >= 1 else 0.0
        znew = tau * f.beta * zdot + sum(
            f.alphas[i] * hist[-1 - i] for i in range(s)
        )
        hist.append(znew)
        hist.pop(0)
        worst = max(worst, abs(znew - (t + tau) ** m))
    return worst
