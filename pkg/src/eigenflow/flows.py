"""1-parameter matrix flows: model type, transformations, and the test gallery.

A flow is a time-parameterized square matrix A(t) with an entrywise
derivative evaluator.  Flows are immutable; the transformation helpers
(conjugation, block joins, hermitization, scalar shifts) return new flows
that evaluate lazily on top of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "FlowError",
    "MatrixFlow",
    "SimilarityMatrix",
    "evaluate",
    "conjugate",
    "block_join",
    "hermitize",
    "scalar_shift",
    "gallery",
    "GALLERY_NAMES",
    "random_unitary",
    "random_orthogonal",
    "hermitean11_blocks",
]


class FlowError(ValueError):
    """Invalid flow construction or evaluation request."""


def _as_matrix(M, n: int, name: str) -> np.ndarray:
    M = np.asarray(M)
    if M.shape != (n, n):
        raise FlowError(f"flow '{name}' evaluator returned shape {M.shape}, expected {(n, n)}")
    return M


@dataclass(frozen=True)
class MatrixFlow:
    """A dimension-n matrix flow with evaluator and derivative evaluator."""

    n: int
    field: str                    # 'real' | 'complex'
    structure: str                # 'hermitean' | 'general'
    _eval: Callable[[float], np.ndarray]
    _deval: Callable[[float], np.ndarray] | None = None
    name: str = "flow"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise FlowError("flow dimension must be positive")
        if self.field not in ("real", "complex"):
            raise FlowError(f"unknown field tag {self.field!r}")
        if self.structure not in ("hermitean", "general"):
            raise FlowError(f"unknown structure tag {self.structure!r}")

    def eval(self, t: float) -> np.ndarray:
        if not np.isfinite(t):
            raise FlowError(f"flow evaluation needs finite t, got {t!r}")
        return _as_matrix(self._eval(float(t)), self.n, self.name)

    def deval(self, t: float) -> np.ndarray:
        """Entrywise time derivative; central-difference fallback when no
        analytic evaluator was supplied (h = 1e-6 * max(1, |t|))."""
        if not np.isfinite(t):
            raise FlowError(f"flow derivative needs finite t, got {t!r}")
        if self._deval is not None:
            return _as_matrix(self._deval(float(t)), self.n, self.name)
        h = 1e-6 * max(1.0, abs(t))
        return (self.eval(t + h) - self.eval(t - h)) / (2.0 * h)

    def __repr__(self):
        return (f"MatrixFlow({self.name!r}, n={self.n}, field={self.field}, "
                f"structure={self.structure})")


def evaluate(flow: MatrixFlow, t: float) -> np.ndarray:
    """Evaluate ``flow`` at parameter value ``t``."""
    return flow.eval(t)


@dataclass(frozen=True)
class SimilarityMatrix:
    """A constant similarity transform, tagged by its kind."""

    U: np.ndarray
    kind: str = "general-invertible"   # 'unitary' | 'orthogonal' | 'general-invertible'

    def __post_init__(self):
        U = np.asarray(self.U)
        object.__setattr__(self, "U", U)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise FlowError("similarity matrix must be square")
        if self.kind not in ("unitary", "orthogonal", "general-invertible"):
            raise FlowError(f"unknown similarity kind {self.kind!r}")
        if self.kind in ("unitary", "orthogonal"):
            err = np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0])))
            if err > 1e-12:
                raise FlowError(f"{self.kind} similarity fails U U* = I by {err:.2e}")

    @property
    def n(self) -> int:
        return self.U.shape[0]

    def inverse(self) -> np.ndarray:
        if self.kind in ("unitary", "orthogonal"):
            return self.U.conj().T
        cond = np.linalg.cond(self.U)
        if not np.isfinite(cond) or cond > 1e14:
            raise FlowError("similarity matrix is singular or near-singular")
        return np.linalg.inv(self.U)


def random_unitary(n: int, seed: int) -> SimilarityMatrix:
    """Seeded random unitary matrix via QR orthonormalization."""
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(M)
    d = np.diag(R)
    return SimilarityMatrix(Q * (d / np.abs(d)), "unitary")


def random_orthogonal(n: int, seed: int) -> SimilarityMatrix:
    """Seeded random real orthogonal matrix via QR orthonormalization."""
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return SimilarityMatrix(Q * np.sign(np.diag(R)), "orthogonal")


def conjugate(flow: MatrixFlow, S: SimilarityMatrix) -> MatrixFlow:
    """Similarity-transform a flow: t -> S^{-1} A(t) S (S* for unitary kinds)."""
    if S.n != flow.n:
        raise FlowError(f"similarity dimension {S.n} does not match flow dimension {flow.n}")
    Si = S.inverse()
    U = S.U
    herm_preserving = S.kind in ("unitary", "orthogonal")
    real_preserving = S.kind == "orthogonal" or (
        np.isrealobj(U) and np.max(np.abs(np.imag(Si))) == 0.0
    )
    structure = flow.structure if herm_preserving else "general"
    fld = flow.field if real_preserving else "complex"

    def ev(t, _e=flow.eval):
        return Si @ _e(t) @ U

    def dv(t, _d=flow.deval):
        return Si @ _d(t) @ U

    return MatrixFlow(flow.n, fld, structure, ev, dv,
                      name=f"{flow.name}~{S.kind[0]}", params=dict(flow.params))


def block_join(flows: list[MatrixFlow]) -> MatrixFlow:
    """Block-diagonal concatenation of flows; spectrum is the multiset union."""
    if not flows:
        raise FlowError("block_join needs at least one flow")
    if len(flows) == 1:
        return flows[0]
    n = sum(f.n for f in flows)
    fld = "real" if all(f.field == "real" for f in flows) else "complex"
    structure = "hermitean" if all(f.structure == "hermitean" for f in flows) else "general"
    dtype = float if fld == "real" else complex
    offs = np.cumsum([0] + [f.n for f in flows])

    def ev(t):
        M = np.zeros((n, n), dtype)
        for f, o in zip(flows, offs):
            M[o:o + f.n, o:o + f.n] = f.eval(t)
        return M

    def dv(t):
        M = np.zeros((n, n), dtype)
        for f, o in zip(flows, offs):
            M[o:o + f.n, o:o + f.n] = f.deval(t)
        return M

    return MatrixFlow(n, fld, structure, ev, dv,
                      name="+".join(f.name for f in flows))


def hermitize(flow: MatrixFlow) -> MatrixFlow:
    """Return the flow t -> A(t) + A(t)*, tagged hermitean."""

    def ev(t, _e=flow.eval):
        M = _e(t)
        return M + M.conj().T

    def dv(t, _d=flow.deval):
        M = _d(t)
        return M + M.conj().T

    return MatrixFlow(flow.n, flow.field, "hermitean", ev, dv,
                      name=f"herm({flow.name})", params=dict(flow.params))


def scalar_shift(flow: MatrixFlow, indices: range, delta: complex) -> MatrixFlow:
    """Subtract delta*I on the principal submatrix given by a contiguous
    1-based index range."""
    idx = list(indices)
    if not idx:
        raise FlowError("scalar_shift needs a nonempty index range")
    if idx != list(range(idx[0], idx[-1] + 1)):
        raise FlowError("scalar_shift indices must be contiguous")
    if idx[0] < 1 or idx[-1] > flow.n:
        raise FlowError(f"scalar_shift indices {idx[0]}..{idx[-1]} out of range 1..{flow.n}")
    delta = complex(delta)
    lo, hi = idx[0] - 1, idx[-1]
    complexify = delta.imag != 0.0
    fld = "complex" if complexify else flow.field
    structure = flow.structure if (flow.structure == "hermitean" and not complexify) else (
        "general" if complexify else flow.structure)
    d = delta if complexify else delta.real

    def ev(t, _e=flow.eval):
        M = _e(t)
        if complexify:
            M = M.astype(complex)
        else:
            M = M.copy()
        M[lo:hi, lo:hi] -= d * np.eye(hi - lo, dtype=M.dtype)
        return M

    return MatrixFlow(flow.n, fld, structure, ev, flow.deval,
                      name=f"{flow.name}-shift",
                      params=dict(flow.params, shift=[delta.real, delta.imag],
                                  shift_lo=idx[0], shift_hi=idx[-1]))


# ---------------------------------------------------------------------------
# gallery flows
# ---------------------------------------------------------------------------

_SQ2 = np.sqrt(2.0)


def _sx6(t):
    M = np.zeros((6, 6))
    M[0, 0] = 21.0 * t + 0.5
    M[1, 1] = 7.0 * t + 0.5
    M[2, 2] = 0.5 - 7.0 * t
    M[3, 3] = 0.5 - 21.0 * t
    M[4, 4] = 14.0 * t - 1.0
    M[5, 5] = -14.0 * t - 1.0
    M[1, 4] = M[4, 1] = 7.0 * _SQ2 * t
    M[2, 5] = M[5, 2] = 7.0 * _SQ2 * t
    return M


_SX6_D = _sx6(1.0) - _sx6(0.0)   # entries are linear in t


def _diag5(t):
    return np.diag([
        np.sin(1.0 - 0.5 * t),
        0.5 * np.cos(t / 3.0),
        np.sin(t) * np.cos(-1.0 - 0.2 * t),
        np.cos(2.0 * t - 0.5),
        np.cos(1.0 + 3.0 * t) ** 2,
    ])


def _diag5_d(t):
    return np.diag([
        -0.5 * np.cos(1.0 - 0.5 * t),
        -np.sin(t / 3.0) / 6.0,
        np.cos(t) * np.cos(-1.0 - 0.2 * t) + 0.2 * np.sin(t) * np.sin(-1.0 - 0.2 * t),
        -2.0 * np.sin(2.0 * t - 0.5),
        -6.0 * np.cos(1.0 + 3.0 * t) * np.sin(1.0 + 3.0 * t),
    ])


def _a4(t):
    i = 1j
    M = np.zeros((4, 4), complex)
    M[0, 0] = i * (2.0 - np.exp(t - 1.0)) + t / 6.0
    M[1, 1] = -2.0 - 2.0 * i * np.sin(t - 1.0)
    M[2, 2] = 2.0 * i - 2.0 * t
    M[3, 3] = np.sin(t + 2.0) + i * t
    for k in range(3):
        M[k, k + 1] = M[k + 1, k] = 1.0
    return M


def _a4_d(t):
    i = 1j
    M = np.zeros((4, 4), complex)
    M[0, 0] = -i * np.exp(t - 1.0) + 1.0 / 6.0
    M[1, 1] = -2.0 * i * np.cos(t - 1.0)
    M[2, 2] = -2.0
    M[3, 3] = np.cos(t + 2.0) + i
    return M


def _a6(t):
    i = 1j
    M = np.zeros((6, 6), complex)
    M[0, 0] = i - 2.0 * np.cos(2.0 * t)
    M[1, 1] = -2.0 - 2.0 * i * np.sin(t - 1.0)
    M[2, 2] = 2.0 * i - t
    M[3, 3] = i * np.exp(np.sin(t))
    M[4, 4] = t / 2.0 + np.sin(t) * np.cos(2.0 * i * t) / 100.0
    M[5, 5] = t - i / 8.0 * np.cos(i * t / 3.0 - 1.0)
    for k in range(5):
        M[k, k + 1] = M[k + 1, k] = 1.0
    return M


def _a6_d(t):
    i = 1j
    M = np.zeros((6, 6), complex)
    M[0, 0] = 4.0 * np.sin(2.0 * t)
    M[1, 1] = -2.0 * i * np.cos(t - 1.0)
    M[2, 2] = -1.0
    M[3, 3] = i * np.cos(t) * np.exp(np.sin(t))
    M[4, 4] = 0.5 + (np.cos(t) * np.cos(2.0 * i * t)
                     - 2.0 * i * np.sin(t) * np.sin(2.0 * i * t)) / 100.0
    M[5, 5] = 1.0 + i * i / 24.0 * np.sin(i * t / 3.0 - 1.0)
    return M


def _real2x2(t):
    return np.array([[1.0, t], [t * t, 3.0]])


def _real2x2_d(t):
    return np.array([[0.0, 1.0], [2.0 * t, 0.0]])


# 7x7 complex seed of the 11x11 hermitean analog.  Diagonal entries are sums
# of trigonometric and exp(sin) terms; the coefficient tables are frozen
# constants chosen so that the joined 7+4 flow has inter-block crossings and
# hyperbolic near-touches on wide intervals but keeps healthy curve gaps.
# Each term is (re_amp, im_amp, omega, phase, kind) with kind 0=sin, 1=cos,
# 2=exp(sin)-1.
_B1_DIAG = (
    (
        (0.914303, -0.464986, 0.154795, 6.185135, 0),
        (0.666235, -0.043993, 0.329433, 3.200886, 1),
        (1.062563, 0.708046, 0.604771, 4.582078, 0),
    ),
    (
        (1.045945, -0.392418, 0.32882, 5.717087, 1),
        (1.023368, 0.149915, 0.212593, 2.785267, 1),
        (0.838912, -0.141403, 0.602073, 5.946691, 2),
    ),
    (
        (0.598849, 0.723418, 0.247866, 6.081989, 0),
        (0.757742, -0.423588, 0.313785, 5.764139, 1),
        (0.799833, -0.512282, 0.618528, 1.549838, 2),
    ),
    (
        (0.763419, -0.644967, 0.377804, 2.112792, 1),
        (1.181872, 0.306374, 0.22939, 1.121352, 0),
        (0.611805, -0.79197, 0.480827, 5.509674, 1),
    ),
    (
        (0.844784, -0.05148, 0.181109, 4.187401, 1),
        (0.954997, -0.210832, 0.186416, 4.629185, 0),
        (0.783716, -0.278306, 0.246527, 6.192307, 2),
    ),
    (
        (0.623249, 0.17715, 0.516892, 1.982606, 1),
        (1.128177, 0.115907, 0.291535, 2.400641, 1),
        (0.463444, 0.559501, 0.647412, 3.2389, 1),
    ),
    (
        (0.441524, -0.668236, 0.633366, 3.763773, 0),
        (0.887134, -0.083861, 0.449417, 0.500548, 1),
        (0.873402, 0.386207, 0.29809, 4.101626, 1),
    ),
)
_B1_SUP = (
    (0.056742, -0.163395, 0.390557, 5.029866, 1),
    (-0.055471, 0.214295, 0.295212, 4.911404, 1),
    (0.20871, -0.219178, 0.266327, 5.861292, 1),
    (0.160675, -0.227886, 0.436194, 4.606473, 0),
    (0.022814, -0.125193, 0.31264, 4.221685, 0),
    (0.160576, 0.249104, 0.554394, 3.324843, 0),
)


def _term_eval(t, term):
    ra, ia, w, p, kind = term
    x = w * t + p
    if kind == 0:
        f = np.sin(x)
    elif kind == 1:
        f = np.cos(x)
    else:
        f = np.exp(np.sin(x)) - 1.0
    return (ra + 1j * ia) * f


def _term_deval(t, term):
    ra, ia, w, p, kind = term
    x = w * t + p
    if kind == 0:
        df = w * np.cos(x)
    elif kind == 1:
        df = -w * np.sin(x)
    else:
        df = w * np.cos(x) * np.exp(np.sin(x))
    return (ra + 1j * ia) * df


def _b1(t):
    M = np.zeros((7, 7), complex)
    for k in range(7):
        M[k, k] = sum(_term_eval(t, tm) for tm in _B1_DIAG[k])
    for k in range(6):
        M[k, k + 1] = 1.0 + _term_eval(t, _B1_SUP[k])
        M[k + 1, k] = 1.0
    return M


def _b1_d(t):
    M = np.zeros((7, 7), complex)
    for k in range(7):
        M[k, k] = sum(_term_deval(t, tm) for tm in _B1_DIAG[k])
    for k in range(6):
        M[k, k + 1] = _term_deval(t, _B1_SUP[k])
    return M


def _herm11_seed():
    """Unobscured 11x11 hermitean analog: blkdiag(B1, 2*B1[2:5,2:5]) hermitized."""

    def ev(t):
        B1 = _b1(t)
        B2 = np.zeros((11, 11), complex)
        B2[:7, :7] = B1
        B2[7:, 7:] = 2.0 * B1[1:5, 1:5]
        return B2 + B2.conj().T

    def dv(t):
        D1 = _b1_d(t)
        D2 = np.zeros((11, 11), complex)
        D2[:7, :7] = D1
        D2[7:, 7:] = 2.0 * D1[1:5, 1:5]
        return D2 + D2.conj().T

    return MatrixFlow(11, "complex", "hermitean", ev, dv, name="hermitean11_seed")


def hermitean11_blocks() -> tuple[MatrixFlow, MatrixFlow]:
    """The two hermitean diagonal blocks (7x7 and 4x4) underlying the analog.

    Ground-truth reference for block membership of eigencurves; the public
    ``hermitean11_analog`` gallery flow is their join, unitarily obscured.
    """

    def ev7(t):
        B1 = _b1(t)
        return B1 + B1.conj().T

    def dv7(t):
        D1 = _b1_d(t)
        return D1 + D1.conj().T

    def ev4(t):
        S = 2.0 * _b1(t)[1:5, 1:5]
        return S + S.conj().T

    def dv4(t):
        S = 2.0 * _b1_d(t)[1:5, 1:5]
        return S + S.conj().T

    return (MatrixFlow(7, "complex", "hermitean", ev7, dv7, name="hermitean11_block7"),
            MatrixFlow(4, "complex", "hermitean", ev4, dv4, name="hermitean11_block4"))


def _a10(t):
    # Combined tridiagonal flow evaluated with the one-unit argument shift
    # that reproduces the published near-approach data (t1 = 0.8174).
    M = np.zeros((10, 10), complex)
    M[:6, :6] = _a6(t - 1.0)
    M[6:, 6:] = _a4(t - 1.0)
    return M


def _a10_d(t):
    M = np.zeros((10, 10), complex)
    M[:6, :6] = _a6_d(t - 1.0)
    M[6:, 6:] = _a4_d(t - 1.0)
    return M


GALLERY_NAMES = (
    "stackexchange6",
    "diag5",
    "a4",
    "a6",
    "a10",
    "real2x2",
    "hermitean11_analog",
    "random_hermitean",
)


def _random_hermitean(n: int, seed: int) -> MatrixFlow:
    rng = np.random.default_rng(seed ^ 0xC0FFEE)

    def hrand():
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return (M + M.conj().T) / 2.0

    F0, F1, F2 = hrand(), hrand(), hrand()

    def ev(t):
        return F0 + np.sin(t) * F1 + np.cos(0.5 * t) * F2

    def dv(t):
        return np.cos(t) * F1 - 0.5 * np.sin(0.5 * t) * F2

    return MatrixFlow(n, "complex", "hermitean", ev, dv,
                      name=f"random_hermitean({n})", params={"n": n, "seed": seed})


def gallery(name: str, seed: int | None = None, n: int | None = None) -> MatrixFlow:
    """Return a named test flow.

    With ``seed`` given, the flow is obscured by a seeded random similarity
    (orthogonal for real flows, unitary for complex ones); without it the
    bare construction is returned.  ``hermitean11_analog`` is always obscured
    (seed defaults to 0) since that is how the flow is defined.
    ``random_hermitean`` takes the dimension via ``n`` or ``name="random_hermitean(8)"``.
    """
    base_name = name
    if name.startswith("random_hermitean(") and name.endswith(")"):
        n = int(name[len("random_hermitean("):-1])
        base_name = "random_hermitean"

    if base_name == "stackexchange6":
        flow = MatrixFlow(6, "real", "hermitean", _sx6, lambda t: _SX6_D,
                          name="stackexchange6")
    elif base_name == "diag5":
        flow = MatrixFlow(5, "real", "hermitean", _diag5, _diag5_d, name="diag5")
    elif base_name == "a4":
        flow = MatrixFlow(4, "complex", "general", _a4, _a4_d, name="a4")
    elif base_name == "a6":
        flow = MatrixFlow(6, "complex", "general", _a6, _a6_d, name="a6")
    elif base_name == "a10":
        flow = MatrixFlow(10, "complex", "general", _a10, _a10_d, name="a10")
    elif base_name == "real2x2":
        flow = MatrixFlow(2, "real", "general", _real2x2, _real2x2_d, name="real2x2")
    elif base_name == "hermitean11_analog":
        flow = _herm11_seed()
        s = 0 if seed is None else seed
        obscured = conjugate(flow, random_unitary(11, s))
        return MatrixFlow(11, "complex", "hermitean", obscured._eval, obscured._deval,
                          name="hermitean11_analog", params={"seed": s})
    elif base_name == "random_hermitean":
        if n is None:
            raise FlowError("random_hermitean needs a dimension, e.g. 'random_hermitean(8)'")
        flow = _random_hermitean(n, 0 if seed is None else seed)
        return flow
    else:
        raise FlowError(f"unknown gallery flow {name!r}; known: {', '.join(GALLERY_NAMES)}")

    if seed is None:
        return flow
    S = (random_orthogonal(flow.n, seed) if flow.field == "real"
         else random_unitary(flow.n, seed))
    obscured = conjugate(flow, S)
    return MatrixFlow(flow.n, obscured.field, obscured.structure,
                      obscured._eval, obscured._deval,
                      name=flow.name, params={"seed": seed})


