"""Dense numeric kernel: SVD, Moore-Penrose inverse, rank and subspace predicates.

Matrices are plain 2-D numpy arrays.  Real input stays ``float64``; anything
with a complex dtype is carried as ``complex128``.  Every equality decision is
residual based: two matrices are equal when

    max|X - Y| <= eq_tol * (1 + max(max|X|, max|Y|))

and a singular value counts as zero when it does not exceed
``max(rank_tol_rel * sigma_max * max(m, n), rank_tol_abs)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

EPS = float(np.finfo(np.float64).eps)


class NumericError(ArithmeticError):
    """Raised for non-finite input or a failed decomposition."""


class SvdConvergenceError(NumericError):
    def __init__(self, sweeps: int):
        super().__init__(f"one-sided Jacobi SVD did not converge after {sweeps} sweeps")
        self.sweeps = sweeps


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class ToleranceConfig:
    rank_tol_rel: float = 1e3 * EPS
    eq_tol: float = 1e-9
    # Floor for "numerically zero" singular values.  Schur complements that are
    # exactly zero in exact arithmetic come out as O(1e-15) noise; a purely
    # relative threshold would read that noise as full rank.
    rank_tol_abs: float = 1e-11

    def __post_init__(self):
        if self.rank_tol_rel < 0 or self.eq_tol < 0 or self.rank_tol_abs < 0:
            raise ValueError("tolerances must be nonnegative")

    def to_dict(self) -> dict:
        return {"rank_tol_rel": self.rank_tol_rel, "eq_tol": self.eq_tol,
                "rank_tol_abs": self.rank_tol_abs}


DEFAULT_TOL = ToleranceConfig()
_default_cfg = DEFAULT_TOL


def set_default_config(cfg: ToleranceConfig) -> None:
    """Install a process-wide default; meant to be called once at startup."""
    global _default_cfg
    _default_cfg = cfg


def default_config() -> ToleranceConfig:
    return _default_cfg


def _cfg(cfg):
    return _default_cfg if cfg is None else cfg


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        m, n = self.u.shape[0], self.v.shape[0]
        s = np.zeros((m, n))
        r = len(self.sigma)
        s[:r, :r] = np.diag(self.sigma)
        return self.u @ s @ self.v.conj().T


@dataclass(frozen=True)
class PredicateVerdict:
    """Boolean outcome plus the residuals that decided it."""

    holds: bool
    residuals: Mapping[str, float] = field(default_factory=dict)

    def __bool__(self):
        return bool(self.holds)

    def to_dict(self) -> dict:
        return {"holds": bool(self.holds),
                "residuals": {k: float(v) for k, v in self.residuals.items()}}


@dataclass(frozen=True)
class GinverseClass:
    satisfies_1: bool
    satisfies_2: bool
    satisfies_3: bool
    satisfies_4: bool
    residuals: Mapping[str, float] = field(default_factory=dict)

    def has(self, *eqs: int) -> bool:
        return all(getattr(self, f"satisfies_{k}") for k in eqs)

    @property
    def labels(self) -> tuple:
        return tuple(k for k in (1, 2, 3, 4) if getattr(self, f"satisfies_{k}"))

    def to_dict(self) -> dict:
        return {"satisfies": list(self.labels),
                "residuals": {k: float(v) for k, v in self.residuals.items()}}


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-D float64/complex128 array (vectors become columns)."""
    arr = np.asarray(a)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {arr.shape}")
    dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
    arr = arr.astype(dtype, copy=False)
    if not np.all(np.isfinite(arr)):
        raise NumericError("matrix has non-finite entries")
    return arr


def ctranspose(a) -> np.ndarray:
    return as_matrix(a).conj().T


def maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def rel_residual(lhs, rhs, *scale_from) -> float:
    """max|lhs - rhs| / (1 + largest max-abs among the operands)."""
    scale = max([maxabs(lhs), maxabs(rhs)] + [maxabs(s) for s in scale_from])
    return maxabs(np.asarray(lhs) - np.asarray(rhs)) / (1.0 + scale)


def matrices_equal(x, y, cfg=None) -> PredicateVerdict:
    cfg = _cfg(cfg)
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape:
        return PredicateVerdict(False, {"shape_mismatch": float("inf")})
    r = rel_residual(x, y)
    return PredicateVerdict(r <= cfg.eq_tol, {"residual": r})


def _require_square(a, what="matrix"):
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got {a.shape}")


# -- SVD ---------------------------------------------------------------------

def _complete_unitary(cols: np.ndarray, m: int, dtype) -> np.ndarray:
    r = cols.shape[1]
    if r == m:
        return cols
    basis = np.concatenate([cols, np.eye(m, dtype=dtype)], axis=1)
    q, _ = np.linalg.qr(basis)
    q = q[:, :m]
    # keep the given columns verbatim; QR may flip their sign or phase
    q[:, :r] = cols
    return q


def _jacobi_svd(a: np.ndarray, max_sweeps: int):
    m, n = a.shape
    work = a.copy()
    v = np.eye(n, dtype=a.dtype)
    complex_ = np.iscomplexobj(a)
    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap, aq = work[:, p], work[:, q]
                alpha = np.vdot(ap, ap).real
                beta = np.vdot(aq, aq).real
                gamma = np.vdot(ap, aq)
                g = abs(gamma)
                if g == 0.0 or g <= EPS * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g if complex_ else np.sign(gamma.real)
                zeta = (beta - alpha) / (2.0 * g)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                # rotate the pair after removing the phase of <a_p, a_q>
                bq = aq * np.conj(phase)
                new_p = c * ap - s * bq
                new_q = (s * ap + c * bq) * phase
                work[:, p], work[:, q] = new_p, new_q
                vp, vq = v[:, p].copy(), v[:, q] * np.conj(phase)
                v[:, p] = c * vp - s * vq
                v[:, q] = (s * vp + c * vq) * phase
        if not rotated:
            break
    else:
        raise SvdConvergenceError(max_sweeps)
    sigma = np.linalg.norm(work, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, work, v = sigma[order], work[:, order], v[:, order]
    smax = sigma[0] if n else 0.0
    keep = sigma > max(smax * EPS * max(m, n), np.finfo(float).tiny)
    cols = work[:, keep] / sigma[keep]
    u = _complete_unitary(cols, m, a.dtype)
    return u, sigma, v


def svd(a, cfg=None, method: str = "jacobi") -> SvdResult:
    """Full singular value decomposition ``a = u @ diag(sigma) @ v^H``.

    ``method="jacobi"`` runs the in-house one-sided Jacobi iteration (cap of
    ``100 * max(m, n)`` sweeps); ``method="lapack"`` defers to numpy.
    """
    a = as_matrix(a)
    m, n = a.shape
    if a.size == 0:
        return SvdResult(np.eye(m, dtype=a.dtype), np.zeros(0), np.eye(n, dtype=a.dtype))
    if method == "lapack":
        try:
            u, s, vh = np.linalg.svd(a)
        except np.linalg.LinAlgError as exc:
            raise NumericError(str(exc)) from exc
        return SvdResult(u, _finite_sigma(s), vh.conj().T)
    if method != "jacobi":
        raise ValueError(f"unknown SVD method {method!r}")
    if m >= n:
        u, s, v = _jacobi_svd(a, 100 * max(m, n))
    else:
        v, s, u = _jacobi_svd(a.conj().T, 100 * max(m, n))
    k = min(m, n)
    return SvdResult(u, _finite_sigma(s[:k]), v)


def _finite_sigma(s):
    # entries near the float limit can overflow inside the factorization
    if not np.all(np.isfinite(s)):
        raise NumericError("singular values overflowed; rescale the input")
    return s


def _threshold(sigma: np.ndarray, shape, cfg: ToleranceConfig) -> float:
    smax = float(sigma[0]) if sigma.size else 0.0
    return max(cfg.rank_tol_rel * smax * max(shape), cfg.rank_tol_abs)


# LAPACK is the default route for pinv/rank: campaigns call pinv tens of
# thousands of times.  The Jacobi route stays available and is tested as an
# independent check of the same contract.
PINV_SVD_METHOD = "lapack"


def singular_values(a, method=None) -> np.ndarray:
    a = as_matrix(a)
    if a.size == 0:
        return np.zeros(0)
    if (method or PINV_SVD_METHOD) == "lapack":
        try:
            return _finite_sigma(np.linalg.svd(a, compute_uv=False))
        except np.linalg.LinAlgError as exc:
            raise NumericError(str(exc)) from exc
    return svd(a, method="jacobi").sigma


def pinv(a, cfg=None, method=None) -> np.ndarray:
    """Moore-Penrose inverse via the SVD, dropping singular values at or below the rank threshold."""
    cfg = _cfg(cfg)
    a = as_matrix(a)
    m, n = a.shape
    if a.size == 0:
        return np.zeros((n, m), dtype=a.dtype)
    res = svd(a, cfg, method=method or PINV_SVD_METHOD)
    keep = res.sigma > _threshold(res.sigma, a.shape, cfg)
    r = int(keep.sum())
    if r == 0:
        return np.zeros((n, m), dtype=a.dtype)
    inv = 1.0 / res.sigma[:r]
    out = (res.v[:, :r] * inv) @ res.u[:, :r].conj().T
    return out.astype(a.dtype, copy=False)


def rank(a, cfg=None, method=None) -> int:
    cfg = _cfg(cfg)
    a = as_matrix(a)
    if a.size == 0:
        return 0
    s = singular_values(a, method)
    return int((s > _threshold(s, a.shape, cfg)).sum())


def penrose_residuals(a, g) -> dict:
    a, g = as_matrix(a), as_matrix(g)
    ag, ga = a @ g, g @ a
    return {
        "AGA=A": rel_residual(ag @ a, a, g),
        "GAG=G": rel_residual(ga @ g, g, a),
        "(AG)^H=AG": rel_residual(ag.conj().T, ag, a, g),
        "(GA)^H=GA": rel_residual(ga.conj().T, ga, a, g),
    }


def classify_ginverse(a, g, cfg=None) -> GinverseClass:
    """Which of the four Penrose equations ``g`` satisfies as an inverse of ``a``."""
    cfg = _cfg(cfg)
    a, g = as_matrix(a), as_matrix(g)
    if g.shape != (a.shape[1], a.shape[0]):
        raise DimensionError(f"g has shape {g.shape}, expected {(a.shape[1], a.shape[0])}")
    res = penrose_residuals(a, g)
    flags = [v <= cfg.eq_tol for v in res.values()]
    return GinverseClass(*flags, residuals=res)


# -- subspace predicates -------------------------------------------------------

def null_space_included(x, y, cfg=None) -> PredicateVerdict:
    """N(x) is contained in N(y), decided by ``y (I - x^+ x) = 0``."""
    cfg = _cfg(cfg)
    x, y = as_matrix(x), as_matrix(y)
    if x.shape[1] != y.shape[1]:
        raise DimensionError(f"column counts differ: {x.shape} vs {y.shape}")
    if y.size == 0 or x.shape[1] == 0:
        return PredicateVerdict(True, {"residual": 0.0})
    proj = np.eye(x.shape[1]) - pinv(x, cfg) @ x
    r = maxabs(y @ proj) / (1.0 + maxabs(y))
    return PredicateVerdict(r <= cfg.eq_tol, {"residual": r})


def range_included(x, y, cfg=None) -> PredicateVerdict:
    """R(x) is contained in R(y), decided by ``(I - y y^+) x = 0``."""
    cfg = _cfg(cfg)
    x, y = as_matrix(x), as_matrix(y)
    if x.shape[0] != y.shape[0]:
        raise DimensionError(f"row counts differ: {x.shape} vs {y.shape}")
    if x.size == 0 or x.shape[0] == 0:
        return PredicateVerdict(True, {"residual": 0.0})
    proj = np.eye(y.shape[0]) - y @ pinv(y, cfg)
    r = maxabs(proj @ x) / (1.0 + maxabs(x))
    return PredicateVerdict(r <= cfg.eq_tol, {"residual": r})


def is_range_hermitian(a, cfg=None) -> PredicateVerdict:
    cfg = _cfg(cfg)
    a = as_matrix(a)
    _require_square(a)
    ap = pinv(a, cfg)
    r = rel_residual(a @ ap, ap @ a)
    return PredicateVerdict(r <= cfg.eq_tol, {"residual": r})


def symmetric_part(a) -> np.ndarray:
    a = as_matrix(a)
    _require_square(a)
    return (a + a.conj().T) / 2


def is_almost_skew_hermitian(a, cfg=None) -> PredicateVerdict:
    cfg = _cfg(cfg)
    r = rank(symmetric_part(a), cfg)
    return PredicateVerdict(r == 1, {"rank_symmetric_part": float(r)})


def orth_null_space(a, cfg=None) -> np.ndarray:
    """Orthonormal basis of N(a) from the SVD (columns)."""
    cfg = _cfg(cfg)
    a = as_matrix(a)
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n, dtype=a.dtype)
    res = svd(a, cfg, method="lapack")
    r = int((res.sigma > _threshold(res.sigma, a.shape, cfg)).sum())
    return res.v[:, r:]


def orth_range(a, cfg=None) -> np.ndarray:
    cfg = _cfg(cfg)
    a = as_matrix(a)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=a.dtype)
    res = svd(a, cfg, method="lapack")
    r = int((res.sigma > _threshold(res.sigma, a.shape, cfg)).sum())
    return res.u[:, :r]
