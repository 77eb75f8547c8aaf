"""P-dagger / R-dagger classification and complementary-support LCP enumeration.

Both matrix classes quantify over the row space R(M^T) of a real square M:

* P-dagger: every nonzero x in R(M^T) has some i with x_i (Mx)_i > 0.
* R-dagger: the only x in R(M^T) with x >= 0, Mx >= 0, x^T M x = 0 is x = 0.

The exact procedures split the search space into finitely many polyhedral
cones (sign orthants for P-dagger, complementary supports for R-dagger) and
ask the phase-one simplex whether any cone holds a normalized nonzero point.
Row-space membership enters as the linear constraint (I - M^+ M) x = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..gppt import PartitionedMatrix
from ..numkern import DimensionError, as_matrix, maxabs, pinv, rank, _cfg
from .simplex import find_feasible

DEFAULT_SIZE_CAP = 8


class SizeCapError(ValueError):
    def __init__(self, n, cap):
        super().__init__(f"exact enumeration limited to n <= {cap}, got n = {n}")
        self.n = n
        self.cap = cap


class Method(str, Enum):
    exact_enumeration = "exact_enumeration"
    randomized_falsifier = "randomized_falsifier"


@dataclass(frozen=True)
class ClassVerdict:
    is_member: bool
    witness: Optional[np.ndarray]
    method: Method
    residuals: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.is_member)

    def to_dict(self) -> dict:
        return {
            "is_member": bool(self.is_member),
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "method": self.method.value,
            "residuals": {k: (float(v) if np.isscalar(v) else [float(t) for t in v])
                          for k, v in self.residuals.items()},
        }


@dataclass(frozen=True)
class LcpInstance:
    q_matrix: np.ndarray
    q_vector: np.ndarray

    def __post_init__(self):
        qm = _real_square(self.q_matrix)
        qv = np.asarray(self.q_vector, dtype=float).ravel()
        if qv.shape[0] != qm.shape[0]:
            raise DimensionError(f"q has length {qv.shape[0]}, matrix is {qm.shape}")
        if not np.all(np.isfinite(qv)):
            raise ValueError("q has non-finite entries")
        object.__setattr__(self, "q_matrix", qm)
        object.__setattr__(self, "q_vector", qv)


def _real_square(m) -> np.ndarray:
    m = as_matrix(m)
    if np.iscomplexobj(m):
        if np.abs(m.imag).max(initial=0.0) > 0:
            raise ValueError("cone classifiers need a real matrix")
        m = m.real.copy()
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix must be square, got {m.shape}")
    return m


def restricted_row_space_projector(m, cfg=None) -> np.ndarray:
    """M^+ M, the orthogonal projector onto R(M^T)."""
    m = _real_square(m)
    return pinv(m, cfg) @ m


def _slack(cfg) -> float:
    # Constraint slack used inside the LPs; the boundary value 0 counts as a
    # violation, so a little slack keeps rounding from hiding witnesses.
    return cfg.eq_tol


def p_dagger_violation(m, x, cfg=None) -> dict:
    """Independent re-check of a P-dagger witness: row-space residual and the products x_i (Mx)_i."""
    cfg = _cfg(cfg)
    m = _real_square(m)
    x = np.asarray(x, dtype=float).ravel()
    proj = restricted_row_space_projector(m, cfg)
    xs = max(np.abs(x).max(initial=0.0), 1e-300)
    products = x * (m @ x)
    return {
        "row_space_residual": maxabs(x - proj @ x) / xs,
        "products": products,
        "max_product": float(products.max()) / max(maxabs(m) * xs * xs, 1e-300),
    }


def is_p_dagger_witness(m, x, cfg=None, slack=10.0) -> bool:
    cfg = _cfg(cfg)
    x = np.asarray(x, dtype=float).ravel()
    if not np.any(x) or not np.all(np.isfinite(x)):
        return False
    v = p_dagger_violation(m, x, cfg)
    return v["row_space_residual"] <= slack * cfg.eq_tol and v["max_product"] <= slack * cfg.eq_tol


def is_p_dagger(m, cfg=None, mode: str = "exact", *, size_cap: int = DEFAULT_SIZE_CAP,
                samples: int = 2000, seed=0) -> ClassVerdict:
    """Decide P-dagger membership.

    ``mode="exact"`` enumerates sign orthants; for each orthant s (up to the
    global sign flip x -> -x) it asks for u >= 0 with x = s*u, sum(u) = 1,
    x in R(M^T), s_i (Mx)_i <= 0.  A feasible point is a violating witness.
    ``mode="randomized"`` samples the row-space sphere and refines locally;
    it can refute membership but never prove it.
    """
    cfg = _cfg(cfg)
    m = _real_square(m)
    if mode == "randomized":
        return _p_dagger_randomized(m, cfg, samples, seed)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    n = m.shape[0]
    if n > size_cap:
        raise SizeCapError(n, size_cap)
    if n == 0 or rank(m, cfg) == 0:
        return ClassVerdict(True, None, Method.exact_enumeration, {"orthants_checked": 0})
    mn = m / maxabs(m)
    null_proj = np.eye(n) - restricted_row_space_projector(mn, cfg)
    tau = _slack(cfg)
    checked = 0
    for tail in itertools.product((1.0, -1.0), repeat=n - 1):
        s = np.array((1.0,) + tail)
        checked += 1
        ns = null_proj * s
        a_ub = np.vstack([ns, -ns, (s[:, None] * mn) * s])
        b_ub = np.full(3 * n, tau)
        u = find_feasible(n, a_ub, b_ub, np.ones((1, n)), [1.0])
        if u is None:
            continue
        x = _polish(m, s, a_ub, s * u, cfg)
        if is_p_dagger_witness(m, x, cfg):
            res = p_dagger_violation(m, x, cfg)
            return ClassVerdict(False, x, Method.exact_enumeration,
                                {"orthants_checked": checked, **res})
    return ClassVerdict(True, None, Method.exact_enumeration, {"orthants_checked": checked})


def _polish(m, s, a_ub, x, cfg):
    """Tighten an LP witness: retry the orthant with zero slack, then project onto R(M^T)."""
    n = len(s)
    u0 = find_feasible(n, a_ub, np.zeros(a_ub.shape[0]), np.ones((1, n)), [1.0])
    if u0 is not None:
        x = s * u0
    y = restricted_row_space_projector(m, cfg) @ x
    y = y / np.abs(y).max()
    return y if is_p_dagger_witness(m, y, cfg) else x


def _row_space_basis(m, cfg):
    u, s, vh = np.linalg.svd(m)
    thr = max(cfg.rank_tol_rel * s[0] * m.shape[0], cfg.rank_tol_abs) if s.size else 0
    r = int((s > thr).sum())
    return vh[:r].T


def _p_dagger_randomized(m, cfg, samples, seed) -> ClassVerdict:
    from scipy.optimize import minimize

    basis = _row_space_basis(m, cfg)
    r = basis.shape[1]
    if r == 0:
        return ClassVerdict(True, None, Method.randomized_falsifier, {"samples": 0})
    rng = np.random.default_rng(seed)
    mn = m / maxabs(m)

    def score(z):
        x = basis @ z
        x = x / np.abs(x).max()
        return float(np.max(x * (mn @ x)))

    z = rng.standard_normal((samples, r))
    xs = z @ basis.T
    xs /= np.abs(xs).max(axis=1, keepdims=True)
    vals = np.max(xs * (xs @ mn.T), axis=1)
    order = np.argsort(vals)
    tau = 10 * cfg.eq_tol
    for idx in order[: min(8, samples)]:
        if vals[idx] <= tau:
            best = z[idx]
        else:
            opt = minimize(score, z[idx], method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 400 * r})
            best = opt.x
        if score(best) <= tau:
            x = basis @ best
            x = x / np.abs(x).max()
            if is_p_dagger_witness(m, x, cfg):
                return ClassVerdict(False, x, Method.randomized_falsifier,
                                    {"samples": samples, **p_dagger_violation(m, x, cfg)})
    return ClassVerdict(True, None, Method.randomized_falsifier,
                        {"samples": samples, "best_score": float(vals[order[0]])})


def r_dagger_violation(m, x, cfg=None) -> dict:
    cfg = _cfg(cfg)
    m = _real_square(m)
    x = np.asarray(x, dtype=float).ravel()
    proj = restricted_row_space_projector(m, cfg)
    xs = max(np.abs(x).max(initial=0.0), 1e-300)
    y = m @ x / (maxabs(m) * xs)
    xn = x / xs
    return {
        "row_space_residual": maxabs(x - proj @ x) / xs,
        "min_x": float(xn.min()),
        "min_mx": float(y.min()),
        "complementarity": float(abs(xn @ y)),
    }


def is_r_dagger_witness(m, x, cfg=None, slack=10.0) -> bool:
    cfg = _cfg(cfg)
    x = np.asarray(x, dtype=float).ravel()
    if not np.any(x) or not np.all(np.isfinite(x)):
        return False
    v = r_dagger_violation(m, x, cfg)
    t = slack * cfg.eq_tol
    return (v["row_space_residual"] <= t and v["min_x"] >= -t and v["min_mx"] >= -t
            and v["complementarity"] <= t * len(x))


def is_r_dagger(m, cfg=None, *, size_cap: int = DEFAULT_SIZE_CAP) -> ClassVerdict:
    """Decide R-dagger membership by complementary-support enumeration.

    For each nonempty support alpha: x_i = 0 off alpha, (Mx)_i = 0 on alpha,
    Mx >= 0, x in R(M^T), sum(x_alpha) = 1.  Any feasible point is a witness.
    """
    cfg = _cfg(cfg)
    m = _real_square(m)
    n = m.shape[0]
    if n > size_cap:
        raise SizeCapError(n, size_cap)
    if n == 0 or rank(m, cfg) == 0:
        return ClassVerdict(True, None, Method.exact_enumeration, {"supports_checked": 0})
    mn = m / maxabs(m)
    null_proj = np.eye(n) - restricted_row_space_projector(mn, cfg)
    tau = _slack(cfg)
    checked = 0
    for size in range(1, n + 1):
        for alpha in itertools.combinations(range(n), size):
            checked += 1
            al = list(alpha)
            off = [i for i in range(n) if i not in alpha]
            cols_m = mn[:, al]
            np_ = null_proj[:, al]
            a_ub = np.vstack([np_, -np_, cols_m[al], -cols_m[al], -cols_m[off]])
            b_ub = np.full(a_ub.shape[0], tau)
            u = find_feasible(size, a_ub, b_ub, np.ones((1, size)), [1.0])
            if u is None:
                continue
            x = np.zeros(n)
            x[al] = u
            if is_r_dagger_witness(m, x, cfg):
                return ClassVerdict(False, x, Method.exact_enumeration,
                                    {"supports_checked": checked, **r_dagger_violation(m, x, cfg)})
    return ClassVerdict(True, None, Method.exact_enumeration, {"supports_checked": checked})


def solve_lcp_enumerate(inst: LcpInstance, cfg=None, *, size_cap: int = DEFAULT_SIZE_CAP,
                        row_space: bool = False) -> list[np.ndarray]:
    """One representative solution of LCP(Q, q) per feasible complementary support.

    ``row_space=True`` additionally restricts x to R(Q^T).  Representatives
    that coincide within tolerance are reported once.
    """
    cfg = _cfg(cfg)
    qm, qv = inst.q_matrix, inst.q_vector
    n = qm.shape[0]
    if n > size_cap:
        raise SizeCapError(n, size_cap)
    null_proj = np.eye(n) - restricted_row_space_projector(qm, cfg) if row_space else None
    found: list[np.ndarray] = []
    for size in range(0, n + 1):
        for alpha in itertools.combinations(range(n), size):
            al = list(alpha)
            off = [i for i in range(n) if i not in alpha]
            a_eq = qm[np.ix_(al, al)] if size else np.zeros((0, 0))
            b_eq = -qv[al]
            a_ub = -qm[np.ix_(off, al)]
            b_ub = qv[off]
            if size == 0:
                if np.all(qv >= -cfg.eq_tol * (1 + maxabs(qv))):
                    x = np.zeros(n)
                else:
                    continue
            else:
                eq_rows, eq_rhs = [a_eq], [b_eq]
                if null_proj is not None:
                    eq_rows.append(null_proj[:, al])
                    eq_rhs.append(np.zeros(n))
                u = find_feasible(size, a_ub, b_ub, np.vstack(eq_rows), np.concatenate(eq_rhs))
                if u is None:
                    continue
                x = np.zeros(n)
                x[al] = u
            if not any(np.abs(x - f).max() <= 1e3 * cfg.eq_tol * (1 + np.abs(f).max()) for f in found):
                found.append(x)
    return found


def is_lcp_solution(inst: LcpInstance, x, tol=1e-8) -> bool:
    x = np.asarray(x, dtype=float).ravel()
    y = inst.q_matrix @ x + inst.q_vector
    scale = 1 + maxabs(inst.q_matrix) * np.abs(x).max(initial=0) + maxabs(inst.q_vector)
    return bool(x.min(initial=0) >= -tol * scale and y.min(initial=0) >= -tol * scale
                and abs(x @ y) <= tol * scale * max(1, np.abs(x).max(initial=0)))


def build_m0(pm: PartitionedMatrix, cfg=None) -> np.ndarray:
    """[[A, A A^+ B], [C A^+ A, D]]."""
    a, b, c, d = pm.blocks
    ap = pinv(a, cfg)
    return np.block([[a, a @ ap @ b], [c @ ap @ a, d]])


def build_m1(pm: PartitionedMatrix, cfg=None) -> np.ndarray:
    """[[A, B D^+ D], [D D^+ C, D]]."""
    a, b, c, d = pm.blocks
    dp = pinv(d, cfg)
    return np.block([[a, b @ dp @ d], [d @ dp @ c, d]])
