"""Random partitioned matrices satisfying prescribed range / null-space constraints.

Every block is drawn with a bounded spectrum (nonzero singular values in
[0.5, 2]) so that ranks are unambiguous.  Constraints are imposed by
construction: ``B := A A^+ Z`` puts R(B) inside R(A), ``C := Z A^+ A`` puts
N(A) inside N(C), ``A := Q diag(K, 0) Q^H`` makes A range-Hermitian.  Each
instance is re-checked afterwards and redrawn on failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from typing import Optional

import numpy as np

from ..gppt import PartitionedMatrix, gppt_a, gppt_d, schur_complements
from ..numkern import (
    ToleranceConfig,
    _cfg,
    is_range_hermitian,
    null_space_included,
    pinv,
    range_included,
    rank,
    rel_residual,
    singular_values,
    symmetric_part,
)

BLOCK_CONSTRAINTS = frozenset({
    "null_A_in_C", "null_Astar_in_Bstar", "null_D_in_B", "null_Dstar_in_Cstar",
    "range_B_in_A", "range_Ct_in_At", "range_C_in_F", "range_Bt_in_Ft",
    "range_C_in_D", "range_Bt_in_Dt", "range_B_in_G", "range_Ct_in_Gt",
    "A_ep", "D_ep", "BplusCstar_in_rangeA", "CplusBstar_in_rangeD",
    # C A^+ A = D D^+ C and A A^+ B = B D^+ D, drawn in their general form
    # C = Pd Z Qa + (I - Pd) W (I - Qa), which need not satisfy any null-space inclusion
    "CApA_eq_DDpC", "AApB_eq_BDpD",
})

# Structured families for the inheritance theorems.  "M0_pd" builds
# M0 = L^T diag(A, F) L with A, F range-Hermitian and positive definite on
# their ranges, which makes M0 both P-dagger and R-dagger while keeping
# R(C) in R(F) and R(B^T) in R(F^T).  "gppt_a_pd" returns gppt(H, A_H) for
# such an H, so that gppt(M, A) = H.  The "_d" variants are block mirrors.
# "M_askew" draws M = K + s v v^H with K skew-Hermitian (almost skew-Hermitian M).
PROFILE_CONSTRAINTS = frozenset({"M0_pd", "gppt_a_pd", "M1_pd", "gppt_d_pd",
                                 "colrange_B_in_A", "M_askew"})

CONSTRAINTS = BLOCK_CONSTRAINTS | PROFILE_CONSTRAINTS


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    k: int
    field: str = "real"
    constraints: frozenset = dc_field(default_factory=frozenset)
    rank_a: Optional[int] = None
    rank_d: Optional[int] = None
    seed: int = 0
    min_gap: float = 1e-4
    max_retries: int = 100

    def __post_init__(self):
        object.__setattr__(self, "constraints", frozenset(self.constraints))
        unknown = self.constraints - CONSTRAINTS
        if unknown:
            raise ValueError(f"unknown constraints: {sorted(unknown)}")
        if self.field not in ("real", "complex"):
            raise ValueError("field must be 'real' or 'complex'")
        if not 0 <= self.k <= self.n or self.n < 1:
            raise ValueError(f"need 0 <= k <= n and n >= 1, got n={self.n}, k={self.k}")
        if self.rank_a is not None and not 0 <= self.rank_a <= self.k:
            raise ValueError("rank_a exceeds block size")
        if self.rank_d is not None and not 0 <= self.rank_d <= self.n - self.k:
            raise ValueError("rank_d exceeds block size")

    def with_seed(self, seed) -> "GeneratorSpec":
        return replace(self, seed=seed)


# -- primitive draws -----------------------------------------------------------

def _gauss(rng, shape, cplx):
    z = rng.standard_normal(shape)
    if cplx:
        z = z + 1j * rng.standard_normal(shape)
    return z


def _orthonormal(rng, m, r, cplx):
    if r == 0:
        return np.zeros((m, 0), dtype=complex if cplx else float)
    q, _ = np.linalg.qr(_gauss(rng, (m, r), cplx))
    return q


def _spectrum(rng, r):
    return rng.uniform(0.5, 2.0, size=r)


def random_block(rng, m, n, r=None, cplx=False):
    """m x n matrix of rank r with nonzero singular values in [0.5, 2]."""
    if r is None:
        r = int(rng.integers(0, min(m, n) + 1))
    u, v = _orthonormal(rng, m, r, cplx), _orthonormal(rng, n, r, cplx)
    return (u * _spectrum(rng, r)) @ v.conj().T


def random_ep(rng, n, r=None, cplx=False, pd_on_range=False, skew=1.0):
    """Range-Hermitian n x n matrix Q[:, :r] K Q[:, :r]^H of rank r.

    With ``pd_on_range`` the core K is (positive definite) + skew * (skew part),
    so x^H A x > 0 on R(A).
    """
    if r is None:
        r = int(rng.integers(0, n + 1))
    q = _orthonormal(rng, n, r, cplx)
    if pd_on_range:
        w = random_block(rng, r, r, r, cplx)
        s = w @ w.conj().T
        g = _gauss(rng, (r, r), cplx)
        core = s + skew * (g - g.conj().T) / 2
    else:
        core = random_block(rng, r, r, r, cplx)
    return q @ core @ q.conj().T


def _proj_range(x, cfg):
    return x @ pinv(x, cfg)


def _proj_row(x, cfg):
    return pinv(x, cfg) @ x


# -- constraint predicates -----------------------------------------------------

def _h(x):
    return x.conj().T


def constraint_checks(pm: PartitionedMatrix, cfg=None) -> dict:
    """Predicate for every block constraint, evaluated on ``pm``."""
    a, b, c, d = pm.blocks
    sc = schur_complements(pm, cfg)
    f, g = sc.f, sc.g
    return {
        "null_A_in_C": lambda: null_space_included(a, c, cfg),
        "null_Astar_in_Bstar": lambda: null_space_included(_h(a), _h(b), cfg),
        "null_D_in_B": lambda: null_space_included(d, b, cfg),
        "null_Dstar_in_Cstar": lambda: null_space_included(_h(d), _h(c), cfg),
        "range_B_in_A": lambda: range_included(b, a, cfg),
        "range_Ct_in_At": lambda: range_included(_h(c), _h(a), cfg),
        "range_C_in_F": lambda: range_included(c, f, cfg),
        "range_Bt_in_Ft": lambda: range_included(_h(b), _h(f), cfg),
        "range_C_in_D": lambda: range_included(c, d, cfg),
        "range_Bt_in_Dt": lambda: range_included(_h(b), _h(d), cfg),
        "range_B_in_G": lambda: range_included(b, g, cfg),
        "range_Ct_in_Gt": lambda: range_included(_h(c), _h(g), cfg),
        "A_ep": lambda: is_range_hermitian(a, cfg),
        "D_ep": lambda: is_range_hermitian(d, cfg),
        "BplusCstar_in_rangeA": lambda: range_included(b + _h(c), a, cfg),
        "CplusBstar_in_rangeD": lambda: range_included(c + _h(b), d, cfg),
        "CApA_eq_DDpC": lambda: _eq(c @ pinv(a, cfg) @ a, d @ pinv(d, cfg) @ c, c, cfg),
        "AApB_eq_BDpD": lambda: _eq(a @ pinv(a, cfg) @ b, b @ pinv(d, cfg) @ d, b, cfg),
        "M_askew": lambda: _askew(pm.m, cfg),
        "colrange_B_in_A": lambda: range_included(pm.m[:, pm.k:], pm.m[:, :pm.k], cfg),
    }


def _eq(x, y, scale, cfg):
    return rel_residual(x, y, scale) <= _cfg(cfg).eq_tol


def _askew(m, cfg):
    return rank(symmetric_part(m), cfg) == 1


def satisfies(pm: PartitionedMatrix, constraints, cfg=None) -> bool:
    checks = constraint_checks(pm, cfg)
    return all(bool(checks[name]()) for name in constraints if name in checks)


def well_separated(x, min_gap, cfg) -> bool:
    """No singular value sits between the rank threshold and ``min_gap * sigma_max``."""
    if x.size == 0:
        return True
    s = singular_values(x)
    smax = float(s[0])
    thr = max(cfg.rank_tol_rel * smax * max(x.shape), cfg.rank_tol_abs)
    live = s[s > thr]
    return bool(np.all(live >= min_gap * max(smax, 1.0)))


# -- builders ------------------------------------------------------------------

def _plain(rng, spec, cfg):
    n, k, cplx, cons = spec.n, spec.k, spec.field == "complex", spec.constraints
    nd = n - k
    a = (random_ep(rng, k, spec.rank_a, cplx) if "A_ep" in cons
         else random_block(rng, k, k, spec.rank_a, cplx))
    d = (random_ep(rng, nd, spec.rank_d, cplx) if "D_ep" in cons
         else random_block(rng, nd, nd, spec.rank_d, cplx))
    b = random_block(rng, k, nd, None, cplx)
    c = random_block(rng, nd, k, None, cplx)

    if cons & {"null_A_in_C", "range_Ct_in_At"}:
        c = c @ _proj_row(a, cfg)
    if cons & {"null_Dstar_in_Cstar", "range_C_in_D"}:
        c = _proj_range(d, cfg) @ c
    if cons & {"null_Astar_in_Bstar", "range_B_in_A"}:
        b = _proj_range(a, cfg) @ b
    if cons & {"null_D_in_B", "range_Bt_in_Dt"}:
        b = b @ _proj_row(d, cfg)
    if "CApA_eq_DDpC" in cons:
        pd, qa = _proj_range(d, cfg), _proj_row(a, cfg)
        c = pd @ c @ qa + (np.eye(nd) - pd) @ random_block(rng, nd, k, None, cplx) @ (np.eye(k) - qa)
    if "AApB_eq_BDpD" in cons:
        pa, qd = _proj_range(a, cfg), _proj_row(d, cfg)
        b = pa @ b @ qd + (np.eye(k) - pa) @ random_block(rng, k, nd, None, cplx) @ (np.eye(nd) - qd)
    if "BplusCstar_in_rangeA" in cons:
        b = _proj_range(a, cfg) @ random_block(rng, k, nd, None, cplx) - _h(c)
    if "CplusBstar_in_rangeD" in cons:
        c = _proj_range(d, cfg) @ random_block(rng, nd, k, None, cplx) - _h(b)
    return a, b, c, d


def _schur_based(rng, spec, cfg):
    """Draw A and F = D - C A^+ B directly, then set D = F + C A^+ B."""
    n, k, cplx, cons = spec.n, spec.k, spec.field == "complex", spec.constraints
    nd = n - k
    a = (random_ep(rng, k, spec.rank_a, cplx) if "A_ep" in cons
         else random_block(rng, k, k, spec.rank_a, cplx))
    f = random_block(rng, nd, nd, None, cplx)
    b = random_block(rng, k, nd, None, cplx)
    c = random_block(rng, nd, k, None, cplx)
    if cons & {"null_A_in_C", "range_Ct_in_At"}:
        c = c @ _proj_row(a, cfg)
    if cons & {"null_Astar_in_Bstar", "range_B_in_A"}:
        b = _proj_range(a, cfg) @ b
    if "range_C_in_F" in cons:
        c = _proj_range(f, cfg) @ c
    if "range_Bt_in_Ft" in cons:
        b = b @ _proj_row(f, cfg)
    d = f + c @ pinv(a, cfg) @ b
    return a, b, c, d


def _swap(a, b, c, d):
    """Block mirror: [[A, B], [C, D]] -> [[D, C], [B, A]]."""
    return d, c, b, a


_MIRROR = {
    "null_A_in_C": "null_D_in_B", "null_Astar_in_Bstar": "null_Dstar_in_Cstar",
    "range_B_in_A": "range_C_in_D", "range_Ct_in_At": "range_Bt_in_Dt",
    "range_C_in_F": "range_B_in_G", "range_Bt_in_Ft": "range_Ct_in_Gt",
    "A_ep": "D_ep", "BplusCstar_in_rangeA": "CplusBstar_in_rangeD",
}
_MIRROR.update({v: k for k, v in _MIRROR.items()})


def _pd_congruence(rng, k, nd, cplx, cfg, *, off_range=True, skew=1.0):
    """M0 = [[A, A X], [X^H A, X^H A X + F]] plus parts of B, C that M0 discards."""
    ra = int(rng.integers(0, k + 1))
    rf = int(rng.integers(0, nd + 1))
    a = random_ep(rng, k, ra, cplx, pd_on_range=True, skew=skew)
    f = random_ep(rng, nd, rf, cplx, pd_on_range=True, skew=skew)
    pa, pf = _proj_range(a, cfg), _proj_range(f, cfg)
    x = _gauss(rng, (k, nd), cplx) @ pf
    b = a @ x
    c = _h(x) @ a
    if off_range:
        ia = np.eye(k) - pa
        b = b + ia @ _gauss(rng, (k, nd), cplx) @ pf
        c = c + pf @ _gauss(rng, (nd, k), cplx) @ ia
    d = _h(x) @ a @ x + f
    return a, b, c, d


def _profile(rng, spec, cfg):
    n, k, cplx, cons = spec.n, spec.k, spec.field == "complex", spec.constraints
    nd = n - k
    skew = float(rng.choice([0.0, 1.0]))
    if cons & {"M0_pd", "gppt_a_pd"}:
        if "gppt_a_pd" in cons:
            h = PartitionedMatrix.from_blocks(*_pd_congruence(rng, k, nd, cplx, cfg, off_range=False, skew=skew))
            from ..gppt import gppt_a
            return gppt_a(h, cfg).blocks
        return _pd_congruence(rng, k, nd, cplx, cfg, skew=skew)
    # D-side: build the A-side instance on the swapped sizes, then mirror
    if "gppt_d_pd" in cons:
        h = PartitionedMatrix.from_blocks(*_pd_congruence(rng, nd, k, cplx, cfg, off_range=False, skew=skew))
        from ..gppt import gppt_a
        return _swap(*gppt_a(h, cfg).blocks)
    return _swap(*_pd_congruence(rng, nd, k, cplx, cfg, skew=skew))


def _almost_skew(rng, spec, cfg):
    n, cplx = spec.n, spec.field == "complex"
    g = _gauss(rng, (n, n), cplx)
    v = _gauss(rng, (n, 1), cplx)
    m = (g - _h(g)) / 2 + float(rng.choice([-1.0, 1.0])) * (v @ _h(v)) / n
    return PartitionedMatrix(m, spec.k).blocks


def _column_range(rng, spec, cfg):
    """Whole-matrix column split M = (A | A W): R(B) inside R(A) for the column blocks."""
    n, r, cplx = spec.n, spec.k, spec.field == "complex"
    rk = int(rng.integers(1, r + 1)) if r else 0
    left = random_block(rng, n, r, rk, cplx)
    right = left @ _gauss(rng, (r, n - r), cplx)
    m = np.concatenate([left, right], axis=1)
    return PartitionedMatrix(m, r).blocks


def generate(spec: GeneratorSpec, cfg: ToleranceConfig = None) -> PartitionedMatrix:
    """Deterministic (given ``spec.seed``) instance satisfying every requested constraint."""
    cfg = _cfg(cfg)
    rng = np.random.default_rng(spec.seed)
    cons = spec.constraints
    if cons & {"M0_pd", "gppt_a_pd", "M1_pd", "gppt_d_pd"}:
        builder = _profile
    elif "M_askew" in cons:
        builder = _almost_skew
    elif "colrange_B_in_A" in cons:
        builder = _column_range
    elif cons & {"range_C_in_F", "range_Bt_in_Ft"}:
        builder = _schur_based
    elif cons & {"range_B_in_G", "range_Ct_in_Gt"}:
        builder = _mirrored_schur_based
    else:
        builder = _plain
    for _ in range(spec.max_retries):
        blocks = builder(rng, spec, cfg)
        pm = PartitionedMatrix.from_blocks(*blocks)
        if not satisfies(pm, cons, cfg):
            continue
        sc = schur_complements(pm, cfg)
        # the transforms get pseudo-inverted by several checkers, so they need the gap too
        mats = (pm.m, pm.a, pm.d, sc.f, sc.g, gppt_a(pm, cfg).m, gppt_d(pm, cfg).m)
        if all(well_separated(x, spec.min_gap, cfg) for x in mats):
            return pm
    raise GenerationError(
        f"no instance satisfying {sorted(cons)} after {spec.max_retries} draws (n={spec.n}, k={spec.k})")


def _mirrored_schur_based(rng, spec, cfg):
    mspec = replace(spec, k=spec.n - spec.k, rank_a=spec.rank_d, rank_d=spec.rank_a,
                    constraints=frozenset(_MIRROR.get(c, c) for c in spec.constraints))
    return _swap(*_schur_based(rng, mspec, cfg))

