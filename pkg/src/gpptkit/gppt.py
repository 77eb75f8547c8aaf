"""Generalized principal pivot transforms of 2x2 block-partitioned matrices.

A square ``n x n`` matrix ``M`` split at index ``k`` has blocks

    A = M[:k, :k]   B = M[:k, k:]
    C = M[k:, :k]   D = M[k:, k:]

and ``k`` may be 0 or n (empty blocks are legal).  The transforms replace a
principal block by its Moore-Penrose inverse:

    gppt(M, A) = [[A^+, -A^+ B], [C A^+, D - C A^+ B]]
    gppt(M, D) = [[A - B D^+ C, B D^+], [-D^+ C, D^+]]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numkern import (
    DimensionError,
    GinverseClass,
    PredicateVerdict,
    as_matrix,
    classify_ginverse,
    is_range_hermitian,
    matrices_equal,
    null_space_included,
    pinv,
    range_included,
    rank,
    rel_residual,
    symmetric_part,
    _cfg,
)


class ConditionViolation(ValueError):
    """Raised when an operation's range/null-space preconditions fail."""

    def __init__(self, failed: list[str], residuals: dict):
        super().__init__("violated: " + ", ".join(failed))
        self.failed = failed
        self.residuals = residuals


@dataclass(frozen=True, eq=False)
class PartitionedMatrix:
    m: np.ndarray
    k: int

    def __post_init__(self):
        m = as_matrix(self.m).copy()
        n = m.shape[0]
        if m.shape[1] != n:
            raise DimensionError(f"partitioned matrix must be square, got {m.shape}")
        k = int(self.k)
        if not 0 <= k <= n:
            raise DimensionError(f"split index {k} outside [0, {n}]")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_blocks(cls, a, b, c, d) -> "PartitionedMatrix":
        a, b, c, d = (np.atleast_2d(np.asarray(x)) for x in (a, b, c, d))
        return cls(np.block([[a, b], [c, d]]), a.shape[0])

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def a(self):
        return self.m[: self.k, : self.k]

    @property
    def b(self):
        return self.m[: self.k, self.k:]

    @property
    def c(self):
        return self.m[self.k:, : self.k]

    @property
    def d(self):
        return self.m[self.k:, self.k:]

    @property
    def blocks(self):
        return self.a, self.b, self.c, self.d

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.m)

    def __repr__(self):
        return f"PartitionedMatrix(n={self.n}, k={self.k})"


def _assemble(a, b, c, d, k) -> PartitionedMatrix:
    n = a.shape[0] + d.shape[0]
    dtype = np.result_type(a, b, c, d)
    out = np.zeros((n, n), dtype=dtype)
    out[:k, :k], out[:k, k:], out[k:, :k], out[k:, k:] = a, b, c, d
    return PartitionedMatrix(out, k)


@dataclass(frozen=True)
class SchurPair:
    f: np.ndarray
    g: np.ndarray


def schur_complements(pm: PartitionedMatrix, cfg=None) -> SchurPair:
    a, b, c, d = pm.blocks
    return SchurPair(f=d - c @ pinv(a, cfg) @ b, g=a - b @ pinv(d, cfg) @ c)


def gppt_a(pm: PartitionedMatrix, cfg=None) -> PartitionedMatrix:
    a, b, c, d = pm.blocks
    ap = pinv(a, cfg)
    return _assemble(ap, -ap @ b, c @ ap, d - c @ ap @ b, pm.k)


def gppt_d(pm: PartitionedMatrix, cfg=None) -> PartitionedMatrix:
    a, b, c, d = pm.blocks
    dp = pinv(d, cfg)
    return _assemble(a - b @ dp @ c, b @ dp, -dp @ c, dp, pm.k)


def gppt_dagger_equals_complement(pm: PartitionedMatrix, cfg=None) -> PredicateVerdict:
    """Decide gppt(M,A)^+ == gppt(M,D) through ``C A^+ A = D D^+ C`` and ``A A^+ B = B D^+ D``."""
    cfg = _cfg(cfg)
    a, b, c, d = pm.blocks
    ap, dp = pinv(a, cfg), pinv(d, cfg)
    r1 = rel_residual(c @ ap @ a, d @ dp @ c, c)
    r2 = rel_residual(a @ ap @ b, b @ dp @ d, b)
    return PredicateVerdict(r1 <= cfg.eq_tol and r2 <= cfg.eq_tol,
                            {"CA+A-DD+C": r1, "AA+B-BD+D": r2})


def null_space_conditions(pm: PartitionedMatrix, cfg=None) -> dict[str, PredicateVerdict]:
    """The four inclusions N(A)<N(D*C), N(A*)<N(DB*), N(D)<N(A*B), N(D*)<N(AC*)."""
    a, b, c, d = pm.blocks
    h = lambda x: x.conj().T  # noqa: E731
    return {
        "N(A)<N(D*C)": null_space_included(a, h(d) @ c, cfg),
        "N(A*)<N(DB*)": null_space_included(h(a), d @ h(b), cfg),
        "N(D)<N(A*B)": null_space_included(d, h(a) @ b, cfg),
        "N(D*)<N(AC*)": null_space_included(h(d), a @ h(c), cfg),
    }


def involution_conditions_a(pm, cfg=None) -> dict[str, PredicateVerdict]:
    a, b, c, _ = pm.blocks
    return {"N(A)<N(C)": null_space_included(a, c, cfg),
            "N(A*)<N(B*)": null_space_included(a.conj().T, b.conj().T, cfg)}


def involution_conditions_d(pm, cfg=None) -> dict[str, PredicateVerdict]:
    _, b, c, d = pm.blocks
    return {"N(D)<N(B)": null_space_included(d, b, cfg),
            "N(D*)<N(C*)": null_space_included(d.conj().T, c.conj().T, cfg)}


def double_gppt_a(pm: PartitionedMatrix, cfg=None) -> PartitionedMatrix:
    """gppt(gppt(M, A), A^+), evaluated literally: both pivots go through pinv."""
    return gppt_a(gppt_a(pm, cfg), cfg)


def double_gppt_d(pm: PartitionedMatrix, cfg=None) -> PartitionedMatrix:
    return gppt_d(gppt_d(pm, cfg), cfg)


def mp_conditions(pm: PartitionedMatrix, use_a_side: bool = True, cfg=None) -> dict[str, PredicateVerdict]:
    a, b, c, d = pm.blocks
    sc = schur_complements(pm, cfg)
    h = lambda x: x.conj().T  # noqa: E731
    if use_a_side:
        f = sc.f
        return {
            **involution_conditions_a(pm, cfg),
            "N(F)<N(B)": null_space_included(f, b, cfg),
            "N(F*)<N(C*)": null_space_included(h(f), h(c), cfg),
        }
    e = sc.g
    return {
        **involution_conditions_d(pm, cfg),
        "N(E)<N(C)": null_space_included(e, c, cfg),
        "N(E*)<N(B*)": null_space_included(h(e), h(b), cfg),
    }


def moore_penrose_via_gppt(pm: PartitionedMatrix, use_a_side: bool = True, cfg=None,
                           force: bool = False) -> np.ndarray:
    """M^+ as gppt(P, F) with P = gppt(M, A), or gppt(Q, E) with Q = gppt(M, D).

    F is the trailing block of P, so gppt(P, F) pivots on P's D-block; E is the
    leading block of Q.  Raises ``ConditionViolation`` when the null-space
    conditions fail unless ``force`` is set, in which case the raw transform
    is returned without any guarantee.
    """
    conds = mp_conditions(pm, use_a_side, cfg)
    failed = [name for name, v in conds.items() if not v]
    if failed and not force:
        raise ConditionViolation(failed, {k: v.residuals["residual"] for k, v in conds.items()})
    if use_a_side:
        return gppt_d(gppt_a(pm, cfg), cfg).m
    return gppt_a(gppt_d(pm, cfg), cfg).m


@dataclass(frozen=True)
class Factorization:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    zhat: np.ndarray
    z_class: GinverseClass
    zhat_class: GinverseClass
    yz_is_p: PredicateVerdict
    xzhat_is_q: PredicateVerdict


def gppt_factorization(pm: PartitionedMatrix, cfg=None) -> Factorization:
    """Build X=[[A,B],[0,I]], Y=[[I,0],[C,D]], Z=[[A+,-A+B],[0,I]], Zhat=[[I,0],[-D+C,D+]].

    Z is classified as a generalized inverse of X and Zhat of Y; the products
    YZ and X Zhat are compared with gppt(M, A) and gppt(M, D).
    """
    cfg = _cfg(cfg)
    a, b, c, d = pm.blocks
    k, n = pm.k, pm.n
    dtype = pm.m.dtype
    ia, id_ = np.eye(k, dtype=dtype), np.eye(n - k, dtype=dtype)
    zb, zc = np.zeros_like(b), np.zeros_like(c)
    ap, dp = pinv(a, cfg), pinv(d, cfg)
    x = np.block([[a, b], [zc, id_]])
    y = np.block([[ia, zb], [c, d]])
    z = np.block([[ap, -ap @ b], [zc, id_]])
    zhat = np.block([[ia, zb], [-dp @ c, dp]])
    return Factorization(
        x=x, y=y, z=z, zhat=zhat,
        z_class=classify_ginverse(x, z, cfg),
        zhat_class=classify_ginverse(y, zhat, cfg),
        yz_is_p=matrices_equal(y @ z, gppt_a(pm, cfg).m, cfg),
        xzhat_is_q=matrices_equal(x @ zhat, gppt_d(pm, cfg).m, cfg),
    )


@dataclass(frozen=True)
class RankSymRecord:
    hypotheses_hold: bool
    rank_m: int
    rank_p: int
    hypotheses: dict

    @property
    def ranks_equal(self) -> bool:
        return self.rank_m == self.rank_p


def rank_sym_preserved_a(pm: PartitionedMatrix, cfg=None) -> RankSymRecord:
    a, b, c, _ = pm.blocks
    hyp = {"A EP": is_range_hermitian(a, cfg),
           "R(B+C*)<R(A)": range_included(b + c.conj().T, a, cfg)}
    p = gppt_a(pm, cfg).m
    return RankSymRecord(all(hyp.values()), rank(symmetric_part(pm.m), cfg),
                         rank(symmetric_part(p), cfg), hyp)


def rank_sym_preserved_d(pm: PartitionedMatrix, cfg=None) -> RankSymRecord:
    _, b, c, d = pm.blocks
    hyp = {"D EP": is_range_hermitian(d, cfg),
           "R(C+B*)<R(D)": range_included(c + b.conj().T, d, cfg)}
    q = gppt_d(pm, cfg).m
    return RankSymRecord(all(hyp.values()), rank(symmetric_part(pm.m), cfg),
                         rank(symmetric_part(q), cfg), hyp)


@dataclass(frozen=True)
class EpRecord:
    conditions_hold: bool
    p_ep: PredicateVerdict
    q_ep: PredicateVerdict
    a_ep: PredicateVerdict
    d_ep: PredicateVerdict

    @property
    def equivalence_holds(self) -> bool:
        return bool(self.p_ep) == bool(self.q_ep) == (bool(self.a_ep) and bool(self.d_ep))


def ep_equivalence_check(pm: PartitionedMatrix, cfg=None) -> EpRecord:
    cond = gppt_dagger_equals_complement(pm, cfg)
    return EpRecord(
        conditions_hold=bool(cond),
        p_ep=is_range_hermitian(gppt_a(pm, cfg).m, cfg),
        q_ep=is_range_hermitian(gppt_d(pm, cfg).m, cfg),
        a_ep=is_range_hermitian(pm.a, cfg),
        d_ep=is_range_hermitian(pm.d, cfg),
    )


@dataclass(frozen=True)
class ExchangeRecord:
    y1: np.ndarray
    y2: np.ndarray
    forward_ok: PredicateVerdict
    backward_ok: PredicateVerdict
    backward_applicable: bool


def _vec(x, length, name):
    x = as_matrix(x)
    if x.shape != (length, 1):
        raise DimensionError(f"{name} must have length {length}, got shape {x.shape}")
    return x


def domain_range_exchange_a(pm: PartitionedMatrix, x1, x2, cfg=None) -> ExchangeRecord:
    """Domain-range exchange through gppt(M, A).

    Forward: with (y1; y2) = M (A^+A x1; x2), check gppt(M,A)(y1; x2) = (A^+A x1; y2).
    Backward: start from y1' = A x1 in R(A), set (u; y2') = gppt(M,A)(y1'; x2) and
    check M (u; x2) = (y1'; y2').  The backward statement needs R(B) in R(A);
    ``backward_applicable`` reports whether that holds.
    """
    cfg = _cfg(cfg)
    a, b, c, d = pm.blocks
    k, n = pm.k, pm.n
    x1, x2 = _vec(x1, k, "x1"), _vec(x2, n - k, "x2")
    ap = pinv(a, cfg)
    p = gppt_a(pm, cfg).m
    xa = ap @ a @ x1
    y = pm.m @ np.vstack([xa, x2])
    y1, y2 = y[:k], y[k:]
    lhs = p @ np.vstack([y1, x2])
    fwd = matrices_equal(lhs, np.vstack([xa, y2]), cfg)

    y1b = a @ x1
    w = p @ np.vstack([y1b, x2])
    u, y2b = w[:k], w[k:]
    back = matrices_equal(pm.m @ np.vstack([u, x2]), np.vstack([y1b, y2b]), cfg)
    return ExchangeRecord(y1, y2, fwd, back, bool(range_included(b, a, cfg)))


def domain_range_exchange_d(pm: PartitionedMatrix, x1, x2, cfg=None) -> ExchangeRecord:
    """Mirror of :func:`domain_range_exchange_a` pivoting on D (needs R(C) in R(D) backward)."""
    cfg = _cfg(cfg)
    a, b, c, d = pm.blocks
    k, n = pm.k, pm.n
    x1, x2 = _vec(x1, k, "x1"), _vec(x2, n - k, "x2")
    dp = pinv(d, cfg)
    q = gppt_d(pm, cfg).m
    xd = dp @ d @ x2
    y = pm.m @ np.vstack([x1, xd])
    y1, y2 = y[:k], y[k:]
    fwd = matrices_equal(q @ np.vstack([x1, y2]), np.vstack([y1, xd]), cfg)

    y2b = d @ x2
    w = q @ np.vstack([x1, y2b])
    y1b, u = w[:k], w[k:]
    back = matrices_equal(pm.m @ np.vstack([x1, u]), np.vstack([y1b, y2b]), cfg)
    return ExchangeRecord(y1, y2, fwd, back, bool(range_included(c, d, cfg)))


@dataclass(frozen=True)
class GramRecord:
    k: np.ndarray
    closed_form: np.ndarray
    is_one_inverse: PredicateVerdict


def gram_gppt_one_inverse(m_wide, r: int, cfg=None, check: bool = True) -> GramRecord:
    """gppt(M^T M, A^T A) for M = (A | B) with A the first ``r`` columns.

    When R(B) is in R(A) the result is a {1}-inverse of M^T M; ``check=False``
    skips the range test and returns whatever the transform gives.
    """
    cfg = _cfg(cfg)
    m = as_matrix(m_wide)
    n = m.shape[1]
    if not 0 <= r <= n:
        raise DimensionError(f"column split {r} outside [0, {n}]")
    a, b = m[:, :r], m[:, r:]
    if check:
        v = range_included(b, a, cfg)
        if not v:
            raise ConditionViolation(["R(B)<R(A)"], dict(v.residuals))
    gram = m.conj().T @ m
    kmat = gppt_a(PartitionedMatrix(gram, r), cfg).m
    ap = pinv(a, cfg)
    closed = np.block([[pinv(a.conj().T @ a, cfg), -ap @ b],
                       [b.conj().T @ ap.conj().T, np.zeros((n - r, n - r), dtype=gram.dtype)]])
    one = matrices_equal(gram @ kmat @ gram, gram, cfg)
    return GramRecord(kmat, closed, one)


@dataclass(frozen=True)
class BlockPinvRecord:
    m_dagger: np.ndarray
    conditions_hold: bool
    conditions: dict


def block_pinv_a(pm: PartitionedMatrix, cfg=None) -> BlockPinvRecord:
    """Banachiewicz-type formula built on F = D - C A^+ B, with its four range conditions."""
    cfg = _cfg(cfg)
    a, b, c, _ = pm.blocks
    h = lambda x: x.conj().T  # noqa: E731
    f = schur_complements(pm, cfg).f
    ap, fp = pinv(a, cfg), pinv(f, cfg)
    conds = {
        "R(C*)<R(A*)": range_included(h(c), h(a), cfg),
        "R(B)<R(A)": range_included(b, a, cfg),
        "R(C)<R(F)": range_included(c, f, cfg),
        "R(B*)<R(F*)": range_included(h(b), h(f), cfg),
    }
    md = np.block([[ap + ap @ b @ fp @ c @ ap, -ap @ b @ fp],
                   [-fp @ c @ ap, fp]])
    return BlockPinvRecord(md, all(conds.values()), conds)


def block_pinv_d(pm: PartitionedMatrix, cfg=None) -> BlockPinvRecord:
    cfg = _cfg(cfg)
    _, b, c, d = pm.blocks
    h = lambda x: x.conj().T  # noqa: E731
    g = schur_complements(pm, cfg).g
    gp, dp = pinv(g, cfg), pinv(d, cfg)
    conds = {
        "R(B*)<R(D*)": range_included(h(b), h(d), cfg),
        "R(C)<R(D)": range_included(c, d, cfg),
        "R(B)<R(G)": range_included(b, g, cfg),
        "R(C*)<R(G*)": range_included(h(c), h(g), cfg),
    }
    md = np.block([[gp, -gp @ b @ dp],
                   [-dp @ c @ gp, dp + dp @ c @ gp @ b @ dp]])
    return BlockPinvRecord(md, all(conds.values()), conds)
