"""One checker per theorem: evaluate hypotheses and conclusion on a single instance.

A checker never short-circuits on a failed hypothesis; the conclusion is
always evaluated so that reports can be mined for counterexamples and for
the reverse direction of equivalences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .. import gppt as G
from ..lcpcone import build_m0, build_m1, is_p_dagger, is_r_dagger
from ..numkern import (
    PredicateVerdict,
    _cfg,
    is_almost_skew_hermitian,
    matrices_equal,
    null_space_included,
    pinv,
    range_included,
)


class Classification(str, Enum):
    confirms = "confirms"
    hypothesis_violated = "hypothesis_violated"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"


class UnknownTheoremError(KeyError):
    pass


class FieldMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class TheoremReport:
    theorem_id: str
    instance_seed: Optional[int]
    hypotheses_satisfied: bool
    conclusion_holds: bool
    residuals: dict
    classification: Classification
    hypotheses: dict = field(default_factory=dict)
    conclusions: dict = field(default_factory=dict)
    # only for equivalences: hypotheses fail yet the conclusion holds
    converse_counterexample: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "instance_seed": self.instance_seed,
            "hypotheses_satisfied": self.hypotheses_satisfied,
            "conclusion_holds": self.conclusion_holds,
            "classification": self.classification.value,
            "hypotheses": dict(self.hypotheses),
            "conclusions": dict(self.conclusions),
            "converse_counterexample": self.converse_counterexample,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }


def classify(hyp: bool, concl: bool) -> Classification:
    if not hyp:
        return Classification.hypothesis_violated
    return Classification.confirms if concl else Classification.COUNTEREXAMPLE


@dataclass(frozen=True)
class _Outcome:
    hypotheses: dict
    conclusions: dict
    residuals: dict


class _Acc:
    """Collects named boolean facts and their worst residual."""

    def __init__(self):
        self.hyp, self.concl, self.res = {}, {}, {}

    def _put(self, target, name, value):
        if isinstance(value, PredicateVerdict):
            if value.residuals:
                self.res[name] = max(float(v) for v in value.residuals.values())
            value = bool(value)
        target[name] = bool(value)

    def h(self, name, value):
        self._put(self.hyp, name, value)

    def c(self, name, value):
        self._put(self.concl, name, value)

    def done(self):
        return _Outcome(self.hyp, self.concl, self.res)


def _h(x):
    return x.conj().T


@dataclass(frozen=True)
class TheoremInfo:
    theorem_id: str
    func: Callable
    iff: bool = False
    real_only: bool = False
    description: str = ""


THEOREMS: dict[str, TheoremInfo] = {}


def _register(theorem_id, iff=False, real_only=False, description=""):
    def deco(fn):
        THEOREMS[theorem_id] = TheoremInfo(theorem_id, fn, iff, real_only, description)
        return fn
    return deco


# -- characterizations ---------------------------------------------------------

@_register("T31_EQUIV", iff=True,
           description="gppt(M,A)^+ = gppt(M,D) <=> CA+A = DD+C & AA+B = BD+D <=> four null-space inclusions")
def _t31(pm, cfg, rng):
    acc = _Acc()
    for name, v in G.null_space_conditions(pm, cfg).items():
        acc.h(name, v)
    p, q = G.gppt_a(pm, cfg), G.gppt_d(pm, cfg)
    acc.c("pinv(P)=Q", matrices_equal(pinv(p.m, cfg), q.m, cfg))
    acc.c("CA+A=DD+C & AA+B=BD+D", G.gppt_dagger_equals_complement(pm, cfg))
    return acc.done()


@_register("T_BR41_SUFFICIENT",
           description="N(A)<N(C), N(A*)<N(B*), N(D)<N(B), N(D*)<N(C*) => gppt(M,A)^+ = gppt(M,D)")
def _br41(pm, cfg, rng):
    acc = _Acc()
    for name, v in {**G.involution_conditions_a(pm, cfg), **G.involution_conditions_d(pm, cfg)}.items():
        acc.h(name, v)
    acc.c("pinv(P)=Q", matrices_equal(pinv(G.gppt_a(pm, cfg).m, cfg), G.gppt_d(pm, cfg).m, cfg))
    return acc.done()


@_register("T_RK33_REFUTED",
           description="(refuted) N(D*)<N(C*) & N(A*)<N(B*) => gppt(M,A)^+ = gppt(M,D)")
def _rk33(pm, cfg, rng):
    a, b, c, d = pm.blocks
    acc = _Acc()
    acc.h("N(D*)<N(C*)", null_space_included(_h(d), _h(c), cfg))
    acc.h("N(A*)<N(B*)", null_space_included(_h(a), _h(b), cfg))
    acc.c("pinv(P)=Q", matrices_equal(pinv(G.gppt_a(pm, cfg).m, cfg), G.gppt_d(pm, cfg).m, cfg))
    return acc.done()


def _involution(pm, cfg, a_side):
    acc = _Acc()
    conds = G.involution_conditions_a(pm, cfg) if a_side else G.involution_conditions_d(pm, cfg)
    for name, v in conds.items():
        acc.h(name, v)
    twice = G.double_gppt_a(pm, cfg) if a_side else G.double_gppt_d(pm, cfg)
    acc.c("gppt(gppt(M))=M", matrices_equal(twice.m, pm.m, cfg))
    return acc.done()


@_register("T32_INVOLUTION", iff=True,
           description="gppt(gppt(M,A),A^+) = M <=> N(A)<N(C) & N(A*)<N(B*)")
def _t32a(pm, cfg, rng):
    return _involution(pm, cfg, True)


@_register("T32_INVOLUTION_D", iff=True,
           description="gppt(gppt(M,D),D^+) = M <=> N(D)<N(B) & N(D*)<N(C*)")
def _t32d(pm, cfg, rng):
    return _involution(pm, cfg, False)


def _mp(pm, cfg, a_side):
    acc = _Acc()
    for name, v in G.mp_conditions(pm, a_side, cfg).items():
        acc.h(name, v)
    md = G.moore_penrose_via_gppt(pm, a_side, cfg, force=True)
    acc.c("M+=gppt(P,F)" if a_side else "M+=gppt(Q,E)", matrices_equal(md, pinv(pm.m, cfg), cfg))
    return acc.done()


@_register("T33_MP_VIA_GPPT", iff=True, description="M^+ = gppt(P,F) <=> four null-space inclusions")
def _t33a(pm, cfg, rng):
    return _mp(pm, cfg, True)


@_register("T33_MP_VIA_GPPT_D", iff=True, description="M^+ = gppt(Q,E) <=> four null-space inclusions")
def _t33d(pm, cfg, rng):
    return _mp(pm, cfg, False)


@_register("L34_FACTORS",
           description="Z in X{1,2,4}, Zhat in Y{1,2,3}, YZ=P, XZhat=Q; Z=X+ <=> N(A*)<N(B*); Zhat=Y+ <=> N(A)<N(C)")
def _l34(pm, cfg, rng):
    a, b, c, _ = pm.blocks
    fz = G.gppt_factorization(pm, cfg)
    acc = _Acc()
    acc.c("Z in X{1,2,4}", fz.z_class.has(1, 2, 4))
    acc.c("Zhat in Y{1,2,3}", fz.zhat_class.has(1, 2, 3))
    acc.c("YZ=P", fz.yz_is_p)
    acc.c("XZhat=Q", fz.xzhat_is_q)
    acc.c("Z=X+ <=> N(A*)<N(B*)",
          fz.z_class.has(1, 2, 3, 4) == bool(null_space_included(_h(a), _h(b), cfg)))
    acc.c("Zhat=Y+ <=> N(A)<N(C)",
          fz.zhat_class.has(1, 2, 3, 4) == bool(null_space_included(a, c, cfg)))
    for key, v in {**fz.z_class.residuals}.items():
        acc.res[f"Z:{key}"] = float(v)
    for key, v in {**fz.zhat_class.residuals}.items():
        acc.res[f"Zhat:{key}"] = float(v)
    return acc.done()


@_register("L34_FACTORS_CORRECTED",
           description="Z in X{1,2,4}, Zhat in Y{1,2,4}, YZ=P, XZhat=Q; Z=X+ <=> N(A*)<N(B*); Zhat=Y+ <=> N(D*)<N(C*)")
def _l34c(pm, cfg, rng):
    a, b, c, d = pm.blocks
    fz = G.gppt_factorization(pm, cfg)
    acc = _Acc()
    acc.c("Z in X{1,2,4}", fz.z_class.has(1, 2, 4))
    acc.c("Zhat in Y{1,2,4}", fz.zhat_class.has(1, 2, 4))
    acc.c("YZ=P", fz.yz_is_p)
    acc.c("XZhat=Q", fz.xzhat_is_q)
    acc.c("Z=X+ <=> N(A*)<N(B*)",
          fz.z_class.has(1, 2, 3, 4) == bool(null_space_included(_h(a), _h(b), cfg)))
    acc.c("Zhat=Y+ <=> N(D*)<N(C*)",
          fz.zhat_class.has(1, 2, 3, 4) == bool(null_space_included(_h(d), _h(c), cfg)))
    return acc.done()


# -- symmetric part and EP -----------------------------------------------------

def _rank(pm, cfg, a_side):
    rec = G.rank_sym_preserved_a(pm, cfg) if a_side else G.rank_sym_preserved_d(pm, cfg)
    acc = _Acc()
    for name, v in rec.hypotheses.items():
        acc.h(name, v)
    acc.c("rank S(M) = rank S(gppt)", rec.ranks_equal)
    acc.res["rank_S(M)"] = rec.rank_m
    acc.res["rank_S(gppt)"] = rec.rank_p
    return acc.done()


@_register("T_RANK_A", description="A EP & R(B+C*)<R(A) => rank S(M) = rank S(gppt(M,A))")
def _rank_a(pm, cfg, rng):
    return _rank(pm, cfg, True)


@_register("T_RANK_D", description="D EP & R(C+B*)<R(D) => rank S(M) = rank S(gppt(M,D))")
def _rank_d(pm, cfg, rng):
    return _rank(pm, cfg, False)


def _askew(pm, cfg, a_side):
    rec = G.rank_sym_preserved_a(pm, cfg) if a_side else G.rank_sym_preserved_d(pm, cfg)
    acc = _Acc()
    for name, v in rec.hypotheses.items():
        acc.h(name, v)
    t = (G.gppt_a(pm, cfg) if a_side else G.gppt_d(pm, cfg)).m
    verdicts = {
        "M": is_almost_skew_hermitian(pm.m, cfg),
        "M+": is_almost_skew_hermitian(pinv(pm.m, cfg), cfg),
        "T": is_almost_skew_hermitian(t, cfg),
        "T+": is_almost_skew_hermitian(pinv(t, cfg), cfg),
    }
    acc.c("all four almost-skew verdicts agree", len({bool(v) for v in verdicts.values()}) == 1)
    for name, v in verdicts.items():
        acc.res[f"askew[{name}]"] = float(bool(v))
    return acc.done()


@_register("COR_ASKEW_A", description="A EP & R(B+C*)<R(A) => M, M+, P, P+ almost skew together")
def _askew_a(pm, cfg, rng):
    return _askew(pm, cfg, True)


@_register("COR_ASKEW_D", description="D EP & R(C+B*)<R(D) => M, M+, Q, Q+ almost skew together")
def _askew_d(pm, cfg, rng):
    return _askew(pm, cfg, False)


@_register("T_EP_EQUIV", iff=True,
           description="CA+A = DD+C & AA+B = BD+D => (P EP <=> Q EP <=> A and D EP)")
def _ep(pm, cfg, rng):
    rec = G.ep_equivalence_check(pm, cfg)
    acc = _Acc()
    acc.h("CA+A=DD+C & AA+B=BD+D", G.gppt_dagger_equals_complement(pm, cfg))
    acc.c("P EP <=> Q EP <=> A, D EP", rec.equivalence_holds)
    acc.res["P_ep"], acc.res["Q_ep"] = float(bool(rec.p_ep)), float(bool(rec.q_ep))
    acc.res["A_ep"], acc.res["D_ep"] = float(bool(rec.a_ep)), float(bool(rec.d_ep))
    return acc.done()


# -- exchange, Gram, block formulas ----------------------------------------------

def _draw(rng, length, cplx):
    z = rng.standard_normal((length, 1))
    return z + 1j * rng.standard_normal((length, 1)) if cplx else z


def _exchange(pm, cfg, rng, a_side):
    cplx = np.iscomplexobj(pm.m)
    x1, x2 = _draw(rng, pm.k, cplx), _draw(rng, pm.n - pm.k, cplx)
    fn = G.domain_range_exchange_a if a_side else G.domain_range_exchange_d
    rec = fn(pm, x1, x2, cfg)
    acc = _Acc()
    acc.c("forward", rec.forward_ok)
    # the backward statement is conditional; outside its hypothesis it is vacuous
    acc.c("backward (if applicable)", bool(rec.backward_ok) or not rec.backward_applicable)
    acc.res["backward_applicable"] = float(rec.backward_applicable)
    if rec.backward_ok.residuals:
        acc.res["backward"] = max(rec.backward_ok.residuals.values())
    return acc.done()


@_register("T_EXCHANGE", description="domain-range exchange through gppt(M,A)")
def _exch_a(pm, cfg, rng):
    return _exchange(pm, cfg, rng, True)


@_register("T_EXCHANGE_D", description="domain-range exchange through gppt(M,D)")
def _exch_d(pm, cfg, rng):
    return _exchange(pm, cfg, rng, False)


@_register("T_GRAM", description="M=(A|B), R(B)<R(A) => gppt(M*M, A*A) is a {1}-inverse of M*M")
def _gram(pm, cfg, rng):
    # the whole matrix is the column-partitioned M; the split index is r
    m, r = pm.m, pm.k
    acc = _Acc()
    acc.h("R(B)<R(A) [columns]", range_included(m[:, r:], m[:, :r], cfg))
    rec = G.gram_gppt_one_inverse(m, r, cfg, check=False)
    acc.c("K in (M*M){1}", rec.is_one_inverse)
    acc.c("K = closed form", matrices_equal(rec.k, rec.closed_form, cfg))
    return acc.done()


def _block_pinv(pm, cfg, a_side):
    rec = G.block_pinv_a(pm, cfg) if a_side else G.block_pinv_d(pm, cfg)
    acc = _Acc()
    for name, v in rec.conditions.items():
        acc.h(name, v)
    acc.c("M+ = block formula", matrices_equal(rec.m_dagger, pinv(pm.m, cfg), cfg))
    return acc.done()


@_register("T_BLOCK_PINV_A", iff=True, description="four range inclusions <=> M+ = formula in A+, F+")
def _bp_a(pm, cfg, rng):
    return _block_pinv(pm, cfg, True)


@_register("T_BLOCK_PINV_D", iff=True, description="four range inclusions <=> M+ = formula in G+, D+")
def _bp_d(pm, cfg, rng):
    return _block_pinv(pm, cfg, False)


# -- inheritance (real matrices) -------------------------------------------------

def _inherit(pm, cfg, *, a_side, forward, kind):
    """Shared body of the P-dagger / R-dagger inheritance theorems.

    A side, forward:  R(C)<R(F), R(B^T)<R(F^T), M0 in class => gppt(M,A) [and A, D] in class.
    A side, converse: R(C)<R(D), R(B^T)<R(D^T), gppt(M,A) in class => M0 [and A, F] in class.
    D side mirrors with M1, G and the pivot D.
    """
    member = is_p_dagger if kind == "P" else is_r_dagger
    a, b, c, d = pm.blocks
    sc = G.schur_complements(pm, cfg)
    acc = _Acc()
    if a_side:
        t = G.gppt_a(pm, cfg).m
        base = build_m0(pm, cfg)
        schur, pivot = sc.f, a
        tag_t, tag_base, tag_s = "gppt(M,A)", "M0", "F"
        if forward:
            acc.h("R(C)<R(F)", range_included(c, schur, cfg))
            acc.h("R(B*)<R(F*)", range_included(_h(b), _h(schur), cfg))
        else:
            acc.h("R(C)<R(D)", range_included(c, d, cfg))
            acc.h("R(B*)<R(D*)", range_included(_h(b), _h(d), cfg))
    else:
        t = G.gppt_d(pm, cfg).m
        base = build_m1(pm, cfg)
        schur, pivot = sc.g, d
        tag_t, tag_base, tag_s = "gppt(M,D)", "M1", "G"
        if forward:
            acc.h("R(B)<R(G)", range_included(b, schur, cfg))
            acc.h("R(C*)<R(G*)", range_included(_h(c), _h(schur), cfg))
        else:
            acc.h("R(B)<R(A)", range_included(b, a, cfg))
            acc.h("R(C*)<R(A*)", range_included(_h(c), _h(a), cfg))

    cls = f"{kind}+"
    if forward:
        acc.h(f"{tag_base} {cls}", member(base, cfg))
        acc.c(f"{tag_t} {cls}", member(t, cfg))
        if kind == "P":
            acc.c(f"A {cls}", member(a, cfg))
            acc.c(f"D {cls}", member(d, cfg))
    else:
        acc.h(f"{tag_t} {cls}", member(t, cfg))
        acc.c(f"{tag_base} {cls}", member(base, cfg))
        if kind == "P":
            acc.c(f"{'A' if a_side else 'D'} {cls}", member(pivot, cfg))
            acc.c(f"{tag_s} {cls}", member(schur, cfg))
    return acc.done()


@_register("T15_P_INHERIT", real_only=True,
           description="R(C)<R(F), R(B^T)<R(F^T), M0 P+ => gppt(M,A), A, D P+")
def _t15(pm, cfg, rng):
    return _inherit(pm, cfg, a_side=True, forward=True, kind="P")


@_register("T15_CONVERSE", real_only=True,
           description="R(C)<R(D), R(B^T)<R(D^T), gppt(M,A) P+ => M0, A, F P+")
def _t15c(pm, cfg, rng):
    return _inherit(pm, cfg, a_side=True, forward=False, kind="P")


@_register("T_P_INHERIT_D", real_only=True,
           description="R(B)<R(G), R(C^T)<R(G^T), M1 P+ => gppt(M,D), A, D P+")
def _tpd(pm, cfg, rng):
    return _inherit(pm, cfg, a_side=False, forward=True, kind="P")


@_register("T_P_INHERIT_D_CONVERSE", real_only=True,
           description="R(B)<R(A), R(C^T)<R(A^T), gppt(M,D) P+ => M1, D, G P+")
def _tpdc(pm, cfg, rng):
    return _inherit(pm, cfg, a_side=False, forward=False, kind="P")


@_register("T99_R_INHERIT", real_only=True,
           description="R(C)<R(F), R(B^T)<R(F^T), M0 R+ => gppt(M,A) R+")
def _t99(pm, cfg, rng):
    return _inherit(pm, cfg, a_side=True, forward=True, kind="R")


@_register("T99_CONVERSE", real_only=True,
           description="R(C)<R(D), R(B^T)<R(D^T), gppt(M,A) R+ => M0 R+")
def _t99c(pm, cfg, rng):
    return _inherit(pm, cfg, a_side=True, forward=False, kind="R")


@_register("T_END_R_INHERIT_D", real_only=True,
           description="R(B)<R(G), R(C^T)<R(G^T), M1 R+ => gppt(M,D) R+")
def _tend(pm, cfg, rng):
    return _inherit(pm, cfg, a_side=False, forward=True, kind="R")


@_register("T_END_R_INHERIT_D_CONVERSE", real_only=True,
           description="R(B)<R(A), R(C^T)<R(A^T), gppt(M,D) R+ => M1 R+")
def _tendc(pm, cfg, rng):
    return _inherit(pm, cfg, a_side=False, forward=False, kind="R")


def theorem_ids() -> list[str]:
    return list(THEOREMS)


def check_theorem(theorem_id: str, pm: G.PartitionedMatrix, cfg=None,
                  seed: Optional[int] = None) -> TheoremReport:
    """Evaluate ``theorem_id`` on ``pm``.  ``seed`` feeds any auxiliary sampling."""
    try:
        info = THEOREMS[theorem_id]
    except KeyError:
        raise UnknownTheoremError(theorem_id) from None
    if info.real_only and np.iscomplexobj(pm.m):
        if np.any(pm.m.imag != 0):
            raise FieldMismatchError(f"{theorem_id} is stated for real matrices")
        pm = G.PartitionedMatrix(pm.m.real, pm.k)
    cfg = _cfg(cfg)
    rng = np.random.default_rng(seed)
    out = info.func(pm, cfg, rng)
    hyp = all(out.hypotheses.values())
    concl = all(out.conclusions.values())
    return TheoremReport(
        theorem_id=theorem_id,
        instance_seed=seed,
        hypotheses_satisfied=hyp,
        conclusion_holds=concl,
        residuals=dict(out.residuals),
        classification=classify(hyp, concl),
        hypotheses=dict(out.hypotheses),
        conclusions=dict(out.conclusions),
        converse_counterexample=(not hyp and concl) if info.iff else None,
    )
