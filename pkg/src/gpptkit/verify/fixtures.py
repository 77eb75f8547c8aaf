"""Worked examples pinned as regression fixtures.

Each fixture is a partitioned matrix plus a list of facts.  A fact is a
named check returning ``(ok, residual)``; for equalities the residual is the
max-abs deviation from the printed matrix, for non-equalities it is the gap
that must stay above ``GAP_MIN``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .. import gppt as G
from ..lcpcone import build_m0, is_p_dagger, is_p_dagger_witness
from ..numkern import (
    _cfg,
    is_almost_skew_hermitian,
    is_range_hermitian,
    maxabs,
    null_space_included,
    pinv,
    rank,
    range_included,
    symmetric_part,
)
from .theorems import Classification, check_theorem

EQ_TOL = 1e-9
GAP_MIN = 1e-6


@dataclass(frozen=True)
class Fact:
    description: str
    check: Callable  # cfg -> (ok, residual)
    # set when the pinned (recomputed) value departs from the printed one
    printed: Optional[str] = None


@dataclass(frozen=True)
class Fixture:
    name: str
    pm: G.PartitionedMatrix
    facts: tuple


@dataclass(frozen=True)
class FactResult:
    fixture: str
    fact: str
    ok: bool
    residual: float

    def to_dict(self):
        return {"fixture": self.fixture, "fact": self.fact, "ok": self.ok, "residual": self.residual}


def _equal(x, expected):
    def chk(cfg):
        r = maxabs(np.asarray(x(cfg)) - np.asarray(expected, dtype=float))
        return r <= EQ_TOL, r
    return chk


def _differ(x, y):
    def chk(cfg):
        r = maxabs(np.asarray(x(cfg)) - np.asarray(y(cfg)))
        return r > GAP_MIN, r
    return chk


def _holds(verdict_fn):
    def chk(cfg):
        v = verdict_fn(cfg)
        res = max(v.residuals.values()) if getattr(v, "residuals", None) else 0.0
        return bool(v), float(res)
    return chk


def _fails(verdict_fn):
    """Strict failure: the deciding residual must clear GAP_MIN."""
    def chk(cfg):
        v = verdict_fn(cfg)
        res = max(v.residuals.values()) if v.residuals else 0.0
        return (not bool(v)) and res > GAP_MIN, float(res)
    return chk


def _value(fn, expected):
    def chk(cfg):
        got = fn(cfg)
        return got == expected, float(got != expected)
    return chk


def _classified(theorem_id, pm, expected: Classification):
    def chk(cfg):
        rep = check_theorem(theorem_id, pm, cfg)
        return rep.classification is expected, 0.0
    return chk


def _member(fn, expected: bool):
    def chk(cfg):
        return bool(fn(cfg).is_member) == expected, 0.0
    return chk


def _h(x):
    return x.conj().T


def _ex_refute() -> Fixture:
    pm = G.PartitionedMatrix(np.array([[0.0, 0.0], [1.0, 1.0]]), 1)
    a, b, c, d = pm.blocks
    P = lambda cfg: G.gppt_a(pm, cfg).m  # noqa: E731
    Q = lambda cfg: G.gppt_d(pm, cfg).m  # noqa: E731
    facts = (
        Fact("gppt(M,A) = [[0,0],[0,1]]", _equal(P, [[0, 0], [0, 1]])),
        Fact("gppt(M,D) = [[0,0],[-1,1]]", _equal(Q, [[0, 0], [-1, 1]])),
        Fact("N(D*) = N(C*)", _holds(lambda cfg: null_space_included(_h(d), _h(c), cfg))),
        Fact("N(C*) in N(D*)", _holds(lambda cfg: null_space_included(_h(c), _h(d), cfg))),
        Fact("N(A*) = N(B*)", _holds(lambda cfg: null_space_included(_h(a), _h(b), cfg))),
        Fact("N(B*) in N(A*)", _holds(lambda cfg: null_space_included(_h(b), _h(a), cfg))),
        Fact("gppt(M,A)^+ = gppt(M,A)", lambda cfg: _equal(lambda c_: pinv(P(c_), c_), P(cfg))(cfg)),
        Fact("gppt(M,A)^+ != gppt(M,D)", _differ(lambda cfg: pinv(P(cfg), cfg), Q)),
        Fact("refuted statement: COUNTEREXAMPLE",
             _classified("T_RK33_REFUTED", pm, Classification.COUNTEREXAMPLE)),
        Fact("equivalence theorem: hypothesis_violated",
             _classified("T31_EQUIV", pm, Classification.hypothesis_violated)),
    )
    return Fixture("EX_REFUTE", pm, facts)


def _ex_weaker() -> Fixture:
    j = np.ones((2, 2))
    s = np.array([[0.0, 1.0], [1.0, 0.0]])
    pm = G.PartitionedMatrix.from_blocks(j, s, s, j)
    a, b, c, d = pm.blocks
    P = lambda cfg: G.gppt_a(pm, cfg).m  # noqa: E731
    Q = lambda cfg: G.gppt_d(pm, cfg).m  # noqa: E731
    facts = (
        Fact("A^+ = D^+ = A/4", _equal(lambda cfg: pinv(a, cfg), j / 4)),
        Fact("D^+ = A/4", _equal(lambda cfg: pinv(d, cfg), j / 4)),
        Fact("CA+A = DD+C and AA+B = BD+D", _holds(lambda cfg: G.gppt_dagger_equals_complement(pm, cfg))),
        Fact("N(A) not in N(C)", _fails(lambda cfg: null_space_included(a, c, cfg))),
        Fact("N(A*) not in N(B*)", _fails(lambda cfg: null_space_included(_h(a), _h(b), cfg))),
        Fact("N(D) not in N(B)", _fails(lambda cfg: null_space_included(d, b, cfg))),
        Fact("N(D*) not in N(C*)", _fails(lambda cfg: null_space_included(_h(d), _h(c), cfg))),
        Fact("gppt(M,A) = [[A,-A],[A,3A]]/4", _equal(P, np.block([[j, -j], [j, 3 * j]]) / 4)),
        Fact("gppt(M,A)^+ = [[3A,A],[-A,A]]/4",
             _equal(lambda cfg: pinv(P(cfg), cfg), np.block([[3 * j, j], [-j, j]]) / 4)),
        Fact("gppt(M,D) = [[3A,A],[-A,A]]/4", _equal(Q, np.block([[3 * j, j], [-j, j]]) / 4)),
        Fact("equivalence theorem: confirms", _classified("T31_EQUIV", pm, Classification.confirms)),
        Fact("four-inclusion sufficient condition: hypothesis_violated",
             _classified("T_BR41_SUFFICIENT", pm, Classification.hypothesis_violated)),
    )
    return Fixture("EX_WEAKER", pm, facts)


def _ex_remark() -> Fixture:
    # D is free in the example; any choice keeps the stated facts
    j = np.ones((2, 2))
    pm = G.PartitionedMatrix.from_blocks(j, [[0.0], [1.0]], [[1.0, 0.0]], [[1.0]])
    a, b, c, _ = pm.blocks
    facts = (
        Fact("B + C* = (1,1)^T", _equal(lambda cfg: b + _h(c), [[1.0], [1.0]])),
        Fact("R(B+C*) in R(A*)", _holds(lambda cfg: range_included(b + _h(c), _h(a), cfg))),
        Fact("R(A*) in R(B+C*)", _holds(lambda cfg: range_included(_h(a), b + _h(c), cfg))),
        Fact("A range-Hermitian", _holds(lambda cfg: is_range_hermitian(a, cfg))),
        Fact("N(A) not in N(C)", _fails(lambda cfg: null_space_included(a, c, cfg))),
        Fact("N(A*) not in N(B*)", _fails(lambda cfg: null_space_included(_h(a), _h(b), cfg))),
        Fact("rank theorem: confirms", _classified("T_RANK_A", pm, Classification.confirms)),
    )
    return Fixture("EX_REMARK", pm, facts)


def _ex_rank_fail() -> Fixture:
    pm = G.PartitionedMatrix(np.array([[0.0, -2.0], [1.0, 0.0]]), 1)
    a, b, c, _ = pm.blocks
    P = lambda cfg: G.gppt_a(pm, cfg).m  # noqa: E731
    facts = (
        Fact("gppt(M,A) = 0", _equal(P, np.zeros((2, 2)))),
        Fact("rank S(M) != rank S(gppt(M,A))",
             lambda cfg: (rank(symmetric_part(pm.m), cfg) != rank(symmetric_part(P(cfg)), cfg), 0.0)),
        # the printed value is 1; the symmetric part [[0,-1/2],[-1/2,0]] has rank 2
        Fact("rank S(M) = 2", _value(lambda cfg: rank(symmetric_part(pm.m), cfg), 2),
             printed="rank S(M) = 1"),
        Fact("rank S(gppt(M,A)) = 0", _value(lambda cfg: rank(symmetric_part(P(cfg)), cfg), 0)),
        Fact("R(B+C*) not in R(A*)", _fails(lambda cfg: range_included(b + _h(c), _h(a), cfg))),
        Fact("M not almost skew-Hermitian", lambda cfg: (not is_almost_skew_hermitian(pm.m, cfg), 0.0)),
        Fact("rank theorem: hypothesis_violated", _classified("T_RANK_A", pm, Classification.hypothesis_violated)),
    )
    return Fixture("EX_RANK_FAIL", pm, facts)


_P1 = np.array([[2.0, -2.0, 1.0], [2.0, -2.0, 1.0], [-1.0, 1.0, -0.5]])
_H = np.array([[0.125, 0.125, -0.25], [-0.125, -0.125, 0.25], [-0.25, -0.25, 0.0]])


def _ex_p1() -> Fixture:
    pm = G.PartitionedMatrix(_P1, 2)
    a, b, c, d = pm.blocks
    H = lambda cfg: G.gppt_a(pm, cfg).m  # noqa: E731
    facts = (
        Fact("A^+ = [[1,1],[-1,-1]]/8", _equal(lambda cfg: pinv(a, cfg), [[0.125, 0.125], [-0.125, -0.125]])),
        Fact("M0 = M", _equal(lambda cfg: build_m0(pm, cfg), _P1)),
        Fact("F = 0", _equal(lambda cfg: G.schur_complements(pm, cfg).f, [[0.0]])),
        Fact("R(C) not in R(F)", _fails(lambda cfg: range_included(c, G.schur_complements(pm, cfg).f, cfg))),
        Fact("R(B*) not in R(F*)",
             _fails(lambda cfg: range_included(_h(b), _h(G.schur_complements(pm, cfg).f), cfg))),
        Fact("R(M0*) = span (2,-2,1)", lambda cfg: (
            rank(_P1, cfg) == 1 and bool(range_included(np.array([[2.0], [-2.0], [1.0]]), _P1.T, cfg)), 0.0)),
        Fact("M0 is P+", _member(lambda cfg: is_p_dagger(build_m0(pm, cfg), cfg), True)),
        Fact("gppt(M,A) = H as printed", _equal(H, _H)),
        Fact("y = (0,0,-1) certifies H not P+",
             lambda cfg: (is_p_dagger_witness(H(cfg), [0.0, 0.0, -1.0], cfg), 0.0)),
        Fact("H is not P+", _member(lambda cfg: is_p_dagger(H(cfg), cfg), False)),
        # A x0 = (4, 4), so (x0)_1 (A x0)_1 = 4 > 0 and every nonzero multiple of x0 does the same
        Fact("x0 = (1,-1) is not a witness for A",
             lambda cfg: (not is_p_dagger_witness(a, [1.0, -1.0], cfg), 0.0),
             printed="x0 = (1,-1) certifies A not P+"),
        Fact("A is P+", _member(lambda cfg: is_p_dagger(a, cfg), True), printed="A is not P+"),
        Fact("x1 = (1) certifies D not P+", lambda cfg: (is_p_dagger_witness(d, [1.0], cfg), 0.0)),
        Fact("D is not P+", _member(lambda cfg: is_p_dagger(d, cfg), False)),
        Fact("P+ inheritance: hypothesis_violated",
             _classified("T15_P_INHERIT", pm, Classification.hypothesis_violated)),
    )
    return Fixture("EX_P1", pm, facts)


def _ex_p2() -> Fixture:
    pm = G.PartitionedMatrix(_H, 2)
    _, b, c, d = pm.blocks
    T = lambda cfg: G.gppt_a(pm, cfg).m  # noqa: E731
    facts = (
        Fact("gppt(M,A) = first example's M", _equal(T, _P1)),
        Fact("M0 = M", _equal(lambda cfg: build_m0(pm, cfg), _H)),
        Fact("R(C) not in R(D)", _fails(lambda cfg: range_included(c, d, cfg))),
        Fact("R(B*) not in R(D*)", _fails(lambda cfg: range_included(_h(b), _h(d), cfg))),
        Fact("gppt(M,A) is P+", _member(lambda cfg: is_p_dagger(T(cfg), cfg), True)),
        Fact("M0 is not P+", _member(lambda cfg: is_p_dagger(build_m0(pm, cfg), cfg), False)),
        Fact("converse inheritance: hypothesis_violated",
             _classified("T15_CONVERSE", pm, Classification.hypothesis_violated)),
        Fact("forward inheritance: hypothesis_violated",
             _classified("T15_P_INHERIT", pm, Classification.hypothesis_violated)),
    )
    return Fixture("EX_P2", pm, facts)


def worked_examples() -> list[Fixture]:
    return [_ex_refute(), _ex_weaker(), _ex_remark(), _ex_rank_fail(), _ex_p1(), _ex_p2()]


def printed_claims() -> list[tuple[str, Fact]]:
    """The printed statements that recomputation contradicts, as literal checks.

    Each returned fact encodes the claim exactly as printed; all of them
    evaluate to False.  Kept so that reports can show the discrepancy.
    """
    p1 = G.PartitionedMatrix(_P1, 2)
    a = p1.a
    rf = G.PartitionedMatrix(np.array([[0.0, -2.0], [1.0, 0.0]]), 1)
    return [
        ("EX_RANK_FAIL", Fact("rank S(M) = 1", _value(lambda cfg: rank(symmetric_part(rf.m), cfg), 1))),
        ("EX_P1", Fact("x0 = (1,-1) certifies A not P+",
                       lambda cfg: (is_p_dagger_witness(a, [1.0, -1.0], cfg), 0.0))),
        ("EX_P1", Fact("A is not P+", _member(lambda cfg: is_p_dagger(a, cfg), False))),
    ]


def replay_fixtures(cfg=None, fixtures=None) -> list[FactResult]:
    cfg = _cfg(cfg)
    out = []
    for fx in fixtures or worked_examples():
        for fact in fx.facts:
            ok, res = fact.check(cfg)
            out.append(FactResult(fx.name, fact.description, bool(ok), float(res)))
    return out
