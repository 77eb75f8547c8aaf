"""Randomized campaigns: many generated instances, one theorem, aggregated counts."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from ..numkern import _cfg
from .generators import GenerationError, GeneratorSpec, generate
from .theorems import THEOREMS, Classification, TheoremReport, UnknownTheoremError, check_theorem

DEFAULT_SIZES = ((2, 1), (3, 1), (4, 2), (6, 3), (8, 4))
# the exact P+/R+ classifiers enumerate 2^n cases; keep inheritance campaigns small
INHERITANCE_SIZES = ((2, 1), (3, 1), (4, 2), (6, 3))
DEFAULT_TRIALS = 1000

# theorems the library itself knows to be false; their counterexamples are expected
REFUTED = frozenset({"T_RK33_REFUTED"})

_F = frozenset
_NULL4 = _F({"null_A_in_C", "null_Astar_in_Bstar", "null_D_in_B", "null_Dstar_in_Cstar"})
_COND2 = _F({"CApA_eq_DDpC", "AApB_eq_BDpD"})

# constraint families cycled through by the default campaign of each theorem
THEOREM_CONSTRAINTS: dict[str, tuple] = {
    "T31_EQUIV": (_COND2, _NULL4),
    "T_BR41_SUFFICIENT": (_NULL4,),
    "T_RK33_REFUTED": (_F({"null_Dstar_in_Cstar", "null_Astar_in_Bstar"}),),
    "T32_INVOLUTION": (_F({"null_A_in_C", "null_Astar_in_Bstar"}),),
    "T32_INVOLUTION_D": (_F({"null_D_in_B", "null_Dstar_in_Cstar"}),),
    "T33_MP_VIA_GPPT": (_F({"null_A_in_C", "null_Astar_in_Bstar", "range_C_in_F", "range_Bt_in_Ft"}),),
    "T33_MP_VIA_GPPT_D": (_F({"null_D_in_B", "null_Dstar_in_Cstar", "range_B_in_G", "range_Ct_in_Gt"}),),
    "L34_FACTORS": (_F(), _NULL4),
    "L34_FACTORS_CORRECTED": (_F(), _NULL4),
    "T_RANK_A": (_F({"A_ep", "BplusCstar_in_rangeA"}),),
    "T_RANK_D": (_F({"D_ep", "CplusBstar_in_rangeD"}),),
    "COR_ASKEW_A": (_F({"M_askew", "A_ep", "BplusCstar_in_rangeA"}), _F({"A_ep", "BplusCstar_in_rangeA"})),
    "COR_ASKEW_D": (_F({"M_askew", "D_ep", "CplusBstar_in_rangeD"}), _F({"D_ep", "CplusBstar_in_rangeD"})),
    "T_EP_EQUIV": (_COND2, _COND2 | {"A_ep", "D_ep"}),
    "T_EXCHANGE": (_F(), _F({"range_B_in_A"})),
    "T_EXCHANGE_D": (_F(), _F({"range_C_in_D"})),
    "T_GRAM": (_F({"colrange_B_in_A"}),),
    "T_BLOCK_PINV_A": (_F({"range_B_in_A", "range_Ct_in_At", "range_C_in_F", "range_Bt_in_Ft"}),),
    "T_BLOCK_PINV_D": (_F({"range_C_in_D", "range_Bt_in_Dt", "range_B_in_G", "range_Ct_in_Gt"}),),
    "T15_P_INHERIT": (_F({"M0_pd"}), _F({"range_C_in_F", "range_Bt_in_Ft"})),
    "T15_CONVERSE": (_F({"gppt_a_pd"}), _F({"range_C_in_D", "range_Bt_in_Dt"})),
    "T_P_INHERIT_D": (_F({"M1_pd"}), _F({"range_B_in_G", "range_Ct_in_Gt"})),
    "T_P_INHERIT_D_CONVERSE": (_F({"gppt_d_pd"}), _F({"range_B_in_A", "range_Ct_in_At"})),
    "T99_R_INHERIT": (_F({"M0_pd"}), _F({"range_C_in_F", "range_Bt_in_Ft"})),
    "T99_CONVERSE": (_F({"gppt_a_pd"}), _F({"range_C_in_D", "range_Bt_in_Dt"})),
    "T_END_R_INHERIT_D": (_F({"M1_pd"}), _F({"range_B_in_G", "range_Ct_in_Gt"})),
    "T_END_R_INHERIT_D_CONVERSE": (_F({"gppt_d_pd"}), _F({"range_B_in_A", "range_Ct_in_At"})),
}


def trial_seed(seed: int, index: int) -> int:
    """Independent sub-seed of trial ``index``; does not depend on trial order."""
    return int(np.random.SeedSequence([int(seed) & (2**64 - 1), index]).generate_state(1, np.uint64)[0])


@dataclass
class CampaignReport:
    theorem_id: str
    seed: int
    trials: int
    counts: dict = field(default_factory=lambda: {c.value: 0 for c in Classification})
    converse_counterexamples: Optional[int] = None
    generation_failures: int = 0
    worst_residuals: dict = field(default_factory=dict)
    counterexample_seeds: list = field(default_factory=list)
    configurations: list = field(default_factory=list)
    reports: list = field(default_factory=list)

    @property
    def n_counterexamples(self) -> int:
        return self.counts[Classification.COUNTEREXAMPLE.value]

    @property
    def refuted_expected(self) -> bool:
        return self.theorem_id in REFUTED

    def add(self, rep: TheoremReport, keep: bool, config) -> None:
        self.counts[rep.classification.value] += 1
        if rep.classification is Classification.COUNTEREXAMPLE and len(self.counterexample_seeds) < 20:
            self.counterexample_seeds.append({"seed": rep.instance_seed, **config})
        if rep.converse_counterexample is not None:
            self.converse_counterexamples = (self.converse_counterexamples or 0) + int(rep.converse_counterexample)
        for key, v in rep.residuals.items():
            v = float(v)
            if key not in self.worst_residuals or v > self.worst_residuals[key]:
                self.worst_residuals[key] = v
        if keep:
            self.reports.append(rep)

    def to_dict(self, include_reports: bool = False) -> dict:
        out = {
            "theorem_id": self.theorem_id,
            "seed": self.seed,
            "trials": self.trials,
            "counts": dict(self.counts),
            "converse_counterexamples": self.converse_counterexamples,
            "generation_failures": self.generation_failures,
            "worst_residuals": dict(sorted(self.worst_residuals.items())),
            "counterexample_seeds": list(self.counterexample_seeds),
            "configurations": list(self.configurations),
            "refuted_expected": self.refuted_expected,
        }
        if include_reports:
            out["reports"] = [r.to_dict() for r in self.reports]
        return out


def _fields_for(theorem_id) -> tuple:
    return ("real",) if THEOREMS[theorem_id].real_only else ("real", "complex")


def _sizes_for(theorem_id) -> tuple:
    return INHERITANCE_SIZES if THEOREMS[theorem_id].real_only else DEFAULT_SIZES


def run_campaign(theorem_id: str, spec: Optional[GeneratorSpec] = None, trials: int = DEFAULT_TRIALS,
                 cfg=None, *, seed: Optional[int] = None, sizes: Optional[Sequence] = None,
                 fields: Optional[Iterable[str]] = None, constraint_sets: Optional[Sequence] = None,
                 keep_reports: bool = False) -> CampaignReport:
    """Check ``theorem_id`` on ``trials`` generated instances.

    With an explicit ``spec`` every trial uses its size, field and constraints
    (only the seed changes).  Without one, trials cycle through the default
    sizes, fields and constraint families registered for the theorem.
    """
    if theorem_id not in THEOREMS:
        raise UnknownTheoremError(theorem_id)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = _cfg(cfg)
    if spec is not None:
        base_seed = spec.seed if seed is None else seed
        sizes = sizes or ((spec.n, spec.k),)
        fields = tuple(fields or (spec.field,))
        constraint_sets = constraint_sets or (spec.constraints,)
        template = spec
    else:
        base_seed = 0 if seed is None else seed
        sizes = sizes or _sizes_for(theorem_id)
        fields = tuple(fields or _fields_for(theorem_id))
        constraint_sets = constraint_sets or THEOREM_CONSTRAINTS.get(theorem_id, (frozenset(),))
        template = GeneratorSpec(2, 1)

    report = CampaignReport(theorem_id, int(base_seed), trials)
    combos = [(n, k, f, frozenset(cs)) for cs in constraint_sets for f in fields for (n, k) in sizes]
    report.configurations = [{"n": n, "k": k, "field": f, "constraints": sorted(cs)} for n, k, f, cs in combos]
    for i in range(trials):
        n, k, f, cs = combos[i % len(combos)]
        s = trial_seed(base_seed, i)
        gspec = replace(template, n=n, k=k, field=f, constraints=cs, seed=s)
        try:
            pm = generate(gspec, cfg)
        except GenerationError:
            report.generation_failures += 1
            continue
        rep = check_theorem(theorem_id, pm, cfg, seed=s)
        report.add(rep, keep_reports, {"n": n, "k": k, "field": f, "constraints": sorted(cs)})
    return report


def run_reverse_campaign(theorem_id: str, trials: int = 200, cfg=None, *, seed: int = 0) -> CampaignReport:
    """Exploratory: drop one constraint of the theorem's first family per trial.

    Instances built this way usually violate exactly one hypothesis; the
    report counts how often the conclusion still holds (converse
    counterexamples).  Nothing here is a failure by itself.
    """
    info = THEOREMS.get(theorem_id)
    if info is None:
        raise UnknownTheoremError(theorem_id)
    full = sorted(THEOREM_CONSTRAINTS.get(theorem_id, (frozenset(),))[0])
    if not full:
        raise ValueError(f"{theorem_id} has no constraint family to weaken")
    families = [frozenset(c for c in full if c != drop) for drop in full]
    return run_campaign(theorem_id, None, trials, cfg, seed=seed, constraint_sets=families)
