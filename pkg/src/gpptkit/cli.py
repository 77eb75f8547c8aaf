"""Command-line front end.

    gpptkit pinv   M.csv
    gpptkit gppt   M.json --wrt A --split 2
    gpptkit schur  M.csv --split 1
    gpptkit check  M.csv --predicate p-dagger
    gpptkit verify --theorem T31_EQUIV --trials 100 --seed 7
    gpptkit lcp    Q.csv --q 1,-1,0

Every command prints (or writes to --output) one JSON document.
Exit codes: 0 ok, 1 counterexample found, 2 usage or parse error,
3 numeric failure, 4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import gppt as G
from .lcpcone import (
    DEFAULT_SIZE_CAP,
    LcpInstance,
    LpIterationError,
    SizeCapError,
    is_p_dagger,
    is_r_dagger,
    solve_lcp_enumerate,
)
from .matrix_io import MatrixParseError, matrix_to_json, parse_scalar, read_matrix
from .numkern import (
    DimensionError,
    NumericError,
    ToleranceConfig,
    classify_ginverse,
    is_almost_skew_hermitian,
    is_range_hermitian,
    null_space_included,
    penrose_residuals,
    pinv,
    range_included,
    rank,
)
from .verify import (
    REFUTED,
    THEOREMS,
    Classification,
    UnknownTheoremError,
    replay_fixtures,
    run_campaign,
)

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_NUMERIC, EXIT_SIZE_CAP = 0, 1, 2, 3, 4
DEFAULT_SEED = 0
DEFAULT_TRIALS = 1000


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    size_cap: int = DEFAULT_SIZE_CAP
    output: Optional[str] = None

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise UsageError("trials must be positive")
        if self.size_cap < 1:
            raise UsageError("size_cap must be positive")

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        known = {"tolerances", "seed", "trials", "size_cap", "output"}
        extra = set(obj) - known
        if extra:
            raise UsageError(f"unknown config keys: {sorted(extra)}")
        tol = obj.get("tolerances", {})
        try:
            tolerances = ToleranceConfig(**tol)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad tolerances: {exc}") from None
        kw = {k: obj[k] for k in ("seed", "trials", "size_cap", "output") if k in obj}
        for k in ("seed", "trials", "size_cap"):
            if k in kw and (not isinstance(kw[k], int) or isinstance(kw[k], bool)):
                raise UsageError(f"{k} must be an integer")
        return cls(tolerances=tolerances, **kw)

    def to_dict(self) -> dict:
        return {"tolerances": self.tolerances.to_dict(), "seed": self.seed, "trials": self.trials,
                "size_cap": self.size_cap, "output": self.output}


def resolve_config(args) -> RunConfig:
    """Flags override the config file; GPPT_SEED is the fallback seed."""
    base = RunConfig()
    if args.config:
        try:
            obj = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(obj, dict):
            raise UsageError("config must be a JSON object")
        base = RunConfig.from_dict(obj)
        seed_from_file = "seed" in obj
    else:
        seed_from_file = False

    tol = base.tolerances.to_dict()
    for key in ("rank_tol_rel", "eq_tol", "rank_tol_abs"):
        v = getattr(args, key, None)
        if v is not None:
            tol[key] = v
    try:
        tolerances = ToleranceConfig(**tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    seed = base.seed
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    elif not seed_from_file and os.environ.get("GPPT_SEED"):
        try:
            seed = int(os.environ["GPPT_SEED"], 0)
        except ValueError:
            raise UsageError(f"GPPT_SEED is not an integer: {os.environ['GPPT_SEED']!r}") from None
    return replace(
        base,
        tolerances=tolerances,
        seed=seed,
        trials=args.trials if getattr(args, "trials", None) is not None else base.trials,
        size_cap=args.size_cap if args.size_cap is not None else base.size_cap,
        output=args.output if args.output is not None else base.output,
    )


# -- helpers -------------------------------------------------------------------

def _load(path):
    try:
        return read_matrix(path)
    except OSError as exc:
        raise MatrixParseError(f"cannot read {path}: {exc}") from None


def _split(args, file_split, n):
    k = args.split if args.split is not None else file_split
    if k is None:
        raise UsageError("a split index is required (--split or 'split' in the JSON file)")
    if not 0 <= k <= n:
        raise UsageError(f"split {k} outside [0, {n}]")
    return k


def _square(m):
    if m.shape[0] != m.shape[1]:
        raise UsageError(f"expected a square matrix, got {m.shape[0]}x{m.shape[1]}")
    return m


# -- commands ------------------------------------------------------------------

def cmd_pinv(args, rc: RunConfig):
    m, _ = _load(args.input)
    cfg = rc.tolerances
    g = pinv(m, cfg)
    return {"matrix": matrix_to_json(g), "rank": rank(m, cfg),
            "penrose_residuals": penrose_residuals(m, g)}, EXIT_OK


def cmd_gppt(args, rc: RunConfig):
    m, fs = _load(args.input)
    _square(m)
    k = _split(args, fs, m.shape[0])
    pm = G.PartitionedMatrix(m, k)
    t = G.gppt_a(pm, rc.tolerances) if args.wrt == "A" else G.gppt_d(pm, rc.tolerances)
    return {"wrt": args.wrt, "matrix": matrix_to_json(t.m, k)}, EXIT_OK


def cmd_schur(args, rc: RunConfig):
    m, fs = _load(args.input)
    _square(m)
    k = _split(args, fs, m.shape[0])
    sc = G.schur_complements(G.PartitionedMatrix(m, k), rc.tolerances)
    return {"split": k, "F": matrix_to_json(sc.f), "G": matrix_to_json(sc.g)}, EXIT_OK


PREDICATES = ("ep", "almost-skew", "p-dagger", "r-dagger", "null-included", "range-included", "ginverse")


def cmd_check(args, rc: RunConfig):
    m, _ = _load(args.input)
    cfg = rc.tolerances
    pred = args.predicate
    if pred in ("null-included", "range-included", "ginverse"):
        if not args.other:
            raise UsageError(f"--predicate {pred} needs --other FILE")
        y, _ = _load(args.other)
        if pred == "null-included":
            v = null_space_included(m, y, cfg)
            out = {"predicate": "N(X) in N(Y)", **v.to_dict()}
        elif pred == "range-included":
            v = range_included(m, y, cfg)
            out = {"predicate": "R(X) in R(Y)", **v.to_dict()}
        else:
            cls = classify_ginverse(m, y, cfg)
            return {"predicate": "Y in X{...}", **cls.to_dict()}, EXIT_OK
        return out, EXIT_OK
    _square(m)
    if pred == "ep":
        return {"predicate": pred, **is_range_hermitian(m, cfg).to_dict()}, EXIT_OK
    if pred == "almost-skew":
        return {"predicate": pred, **is_almost_skew_hermitian(m, cfg).to_dict()}, EXIT_OK
    if pred == "p-dagger":
        v = is_p_dagger(m, cfg, mode=args.mode, size_cap=rc.size_cap, seed=rc.seed)
    else:
        v = is_r_dagger(m, cfg, size_cap=rc.size_cap)
    d = v.to_dict()
    return {"predicate": pred, "member": d.pop("is_member"), **d}, EXIT_OK


def cmd_verify(args, rc: RunConfig):
    cfg = rc.tolerances
    if args.theorem == "FIXTURES":
        results = replay_fixtures(cfg)
        bad = [r for r in results if not r.ok]
        return {"fixtures": [r.to_dict() for r in results], "failed": len(bad)}, \
            (EXIT_OK if not bad else EXIT_COUNTEREXAMPLE)
    if args.all:
        ids = list(THEOREMS)
    elif args.theorem:
        if args.theorem not in THEOREMS:
            raise UsageError(f"unknown theorem id {args.theorem!r}; known: FIXTURES, {', '.join(THEOREMS)}")
        ids = [args.theorem]
    else:
        raise UsageError("give --theorem ID or --all")
    reports = []
    unexpected = 0
    for tid in ids:
        rep = run_campaign(tid, None, rc.trials, cfg, seed=rc.seed, keep_reports=args.reports)
        reports.append(rep.to_dict(include_reports=args.reports))
        if tid not in REFUTED:
            unexpected += rep.n_counterexamples
    total = {c.value: sum(r["counts"][c.value] for r in reports) for c in Classification}
    out = {"seed": rc.seed, "trials_per_theorem": rc.trials, "tolerances": cfg.to_dict(),
           "summary": total, "unexpected_counterexamples": unexpected, "campaigns": reports}
    return out, (EXIT_OK if unexpected == 0 else EXIT_COUNTEREXAMPLE)


def _vector(text):
    vals = []
    for tok in text.split(","):
        try:
            v = parse_scalar(tok)
        except MatrixParseError as exc:
            raise UsageError(f"bad --q: {exc}") from None
        if isinstance(v, complex):
            raise UsageError("--q must be real")
        vals.append(v)
    return np.array(vals)


def cmd_lcp(args, rc: RunConfig):
    m, _ = _load(args.input)
    _square(m)
    if args.q_file:
        qm, _ = _load(args.q_file)
        q = qm.ravel()
    elif args.q:
        q = _vector(args.q)
    else:
        q = np.zeros(m.shape[0])
    inst = LcpInstance(m, q)
    sols = solve_lcp_enumerate(inst, rc.tolerances, size_cap=rc.size_cap, row_space=args.row_space)
    return {"n": m.shape[0], "row_space": args.row_space, "solvable": bool(sols),
            "solutions": [[float(v) for v in s] for s in sols]}, EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--config", help="JSON file mirroring RunConfig (tolerances, seed, trials, size_cap, output)")
    g.add_argument("--eq-tol", dest="eq_tol", type=float, help="equality tolerance (default 1e-9)")
    g.add_argument("--rank-tol-rel", dest="rank_tol_rel", type=float,
                   help="relative rank tolerance, scaled by sigma_max*max(m,n) (default 1e3*eps)")
    g.add_argument("--rank-tol-abs", dest="rank_tol_abs", type=float,
                   help="absolute floor for zero singular values (default 1e-11)")
    g.add_argument("--size-cap", dest="size_cap", type=int,
                   help=f"largest n for exact enumeration (default {DEFAULT_SIZE_CAP})")
    g.add_argument("--seed", type=int, help=f"RNG seed; falls back to $GPPT_SEED, then {DEFAULT_SEED}")
    g.add_argument("-o", "--output", help="write JSON here instead of stdout")

    p = argparse.ArgumentParser(prog="gpptkit", description=__doc__.split("\n\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pinv", parents=[common], help="Moore-Penrose inverse and Penrose residuals")
    sp.add_argument("input")
    sp.set_defaults(func=cmd_pinv)

    sp = sub.add_parser("gppt", parents=[common], help="principal pivot transform w.r.t. A or D")
    sp.add_argument("input")
    sp.add_argument("--wrt", choices=("A", "D"), default="A")
    sp.add_argument("--split", type=int, help="size k of the leading block A")
    sp.set_defaults(func=cmd_gppt)

    sp = sub.add_parser("schur", parents=[common], help="generalized Schur complements F and G")
    sp.add_argument("input")
    sp.add_argument("--split", type=int)
    sp.set_defaults(func=cmd_schur)

    sp = sub.add_parser("check", parents=[common], help="matrix predicates and class membership")
    sp.add_argument("input")
    sp.add_argument("--predicate", required=True, choices=PREDICATES)
    sp.add_argument("--other", help="second operand for inclusion / g-inverse tests")
    sp.add_argument("--mode", choices=("exact", "randomized"), default="exact",
                    help="p-dagger decision procedure")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("verify", parents=[common], help="theorem campaigns and fixture replay")
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--theorem", help="theorem id, or FIXTURES to replay the worked examples")
    grp.add_argument("--all", action="store_true", help="every registered theorem")
    sp.add_argument("--trials", type=int, help=f"instances per theorem (default {DEFAULT_TRIALS})")
    sp.add_argument("--reports", action="store_true", help="include every per-instance report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("lcp", parents=[common], help="enumerate LCP(Q, q) solutions (small n)")
    sp.add_argument("input", help="the matrix Q")
    sp.add_argument("--q", help="comma-separated q (default 0)")
    sp.add_argument("--q-file", dest="q_file", help="matrix file holding q")
    sp.add_argument("--row-space", dest="row_space", action="store_true", help="restrict x to R(Q^T)")
    sp.set_defaults(func=cmd_lcp)
    return p


def _emit(doc, rc: Optional[RunConfig]):
    text = json.dumps(doc, indent=2) + "\n"
    if rc is not None and rc.output:
        Path(rc.output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    rc = None
    try:
        rc = resolve_config(args)
        doc, code = args.func(args, rc)
    except (UsageError, MatrixParseError, DimensionError, UnknownTheoremError) as exc:
        _emit({"error": "usage", "message": str(exc)}, None)
        print(f"gpptkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeCapError as exc:
        _emit({"error": "size_cap", "message": str(exc)}, None)
        print(f"gpptkit: {exc}", file=sys.stderr)
        return EXIT_SIZE_CAP
    except (NumericError, LpIterationError, np.linalg.LinAlgError, FloatingPointError) as exc:
        _emit({"error": "numeric", "message": str(exc)}, None)
        print(f"gpptkit: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(doc, rc)
    return code


if __name__ == "__main__":
    sys.exit(main())
