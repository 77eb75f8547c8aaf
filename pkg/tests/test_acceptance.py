"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records one ``PASS``/``FAIL`` line; the lines are echoed as the
test runs and collected again in the "acceptance criteria" summary section.
"""

import itertools
import time

import numpy as np

from gpptkit import gppt as G
from gpptkit.gppt import PartitionedMatrix
from gpptkit.lcpcone import is_p_dagger, is_p_dagger_witness, is_r_dagger, is_r_dagger_witness
from gpptkit.numkern import DEFAULT_TOL, matrices_equal, pinv, rank, symmetric_part
from gpptkit.verify import (
    Classification,
    GeneratorSpec,
    check_theorem,
    generate,
    worked_examples,
    printed_claims,
    replay_fixtures,
    run_campaign,
    trial_seed,
)

from conftest import ACCEPTANCE_LINES

SIZES = ((2, 1), (3, 1), (4, 2), (6, 3), (8, 4))
FIELDS = ("real", "complex")


def report(capsys, number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def maxabs(x):
    return float(np.abs(x).max(initial=0.0))


def rel(lhs, rhs):
    return maxabs(lhs - rhs) / (1.0 + maxabs(rhs))


def penrose(a, g):
    """Relative residuals of the four Penrose equations, computed directly."""
    ag, ga = a @ g, g @ a
    return (rel(a @ g @ a, a), rel(g @ a @ g, g), rel(ag.conj().T, ag), rel(ga.conj().T, ga))


def free_instance(rng, n, k, cplx):
    """No hypothesis imposed; each block gets a random rank so every outcome occurs."""
    def block(p, q):
        r = int(rng.integers(0, min(p, q) + 1)) if p and q else 0
        x, y = rng.standard_normal((p, r)), rng.standard_normal((r, q))
        if cplx:
            x = x + 1j * rng.standard_normal((p, r))
            y = y + 1j * rng.standard_normal((r, q))
        return x @ y
    return PartitionedMatrix.from_blocks(block(k, k), block(k, n - k), block(n - k, k), block(n - k, n - k))


def cycled(i):
    n, k = SIZES[i % len(SIZES)]
    return n, k, FIELDS[(i // len(SIZES)) % 2]


# 1 ------------------------------------------------------------------------

def test_criterion_1_fixture_replay(capsys):
    t0 = time.perf_counter()
    results = replay_fixtures()
    claims = [(name, fact, fact.check(DEFAULT_TOL)[0]) for name, fact in printed_claims()]
    elapsed = time.perf_counter() - t0
    names = {f.name for f in worked_examples()}
    pinned_bad = [f"{r.fixture}: {r.fact}" for r in results if not r.ok]
    printed_bad = [f"{name}: {fact.description}" for name, fact, ok in claims if not ok]
    ok = (names == {"EX_REFUTE", "EX_WEAKER", "EX_REMARK", "EX_RANK_FAIL", "EX_P1", "EX_P2"}
          and not pinned_bad and not printed_bad and elapsed < 1.0)
    detail = (f"{len(results) - len(pinned_bad)}/{len(results)} recomputed facts hold, "
              f"{len(claims) - len(printed_bad)}/{len(claims)} printed claims reproduce, {elapsed:.2f}s")
    if pinned_bad:
        detail += "; failing facts: " + "; ".join(pinned_bad)
    if printed_bad:
        detail += "; printed claims contradicted by recomputation: " + "; ".join(printed_bad)
    report(capsys, 1, ok, detail)


# 2 ------------------------------------------------------------------------

def test_criterion_2_penrose(capsys):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = {"lapack": 0.0, "jacobi": 0.0}
    for i in range(1000):
        m, n = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        r = int(rng.integers(0, min(m, n) + 1))
        cplx = i % 2 == 1
        x, y = rng.standard_normal((m, r)), rng.standard_normal((r, n))
        if cplx:
            x = x + 1j * rng.standard_normal((m, r))
            y = y + 1j * rng.standard_normal((r, n))
        a = x @ y
        for method in worst:
            worst[method] = max(worst[method], *penrose(a, pinv(a, method=method)))
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-9 and elapsed < 30
    report(capsys, 2, ok, f"1000 matrices, worst relative residual {worst['lapack']:.1e} (LAPACK route), "
                          f"{worst['jacobi']:.1e} (Jacobi route), {elapsed:.1f}s")


# 3 ------------------------------------------------------------------------

def test_criterion_3_three_way_equivalence(capsys):
    rng = np.random.default_rng(3)
    disagree, true_count = 0, 0
    for i in range(1000):
        n, k, f = cycled(i)
        pm = free_instance(rng, n, k, f == "complex")
        direct = matrices_equal(pinv(G.gppt_a(pm).m), G.gppt_d(pm).m).holds
        cond2 = G.gppt_dagger_equals_complement(pm).holds
        null4 = all(v.holds for v in G.null_space_conditions(pm).values())
        disagree += not (direct == cond2 == null4)
        true_count += direct
    report(capsys, 3, disagree == 0,
           f"1000 unconstrained instances ({true_count} true, {1000 - true_count} false), "
           f"{disagree} disagreements")


# 4 ------------------------------------------------------------------------

INVOLUTION_A = frozenset({"null_A_in_C", "null_Astar_in_Bstar"})
MP_A = frozenset({"null_A_in_C", "null_Astar_in_Bstar", "range_C_in_F", "range_Bt_in_Ft"})


def test_criterion_4_involution_and_mp(capsys):
    worst_inv, worst_mp, hyp_fail = 0.0, 0.0, 0
    for i in range(1000):
        n, k, f = cycled(i)
        s = trial_seed(4, i)
        pm = generate(GeneratorSpec(n, k, field=f, constraints=INVOLUTION_A, seed=s))
        worst_inv = max(worst_inv, rel(G.double_gppt_a(pm).m, pm.m))
        pm = generate(GeneratorSpec(n, k, field=f, constraints=MP_A, seed=s))
        # the generator's constraints are the four null-space hypotheses (range form)
        hyp_fail += not all(G.mp_conditions(pm).values())
        worst_mp = max(worst_mp, rel(G.moore_penrose_via_gppt(pm, force=True), pinv(pm.m)))
    rng = np.random.default_rng(44)
    counter = {"T32_INVOLUTION": 0, "T33_MP_VIA_GPPT": 0}
    confirmed = dict.fromkeys(counter, 0)
    for i in range(1000):
        n, k, f = cycled(i)
        pm = free_instance(rng, n, k, f == "complex")
        for tid in counter:
            cls = check_theorem(tid, pm).classification
            counter[tid] += cls is Classification.COUNTEREXAMPLE
            confirmed[tid] += cls is Classification.confirms
    ok = worst_inv <= 1e-8 and worst_mp <= 1e-8 and hyp_fail == 0 and not any(counter.values())
    report(capsys, 4, ok,
           f"constructed: involution residual {worst_inv:.1e}, M+ via gppt residual {worst_mp:.1e} "
           f"({hyp_fail} hypothesis misses); unconstrained: COUNTEREXAMPLE "
           f"{counter['T32_INVOLUTION']} / {counter['T33_MP_VIA_GPPT']} "
           f"(confirms {confirmed['T32_INVOLUTION']} / {confirmed['T33_MP_VIA_GPPT']})")


# 5 ------------------------------------------------------------------------

def test_criterion_5_rank_preservation(capsys):
    mismatch = {"A": 0, "D": 0}
    hyp_fail = 0
    for side, cons in (("A", {"A_ep", "BplusCstar_in_rangeA"}), ("D", {"D_ep", "CplusBstar_in_rangeD"})):
        for i in range(1000):
            n, k, f = cycled(i)
            pm = generate(GeneratorSpec(n, k, field=f, constraints=cons, seed=trial_seed(5, i)))
            rec = G.rank_sym_preserved_a(pm) if side == "A" else G.rank_sym_preserved_d(pm)
            hyp_fail += not rec.hypotheses_hold
            t = G.gppt_a(pm) if side == "A" else G.gppt_d(pm)
            # integer ranks recomputed here, not taken from the record
            mismatch[side] += rank(symmetric_part(pm.m)) != rank(symmetric_part(t.m))
    ok = not any(mismatch.values()) and hyp_fail == 0
    report(capsys, 5, ok, f"1000 A-side + 1000 D-side instances, rank mismatches {mismatch['A']} / "
                          f"{mismatch['D']}, hypothesis misses {hyp_fail}")


# 6 ------------------------------------------------------------------------

def test_criterion_6_factorization(capsys):
    rng = np.random.default_rng(6)
    instances = [fx.pm for fx in worked_examples()]
    for i in range(1000):
        n, k, f = cycled(i)
        instances.append(free_instance(rng, n, k, f == "complex"))
    z_bad = zhat_bad = zhat_124_bad = prod_bad = 0
    for pm in instances:
        fac = G.gppt_factorization(pm)
        rz = penrose(fac.x, fac.z)
        rzh = penrose(fac.y, fac.zhat)
        z_bad += max(rz[0], rz[1], rz[3]) > 1e-9
        zhat_bad += max(rzh[0], rzh[1], rzh[2]) > 1e-9
        zhat_124_bad += max(rzh[0], rzh[1], rzh[3]) > 1e-9
        prod_bad += rel(fac.y @ fac.z, G.gppt_a(pm).m) > 1e-9 or rel(fac.x @ fac.zhat, G.gppt_d(pm).m) > 1e-9
    total = len(instances)
    ok = z_bad == zhat_bad == prod_bad == 0
    report(capsys, 6, ok,
           f"{total} instances: Z not in X{{1,2,4}} {z_bad}, Zhat not in Y{{1,2,3}} {zhat_bad}, "
           f"product mismatches {prod_bad}; for comparison Zhat not in Y{{1,2,4}} {zhat_124_bad}")


# 7 ------------------------------------------------------------------------

VALUES = np.array([-1, -0.5, 0, 0.5, 1, 2])


def sphere_grid(r):
    if r == 1:
        return np.array([[1.0], [-1.0]])
    if r == 2:
        t = np.linspace(0, 2 * np.pi, 7200, endpoint=False)
        return np.column_stack([np.cos(t), np.sin(t)])
    # Fibonacci lattice on the 2-sphere
    count = 60000
    i = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * i / count)
    theta = np.pi * (1 + 5 ** 0.5) * i
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


def orthonormal_basis(x, tol=1e-10):
    if x.size == 0:
        return np.zeros((x.shape[0], 0))
    u, s, _ = np.linalg.svd(x)
    r = int((s > tol * max(1.0, s.max(initial=0.0))).sum())
    return u[:, :r]


def null_basis(x, n):
    if x.shape[0] == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(x)
    r = int((s > 1e-10 * max(1.0, s.max(initial=0.0))).sum())
    return vh[r:].T


def grid_p_dagger_witness(m):
    """Dense sweep of the unit sphere in R(M^T); returns x with every x_i (Mx)_i <= 0, if seen."""
    basis = orthonormal_basis(m.T)
    if basis.shape[1] == 0:
        return None
    pts = sphere_grid(basis.shape[1]) @ basis.T
    prod = pts * (pts @ m.T)
    hit = np.all(prod <= 0.0, axis=1)
    return pts[hit][0] if hit.any() else None


def grid_r_dagger_witness(m):
    """Support-by-support sweep: nonzero x in R(M^T), x >= 0, Mx >= 0, x^T M x = 0."""
    n = m.shape[0]
    row = orthonormal_basis(m.T)
    if row.shape[1] == 0:
        return None
    for size in range(1, n + 1):
        for alpha in itertools.combinations(range(n), size):
            rest = [i for i in range(n) if i not in alpha]
            # x = row @ c with x_rest = 0 and (Mx)_alpha = 0: a linear subspace in c
            cons = np.vstack([row[rest], (m @ row)[list(alpha)]])
            sub = row @ null_basis(cons, row.shape[1])
            if sub.shape[1] == 0:
                continue
            grid = sphere_grid(min(sub.shape[1], 3)) @ sub[:, :3].T
            mx = grid @ m.T
            hit = np.all(grid >= -1e-12, axis=1) & np.all(mx >= -1e-12, axis=1)
            if hit.any():
                return grid[hit][0]
    return None


def test_criterion_7_classifiers(capsys):
    rng = np.random.default_rng(7)
    contradicted, bad_witness, duality_bad = [], 0, 0
    members = {"P": 0, "R": 0}
    grid_found = {"P": 0, "R": 0}
    for _ in range(500):
        n = int(rng.integers(1, 4))
        m = rng.choice(VALUES, size=(n, n))
        p, r = is_p_dagger(m), is_r_dagger(m)
        gp, gr = grid_p_dagger_witness(m), grid_r_dagger_witness(m)
        members["P"] += p.is_member
        members["R"] += r.is_member
        grid_found["P"] += gp is not None
        grid_found["R"] += gr is not None
        if (p.is_member and gp is not None) or (r.is_member and gr is not None):
            contradicted.append(m.tolist())
        if not p.is_member and not is_p_dagger_witness(m, p.witness):
            bad_witness += 1
        if not r.is_member and not is_r_dagger_witness(m, r.witness):
            bad_witness += 1
        duality_bad += p.is_member != is_p_dagger(pinv(m)).is_member
    ok = not contradicted and bad_witness == 0 and duality_bad == 0
    report(capsys, 7, ok,
           f"500 matrices: P+ members {members['P']}, R+ members {members['R']}; grid witnesses found "
           f"{grid_found['P']} (P+) / {grid_found['R']} (R+), members contradicted {len(contradicted)}, "
           f"invalid exact witnesses {bad_witness}, duality failures {duality_bad}")


# 8 ------------------------------------------------------------------------

FORWARD = ("T15_P_INHERIT", "T_P_INHERIT_D", "T99_R_INHERIT", "T_END_R_INHERIT_D")


def test_criterion_8_inheritance(capsys):
    counts = {}
    for tid in FORWARD:
        rep = run_campaign(tid, trials=300, seed=8)
        assert all(n <= 6 for n, _ in {(c["n"], c["k"]) for c in rep.configurations})
        counts[tid] = (rep.n_counterexamples, rep.counts["confirms"], rep.generation_failures)
    fx = {f.name: f.pm for f in worked_examples()}
    examples = [("EX_P1", "T15_P_INHERIT"), ("EX_P1", "T99_R_INHERIT"),
                ("EX_P2", "T15_P_INHERIT"), ("EX_P2", "T15_CONVERSE")]
    misclassified = [f"{name}/{tid}" for name, tid in examples
                     if check_theorem(tid, fx[name]).classification is not Classification.hypothesis_violated]
    ok = all(c == 0 and g == 0 for c, _, g in counts.values()) and not misclassified
    summary = ", ".join(f"{tid} {c} ({conf} confirms)" for tid, (c, conf, _) in counts.items())
    report(capsys, 8, ok, f"COUNTEREXAMPLEs over 300 instances each: {summary}; "
                          f"worked counterexamples misclassified: {misclassified or 'none'}")

