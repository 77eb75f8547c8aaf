"""Phase-one simplex for small dense feasibility problems.

Finds ``x >= 0`` with ``A_ub x <= b_ub`` and ``A_eq x = b_eq`` or reports that
none exists.  Dense tableau, Bland's rule (so no cycling), sized for the
orthant/support subproblems of the cone classifiers: a few dozen rows.
"""

from __future__ import annotations

import numpy as np


class LpIterationError(RuntimeError):
    def __init__(self, iterations):
        super().__init__(f"simplex did not terminate within {iterations} pivots")
        self.iterations = iterations


def find_feasible(n, a_ub=None, b_ub=None, a_eq=None, b_eq=None, *,
                  pivot_tol=1e-11, feas_tol=1e-9, max_iter=None):
    """Return a feasible ``x`` (length ``n``) or ``None`` if the system is infeasible."""
    a_ub = np.zeros((0, n)) if a_ub is None else np.asarray(a_ub, float).reshape(-1, n)
    a_eq = np.zeros((0, n)) if a_eq is None else np.asarray(a_eq, float).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, float).ravel()
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float).ravel()
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    rows = m_ub + m_eq
    if rows == 0:
        return np.zeros(n)

    a = np.zeros((rows, n + m_ub))
    a[:m_ub, :n] = a_ub
    a[:m_ub, n:] = np.eye(m_ub)
    a[m_ub:, :n] = a_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1

    # slack columns serve as the starting basis where they can; other rows get an artificial
    need_art = [i for i in range(rows) if i >= m_ub or neg[i]]
    n_art = len(need_art)
    width = n + m_ub + n_art
    tab = np.zeros((rows + 1, width + 1))
    tab[:rows, : n + m_ub] = a
    tab[:rows, -1] = b
    basis = np.empty(rows, dtype=int)
    for i in range(min(rows, m_ub)):
        basis[i] = n + i
    for j, i in enumerate(need_art):
        col = n + m_ub + j
        tab[i, col] = 1.0
        basis[i] = col
    tab[-1, n + m_ub: width] = 1.0
    for i in need_art:
        tab[-1] -= tab[i]

    limit = 50 * (rows + width) if max_iter is None else max_iter
    for _ in range(limit):
        cost = tab[-1, :width]
        candidates = np.flatnonzero(cost < -pivot_tol)
        if candidates.size == 0:
            break
        j = candidates[0]
        col = tab[:rows, j]
        ok = col > pivot_tol
        if not ok.any():
            # unbounded direction cannot occur in phase one (objective >= 0)
            break
        ratios = np.full(rows, np.inf)
        ratios[ok] = tab[:rows, -1][ok] / col[ok]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + pivot_tol * max(1.0, abs(best)))
        i = ties[np.argmin(basis[ties])]
        tab[i] /= tab[i, j]
        others = np.arange(rows + 1) != i
        tab[others] -= np.outer(tab[others, j], tab[i])
        basis[i] = j
    else:
        raise LpIterationError(limit)

    if -tab[-1, -1] > feas_tol * (1.0 + np.abs(b).max(initial=0.0)):
        return None
    x = np.zeros(width)
    x[basis] = tab[:rows, -1]
    return np.clip(x[:n], 0.0, None)
