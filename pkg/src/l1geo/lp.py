"""Self-contained dense linear-programming engine.

Solves   min <c, x>   s.t.   A_eq x = b_eq,  A_le x <= b_le,  x free,

by a two-phase primal simplex on the standard-form split x = u - v with slack
and artificial variables.  Pivoting uses Bland's anti-cycling rule with
lowest-index tie breaking, so runs are deterministic.  There is no external
solver behind this and no fallback: exceeding the iteration cap raises instead
of returning an approximate answer.

Also hosts the one canonical polyhedral reformulation of l1 constraints
(`l1_epigraph_rows`) that the solution-set and construction code build their
regions from.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOLS, Tolerances, as_matrix, as_vector

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class IterationLimitError(RuntimeError):
    """Simplex exceeded its pivot budget; treat the run as failed, not approximate."""


def _empty_system(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.zeros((0, n)), np.zeros(0)


@dataclass(frozen=True)
class LinearProgram:
    """min <c, x> subject to A_eq x = b_eq and A_le x <= b_le, x free."""

    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_le: np.ndarray
    b_le: np.ndarray

    def __post_init__(self):
        c = as_vector(self.c, "c")
        n = c.size
        A_eq, b_eq = self.A_eq, self.b_eq
        A_le, b_le = self.A_le, self.b_le
        A_eq = _empty_system(n)[0] if A_eq is None else as_matrix(A_eq, "A_eq")
        b_eq = _empty_system(n)[1] if b_eq is None else as_vector(b_eq, "b_eq")
        A_le = _empty_system(n)[0] if A_le is None else as_matrix(A_le, "A_le")
        b_le = _empty_system(n)[1] if b_le is None else as_vector(b_le, "b_le")
        if A_eq.shape[1] != n or A_le.shape[1] != n:
            raise ValueError("constraint matrices disagree with len(c)")
        if A_eq.shape[0] != b_eq.size or A_le.shape[0] != b_le.size:
            raise ValueError("constraint right-hand sides have wrong length")
        if n == 0:
            raise ValueError("need at least one variable")
        for name, arr in (("c", c), ("A_eq", A_eq), ("b_eq", b_eq),
                          ("A_le", A_le), ("b_le", b_le)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class LpOutcome:
    """Result of a solve.

    status is one of "optimal", "infeasible", "unbounded".  For optimal
    outcomes x_opt/value/dual_eq/dual_le are set and satisfy, up to lp_tol,

        c + A_eq' dual_eq + A_le' dual_le = 0,   dual_le >= 0,
        dual_le_i (b_le - A_le x_opt)_i = 0.

    For infeasible outcomes (farkas_eq, farkas_le) certify infeasibility:

        A_eq' farkas_eq + A_le' farkas_le = 0,  farkas_le <= 0,
        <b_eq, farkas_eq> + <b_le, farkas_le> > 0.

    For unbounded outcomes x_feasible is a feasible point.
    """

    status: str
    x_opt: np.ndarray | None = None
    value: float | None = None
    dual_eq: np.ndarray | None = None
    dual_le: np.ndarray | None = None
    farkas_eq: np.ndarray | None = None
    farkas_le: np.ndarray | None = None
    x_feasible: np.ndarray | None = None
    iterations: int = 0


def _pivot(T: np.ndarray, r: int, j: int) -> None:
    T[r] = T[r] / T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _simplex(T: np.ndarray, basis: list[int], cost: np.ndarray, eps: float,
             blocked: np.ndarray, cap: int, count: int) -> tuple[str, int]:
    """Run primal simplex iterations in place; returns (status, pivot count)."""
    K = T.shape[1] - 1
    while True:
        if T.shape[0]:
            zrow = cost - cost[np.asarray(basis, dtype=int)] @ T[:, :K]
        else:
            zrow = cost.copy()
        cands = np.nonzero((zrow < -eps) & ~blocked)[0]
        if cands.size == 0:
            return OPTIMAL, count
        j = int(cands[0])  # Bland: lowest index enters
        col = T[:, j]
        rows = np.nonzero(col > eps)[0]
        if rows.size == 0:
            return UNBOUNDED, count
        ratios = T[rows, -1] / col[rows]
        rmin = float(ratios.min())
        tied = rows[np.abs(ratios - rmin) <= 1e-12 * (1.0 + abs(rmin))]
        # Bland again: among ties the row whose basic variable has lowest index
        r = int(tied[int(np.argmin([basis[i] for i in tied]))])
        _pivot(T, r, j)
        basis[r] = j
        count += 1
        if count > cap:
            raise IterationLimitError(
                f"simplex exceeded {cap} pivots; refusing to return an answer")


def solve(lp: LinearProgram, tol: Tolerances | None = None) -> LpOutcome:
    """Two-phase simplex solve of the given program."""
    t = tol or DEFAULT_TOLS
    eps = t.lp_tol
    n = lp.n
    me, ml = lp.A_eq.shape[0], lp.A_le.shape[0]
    m = me + ml
    A = np.vstack([lp.A_eq, lp.A_le]) if m else np.zeros((0, n))
    b = np.concatenate([lp.b_eq, lp.b_le])
    sigma = np.where(b < 0.0, -1.0, 1.0)

    # standard-form columns: u(n) | v(n) | slack(ml) | artificial(m) | rhs
    N = 2 * n + ml
    K = N + m
    T = np.zeros((m, K + 1))
    if m:
        T[:, :n] = sigma[:, None] * A
        T[:, n:2 * n] = -sigma[:, None] * A
        for i in range(ml):
            T[me + i, 2 * n + i] = sigma[me + i]
        T[:, N:N + m] = np.eye(m)
        T[:, -1] = sigma * b
    basis = list(range(N, N + m))
    cap = 50 * (K + m)
    count = 0

    cost1 = np.zeros(K)
    cost1[N:] = 1.0
    blocked_none = np.zeros(K, dtype=bool)
    status1, count = _simplex(T, basis, cost1, eps, blocked_none, cap, count)
    if status1 != OPTIMAL:  # phase 1 is bounded below by zero
        raise RuntimeError("phase-1 simplex reported unbounded; this is a bug")
    obj1 = float(cost1[np.asarray(basis, int)] @ T[:, -1]) if m else 0.0
    scale_b = 1.0 + (np.max(np.abs(b)) if m else 0.0)
    if obj1 > eps * scale_b:
        zrow1 = cost1 - cost1[np.asarray(basis, int)] @ T[:, :K]
        y_tab = 1.0 - zrow1[N:N + m]
        y = sigma * y_tab
        return LpOutcome(status=INFEASIBLE,
                         farkas_eq=y[:me], farkas_le=y[me:],
                         iterations=count)

    # drive leftover artificials out of the basis, dropping redundant rows
    r = 0
    while r < len(basis):
        if basis[r] >= N:
            row = T[r, :N]
            nz = np.nonzero(np.abs(row) > eps)[0]
            if nz.size:
                _pivot(T, r, int(nz[0]))
                basis[r] = int(nz[0])
                r += 1
            else:
                T = np.delete(T, r, axis=0)
                del basis[r]
        else:
            r += 1

    cost2 = np.zeros(K)
    cost2[:n] = lp.c
    cost2[n:2 * n] = -lp.c
    blocked = np.zeros(K, dtype=bool)
    blocked[N:] = True
    status2, count = _simplex(T, basis, cost2, eps, blocked, cap, count)

    z = np.zeros(K)
    if basis:
        z[np.asarray(basis, int)] = T[:, -1]
    x = z[:n] - z[n:2 * n]
    if status2 == UNBOUNDED:
        return LpOutcome(status=UNBOUNDED, x_feasible=x, iterations=count)

    if len(basis):
        zrow2 = cost2 - cost2[np.asarray(basis, int)] @ T[:, :K]
    else:
        zrow2 = cost2
    y = sigma * (-zrow2[N:N + m])  # duals of the original rows (0 on dropped ones)
    return LpOutcome(status=OPTIMAL, x_opt=x, value=float(lp.c @ x),
                     dual_eq=-y[:me], dual_le=-y[me:], iterations=count)


def max_linear_over(region: LinearProgram, w,
                    tol: Tolerances | None = None) -> LpOutcome:
    """Maximize <w, x> over the feasible set of `region` (its objective is ignored).

    Returns an LpOutcome whose value is the maximum; dual fields belong to the
    internal minimization and are not exposed.
    """
    w = as_vector(w, "w")
    if w.size != region.n:
        raise ValueError("objective length disagrees with the region")
    inner = solve(LinearProgram(c=-w, A_eq=region.A_eq, b_eq=region.b_eq,
                                A_le=region.A_le, b_le=region.b_le), tol)
    value = None if inner.value is None else -inner.value
    return LpOutcome(status=inner.status, x_opt=inner.x_opt, value=value,
                     farkas_eq=inner.farkas_eq, farkas_le=inner.farkas_le,
                     x_feasible=inner.x_feasible, iterations=inner.iterations)


def l1_epigraph_rows(Dstar, radius: float | None = None
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Inequality rows encoding the l1 lift over variables (x, t).

    For Dstar of shape (p, n) the rows say t_i >= |<row_i, x>| for each i,
    and, when `radius` is given, sum(t) <= radius.  This is the single
    reformulation of l1 terms used everywhere in the package: minimizing
    sum(t) computes the l1 value, constraining it carves out a sublevel set.
    """
    Ds = as_matrix(Dstar, "Dstar")
    p, n = Ds.shape
    rows = []
    rhs = []
    eye = np.eye(p)
    rows.append(np.hstack([Ds, -eye]))
    rhs.append(np.zeros(p))
    rows.append(np.hstack([-Ds, -eye]))
    rhs.append(np.zeros(p))
    if radius is not None:
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        rows.append(np.concatenate([np.zeros(n), np.ones(p)])[None, :])
        rhs.append(np.array([float(radius)]))
    return np.vstack(rows), np.concatenate(rhs)


def minimize_l1_over_affine(Dstar, A_eq, b_eq,
                            tol: Tolerances | None = None
                            ) -> tuple[float, np.ndarray]:
    """min ||Dstar x||_1 over {A_eq x = b_eq}; returns (value, minimizer).

    Raises ValueError when the affine set is empty.
    """
    Ds = as_matrix(Dstar, "Dstar")
    A = as_matrix(A_eq, "A_eq")
    b = as_vector(b_eq, "b_eq")
    p, n = Ds.shape
    if A.shape[1] != n:
        raise ValueError("A_eq column count disagrees with Dstar")
    c = np.concatenate([np.zeros(n), np.ones(p)])
    A_eq_l = np.hstack([A, np.zeros((A.shape[0], p))])
    A_le, b_le = l1_epigraph_rows(Ds)
    out = solve(LinearProgram(c=c, A_eq=A_eq_l, b_eq=b, A_le=A_le, b_le=b_le), tol)
    if out.status == INFEASIBLE:
        raise ValueError("the affine set is empty")
    if out.status != OPTIMAL:  # objective is bounded below by zero
        raise RuntimeError(f"unexpected LP status {out.status}")
    return float(out.value), out.x_opt[:n]
