"""Stock analysis dictionaries: identity, finite differences, graph incidence, fused lasso.

A dictionary is handed around as its matrix D of shape (n, p) whose columns
are the analysis atoms; the regularizer reads ||D' x||_1.
"""
from __future__ import annotations

import itertools

import numpy as np

from .linalg import as_matrix


def identity_dict(n: int) -> np.ndarray:
    """D = I_n; the regularizer becomes the plain l1 norm."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.eye(n)


def difference_dict(n: int) -> np.ndarray:
    """1-d total-variation dictionary on n points: columns are forward differences.

    D' has n-1 rows, row i reading x_{i+1} - x_i.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    Dstar = np.zeros((n - 1, n))
    for i in range(n - 1):
        Dstar[i, i] = -1.0
        Dstar[i, i + 1] = 1.0
    return Dstar.T


def incidence_dict(edges, n_vertices: int) -> np.ndarray:
    """Oriented incidence dictionary of a graph: one column per edge (u, v).

    Column (u, v) carries +1 at u and -1 at v, so (D' x)_e = x_u - x_v.
    Vertices are 0-based.
    """
    edges = [(int(u), int(v)) for u, v in edges]
    if n_vertices < 1:
        raise ValueError("need at least one vertex")
    for u, v in edges:
        if not (0 <= u < n_vertices and 0 <= v < n_vertices):
            raise ValueError(f"edge ({u}, {v}) out of range")
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) not allowed")
    D = np.zeros((n_vertices, len(edges)))
    for j, (u, v) in enumerate(edges):
        D[u, j] = 1.0
        D[v, j] = -1.0
    return D


def complete_graph_edges(n_vertices: int) -> list[tuple[int, int]]:
    """Edge list of the complete graph, lexicographic."""
    return list(itertools.combinations(range(n_vertices), 2))


def fused_lasso_dict(n: int) -> np.ndarray:
    """Identity atoms followed by forward-difference atoms; D is (n, 2n-1)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return np.hstack([identity_dict(n), difference_dict(n)])


def connected_components(edges, n_vertices: int) -> list[frozenset[int]]:
    """Vertex sets of the connected components of the graph."""
    parent = list(range(n_vertices))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ra, rb = find(int(u)), find(int(v))
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, set[int]] = {}
    for v in range(n_vertices):
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def phi_separates_components(Phi, edges, n_vertices: int,
                             tol: float = 1e-9) -> bool:
    """Whether Phi is non-constant on every component-wise constant vector.

    For an incidence dictionary this is exactly the condition making every
    solution set of the regularized least-squares problem compact: no nonzero
    vector that is constant on each connected component may lie in Ker Phi.
    """
    P = as_matrix(Phi, "Phi")
    if P.shape[1] != n_vertices:
        raise ValueError("Phi column count disagrees with the vertex count")
    comps = connected_components(edges, n_vertices)
    basis = np.zeros((n_vertices, len(comps)))
    for j, comp in enumerate(comps):
        for v in comp:
            basis[v, j] = 1.0
    M = P @ basis  # columns: Phi applied to each component indicator
    if M.size == 0:
        return True
    s = np.linalg.svd(M, compute_uv=False)
    smax = s[0] if s.size else 0.0
    full = int(np.sum(s > tol * max(smax, 1.0))) == len(comps)
    return full
