"""Hot inner loops, each with a numba and a pure-numpy implementation.

The backend is picked once from the environment: ``STEINER_DEGREE_NO_JIT=1``
(or numba being unavailable) selects numpy.  ``use_backend`` switches at
runtime, which the benchmark and the parity tests rely on.  Both backends
consume the same pre-drawn random numbers, so their outputs are identical.
"""
from __future__ import annotations

import os
from itertools import combinations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

_BACKEND = "numpy" if (numba is None or os.environ.get("STEINER_DEGREE_NO_JIT", "0") not in ("", "0")) else "numba"


def backend() -> str:
    return _BACKEND


def use_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous choice."""
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    prev, _BACKEND = _BACKEND, name
    return prev


def _njit(fn):
    return fn if numba is None else numba.njit(cache=True)(fn)


# ------------------------------------------------ dependent edge sampling

def _connect_mask_np(parent, ratio, uniforms):
    kept = uniforms < ratio[None, :]
    conn = np.zeros_like(kept)
    for e in range(parent.shape[0]):
        p = parent[e]
        conn[:, e] = kept[:, e] if p < 0 else (kept[:, e] & conn[:, p])
    return conn


@_njit
def _connect_mask_jit(parent, ratio, uniforms):
    trials, m = uniforms.shape
    conn = np.zeros((trials, m), dtype=np.bool_)
    for t in range(trials):
        for e in range(m):
            p = parent[e]
            if uniforms[t, e] < ratio[e] and (p < 0 or conn[t, p]):
                conn[t, e] = True
    return conn


def connect_mask(parent: np.ndarray, ratio: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Which edges end up joined to the root, per trial.

    Edges are indexed in top-down order; ``parent[e]`` is the index of the
    parent edge or -1 for edges at the root.  Edge ``e`` is kept when its
    uniform draw falls below ``ratio[e]``; it is connected when kept and its
    parent is connected.
    """
    parent = np.ascontiguousarray(parent, dtype=np.int64)
    ratio = np.ascontiguousarray(ratio, dtype=np.float64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    if _BACKEND == "numba":
        return _connect_mask_jit(parent, ratio, uniforms)
    return _connect_mask_np(parent, ratio, uniforms)


def _group_hits_np(conn, edge_child, member, root_member):
    trials = conn.shape[0]
    reached = np.zeros((trials, member.shape[1]), dtype=np.int64)
    reached[:, edge_child] = conn
    hits = (reached @ member.T.astype(np.int64)) > 0
    return hits | root_member[None, :]


@_njit
def _group_hits_jit(conn, edge_child, member, root_member):
    trials, m = conn.shape
    g = member.shape[0]
    hits = np.zeros((trials, g), dtype=np.bool_)
    for t in range(trials):
        for j in range(g):
            if root_member[j]:
                hits[t, j] = True
                continue
            for e in range(m):
                if conn[t, e] and member[j, edge_child[e]]:
                    hits[t, j] = True
                    break
    return hits


def group_hits(conn: np.ndarray, edge_child: np.ndarray, member: np.ndarray, root_member: np.ndarray) -> np.ndarray:
    """Per trial, which groups are touched by the connected edges.

    ``edge_child[e]`` is the lower endpoint of edge ``e``; ``member`` is a
    boolean (groups x nodes) matrix; groups flagged in ``root_member``
    contain the root and count as touched in every trial.
    """
    edge_child = np.ascontiguousarray(edge_child, dtype=np.int64)
    member = np.ascontiguousarray(member, dtype=np.bool_)
    root_member = np.ascontiguousarray(root_member, dtype=np.bool_)
    if _BACKEND == "numba":
        return _group_hits_jit(conn, edge_child, member, root_member)
    return _group_hits_np(conn, edge_child, member, root_member)


# ------------------------------------------------ two-point hashing sweep

def _full_bin_counts_np(idx, k, p):
    out = np.zeros((p - 1, p), dtype=np.int64)
    b = np.arange(p, dtype=np.int64)[:, None]
    rows = np.broadcast_to(np.arange(p)[:, None], (p, idx.shape[0]))
    for a in range(1, p):
        bins = ((a * idx[None, :] + b) % p) % k
        hit = np.zeros((p, k), dtype=np.bool_)
        hit[rows, bins] = True
        out[a - 1] = hit.sum(axis=1)
    return out


@_njit
def _full_bin_counts_jit(idx, k, p):
    out = np.zeros((p - 1, p), dtype=np.int64)
    hit = np.zeros(k, dtype=np.bool_)
    for a in range(1, p):
        for b in range(p):
            hit[:] = False
            c = 0
            for t in range(idx.shape[0]):
                j = ((a * idx[t] + b) % p) % k
                if not hit[j]:
                    hit[j] = True
                    c += 1
            out[a - 1, b] = c
    return out


def full_bin_counts(idx: np.ndarray, k: int, p: int) -> np.ndarray:
    """Number of distinct bins hit by terminal indices ``idx`` for every ``(a, b)``.

    Row ``a - 1``, column ``b``; ``a`` ranges over ``1..p-1``.
    """
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    if _BACKEND == "numba":
        return _full_bin_counts_jit(idx, int(k), int(p))
    return _full_bin_counts_np(idx, int(k), int(p))


# ------------------------------------------------ balanced separator search

def _max_component_np(indptr, indices, removed):
    n = indptr.shape[0] - 1
    seen = removed.copy()
    best = 0
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack = [s]
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for w in indices[indptr[u]:indptr[u + 1]]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        best = max(best, size)
    return best


def _first_separator_np(indptr, indices, size, limit):
    n = indptr.shape[0] - 1
    removed = np.zeros(n, dtype=np.bool_)
    for combo in combinations(range(n), size):
        removed[:] = False
        removed[list(combo)] = True
        if _max_component_np(indptr, indices, removed) <= limit:
            return np.array(combo, dtype=np.int64)
    return np.full(size, -1, dtype=np.int64)


@_njit
def _first_separator_jit(indptr, indices, size, limit):
    n = indptr.shape[0] - 1
    combo = np.arange(size)
    removed = np.zeros(n, dtype=np.bool_)
    seen = np.zeros(n, dtype=np.bool_)
    stack = np.zeros(n, dtype=np.int64)
    if size > n:
        return np.full(size, -1, dtype=np.int64)
    while True:
        removed[:] = False
        for i in range(size):
            removed[combo[i]] = True
        seen[:] = removed
        best = 0
        for s in range(n):
            if seen[s]:
                continue
            seen[s] = True
            top = 0
            stack[top] = s
            top += 1
            cnt = 0
            while top > 0:
                top -= 1
                u = stack[top]
                cnt += 1
                for q in range(indptr[u], indptr[u + 1]):
                    w = indices[q]
                    if not seen[w]:
                        seen[w] = True
                        stack[top] = w
                        top += 1
            if cnt > best:
                best = cnt
            if best > limit:
                break
        if best <= limit:
            return combo.copy()
        # next combination in lexicographic order
        i = size - 1
        while i >= 0 and combo[i] == n - size + i:
            i -= 1
        if i < 0:
            return np.full(size, -1, dtype=np.int64)
        combo[i] += 1
        for j in range(i + 1, size):
            combo[j] = combo[j - 1] + 1


def first_separator(indptr: np.ndarray, indices: np.ndarray, size: int, limit: int) -> np.ndarray:
    """Lexicographically first vertex set of exactly ``size`` nodes whose removal
    leaves components of at most ``limit`` nodes, or an array of -1 if none.

    The graph is given in CSR form over nodes ``0..n-1``.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if size < 1:
        raise ValueError("separator size must be positive")
    if _BACKEND == "numba":
        return _first_separator_jit(indptr, indices, int(size), int(limit))
    return _first_separator_np(indptr, indices, int(size), int(limit))
