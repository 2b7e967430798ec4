"""Hot inner loops with a numba path and a pure-numpy fallback.

Set ``SPECROUTE_DISABLE_NUMBA=1`` to force the numpy path (also used when
numba is not importable).  Both paths are always importable from
``NUMPY_KERNELS`` / ``NUMBA_KERNELS`` so tests and the benchmark can compare
them in one process.

Index convention everywhere: site 0 is the most significant base-``d`` digit.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("SPECROUTE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


# --------------------------------------------------------------------------
# level permutations on one or two sites


def _level_map_numpy(n: int, d: int, sites: np.ndarray, table: np.ndarray) -> np.ndarray:
    size = d**n
    idx = np.arange(size, dtype=np.int64)
    strides = [d ** (n - 1 - int(s)) for s in sites]
    digits = [(idx // st) % d for st in strides]
    local = np.zeros(size, dtype=np.int64)
    for dig in digits:
        local = local * d + dig
    new_local = table[local]
    dest = idx.copy()
    for j in range(len(strides) - 1, -1, -1):
        dest += (new_local % d - digits[j]) * strides[j]
        new_local = new_local // d
    return dest


def _level_map_loop(n, d, sites, table):
    size = d**n
    nsite = sites.shape[0]
    strides = np.empty(nsite, np.int64)
    for j in range(nsite):
        strides[j] = d ** (n - 1 - sites[j])
    out = np.empty(size, np.int64)
    for idx in range(size):
        local = 0
        for j in range(nsite):
            local = local * d + (idx // strides[j]) % d
        new = table[local]
        dest = idx
        old = local
        for j in range(nsite - 1, -1, -1):
            dest += (new % d - old % d) * strides[j]
            new //= d
            old //= d
        out[idx] = dest
    return out


# --------------------------------------------------------------------------
# dense d x d operator on one site


def _site_operator_numpy(psi: np.ndarray, n: int, d: int, site: int, op: np.ndarray) -> np.ndarray:
    stride = d ** (n - 1 - site)
    t = psi.reshape(-1, d, stride)
    return np.einsum("ab,obi->oai", op, t).reshape(-1)


def _site_operator_loop(psi, n, d, site, op):
    stride = d ** (n - 1 - site)
    size = psi.shape[0]
    out = np.zeros_like(psi)
    outer = size // (stride * d)
    for o in range(outer):
        base = o * stride * d
        for inner in range(stride):
            for a in range(d):
                acc = 0j
                for b in range(d):
                    acc += op[a, b] * psi[base + b * stride + inner]
                out[base + a * stride + inner] = acc
    return out


# --------------------------------------------------------------------------
# exhaustive minimum routing rounds
#
# adj[v] is a bitmask of neighbours.  Vertices are split into at most R
# rounds by enumerating restricted-growth strings; every round is then
# checked for K-colourability by enumerating all K**|round| bus labellings.


def _make_min_rounds(jit):
    @jit
    def part_k_colourable(adj, members, size, K):
        if size == 0:
            return True
        labels = np.zeros(size, np.int64)
        while True:
            ok = True
            for i in range(size):
                vi = members[i]
                for j in range(i):
                    if labels[i] == labels[j] and (adj[vi] >> members[j]) & 1:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return True
            pos = 0
            while pos < size:
                labels[pos] += 1
                if labels[pos] < K:
                    break
                labels[pos] = 0
                pos += 1
            if pos == size:
                return False

    @jit
    def partition_feasible(adj, m, K, R):
        rounds = np.zeros(m, np.int64)
        maxima = np.zeros(m, np.int64)
        members = np.zeros(m, np.int64)
        while True:
            ok = True
            for r in range(R):
                size = 0
                for v in range(m):
                    if rounds[v] == r:
                        members[size] = v
                        size += 1
                if not part_k_colourable(adj, members, size, K):
                    ok = False
                    break
            if ok:
                return True
            # next restricted-growth string with at most R blocks
            pos = m - 1
            while pos > 0:
                limit = min(maxima[pos - 1] + 1, R - 1)
                if rounds[pos] < limit:
                    rounds[pos] += 1
                    break
                rounds[pos] = 0
                pos -= 1
            if pos == 0:
                return False
            for v in range(pos, m):
                maxima[v] = max(maxima[v - 1], rounds[v])

    @jit
    def min_rounds(adj, m, K):
        if m == 0:
            return 0
        for R in range(1, m + 1):
            if partition_feasible(adj, m, K, R):
                return R
        return m

    return min_rounds


NUMPY_KERNELS = {
    "level_map": _level_map_numpy,
    "site_operator": _site_operator_numpy,
    "min_rounds": _make_min_rounds(lambda f: f),
}

if HAVE_NUMBA:
    _njit = numba.njit(cache=True)
    NUMBA_KERNELS = {
        "level_map": _njit(_level_map_loop),
        "site_operator": _njit(_site_operator_loop),
        "min_rounds": _make_min_rounds(numba.njit),
    }
else:  # pragma: no cover
    NUMBA_KERNELS = dict(NUMPY_KERNELS)

USING_NUMBA = HAVE_NUMBA and not _DISABLE
BACKEND = "numba" if USING_NUMBA else "numpy"
_ACTIVE = NUMBA_KERNELS if USING_NUMBA else NUMPY_KERNELS


def level_map(n: int, d: int, sites, table) -> np.ndarray:
    """Destination index of every basis index under a local level permutation.

    ``table`` maps the combined local level ``sum_j v_j d**(len-1-j)`` of the
    listed sites to its image.
    """
    sites = np.asarray(sites, dtype=np.int64)
    table = np.asarray(table, dtype=np.int64)
    return _ACTIVE["level_map"](n, d, sites, table)


def site_operator(psi: np.ndarray, n: int, d: int, site: int, op: np.ndarray) -> np.ndarray:
    """Apply a dense ``d x d`` operator to one site of a state vector."""
    return _ACTIVE["site_operator"](
        np.ascontiguousarray(psi, dtype=np.complex128), n, d, site, np.ascontiguousarray(op, dtype=np.complex128)
    )


def min_rounds(adj_masks, K: int) -> int:
    adj = np.asarray(adj_masks, dtype=np.int64)
    return int(_ACTIVE["min_rounds"](adj, adj.shape[0], K))
