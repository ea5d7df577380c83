# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration of membership patterns (see ``_kernels_py`` for the reference)."""

from libcpp.vector cimport vector
import numpy as np

cdef extern from *:
    int __builtin_popcount(unsigned int) nogil


def subset_table(int n, adj):
    """(size, ok) per vertex subset; ok means every member has a neighbour
    inside the subset and the subset spans at least size-1 internal edges."""
    cdef unsigned int full = 1u << n
    cdef unsigned int s, nb
    cdef int i, size, deg, ok
    cdef vector[unsigned int] a
    for i in range(n):
        a.push_back(<unsigned int>adj[i])
    sizes = np.zeros(full, dtype=np.int32)
    oks = np.zeros(full, dtype=np.uint8)
    cdef int[:] sz = sizes
    cdef unsigned char[:] okv = oks
    with nogil:
        for s in range(full):
            size = __builtin_popcount(s)
            deg = 0
            ok = 1
            for i in range(n):
                if (s >> i) & 1u:
                    nb = __builtin_popcount(a[i] & s)
                    if nb == 0:
                        ok = 0
                        break
                    deg += nb
            if ok and size > 0 and deg // 2 < size - 1:
                ok = 0
            sz[s] = size
            okv[s] = ok
    return sizes, oks


def feasible_masks(int n, int K, adj, double nu, int min_total):
    """All y patterns (bit c*n+i set iff vertex i in cluster c) passing the
    y-only constraints: per-cluster connectivity conditions, overlap caps,
    minimum total membership, and all-or-none nonempty clusters."""
    if n * K > 30:
        raise ValueError("pattern space too large")
    sizes, oks = subset_table(n, adj)
    cdef int[:] sz = sizes
    cdef unsigned char[:] okv = oks
    cdef unsigned int lowmask = (1u << n) - 1u
    cdef unsigned long long total = 1ull << (n * K)
    cdef unsigned long long mask
    cdef unsigned int sets[32]
    cdef int c, d, tot, nonempty, good, ov
    cdef vector[unsigned int] out
    with nogil:
        for mask in range(total):
            good = 1
            tot = 0
            nonempty = 0
            for c in range(K):
                sets[c] = <unsigned int>(mask >> (c * n)) & lowmask
                if not okv[sets[c]]:
                    good = 0
                    break
                tot += sz[sets[c]]
                if sz[sets[c]] > 0:
                    nonempty += 1
            if not good or tot < min_total or (nonempty != 0 and nonempty != K):
                continue
            for c in range(K):
                for d in range(c + 1, K):
                    ov = __builtin_popcount(sets[c] & sets[d])
                    if ov > nu * sz[sets[c]] + 1e-9 or ov > nu * sz[sets[d]] + 1e-9:
                        good = 0
                        break
                if not good:
                    break
            if good:
                out.push_back(<unsigned int>mask)
    res = np.empty(out.size(), dtype=np.uint32)
    cdef unsigned int[:] rv = res
    cdef size_t k
    for k in range(out.size()):
        rv[k] = out[k]
    return res
