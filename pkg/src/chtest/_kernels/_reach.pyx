# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled caller-graph reachability; same contract as ``_reach_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def reach_many(indptr, indices, terminal, starts):
    cdef const int[:] ptr = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[:] idx = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const unsigned char[:] term = np.ascontiguousarray(terminal, dtype=np.uint8)
    cdef const int[:] st = np.ascontiguousarray(starts, dtype=np.int32)
    cdef Py_ssize_t n = term.shape[0]
    cdef Py_ssize_t n_starts = st.shape[0]
    # seen/expanded stamps avoid clearing per start
    cdef int[:] seen = np.full(n, -1, dtype=np.int32)
    cdef int[:] expanded = np.full(n, -1, dtype=np.int32)
    cdef int[:] stack = np.empty(n + 1, dtype=np.int32)
    cdef int[:] found = np.empty(n, dtype=np.int32)
    out_ptr = np.zeros(n_starts + 1, dtype=np.int64)
    cdef long long[:] optr = out_ptr
    chunks = []
    cdef Py_ssize_t i, k, top, nfound, total = 0
    cdef int s, u, v, stamp
    for i in range(n_starts):
        s = st[i]
        stamp = <int>i
        top = 0
        nfound = 0
        stack[top] = s
        top += 1
        expanded[s] = stamp
        while top > 0:
            top -= 1
            u = stack[top]
            for k in range(ptr[u], ptr[u + 1]):
                v = idx[k]
                if seen[v] == stamp:
                    continue
                seen[v] = stamp
                found[nfound] = v
                nfound += 1
                if term[v] == 0 and expanded[v] != stamp:
                    expanded[v] = stamp
                    stack[top] = v
                    top += 1
        row = np.sort(np.asarray(found[:nfound]).copy())
        chunks.append(row)
        total += nfound
        optr[i + 1] = total
    if chunks:
        out_nodes = np.concatenate(chunks).astype(np.int32)
    else:
        out_nodes = np.zeros(0, dtype=np.int32)
    return out_ptr, out_nodes
