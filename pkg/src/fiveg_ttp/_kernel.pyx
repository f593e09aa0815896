# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled depth-first enumerator. Same contract and visiting order as _pykernel."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc
from libc.string cimport memset

cdef enum:
    K_LOCAL = 1
    K_ADJACENT = 2
    K_FOOTHOLD = 0
    K_CHANNEL = 2
    K_OBJECTIVE = 2

MAX_ASSETS = 64


def enumerate_encoded(asset, locality, phase, initial, exfil, effect, goal, adj,
                      int max_depth, long long max_paths):
    cdef Py_ssize_t n = len(asset)
    cdef Py_ssize_t n_assets = len(adj)
    if n_assets > MAX_ASSETS:
        raise ValueError(f"compiled kernel supports at most {MAX_ASSETS} assets")
    if max_depth <= 0:
        return [], False

    cdef Py_ssize_t cells = n if n > 0 else 1
    cdef int *c_asset = <int *> malloc(cells * sizeof(int))
    cdef unsigned char *c_loc = <unsigned char *> malloc(cells)
    cdef unsigned char *c_phase = <unsigned char *> malloc(cells)
    cdef unsigned char *c_init = <unsigned char *> malloc(cells)
    cdef unsigned char *c_exfil = <unsigned char *> malloc(cells)
    cdef unsigned char *c_eff = <unsigned char *> malloc(cells)
    cdef unsigned char *c_goal = <unsigned char *> malloc(cells)
    cdef unsigned char *used = <unsigned char *> malloc(cells)
    cdef uint64_t *c_adj = <uint64_t *> malloc((n_assets + 1) * sizeof(uint64_t))
    cdef int *path = <int *> malloc((max_depth + 1) * sizeof(int))
    cdef Py_ssize_t *cursor = <Py_ssize_t *> malloc((max_depth + 1) * sizeof(Py_ssize_t))
    cdef uint64_t *foot = <uint64_t *> malloc((max_depth + 1) * sizeof(uint64_t))
    cdef uint64_t *reach = <uint64_t *> malloc((max_depth + 1) * sizeof(uint64_t))
    cdef uint64_t *chan = <uint64_t *> malloc((max_depth + 1) * sizeof(uint64_t))
    cdef int *cur = <int *> malloc((max_depth + 1) * sizeof(int))

    cdef Py_ssize_t i, c
    cdef int depth
    cdef uint64_t bit, f, nf, nr, nc
    cdef long long count = 0
    cdef bint truncated = False
    out = []

    try:
        if (not c_asset or not c_loc or not c_phase or not c_init or not c_exfil or not c_eff
                or not c_goal or not used or not c_adj or not path or not cursor or not foot
                or not reach or not chan or not cur):
            raise MemoryError()
        for i in range(n):
            c_asset[i] = asset[i]
            c_loc[i] = locality[i]
            c_phase[i] = phase[i]
            c_init[i] = 1 if initial[i] else 0
            c_exfil[i] = 1 if exfil[i] else 0
            c_eff[i] = effect[i]
            c_goal[i] = 1 if goal[i] else 0
        memset(used, 0, cells)
        for i in range(n_assets):
            c_adj[i] = <uint64_t> adj[i]

        depth = 0
        cursor[0] = 0
        foot[0] = 0
        reach[0] = 0
        chan[0] = 0
        cur[0] = 0
        while depth >= 0:
            c = cursor[depth]
            if depth == max_depth or c >= n:
                depth -= 1
                if depth >= 0:
                    used[path[depth]] = 0
                continue
            cursor[depth] = c + 1
            if used[c] or c_phase[c] < cur[depth]:
                continue
            f = foot[depth]
            if f == 0 and not c_init[c]:
                continue
            bit = (<uint64_t> 1) << c_asset[c]
            if c_loc[c] == K_LOCAL and (f & bit) == 0:
                continue
            if c_loc[c] == K_ADJACENT and (reach[depth] & bit) == 0:
                continue
            if c_exfil[c] and chan[depth] == 0:
                continue

            nf = f
            nr = reach[depth]
            nc = chan[depth]
            if c_eff[c] == K_FOOTHOLD or c_eff[c] == K_CHANNEL:
                if (f & bit) == 0:
                    nf = f | bit
                    nr = nr | bit | c_adj[c_asset[c]]
                if c_eff[c] == K_CHANNEL:
                    nc = nc | bit

            path[depth] = <int> c
            used[c] = 1
            if c_phase[c] == K_OBJECTIVE and c_goal[c]:
                if count == max_paths:
                    truncated = True
                    break
                count += 1
                out.append(tuple([path[i] for i in range(depth + 1)]))
            depth += 1
            foot[depth] = nf
            reach[depth] = nr
            chan[depth] = nc
            cur[depth] = c_phase[c] if c_phase[c] > cur[depth - 1] else cur[depth - 1]
            cursor[depth] = 0
        return out, bool(truncated)
    finally:
        free(c_asset); free(c_loc); free(c_phase); free(c_init); free(c_exfil)
        free(c_eff); free(c_goal); free(used); free(c_adj); free(path)
        free(cursor); free(foot); free(reach); free(chan); free(cur)
