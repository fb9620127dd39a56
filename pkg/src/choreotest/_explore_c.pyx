# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled run enumeration. Same contract as ``_explore_py.explore``."""

from cpython.bytes cimport PyBytes_FromStringAndSize
from libc.stdlib cimport free, malloc, realloc


cdef int* realloc_ints(int* p, int n) except NULL:
    cdef int* out = <int*> realloc(p, n * sizeof(int))
    if out == NULL:
        raise MemoryError()
    return out


cdef int* _ints(list xs) except NULL:
    cdef Py_ssize_t n = len(xs)
    cdef int* out = <int*> malloc((n if n > 0 else 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = xs[i]
    return out


def explore(int n_machines, list base, list init, list start, list t_out, list t_cm,
            list t_tgt, list has_input, int n_cm, int bound, list stable, accept):
    cdef int n_states = len(has_input)
    cdef int n_trans = len(t_out)
    cdef bint check = accept is not None
    cdef int* c_base = _ints(base)
    cdef int* c_start = _ints(start)
    cdef int* c_out = _ints(t_out)
    cdef int* c_cm = _ints(t_cm)
    cdef int* c_tgt = _ints(t_tgt)
    cdef int* c_inp = _ints(has_input)
    cdef int* c_stable = _ints(stable)
    cdef int n_stable = len(stable)
    cdef int* c_acc = _ints(list(accept) if check else [1] * n_states)
    # config = locals followed by buffer counts, contiguous for hashing as bytes
    cdef int width = n_machines + n_cm
    cdef int* conf = <int*> malloc((width if width > 0 else 1) * sizeof(int))
    cdef int cap = 64
    # per depth: enabled transitions live in a shared pool
    cdef int* pool = <int*> malloc(cap * sizeof(int))
    cdef int pool_len = 0
    cdef int depth_cap = 64
    cdef int* fr_lo = <int*> malloc(depth_cap * sizeof(int))
    cdef int* fr_hi = <int*> malloc(depth_cap * sizeof(int))
    cdef int* fr_i = <int*> malloc(depth_cap * sizeof(int))
    cdef int* fr_ok = <int*> malloc(depth_cap * sizeof(int))
    cdef int* path = <int*> malloc(depth_cap * sizeof(int))
    cdef int* undo_m = <int*> malloc(depth_cap * sizeof(int))
    cdef int* undo_prev = <int*> malloc(depth_cap * sizeof(int))
    cdef int depth = 0      # number of frames
    cdef int plen = 0       # number of fired transitions
    cdef int m, g, t, k, c, lo, hi, i, ok, parent_ok, dead, count, delta, cmi
    cdef long visited = 0
    cdef bytes key
    cdef set on_path = set()
    cdef list keys = []
    cdef list runs = []
    cdef bint entering = True

    if conf == NULL or pool == NULL or fr_lo == NULL or fr_hi == NULL or fr_i == NULL \
            or fr_ok == NULL or path == NULL or undo_m == NULL or undo_prev == NULL:
        raise MemoryError()
    try:
        for m in range(n_machines):
            conf[m] = init[m]
        for c in range(n_cm):
            conf[n_machines + c] = 0
        parent_ok = 0
        while True:
            if entering:
                entering = False
                visited += 1
                ok = parent_ok
                if check and not ok:
                    ok = 1
                    for k in range(n_stable):
                        if conf[n_machines + c_stable[k]] != 0:
                            ok = 0
                            break
                    if ok:
                        for m in range(n_machines):
                            if not c_acc[c_base[m] + conf[m]]:
                                ok = 0
                                break
                key = PyBytes_FromStringAndSize(<char*> conf, width * sizeof(int))
                if key in on_path:
                    runs.append((tuple([path[k] for k in range(plen)]), 3, bool(ok)))
                    # undo the step that led here
                    if plen > 0:
                        plen -= 1
                        t = path[plen]
                        conf[undo_m[plen]] = undo_prev[plen]
                        conf[n_machines + c_cm[t]] -= 1 if c_out[t] else -1
                    if depth == 0:
                        break
                    continue
                lo = pool_len
                count = 0
                for m in range(n_machines):
                    g = c_base[m] + conf[m]
                    for t in range(c_start[g], c_start[g + 1]):
                        if c_out[t] or conf[n_machines + c_cm[t]] > 0:
                            if pool_len + 2 > cap:
                                cap *= 2
                                pool = realloc_ints(pool, cap)
                            pool[pool_len] = t
                            pool[pool_len + 1] = m
                            pool_len += 2
                            count += 1
                if count == 0 or plen >= bound:
                    if count == 0:
                        dead = 0
                        for c in range(n_cm):
                            if conf[n_machines + c] != 0:
                                dead = 1
                                break
                        if not dead:
                            for m in range(n_machines):
                                if c_inp[c_base[m] + conf[m]]:
                                    dead = 1
                                    break
                        runs.append((tuple([path[k] for k in range(plen)]), 1 if dead else 0, bool(ok)))
                    else:
                        runs.append((tuple([path[k] for k in range(plen)]), 2, bool(ok)))
                    pool_len = lo
                    if plen > 0:
                        plen -= 1
                        t = path[plen]
                        conf[undo_m[plen]] = undo_prev[plen]
                        conf[n_machines + c_cm[t]] -= 1 if c_out[t] else -1
                    if depth == 0:
                        break
                    continue
                on_path.add(key)
                keys.append(key)
                if depth + 1 > depth_cap:
                    depth_cap *= 2
                    fr_lo = realloc_ints(fr_lo, depth_cap)
                    fr_hi = realloc_ints(fr_hi, depth_cap)
                    fr_i = realloc_ints(fr_i, depth_cap)
                    fr_ok = realloc_ints(fr_ok, depth_cap)
                    path = realloc_ints(path, depth_cap)
                    undo_m = realloc_ints(undo_m, depth_cap)
                    undo_prev = realloc_ints(undo_prev, depth_cap)
                fr_lo[depth] = lo
                fr_hi[depth] = pool_len
                fr_i[depth] = lo
                fr_ok[depth] = ok
                depth += 1
            # advance the top frame
            i = fr_i[depth - 1]
            if i >= fr_hi[depth - 1]:
                depth -= 1
                pool_len = fr_lo[depth]
                on_path.discard(keys.pop())
                if depth == 0:
                    break
                plen -= 1
                t = path[plen]
                conf[undo_m[plen]] = undo_prev[plen]
                conf[n_machines + c_cm[t]] -= 1 if c_out[t] else -1
                continue
            fr_i[depth - 1] = i + 2
            t = pool[i]
            m = pool[i + 1]
            undo_m[plen] = m
            undo_prev[plen] = conf[m]
            path[plen] = t
            plen += 1
            conf[m] = c_tgt[t]
            conf[n_machines + c_cm[t]] += 1 if c_out[t] else -1
            parent_ok = fr_ok[depth - 1]
            entering = True
    finally:
        free(c_base); free(c_start); free(c_out); free(c_cm); free(c_tgt); free(c_inp)
        free(c_stable); free(c_acc); free(conf); free(pool)
        free(fr_lo); free(fr_hi); free(fr_i); free(fr_ok); free(path); free(undo_m); free(undo_prev)
    return runs, visited

