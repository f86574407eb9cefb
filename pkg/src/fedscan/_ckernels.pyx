# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
from libc.math cimport log, sqrt, fabs

cdef double TOL = 1e-12


cdef inline double _raw(int stat, double alpha, long na, long n) nogil:
    cdef double a, first, second
    if stat == 0:
        a = <double>na / <double>n
        if a < alpha:
            return 0.0
        first = a * log(a / alpha) if a > 0.0 else 0.0
        second = (1.0 - a) * log((1.0 - a) / (1.0 - alpha)) if a < 1.0 else 0.0
        return n * (first + second)
    return (na - n * alpha) / sqrt(n * alpha * (1.0 - alpha))


cdef inline double _obj(long n, long na, long ns, int stat, double alpha, int norm, double scale,
                        double w_f, double w_q, long other) nogil:
    cdef double total = 0.0, f
    if n == 0:
        return 0.0
    if w_f != 0.0:
        f = _raw(stat, alpha, na, n)
        if norm == 1:
            f = f / scale
        elif norm == 2:
            f = f / _raw(stat, alpha, n, n)
        total = w_f * f
    if w_q != 0.0 and ns > 0 and other > 0:
        total = total + w_q * (<double>ns / <double>n + <double>ns / <double>other)
    return total


cdef inline double _tol(double x) nogil:
    return TOL * (fabs(x) if fabs(x) > 1.0 else 1.0)


def objective(long n, long na, long ns, int stat, double alpha, int norm, double scale,
              double w_f, double w_q, long other):
    return _obj(n, na, ns, stat, alpha, norm, scale, w_f, w_q, other)


def greedy_search(indptr_in, indices_in, sig_in, cnt_in, seeds_in, int stat, double alpha, int norm,
                  double scale, double w_f, double w_q, long other, int lookahead):
    cdef int[::1] indptr = np.ascontiguousarray(indptr_in, dtype=np.int32)
    cdef int[::1] indices = np.ascontiguousarray(indices_in, dtype=np.int32)
    cdef int[::1] sig = np.ascontiguousarray(sig_in, dtype=np.int32)
    cdef int[::1] cnt = np.ascontiguousarray(cnt_in, dtype=np.int32)
    cdef int[::1] seeds = np.ascontiguousarray(seeds_in, dtype=np.int32)
    cdef Py_ssize_t n_nodes = indptr.shape[0] - 1
    cdef unsigned char[::1] in_s = np.zeros(n_nodes, dtype=np.uint8)
    cdef unsigned char[::1] is_cand = np.zeros(n_nodes, dtype=np.uint8)
    cdef int[::1] best = np.zeros(n_nodes, dtype=np.int32)
    cdef int[::1] cur_sorted = np.zeros(n_nodes, dtype=np.int32)
    cdef Py_ssize_t best_n = 0
    cdef double best_obj = 0.0
    cdef Py_ssize_t si, v, k, x, it, i, cn
    cdef long n, na, ns
    cdef double cur, o, pick_obj
    cdef int pick, pick2, deg, changed, take

    for si in range(seeds.shape[0]):
        for v in range(n_nodes):
            in_s[v] = 0
        v = seeds[si]
        in_s[v] = 1
        n = 1
        na = sig[v]
        ns = cnt[v]
        cur = _obj(n, na, ns, stat, alpha, norm, scale, w_f, w_q, other)
        for it in range(4 * n_nodes + 4):
            changed = 0
            while True:
                for v in range(n_nodes):
                    is_cand[v] = 0
                for v in range(n_nodes):
                    if in_s[v]:
                        for k in range(indptr[v], indptr[v + 1]):
                            if not in_s[indices[k]]:
                                is_cand[indices[k]] = 1
                pick = -1
                pick_obj = cur
                for v in range(n_nodes):
                    if is_cand[v]:
                        o = _obj(n + 1, na + sig[v], ns + cnt[v], stat, alpha, norm, scale, w_f, w_q, other)
                        if o > pick_obj + _tol(pick_obj):
                            pick = <int>v
                            pick_obj = o
                if pick >= 0:
                    in_s[pick] = 1
                    n += 1
                    na += sig[pick]
                    ns += cnt[pick]
                    cur = pick_obj
                    changed = 1
                    continue
                if lookahead < 2:
                    break
                pick = -1
                pick2 = -1
                pick_obj = cur
                for v in range(n_nodes):
                    if not is_cand[v]:
                        continue
                    for k in range(indptr[v], indptr[v + 1]):
                        x = indices[k]
                        if in_s[x] or x == v:
                            continue
                        o = _obj(n + 2, na + sig[v] + sig[x], ns + cnt[v] + cnt[x],
                                 stat, alpha, norm, scale, w_f, w_q, other)
                        if o > pick_obj + _tol(pick_obj):
                            pick = <int>v
                            pick2 = <int>x
                            pick_obj = o
                if pick < 0:
                    break
                in_s[pick] = 1
                in_s[pick2] = 1
                n += 2
                na += sig[pick] + sig[pick2]
                ns += cnt[pick] + cnt[pick2]
                cur = pick_obj
                changed = 1
            while n > 0:
                pick = -1
                pick_obj = cur
                for v in range(n_nodes):
                    if not in_s[v]:
                        continue
                    deg = 0
                    for k in range(indptr[v], indptr[v + 1]):
                        if in_s[indices[k]]:
                            deg += 1
                    if deg > 1:
                        continue
                    o = _obj(n - 1, na - sig[v], ns - cnt[v], stat, alpha, norm, scale, w_f, w_q, other)
                    if o > pick_obj + _tol(pick_obj):
                        pick = <int>v
                        pick_obj = o
                if pick < 0:
                    break
                in_s[pick] = 0
                n -= 1
                na -= sig[pick]
                ns -= cnt[pick]
                cur = pick_obj
                changed = 1
            if not changed or n == 0:
                break

        cn = 0
        for v in range(n_nodes):
            if in_s[v]:
                cur_sorted[cn] = <int>v
                cn += 1
        if cur > best_obj + _tol(best_obj):
            take = 1
        elif cur < best_obj - _tol(best_obj):
            take = 0
        elif cn != best_n:
            take = cn < best_n
        else:
            take = 0
            for i in range(cn):
                if cur_sorted[i] != best[i]:
                    take = cur_sorted[i] < best[i]
                    break
        if take:
            best_obj = cur
            best_n = cn
            for i in range(cn):
                best[i] = cur_sorted[i]
    return [int(best[i]) for i in range(best_n)], best_obj


def exhaustive_search(indptr_in, indices_in, sig_in, cnt_in, int stat, double alpha, int norm,
                      double scale, double w_f, double w_q, long other):
    cdef int[::1] indptr = np.ascontiguousarray(indptr_in, dtype=np.int32)
    cdef int[::1] indices = np.ascontiguousarray(indices_in, dtype=np.int32)
    cdef int[::1] sig = np.ascontiguousarray(sig_in, dtype=np.int32)
    cdef int[::1] cnt = np.ascontiguousarray(cnt_in, dtype=np.int32)
    cdef Py_ssize_t n_nodes = indptr.shape[0] - 1
    if n_nodes > 30:
        raise ValueError("exhaustive search limited to 30 nodes")
    cdef unsigned long long nbr[32]
    cdef unsigned long long sig_mask = 0, mask, low, reach, frontier, grow, f, b, m, diff
    cdef unsigned long long best_mask = 0, limit = (<unsigned long long>1) << n_nodes
    cdef double best_obj = 0.0, o
    cdef long size, na, ns, best_size = 0
    cdef Py_ssize_t v, k
    cdef int take
    for v in range(n_nodes):
        nbr[v] = 0
        for k in range(indptr[v], indptr[v + 1]):
            nbr[v] |= (<unsigned long long>1) << indices[k]
        if sig[v]:
            sig_mask |= (<unsigned long long>1) << v
    mask = 1
    while mask < limit:
        low = mask & (~mask + 1)
        reach = low
        frontier = low
        while frontier:
            grow = 0
            f = frontier
            while f:
                b = f & (~f + 1)
                grow |= nbr[__builtin_ctzll(b)]
                f ^= b
            frontier = grow & mask & ~reach
            reach |= frontier
        if reach == mask:
            size = __builtin_popcountll(mask)
            na = __builtin_popcountll(mask & sig_mask)
            ns = 0
            m = mask
            while m:
                b = m & (~m + 1)
                ns += cnt[__builtin_ctzll(b)]
                m ^= b
            o = _obj(size, na, ns, stat, alpha, norm, scale, w_f, w_q, other)
            if o > best_obj + _tol(best_obj):
                take = 1
            elif o < best_obj - _tol(best_obj):
                take = 0
            elif size != best_size:
                take = size < best_size
            else:
                diff = mask ^ best_mask
                take = (diff & (~diff + 1) & mask) != 0
            if take:
                best_mask = mask
                best_obj = o
                best_size = size
        mask += 1
    return [int(v) for v in range(n_nodes) if (best_mask >> v) & 1], best_obj


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil
