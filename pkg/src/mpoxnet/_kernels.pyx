# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled per-day kernels; behaviour must match ``_kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

cnp.import_array()

cdef enum:
    S_STATE = 0
    I_STATE = 2
    ONETIME = 2


cdef inline int64_t _key(int64_t a, int64_t b, int64_t n) noexcept nogil:
    if a < b:
        return a * n + b
    return b * n + a


cdef inline bint _in_sorted(const int64_t[::1] keys, int64_t k) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = keys.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < k:
            lo = mid + 1
        else:
            hi = mid
    return lo < keys.shape[0] and keys[lo] == k


def pair_stubs(stubs, n_nodes):
    cdef int64_t[::1] st = np.ascontiguousarray(stubs, dtype=np.int64)
    cdef Py_ssize_t m = st.shape[0] // 2
    cdef int64_t n = n_nodes
    a_arr = np.empty(m, dtype=np.int64)
    b_arr = np.empty(m, dtype=np.int64)
    keep_arr = np.ones(m, dtype=np.uint8)
    cdef int64_t[::1] a = a_arr
    cdef int64_t[::1] b = b_arr
    cdef unsigned char[::1] keep = keep_arr
    cdef unordered_set[int64_t] seen
    cdef Py_ssize_t i, j
    cdef int64_t ai, aj, bi, bj, kj, k1, k2
    cdef bint fixed
    cdef long dropped = 0
    for i in range(m):
        a[i] = st[2 * i]
        b[i] = st[2 * i + 1]
    with nogil:
        for i in range(m):
            ai = a[i]
            if ai == b[i] or seen.count(_key(ai, b[i], n)):
                fixed = False
                for j in range(i + 1, m):
                    bj = b[j]
                    if ai != bj and not seen.count(_key(ai, bj, n)):
                        b[j] = b[i]
                        b[i] = bj
                        fixed = True
                        break
                if not fixed:
                    for j in range(i):
                        if not keep[j]:
                            continue
                        aj = a[j]
                        bj = b[j]
                        bi = b[i]
                        if ai == bj or aj == bi:
                            continue
                        kj = _key(aj, bj, n)
                        k1 = _key(ai, bj, n)
                        k2 = _key(aj, bi, n)
                        if k1 == k2:
                            continue
                        if (k1 != kj and seen.count(k1)) or (k2 != kj and seen.count(k2)):
                            continue
                        seen.erase(kj)
                        seen.insert(k2)
                        b[i] = bj
                        b[j] = bi
                        fixed = True
                        break
                if not fixed:
                    keep[i] = 0
                    dropped += 1
                    continue
            seen.insert(_key(ai, b[i], n))
    mask = keep_arr.astype(bool)
    return a_arr[mask], b_arr[mask], int(dropped)


cdef inline bint _can_pair(int64_t x, int64_t y, const int64_t[::1] excl,
                           const int64_t[::1] keys, unordered_set[int64_t]& local,
                           int64_t n) noexcept nogil:
    cdef int64_t k
    if x == y or excl[x] == y or excl[y] == x:
        return False
    k = _key(x, y, n)
    if local.count(k) or _in_sorted(keys, k):
        return False
    return True


def pair_waitlist(wait, excluded, existing_keys, n_nodes):
    cdef const int64_t[::1] w = np.ascontiguousarray(wait, dtype=np.int64)
    cdef const int64_t[::1] excl = np.ascontiguousarray(excluded, dtype=np.int64)
    cdef const int64_t[::1] keys = np.ascontiguousarray(existing_keys, dtype=np.int64)
    cdef int64_t n = n_nodes
    cdef Py_ssize_t m = w.shape[0], i, j, f, t
    paired_arr = np.zeros(m, dtype=np.uint8)
    cdef unsigned char[::1] paired = paired_arr
    cdef unordered_set[int64_t] local
    cdef vector[int64_t] out_u, out_v
    cdef int64_t x, y, p, q, a, b, kpq
    cdef bint done
    with nogil:
        for i in range(m):
            if paired[i]:
                continue
            x = w[i]
            for j in range(i + 1, m):
                if paired[j] or not _can_pair(x, w[j], excl, keys, local, n):
                    continue
                paired[i] = 1
                paired[j] = 1
                local.insert(_key(x, w[j], n))
                out_u.push_back(x)
                out_v.push_back(w[j])
                break
        for i in range(m):
            if paired[i]:
                continue
            x = w[i]
            done = False
            for j in range(i + 1, m):
                if paired[j]:
                    continue
                y = w[j]
                for f in range(<Py_ssize_t>out_u.size()):
                    p = out_u[f]
                    q = out_v[f]
                    kpq = _key(p, q, n)
                    local.erase(kpq)
                    for t in range(2):
                        if t == 0:
                            a = p
                            b = q
                        else:
                            a = q
                            b = p
                        if (_can_pair(x, a, excl, keys, local, n) and _can_pair(y, b, excl, keys, local, n)
                                and _key(x, a, n) != _key(y, b, n)):
                            out_u[f] = x
                            out_v[f] = a
                            out_u.push_back(y)
                            out_v.push_back(b)
                            local.insert(_key(x, a, n))
                            local.insert(_key(y, b, n))
                            paired[i] = 1
                            paired[j] = 1
                            done = True
                            break
                    if done:
                        break
                    local.insert(kpq)
                if done:
                    break
    u = np.array([out_u[i] for i in range(out_u.size())], dtype=np.int64)
    v = np.array([out_v[i] for i in range(out_v.size())], dtype=np.int64)
    return u, v, paired_arr == 0


def spread(u, v, kind, state, isolating, partial, susceptibility,
           contact_prob, double beta, u_contact, u_transmit, contacts):
    cdef const int64_t[::1] eu = np.ascontiguousarray(u, dtype=np.int64)
    cdef const int64_t[::1] ev = np.ascontiguousarray(v, dtype=np.int64)
    cdef const int64_t[::1] ek = np.ascontiguousarray(kind, dtype=np.int64)
    cdef const signed char[::1] st = np.ascontiguousarray(state, dtype=np.int8)
    cdef const unsigned char[::1] iso = np.ascontiguousarray(isolating, dtype=np.uint8)
    cdef const double[::1] sus = np.ascontiguousarray(susceptibility, dtype=np.float64)
    cdef const double[::1] cp = np.ascontiguousarray(contact_prob, dtype=np.float64)
    cdef const double[::1] uc = np.ascontiguousarray(u_contact, dtype=np.float64)
    cdef const double[::1] ut = np.ascontiguousarray(u_transmit, dtype=np.float64)
    cdef int64_t[:, ::1] cnt = contacts
    cdef bint part = bool(partial)
    cdef Py_ssize_t e, n_e = eu.shape[0]
    cdef int64_t src, tgt, k
    cdef double p
    cdef unordered_set[int64_t] infected
    cdef vector[int64_t] rs, rt, rk
    with nogil:
        for e in range(n_e):
            if st[eu[e]] == I_STATE and st[ev[e]] == S_STATE:
                src = eu[e]
                tgt = ev[e]
            elif st[ev[e]] == I_STATE and st[eu[e]] == S_STATE:
                src = ev[e]
                tgt = eu[e]
            else:
                continue
            k = ek[e]
            p = cp[k]
            if iso[src]:
                if part and k != ONETIME:
                    p = p * 0.5
                else:
                    p = 0.0
            if not (uc[e] < p):
                continue
            cnt[tgt, k] += 1
            if ut[e] < beta * sus[tgt] and not infected.count(tgt):
                infected.insert(tgt)
                rs.push_back(src)
                rt.push_back(tgt)
                rk.push_back(k)
    cdef Py_ssize_t r, nr = rs.size()
    out_s = np.empty(nr, dtype=np.int64)
    out_t = np.empty(nr, dtype=np.int64)
    out_k = np.empty(nr, dtype=np.int64)
    for r in range(nr):
        out_s[r] = rs[r]
        out_t[r] = rt[r]
        out_k[r] = rk[r]
    return out_s, out_t, out_k
