"""Pure-Python implementations of the hot per-day kernels.

These mirror ``_kernels.pyx`` exactly: same inputs, same outputs, no RNG
access inside.  Randomness is drawn by the caller and passed in, so the
compiled and fallback paths stay bit-identical.
"""
import numpy as np

MAIN, CASUAL, ONETIME = 0, 1, 2
S, E, I, R = 0, 1, 2, 3


def _key(a, b, n):
    return a * n + b if a < b else b * n + a


def pair_stubs(stubs, n_nodes):
    """Pair consecutive stubs into edges, repairing self-loops and duplicates.

    A bad pair first tries to swap its second stub with a later pair, then
    with an already accepted pair.  Pairs that cannot be repaired are
    dropped; the count is returned so callers can audit it.
    """
    stubs = np.asarray(stubs, dtype=np.int64)
    m = stubs.size // 2
    a = stubs[0 : 2 * m : 2].tolist()
    b = stubs[1 : 2 * m : 2].tolist()
    n = int(n_nodes)
    keep = [True] * m
    seen = set()
    dropped = 0
    for i in range(m):
        ai = a[i]
        if ai == b[i] or _key(ai, b[i], n) in seen:
            fixed = False
            for j in range(i + 1, m):
                bj = b[j]
                if ai != bj and _key(ai, bj, n) not in seen:
                    b[i], b[j] = bj, b[i]
                    fixed = True
                    break
            if not fixed:
                for j in range(i):
                    if not keep[j]:
                        continue
                    aj, bj, bi = a[j], b[j], b[i]
                    if ai == bj or aj == bi:
                        continue
                    kj = _key(aj, bj, n)
                    k1 = _key(ai, bj, n)
                    k2 = _key(aj, bi, n)
                    if k1 == k2:
                        continue
                    if (k1 != kj and k1 in seen) or (k2 != kj and k2 in seen):
                        continue
                    seen.discard(kj)
                    seen.add(k2)
                    b[i], b[j] = bj, bi
                    fixed = True
                    break
            if not fixed:
                keep[i] = False
                dropped += 1
                continue
        seen.add(_key(ai, b[i], n))
    mask = np.array(keep, dtype=bool)
    u = np.array(a, dtype=np.int64)[mask] if m else np.empty(0, np.int64)
    v = np.array(b, dtype=np.int64)[mask] if m else np.empty(0, np.int64)
    return u, v, dropped


def pair_waitlist(wait, excluded, existing_keys, n_nodes):
    """Wait-list matching in list order.

    Each unpaired node takes the first later unpaired node that is not
    itself, not its (or the candidate's) most recent ex-partner, and not
    already a partner of this kind (``existing_keys`` is sorted).  Nodes left
    over by the greedy pass are then matched by splitting a pair formed in
    this call: leftovers x, y and formed pair (p, q) become (x, p), (y, q)
    or (x, q), (y, p) when both new ties are allowed.
    Returns ``(u, v, unpaired_mask)``.
    """
    wait = np.asarray(wait, dtype=np.int64)
    existing_keys = np.asarray(existing_keys, dtype=np.int64)
    m = wait.size
    w = wait.tolist()
    excl = excluded
    n = int(n_nodes)
    paired = [False] * m
    local = set()
    out_u, out_v = [], []
    n_existing = existing_keys.size

    def ok(x, y):
        if x == y or excl[x] == y or excl[y] == x:
            return False
        k = _key(x, y, n)
        if k in local:
            return False
        if n_existing:
            pos = int(np.searchsorted(existing_keys, k))
            if pos < n_existing and existing_keys[pos] == k:
                return False
        return True

    for i in range(m):
        if paired[i]:
            continue
        x = w[i]
        for j in range(i + 1, m):
            if paired[j] or not ok(x, w[j]):
                continue
            paired[i] = paired[j] = True
            local.add(_key(x, w[j], n))
            out_u.append(x)
            out_v.append(w[j])
            break

    for i in range(m):
        if paired[i]:
            continue
        x = w[i]
        for j in range(i + 1, m):
            if paired[j]:
                continue
            y = w[j]
            done = False
            for f in range(len(out_u)):
                p, q = out_u[f], out_v[f]
                kpq = _key(p, q, n)
                local.discard(kpq)
                for a, b in ((p, q), (q, p)):
                    if ok(x, a) and ok(y, b) and _key(x, a, n) != _key(y, b, n):
                        out_u[f], out_v[f] = x, a
                        out_u.append(y)
                        out_v.append(b)
                        local.add(_key(x, a, n))
                        local.add(_key(y, b, n))
                        paired[i] = paired[j] = True
                        done = True
                        break
                if done:
                    break
                local.add(kpq)
            if done:
                break
    return (
        np.array(out_u, dtype=np.int64),
        np.array(out_v, dtype=np.int64),
        ~np.array(paired, dtype=bool),
    )


def spread(u, v, kind, state, isolating, partial, susceptibility,
           contact_prob, beta, u_contact, u_transmit, contacts):
    """Evaluate every live edge once for contact and transmission.

    ``contacts`` (N x 3) is incremented in place for the susceptible end of
    each realised serodiscordant contact.  Returns ``(source, target, kind)``
    of new infections, first success per target in edge order.
    """
    u = np.asarray(u)
    v = np.asarray(v)
    kind = np.asarray(kind)
    su = state[u]
    sv = state[v]
    fwd = (su == I) & (sv == S)
    rev = (sv == I) & (su == S)
    disc = np.flatnonzero(fwd | rev)
    if disc.size == 0:
        empty = np.empty(0, np.int64)
        return empty, empty.copy(), empty.copy()
    src = np.where(fwd[disc], u[disc], v[disc]).astype(np.int64)
    tgt = np.where(fwd[disc], v[disc], u[disc]).astype(np.int64)
    k = kind[disc].astype(np.int64)
    p = np.asarray(contact_prob, dtype=np.float64)[k]
    iso = isolating[src]
    if partial:
        mult = np.where(k == ONETIME, 0.0, 0.5)
    else:
        mult = np.zeros(k.size)
    p = np.where(iso, p * mult, p)
    contact = u_contact[disc] < p
    np.add.at(contacts, (tgt[contact], k[contact]), 1)
    hit = contact & (u_transmit[disc] < beta * susceptibility[tgt])
    idx = np.flatnonzero(hit)
    if idx.size == 0:
        empty = np.empty(0, np.int64)
        return empty, empty.copy(), empty.copy()
    _, first = np.unique(tgt[idx], return_index=True)
    sel = idx[np.sort(first)]
    return src[sel], tgt[sel], k[sel]
