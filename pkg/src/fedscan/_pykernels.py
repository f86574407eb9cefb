"""Pure-Python search kernels. Semantics are mirrored exactly by ``_ckernels.pyx``.

Both kernels optimise a count-based objective over connected node subsets::

    obj(n, na, ns) = w_f * F(na, n) + w_q * (ns / n + ns / other)

where ``n`` is the subset size, ``na`` the number of significant nodes in it and
``ns`` the number of qualifying alignment pairs it holds. ``F`` is Berk-Jones
(stat 0) or Higher Criticism (stat 1), optionally normalised by a fixed scale
(norm 1) or by the all-significant score of the same size (norm 2).
"""

from math import log, sqrt

TOL = 1e-12


def _raw(stat, alpha, na, n):
    if stat == 0:
        a = na / n
        if a < alpha:
            return 0.0
        first = a * log(a / alpha) if a > 0.0 else 0.0
        second = (1.0 - a) * log((1.0 - a) / (1.0 - alpha)) if a < 1.0 else 0.0
        return n * (first + second)
    return (na - n * alpha) / sqrt(n * alpha * (1.0 - alpha))


def objective(n, na, ns, stat, alpha, norm, scale, w_f, w_q, other):
    if n == 0:
        return 0.0
    total = 0.0
    if w_f != 0.0:
        f = _raw(stat, alpha, na, n)
        if norm == 1:
            f = f / scale
        elif norm == 2:
            f = f / _raw(stat, alpha, n, n)
        total = w_f * f
    if w_q != 0.0 and ns > 0 and other > 0:
        total = total + w_q * (ns / n + ns / other)
    return total


def _better(obj, nodes, best_obj, best_nodes):
    """Higher objective, then fewer nodes, then lexicographically smaller sorted index list."""
    tol = TOL * max(1.0, abs(best_obj))
    if obj > best_obj + tol:
        return True
    if obj < best_obj - tol:
        return False
    if len(nodes) != len(best_nodes):
        return len(nodes) < len(best_nodes)
    return sorted(nodes) < sorted(best_nodes)


def greedy_search(indptr, indices, sig, cnt, seeds, stat, alpha, norm, scale, w_f, w_q, other, lookahead):
    """Seeded greedy growth with leaf pruning; returns (sorted node indices, objective)."""
    n_nodes = len(indptr) - 1
    indptr = [int(x) for x in indptr]
    indices = [int(x) for x in indices]
    sig = [int(x) for x in sig]
    cnt = [int(x) for x in cnt]
    args = (stat, alpha, norm, scale, w_f, w_q, other)

    best_nodes: list[int] = []
    best_obj = 0.0
    for seed in seeds:
        seed = int(seed)
        in_s = [False] * n_nodes
        in_s[seed] = True
        members = [seed]
        n, na, ns = 1, sig[seed], cnt[seed]
        cur = objective(n, na, ns, *args)
        for _ in range(4 * n_nodes + 4):
            changed = False
            # grow
            while True:
                cands = sorted({indices[k] for v in members for k in range(indptr[v], indptr[v + 1])
                                if not in_s[indices[k]]})
                pick, pick_obj = -1, cur
                for v in cands:
                    o = objective(n + 1, na + sig[v], ns + cnt[v], *args)
                    if o > pick_obj + TOL * max(1.0, abs(pick_obj)):
                        pick, pick_obj = v, o
                if pick >= 0:
                    in_s[pick] = True
                    members.append(pick)
                    n, na, ns, cur = n + 1, na + sig[pick], ns + cnt[pick], pick_obj
                    changed = True
                    continue
                if lookahead < 2:
                    break
                pair, pair_obj = None, cur
                for v in cands:
                    for k in range(indptr[v], indptr[v + 1]):
                        x = indices[k]
                        if in_s[x] or x == v:
                            continue
                        o = objective(n + 2, na + sig[v] + sig[x], ns + cnt[v] + cnt[x], *args)
                        if o > pair_obj + TOL * max(1.0, abs(pair_obj)):
                            pair, pair_obj = (v, x), o
                if pair is None:
                    break
                for v in pair:
                    in_s[v] = True
                    members.append(v)
                n, na, ns, cur = n + 2, na + sig[pair[0]] + sig[pair[1]], ns + cnt[pair[0]] + cnt[pair[1]], pair_obj
                changed = True
            # prune leaves
            while n > 0:
                pick, pick_obj = -1, cur
                for v in sorted(members):
                    deg = 0
                    for k in range(indptr[v], indptr[v + 1]):
                        if in_s[indices[k]]:
                            deg += 1
                    if deg > 1:
                        continue
                    o = objective(n - 1, na - sig[v], ns - cnt[v], *args)
                    if o > pick_obj + TOL * max(1.0, abs(pick_obj)):
                        pick, pick_obj = v, o
                if pick < 0:
                    break
                in_s[pick] = False
                members.remove(pick)
                n, na, ns, cur = n - 1, na - sig[pick], ns - cnt[pick], pick_obj
                changed = True
            if not changed or n == 0:
                break
        if _better(cur, members, best_obj, best_nodes):
            best_obj, best_nodes = cur, sorted(members)
    return best_nodes, best_obj


def exhaustive_search(indptr, indices, sig, cnt, stat, alpha, norm, scale, w_f, w_q, other):
    """Enumerate every connected subset (and the empty set); returns (sorted indices, objective)."""
    n_nodes = len(indptr) - 1
    nbr = [0] * n_nodes
    for v in range(n_nodes):
        for k in range(int(indptr[v]), int(indptr[v + 1])):
            nbr[v] |= 1 << int(indices[k])
    sig_mask = 0
    for v in range(n_nodes):
        if sig[v]:
            sig_mask |= 1 << v
    cnt = [int(c) for c in cnt]
    args = (stat, alpha, norm, scale, w_f, w_q, other)

    best_mask, best_obj, best_size = 0, 0.0, 0
    for mask in range(1, 1 << n_nodes):
        low = mask & -mask
        reach = low
        frontier = low
        while frontier:
            grow = 0
            f = frontier
            while f:
                b = f & -f
                grow |= nbr[b.bit_length() - 1]
                f ^= b
            frontier = grow & mask & ~reach
            reach |= frontier
        if reach != mask:
            continue
        size = mask.bit_count()
        na = (mask & sig_mask).bit_count()
        ns = 0
        m = mask
        while m:
            b = m & -m
            ns += cnt[b.bit_length() - 1]
            m ^= b
        o = objective(size, na, ns, *args)
        tol = TOL * max(1.0, abs(best_obj))
        if o > best_obj + tol:
            take = True
        elif o < best_obj - tol:
            take = False
        elif size != best_size:
            take = size < best_size
        else:
            diff = mask ^ best_mask
            take = bool(diff & -diff & mask)
        if take:
            best_mask, best_obj, best_size = mask, o, size
    nodes = [v for v in range(n_nodes) if best_mask >> v & 1]
    return nodes, best_obj
