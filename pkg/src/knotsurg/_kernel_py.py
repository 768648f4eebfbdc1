"""Pure-Python elimination over F[U]/U^N (fallback for the compiled kernel).

Ring elements are ints: bit k is the coefficient of U^k.  The complex is a
sparse matrix ``D[dst][src]``.  Each step cancels the entry of least
U-valuation, ties broken by (src, dst) index.
"""


def clmul(a, b, N):
    mask = (1 << N) - 1
    r = 0
    while b and a:
        if b & 1:
            r ^= a
        a = (a << 1) & mask
        b >>= 1
    return r & mask


def valuation(a):
    return (a & -a).bit_length() - 1


def unit_inverse(u, N):
    # x = sum (1 + u)^i, finite since 1 + u is nilpotent
    r = u ^ 1
    x = 1
    p = 1
    for _ in range(N):
        p = clmul(p, r, N)
        if not p:
            break
        x ^= p
    return x


def eliminate(n, entries, N):
    """Local Smith reduction.

    ``entries`` is an iterable of ``(src, dst, mask)``.  Returns
    ``(pairs, survivors)`` where ``pairs`` lists ``(src, dst, k)`` for each
    cancelled pivot of valuation ``k`` and ``survivors`` lists untouched
    generator indices in increasing order.
    """
    full = (1 << N) - 1
    cols = [dict() for _ in range(n)]  # cols[src][dst]
    rows = [dict() for _ in range(n)]  # rows[dst][src]
    for s, d, m in entries:
        m &= full
        if not m:
            continue
        v = cols[s].get(d, 0) ^ m
        if v:
            cols[s][d] = v
            rows[d][s] = v
        else:
            cols[s].pop(d, None)
            rows[d].pop(s, None)

    def setent(s, d, v):
        if v:
            cols[s][d] = v
            rows[d][s] = v
        else:
            cols[s].pop(d, None)
            rows[d].pop(s, None)

    alive = [True] * n
    pairs = []
    while True:
        best = None
        for s in range(n):
            if not alive[s]:
                continue
            for d, m in cols[s].items():
                key = (valuation(m), s, d)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        k, x, y = best
        piv = cols[x][y]
        uinv = unit_inverse(piv >> k, N)
        # clear row y: w' = w + c x
        for w, b in list(rows[y].items()):
            if w == x:
                continue
            c = clmul(b >> k, uinv, N)
            for z, e in list(cols[x].items()):
                setent(w, z, cols[w].get(z, 0) ^ clmul(c, e, N))
        # clear column x: y' = y + c z
        for z, e in list(cols[x].items()):
            if z == y:
                continue
            c = clmul(e >> k, uinv, N)
            for v, a in list(rows[y].items()):
                setent(v, z, cols[v].get(z, 0) ^ clmul(c, a, N))
        # drop both generators, residual entries are precision junk
        for g in (x, y):
            for d in list(cols[g]):
                setent(g, d, 0)
            for s in list(rows[g]):
                setent(s, g, 0)
            alive[g] = False
        pairs.append((x, y, k))
    survivors = [i for i in range(n) if alive[i]]
    return pairs, survivors
