# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination over F[U]/U^N, N <= 64.

Same pivot rule and arithmetic as ``_kernel_py``; the matrix is dense
``uint64`` with ``M[dst * n + src]``.
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free


cdef inline uint64_t clmul(uint64_t a, uint64_t b, uint64_t mask) nogil:
    cdef uint64_t r = 0
    while b and a:
        if b & 1:
            r ^= a
        a = (a << 1) & mask
        b >>= 1
    return r & mask


cdef inline int valuation(uint64_t a) nogil:
    cdef int k = 0
    while not (a & 1):
        a >>= 1
        k += 1
    return k


cdef uint64_t unit_inverse(uint64_t u, int N, uint64_t mask) nogil:
    cdef uint64_t r = u ^ 1
    cdef uint64_t x = 1
    cdef uint64_t p = 1
    cdef int i
    for i in range(N):
        p = clmul(p, r, mask)
        if not p:
            break
        x ^= p
    return x


def eliminate(int n, entries, int N):
    if N > 64:
        raise ValueError("compiled kernel supports N <= 64")
    cdef uint64_t mask = (<uint64_t>0xFFFFFFFFFFFFFFFF) if N == 64 else ((<uint64_t>1 << N) - 1)
    cdef uint64_t *M = <uint64_t *> calloc(<size_t>n * n + 1, sizeof(uint64_t))
    cdef char *alive = <char *> calloc(n + 1, sizeof(char))
    if M == NULL or alive == NULL:
        free(M)
        free(alive)
        raise MemoryError()
    cdef int s, d, x, y, w, z, v, k, bk, vk
    cdef uint64_t m, piv, uinv, b, c, e
    pairs = []
    try:
        for s, d, pm in entries:
            M[<size_t>d * n + s] ^= (<uint64_t>pm) & mask
        for s in range(n):
            alive[s] = 1
        while True:
            bk = 1000
            x = -1
            y = -1
            for s in range(n):
                if not alive[s]:
                    continue
                for d in range(n):
                    m = M[<size_t>d * n + s]
                    if m:
                        vk = valuation(m)
                        if vk < bk:
                            bk = vk
                            x = s
                            y = d
            if x < 0:
                break
            k = bk
            piv = M[<size_t>y * n + x]
            uinv = unit_inverse(piv >> k, N, mask)
            # clear row y: w' = w + c x
            for w in range(n):
                if w == x:
                    continue
                b = M[<size_t>y * n + w]
                if not b:
                    continue
                c = clmul(b >> k, uinv, mask)
                for z in range(n):
                    e = M[<size_t>z * n + x]
                    if e:
                        M[<size_t>z * n + w] ^= clmul(c, e, mask)
            # clear column x: y' = y + c z
            for z in range(n):
                if z == y:
                    continue
                e = M[<size_t>z * n + x]
                if not e:
                    continue
                c = clmul(e >> k, uinv, mask)
                for v in range(n):
                    b = M[<size_t>y * n + v]
                    if b:
                        M[<size_t>z * n + v] ^= clmul(c, b, mask)
            for v in range(n):
                M[<size_t>x * n + v] = 0
                M[<size_t>y * n + v] = 0
                M[<size_t>v * n + x] = 0
                M[<size_t>v * n + y] = 0
            alive[x] = 0
            alive[y] = 0
            pairs.append((x, y, k))
        survivors = [i for i in range(n) if alive[i]]
    finally:
        free(M)
        free(alive)
    return pairs, survivors
