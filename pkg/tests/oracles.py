"""Independent oracles.  Nothing here imports the package.

* Mapping cone of n-surgery on an L-space knot, with V_s from the Alexander
  polynomial and homology by diagonalising over GF(2)[U], read U-adically.
* Closed form for d-invariants of L(p, 1).
* Alexander gradings of a staircase from its step lengths.
"""

from fractions import Fraction

# ---------- GF(2)[x] with int-encoded polynomials


def pdeg(a):
    return a.bit_length() - 1


def pmul(a, b):
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def pdivmod(a, b):
    q = 0
    db = pdeg(b)
    while a and pdeg(a) >= db:
        s = pdeg(a) - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def diagonalize(M):
    """Diagonal entries of a diagonal form of ``M`` over GF(2)[x]."""
    M = [row[:] for row in M]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    diag = []
    r0 = 0
    while r0 < rows and r0 < cols:
        best = None
        for i in range(r0, rows):
            for j in range(r0, cols):
                if M[i][j] and (best is None or pdeg(M[i][j]) < best[0]):
                    best = (pdeg(M[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        M[r0], M[i] = M[i], M[r0]
        for row in M:
            row[r0], row[j] = row[j], row[r0]
        p = M[r0][r0]
        clean = True
        for i in range(r0 + 1, rows):
            if M[i][r0]:
                q, rem = pdivmod(M[i][r0], p)
                M[i] = [a ^ pmul(q, b) for a, b in zip(M[i], M[r0])]
                clean &= rem == 0
        for j in range(r0 + 1, cols):
            if M[r0][j]:
                q, rem = pdivmod(M[r0][j], p)
                for row in M:
                    row[j] ^= pmul(q, row[r0])
                clean &= rem == 0
        if clean:
            diag.append(p)
            r0 += 1
    return diag


# ---------- L-space knots


def staircase_alexander(steps):
    """Alexander gradings of the staircase generators, top first."""
    top = Fraction(sum(steps), 2)
    out = [top]
    for n in steps:
        out.append(out[-1] - n)
    return out


def v_function(steps):
    """``s -> V_s`` for the L-space knot with the given staircase."""
    A = staircase_alexander(steps)
    coeff = {}
    for k, a in enumerate(A):
        coeff[int(a)] = coeff.get(int(a), 0) + (-1) ** k

    def V(s):
        if s < 0:
            return V(-s) - s
        return sum(j * coeff.get(s + j, 0) for j in range(1, 64))

    return V


def cone_homology(n, V, b=12):
    """Towers and torsion orders of the truncated mapping cone.

    A_s for |s| <= b and B_t for -b+n <= t <= b; v_s = U^V_s, h_s = U^V_-s.
    """
    A = list(range(-b, b + 1))
    B = list(range(-b + n, b + 1))
    bi = {t: k for k, t in enumerate(B)}
    M = [[0] * len(A) for _ in B]
    for k, s in enumerate(A):
        if s in bi:
            M[bi[s]][k] ^= 1 << V(s)
        if s + n in bi:
            M[bi[s + n]][k] ^= 1 << V(-s)
    diag = diagonalize(M)
    rank = len(diag)
    towers = (len(A) - rank) + (len(B) - rank)
    torsion = []
    for d in diag:
        k = (d & -d).bit_length() - 1  # U-adic valuation; the rest is a unit
        if k:
            torsion.append(k)
    return towers, tuple(sorted(torsion))


def unknot_V(s):
    return max(0, -s)


def trefoil_V(s):
    return 1 if s == 0 else max(0, -s)


def lens_d_closed(p, i):
    """d(L(p, 1), i) with the sign convention of +p surgery on the unknot."""
    return Fraction((2 * i - p) ** 2 - p, 4 * p)


def surgery_d(p, V):
    """``i -> d(S^3_p(K), i)`` for an L-space knot K with the given V.

    Positive p uses d(L(p,1), i) - 2 max(V_i, V_{p-i}).  Negative p goes
    through the mirror, whose V-function is that of the unknot.
    """
    if p > 0:
        return {i: lens_d_closed(p, i) - 2 * max(V(i), V(p - i)) for i in range(p)}
    q = -p
    return {i: -lens_d_closed(q, i) for i in range(q)}


# ---------- the triangle series by exact division


def tri(s):
    return s * (s - 1) // 2


def n_summands(N):
    """Number of summands of alpha that can reach below U-level N."""
    s = 1
    while tri(s) < N:
        s += 1
    return s


def alpha_terms(S):
    out = set()
    for s in range(1, S + 1):
        m = tri(s)
        out ^= {(m + s, m), (m, m + s)}
    return out


def div_one_plus(terms, var, N):
    """Quotient by 1 + x_var in F[U_, V_] modulo monomials with both
    exponents >= N.  Rows whose other exponent is below N must divide
    exactly; the remaining rows only matter below x^N."""
    other = 1 - var
    rows = {}
    for t in terms:
        if min(t) < N:
            rows[t[other]] = rows.get(t[other], 0) ^ (1 << t[var])
    out = set()
    for k, mask in rows.items():
        if k < N:
            q, r = pdivmod(mask, 0b11)
            assert r == 0, "not divisible"
        else:
            q = pmul(mask & ((1 << N) - 1), (1 << N) - 1) & ((1 << N) - 1)
        for e in range(q.bit_length()):
            if q >> e & 1:
                out.add((e, k) if var == 0 else (k, e))
    return out


def unit_terms(S):
    return {(tri(s), tri(s)) for s in range(1, S + 1)}


def derived_series(N):
    """epsilon, beta1, beta-1, delta1, delta-1 as exponent sets (U_, V_),
    obtained by dividing 1 + alpha."""
    S = n_summands(N)
    num = {(0, 0)} ^ alpha_terms(S)
    b1 = div_one_plus(num, 1, N)
    bm1 = div_one_plus(num, 0, N)
    eps = div_one_plus(b1, 0, N)
    unit = unit_terms(S)
    d1 = div_one_plus(b1 ^ unit, 1, N)
    dm1 = div_one_plus(bm1 ^ unit, 0, N)

    def cut(ts):
        return {t for t in ts if min(t) < N}

    return {"epsilon": cut(eps), "beta1": cut(b1), "beta-1": cut(bm1),
            "delta1": cut(d1), "delta-1": cut(dm1)}
