"""Smith normal form with transforms over the Euclidean domains GF(2), F2[t], F2[t,t^-1].

Matrices are lists of lists of ring elements, acting on column vectors.
The pivot strategy picks a minimal Euclidean size (= degree) nonzero entry,
so the size strictly drops whenever a division leaves a remainder and the
reduction terminates.
"""

from __future__ import annotations


def mat_zero(ring, rows: int, cols: int):
    return [[ring.zero for _ in range(cols)] for _ in range(rows)]


def mat_identity(ring, n: int):
    m = mat_zero(ring, n, n)
    for i in range(n):
        m[i][i] = ring.one
    return m


def mat_copy(m):
    return [row[:] for row in m]


def mat_shape(m):
    return len(m), len(m[0]) if m else 0


def mat_mul(ring, a, b):
    ra, ca = len(a), len(a[0]) if a else 0
    rb, cb = len(b), len(b[0]) if b else 0
    if ca != rb:
        # list-of-lists cannot represent 0 x n, so empty shapes are ambiguous;
        # a product through a zero-dimensional middle is the zero matrix
        if ca == 0 or rb == 0:
            return mat_zero(ring, ra, cb)
        raise ValueError("dimension mismatch in matrix product")
    out = mat_zero(ring, ra, cb)
    for i in range(ra):
        arow = a[i]
        orow = out[i]
        for k in range(ca):
            aik = arow[k]
            if ring.is_zero(aik):
                continue
            brow = b[k]
            for j in range(cb):
                if not ring.is_zero(brow[j]):
                    orow[j] = ring.add(orow[j], ring.mul(aik, brow[j]))
    return out


def mat_add(ring, a, b):
    return [[ring.add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_is_zero(ring, m) -> bool:
    return all(ring.is_zero(x) for row in m for x in row)


def mat_eq(ring, a, b) -> bool:
    return mat_is_zero(ring, mat_add(ring, a, b))


def mat_hstack(a, b):
    if not a:
        return mat_copy(b)
    if not b:
        return mat_copy(a)
    return [ra + rb for ra, rb in zip(a, b)]


def mat_cols(m, idx):
    return [[row[j] for j in idx] for row in m]


def mat_from_f2(ring, m):
    """Embed a numpy GF(2) matrix as constants of `ring`."""
    out = []
    for row in m:
        out.append([ring.one if int(x) & 1 else ring.zero for x in row])
    return out


def _rowop(m, i, j, a, b, c, d, ring):
    # rows i, j <- a*row_i + b*row_j, c*row_i + d*row_j
    ri, rj = m[i], m[j]
    for k in range(len(ri)):
        x, y = ri[k], rj[k]
        ri[k] = ring.add(ring.mul(a, x), ring.mul(b, y))
        rj[k] = ring.add(ring.mul(c, x), ring.mul(d, y))


def _colop(m, i, j, a, b, c, d, ring):
    for row in m:
        x, y = row[i], row[j]
        row[i] = ring.add(ring.mul(a, x), ring.mul(b, y))
        row[j] = ring.add(ring.mul(c, x), ring.mul(d, y))


def smith_normal_form(ring, m):
    """Return (factors, U, V) with U*m*V diagonal.

    `factors` is the full diagonal of length min(shape): a divisibility chain
    of normalized nonzero invariant factors followed by zeros.  U and V are
    unimodular (products of elementary and gcd-Bezout operations).
    """
    nrows, ncols = mat_shape(m)
    a = mat_copy(m)
    u = mat_identity(ring, nrows)
    v = mat_identity(ring, ncols)

    def pick_pivot(t):
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if not ring.is_zero(a[i][j]):
                    sz = ring.euclid_size(a[i][j])
                    if best is None or sz < best[0]:
                        best = (sz, i, j)
        return best

    t = 0
    while t < min(nrows, ncols):
        best = pick_pivot(t)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            a[t], a[pi] = a[pi], a[t]
            u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for row in a:
                row[t], row[pj] = row[pj], row[t]
            for row in v:
                row[t], row[pj] = row[pj], row[t]

        while True:
            dirty = False
            for i in range(t + 1, nrows):
                if ring.is_zero(a[i][t]):
                    continue
                piv, entry = a[t][t], a[i][t]
                q, r = ring.divmod(entry, piv)
                if ring.is_zero(r):
                    _rowop(a, t, i, ring.one, ring.zero, q, ring.one, ring)
                    _rowop(u, t, i, ring.one, ring.zero, q, ring.one, ring)
                else:
                    x, y, g = ring.gcdex(piv, entry)
                    p_g = ring.divmod(piv, g)[0]
                    e_g = ring.divmod(entry, g)[0]
                    _rowop(a, t, i, x, y, e_g, p_g, ring)
                    _rowop(u, t, i, x, y, e_g, p_g, ring)
                    dirty = True
            for j in range(t + 1, ncols):
                if ring.is_zero(a[t][j]):
                    continue
                piv, entry = a[t][t], a[t][j]
                q, r = ring.divmod(entry, piv)
                if ring.is_zero(r):
                    _colop(a, t, j, ring.one, ring.zero, q, ring.one, ring)
                    _colop(v, t, j, ring.one, ring.zero, q, ring.one, ring)
                else:
                    x, y, g = ring.gcdex(piv, entry)
                    p_g = ring.divmod(piv, g)[0]
                    e_g = ring.divmod(entry, g)[0]
                    _colop(a, t, j, x, y, e_g, p_g, ring)
                    _colop(v, t, j, x, y, e_g, p_g, ring)
                    dirty = True
            col_clear = all(ring.is_zero(a[i][t]) for i in range(t + 1, nrows))
            row_clear = all(ring.is_zero(a[t][j]) for j in range(t + 1, ncols))
            if col_clear and row_clear and not dirty:
                break

        # force pivot | submatrix so the diagonal is a divisibility chain
        fixed = False
        for i in range(t + 1, nrows):
            if fixed:
                break
            for j in range(t + 1, ncols):
                if ring.is_zero(a[i][j]):
                    continue
                if not ring.is_zero(ring.divmod(a[i][j], a[t][t])[1]):
                    _rowop(a, t, i, ring.one, ring.one, ring.zero, ring.one, ring)
                    _rowop(u, t, i, ring.one, ring.one, ring.zero, ring.one, ring)
                    fixed = True
                    break
        if fixed:
            continue  # re-run reduction at the same t with the smaller gcd pivot

        canonical, unit = ring.normalize(a[t][t])
        if not ring.is_zero(ring.add(canonical, a[t][t])):
            for k in range(ncols):
                a[t][k] = ring.mul(unit, a[t][k])
            for k in range(nrows):
                u[t][k] = ring.mul(unit, u[t][k])
        t += 1

    factors = [a[i][i] for i in range(min(nrows, ncols))]
    return factors, u, v


def pid_kernel(ring, m):
    """Basis of ker(m) as columns (list-of-lists, ncols x nullity)."""
    nrows, ncols = mat_shape(m)
    if ncols == 0:
        return []
    factors, _, v = smith_normal_form(ring, m)
    rank = sum(1 for f in factors if not ring.is_zero(f))
    idx = list(range(rank, ncols))
    return mat_cols(v, idx)


def pid_solve(ring, m, b):
    """Solve m*x = b columnwise over the PID; None if some column has no solution."""
    nrows, ncols = mat_shape(m)
    nb = len(b[0]) if b else 0
    if nb == 0:
        return mat_zero(ring, ncols, 0)
    factors, u, v = smith_normal_form(ring, m)
    ub = mat_mul(ring, u, b)
    y = mat_zero(ring, ncols, nb)
    for col in range(nb):
        for i in range(nrows):
            rhs = ub[i][col]
            if i < len(factors) and not ring.is_zero(factors[i]):
                q, r = ring.divmod(rhs, factors[i])
                if not ring.is_zero(r):
                    return None
                y[i][col] = q
            elif not ring.is_zero(rhs):
                return None
    return mat_mul(ring, v, y)


def module_report_from_presentation(ring, rel, ngens: int):
    """Invariant-factor data of R^ngens / colspan(rel): (free_rank, torsion list)."""
    if ngens == 0:
        return 0, []
    if not rel or not rel[0]:
        return ngens, []
    factors, _, _ = smith_normal_form(ring, rel)
    nonzero = [f for f in factors if not ring.is_zero(f)]
    torsion = [f for f in nonzero if not ring.is_unit(f)]
    free = ngens - len(nonzero)
    return free, torsion


def pid_homology_report(ring, d):
    """(free_rank, torsion) of ker(d)/im(d) for a square-zero matrix d."""
    _, ncols = mat_shape(d)
    if ncols == 0:
        return 0, []
    kernel = pid_kernel(ring, d)
    k = len(kernel[0]) if kernel else 0
    if k == 0:
        return 0, []
    coords = pid_solve(ring, kernel, d)
    if coords is None:
        raise ValueError("image not contained in kernel: d*d != 0 over " + ring.name)
    return module_report_from_presentation(ring, coords, k)

