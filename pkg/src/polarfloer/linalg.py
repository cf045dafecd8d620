"""Dense GF(2) linear algebra on numpy uint8 arrays.

Matrices act on column vectors: entry [i, j] is the coefficient of target
generator i in the image of source generator j.
"""

from __future__ import annotations

import numpy as np


def f2_matrix(rows: int, cols: int, entries=None) -> np.ndarray:
    m = np.zeros((rows, cols), dtype=np.uint8)
    if entries:
        for i, j, v in entries:
            m[i, j] = v & 1
    return m


def _as_f2(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.uint8) & 1
    if a.ndim != 2:
        raise ValueError("expected a 2d matrix")
    return a


def f2_rref(m):
    """Row-reduce over GF(2); returns (rref matrix, pivot column list)."""
    a = _as_f2(m).copy()
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            a[[r, p], :] = a[[p, r], :]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others, :] ^= a[r, :]
        pivots.append(c)
        r += 1
    return a, pivots


def f2_rank(m) -> int:
    return len(f2_rref(m)[1])


def f2_kernel(m) -> np.ndarray:
    """Columns form a basis of ker(m) over GF(2); shape (cols, nullity)."""
    a = _as_f2(m)
    ncols = a.shape[1]
    rref, pivots = f2_rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((ncols, len(free)), dtype=np.uint8)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for r, pc in enumerate(pivots):
            if rref[r, fc]:
                basis[pc, k] = 1
    return basis


def f2_image(m) -> np.ndarray:
    """Columns form a basis of the column space; shape (rows, rank)."""
    a = _as_f2(m)
    _, pivots = f2_rref(a)
    return a[:, pivots].copy()


def f2_solve(a, b):
    """Solve a @ x = b over GF(2), one x-column per b-column; None if unsolvable."""
    a = _as_f2(a)
    b = _as_f2(b)
    if b.shape[0] != a.shape[0]:
        raise ValueError("dimension mismatch")
    aug = np.concatenate([a, b], axis=1)
    rref, pivots = f2_rref(aug)
    ncols = a.shape[1]
    if any(p >= ncols for p in pivots):
        return None
    x = np.zeros((ncols, b.shape[1]), dtype=np.uint8)
    for r, pc in enumerate(pivots):
        x[pc, :] = rref[r, ncols:]
    return x


def f2_mul(a, b) -> np.ndarray:
    a = _as_f2(a)
    b = _as_f2(b)
    return (a.astype(np.int64) @ b.astype(np.int64) % 2).astype(np.uint8)


def f2_is_zero(m) -> bool:
    return not np.any(_as_f2(m))



class F2Homology:
    """ker(d)/im(d) of a GF(2) differential, with class coordinates.

    The quotient is realized by reducing kernel coordinates modulo the
    row-echelon span of the image; the surviving coordinates index a basis.
    """

    def __init__(self, d):
        self.d = _as_f2(d)
        self.kernel = f2_kernel(self.d)  # ambient x k
        k = self.kernel.shape[1]
        img = f2_image(self.d)
        coords = f2_solve(self.kernel, img)
        if coords is None:
            raise ValueError("image not contained in kernel: d*d != 0")
        self._red, self._piv = f2_rref(coords.T)  # echelon span of image coords
        self._free = [c for c in range(k) if c not in self._piv]
        self.dim = len(self._free)

    def _reduce(self, w: np.ndarray) -> np.ndarray:
        w = w.copy()
        for r, pc in enumerate(self._piv):
            mask = w[pc, :].copy()
            if mask.any():
                w ^= np.outer(self._red[r], mask)
        return w

    def class_coordinates(self, cycles) -> np.ndarray:
        """Map cycle columns (ambient x q) to class coordinates (dim x q)."""
        cycles = _as_f2(cycles)
        w = f2_solve(self.kernel, cycles)
        if w is None:
            raise ValueError("vector is not a cycle")
        return self._reduce(w)[self._free, :]

    def representatives(self) -> np.ndarray:
        """Cycle representatives of a homology basis (ambient x dim)."""
        return self.kernel[:, self._free].copy()


def f2_induced_map(f, source_hom: F2Homology, target_hom: F2Homology) -> np.ndarray:
    """Matrix of the map induced on homology by a chain map f."""
    reps = source_hom.representatives()
    images = f2_mul(_as_f2(f), reps)
    return target_hom.class_coordinates(images)
