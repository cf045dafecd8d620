"""Finite free chain complexes over GF(2), F2[t], F2[t,t^-1] and F2[Z/2].

Cohomological conventions throughout: the differential has degree +1,
deg t = +1, deg iota = 0.  A differential is stored as one square matrix over
the total generator set, entry [i][j] = coefficient of generator i in
d(generator j).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, smith
from .rings import F2LAU, F2T, F2Z2, GF2, F2Poly


class ComplexError(ValueError):
    pass


def _entry_exponents(ring, x):
    if ring is F2T:
        return x.exponents()
    if ring is F2LAU:
        return x.exponents()
    return [0]


@dataclass(frozen=True)
class ModuleReport:
    """Invariant-factor description of a finitely generated module over a PID."""

    ring_name: str
    free_rank: int
    torsion: tuple
    by_degree: dict | None = field(default=None, compare=False)

    @property
    def dimension(self):
        """F2-dimension; None when the module has a free part over t-rings."""
        if self.ring_name == "GF2":
            return self.free_rank
        if self.free_rank:
            return None
        return sum(_torsion_f2_dim(self.ring_name, f) for f in self.torsion)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def torsion_strings(self):
        return tuple(str(f) for f in self.torsion)

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append(f"free^{self.free_rank}")
        parts.extend(f"({f})" for f in self.torsion)
        body = " + ".join(parts) if parts else "0"
        return f"{self.ring_name}-module: {body}"


def _torsion_f2_dim(ring_name, f):
    if ring_name == "F2[t]":
        return f.degree()
    if ring_name == "F2[t,t^-1]":
        return f.poly.degree()
    return 1


class FreeComplex:
    """A finite free complex: labels, a square differential, optional grading/filtration.

    d*d = 0 is validated eagerly; a failing dataset is rejected together with
    the offending product.
    """

    def __init__(self, ring, labels, d, grading=None, filtration=None, check=True):
        self.ring = ring
        self.labels = list(labels)
        n = len(self.labels)
        if len(d) != n or any(len(row) != n for row in d):
            raise ComplexError(f"differential must be {n}x{n}")
        self.d = [list(row) for row in d]
        self.grading = list(grading) if grading is not None else None
        self.filtration = list(filtration) if filtration is not None else None
        if self.grading is not None and len(self.grading) != n:
            raise ComplexError("grading length mismatch")
        if self.filtration is not None and len(self.filtration) != n:
            raise ComplexError("filtration length mismatch")
        if check:
            self._validate()

    @property
    def n(self) -> int:
        return len(self.labels)

    def _validate(self):
        ring, n = self.ring, self.n
        dd = smith.mat_mul(ring, self.d, self.d)
        if not smith.mat_is_zero(ring, dd):
            bad = [
                (self.labels[i], self.labels[j], ring.to_str(dd[i][j]))
                for i in range(n)
                for j in range(n)
                if not ring.is_zero(dd[i][j])
            ]
            raise ComplexError(f"d*d != 0; offending entries {bad[:8]}")
        if self.grading is not None:
            for i in range(n):
                for j in range(n):
                    x = self.d[i][j]
                    if ring.is_zero(x):
                        continue
                    want = self.grading[j] + 1 - self.grading[i]
                    for e in _entry_exponents(ring, x):
                        if e != want:
                            raise ComplexError(
                                f"entry {self.labels[i]}<-{self.labels[j]} not of degree +1"
                            )
        if self.filtration is not None:
            for i in range(n):
                for j in range(n):
                    if not ring.is_zero(self.d[i][j]) and self.filtration[i] < self.filtration[j]:
                        raise ComplexError(
                            f"differential decreases filtration at {self.labels[i]}<-{self.labels[j]}"
                        )

    def d_numpy(self) -> np.ndarray:
        if self.ring is not GF2:
            raise ComplexError("d_numpy is for GF(2) complexes")
        return np.array(self.d, dtype=np.uint8) if self.n else np.zeros((0, 0), dtype=np.uint8)

    def zero_map_to(self, other: "FreeComplex") -> "ChainMap":
        return ChainMap(self, other, smith.mat_zero(self.ring, other.n, self.n))

    def relabel(self, prefix: str) -> "FreeComplex":
        return FreeComplex(
            self.ring,
            [prefix + l for l in self.labels],
            self.d,
            self.grading,
            self.filtration,
            check=False,
        )


class ChainMap:
    """A chain map: matrix f with f d_source = d_target f."""

    def __init__(self, source: FreeComplex, target: FreeComplex, matrix, check=True):
        if source.ring is not target.ring:
            raise ComplexError("chain map needs one coefficient ring")
        self.source = source
        self.target = target
        if len(matrix) != target.n or any(len(row) != source.n for row in matrix):
            raise ComplexError(
                f"chain-map matrix must be {target.n}x{source.n}"
            )
        self.matrix = [list(row) for row in matrix]
        if check and not self.is_chain_map():
            raise ComplexError("matrix does not commute with the differentials")

    def is_chain_map(self) -> bool:
        ring = self.source.ring
        lhs = smith.mat_mul(ring, self.matrix, self.source.d)
        rhs = smith.mat_mul(ring, self.target.d, self.matrix)
        return smith.mat_eq(ring, lhs, rhs)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self o other (apply other first)."""
        if other.target is not self.source:
            raise ComplexError("composition mismatch")
        ring = self.source.ring
        return ChainMap(
            other.source, self.target, smith.mat_mul(ring, self.matrix, other.matrix), check=False
        )


def homology(c: FreeComplex) -> ModuleReport:
    """ker(d)/im(d) as invariant factors.

    For graded GF(2) complexes the report carries a per-degree breakdown.
    Over t-rings a per-degree module report is meaningless (t shifts degree);
    use graded_piece_dims for homogeneous dimensions instead.
    """
    ring = c.ring
    if ring is F2Z2:
        raise ComplexError(
            "F2[Z/2] is not a PID; apply a_f2 or borel first, then take homology"
        )
    if c.grading is None or ring is not GF2:
        free, torsion = _homology_total(c)
        return ModuleReport(ring.name, free, tuple(_sorted_torsion(ring, torsion)))
    by_degree = {}
    total_free, total_torsion = 0, []
    degs = sorted(set(c.grading))
    for k in degs:
        free, torsion = _homology_in_degree(c, k)
        if free or torsion:
            by_degree[k] = ModuleReport(ring.name, free, tuple(torsion))
            total_free += free
            total_torsion.extend(torsion)
    return ModuleReport(ring.name, total_free, tuple(_sorted_torsion(ring, total_torsion)), by_degree)


def graded_piece_dims(c: FreeComplex, lo: int, hi: int) -> dict:
    """F2-dimensions of the homogeneous homology pieces H^k for k in [lo, hi].

    For a graded free complex over F2[t] (monomial basis t^m g, m >= 0) or
    F2[t,t^-1] (m in Z), each graded piece is finite dimensional.
    """
    if c.grading is None:
        raise ComplexError("graded_piece_dims needs a graded complex")
    ring = c.ring
    if ring is GF2:
        rep = homology(c)
        return {k: (rep.by_degree.get(k).free_rank if rep.by_degree.get(k) else 0) for k in range(lo, hi + 1)}
    if ring not in (F2T, F2LAU):
        raise ComplexError("graded pieces need a PID coefficient ring")

    def basis(k):
        out = []
        for j in range(c.n):
            m = k - c.grading[j]
            if ring is F2T and m < 0:
                continue
            out.append((j, m))
        return out

    def block(k):
        rows, cols = basis(k + 1), basis(k)
        mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for ci, (j, mj) in enumerate(cols):
            for ri, (i, mi) in enumerate(rows):
                x = c.d[i][j]
                if ring.is_zero(x):
                    continue
                e = mi - mj
                if ring is F2T:
                    bit = x.coeff(e)
                else:
                    bit = 1 if e in x.exponents() else 0
                mat[ri, ci] = bit
        return mat

    dims = {}
    for k in range(lo, hi + 1):
        nk = len(basis(k))
        if nk == 0:
            dims[k] = 0
            continue
        dims[k] = nk - linalg.f2_rank(block(k)) - linalg.f2_rank(block(k - 1))
    return dims


def _sorted_torsion(ring, torsion):
    if ring is GF2:
        return list(torsion)
    if ring is F2T:
        return sorted(torsion, key=lambda f: (f.degree(), f.bits))
    if ring is F2LAU:
        return sorted(torsion, key=lambda f: (f.poly.degree(), f.poly.bits))
    return list(torsion)


def _homology_total(c: FreeComplex):
    ring = c.ring
    if c.n == 0:
        return 0, []
    if ring is GF2:
        h = linalg.F2Homology(c.d_numpy())
        return h.dim, []
    if c.grading is not None and ring is F2T:
        return _graded_f2t_invariants(c)
    return smith.pid_homology_report(ring, c.d)


def _homog_basis_f2t(c: FreeComplex, k: int):
    return [(j, k - c.grading[j]) for j in range(c.n) if k - c.grading[j] >= 0]


def _homog_block_f2t(c: FreeComplex, k: int) -> np.ndarray:
    rows = _homog_basis_f2t(c, k + 1)
    cols = _homog_basis_f2t(c, k)
    mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    for ci, (j, mj) in enumerate(cols):
        for ri, (i, mi) in enumerate(rows):
            x = c.d[i][j]
            if not c.ring.is_zero(x) and mi - mj >= 0:
                mat[ri, ci] = x.coeff(mi - mj)
    return mat


def _graded_f2t_invariants(c: FreeComplex):
    """Invariant factors of a graded free F2[t]-complex via the t-barcode.

    Homogeneous pieces are finite F2-complexes; beyond one degree above the
    top generator degree, multiplication by t is an isomorphism of three
    consecutive pieces, so all bars are supported on [kmin, kmax+1].  Bar
    multiplicities come from ranks of iterated induced t-maps.
    """
    kmin = min(c.grading)
    kmax = max(c.grading) + 1
    degrees = list(range(kmin, kmax + 1))
    homs = {}
    for k in degrees:
        cols = _homog_basis_f2t(c, k)
        d_out = _homog_block_f2t(c, k)
        d_in = _homog_block_f2t(c, k - 1)
        total = np.zeros((len(cols), len(cols)), dtype=np.uint8)
        homs[k] = _PieceHomology(cols, d_in, d_out)
    tmaps = {}
    for k in degrees[:-1]:
        tmaps[k] = _induced_t_map(c, homs[k], homs[k + 1])
    dims = {k: homs[k].dim for k in degrees}
    # iterated ranks r[k][j] = rank of t^j : H^k -> H^{k+j}
    rank = {}
    for k in degrees:
        rank[(k, 0)] = dims[k]
        acc = np.eye(dims[k], dtype=np.uint8)
        for j in range(1, kmax + 1 - k + 1):
            if k + j - 1 not in tmaps:
                break
            acc = linalg.f2_mul(tmaps[k + j - 1], acc)
            rank[(k, j)] = linalg.f2_rank(acc)
    free = dims[kmax]  # alive at the stable degree = free part

    def r(k, j):
        if j < 0:
            return 0
        if k < kmin:
            return 0
        if k + j > kmax:
            j = kmax - k
        if j <= 0:
            return dims.get(k, 0) if j == 0 else 0
        return rank.get((k, j), 0)

    torsion = []
    for s in degrees:
        for e in range(s + 1, kmax + 1):
            # bars [s, e): born at s, die entering e
            j = e - s
            mult = (r(s, j - 1) - r(s, j)) - (r(s - 1, j) - r(s - 1, j + 1))
            for _ in range(mult):
                torsion.append(F2Poly.monomial(j))
    return free, torsion


class _PieceHomology:
    """Homology of one homogeneous piece with class coordinates."""

    def __init__(self, basis, d_in, d_out):
        self.basis = basis
        n = len(basis)
        self.kernel = linalg.f2_kernel(d_out) if d_out.shape[0] else np.eye(n, dtype=np.uint8)
        img = linalg.f2_image(d_in) if d_in.shape[1] else np.zeros((n, 0), dtype=np.uint8)
        coords = linalg.f2_solve(self.kernel, img)
        if coords is None:
            raise ComplexError("graded piece: image not contained in kernel")
        self._red, self._piv = linalg.f2_rref(coords.T)
        k = self.kernel.shape[1]
        self._free = [ccc for ccc in range(k) if ccc not in self._piv]
        self.dim = len(self._free)

    def class_coords(self, vecs: np.ndarray) -> np.ndarray:
        w = linalg.f2_solve(self.kernel, vecs)
        if w is None:
            raise ComplexError("graded piece: vector is not a cycle")
        w = w.copy()
        for rr, pc in enumerate(self._piv):
            mask = w[pc, :].copy()
            if mask.any():
                w ^= np.outer(self._red[rr], mask)
        return w[self._free, :]

    def representatives(self) -> np.ndarray:
        return self.kernel[:, self._free]


def _induced_t_map(c: FreeComplex, src: _PieceHomology, tgt: _PieceHomology) -> np.ndarray:
    pos = {g: i for i, g in enumerate(tgt.basis)}
    lift = np.zeros((len(tgt.basis), len(src.basis)), dtype=np.uint8)
    for ci, (j, m) in enumerate(src.basis):
        lift[pos[(j, m + 1)], ci] = 1
    reps = src.representatives()
    images = linalg.f2_mul(lift, reps)
    return tgt.class_coords(images)


def _homology_in_degree(c: FreeComplex, k: int):
    here = [i for i in range(c.n) if c.grading[i] == k]
    above = [i for i in range(c.n) if c.grading[i] == k + 1]
    below = [i for i in range(c.n) if c.grading[i] == k - 1]
    if not here:
        return 0, []
    d_out = [[c.d[i][j] for j in here] for i in above]
    d_in = [[c.d[i][j] for j in below] for i in here]
    a_out = np.array(d_out, dtype=np.uint8) if above else np.zeros((0, len(here)), np.uint8)
    a_in = np.array(d_in, dtype=np.uint8) if below else np.zeros((len(here), 0), np.uint8)
    dim = len(here) - linalg.f2_rank(a_out) - linalg.f2_rank(a_in)
    return dim, []


def cone(f: ChainMap) -> FreeComplex:
    """Mapping cone, block differential [[d_src, 0], [f, d_tgt]].

    Generators are ordered source-then-target; source generators sit in
    cone degree (their degree - 1).
    """
    ring = f.source.ring
    a, b = f.source, f.target
    n, m = a.n, b.n
    d = smith.mat_zero(ring, n + m, n + m)
    for i in range(n):
        for j in range(n):
            d[i][j] = a.d[i][j]
    for i in range(m):
        for j in range(m):
            d[n + i][n + j] = b.d[i][j]
        for j in range(n):
            d[n + i][j] = f.matrix[i][j]
    labels = ["cone_src/" + l for l in a.labels] + ["cone_tgt/" + l for l in b.labels]
    grading = None
    if a.grading is not None and b.grading is not None:
        grading = [g - 1 for g in a.grading] + list(b.grading)
    filtration = None
    if a.filtration is not None and b.filtration is not None:
        filtration = list(a.filtration) + list(b.filtration)
        for i in range(m):
            for j in range(n):
                if not ring.is_zero(f.matrix[i][j]) and filtration[n + i] < filtration[j]:
                    filtration = None
                    break
            if filtration is None:
                break
    return FreeComplex(ring, labels, d, grading, filtration)


def verify_homotopy(f: ChainMap, g: ChainMap, h) -> bool:
    """True iff f + g = d_target h + h d_source."""
    if f.source is not g.source or f.target is not g.target:
        if f.source.n != g.source.n or f.target.n != g.target.n:
            raise ComplexError("maps must share source and target")
    ring = f.source.ring
    if len(h) != f.target.n or any(len(row) != f.source.n for row in h):
        raise ComplexError("homotopy matrix has wrong shape")
    lhs = smith.mat_add(ring, f.matrix, g.matrix)
    rhs = smith.mat_add(
        ring,
        smith.mat_mul(ring, f.target.d, h),
        smith.mat_mul(ring, h, f.source.d),
    )
    return smith.mat_eq(ring, lhs, rhs)


def direct_sum(a: FreeComplex, b: FreeComplex) -> FreeComplex:
    if a.ring is not b.ring:
        raise ComplexError("direct sum needs one coefficient ring")
    ring = a.ring
    n, m = a.n, b.n
    d = smith.mat_zero(ring, n + m, n + m)
    for i in range(n):
        for j in range(n):
            d[i][j] = a.d[i][j]
    for i in range(m):
        for j in range(m):
            d[n + i][n + j] = b.d[i][j]
    grading = None
    if a.grading is not None and b.grading is not None:
        grading = list(a.grading) + list(b.grading)
    filtration = None
    if a.filtration is not None and b.filtration is not None:
        filtration = list(a.filtration) + list(b.filtration)
    labels = ["A/" + l for l in a.labels] + ["B/" + l for l in b.labels]
    return FreeComplex(ring, labels, d, grading, filtration, check=False)


def tensor_over_pid(a: FreeComplex, b: FreeComplex) -> FreeComplex:
    """Balanced tensor a (x)_R b of free complexes; computes the derived tensor.

    Both factors are free, so this equals (up to quasi-isomorphism) the
    Koszul cone model of the derived tensor product.
    """
    if a.ring is not b.ring:
        raise ComplexError("tensor needs one coefficient ring")
    ring = a.ring
    n, m = a.n, b.n
    labels = [f"{x}(x){y}" for x in a.labels for y in b.labels]

    def idx(i, j):
        return i * m + j

    d = smith.mat_zero(ring, n * m, n * m)
    for i in range(n):
        for ii in range(n):
            x = a.d[ii][i]
            if ring.is_zero(x):
                continue
            for j in range(m):
                d[idx(ii, j)][idx(i, j)] = ring.add(d[idx(ii, j)][idx(i, j)], x)
    for j in range(m):
        for jj in range(m):
            y = b.d[jj][j]
            if ring.is_zero(y):
                continue
            for i in range(n):
                d[idx(i, jj)][idx(i, j)] = ring.add(d[idx(i, jj)][idx(i, j)], y)
    grading = None
    if a.grading is not None and b.grading is not None:
        grading = [a.grading[i] + b.grading[j] for i in range(n) for j in range(m)]
    return FreeComplex(ring, labels, d, grading)


def multiply_by_scalar_map(c: FreeComplex, scalar) -> ChainMap:
    """The chain map x -> scalar * x (scalar central, e.g. t^n over F2[t])."""
    ring = c.ring
    m = smith.mat_zero(ring, c.n, c.n)
    for i in range(c.n):
        m[i][i] = scalar
    return ChainMap(c, c, m, check=False)


def truncation_cone(c: FreeComplex, n: int) -> FreeComplex:
    """c (x)^L F2[t]/(t^n) as the cone over multiplication by t^n."""
    if c.ring is not F2T:
        raise ComplexError("truncation is an F2[t] operation")
    if n < 1:
        raise ComplexError("truncation level must be >= 1")
    tn = F2Poly.monomial(n)
    f = multiply_by_scalar_map(c, tn)
    if c.grading is not None:
        # t^n id is not degree-homogeneous; drop gradings for the cone
        src = FreeComplex(c.ring, c.labels, c.d, None, None, check=False)
        f = ChainMap(src, src, f.matrix, check=False)
    return cone(f)
