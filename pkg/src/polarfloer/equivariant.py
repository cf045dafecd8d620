"""Free F2[Z/2]-complexes and the group-homology functors.

The two models of Z/2 group homology: the basis quotient A_F2 with its
chain-level endomorphism T, and the Borel complex A[t] with differential
d + t(1+iota), related by the comparison map F(x) = (1+iota)x with homotopy
witness H(x) = x satisfying  tF + FT = d_borel H + H d_F2.
"""

from __future__ import annotations

import numpy as np

from . import linalg, smith
from .complexes import (
    ChainMap,
    ComplexError,
    FreeComplex,
    ModuleReport,
    _sorted_torsion,
    cone,
    homology,
    tensor_over_pid,
)
from .rings import (
    F2T,
    F2Z2,
    GF2,
    GR_IOTA,
    GR_ONE,
    GR_ONE_PLUS_IOTA,
    GR_ZERO,
    F2Poly,
)


class Z2FreeComplex(FreeComplex):
    """Free F2[Z/2]-complex with a distinguished basis x_i."""

    def __init__(self, labels, d, grading=None, check=True):
        super().__init__(F2Z2, labels, d, grading, None, check)

    def relabel_partners(self, flips) -> "Z2FreeComplex":
        """New basis x_i' = iota^flips[i] x_i; differential entries pick up iota factors."""
        n = self.n
        d2 = smith.mat_zero(F2Z2, n, n)
        for i in range(n):
            for j in range(n):
                x = self.d[i][j]
                if (flips[i] + flips[j]) % 2:
                    x = x * GR_IOTA
                d2[i][j] = x
        return Z2FreeComplex(self.labels, d2, self.grading, check=False)


class TComplex:
    """A GF(2) complex together with a chain endomorphism T (the F2[t]-structure)."""

    def __init__(self, complex_f2: FreeComplex, t_matrix, check=True):
        if complex_f2.ring is not GF2:
            raise ComplexError("TComplex needs GF(2) coefficients")
        self.complex = complex_f2
        n = complex_f2.n
        if len(t_matrix) != n or any(len(row) != n for row in t_matrix):
            raise ComplexError("T matrix must be square of matching size")
        self.T = [list(row) for row in t_matrix]
        if check:
            lhs = smith.mat_mul(GF2, self.T, complex_f2.d)
            rhs = smith.mat_mul(GF2, complex_f2.d, self.T)
            if not smith.mat_eq(GF2, lhs, rhs):
                raise ComplexError("T is not a chain map")

    @property
    def n(self):
        return self.complex.n

    def homology_f2t(self) -> ModuleReport:
        """H(d) as an F2[t]-module: invariant factors of the induced T on homology."""
        h = linalg.F2Homology(self.complex.d_numpy())
        tbar = linalg.f2_induced_map(np.array(self.T, dtype=np.uint8), h, h) if h.dim else np.zeros((0, 0), np.uint8)
        m = []
        for i in range(h.dim):
            row = []
            for j in range(h.dim):
                x = F2Poly.monomial(1) if i == j else F2Poly(0)
                if tbar[i, j]:
                    x = x + F2Poly(1)
                row.append(x)
            m.append(row)
        if not m:
            return ModuleReport(F2T.name, 0, ())
        factors, _, _ = smith.smith_normal_form(F2T, m)
        torsion = [f for f in factors if not (F2T.is_zero(f) or F2T.is_unit(f))]
        return ModuleReport(F2T.name, 0, tuple(_sorted_torsion(F2T, torsion)))

    def graded_homology_dims(self) -> dict:
        rep = homology(self.complex)
        if rep.by_degree is None:
            raise ComplexError("complex is not graded")
        return {k: v.free_rank for k, v in rep.by_degree.items()}

    def koszul_presentation(self) -> FreeComplex:
        """Free F2[t]-complex Cone(t + T) quasi-isomorphic to this module complex.

        Generators come in two blocks u_i, v_i (both at the original degrees);
        the connecting block t*id + T has degree +1 like the differential.
        """
        n = self.n
        d = smith.mat_zero(F2T, 2 * n, 2 * n)
        for i in range(n):
            for j in range(n):
                if self.complex.d[i][j]:
                    d[i][j] = F2Poly(1)
                    d[n + i][n + j] = F2Poly(1)
                tij = F2Poly.monomial(1) if i == j else F2Poly(0)
                if self.T[i][j]:
                    tij = tij + F2Poly(1)
                if not tij.is_zero():
                    d[n + i][j] = tij
        labels = ["u/" + l for l in self.complex.labels] + ["v/" + l for l in self.complex.labels]
        # ungraded: the connecting block mixes the exponent-1 diagonal with the
        # exponent-0 entries of T
        return FreeComplex(F2T, labels, d, None)


def a_f2(a: Z2FreeComplex) -> TComplex:
    """The basis quotient: d_F2 = a + b entrywise, T = b entrywise."""
    n = a.n
    d = [[(a.d[i][j].a ^ a.d[i][j].b) for j in range(n)] for i in range(n)]
    t = [[a.d[i][j].b for j in range(n)] for i in range(n)]
    cx = FreeComplex(GF2, list(a.labels), d, a.grading, None, check=False)
    return TComplex(cx, t, check=False)


def borel(a: Z2FreeComplex, truncation: int | None = None) -> FreeComplex:
    """The Borel complex A[t] with d_borel = d_A + t(1 + iota).

    A finite free F2[t]-complex on the doubled basis {x_i, iota x_i}; the
    optional truncation only affects page reporting elsewhere, never the
    complex itself.
    """
    n = a.n
    d = smith.mat_zero(F2T, 2 * n, 2 * n)
    one = F2Poly(1)
    t = F2Poly.monomial(1)
    for i in range(n):
        for j in range(n):
            e = a.d[i][j]
            if e.a:
                d[2 * i][2 * j] = d[2 * i][2 * j] + one
                d[2 * i + 1][2 * j + 1] = d[2 * i + 1][2 * j + 1] + one
            if e.b:
                d[2 * i + 1][2 * j] = d[2 * i + 1][2 * j] + one
                d[2 * i][2 * j + 1] = d[2 * i][2 * j + 1] + one
    for j in range(n):
        d[2 * j][2 * j] = d[2 * j][2 * j] + t
        d[2 * j][2 * j + 1] = d[2 * j][2 * j + 1] + t
        d[2 * j + 1][2 * j] = d[2 * j + 1][2 * j] + t
        d[2 * j + 1][2 * j + 1] = d[2 * j + 1][2 * j + 1] + t
    labels = []
    for l in a.labels:
        labels.extend([l, "i*" + l])
    grading = None
    if a.grading is not None:
        grading = []
        for g in a.grading:
            grading.extend([g, g])
    return FreeComplex(F2T, labels, d, grading)


class BorelComparison:
    """F: A_F2 -> A[t], x_i -> (1+iota)x_i, with homotopy H: x_i -> x_i."""

    def __init__(self, a: Z2FreeComplex):
        self.source = a_f2(a)
        self.target = borel(a)
        n = a.n
        self.F = smith.mat_zero(F2T, 2 * n, n)
        self.H = smith.mat_zero(F2T, 2 * n, n)
        for j in range(n):
            self.F[2 * j][j] = F2Poly(1)
            self.F[2 * j + 1][j] = F2Poly(1)
            self.H[2 * j][j] = F2Poly(1)

    def _lift(self, m_f2):
        return smith.mat_from_f2(F2T, m_f2)

    def homotopy_identity_holds(self) -> bool:
        """tF + F T = d_borel H + H d_F2, exactly, over F2[t]."""
        t = F2Poly.monomial(1)
        lhs = [[x * t for x in row] for row in self.F]
        lhs = smith.mat_add(F2T, lhs, smith.mat_mul(F2T, self.F, self._lift(self.source.T)))
        rhs = smith.mat_add(
            F2T,
            smith.mat_mul(F2T, self.target.d, self.H),
            smith.mat_mul(F2T, self.H, self._lift(self.source.complex.d)),
        )
        return smith.mat_eq(F2T, lhs, rhs)

    def chain_map_holds(self) -> bool:
        lhs = smith.mat_mul(F2T, self.F, self._lift(self.source.complex.d))
        rhs = smith.mat_mul(F2T, self.target.d, self.F)
        return smith.mat_eq(F2T, lhs, rhs)

    def free_model_map(self) -> ChainMap:
        """Lift of F to the Koszul presentation: (u, v) -> H u + F v."""
        kos = self.source.koszul_presentation()
        n = self.source.n
        mat = smith.mat_zero(F2T, 2 * n, 2 * n)
        for i in range(2 * n):
            for j in range(n):
                mat[i][j] = self.H[i][j]
                mat[i][n + j] = self.F[i][j]
        return ChainMap(kos, self.target, mat)

    def is_quasi_iso(self) -> bool:
        """Certified by acyclicity of the cone over the free-model lift."""
        return homology(cone(self.free_model_map())).is_zero()

    def reports_agree(self) -> bool:
        return self.source.homology_f2t() == homology(self.target)


def comparison_F(a: Z2FreeComplex) -> BorelComparison:
    return BorelComparison(a)


def ainfty_f2(n: int, b, t1, t2, h, ring=GF2):
    """The A-infinity correction F^2(t^n, b): sum of T1^(n-1-k) H T2^k applied to b."""
    if n < 0:
        raise ValueError("t-power must be nonnegative")
    length = len(b)
    vec = [[x] for x in b]
    if n == 0:
        return [ring.zero] * len(h)
    total = [[ring.zero] for _ in range(len(h))]
    for k in range(n):
        w = vec
        for _ in range(k):
            w = smith.mat_mul(ring, t2, w)
        w = smith.mat_mul(ring, h, w)
        for _ in range(n - 1 - k):
            w = smith.mat_mul(ring, t1, w)
        total = smith.mat_add(ring, total, w)
    return [row[0] for row in total]


def finite_type_block(kind: str, size: int = 1) -> Z2FreeComplex:
    """The blocks B0, B+, B-, Binfty with d(x_i) = (1+iota) x_{i+1}.

    Infinite blocks are materialized on finite windows: Bplus on 0..size-1,
    Bminus on -size..-1, Binfty on -size..size.
    """
    if kind == "B0":
        return Z2FreeComplex(["x0"], [[GR_ZERO]], grading=[0])
    if size < 1:
        raise ComplexError("blocks need window size >= 1")
    if kind == "Bplus":
        idx = list(range(size))
    elif kind == "Bminus":
        idx = list(range(-size, 0))
    elif kind == "Binfty":
        idx = list(range(-size, size + 1))
    else:
        raise ComplexError(f"unknown block kind {kind!r}")
    pos = {v: k for k, v in enumerate(idx)}
    n = len(idx)
    d = smith.mat_zero(F2Z2, n, n)
    for v in idx:
        if v + 1 in pos:
            d[pos[v + 1]][pos[v]] = GR_ONE_PLUS_IOTA
    labels = [f"x{v}" for v in idx]
    return Z2FreeComplex(labels, d, grading=list(idx))


def tensor_z2(a: Z2FreeComplex, b: Z2FreeComplex) -> Z2FreeComplex:
    """Tensor product with iota(x (x) y) = iota x (x) iota y.

    Free basis {x_i (x) iota^eps y_j : eps in {0,1}}; a pure tensor
    (iota^p x)(x)(iota^q y) rewrites as iota^p (x (x) iota^{q-p} y).
    """
    na, nb = a.n, b.n

    def idx(i, j, eps):
        return (i * nb + j) * 2 + eps

    n = 2 * na * nb
    d = smith.mat_zero(F2Z2, n, n)
    for i in range(na):
        for j in range(nb):
            for eps in (0, 1):
                col = idx(i, j, eps)
                for k in range(na):
                    e = a.d[k][i]
                    if e.a:
                        r = idx(k, j, eps)
                        d[r][col] = d[r][col] + GR_ONE
                    if e.b:
                        # (iota x_k)(x)(iota^eps y_j) = iota (x_k (x) iota^{eps+1} y_j)
                        r = idx(k, j, 1 - eps)
                        d[r][col] = d[r][col] + GR_IOTA
                for l in range(nb):
                    e = b.d[l][j]
                    if e.a:
                        r = idx(i, l, eps)
                        d[r][col] = d[r][col] + GR_ONE
                    if e.b:
                        r = idx(i, l, 1 - eps)
                        d[r][col] = d[r][col] + GR_ONE
    labels = []
    grading = None if (a.grading is None or b.grading is None) else []
    for i in range(na):
        for j in range(nb):
            for eps in (0, 1):
                pre = "i*" if eps else ""
                labels.append(f"{a.labels[i]}(x){pre}{b.labels[j]}")
                if grading is not None:
                    grading.append(a.grading[i] + b.grading[j])
    return Z2FreeComplex(labels, d, grading)


def derived_tensor(b: FreeComplex, bp: FreeComplex) -> FreeComplex:
    """B (x)^L_{F2[t]} B' for finite free F2[t]-complexes.

    Computed as the balanced tensor product, which for free factors equals the
    cokernel of the injective Koszul-cone map t(x)id + id(x)t and is therefore
    quasi-isomorphic to the cone model.
    """
    if b.ring is not F2T or bp.ring is not F2T:
        raise ComplexError("derived tensor is an F2[t] operation")
    return tensor_over_pid(b, bp)


def tensor_model_complex(a: Z2FreeComplex, b: Z2FreeComplex) -> FreeComplex:
    """((A (x) A')[t], d_tensor) with d_tensor = d(x)id + id(x)d' + t(id(x)iota + iota(x)id)."""
    na, nb = a.n, b.n

    def idx(i, al, j, be):
        return ((i * 2 + al) * nb + j) * 2 + be

    n = 4 * na * nb
    d = smith.mat_zero(F2T, n, n)
    one = F2Poly(1)
    t = F2Poly.monomial(1)
    for i in range(na):
        for al in (0, 1):
            for j in range(nb):
                for be in (0, 1):
                    col = idx(i, al, j, be)
                    for k in range(na):
                        e = a.d[k][i]
                        if e.a:
                            d[idx(k, al, j, be)][col] = d[idx(k, al, j, be)][col] + one
                        if e.b:
                            d[idx(k, 1 - al, j, be)][col] = d[idx(k, 1 - al, j, be)][col] + one
                    for l in range(nb):
                        e = b.d[l][j]
                        if e.a:
                            d[idx(i, al, l, be)][col] = d[idx(i, al, l, be)][col] + one
                        if e.b:
                            d[idx(i, al, l, 1 - be)][col] = d[idx(i, al, l, 1 - be)][col] + one
                    # t(id (x) iota + iota (x) id)
                    d[idx(i, al, j, 1 - be)][col] = d[idx(i, al, j, 1 - be)][col] + t
                    d[idx(i, 1 - al, j, be)][col] = d[idx(i, 1 - al, j, be)][col] + t
    labels = []
    grading = None if (a.grading is None or b.grading is None) else []
    for i in range(na):
        for al in (0, 1):
            for j in range(nb):
                for be in (0, 1):
                    pa = "i*" if al else ""
                    pb = "i*" if be else ""
                    labels.append(f"{pa}{a.labels[i]}(x){pb}{b.labels[j]}")
                    if grading is not None:
                        grading.append(a.grading[i] + b.grading[j])
    return FreeComplex(F2T, labels, d, grading)


def verify_monoidal(a: Z2FreeComplex, b: Z2FreeComplex) -> dict:
    """Compare H((A(x)A')[t], d_borel), the explicit d_tensor model, and A[t] (x)^L A'[t]."""
    lhs = homology(borel(tensor_z2(a, b)))
    mid = homology(tensor_model_complex(a, b))
    rhs = homology(derived_tensor(borel(a), borel(b)))
    return {
        "borel_tensor": lhs,
        "d_tensor_model": mid,
        "derived_tensor": rhs,
        "equal": lhs == mid == rhs,
    }


def classify_window_pattern(dims_small: dict, dims_large: dict) -> str:
    """Classify graded window-homology growth as one of the four block patterns.

    Takes per-degree F2-dimension dicts at two window sizes (the larger window
    strictly containing the smaller); degrees with dimension zero are ignored.
    """
    occ_s = sorted(k for k, v in dims_small.items() if v)
    occ_l = sorted(k for k, v in dims_large.items() if v)
    if not occ_s and not occ_l:
        return "zero"
    if occ_s == occ_l:
        return "F2" if len(occ_s) == 1 else "stable"
    lo_s, hi_s = occ_s[0], occ_s[-1]
    lo_l, hi_l = occ_l[0], occ_l[-1]
    grows_up = hi_l > hi_s
    grows_down = lo_l < lo_s
    if grows_up and not grows_down:
        return "F2[t]"
    if grows_down and not grows_up:
        return "t^-1F2[t^-1]"
    if grows_up and grows_down:
        return "F2[t,t^-1]"
    return "stable"
