"""Morse theory for manifolds with boundary: the three complexes from eight matrices.

A KMDataset holds interior (o), boundary-stable (s) and boundary-unstable (u)
generators and the eight mod-2 trajectory-count matrices.  The four anomaly
relations plus dbar^2 = 0 are input contracts: the analysis that guarantees
them for genuine flow data is out of scope, so failing data is rejected with
the offending product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, smith
from .complexes import ChainMap, ComplexError, FreeComplex
from .equivariant import TComplex, Z2FreeComplex, borel
from .rings import F2Z2, GF2, GroupRingElem


def _np(m):
    return np.asarray(m, dtype=np.uint8) & 1


def _zeros(r, c):
    return np.zeros((r, c), dtype=np.uint8)


_MATRIX_SHAPES = {
    # name: (rows, cols) in terms of o/s/u sizes
    "d_oo": ("o", "o"),
    "d_os": ("o", "s"),
    "d_uo": ("u", "o"),
    "d_us": ("u", "s"),
    "dss": ("s", "s"),
    "dsu": ("s", "u"),
    "dus": ("u", "s"),
    "duu": ("u", "u"),
}

# degree raised by each matrix when gradings are present (dsu is the
# boundary-obstructed, index-zero count; dus is the two-step boundary count)
_MATRIX_DEGREES = {
    "d_oo": 1,
    "d_os": 1,
    "d_uo": 1,
    "d_us": 1,
    "dss": 1,
    "dsu": 0,
    "dus": 2,
    "duu": 1,
}


class KMDataset:
    """Eight-matrix flow dataset, optionally with an F2[Z/2]-lift and gradings."""

    def __init__(self, o_labels, s_labels, u_labels, matrices, lift=None, gradings=None):
        self.o_labels = list(o_labels)
        self.s_labels = list(s_labels)
        self.u_labels = list(u_labels)
        sizes = {"o": len(self.o_labels), "s": len(self.s_labels), "u": len(self.u_labels)}
        self.matrices = {}
        for name, (rk, ck) in _MATRIX_SHAPES.items():
            m = matrices.get(name)
            m = _np(m) if m is not None else _zeros(sizes[rk], sizes[ck])
            if m.shape != (sizes[rk], sizes[ck]):
                raise ComplexError(
                    f"{name} must be {sizes[rk]}x{sizes[ck]}, got {m.shape}"
                )
            self.matrices[name] = m
        self.lift = None
        if lift is not None:
            self.lift = {}
            for name, (rk, ck) in _MATRIX_SHAPES.items():
                lm = lift.get(name)
                if lm is None:
                    lm = smith.mat_zero(F2Z2, sizes[rk], sizes[ck])
                if len(lm) != sizes[rk] or (lm and len(lm[0]) != sizes[ck]):
                    raise ComplexError(f"lift {name} has wrong shape")
                self.lift[name] = [list(row) for row in lm]
            for name in _MATRIX_SHAPES:
                red = np.array(
                    [[(x.a ^ x.b) for x in row] for row in self.lift[name]], dtype=np.uint8
                ) if self.lift[name] else _zeros(*self.matrices[name].shape)
                if self.lift[name] and not np.array_equal(red, self.matrices[name]):
                    raise ComplexError(f"lift of {name} does not reduce to the GF(2) matrix")
        self.gradings = None
        if gradings is not None:
            go, gs, gu = gradings
            if len(go) != sizes["o"] or len(gs) != sizes["s"] or len(gu) != sizes["u"]:
                raise ComplexError("grading length mismatch")
            self.gradings = (list(go), list(gs), list(gu))
            self._check_grading_degrees()

    def _check_grading_degrees(self):
        go, gs, gu = self.gradings
        g = {"o": go, "s": gs, "u": gu}
        for name, (rk, ck) in _MATRIX_SHAPES.items():
            m = self.matrices[name]
            want = _MATRIX_DEGREES[name]
            for i in range(m.shape[0]):
                for j in range(m.shape[1]):
                    if m[i, j] and g[rk][i] != g[ck][j] + want:
                        raise ComplexError(
                            f"{name}[{i},{j}] violates the index bookkeeping"
                        )

    @property
    def sizes(self):
        return len(self.o_labels), len(self.s_labels), len(self.u_labels)

    def t_matrix(self, name):
        """The iota-coefficient (T-part) of a lifted matrix."""
        if self.lift is None:
            return None
        lm = self.lift[name]
        r, c = self.matrices[name].shape
        out = _zeros(r, c)
        for i in range(r):
            for j in range(c):
                out[i, j] = lm[i][j].b
        return out


def validate_relations(k: KMDataset) -> dict:
    """Check the four anomaly relations and dbar^2 = 0; witnesses on failure.

    With a lift present the relations are checked over F2[Z/2] (the reduced
    GF(2) relations follow).
    """
    results = {}

    def check_np(name, product):
        ok = not product.any()
        results[name] = {"ok": ok, "witness": None if ok else product.copy()}

    m = {key: val for key, val in k.matrices.items()}
    mm = linalg.f2_mul
    check_np("oo", (mm(m["d_oo"], m["d_oo"]) ^ mm(m["d_os"], mm(m["dsu"], m["d_uo"]))))
    check_np(
        "os",
        mm(m["d_oo"], m["d_os"]) ^ mm(m["d_os"], m["dss"]) ^ mm(m["d_os"], mm(m["dsu"], m["d_us"])),
    )
    check_np(
        "uo",
        mm(m["d_uo"], m["d_oo"]) ^ mm(m["duu"], m["d_uo"]) ^ mm(m["d_us"], mm(m["dsu"], m["d_uo"])),
    )
    check_np(
        "us",
        m["dus"]
        ^ mm(m["d_uo"], m["d_os"])
        ^ mm(m["duu"], m["d_us"])
        ^ mm(m["d_us"], m["dss"])
        ^ mm(m["d_us"], mm(m["dsu"], m["d_us"])),
    )
    no, ns, nu = k.sizes
    dbar = np.block([[m["dss"], m["dsu"]], [m["dus"], m["duu"]]]) if ns + nu else _zeros(0, 0)
    check_np("dbar_squared", mm(dbar, dbar) if ns + nu else _zeros(0, 0))

    if k.lift is not None:
        lm = k.lift
        mul = lambda a, b: smith.mat_mul(F2Z2, a, b)
        add = lambda a, b: smith.mat_add(F2Z2, a, b)

        def check_gr(name, product):
            ok = smith.mat_is_zero(F2Z2, product)
            results["lift_" + name] = {"ok": ok, "witness": None if ok else product}

        check_gr("oo", add(mul(lm["d_oo"], lm["d_oo"]), mul(lm["d_os"], mul(lm["dsu"], lm["d_uo"]))))
        check_gr(
            "os",
            add(
                add(mul(lm["d_oo"], lm["d_os"]), mul(lm["d_os"], lm["dss"])),
                mul(lm["d_os"], mul(lm["dsu"], lm["d_us"])),
            ),
        )
        check_gr(
            "uo",
            add(
                add(mul(lm["d_uo"], lm["d_oo"]), mul(lm["duu"], lm["d_uo"])),
                mul(lm["d_us"], mul(lm["dsu"], lm["d_uo"])),
            ),
        )
        check_gr(
            "us",
            add(
                add(
                    add(lm["dus"], mul(lm["d_uo"], lm["d_os"])),
                    add(mul(lm["duu"], lm["d_us"]), mul(lm["d_us"], lm["dss"])),
                ),
                mul(lm["d_us"], mul(lm["dsu"], lm["d_us"])),
            ),
        )
        if ns + nu:
            top = smith.mat_hstack(lm["dss"], lm["dsu"])
            bot = smith.mat_hstack(lm["dus"], lm["duu"])
            dbar_l = top + bot
            check_gr("dbar_squared", mul(dbar_l, dbar_l))

    results["ok"] = all(v["ok"] for v in results.values() if isinstance(v, dict))
    return results


@dataclass
class KMTriple:
    """The complexes C-check, C-hat, C-bar with the maps j*, i*, boundary."""

    check: FreeComplex
    hat: FreeComplex
    bar: FreeComplex
    j_map: ChainMap
    i_map: ChainMap
    bnd_map: ChainMap
    check_T: np.ndarray | None = None
    hat_T: np.ndarray | None = None
    bar_T: np.ndarray | None = None
    check_lift: Z2FreeComplex | None = None
    hat_lift: Z2FreeComplex | None = None
    bar_lift: Z2FreeComplex | None = None

    def tcomplex(self, which: str) -> TComplex:
        cx = getattr(self, which)
        t = getattr(self, which + "_T")
        if t is None:
            raise ComplexError("no Z2-lift supplied; T is unavailable")
        return TComplex(cx, t.tolist())

    def borel(self, which: str) -> FreeComplex:
        lift = getattr(self, which + "_lift")
        if lift is None:
            raise ComplexError("no Z2-lift supplied; Borel model unavailable")
        return borel(lift)


def _block2(a, b, c, d):
    return np.block([[a, b], [c, d]])


def assemble(k: KMDataset, validated: dict | None = None) -> KMTriple:
    """Build the three complexes and the exact-triangle maps.

    check  = (C_o + C_s,  [[d_oo, d_os], [dsu d_uo, dss + dsu d_us]])
    hat    = (C_o + C_u,  [[d_oo, d_os dsu], [d_uo, duu + d_us dsu]])
    bar    = (C_s + C_u,  [[dss, dsu], [dus, duu]])
    j*     = [[id, 0], [0, dsu]] : hat -> check
    i*     = [[0, id], [d_uo, d_us]] : check -> bar
    bnd    = [[d_os, 0], [d_us, id]] : bar -> hat
    """
    rep = validated if validated is not None else validate_relations(k)
    if not rep["ok"]:
        bad = [name for name, v in rep.items() if isinstance(v, dict) and not v["ok"]]
        raise ComplexError(f"anomaly relations fail: {bad}")
    no, ns, nu = k.sizes
    m = k.matrices
    mm = linalg.f2_mul
    eye_o, eye_s, eye_u = np.eye(no, dtype=np.uint8), np.eye(ns, dtype=np.uint8), np.eye(nu, dtype=np.uint8)

    d_check = _block2(m["d_oo"], m["d_os"], mm(m["dsu"], m["d_uo"]), m["dss"] ^ mm(m["dsu"], m["d_us"]))
    d_hat = _block2(m["d_oo"], mm(m["d_os"], m["dsu"]), m["d_uo"], m["duu"] ^ mm(m["d_us"], m["dsu"]))
    d_bar = _block2(m["dss"], m["dsu"], m["dus"], m["duu"])

    g_check = g_hat = g_bar = None
    if k.gradings is not None:
        go, gs, gu = k.gradings
        g_check = go + gs
        g_hat = go + gu
        g_bar = gs + [x - 1 for x in gu]

    check = FreeComplex(GF2, [f"o/{x}" for x in k.o_labels] + [f"s/{x}" for x in k.s_labels], d_check.tolist(), g_check)
    hat = FreeComplex(GF2, [f"o/{x}" for x in k.o_labels] + [f"u/{x}" for x in k.u_labels], d_hat.tolist(), g_hat)
    bar = FreeComplex(GF2, [f"s/{x}" for x in k.s_labels] + [f"u/{x}" for x in k.u_labels], d_bar.tolist(), g_bar)

    j_mat = _block2(eye_o, _zeros(no, nu), _zeros(ns, no), m["dsu"])
    i_mat = _block2(_zeros(ns, no), eye_s, m["d_uo"], m["d_us"])
    b_mat = _block2(m["d_os"], _zeros(no, nu), m["d_us"], eye_u)

    j_map = ChainMap(hat, check, j_mat.tolist())
    i_map = ChainMap(check, bar, i_mat.tolist())
    bnd_map = ChainMap(bar, hat, b_mat.tolist())

    triple = KMTriple(check, hat, bar, j_map, i_map, bnd_map)

    if k.lift is not None:
        lm = k.lift
        mul = lambda a, b: smith.mat_mul(F2Z2, a, b)
        add = lambda a, b: smith.mat_add(F2Z2, a, b)

        def lblock(a, b, c, d):
            return smith.mat_hstack(a, b) + smith.mat_hstack(c, d)

        zos = lambda r, c: smith.mat_zero(F2Z2, r, c)
        dl_check = lblock(lm["d_oo"], lm["d_os"], mul(lm["dsu"], lm["d_uo"]), add(lm["dss"], mul(lm["dsu"], lm["d_us"])))
        dl_hat = lblock(lm["d_oo"], mul(lm["d_os"], lm["dsu"]), lm["d_uo"], add(lm["duu"], mul(lm["d_us"], lm["dsu"])))
        dl_bar = lblock(lm["dss"], lm["dsu"], lm["dus"], lm["duu"])
        triple.check_lift = Z2FreeComplex(check.labels, dl_check, g_check)
        triple.hat_lift = Z2FreeComplex(hat.labels, dl_hat, g_hat)
        triple.bar_lift = Z2FreeComplex(bar.labels, dl_bar, g_bar)

        def tpart(mat):
            r = len(mat)
            c = len(mat[0]) if mat else 0
            out = _zeros(r, c)
            for i in range(r):
                for j in range(c):
                    out[i, j] = mat[i][j].b
            return out

        triple.check_T = tpart(dl_check)
        triple.hat_T = tpart(dl_hat)
        triple.bar_T = tpart(dl_bar)
    return triple


def verify_triangle(kt: KMTriple) -> dict:
    """Exactness of ... -> H(hat) -> H(check) -> H(bar) -> H(hat) -> ... by ranks."""
    h_hat = linalg.F2Homology(kt.hat.d_numpy())
    h_check = linalg.F2Homology(kt.check.d_numpy())
    h_bar = linalg.F2Homology(kt.bar.d_numpy())

    def _mat(cm, rows, cols):
        return np.array(cm.matrix, dtype=np.uint8).reshape(rows, cols)

    jh = linalg.f2_induced_map(_mat(kt.j_map, kt.check.n, kt.hat.n), h_hat, h_check)
    ih = linalg.f2_induced_map(_mat(kt.i_map, kt.bar.n, kt.check.n), h_check, h_bar)
    bh = linalg.f2_induced_map(_mat(kt.bnd_map, kt.hat.n, kt.bar.n), h_bar, h_hat)

    def slot(inc, out, n_domain):
        rk_in = linalg.f2_rank(inc)
        rk_out = linalg.f2_rank(out)
        ker_out = out.shape[1] - rk_out
        composed_zero = linalg.f2_is_zero(linalg.f2_mul(out, inc))
        return {"image_rank": rk_in, "kernel_dim": ker_out, "exact": composed_zero and rk_in == ker_out}

    at_check = slot(jh, ih, h_check.dim)
    at_bar = slot(ih, bh, h_bar.dim)
    at_hat = slot(bh, jh, h_hat.dim)
    return {
        "dims": {"hat": h_hat.dim, "check": h_check.dim, "bar": h_bar.dim},
        "at_check": at_check,
        "at_bar": at_bar,
        "at_hat": at_hat,
        "exact": at_check["exact"] and at_bar["exact"] and at_hat["exact"],
    }


def canonical_trn_dataset(n: int, window: int | None = None) -> KMDataset:
    """The T*R^n model: interior pairs y_1..y_n over a single invariant point.

    d(y-hat_i) = (1+iota) y-hat_{i+1} on the interior ladder, the boundary
    eigenvalue ladder x-hat_k -> (1+iota) x-hat_{k+1}, and the connecting count
    d(x-hat_{i-1}) = y-hat_i.  The window bounds the eigenvalue ladder at
    rungs [-window, window).
    """
    if n < 1:
        raise ComplexError("n must be >= 1")
    w = window if window is not None else 2 * n
    if w < n:
        raise ComplexError("window must be at least n")
    o_labels = [f"y{i}" for i in range(1, n + 1)]
    s_idx = list(range(0, w))
    u_idx = list(range(-w, 0))
    s_labels = [f"x{k}" for k in s_idx]
    u_labels = [f"x{k}" for k in u_idx]
    one_plus = GroupRingElem(1, 1)
    one = GroupRingElem(1, 0)

    lift = {name: smith.mat_zero(F2Z2, 0, 0) for name in _MATRIX_SHAPES}
    lift["d_oo"] = smith.mat_zero(F2Z2, n, n)
    for i in range(n - 1):
        lift["d_oo"][i + 1][i] = one_plus
    lift["d_os"] = smith.mat_zero(F2Z2, n, w)
    for i in range(1, n + 1):
        if i - 1 < w:
            lift["d_os"][i - 1][i - 1] = one
    lift["d_uo"] = smith.mat_zero(F2Z2, w, n)
    lift["d_us"] = smith.mat_zero(F2Z2, w, w)
    lift["dss"] = smith.mat_zero(F2Z2, w, w)
    for k in range(w - 1):
        lift["dss"][k + 1][k] = one_plus
    lift["dsu"] = smith.mat_zero(F2Z2, w, w)
    lift["dsu"][0][w - 1] = one_plus  # rung -1 -> rung 0 crossing
    lift["dus"] = smith.mat_zero(F2Z2, w, w)
    lift["duu"] = smith.mat_zero(F2Z2, w, w)
    for k in range(w - 1):
        lift["duu"][k + 1][k] = one_plus

    matrices = {}
    for name in _MATRIX_SHAPES:
        lm = lift[name]
        r = len(lm)
        c = len(lm[0]) if lm else 0
        matrices[name] = np.array(
            [[(x.a ^ x.b) for x in row] for row in lm], dtype=np.uint8
        ) if r and c else _zeros(r, c)

    go = list(range(1, n + 1))
    gs = s_idx
    gu = [k + 1 for k in u_idx]  # rung k < 0 has Morse index k+1 in Y
    return KMDataset(o_labels, s_labels, u_labels, matrices, lift, (go, gs, gu))


def direct_sum(a: KMDataset, b: KMDataset) -> KMDataset:
    o = [f"A/{x}" for x in a.o_labels] + [f"B/{x}" for x in b.o_labels]
    s = [f"A/{x}" for x in a.s_labels] + [f"B/{x}" for x in b.s_labels]
    u = [f"A/{x}" for x in a.u_labels] + [f"B/{x}" for x in b.u_labels]
    mats = {}
    for name, (rk, ck) in _MATRIX_SHAPES.items():
        ma, mb = a.matrices[name], b.matrices[name]
        mats[name] = np.block(
            [[ma, _zeros(ma.shape[0], mb.shape[1])], [_zeros(mb.shape[0], ma.shape[1]), mb]]
        )
    lift = None
    if a.lift is not None and b.lift is not None:
        lift = {}
        for name in _MATRIX_SHAPES:
            la, lb = a.lift[name], b.lift[name]
            ra, ca = a.matrices[name].shape
            rb, cb = b.matrices[name].shape
            block = smith.mat_zero(F2Z2, ra + rb, ca + cb)
            for i in range(ra):
                for j in range(ca):
                    block[i][j] = la[i][j]
            for i in range(rb):
                for j in range(cb):
                    block[ra + i][ca + j] = lb[i][j]
            lift[name] = block
    gradings = None
    if a.gradings is not None and b.gradings is not None:
        gradings = tuple(list(x) + list(y) for x, y in zip(a.gradings, b.gradings))
    return KMDataset(o, s, u, mats, lift, gradings)


def identity_cone(a: KMDataset) -> KMDataset:
    """Cone over the identity KM-morphism: doubles the dataset with identity
    connecting blocks on d_oo, dss, duu (the diagonal-differential positions).

    Char-2 cancellation keeps all five relations; the result is acyclic."""
    o = [f"L/{x}" for x in a.o_labels] + [f"R/{x}" for x in a.o_labels]
    s = [f"L/{x}" for x in a.s_labels] + [f"R/{x}" for x in a.s_labels]
    u = [f"L/{x}" for x in a.u_labels] + [f"R/{x}" for x in a.u_labels]
    no, ns, nu = a.sizes
    eyes = {"o": np.eye(no, dtype=np.uint8), "s": np.eye(ns, dtype=np.uint8), "u": np.eye(nu, dtype=np.uint8)}
    mats = {}
    for name, (rk, ck) in _MATRIX_SHAPES.items():
        m = a.matrices[name]
        off = eyes[rk] if (rk == ck and name in ("d_oo", "dss", "duu")) else _zeros(m.shape[0], m.shape[1])
        mats[name] = np.block([[m, _zeros(*m.shape)], [off, m]])
    return KMDataset(o, s, u, mats)
