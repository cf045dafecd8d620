"""The blown-up equivariant complex: localization, truncation, Steenrod squares.

An EquivariantDataset couples non-invariant generator pairs {y, iota y} with
eigenvalue ladders over invariant points: boundary (twisted) data is
T-periodic, interior trajectory data lives at fixed rungs.  Assembly routes
through the eight-matrix machinery of morse_km, always with the F2[Z/2] lift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, smith
from .complexes import (
    ChainMap,
    ComplexError,
    FreeComplex,
    ModuleReport,
    homology,
    truncation_cone,
)
from .equivariant import borel
from .morse_km import KMDataset, KMTriple, assemble, validate_relations
from .rings import (
    F2LAU,
    F2T,
    F2Z2,
    GF2,
    GR_IOTA,
    GR_ONE,
    GR_ONE_PLUS_IOTA,
    F2Laurent,
    F2Poly,
    GroupRingElem,
)
from .twisted import TrajectoryClass, TwistedDataset, build_twisted


@dataclass
class FullComplexData:
    """The non-equivariant total complex upstairs, with its involution.

    labels index the full basis; `involution` is the permutation induced by
    iota; `distinguished` marks one representative per non-invariant pair.
    `pair_label` maps a non-invariant basis label to its o-generator label and
    `invariant_label` maps a fixed basis label to its boundary point label.
    """

    labels: list
    d: np.ndarray
    involution: list
    distinguished: set
    pair_label: dict = field(default_factory=dict)
    invariant_label: dict = field(default_factory=dict)
    grading: list | None = None

    def check(self):
        n = len(self.labels)
        dd = linalg.f2_mul(self.d, self.d)
        if dd.any():
            raise ComplexError("full complex differential does not square to zero")
        p = self.involution
        if sorted(p) != list(range(n)) or any(p[p[i]] != i for i in range(n)):
            raise ComplexError("involution is not a permutation of order <= 2")
        perm = np.zeros((n, n), dtype=np.uint8)
        for i in range(n):
            perm[p[i], i] = 1
        if not np.array_equal(linalg.f2_mul(perm, self.d), linalg.f2_mul(self.d, perm)):
            raise ComplexError("involution does not commute with the differential")


class EquivariantDataset:
    """Non-invariant pairs + invariant eigenvalue ladders + interior counts.

    Interior entries are rung-resolved and lifted:
      oo_lift      : F2[Z/2] matrix on the pair labels
      os_entries   : (pair, x, rung >= 0, GroupRingElem)
      uo_entries   : (x, rung < 0, pair, GroupRingElem)
      us_entries   : (x, rung < 0, x', rung' >= 0, GroupRingElem)
    Boundary data is the embedded TwistedDataset (T-periodic by construction).
    """

    def __init__(
        self,
        pair_labels,
        boundary: TwistedDataset,
        oo_lift=None,
        os_entries=(),
        uo_entries=(),
        us_entries=(),
        pair_grading=None,
        equivariant_regular=False,
        full_complex: FullComplexData | None = None,
        default_window: int = 3,
    ):
        self.pair_labels = list(pair_labels)
        self.boundary = boundary
        npair = len(self.pair_labels)
        self.oo_lift = (
            [list(row) for row in oo_lift]
            if oo_lift is not None
            else smith.mat_zero(F2Z2, npair, npair)
        )
        self.os_entries = list(os_entries)
        self.uo_entries = list(uo_entries)
        self.us_entries = list(us_entries)
        self.pair_grading = dict(pair_grading) if pair_grading is not None else None
        self.equivariant_regular = equivariant_regular
        self.full_complex = full_complex
        self.default_window = default_window
        if full_complex is not None:
            full_complex.check()
        for _, _, k, _ in self.os_entries:
            if k < 0:
                raise ComplexError("os entries live at nonnegative rungs")
        for _, k, _, _ in self.uo_entries:
            if k >= 0:
                raise ComplexError("uo entries live at negative rungs")
        for _, km, _, kp, _ in self.us_entries:
            if km >= 0 or kp < 0:
                raise ComplexError("us entries go from negative to nonnegative rungs")

    def min_window(self) -> int:
        w = self.default_window
        for _, _, k, _ in self.os_entries:
            w = max(w, k + 2)
        for _, k, _, _ in self.uo_entries:
            w = max(w, -k + 1)
        for _, km, _, kp, _ in self.us_entries:
            w = max(w, -km + 1, kp + 2)
        return w

    def intrinsic_degree_bound(self) -> int | None:
        """Largest degree at which dataset-intrinsic (non-ladder) classes can live."""
        if self.pair_grading is None or self.boundary.grading is None:
            return None
        degs = [0]
        degs.extend(self.pair_grading.values())
        bl = self.boundary
        for x in bl.labels:
            degs.append(bl.ind[x] + bl.grading[x])
        for _, x, k, _ in self.os_entries:
            degs.append(bl.ind[x] + bl.grading[x] + k)
        for xm, km, xp, kp, _ in self.us_entries:
            degs.append(bl.ind[xp] + bl.grading[xp] + kp)
        return max(degs)

    def rung_potential(self) -> dict:
        """Per-point window shift making all boundary entries rung-monotone.

        phi satisfies phi(x_minus) <= phi(x_plus) + delta(c) for every class,
        so in shifted rung coordinates every entry (ladder or class) moves
        weakly upward and window truncation never strands a composition.
        The class digraph strictly drops the Morse index, hence is acyclic.
        """
        bl = self.boundary
        phi = {x: 0 for x in bl.labels}
        # order points by increasing Morse index: class edges go from x_plus
        # (lower) to x_minus (higher)
        order = sorted(bl.labels, key=lambda x: bl.ind[x])
        incoming = {}
        for c in bl.classes:
            incoming.setdefault(c.x_minus, []).append(c)
        for x in order:
            for c in incoming.get(x, ()):
                phi[x] = min(phi[x], phi[c.x_plus] + bl.delta(c))
        return phi

    def km_dataset(self, window: int) -> KMDataset:
        """Materialize the eight lifted matrices on per-point shifted rung windows.

        Point x carries rungs [-w + phi(x), w + phi(x)), split into the stable
        range k >= 0 and unstable range k < 0.
        """
        w = window
        if w < self.min_window():
            raise ComplexError(f"window {w} too small; need >= {self.min_window()}")
        xs = list(self.boundary.labels)
        phi = self.rung_potential()
        w_eff = w + max((abs(v) for v in phi.values()), default=0)
        bottom = {x: -w_eff + phi[x] for x in xs}
        top = {x: w_eff + phi[x] for x in xs}  # exclusive
        for x in xs:
            if bottom[x] > -1 or top[x] < 1:
                raise ComplexError("window too small to straddle rung zero")
        s_gens = [(x, k) for x in xs for k in range(0, top[x])]
        u_gens = [(x, k) for x in xs for k in range(bottom[x], 0)]
        s_idx = {g: i for i, g in enumerate(s_gens)}
        u_idx = {g: i for i, g in enumerate(u_gens)}
        no, ns, nu = len(self.pair_labels), len(s_gens), len(u_gens)
        p_idx = {p: i for i, p in enumerate(self.pair_labels)}

        lift = {
            "d_oo": [list(row) for row in self.oo_lift],
            "d_os": smith.mat_zero(F2Z2, no, ns),
            "d_uo": smith.mat_zero(F2Z2, nu, no),
            "d_us": smith.mat_zero(F2Z2, nu, ns),
            "dss": smith.mat_zero(F2Z2, ns, ns),
            "dsu": smith.mat_zero(F2Z2, ns, nu),
            "dus": smith.mat_zero(F2Z2, nu, ns),
            "duu": smith.mat_zero(F2Z2, nu, nu),
        }
        for pair, x, k, coeff in self.os_entries:
            if k < top[x]:
                lift["d_os"][p_idx[pair]][s_idx[(x, k)]] = (
                    lift["d_os"][p_idx[pair]][s_idx[(x, k)]] + coeff
                )
        for x, k, pair, coeff in self.uo_entries:
            if k >= bottom[x]:
                lift["d_uo"][u_idx[(x, k)]][p_idx[pair]] = (
                    lift["d_uo"][u_idx[(x, k)]][p_idx[pair]] + coeff
                )
        for xm, km, xp, kp, coeff in self.us_entries:
            if km >= bottom[xm] and kp < top[xp]:
                lift["d_us"][u_idx[(xm, km)]][s_idx[(xp, kp)]] = (
                    lift["d_us"][u_idx[(xm, km)]][s_idx[(xp, kp)]] + coeff
                )

        # T-periodic boundary blocks: ladder rungs carry (1+iota), a twisted
        # class contributes n_pos + n_neg iota at its admissible shift
        def put_boundary(xm, km, xp, kp, coeff):
            src = (xp, kp)
            tgt = (xm, km)
            if kp >= 0 and km >= 0:
                lift["dss"][s_idx[tgt]][s_idx[src]] = lift["dss"][s_idx[tgt]][s_idx[src]] + coeff
            elif kp < 0 and km >= 0:
                lift["dsu"][s_idx[tgt]][u_idx[src]] = lift["dsu"][s_idx[tgt]][u_idx[src]] + coeff
            elif kp >= 0 and km < 0:
                lift["dus"][u_idx[tgt]][s_idx[src]] = lift["dus"][u_idx[tgt]][s_idx[src]] + coeff
            else:
                lift["duu"][u_idx[tgt]][u_idx[src]] = lift["duu"][u_idx[tgt]][u_idx[src]] + coeff

        for x in xs:
            for k in range(bottom[x], top[x] - 1):
                put_boundary(x, k + 1, x, k, GR_ONE_PLUS_IOTA)
        for c in self.boundary.classes:
            delta = self.boundary.delta(c)
            coeff = GroupRingElem(c.n_pos, c.n_neg)
            if coeff.is_zero():
                continue
            xm, xp = c.x_minus, c.x_plus
            for k in range(bottom[xp], top[xp]):
                if bottom[xm] <= k + delta < top[xm]:
                    put_boundary(xm, k + delta, xp, k, coeff)

        shapes = {
            "d_oo": (no, no),
            "d_os": (no, ns),
            "d_uo": (nu, no),
            "d_us": (nu, ns),
            "dss": (ns, ns),
            "dsu": (ns, nu),
            "dus": (nu, ns),
            "duu": (nu, nu),
        }
        matrices = {}
        for name, lm in lift.items():
            r, c = shapes[name]
            matrices[name] = np.array(
                [[(x.a ^ x.b) for x in row] for row in lm], dtype=np.uint8
            ) if r and c else np.zeros((r, c), dtype=np.uint8)

        gradings = None
        if self.pair_grading is not None and self.boundary.grading is not None:
            go = [self.pair_grading[p] for p in self.pair_labels]
            bl = self.boundary
            gs = [bl.ind[x] + bl.grading[x] + k for (x, k) in s_gens]
            gu = [bl.ind[x] + bl.grading[x] + k + 1 for (x, k) in u_gens]
            gradings = (go, gs, gu)

        o_labels = list(self.pair_labels)
        s_labels = [f"{x}@{k}" for (x, k) in s_gens]
        u_labels = [f"{x}@{k}" for (x, k) in u_gens]
        return KMDataset(o_labels, s_labels, u_labels, matrices, lift, gradings)


def assemble_equivariant(e: EquivariantDataset, window: int | None = None) -> KMTriple:
    w = window if window is not None else e.min_window()
    km = e.km_dataset(w)
    rep = validate_relations(km)
    if not rep["ok"]:
        bad = [name for name, v in rep.items() if isinstance(v, dict) and not v["ok"]]
        raise ComplexError(f"equivariant dataset violates the anomaly relations: {bad}")
    return assemble(km, rep)


def _is_t_power(f: F2Poly) -> bool:
    return f.bits != 0 and f.bits == (1 << f.degree())


def hat_is_t_torsion(report: ModuleReport) -> bool:
    """Every class killed by a t-power: zero free rank, all factors t-powers."""
    return report.free_rank == 0 and all(_is_t_power(f) for f in report.torsion)


def _stable_top_dim(dims_small: dict, dims_large: dict, probe: int) -> int | None:
    a = dims_small.get(probe, 0)
    b = dims_large.get(probe, 0)
    return a if a == b else None


@dataclass
class LocalizationResult:
    check_report: ModuleReport
    hat_report: ModuleReport
    bar_laurent: ModuleReport
    hat_localized_zero: bool
    check_localized_rank: int | None
    bar_localized_rank: int
    ranks_equal: bool | None
    i_induced_f2: np.ndarray
    notes: str = ""


def localization_map(e: EquivariantDataset, window: int | None = None) -> LocalizationResult:
    """The map i*: check -> bar with the localized-rank comparison of Thm 1.1.

    The bar side is computed exactly on the T-compressed Laurent presentation.
    The check side is windowed, so its localized rank is read off the graded
    window-stable range (needs gradings); on ungraded data the rank is None
    and only the exact t-torsion statement for the hat complex is reported.
    """
    w = window if window is not None else e.min_window() + 2
    bound = e.intrinsic_degree_bound()
    if bound is not None and e.boundary.labels:
        # the probe degree (just below the lowest ladder top) must clear every
        # dataset-intrinsic class degree
        bl = e.boundary
        phi = e.rung_potential()
        base = min(bl.ind[x] + bl.grading[x] + phi[x] for x in bl.labels)
        while base + w - 2 <= bound + 1:
            w += 1
    kt = assemble_equivariant(e, w)
    check_rep = kt.tcomplex("check").homology_f2t()
    hat_rep = kt.tcomplex("hat").homology_f2t()
    bburned = build_twisted(e.boundary, w)
    bar_rep = homology(bburned.laurent)
    h_check = linalg.F2Homology(kt.check.d_numpy())
    h_bar = linalg.F2Homology(kt.bar.d_numpy())
    i_np = np.array(kt.i_map.matrix, dtype=np.uint8).reshape(kt.bar.n, kt.check.n)
    i_ind = linalg.f2_induced_map(i_np, h_check, h_bar)

    loc_check = None
    note = ""
    graded = kt.check.grading is not None
    if not e.boundary.labels:
        # no eigenvalue ladders: the windowed complex is the whole complex and
        # its homology is torsion, so the localization kills it exactly
        loc_check = 0
    elif graded:
        kt2 = assemble_equivariant(e, w + 1)
        dims_w = kt.tcomplex("check").graded_homology_dims()
        dims_w1 = kt2.tcomplex("check").graded_homology_dims()
        # probe just below the lowest ladder top: every stable ladder passes
        # through that degree while dataset-intrinsic torsion sits lower
        tops = {}
        for i in range(kt.check.n):
            lbl = kt.check.labels[i]
            if lbl.startswith("s/"):
                x = lbl[2:].rsplit("@", 1)[0]
                tops[x] = max(tops.get(x, -(10 ** 9)), kt.check.grading[i])
        probe = min(tops.values()) - 1
        val = _stable_top_dim(dims_w, dims_w1, probe)
        if val is None:
            note = "graded dims not window-stable at the probe degree"
        loc_check = val
    else:
        note = "ungraded dataset: check-side localized rank needs gradings"
    bar_rank = bar_rep.free_rank
    ranks_equal = None if loc_check is None else (loc_check == bar_rank)
    return LocalizationResult(
        check_rep,
        hat_rep,
        bar_rep,
        hat_is_t_torsion(hat_rep),
        loc_check,
        bar_rank,
        ranks_equal,
        i_ind,
        note,
    )


def smith_report(e: EquivariantDataset, window: int | None = None) -> dict:
    """dim_F2 HF(upstairs) >= rank_{F2[t,t^-1]} HF_tw(fixed set): both sides."""
    if e.full_complex is None:
        raise ComplexError("smith_report needs the non-equivariant total complex")
    w = window if window is not None else e.min_window()
    dim_up = linalg.F2Homology(e.full_complex.d).dim
    bar_rep = homology(build_twisted(e.boundary, w).laurent)
    rank_tw = bar_rep.free_rank
    return {
        "dim_upstairs": dim_up,
        "rank_twisted": rank_tw,
        "inequality_holds": dim_up >= rank_tw,
        "bar_report": bar_rep,
    }


# ---------------------------------------------------------------------------
# canonical diagonal model and the Steenrod pipeline


def morse_canonical_form(v: FreeComplex):
    """Change of F2-basis bringing d to matched form: d(f_k) = g_k, d(h) = 0.

    Returns (P, pairs, homology_idx) with P invertible and P^-1 d P matched;
    new basis vector j is the column P[:, j] in the old coordinates.
    """
    if v.ring is not GF2:
        raise ComplexError("canonical form is for GF(2) complexes")
    n = v.n
    d = v.d_numpy().copy()
    p = np.eye(n, dtype=np.uint8)
    p_inv = np.eye(n, dtype=np.uint8)
    done_rows = set()
    done_cols = set()
    pairs = []
    while True:
        pivot = None
        for j in range(n):
            if j in done_cols or j in done_rows:
                continue
            for i in range(n):
                if i in done_cols or i in done_rows:
                    continue
                if d[i, j]:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j = pivot
        # Q1: replace basis vector i by d(e_j)  (coefficient at i is 1)
        q1 = np.eye(n, dtype=np.uint8)
        q1[:, i] = d[:, j]
        q1_inv = np.eye(n, dtype=np.uint8)
        # (I + N)^-1 with N supported in column i: inverse flips the off-diag column
        col = d[:, j].copy()
        col[i] = 0
        q1_inv[:, i] ^= col
        d = linalg.f2_mul(linalg.f2_mul(q1_inv, d), q1)
        p = linalg.f2_mul(p, q1)
        p_inv = linalg.f2_mul(q1_inv, p_inv)
        # Q2: clear row i outside column j via e_v <- e_v + d[i,v] e_j
        q2 = np.eye(n, dtype=np.uint8)
        for vcol in range(n):
            if vcol != j and d[i, vcol]:
                q2[j, vcol] = 1
        q2_inv = np.eye(n, dtype=np.uint8)
        q2_inv ^= q2 ^ np.eye(n, dtype=np.uint8)
        d = linalg.f2_mul(linalg.f2_mul(q2_inv, d), q2)
        p = linalg.f2_mul(p, q2)
        p_inv = linalg.f2_mul(q2_inv, p_inv)
        pairs.append((i, j))
        done_rows.add(i)
        done_cols.add(j)
    hom = [k for k in range(n) if k not in done_rows and k not in done_cols]
    # sanity: matched form
    for i, j in pairs:
        assert d[i, j] == 1
    assert int(d.sum()) == len(pairs)
    return p, p_inv, pairs, hom, d


def _pair_label(a: str, b: str) -> str:
    return f"{a}|{b}"


def diagonal_model(v: FreeComplex) -> tuple:
    """Canonical self-tensor dataset of an F2 complex, in Morse canonical form.

    Returns (dataset, basis_data) where basis_data carries the matched basis
    (P, pairs, homology indices) used to express Steenrod values.
    """
    p, p_inv, pairs, hom, dmat = morse_canonical_form(v)
    n = v.n
    labels = [f"e{k}" for k in range(n)]
    grading = None
    if v.grading is not None:
        # matched-basis vectors are homogeneous: column j of P mixes only
        # degree-(grading of the pivot) generators
        grading = []
        for j in range(n):
            degs = {v.grading[i] for i in range(n) if p[i, j]}
            if len(degs) != 1:
                raise ComplexError("grading lost in canonical form")
            grading.append(degs.pop())
    ind = {}
    if grading is not None:
        for k in range(n):
            ind[labels[k]] = grading[k]
    else:
        for k in range(n):
            ind[labels[k]] = 0
        for gi, fj in pairs:
            ind[labels[gi]] = 1

    points = [(labels[k], ind[labels[k]]) for k in range(n)]
    classes = [
        TrajectoryClass(labels[gi], labels[fj], ind[labels[gi]] - ind[labels[fj]], 1, 0)
        for gi, fj in pairs
    ]
    boundary = TwistedDataset(points, classes, grading={l: ind[l] for l in labels})

    pair_list = [(a, b) for a in range(n) for b in range(n) if a < b]
    pair_labels = [_pair_label(labels[a], labels[b]) for a, b in pair_list]
    pair_pos = {q: i for i, q in enumerate(pair_list)}
    npair = len(pair_list)
    oo = smith.mat_zero(F2Z2, npair, npair)
    os_entries = []
    uo_entries = []
    d = dmat

    def add_oo(src_pair, c, other, first_coord_moved):
        # target basis element (e_c (x) e_other) or (e_other (x) e_c)
        if first_coord_moved:
            ta, tb = c, other
        else:
            ta, tb = other, c
        if ta == tb:
            return  # diagonal: handled by os data
        if ta < tb:
            coeff = GR_ONE
            tgt = (ta, tb)
        else:
            coeff = GR_IOTA
            tgt = (tb, ta)
        r, col = pair_pos[tgt], pair_pos[src_pair]
        oo[r][col] = oo[r][col] + coeff

    for a, b in pair_list:
        col_pair = (a, b)
        for c in range(n):
            if d[c, a]:
                add_oo(col_pair, c, b, True)
            if d[c, b]:
                add_oo(col_pair, c, a, False)

    for gi, fj in pairs:
        # trajectory from e_gi to e_fj downstairs
        qa, qb = min(gi, fj), max(gi, fj)
        os_entries.append((_pair_label(labels[qa], labels[qb]), labels[fj], 0, GR_ONE))
        uo_entries.append((labels[gi], -1, _pair_label(labels[qa], labels[qb]), GR_ONE))

    pair_grading = None
    if grading is not None:
        pair_grading = {
            _pair_label(labels[a], labels[b]): grading[a] + grading[b] for a, b in pair_list
        }

    full = _diagonal_full_complex(labels, d, grading)
    ds = EquivariantDataset(
        pair_labels,
        boundary,
        oo,
        os_entries,
        uo_entries,
        (),
        pair_grading,
        equivariant_regular=True,
        full_complex=full,
    )
    basis_data = {"P": p, "P_inv": p_inv, "pairs": pairs, "homology": hom, "labels": labels, "d": d}
    return ds, basis_data


def _diagonal_full_complex(labels, d, grading):
    n = len(labels)
    full_labels = [f"{labels[a]}(x){labels[b]}" for a in range(n) for b in range(n)]

    def fidx(a, b):
        return a * n + b

    dd = np.zeros((n * n, n * n), dtype=np.uint8)
    for a in range(n):
        for b in range(n):
            col = fidx(a, b)
            for c in range(n):
                if d[c, a]:
                    dd[fidx(c, b), col] ^= 1
                if d[c, b]:
                    dd[fidx(a, c), col] ^= 1
    involution = [0] * (n * n)
    distinguished = set()
    pair_label = {}
    invariant_label = {}
    for a in range(n):
        for b in range(n):
            involution[fidx(a, b)] = fidx(b, a)
            if a < b:
                distinguished.add(fidx(a, b))
            if a != b:
                lo, hi = min(a, b), max(a, b)
                pair_label[full_labels[fidx(a, b)]] = _pair_label(labels[lo], labels[hi])
            else:
                invariant_label[full_labels[fidx(a, b)]] = labels[a]
    g = None
    if grading is not None:
        g = [grading[a] + grading[b] for a in range(n) for b in range(n)]
    return FullComplexData(full_labels, dd, involution, distinguished, pair_label, invariant_label, g)


@dataclass
class GMapResult:
    chain_map_holds: bool
    images: dict
    window: int


def map_G(e: EquivariantDataset, window: int | None = None) -> GMapResult:
    """G(t^n x) = T^n applied to: the pair class for a distinguished rep, 0 for
    an iota-partner, the lowest stable rung for an invariant point.

    Verified exactly: G(d x) + T G((1+iota)x) = d_check G(x) on every full-complex
    basis element (the higher t-powers follow by T-equivariance).
    """
    if not e.equivariant_regular:
        raise ComplexError("map_G needs the equivariant-regular flag")
    if e.full_complex is None:
        raise ComplexError("map_G needs the non-equivariant total complex")
    w = window if window is not None else e.min_window()
    kt = assemble_equivariant(e, w)
    full = e.full_complex
    nfull = len(full.labels)
    ncheck = kt.check.n
    check_pos = {l: i for i, l in enumerate(kt.check.labels)}

    def g_of_basis(i):
        vec = np.zeros(ncheck, dtype=np.uint8)
        j = full.involution[i]
        if i == j:
            vec[check_pos[f"s/{full.invariant_label[full.labels[i]]}@0"]] = 1
        elif i in full.distinguished:
            vec[check_pos[f"o/{full.pair_label[full.labels[i]]}"]] = 1
        return vec

    g_mat = np.zeros((ncheck, nfull), dtype=np.uint8)
    for i in range(nfull):
        g_mat[:, i] = g_of_basis(i)

    t_check = kt.check_T
    perm = np.zeros((nfull, nfull), dtype=np.uint8)
    for i in range(nfull):
        perm[full.involution[i], i] = 1
    one_plus_iota = (np.eye(nfull, dtype=np.uint8) ^ perm)
    lhs = linalg.f2_mul(g_mat, full.d) ^ linalg.f2_mul(
        t_check, linalg.f2_mul(g_mat, one_plus_iota)
    )
    rhs = linalg.f2_mul(np.array(kt.check.d_numpy()), g_mat)
    ok = np.array_equal(lhs, rhs)
    images = {full.labels[i]: g_mat[:, i].copy() for i in range(nfull)}
    return GMapResult(ok, images, w)


@dataclass
class SteenrodResult:
    st_matrix: list
    iso_after_localization: bool
    homology_rank: int
    sq_by_class: dict
    degree_doubles: bool | None
    window: int


def steenrod_square(v: FreeComplex, window: int | None = None) -> SteenrodResult:
    """The total square: algebraic square -> Kunneth -> G -> localization.

    Computes St on a homology basis of v through the canonical diagonal model,
    expresses values in the T-compressed twisted complex, and certifies that
    St (x) F2[t,t^-1] is an isomorphism onto the twisted homology.
    """
    ds, basis = diagonal_model(v)
    w = window if window is not None else ds.min_window()
    kt = assemble_equivariant(e=ds, window=w)
    gres = map_G(ds, w)
    if not gres.chain_map_holds:
        raise ComplexError("diagonal model G is not a chain map")
    labels = basis["labels"]
    n = len(labels)
    hom_idx = basis["homology"]
    full = ds.full_complex
    nfull = len(full.labels)

    def fidx(a, b):
        return a * n + b

    ncheck = kt.check.n
    # localization i*: check -> bar, then compress bar rungs to Laurent coords
    i_mat = np.array(kt.i_map.matrix, dtype=np.uint8)
    bar_labels = kt.bar.labels

    bbuild = build_twisted(ds.boundary, w)
    lau = bbuild.laurent
    lau_pos = {l: i for i, l in enumerate(lau.labels)}

    def bar_to_laurent(vec):
        out = [F2LAU.zero] * lau.n
        for idx, bit in enumerate(vec):
            if not bit:
                continue
            lbl = bar_labels[idx]
            body = lbl.split("/", 1)[1]
            x, k = body.rsplit("@", 1)
            out[lau_pos[x]] = out[lau_pos[x]] + F2Laurent.monomial(int(k))
        return out

    # homology data of the twisted side over F2[t,t^-1]
    kerb = smith.pid_kernel(F2LAU, lau.d)
    st_cols = []
    sq_by_class = {}
    degree_doubles = None if v.grading is None else True
    for h in hom_idx:
        # algebraic square of the class vector e_h: G(e_h (x) e_h) = (x_h, 0)
        sq_vec = np.zeros(nfull, dtype=np.uint8)
        sq_vec[fidx(h, h)] = 1
        gvec = linalg.f2_mul(
            np.stack([gres.images[full.labels[i]] for i in range(nfull)], axis=1), sq_vec.reshape(-1, 1)
        )[:, 0]
        bar_vec = linalg.f2_mul(i_mat, gvec.reshape(-1, 1))[:, 0]
        lau_vec = bar_to_laurent(bar_vec)
        st_cols.append(lau_vec)
        sq_by_class[labels[h]] = lau_vec
        if degree_doubles is not None:
            # twisted degree of (x, k) is 2 deg(x) + k; St lands at rung 0
            supp = [i for i, c in enumerate(lau_vec) if not c.is_zero()]
            for i in supp:
                base = basis_degree(basis, v, i)
                exps = lau_vec[i].exponents()
                if any(2 * base + exx != 2 * basis_degree(basis, v, h) for exx in exps):
                    degree_doubles = False

    # express St columns in Laurent homology class coordinates and test unimodularity
    m = len(hom_idx)
    iso = True
    if m:
        coords = smith.pid_solve(F2LAU, kerb, [[col[i] for col in st_cols] for i in range(lau.n)])
        if coords is None:
            iso = False
        else:
            img = smith.mat_mul(F2LAU, lau.d, smith.mat_identity(F2LAU, lau.n))
            img_coords = smith.pid_solve(F2LAU, kerb, img)
            rel = smith.mat_hstack(img_coords, smith.pid_kernel(F2LAU, kerb))
            # quotient map: classes = coker of rel; check St spans it unimodularly
            stacked = smith.mat_hstack(coords, rel)
            free, torsion = smith.module_report_from_presentation(
                F2LAU, stacked, len(kerb[0]) if kerb else 0
            )
            iso = free == 0 and not torsion
            hfree, htor = smith.module_report_from_presentation(
                F2LAU, rel, len(kerb[0]) if kerb else 0
            )
            iso = iso and hfree == m and not htor
    hrank = homology(lau).free_rank
    return SteenrodResult([list(c) for c in st_cols], iso and hrank == m, hrank, sq_by_class, degree_doubles, w)


def basis_degree(basis, v: FreeComplex, i: int) -> int:
    if v.grading is None:
        return 0
    p = basis["P"]
    degs = {v.grading[r] for r in range(v.n) if p[r, i]}
    return degs.pop()


def sq_components(st_value, degrees: dict, x_degree: int) -> dict:
    """Split St(x) into Sq^i per the expansion Sq(x) = t^{deg x} sum t^{-i} Sq^i(x).

    `st_value` is a Laurent coefficient vector indexed like the twisted complex
    basis; the trivialization identifies (e_j, k) with t^{deg e_j + k} e_j.
    """
    out = {}
    for j, coeff in enumerate(st_value):
        if coeff.is_zero():
            continue
        for k in coeff.exponents():
            tpow = degrees[j] + k
            i = x_degree - tpow
            out.setdefault(i, set()).symmetric_difference_update({j})
    return {i: sorted(v) for i, v in out.items() if v}


def ss_truncate(e: EquivariantDataset, n: int, window: int | None = None) -> ModuleReport:
    """Homology of check (x)^L F2[t]/(t^n), via the cone over t^n id on the Borel model."""
    if n < 1:
        raise ComplexError("truncation level must be >= 1")
    w = window if window is not None else e.min_window()
    kt = assemble_equivariant(e, w)
    cb = kt.borel("check")
    return homology(truncation_cone(cb, n))


def truncation_tower(e: EquivariantDataset, levels: int, window: int | None = None) -> dict:
    """Reports for n = 1..levels with the stabilization and tower-map verdicts.

    Stabilization: once n exceeds every torsion exponent of the windowed check
    homology, the report freezes.  Tower compatibility: the chain map
    diag(t, id): Cone(t^{n+1}) -> Cone(t^n) is verified and homology dimensions
    are monotone in n.
    """
    w = window if window is not None else e.min_window()
    kt = assemble_equivariant(e, w)
    cb = kt.borel("check")
    reports = {}
    dims = {}
    for n in range(1, levels + 1):
        rep = homology(truncation_cone(cb, n))
        reports[n] = rep
        dims[n] = rep.dimension
    base = kt.tcomplex("check").homology_f2t()
    bound = max((f.degree() for f in base.torsion), default=1)
    if levels > bound:
        stable = all(reports[n] == reports[bound] for n in range(bound, levels + 1))
    else:
        stable = None
    tower_ok = True
    for n in range(1, levels):
        ca, cb_n = truncation_cone(cb, n + 1), truncation_cone(cb, n)
        t = F2Poly.monomial(1)
        mat = smith.mat_zero(F2T, cb_n.n, ca.n)
        half = cb.n
        for i in range(half):
            mat[i][i] = t
            mat[half + i][half + i] = F2Poly(1)
        try:
            ChainMap(ca, cb_n, mat)
        except ComplexError:
            tower_ok = False
        if dims[n + 1] < dims[n]:
            tower_ok = False
    return {
        "reports": reports,
        "dims": dims,
        "torsion_bound": bound,
        "stabilized": stable,
        "tower_maps_ok": tower_ok,
        "check_f2t": base,
    }


def kunneth_point_model(n_shift: int, window: int = 3) -> dict:
    """The point-factor shift pairing t^i (x) t^j -> t^{i+j+n}.

    Verifies F2[t,t^-1]-bilinearity, the displayed formula, and that the
    pairing realizes the derived-tensor identification on the point model:
    on the T-compressed side both factors and the target are free of rank one
    over F2[t,t^-1] and the pairing carries generator (x) generator to a unit.
    The windowed free model of the derived tensor is reported as well; its two
    t-torsion chains stitch into the single Laurent line of the infinite model.
    """

    def pairing(p: F2Laurent, q: F2Laurent) -> F2Laurent:
        return (p * q).times_t(n_shift)

    t = F2Laurent.monomial(1)
    one = F2Laurent.monomial(0)
    bilinear = (
        pairing(t, one) == pairing(one, t) == F2Laurent.monomial(1 + n_shift)
        and pairing(t * t, one) == pairing(t, t)
    )
    formula = pairing(one, one) == F2Laurent.monomial(n_shift)

    from .complexes import tensor_over_pid
    from .equivariant import finite_type_block
    from .twisted import build_twisted as _bt, point_dataset

    compressed = homology(_bt(point_dataset(), 2).laurent)
    unit_image = F2LAU.is_unit(pairing(one, one))
    iso = bilinear and formula and unit_image and compressed.free_rank == 1

    pt = finite_type_block("Binfty", window)
    b1 = borel(pt)
    dt = homology(tensor_over_pid(b1, b1))
    return {
        "pairing": pairing,
        "bilinear": bilinear,
        "formula_holds": formula,
        "compressed_point": compressed,
        "unit_image": unit_image,
        "windowed_derived_report": dt,
        "iso_pattern": iso,
    }
