"""Polarization-twisted Morse/Floer complexes on eigenvalue-ladder generators.

Generators are pairs (x, k) of a critical point and an eigenvalue index; a
trajectory class u between x_- and x_+ carries a spectral-flow decoration
sf(u) and mod-2 counts of positive and negative solutions.  The dimension
formula ind(x_-) - ind(x_+) + sf(u) + i_- - i_+ - 1 = 0 pins the admissible
rung shift of each class to delta = 1 - sf - (ind(x_-) - ind(x_+)); counts are
applied T-periodically at every rung (input contract).

Rung conventions: the constant ladder is T(x, k) = (x, k+1) and the compressed
F2[t,t^-1]-presentation uses t = that shift, so a class contributes the matrix
entry t^delta.  For index-difference-one classes delta = -sf(u): the
differential sees the local-system monodromy along the reversed trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import smith
from .complexes import ComplexError, FreeComplex, ModuleReport, homology
from .equivariant import TComplex
from .rings import F2LAU, GF2, F2Laurent, F2Poly, laurent_inverse_series
from .spectral import spectral_pages


@dataclass(frozen=True)
class TrajectoryClass:
    """One homotopy class of trajectories from x_minus (at -inf) to x_plus (at +inf)."""

    x_minus: str
    x_plus: str
    sf: int
    n_pos: int
    n_neg: int
    label: str = ""

    @property
    def total(self) -> int:
        return (self.n_pos ^ self.n_neg) & 1


class LocalSystemXi:
    """Monodromy exponents sf per homotopy class, with a composition table."""

    def __init__(self, exponents: dict, compositions=()):
        self.exponents = dict(exponents)
        self.compositions = list(compositions)

    def check_additivity(self) -> bool:
        """sf(a then b) = sf(a) + sf(b) on every supplied composable triple."""
        for a, b, c in self.compositions:
            if self.exponents[a] + self.exponents[b] != self.exponents[c]:
                return False
        return True


class TwistedDataset:
    """Critical points with indices (and optional rational actions/gradings)
    plus per-class trajectory counts."""

    def __init__(self, points, classes, grading=None, actions=None):
        # points: list of (label, morse index)
        self.labels = [p[0] for p in points]
        if len(set(self.labels)) != len(self.labels):
            raise ComplexError("duplicate critical point labels")
        self.ind = {p[0]: int(p[1]) for p in points}
        self.classes = list(classes)
        self.grading = dict(grading) if grading is not None else None
        self.actions = {k: Fraction(v) for k, v in actions.items()} if actions else None
        self._validate()

    def _validate(self):
        for c in self.classes:
            if c.x_minus not in self.ind or c.x_plus not in self.ind:
                raise ComplexError(f"class references unknown point {c}")
            if self.ind[c.x_minus] <= self.ind[c.x_plus]:
                raise ComplexError(
                    f"class {c.x_minus}->{c.x_plus} does not strictly drop the Morse index"
                )
            if self.actions is not None and self.actions[c.x_minus] <= self.actions[c.x_plus]:
                raise ComplexError(
                    f"class {c.x_minus}->{c.x_plus} does not strictly drop the action"
                )
            if self.grading is not None:
                if self.grading[c.x_minus] - self.grading[c.x_plus] != c.sf:
                    raise ComplexError(
                        f"grading is inconsistent with sf on {c.x_minus}->{c.x_plus}"
                    )

    def delta(self, c: TrajectoryClass) -> int:
        """Admissible rung shift from the zero-dimensionality condition."""
        return 1 - c.sf - (self.ind[c.x_minus] - self.ind[c.x_plus])

    @classmethod
    def from_rung_counts(cls, points, rung_entries, window: int, **kw):
        """Build from rung-resolved entries ((x-, i-), (x+, i+), sf, n_pos, n_neg).

        Validates the dimension formula on each entry and T-equivariance of the
        counts across the supplied window before compressing to classes.
        """
        ind = {p[0]: int(p[1]) for p in points}
        seen = {}
        for (xm, im), (xp, ip), sf, np_, nn in rung_entries:
            want = 1 - sf - (ind[xm] - ind[xp])
            if im - ip != want:
                raise ComplexError(
                    f"rung entry ({xm},{im})<-({xp},{ip}) violates the dimension formula"
                )
            key = (xm, xp, sf)
            seen.setdefault(key, {})[ip] = (np_ & 1, nn & 1)
        classes = []
        for (xm, xp, sf), by_rung in seen.items():
            counts = set(by_rung.values())
            if len(counts) != 1:
                raise ComplexError(
                    f"counts for {xm}<-{xp} (sf={sf}) are not T-equivariant across rungs"
                )
            lo = -window
            hi = window - 1
            expected = set()
            delta = 1 - sf - (ind[xm] - ind[xp])
            for ip in range(lo, hi + 1):
                if lo <= ip + delta <= hi:
                    expected.add(ip)
            if expected and set(by_rung) != expected:
                raise ComplexError(
                    f"counts for {xm}<-{xp} (sf={sf}) are missing rungs: not T-equivariant"
                )
            np_, nn = counts.pop()
            classes.append(TrajectoryClass(xm, xp, sf, np_, nn))
        return cls(points, classes, **kw)


@dataclass
class TwistedBuild:
    """Windowed F2 model with T, plus the T-compressed Laurent presentation.

    The compressed presentation is exact and validated (d^2 = 0 and [T, d] = 0
    over F2[t,t^-1]).  The windowed model truncates the rung ladder, so its T
    fails to commute with d in the edge columns, and for datasets whose class
    shifts have mixed signs the truncated differential itself may fail d^2 = 0
    near the edge; in that case `windowed` is None and `window_artifact` holds
    the reason.  Interior reports are unaffected.
    """

    dataset: TwistedDataset
    window: int
    windowed: TComplex | None
    laurent: FreeComplex
    laurent_T: list
    window_artifact: str | None = None


def build_twisted(tw: TwistedDataset, window: int) -> TwistedBuild:
    """The complex on generators (x, k), |k| <= window, with the ladder endomorphism.

    d sums total countst of each class at its admissible shift; T is the ladder
    shift plus the negative counts.  The compressed presentation is the free
    F2[t,t^-1]-complex on Crit(f) with entry sum_u count(u) t^{delta(u)}.
    """
    labels = list(tw.labels)
    m = len(labels)
    pos = {l: i for i, l in enumerate(labels)}
    lo, hi = -window, window - 1
    rungs = list(range(lo, hi + 1))
    nr = len(rungs)

    def gidx(x, k):
        return pos[x] * nr + (k - lo)

    n = m * nr
    d = [[0] * n for _ in range(n)]
    t_mat = [[0] * n for _ in range(n)]
    for x in labels:
        for k in rungs[:-1]:
            t_mat[gidx(x, k + 1)][gidx(x, k)] ^= 1
    for c in tw.classes:
        delta = tw.delta(c)
        for k in rungs:
            if lo <= k + delta <= hi:
                r, col = gidx(c.x_minus, k + delta), gidx(c.x_plus, k)
                d[r][col] ^= c.total
                t_mat[r][col] ^= c.n_neg & 1

    grading = None
    if tw.grading is not None:
        grading = [0] * n
        for x in labels:
            for k in rungs:
                grading[gidx(x, k)] = tw.ind[x] + tw.grading[x] + k
    filtration = [0] * n
    for x in labels:
        for k in rungs:
            filtration[gidx(x, k)] = tw.ind[x]
    gen_labels = [""] * n
    for x in labels:
        for k in rungs:
            gen_labels[gidx(x, k)] = f"{x}@{k}"
    windowed = None
    artifact = None
    try:
        cx = FreeComplex(GF2, gen_labels, d, grading, filtration)
        # the truncated ladder T only commutes with d away from the window
        # edge; the exact check happens on the compressed presentation below
        windowed = TComplex(cx, t_mat, check=False)
    except ComplexError as exc:
        artifact = f"window truncation breaks the complex: {exc}"

    d_lau = smith.mat_zero(F2LAU, m, m)
    t_lau = smith.mat_zero(F2LAU, m, m)
    for i in range(m):
        t_lau[i][i] = F2Laurent.monomial(1)
    for c in tw.classes:
        delta = tw.delta(c)
        i, j = pos[c.x_minus], pos[c.x_plus]
        if c.total:
            d_lau[i][j] = d_lau[i][j] + F2Laurent.monomial(delta)
        if c.n_neg & 1:
            t_lau[i][j] = t_lau[i][j] + F2Laurent.monomial(delta)
    lau = FreeComplex(
        F2LAU,
        labels,
        d_lau,
        None,
        [tw.ind[x] for x in labels],
    )
    lhs = smith.mat_mul(F2LAU, t_lau, d_lau)
    rhs = smith.mat_mul(F2LAU, d_lau, t_lau)
    if not smith.mat_eq(F2LAU, lhs, rhs):
        raise ComplexError("negative counts break the chain-map property of T")
    return TwistedBuild(tw, window, windowed, lau, t_lau, artifact)


def verify_T_invertible(build: TwistedBuild) -> bool:
    """T is invertible iff the compressed T-matrix is unimodular over F2[t,t^-1]."""
    m = len(build.laurent_T)
    if m == 0:
        return True
    factors, _, _ = smith.smith_normal_form(F2LAU, build.laurent_T)
    return all(F2LAU.is_unit(f) for f in factors)


def e2_page(tw: TwistedDataset) -> ModuleReport:
    """Homology of the E1 complex: free F2[t,t^-1] on Crit(f), entries t^{-sf}
    over the index-difference-one classes."""
    labels = list(tw.labels)
    m = len(labels)
    pos = {l: i for i, l in enumerate(labels)}
    d = smith.mat_zero(F2LAU, m, m)
    for c in tw.classes:
        if tw.ind[c.x_minus] - tw.ind[c.x_plus] != 1:
            continue
        if c.total:
            i, j = pos[c.x_minus], pos[c.x_plus]
            d[i][j] = d[i][j] + F2Laurent.monomial(-c.sf)
    cx = FreeComplex(F2LAU, labels, d)
    return homology(cx)


def twisted_spectral_report(build: TwistedBuild, up_to_page: int = 3):
    """Pages of the index filtration on the compressed Laurent complex."""
    return spectral_pages(build.laurent, up_to_page)


def porteous_coefficient(total_sw: F2Poly, n: int, fundamental_pairing) -> int:
    """<w_n(-eta), [M]>: degree-n coefficient of the inverse total class, paired.

    `fundamental_pairing` is the GF(2) pairing of the degree-n monomial with
    the fundamental class, either as a bit or as a degree-indexed mapping.
    """
    if total_sw.coeff(0) != 1:
        raise ComplexError("total Stiefel-Whitney class needs constant term 1")
    if n < 0:
        raise ComplexError("n must be nonnegative")
    inv = laurent_inverse_series(total_sw, n)
    bit = inv.coeff(n)
    if isinstance(fundamental_pairing, dict):
        pairing = fundamental_pairing.get(n, 0) & 1
    else:
        pairing = int(fundamental_pairing) & 1
    return bit & pairing


def two_point_twisted(n: int, sw_number: int) -> ModuleReport:
    """The two-critical-point model: differential coefficient = the SW number.

    Reports rank 0 (coefficient 1) or rank 2 free (coefficient 0) over
    F2[t,t^-1], independent of n.
    """
    if n < 1:
        raise ComplexError("n must be >= 1")
    points = [("x-", n + 1), ("x+", 0)]
    classes = []
    if sw_number & 1:
        classes.append(TrajectoryClass("x-", "x+", 1, 1, 0))
    tw = TwistedDataset(points, classes)
    build = build_twisted(tw, window=max(2, n + 2))
    return homology(build.laurent)


def point_dataset(label: str = "pt") -> TwistedDataset:
    return TwistedDataset([(label, 0)], [], grading={label: 0})
