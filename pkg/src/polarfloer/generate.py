"""Random valid datasets for property tests.

Validity is by construction, not rejection sampling: differentials come from
matched canonical forms conjugated by random basis changes, and composite
datasets are direct sums / identity cones of validated seeds.
"""

from __future__ import annotations

import random

import numpy as np

from . import smith
from .complexes import FreeComplex
from .equiv_floer import EquivariantDataset, diagonal_model
from .equivariant import Z2FreeComplex, finite_type_block
from .morse_km import KMDataset, canonical_trn_dataset, direct_sum, identity_cone
from .rings import F2Z2, GF2, GR_IOTA, GR_ONE, GR_ONE_PLUS_IOTA
from .twisted import TrajectoryClass, TwistedDataset


def random_f2_complex(rng: random.Random, n: int, graded: bool = True) -> FreeComplex:
    """Random (V, d) with d^2 = 0: a matched differential conjugated by a
    random degree-preserving basis change."""
    degrees = sorted(rng.randrange(0, 4) for _ in range(n))
    d = np.zeros((n, n), dtype=np.uint8)
    used = set()
    order = list(range(n))
    rng.shuffle(order)
    for j in order:
        if j in used:
            continue
        partners = [
            i
            for i in range(n)
            if i not in used and i != j and degrees[i] == degrees[j] + 1
        ]
        if partners and rng.random() < 0.6:
            i = rng.choice(partners)
            d[i, j] = 1
            used.add(i)
            used.add(j)
    # conjugate by a random degree-preserving invertible matrix
    p = np.eye(n, dtype=np.uint8)
    for _ in range(2 * n):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b and degrees[a] == degrees[b]:
            p[:, b] ^= p[:, a]
    from .linalg import f2_mul, f2_solve

    p_inv = f2_solve(p, np.eye(n, dtype=np.uint8))
    d = f2_mul(f2_mul(p_inv, d), p)
    labels = [f"v{i}" for i in range(n)]
    return FreeComplex(GF2, labels, d.tolist(), degrees if graded else None)


def random_finite_type_z2(rng: random.Random, max_gens: int = 20) -> Z2FreeComplex:
    """Block sum of B0/B+/B-/Binf windows with an upper-triangular perturbation.

    The perturbation adds arrows from later blocks to earlier ones (respecting
    the block filtration) chosen so that d^2 = 0 is preserved: a random
    F2[Z/2]-multiple of a chain map candidate is accepted only if the square
    stays zero (cheap retry over a small pool, not rejection over datasets).
    """
    kinds = ["B0", "Bplus", "Bminus", "Binfty"]
    blocks = []
    total = 0
    while total < max_gens - 3:
        kind = rng.choice(kinds)
        size = rng.randrange(1, 4)
        blk = finite_type_block(kind, size)
        if total + blk.n > max_gens:
            break
        blocks.append(blk)
        total += blk.n
    if not blocks:
        blocks = [finite_type_block("B0")]
    labels = []
    grading = []
    offsets = []
    n = sum(b.n for b in blocks)
    d = smith.mat_zero(F2Z2, n, n)
    off = 0
    for bi, b in enumerate(blocks):
        offsets.append(off)
        for i in range(b.n):
            labels.append(f"b{bi}/{b.labels[i]}")
            grading.append(b.grading[i])
            for j in range(b.n):
                d[off + i][off + j] = b.d[i][j]
        off += b.n
    # upper-triangular perturbations: arrows from block q to block p < q,
    # degree +1, retried against d^2 = 0
    pool = [GR_ONE, GR_IOTA, GR_ONE_PLUS_IOTA]
    for _ in range(2 * len(blocks)):
        q = rng.randrange(len(blocks))
        p = rng.randrange(len(blocks))
        if p >= q:
            continue
        bq, bp = blocks[q], blocks[p]
        j = rng.randrange(bq.n)
        cands = [i for i in range(bp.n) if bp.grading[i] == bq.grading[j] + 1]
        if not cands:
            continue
        i = rng.choice(cands)
        coeff = rng.choice(pool)
        d2 = [row[:] for row in d]
        r, c = offsets[p] + i, offsets[q] + j
        d2[r][c] = d2[r][c] + coeff
        sq = smith.mat_mul(F2Z2, d2, d2)
        if smith.mat_is_zero(F2Z2, sq):
            d = d2
    return Z2FreeComplex(labels, d, grading)


def random_twisted_dataset(
    rng: random.Random, npoints: int = 5, boundary_safe: bool = False
) -> TwistedDataset:
    """Matched-pair twisted data, graded, T-periodic.

    With boundary_safe the grading is s = -ind, so every class has sf <= 0 and
    a nonnegative rung shift: no downward s/u crossings, as required of the
    boundary data of an interior-free KM dataset (the fourth anomaly relation
    forces the u-from-s boundary count to vanish without interior terms).
    """
    degrees = sorted(rng.randrange(0, 4) for _ in range(npoints))
    labels = [f"p{i}" for i in range(npoints)]
    points = [(labels[i], degrees[i]) for i in range(npoints)]
    if boundary_safe:
        grading = {labels[i]: -degrees[i] for i in range(npoints)}
    else:
        grading = {labels[i]: degrees[i] for i in range(npoints)}
    classes = []
    used = set()
    for j in range(npoints):
        if j in used:
            continue
        partners = [
            i for i in range(npoints) if i not in used and degrees[i] == degrees[j] + 1 and i != j
        ]
        if partners and rng.random() < 0.5:
            i = rng.choice(partners)
            sf = grading[labels[i]] - grading[labels[j]]
            classes.append(TrajectoryClass(labels[i], labels[j], sf, 1, rng.randrange(2)))
            used.add(i)
            used.add(j)
    return TwistedDataset(points, classes, grading=grading)


def random_km_dataset(rng: random.Random, max_gens: int = 30) -> KMDataset:
    """Direct sums and identity cones of canonical and free-action seeds."""
    seeds = []
    budget = max_gens
    while budget > 4 and len(seeds) < 3:
        kind = rng.randrange(3)
        if kind == 0:
            n = rng.randrange(1, 4)
            ds = canonical_trn_dataset(n, window=n + rng.randrange(1, 3))
        elif kind == 1:
            ds = _free_action_km(rng, rng.randrange(2, 5))
        else:
            ds = _boundary_only_km(rng, rng.randrange(1, 3))
        total = sum(ds.sizes)
        if total > budget:
            break
        seeds.append(ds)
        budget -= total
    if not seeds:
        seeds = [canonical_trn_dataset(1)]
    out = seeds[0]
    for s in seeds[1:]:
        out = direct_sum(out, s)
    if rng.random() < 0.3 and 2 * sum(out.sizes) <= max_gens:
        out = identity_cone(out)
    return out


def _free_action_km(rng: random.Random, n: int) -> KMDataset:
    cx = random_f2t_free_action(rng, n)
    zeros = np.zeros((0, 0), dtype=np.uint8)
    mats = {
        "d_oo": cx["reduced"],
        "d_os": np.zeros((n, 0), dtype=np.uint8),
        "d_uo": np.zeros((0, n), dtype=np.uint8),
        "d_us": zeros,
        "dss": zeros,
        "dsu": zeros,
        "dus": zeros,
        "duu": zeros,
    }
    lift = {
        "d_oo": cx["lift"],
        "d_os": smith.mat_zero(F2Z2, n, 0),
        "d_uo": smith.mat_zero(F2Z2, 0, n),
        "d_us": smith.mat_zero(F2Z2, 0, 0),
        "dss": smith.mat_zero(F2Z2, 0, 0),
        "dsu": smith.mat_zero(F2Z2, 0, 0),
        "dus": smith.mat_zero(F2Z2, 0, 0),
        "duu": smith.mat_zero(F2Z2, 0, 0),
    }
    return KMDataset([f"y{i}" for i in range(n)], [], [], mats, lift)


def random_f2t_free_action(rng: random.Random, n: int) -> dict:
    """Matched F2[Z/2]-differential on n pair generators, with gradings."""
    lift = smith.mat_zero(F2Z2, n, n)
    grading = [0] * n
    used = set()
    pool = [GR_ONE, GR_IOTA, GR_ONE_PLUS_IOTA]
    for j in range(n):
        if j in used:
            continue
        partners = [i for i in range(n) if i not in used and i != j]
        if partners and rng.random() < 0.5:
            i = rng.choice(partners)
            lift[i][j] = rng.choice(pool)
            grading[i] = 1
            used.add(i)
            used.add(j)
    reduced = np.array([[x.a ^ x.b for x in row] for row in lift], dtype=np.uint8)
    return {"lift": lift, "reduced": reduced, "grading": grading}


def _boundary_only_km(rng: random.Random, npts: int) -> KMDataset:
    tw = random_twisted_dataset(rng, npts, boundary_safe=True)
    from .equiv_floer import EquivariantDataset

    e = EquivariantDataset([], tw, default_window=2)
    return e.km_dataset(e.min_window())


def random_equivariant_dataset(rng: random.Random) -> EquivariantDataset:
    """Diagonal models, canonical ladders, free-action and boundary-only data."""
    kind = rng.randrange(4)
    if kind == 0:
        v = random_f2_complex(rng, rng.randrange(2, 6))
        return diagonal_model(v)[0]
    if kind == 1:
        return trn_equivariant_dataset(rng.randrange(1, 4))
    if kind == 2:
        n = rng.randrange(1, 5)
        data = random_f2t_free_action(rng, n)
        pairs = [f"y{i}" for i in range(n)]
        bnd = TwistedDataset([], [], grading={})
        return EquivariantDataset(
            pairs,
            bnd,
            data["lift"],
            pair_grading={pairs[i]: data["grading"][i] for i in range(n)},
            default_window=2,
        )
    tw = random_twisted_dataset(rng, rng.randrange(2, 5), boundary_safe=True)
    return EquivariantDataset([], tw, pair_grading={}, default_window=3)


def trn_equivariant_dataset(n: int) -> EquivariantDataset:
    """The T*R^n model as a window-free equivariant dataset."""
    pairs = [f"y{i}" for i in range(1, n + 1)]
    oo = smith.mat_zero(F2Z2, n, n)
    for i in range(n - 1):
        oo[i + 1][i] = GR_ONE_PLUS_IOTA
    boundary = TwistedDataset([("x", 0)], [], grading={"x": 0})
    os_entries = [(pairs[i - 1], "x", i - 1, GR_ONE) for i in range(1, n + 1)]
    grading = {pairs[i - 1]: i for i in range(1, n + 1)}
    return EquivariantDataset(
        pairs,
        boundary,
        oo,
        os_entries,
        pair_grading=grading,
        default_window=2 * n,
    )
